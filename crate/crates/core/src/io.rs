//! CSV writers and readers for sweep, ZVS, eigenvalue, waveform and validation tables.
//!
//! Each file starts with one `# schema=<name>/<version>` comment line; the
//! readers skip `#` lines. Angles are radians unless the writer was asked
//! for degrees, in which case the angle columns are suffixed `_deg`.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DabError, Result};
use crate::optsolve::SweepTable;
use crate::simulate::{Comparison, Waveforms};
use crate::stability::{EigenReport, LoadMode};
use crate::zvs::ZvsMap;

pub const SCHEMA_VERSION: u32 = 1;

const SWEEP_COLUMNS: [&str; 12] = [
    "P_target_W",
    "d1_rad",
    "d2_rad",
    "delta_rad",
    "Iqd1_peak_A",
    "Iqd2_peak_A",
    "Id_A",
    "Io_A",
    "Pin_W",
    "Pout_W",
    "objective",
    "converged",
];
const SWEEP_ANGLES: [usize; 3] = [1, 2, 3];

const ZVS_COLUMNS: [&str; 9] = [
    "P_target_W",
    "I1_at_pi_minus_a1half_A",
    "I1_at_a1half_A",
    "I2_at_delta_minus_a2half_A",
    "I2_at_delta_plus_a2half_A",
    "hb1_pass",
    "hb2_pass",
    "hb3_pass",
    "hb4_pass",
];

const WAVEFORM_COLUMNS: [&str; 8] = ["t_s", "Id_A", "Vc1_V", "I1_A", "I2_A", "Vc2_V", "s1", "s2"];

fn angle_header(name: &str, degrees: bool) -> String {
    if degrees {
        name.replace("_rad", "_deg")
    } else {
        name.to_string()
    }
}

fn writer<W: Write>(mut out: W, schema: &str) -> Result<csv::Writer<W>> {
    writeln!(out, "# schema={schema}/{SCHEMA_VERSION}")?;
    Ok(csv::WriterBuilder::new().from_writer(out))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input)
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

fn parse_f64(s: &str, col: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| DabError::Io(format!("column {col}: cannot parse {s:?} as a number")))
}

fn parse_bool(s: &str, col: &str) -> Result<bool> {
    match s.trim() {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        other => Err(DabError::Io(format!("column {col}: cannot parse {other:?} as a flag"))),
    }
}

/// Maps expected column names (with `_rad`/`_deg` equivalence) to positions;
/// returns which angle columns were stored in degrees.
fn locate(headers: &csv::StringRecord, expected: &[&str]) -> Result<(Vec<usize>, Vec<bool>)> {
    let mut idx = Vec::with_capacity(expected.len());
    let mut deg = Vec::with_capacity(expected.len());
    for name in expected {
        let alt = name.replace("_rad", "_deg");
        let pos = headers
            .iter()
            .position(|h| h == *name)
            .map(|p| (p, false))
            .or_else(|| (alt != *name).then(|| headers.iter().position(|h| h == alt).map(|p| (p, true))).flatten());
        let (p, d) = pos.ok_or_else(|| DabError::Io(format!("missing column {name}")))?;
        idx.push(p);
        deg.push(d);
    }
    Ok((idx, deg))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub p_target: f64,
    pub d1: f64,
    pub d2: f64,
    pub delta: f64,
    pub iqd1_peak: f64,
    pub iqd2_peak: f64,
    pub id: f64,
    pub io: f64,
    pub pin: f64,
    pub pout: f64,
    pub objective: f64,
    pub converged: bool,
}

impl SweepRecord {
    fn values(&self) -> [f64; 11] {
        [
            self.p_target,
            self.d1,
            self.d2,
            self.delta,
            self.iqd1_peak,
            self.iqd2_peak,
            self.id,
            self.io,
            self.pin,
            self.pout,
            self.objective,
        ]
    }
}

pub fn sweep_records(table: &SweepTable) -> Vec<SweepRecord> {
    table
        .rows
        .iter()
        .map(|row| match &row.point {
            Some(op) => SweepRecord {
                p_target: row.p_target,
                d1: op.control.d1,
                d2: op.control.d2,
                delta: op.delta(),
                iqd1_peak: op.i_qd1().norm(),
                iqd2_peak: op.i_qd2().norm(),
                id: op.state.id,
                io: op.io,
                pin: op.pin,
                pout: op.pout,
                objective: op.objective,
                converged: op.converged,
            },
            None => SweepRecord {
                p_target: row.p_target,
                d1: f64::NAN,
                d2: f64::NAN,
                delta: f64::NAN,
                iqd1_peak: f64::NAN,
                iqd2_peak: f64::NAN,
                id: f64::NAN,
                io: f64::NAN,
                pin: f64::NAN,
                pout: f64::NAN,
                objective: f64::NAN,
                converged: false,
            },
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(out: W, records: &[SweepRecord], degrees: bool) -> Result<()> {
    let mut w = writer(out, "sweep")?;
    w.write_record(SWEEP_COLUMNS.iter().map(|c| angle_header(c, degrees)))?;
    for r in records {
        let mut v = r.values();
        if degrees {
            for k in SWEEP_ANGLES {
                v[k] = v[k].to_degrees();
            }
        }
        let mut fields: Vec<String> = v.iter().map(|x| fmt(*x)).collect();
        fields.push(r.converged.to_string());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRecord>> {
    let mut rd = reader(input);
    let (idx, deg) = locate(rd.headers()?, &SWEEP_COLUMNS)?;
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let mut v = [0.0; 11];
        for k in 0..11 {
            let x = parse_f64(&rec[idx[k]], SWEEP_COLUMNS[k])?;
            v[k] = if deg[k] { x.to_radians() } else { x };
        }
        out.push(SweepRecord {
            p_target: v[0],
            d1: v[1],
            d2: v[2],
            delta: v[3],
            iqd1_peak: v[4],
            iqd2_peak: v[5],
            id: v[6],
            io: v[7],
            pin: v[8],
            pout: v[9],
            objective: v[10],
            converged: parse_bool(&rec[idx[11]], SWEEP_COLUMNS[11])?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZvsRecord {
    pub p_target: f64,
    pub currents: [f64; 4],
    pub pass: [bool; 4],
}

pub fn zvs_records(map: &ZvsMap) -> Vec<ZvsRecord> {
    map.reports.iter().map(|r| ZvsRecord { p_target: r.p_target, currents: r.currents, pass: r.pass }).collect()
}

pub fn write_zvs_csv<W: Write>(out: W, records: &[ZvsRecord]) -> Result<()> {
    let mut w = writer(out, "zvs")?;
    w.write_record(ZVS_COLUMNS)?;
    for r in records {
        let mut fields = vec![fmt(r.p_target)];
        fields.extend(r.currents.iter().map(|c| fmt(*c)));
        fields.extend(r.pass.iter().map(|b| b.to_string()));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_zvs_csv<R: Read>(input: R) -> Result<Vec<ZvsRecord>> {
    let mut rd = reader(input);
    let (idx, _) = locate(rd.headers()?, &ZVS_COLUMNS)?;
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |k: usize| parse_f64(&rec[idx[k]], ZVS_COLUMNS[k]);
        let b = |k: usize| parse_bool(&rec[idx[k]], ZVS_COLUMNS[k]);
        out.push(ZvsRecord {
            p_target: f(0)?,
            currents: [f(1)?, f(2)?, f(3)?, f(4)?],
            pass: [b(5)?, b(6)?, b(7)?, b(8)?],
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub p_w: f64,
    pub mode: LoadMode,
    pub eigenvalues: Vec<Complex64>,
    pub stable: bool,
}

impl From<&EigenReport> for EigenRecord {
    fn from(r: &EigenReport) -> Self {
        Self { p_w: r.p_w, mode: r.mode, eigenvalues: r.spectrum.eigenvalues().to_vec(), stable: r.stable }
    }
}

fn stability_columns() -> Vec<String> {
    let mut cols = vec!["P_W".to_string(), "mode".to_string()];
    cols.extend((1..=7).map(|k| format!("re_{k}")));
    cols.extend((1..=7).map(|k| format!("im_{k}")));
    cols.push("stable".into());
    cols
}

pub fn write_stability_csv<W: Write>(out: W, records: &[EigenRecord]) -> Result<()> {
    let mut w = writer(out, "stability")?;
    w.write_record(stability_columns())?;
    for r in records {
        if r.eigenvalues.len() != 7 {
            return Err(DabError::Dimension(format!("expected 7 eigenvalues, got {}", r.eigenvalues.len())));
        }
        let mut fields = vec![fmt(r.p_w), r.mode.to_string()];
        fields.extend(r.eigenvalues.iter().map(|e| fmt(e.re)));
        fields.extend(r.eigenvalues.iter().map(|e| fmt(e.im)));
        fields.push(r.stable.to_string());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stability_csv<R: Read>(input: R) -> Result<Vec<EigenRecord>> {
    let mut rd = reader(input);
    let cols = stability_columns();
    let names: Vec<&str> = cols.iter().map(String::as_str).collect();
    let (idx, _) = locate(rd.headers()?, &names)?;
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |k: usize| parse_f64(&rec[idx[k]], names[k]);
        let eigenvalues = (0..7).map(|k| Ok(Complex64::new(f(2 + k)?, f(9 + k)?))).collect::<Result<Vec<_>>>()?;
        out.push(EigenRecord {
            p_w: f(0)?,
            mode: rec[idx[1]].parse()?,
            eigenvalues,
            stable: parse_bool(&rec[idx[16]], "stable")?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveformRecord {
    pub t: f64,
    pub state: [f64; 5],
    pub s1: i8,
    pub s2: i8,
}

pub fn waveform_records(w: &Waveforms) -> Vec<WaveformRecord> {
    w.t.iter()
        .zip(&w.states)
        .zip(w.s1.iter().zip(&w.s2))
        .map(|((&t, x), (&s1, &s2))| WaveformRecord { t, state: x.to_array(), s1, s2 })
        .collect()
}

pub fn write_waveform_csv<W: Write>(out: W, records: &[WaveformRecord]) -> Result<()> {
    let mut w = writer(out, "waveform")?;
    w.write_record(WAVEFORM_COLUMNS)?;
    for r in records {
        let mut fields = vec![fmt(r.t)];
        fields.extend(r.state.iter().map(|v| fmt(*v)));
        fields.push(r.s1.to_string());
        fields.push(r.s2.to_string());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_waveform_csv<R: Read>(input: R) -> Result<Vec<WaveformRecord>> {
    let mut rd = reader(input);
    let (idx, _) = locate(rd.headers()?, &WAVEFORM_COLUMNS)?;
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |k: usize| parse_f64(&rec[idx[k]], WAVEFORM_COLUMNS[k]);
        let s = |k: usize| -> Result<i8> {
            rec[idx[k]]
                .trim()
                .parse()
                .map_err(|_| DabError::Io(format!("column {}: bad switch state", WAVEFORM_COLUMNS[k])))
        };
        out.push(WaveformRecord { t: f(0)?, state: [f(1)?, f(2)?, f(3)?, f(4)?, f(5)?], s1: s(6)?, s2: s(7)? });
    }
    Ok(out)
}

const VALIDATION_COLUMNS: [&str; 14] = [
    "P_target_W",
    "fha_I1_peak_A",
    "fha_I2_peak_A",
    "sim_I1_peak_A",
    "sim_I2_peak_A",
    "sim_Pout_W",
    "sim_Vc2_V",
    "power_error",
    "I1_mag_error",
    "I2_mag_error",
    "cycles",
    "square_drive",
    "settled",
    "pass",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationRecord {
    pub p_target: f64,
    pub fha_i1: f64,
    pub fha_i2: f64,
    pub sim_i1: f64,
    pub sim_i2: f64,
    pub sim_pout: f64,
    pub sim_vc2: f64,
    pub power_error: f64,
    pub i1_error: f64,
    pub i2_error: f64,
    pub cycles: usize,
    pub square_drive: bool,
    pub settled: bool,
    pub pass: bool,
}

impl From<&Comparison> for ValidationRecord {
    fn from(c: &Comparison) -> Self {
        Self {
            p_target: c.p_target,
            fha_i1: c.fha_i_qd1.norm(),
            fha_i2: c.fha_i_qd2.norm(),
            sim_i1: c.sim.i_qd1_hat.norm(),
            sim_i2: c.sim.i_qd2_hat.norm(),
            sim_pout: c.sim.pout_avg,
            sim_vc2: c.sim.vc2_avg,
            power_error: c.power_error,
            i1_error: c.i1_mag_error,
            i2_error: c.i2_mag_error,
            cycles: c.cycles,
            square_drive: c.square_drive,
            settled: c.sim.settled,
            pass: c.within_budget(),
        }
    }
}

pub fn write_validation_csv<W: Write>(out: W, records: &[ValidationRecord]) -> Result<()> {
    let mut w = writer(out, "validate")?;
    w.write_record(VALIDATION_COLUMNS)?;
    for r in records {
        let nums = [
            r.p_target,
            r.fha_i1,
            r.fha_i2,
            r.sim_i1,
            r.sim_i2,
            r.sim_pout,
            r.sim_vc2,
            r.power_error,
            r.i1_error,
            r.i2_error,
        ];
        let mut fields: Vec<String> = nums.iter().map(|v| fmt(*v)).collect();
        fields.push(r.cycles.to_string());
        fields.extend([r.square_drive, r.settled, r.pass].iter().map(|b| b.to_string()));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_validation_csv<R: Read>(input: R) -> Result<Vec<ValidationRecord>> {
    let mut rd = reader(input);
    let (idx, _) = locate(rd.headers()?, &VALIDATION_COLUMNS)?;
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |k: usize| parse_f64(&rec[idx[k]], VALIDATION_COLUMNS[k]);
        let b = |k: usize| parse_bool(&rec[idx[k]], VALIDATION_COLUMNS[k]);
        out.push(ValidationRecord {
            p_target: f(0)?,
            fha_i1: f(1)?,
            fha_i2: f(2)?,
            sim_i1: f(3)?,
            sim_i2: f(4)?,
            sim_pout: f(5)?,
            sim_vc2: f(6)?,
            power_error: f(7)?,
            i1_error: f(8)?,
            i2_error: f(9)?,
            cycles: rec[idx[10]].trim().parse().map_err(|_| DabError::Io("column cycles: bad count".into()))?,
            square_drive: b(11)?,
            settled: b(12)?,
            pass: b(13)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_sweep() -> Vec<SweepRecord> {
        vec![
            SweepRecord {
                p_target: -100.0,
                d1: 2.5,
                d2: std::f64::consts::PI,
                delta: -0.1234567890123,
                iqd1_peak: 3.0,
                iqd2_peak: 4.0,
                id: -1.0,
                io: -0.5,
                pin: -100.0 + 1e-9,
                pout: -100.0,
                objective: 25.0,
                converged: true,
            },
            SweepRecord {
                p_target: 100.0,
                d1: f64::NAN,
                d2: f64::NAN,
                delta: f64::NAN,
                iqd1_peak: f64::NAN,
                iqd2_peak: f64::NAN,
                id: f64::NAN,
                io: f64::NAN,
                pin: f64::NAN,
                pout: f64::NAN,
                objective: f64::NAN,
                converged: false,
            },
        ]
    }

    #[test]
    fn sweep_round_trip_exact() {
        let recs = sample_sweep();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &recs, false).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# schema=sweep/1\nP_target_W,d1_rad,d2_rad,delta_rad,"));
        let back = read_sweep_csv(buf.as_slice()).unwrap();
        assert_eq!(back[0], recs[0]);
        assert!(back[1].d1.is_nan() && !back[1].converged);
    }

    #[test]
    fn degrees_are_presentation_only() {
        let recs = sample_sweep();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &recs, true).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("d1_deg") && text.contains(",180,"));
        let back = read_sweep_csv(buf.as_slice()).unwrap();
        assert!((back[0].delta - recs[0].delta).abs() < 1e-14);
    }

    #[test]
    fn other_tables_round_trip() {
        let z = vec![ZvsRecord { p_target: 5.0, currents: [1.0, -2.0, 0.5, 0.25], pass: [false, true, false, true] }];
        let mut buf = Vec::new();
        write_zvs_csv(&mut buf, &z).unwrap();
        assert_eq!(read_zvs_csv(buf.as_slice()).unwrap(), z);

        let e = vec![EigenRecord {
            p_w: 300.0,
            mode: LoadMode::Cpl,
            eigenvalues: (0..7).map(|k| Complex64::new(-(k as f64), k as f64 * 0.5)).collect(),
            stable: true,
        }];
        let mut buf = Vec::new();
        write_stability_csv(&mut buf, &e).unwrap();
        assert_eq!(read_stability_csv(buf.as_slice()).unwrap(), e);

        let w = vec![WaveformRecord { t: 4e-5, state: [1.0, 2.0, 3.0, 4.0, 5.0], s1: -1, s2: 0 }];
        let mut buf = Vec::new();
        write_waveform_csv(&mut buf, &w).unwrap();
        assert_eq!(read_waveform_csv(buf.as_slice()).unwrap(), w);

        let v = vec![ValidationRecord {
            p_target: 250.0,
            fha_i1: 4.0,
            fha_i2: 3.5,
            sim_i1: 4.1,
            sim_i2: 3.4,
            sim_pout: 245.0,
            sim_vc2: 206.0,
            power_error: 0.02,
            i1_error: 0.025,
            i2_error: 0.0286,
            cycles: 3000,
            square_drive: false,
            settled: true,
            pass: true,
        }];
        let mut buf = Vec::new();
        write_validation_csv(&mut buf, &v).unwrap();
        assert_eq!(read_validation_csv(buf.as_slice()).unwrap(), v);
    }

    #[test]
    fn missing_column_is_an_error() {
        let text = "P_target_W,d1_rad\n1,2\n";
        assert!(read_sweep_csv(text.as_bytes()).is_err());
    }
}
