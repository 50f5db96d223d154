use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use dabkit::io::{self, EigenRecord, ValidationRecord};
use dabkit::model::LoadModel;
use dabkit::optsolve::{
    power_grid, solve_operating_point_with, summarize_sweep, sweep_power_with, OperatingPoint, SolverOptions,
    SweepTable,
};
use dabkit::simulate::{
    simulate, state_from_envelope, steady_metrics, validate_point, validation_options, SimOptions, PHASOR_BUDGET,
    POWER_BUDGET,
};
use dabkit::stability::{
    calibrate_passives, eigen_report, zero_dynamics_eigenvalues, zero_dynamics_verdicts, CalibrationTargets, LoadMode,
};
use dabkit::zvs::{calibrate_thresholds, zvs_map, Region, ZvsTargets, HALF_BRIDGES};
use dabkit::{geometry, Complex64, ConverterParams, DabError};
use serde::Serialize;

use crate::{Cli, Command, Grid, EXIT_USAGE};

#[derive(Debug)]
pub enum CliError {
    /// Bad input or an unusable output location.
    Usage(String),
    Core(DabError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(
                DabError::Config(_) | DabError::InvalidParameter { .. } | DabError::Domain { .. } | DabError::Io(_),
            ) => EXIT_USAGE,
            CliError::Core(_) => 1,
        }
    }
}

impl From<DabError> for CliError {
    fn from(e: DabError) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Ctx<'a> {
    cli: &'a Cli,
    params: ConverterParams,
    solver: SolverOptions,
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.cli.out.join(name)
    }

    fn create(&self, name: &str) -> CliResult<BufWriter<File>> {
        let path = self.path(name);
        File::create(&path)
            .map(BufWriter::new)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
        text.push('\n');
        let path = self.path(name);
        fs::write(&path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
    }

    fn solve(&self, power: f64) -> dabkit::Result<OperatingPoint> {
        solve_operating_point_with(power, &self.params, None, &self.solver)
    }

    fn sweep(&self, g: &Grid) -> CliResult<SweepTable> {
        power_grid(g.pmin, g.pmax, g.steps).map_err(|e| CliError::Usage(format!("invalid power grid: {e}")))?;
        Ok(sweep_power_with(g.pmin, g.pmax, g.steps, &self.params, &self.solver)?)
    }
}

fn load_params(path: Option<&Path>) -> CliResult<ConverterParams> {
    let p = match path {
        Some(path) => ConverterParams::load(path)?,
        None => ConverterParams::table_one(),
    };
    p.validate()?;
    Ok(p)
}

/// Runs the selected command; `Ok(n)` carries the number of failed points.
pub fn run(cli: &Cli) -> CliResult<usize> {
    let params = load_params(cli.params.as_deref())?;
    fs::create_dir_all(&cli.out).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", cli.out.display())))?;
    let ctx = Ctx { cli, params, solver: SolverOptions { seed: cli.seed, ..SolverOptions::default() } };
    match &cli.command {
        Command::Sweep(g) => cmd_sweep(&ctx, g),
        Command::Zvs { grid, fit_thresholds } => cmd_zvs(&ctx, grid, *fit_thresholds),
        Command::Stability { powers, mode } => cmd_stability(&ctx, powers, *mode),
        Command::Geometry { power, theta } => cmd_geometry(&ctx, *power, *theta),
        Command::Simulate { power, mode, cycles, steps_per_cycle, record_cycles } => {
            cmd_simulate(&ctx, *power, *mode, *cycles, *steps_per_cycle, *record_cycles)
        }
        Command::Validate { powers, max_cycles } => cmd_validate(&ctx, powers, *max_cycles),
        Command::Calibrate(g) => cmd_calibrate(&ctx, g),
    }
}

fn report_failures(table: &SweepTable) -> usize {
    for row in table.rows.iter().filter(|r| !r.converged()) {
        let why = row.error.as_deref().unwrap_or("optimizer did not converge");
        eprintln!("P = {} W: {why}", row.p_target);
    }
    table.failures()
}

fn cmd_sweep(ctx: &Ctx, g: &Grid) -> CliResult<usize> {
    let table = ctx.sweep(g)?;
    io::write_sweep_csv(ctx.create("sweep.csv")?, &io::sweep_records(&table), ctx.cli.degrees)?;
    let summary = summarize_sweep(&table);
    ctx.write_json("sweep_summary.json", &summary)?;
    println!(
        "sweep: {} rows, {} failed, delta sign change at {:?} W",
        summary.rows, summary.failures, summary.delta_sign_changes
    );
    Ok(report_failures(&table))
}

#[derive(Serialize)]
struct BridgeSummary {
    name: &'static str,
    boundaries_w: Vec<f64>,
    pass_regions: Vec<Region>,
    fail_regions: Vec<Region>,
    passes_anywhere: bool,
}

#[derive(Serialize)]
struct ZvsSummary {
    i1_min: f64,
    i2_min: f64,
    thresholds_fitted: bool,
    bridges: Vec<BridgeSummary>,
}

fn cmd_zvs(ctx: &Ctx, g: &Grid, fit: bool) -> CliResult<usize> {
    let table = ctx.sweep(g)?;
    let mut p = ctx.params;
    if fit {
        (p.i1_min, p.i2_min) = calibrate_thresholds(&table, &p, &ZvsTargets::default());
    }
    let map = zvs_map(&table, &p);
    io::write_zvs_csv(ctx.create("zvs.csv")?, &io::zvs_records(&map))?;
    let bridges = HALF_BRIDGES
        .iter()
        .enumerate()
        .map(|(hb, &name)| BridgeSummary {
            name,
            boundaries_w: map.boundaries(hb),
            pass_regions: map.regions(hb, true),
            fail_regions: map.regions(hb, false),
            passes_anywhere: map.reports.iter().any(|r| r.pass[hb]),
        })
        .collect::<Vec<_>>();
    for b in &bridges {
        println!("{}: pass {:?}", b.name, b.pass_regions.iter().map(|r| (r.start, r.end)).collect::<Vec<_>>());
    }
    ctx.write_json(
        "zvs_summary.json",
        &ZvsSummary { i1_min: p.i1_min, i2_min: p.i2_min, thresholds_fitted: fit, bridges },
    )?;
    Ok(report_failures(&table))
}

#[derive(Serialize)]
struct HurwitzSummary {
    real: dabkit::stability::HurwitzVerdict,
    complex: dabkit::stability::HurwitzVerdict,
    /// `[re, im]` pairs.
    zero_dynamics_eigenvalues: [Complex64; 2],
    l1_sq_minus_lm_sq: f64,
}

fn cmd_stability(ctx: &Ctx, powers: &[f64], only: Option<LoadMode>) -> CliResult<usize> {
    if powers.is_empty() {
        return Err(CliError::Usage("empty power list".into()));
    }
    let p = &ctx.params;
    let modes = match only {
        Some(m) => vec![m],
        None => vec![LoadMode::Cv, LoadMode::Cpl],
    };
    let mut failures = 0;
    for mode in modes {
        let mut records = Vec::new();
        for &pw in powers {
            match ctx.solve(pw).and_then(|op| eigen_report(&op, mode, p)) {
                Ok(r) => records.push(EigenRecord::from(&r)),
                Err(e) => {
                    eprintln!("{mode} P = {pw} W: {e}");
                    failures += 1;
                }
            }
        }
        io::write_stability_csv(ctx.create(&format!("eig_{mode}.csv"))?, &records)?;
        for r in &records {
            println!("{mode} {} W: {}", r.p_w, if r.stable { "stable" } else { "unstable" });
        }
    }
    let (real, complex) = zero_dynamics_verdicts(p)?;
    let (z1, z2) = zero_dynamics_eigenvalues(p)?;
    let summary = HurwitzSummary {
        real,
        complex,
        zero_dynamics_eigenvalues: [z1, z2],
        l1_sq_minus_lm_sq: p.l1 * p.l1 - p.lm * p.lm,
    };
    println!(
        "zero dynamics: real test {}, complex test {}",
        verdict(summary.real.stable),
        verdict(summary.complex.stable)
    );
    ctx.write_json("hurwitz.json", &summary)?;
    Ok(failures)
}

fn verdict(stable: bool) -> &'static str {
    if stable {
        "stable"
    } else {
        "unstable"
    }
}

#[derive(Serialize)]
struct GeometryOutput {
    power_w: f64,
    theta_rad: f64,
    #[serde(flatten)]
    report: geometry::GeometryReport,
}

fn cmd_geometry(ctx: &Ctx, power: f64, theta: f64) -> CliResult<usize> {
    let op = ctx.solve(power)?;
    let report = geometry::geometry_at(&op, &ctx.params, theta)?;
    println!(
        "controllability rank {}, observability rank {}, relative degree ({:?}, {:?}), zero dynamics {:?}",
        report.controllability_rank,
        report.observability_rank,
        report.relative_degree.r1,
        report.relative_degree.r2,
        report.zero_dynamics_states
    );
    ctx.write_json("geometry.json", &GeometryOutput { power_w: power, theta_rad: theta, report })?;
    Ok(0)
}

#[derive(Serialize)]
struct SimulateSummary {
    power_w: f64,
    mode: LoadMode,
    d1_rad: f64,
    d2_rad: f64,
    delta_rad: f64,
    cycles_run: usize,
    metrics: Option<dabkit::simulate::SteadyMetrics>,
    error: Option<String>,
}

fn cmd_simulate(
    ctx: &Ctx,
    power: f64,
    mode: LoadMode,
    cycles: usize,
    steps_per_cycle: usize,
    record_cycles: usize,
) -> CliResult<usize> {
    let op = ctx.solve(power)?;
    let load: LoadModel = mode.load(&op);
    let opts =
        SimOptions { max_cycles: cycles, steps_per_cycle, settle_tol: 0.0, record_last: Some(record_cycles.max(1)) };
    let result = simulate(&op.control, &load, &ctx.params, &state_from_envelope(&op), &opts);
    let (wf, error) = match result {
        Ok(wf) => (wf, None),
        Err(f) => match f.partial {
            Some(partial) => (*partial, Some(f.error)),
            None => return Err(f.error.into()),
        },
    };
    io::write_waveform_csv(ctx.create("waveform.csv")?, &io::waveform_records(&wf))?;
    let summary = SimulateSummary {
        power_w: power,
        mode,
        d1_rad: op.control.d1,
        d2_rad: op.control.d2,
        delta_rad: op.delta(),
        cycles_run: wf.cycles_run,
        metrics: error.is_none().then(|| steady_metrics(&wf, &ctx.params)),
        error: error.as_ref().map(ToString::to_string),
    };
    ctx.write_json("simulate_summary.json", &summary)?;
    match error {
        Some(e) => {
            eprintln!("simulation stopped: {e}");
            Ok(1)
        }
        None => {
            let m = summary.metrics.expect("set on success");
            println!("{} cycles: Pout = {:.2} W, Vc2 = {:.2} V", wf.cycles_run, m.pout_avg, m.vc2_avg);
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct ValidateSummary {
    power_budget: f64,
    phasor_budget: f64,
    points: Vec<ValidationRecord>,
    failed_points: Vec<f64>,
    overall_pass: bool,
}

fn cmd_validate(ctx: &Ctx, powers: &[f64], max_cycles: usize) -> CliResult<usize> {
    if powers.is_empty() {
        return Err(CliError::Usage("empty power list".into()));
    }
    let opts = SimOptions { max_cycles, ..validation_options() };
    let mut records = Vec::new();
    let mut failed = Vec::new();
    for &pw in powers {
        match ctx.solve(pw).and_then(|op| validate_point(&op, &ctx.params, &opts)) {
            Ok(c) => {
                let r = ValidationRecord::from(&c);
                println!(
                    "P = {pw:>7} W: power error {:.2}%, I1 {:.2}%, I2 {:.2}% -> {}",
                    100.0 * r.power_error,
                    100.0 * r.i1_error,
                    100.0 * r.i2_error,
                    if r.pass { "pass" } else { "FAIL" }
                );
                if !r.pass {
                    failed.push(pw);
                }
                records.push(r);
            }
            Err(e) => {
                eprintln!("P = {pw} W: {e}");
                failed.push(pw);
            }
        }
    }
    io::write_validation_csv(ctx.create("validate.csv")?, &records)?;
    let overall_pass = failed.is_empty();
    println!("overall: {}", if overall_pass { "PASS" } else { "FAIL" });
    let n = failed.len();
    ctx.write_json(
        "validate.json",
        &ValidateSummary {
            power_budget: POWER_BUDGET,
            phasor_budget: PHASOR_BUDGET,
            points: records,
            failed_points: failed,
            overall_pass,
        },
    )?;
    Ok(n)
}

#[derive(Serialize)]
struct CalibrationOutput {
    passives: dabkit::stability::Calibration,
    i1_min: f64,
    i2_min: f64,
    zvs_targets: ZvsTargets,
    eigen_targets: CalibrationTargets,
}

fn cmd_calibrate(ctx: &Ctx, g: &Grid) -> CliResult<usize> {
    let eigen_targets = CalibrationTargets::default();
    let passives = calibrate_passives(&ctx.params, &eigen_targets)?;
    let table = ctx.sweep(g)?;
    let zvs_targets = ZvsTargets::default();
    let (i1_min, i2_min) = calibrate_thresholds(&table, &ctx.params, &zvs_targets);
    let mut fitted = ctx.params;
    fitted.c1 = passives.c1;
    fitted.c2 = passives.c2;
    fitted.r = passives.r;
    fitted.i1_min = i1_min;
    fitted.i2_min = i2_min;
    println!(
        "C1 = {:.4e} F, C2 = {:.4e} F, r = {:.4} ohm (rms {:.3}), I1min = {i1_min:.2} A, I2min = {i2_min:.2} A",
        passives.c1, passives.c2, passives.r, passives.rms
    );
    ctx.write_json("calibration.json", &CalibrationOutput { passives, i1_min, i2_min, zvs_targets, eigen_targets })?;
    fs::write(ctx.path("calibrated.toml"), fitted.to_toml_string())
        .map_err(|e| CliError::Usage(format!("cannot write calibrated.toml: {e}")))?;
    Ok(report_failures(&table))
}
