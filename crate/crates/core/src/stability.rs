//! Small-signal stability of the envelope model under constant-voltage and
//! constant-power loads, and Hurwitz tests of the transformer zero dynamics.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::envelope::{envelope_rhs, EnvelopeState};
use crate::error::{DabError, Result};
use crate::model::LoadModel;
use crate::numerics::{eigenvalues, jacobian_fd, quadratic_roots_complex, DenseMatrix, Spectrum};
use crate::optsolve::{solve_operating_point, OperatingPoint};
use crate::params::ConverterParams;

/// Constant voltage holds the load current fixed; constant power draws
/// `P / Vc2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoadMode {
    Cv,
    Cpl,
}

impl LoadMode {
    pub fn load(self, op: &OperatingPoint) -> LoadModel {
        match self {
            LoadMode::Cv => LoadModel::ConstantCurrent(op.io),
            LoadMode::Cpl => LoadModel::ConstantPower(op.state.vc2 * op.io),
        }
    }
}

impl fmt::Display for LoadMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LoadMode::Cv => "cv",
            LoadMode::Cpl => "cpl",
        })
    }
}

impl FromStr for LoadMode {
    type Err = DabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cv" => Ok(LoadMode::Cv),
            "cpl" => Ok(LoadMode::Cpl),
            other => Err(DabError::Config(format!("unknown load mode {other:?} (cv|cpl)"))),
        }
    }
}

/// Analytic Jacobian of the envelope model at `op`, state order
/// `[Id, Vc1, Iq1, Id1, Iq2, Id2, Vc2]`.
pub fn linearize_envelope(op: &OperatingPoint, mode: LoadMode, p: &ConverterParams) -> Result<DenseMatrix> {
    let vc2 = op.state.vc2;
    if mode == LoadMode::Cpl && !(vc2 > 0.0) {
        return Err(DabError::SingularLoad { vc2 });
    }
    let a = p.winding_matrix();
    let b = p.drive_matrix();
    let w = p.omega_s();
    let (s1, s2) = (op.s_qd1, op.s_qd2);
    let mut j = [[0.0; 7]; 7];
    j[0][0] = -p.r / p.ld;
    j[0][1] = -1.0 / p.ld;
    j[1][0] = 1.0 / p.c1;
    j[1][2] = -s1.re / (2.0 * p.c1);
    j[1][3] = -s1.im / (2.0 * p.c1);
    for (k, row) in [(0usize, 2usize), (1, 4)] {
        let (q, d) = (row, row + 1);
        j[q][1] = b[k][0] * s1.re;
        j[d][1] = b[k][0] * s1.im;
        j[q][6] = b[k][1] * s2.re;
        j[d][6] = b[k][1] * s2.im;
        j[q][2] = a[k][0];
        j[d][3] = a[k][0];
        j[q][4] = a[k][1];
        j[d][5] = a[k][1];
        j[q][d] += w;
        j[d][q] -= w;
    }
    j[6][4] = p.n * s2.re / (2.0 * p.c2);
    j[6][5] = p.n * s2.im / (2.0 * p.c2);
    if mode == LoadMode::Cpl {
        j[6][6] = op.state.vc2 * op.io / (p.c2 * vc2 * vc2);
    }
    Ok(DenseMatrix::from_rows(&j))
}

/// Central-difference Jacobian of the same model, for cross-checks.
pub fn linearize_envelope_fd(op: &OperatingPoint, mode: LoadMode, p: &ConverterParams) -> DenseMatrix {
    let load = mode.load(op);
    let f = |x: &[f64]| {
        let xe = EnvelopeState::from_array(x.try_into().expect("seven states"));
        envelope_rhs(&xe, op.s_qd1, op.s_qd2, &load, p)
            .map(|d| d.to_array().to_vec())
            .unwrap_or_else(|_| vec![f64::NAN; 7])
    };
    jacobian_fd(f, &op.state.to_array(), crate::numerics::DEFAULT_FD_STEP)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub p_w: f64,
    pub mode: LoadMode,
    pub jacobian: DenseMatrix,
    pub spectrum: Spectrum,
    pub stable: bool,
    pub dominant: Complex64,
}

impl EigenReport {
    /// The single real eigenvalue: the output-capacitor mode.
    pub fn output_mode(&self) -> Option<f64> {
        let ev = self.spectrum.eigenvalues();
        let scale = ev.iter().map(|e| e.norm()).fold(1.0, f64::max);
        ev.iter().find(|e| e.im.abs() <= 1e-9 * scale).map(|e| e.re)
    }

    /// Upper member of the slowest oscillatory pair (input filter mode).
    pub fn filter_mode(&self) -> Option<Complex64> {
        self.spectrum.eigenvalues().iter().filter(|e| e.im > 0.0).min_by(|a, b| a.im.total_cmp(&b.im)).copied()
    }
}

pub fn eigen_report(op: &OperatingPoint, mode: LoadMode, p: &ConverterParams) -> Result<EigenReport> {
    let jacobian = linearize_envelope(op, mode, p)?;
    let spectrum = eigenvalues(&jacobian)?;
    let dominant = spectrum.dominant().expect("seven eigenvalues");
    Ok(EigenReport { p_w: op.p_target, mode, stable: spectrum.is_hurwitz(), jacobian, spectrum, dominant })
}

pub fn eigen_table(powers: &[f64], mode: LoadMode, p: &ConverterParams) -> Vec<Result<EigenReport>> {
    powers.iter().map(|&pw| solve_operating_point(pw, p, None).and_then(|op| eigen_report(&op, mode, p))).collect()
}

/// Linear dynamics left when both dc-link voltages are held at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroDynamics {
    /// Winding-current matrix of `pI = A I`.
    pub a_real: [[f64; 2]; 2],
    /// Envelope variant `A - j ws`.
    pub a_complex: [[Complex64; 2]; 2],
    /// `-r / Ld` [1/s].
    pub filter_pole: f64,
}

pub fn zero_dynamics_matrices(p: &ConverterParams) -> ZeroDynamics {
    let a = p.winding_matrix();
    let jw = Complex64::new(0.0, p.omega_s());
    ZeroDynamics {
        a_real: a,
        a_complex: [[a[0][0] - jw, Complex64::from(a[0][1])], [Complex64::from(a[1][0]), a[1][1] - jw]],
        filter_pole: -p.r / p.ld,
    }
}

impl ZeroDynamics {
    /// Monic characteristic polynomial `l^2 + (a1 + j b1) l + (a2 + j b2)`
    /// of the complex matrix.
    pub fn complex_coefficients(&self) -> (f64, f64, f64, f64, f64) {
        let m = &self.a_complex;
        let c1 = -(m[0][0] + m[1][1]);
        let c0 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        (1.0, c1.re, c1.im, c0.re, c0.im)
    }

    /// `(a1, a0)` of `l^2 + a1 l + a0` for the real matrix.
    pub fn real_coefficients(&self) -> (f64, f64) {
        let m = &self.a_real;
        (-(m[0][0] + m[1][1]), m[0][0] * m[1][1] - m[0][1] * m[1][0])
    }
}

/// Hurwitz determinants for `a0 l^2 + (a1 + j b1) l + (a2 + j b2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HurwitzVerdict {
    pub a0: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub stable: bool,
}

/// Real monic quadratic `l^2 + a1 l + a0`.
pub fn hurwitz_real(a1: f64, a0: f64) -> HurwitzVerdict {
    let delta1 = a1;
    let delta2 = a1 * a0;
    HurwitzVerdict { a0: 1.0, a1, b1: 0.0, a2: a0, b2: 0.0, delta1, delta2, stable: a1 > 0.0 && a0 > 0.0 }
}

/// Complex quadratic; coefficients are normalized by `a0` first.
pub fn hurwitz_complex(a0: f64, a1: f64, b1: f64, a2: f64, b2: f64) -> Result<HurwitzVerdict> {
    if a0 == 0.0 || !a0.is_finite() {
        return Err(DabError::DegeneratePolynomial);
    }
    let (a1, b1, a2, b2) = (a1 / a0, b1 / a0, a2 / a0, b2 / a0);
    let delta1 = a1;
    // det [[a1, 0, -b2], [1, a2, -b1], [0, b2, a1]]
    let delta2 = a1 * a1 * a2 + a1 * b1 * b2 - b2 * b2;
    Ok(HurwitzVerdict { a0: 1.0, a1, b1, a2, b2, delta1, delta2, stable: delta1 > 0.0 && delta2 > 0.0 })
}

/// Real and complex verdicts for the transformer zero dynamics.
pub fn zero_dynamics_verdicts(p: &ConverterParams) -> Result<(HurwitzVerdict, HurwitzVerdict)> {
    let zd = zero_dynamics_matrices(p);
    let (a1, a0) = zd.real_coefficients();
    let (c0, c1, d1, c2, d2) = zd.complex_coefficients();
    Ok((hurwitz_real(a1, a0), hurwitz_complex(c0, c1, d1, c2, d2)?))
}

/// Eigenvalues of the complex zero-dynamics matrix via its characteristic
/// quadratic.
pub fn zero_dynamics_eigenvalues(p: &ConverterParams) -> Result<(Complex64, Complex64)> {
    let (_, a1, b1, a2, b2) = zero_dynamics_matrices(p).complex_coefficients();
    quadratic_roots_complex(Complex64::new(1.0, 0.0), Complex64::new(a1, b1), Complex64::new(a2, b2))
}

/// Target eigenvalues for fitting the unpublished passives: per power, the
/// input-filter pair and the output mode at constant voltage, and the
/// output mode under constant power [1/s].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTargets {
    pub powers: Vec<f64>,
    pub cv_filter: Vec<Complex64>,
    pub cv_output: Vec<f64>,
    pub cpl_output: Vec<f64>,
}

impl Default for CalibrationTargets {
    fn default() -> Self {
        Self {
            powers: vec![300.0, 700.0, 1000.0],
            cv_filter: vec![Complex64::new(-40.0, 310.0), Complex64::new(-40.0, 310.0), Complex64::new(-40.0, 320.0)],
            cv_output: vec![-70.0, -70.0, -60.0],
            cpl_output: vec![-40.0, 0.0, 30.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c1: f64,
    pub c2: f64,
    pub r: f64,
    /// Root-mean-square normalized residual.
    pub rms: f64,
    pub evaluations: usize,
}

/// Fits `c1`, `c2` and `r` to the target eigenvalues by Nelder-Mead in log
/// coordinates. Operating points do not depend on these passives, so they
/// are solved once.
pub fn calibrate_passives(p: &ConverterParams, targets: &CalibrationTargets) -> Result<Calibration> {
    let ops = targets.powers.iter().map(|&pw| solve_operating_point(pw, p, None)).collect::<Result<Vec<_>>>()?;
    let residual = |x: &[f64; 3]| -> f64 {
        let mut q = *p;
        q.c1 = x[0].exp();
        q.c2 = x[1].exp();
        q.r = x[2].exp();
        let mut acc = 0.0;
        let mut count = 0usize;
        for (k, op) in ops.iter().enumerate() {
            let cv = eigen_report(op, LoadMode::Cv, &q);
            let cpl = eigen_report(op, LoadMode::Cpl, &q);
            let (Ok(cv), Ok(cpl)) = (cv, cpl) else { return f64::INFINITY };
            let (Some(fm), Some(om), Some(pm)) = (cv.filter_mode(), cv.output_mode(), cpl.output_mode()) else {
                return f64::INFINITY;
            };
            let t = targets.cv_filter[k];
            let terms = [
                (fm.re - t.re) / t.re.abs().max(1.0),
                (fm.im - t.im) / t.im.abs().max(1.0),
                (om - targets.cv_output[k]) / targets.cv_output[k].abs().max(1.0),
                (pm - targets.cpl_output[k]) / targets.cv_filter[k].re.abs().max(1.0),
            ];
            acc += terms.iter().map(|v| v * v).sum::<f64>();
            count += terms.len();
        }
        acc / count.max(1) as f64
    };
    let x0 = [p.c1.ln(), p.c2.ln(), p.r.max(1e-3).ln()];
    let (x, f, evaluations) = nelder_mead(residual, x0, 0.3, 2000, 1e-10);
    Ok(Calibration { c1: x[0].exp(), c2: x[1].exp(), r: x[2].exp(), rms: f.sqrt(), evaluations })
}

fn nelder_mead<F: Fn(&[f64; 3]) -> f64>(
    f: F,
    x0: [f64; 3],
    step: f64,
    max_eval: usize,
    ftol: f64,
) -> ([f64; 3], f64, usize) {
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((x0, f(&x0)));
    for k in 0..3 {
        let mut x = x0;
        x[k] += step;
        simplex.push((x, f(&x)));
    }
    let mut evals = 4;
    let lerp = |a: &[f64; 3], b: &[f64; 3], t: f64| [0, 1, 2].map(|i| a[i] + t * (b[i] - a[i]));
    while evals < max_eval {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[3].1);
        if (worst - best).abs() <= ftol * (best.abs() + ftol) {
            break;
        }
        let centroid = [0, 1, 2].map(|i| simplex[..3].iter().map(|s| s.0[i]).sum::<f64>() / 3.0);
        let xw = simplex[3].0;
        let xr = lerp(&centroid, &xw, -1.0);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = lerp(&centroid, &xw, -2.0);
            let fe = f(&xe);
            evals += 1;
            simplex[3] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst {
                let x = lerp(&centroid, &xw, -0.5);
                (x, f(&x))
            } else {
                let x = lerp(&centroid, &xw, 0.5);
                (x, f(&x))
            };
            evals += 1;
            if fc < worst.min(fr) {
                simplex[3] = (xc, fc);
            } else {
                let x_best = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    s.0 = lerp(&x_best, &s.0, 0.5);
                    s.1 = f(&s.0);
                }
                evals += 3;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].0, simplex[0].1, evals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn op_at(pw: f64) -> (ConverterParams, OperatingPoint) {
        let p = ConverterParams::table_one();
        let op = solve_operating_point(pw, &p, None).unwrap();
        (p, op)
    }

    #[test]
    fn rotation_couplings_are_exact() {
        let (p, op) = op_at(300.0);
        let j = linearize_envelope(&op, LoadMode::Cv, &p).unwrap();
        let w = p.omega_s();
        assert_eq!(j[(2, 3)].re, w);
        assert_eq!(j[(3, 2)].re, -w);
        assert_eq!(j[(4, 5)].re, w);
        assert_eq!(j[(5, 4)].re, -w);
    }

    #[test]
    fn load_modes_differ_in_one_entry() {
        let (p, op) = op_at(700.0);
        let cv = linearize_envelope(&op, LoadMode::Cv, &p).unwrap();
        let cpl = linearize_envelope(&op, LoadMode::Cpl, &p).unwrap();
        for i in 0..7 {
            for k in 0..7 {
                if (i, k) != (6, 6) {
                    assert_eq!(cv[(i, k)], cpl[(i, k)]);
                }
            }
        }
        assert!((cpl[(6, 6)].re - 700.0 / (p.c2 * 200.0 * 200.0)).abs() < 1e-6);
    }

    #[test]
    fn analytic_matches_finite_difference() {
        for pw in [300.0, 700.0, -500.0] {
            let (p, op) = op_at(pw);
            for mode in [LoadMode::Cv, LoadMode::Cpl] {
                let a = linearize_envelope(&op, mode, &p).unwrap();
                let f = linearize_envelope_fd(&op, mode, &p);
                for i in 0..7 {
                    for k in 0..7 {
                        let (x, y) = (a[(i, k)].re, f[(i, k)].re);
                        assert!((x - y).abs() <= 1e-4 * x.abs().max(1e-6 * a.max_abs()), "({i},{k}) {x} vs {y}");
                    }
                }
                let ea = eigenvalues(&a).unwrap();
                let ef = eigenvalues(&f).unwrap();
                for (x, y) in ea.eigenvalues().iter().zip(ef.eigenvalues()) {
                    assert!((x - y).norm() <= 1e-3 * x.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn cpl_rejects_non_positive_bus() {
        let (p, mut op) = op_at(300.0);
        op.state.vc2 = 0.0;
        assert!(matches!(linearize_envelope(&op, LoadMode::Cpl, &p), Err(DabError::SingularLoad { .. })));
    }

    #[test]
    fn spectra_are_conjugate_symmetric() {
        let p = ConverterParams::table_one();
        for mode in [LoadMode::Cv, LoadMode::Cpl] {
            for r in eigen_table(&[300.0, 1000.0], mode, &p) {
                let r = r.unwrap();
                assert_eq!(r.spectrum.len(), 7);
                let ev = r.spectrum.eigenvalues();
                for e in ev {
                    assert!(ev.iter().any(|f| (f - e.conj()).norm() <= 1e-9 * e.norm().max(1.0)));
                }
                assert_eq!(r.stable, r.spectrum.max_real() < 0.0);
            }
        }
    }

    #[test]
    fn zero_dynamics_examples() {
        let mut p = ConverterParams::table_one();
        p.r = 0.8;
        let zd = zero_dynamics_matrices(&p);
        assert!((zd.filter_pole + 80.0).abs() < 1e-9);
        let tr = zd.a_real[0][0] + zd.a_real[1][1];
        assert!((tr - (p.l1 * p.r1 + p.l1 * p.r2) / p.h()).abs() < 1e-9 * tr.abs());
        assert!(tr < 0.0);
        let (l1, l2) = zero_dynamics_eigenvalues(&p).unwrap();
        let sum = l1.re + l2.re;
        assert!((sum - p.l1 * (p.r1 + p.r2) / p.h()).abs() < 1e-6 * sum.abs());
        let (fast, slow) = if l1.re < l2.re { (l1, l2) } else { (l2, l1) };
        assert!((fast.re + 4.686e4).abs() < 0.02 * 4.686e4, "{fast}");
        assert!((slow.re + 50.0).abs() < 10.0, "{slow}");
    }

    #[test]
    fn table_one_zero_dynamics_are_stable() {
        let p = ConverterParams::table_one();
        let (real, complex) = zero_dynamics_verdicts(&p).unwrap();
        assert!(real.stable && complex.stable);
        let mut q = p;
        q.lm = 4.3e-3;
        q.l2 = 5.0e-3;
        let (real, complex) = zero_dynamics_verdicts(&q).unwrap();
        assert!(!real.stable && !complex.stable);
    }

    #[test]
    fn complex_test_reduces_to_real() {
        for (a1, a2) in [(1.0, 2.0), (1.0, -2.0), (-1.0, 2.0), (3.0, 0.5)] {
            let c = hurwitz_complex(1.0, a1, 0.0, a2, 0.0).unwrap();
            assert_eq!(c.stable, hurwitz_real(a1, a2).stable);
        }
        assert!(hurwitz_complex(0.0, 1.0, 0.0, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn complex_verdict_matches_roots(
            a1 in -10.0..10.0f64, b1 in -10.0..10.0f64, a2 in -10.0..10.0f64, b2 in -10.0..10.0f64,
        ) {
            let v = hurwitz_complex(1.0, a1, b1, a2, b2).unwrap();
            let (r1, r2) = quadratic_roots_complex(
                Complex64::new(1.0, 0.0), Complex64::new(a1, b1), Complex64::new(a2, b2)).unwrap();
            let margin = r1.re.max(r2.re);
            prop_assume!(margin.abs() > 1e-9);
            prop_assert_eq!(v.stable, margin < 0.0);
        }

        #[test]
        fn delta2_sign_tracks_inductance_condition(
            l1 in 1e-4..1e-2f64, l2 in 1e-4..1e-2f64, k in 0.5..1.2f64,
            r1 in 0.01..2.0f64, r2 in 0.01..2.0f64, fs in 1e3..1e5f64,
        ) {
            let mut p = ConverterParams::table_one();
            p.l1 = l1;
            p.l2 = l2;
            p.lm = k * (l1 * l2).sqrt();
            p.r1 = r1;
            p.r2 = r2;
            p.fs = fs;
            prop_assume!((p.h() / (l1 * l2)).abs() > 1e-6);
            let gap = p.l1 * p.l1 - p.lm * p.lm;
            prop_assume!(gap.abs() > 1e-9 * p.l1 * p.l1);
            let (_, c) = zero_dynamics_verdicts(&p).unwrap();
            prop_assert_eq!(c.delta2 > 0.0, gap > 0.0);
        }
    }
}
