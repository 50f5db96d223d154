//! Steady-state operating points: minimum winding-current control for a
//! requested output power, power sweeps and the transferable-power limit.
//!
//! For fixed pulse widths the winding currents are affine in the two control
//! phasors, `I = u * S1 + w * S2`, so the output-current constraint fixes the
//! outer shift in closed form up to a two-way branch. The remaining problem is
//! a box-constrained minimization over `(d1, d2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::envelope::EnvelopeState;
use crate::error::{DabError, Result};
use crate::model::{wrap_angle, ControlVector};
use crate::params::ConverterParams;

const FHA_GAIN: f64 = 4.0 / PI;
/// Lower bound of the pulse-width box; zero width disables a bridge.
pub const D_MIN: f64 = 1e-3;

/// Solves the four steady-state winding equations for the current phasors.
pub fn solve_currents(
    s_qd1: Complex64,
    s_qd2: Complex64,
    vc1: f64,
    vc2: f64,
    p: &ConverterParams,
) -> Result<(Complex64, Complex64)> {
    let a = p.winding_matrix();
    let b = p.drive_matrix();
    let jw = Complex64::new(0.0, p.omega_s());
    let m = [[a[0][0] - jw, Complex64::from(a[0][1])], [Complex64::from(a[1][0]), a[1][1] - jw]];
    let v1 = s_qd1 * vc1;
    let v2 = s_qd2 * vc2;
    let rhs = [-(v1 * b[0][0] + v2 * b[0][1]), -(v1 * b[1][0] + v2 * b[1][1])];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m[0][0].norm() * m[1][1].norm() + m[0][1].norm() * m[1][0].norm();
    if !(det.norm() > 1e-14 * scale) {
        return Err(DabError::Singular("transformer current equations".into()));
    }
    Ok(((rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det, (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub control: ControlVector,
    pub s_qd1: Complex64,
    pub s_qd2: Complex64,
    pub state: EnvelopeState,
    pub p_target: f64,
    pub io: f64,
    pub pin: f64,
    pub pout: f64,
    /// `|I_qd1|^2 + |I_qd2|^2` [A^2].
    pub objective: f64,
    pub converged: bool,
    /// Both bridges idle (zero power); phasors and currents are exactly zero.
    pub gated: bool,
    pub iterations: usize,
    /// Projected-gradient norm of the reduced objective at exit.
    pub pg_norm: f64,
    /// `|Re(S2 I2*) n/2 - Io| / max(|Io|, 1e-12)`.
    pub constraint_residual: f64,
}

impl OperatingPoint {
    pub fn delta(&self) -> f64 {
        self.control.delta()
    }

    pub fn i_qd1(&self) -> Complex64 {
        self.state.i_qd1()
    }

    pub fn i_qd2(&self) -> Complex64 {
        self.state.i_qd2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Projected-gradient tolerance relative to `max(1, objective)`.
    pub optimality_tol: f64,
    pub constraint_tol: f64,
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { max_iterations: 500, optimality_tol: 1e-6, constraint_tol: 1e-6, random_starts: 4, seed: 0x0DAB }
    }
}

/// Current map `I = u * S1 + w * S2` at fixed dc voltages together with the
/// output-current target `Re(S2 I2*) = 2 Io / n`.
#[derive(Debug, Clone, Copy)]
struct Reduced {
    u: [Complex64; 2],
    w: [Complex64; 2],
    target: f64,
}

impl Reduced {
    fn new(vc1: f64, vc2: f64, io: f64, p: &ConverterParams) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let (u1, u2) = solve_currents(one, zero, vc1, vc2, p)?;
        let (w1, w2) = solve_currents(zero, one, vc1, vc2, p)?;
        Ok(Self { u: [u1, u2], w: [w1, w2], target: 2.0 * io / p.n })
    }

    fn objective_at(&self, d1: f64, d2: f64, delta: f64) -> f64 {
        let s1 = FHA_GAIN * (d1 / 2.0).sin();
        let s2 = Complex64::from_polar(FHA_GAIN * (d2 / 2.0).sin(), -delta);
        let i1 = self.u[0] * s1 + self.w[0] * s2;
        let i2 = self.u[1] * s1 + self.w[1] * s2;
        i1.norm_sqr() + i2.norm_sqr()
    }

    /// Outer shifts meeting the output constraint at `(d1, d2)`.
    fn shifts(&self, d1: f64, d2: f64) -> Option<[f64; 2]> {
        let s1 = FHA_GAIN * (d1 / 2.0).sin();
        let s2 = FHA_GAIN * (d2 / 2.0).sin();
        let gain = s1 * s2 * self.u[1].norm();
        if !(gain > 0.0) {
            return None;
        }
        // Re(S2 I2*) = s1 s2 |u2| cos(delta + phi) + s2^2 Re(w2)
        let c = (self.target - s2 * s2 * self.w[1].re) / gain;
        if !(-1.0..=1.0).contains(&c) {
            return None;
        }
        let phi = self.u[1].arg();
        let a = c.acos();
        Some([wrap_angle(-phi + a), wrap_angle(-phi - a)])
    }

    /// Best-branch objective and its outer shift.
    fn eval(&self, d1: f64, d2: f64) -> Option<(f64, f64)> {
        let [da, db] = self.shifts(d1, d2)?;
        let fa = self.objective_at(d1, d2, da);
        let fb = self.objective_at(d1, d2, db);
        Some(if fa <= fb { (fa, da) } else { (fb, db) })
    }

    fn f(&self, x: [f64; 2]) -> f64 {
        self.eval(x[0], x[1]).map_or(f64::INFINITY, |v| v.0)
    }
}

fn clamp_box(x: [f64; 2]) -> [f64; 2] {
    [x[0].clamp(D_MIN, PI), x[1].clamp(D_MIN, PI)]
}

const FD_STEP: f64 = 1e-5;

fn gradient(r: &Reduced, x: [f64; 2]) -> Option<[f64; 2]> {
    let mut g = [0.0; 2];
    for (k, gk) in g.iter_mut().enumerate() {
        let mut xp = x;
        let mut xm = x;
        xp[k] += FD_STEP;
        xm[k] -= FD_STEP;
        let (fp, fm) = (r.f(xp), r.f(xm));
        if !(fp.is_finite() && fm.is_finite()) {
            return None;
        }
        *gk = (fp - fm) / (2.0 * FD_STEP);
    }
    Some(g)
}

fn hessian(r: &Reduced, x: [f64; 2], f0: f64) -> Option<[[f64; 2]; 2]> {
    let h = 1e-4;
    let at = |a: f64, b: f64| r.f([x[0] + a, x[1] + b]);
    let h00 = (at(h, 0.0) - 2.0 * f0 + at(-h, 0.0)) / (h * h);
    let h11 = (at(0.0, h) - 2.0 * f0 + at(0.0, -h)) / (h * h);
    let h01 = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
    let out = [[h00, h01], [h01, h11]];
    out.iter().flatten().all(|v| v.is_finite()).then_some(out)
}

fn projected_gradient_norm(x: [f64; 2], g: [f64; 2]) -> f64 {
    let p = clamp_box([x[0] - g[0], x[1] - g[1]]);
    ((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy)]
struct LocalResult {
    x: [f64; 2],
    f: f64,
    pg: f64,
    iterations: usize,
    converged: bool,
}

/// Projected Newton with an active set on the pulse-width box.
fn local_minimize(r: &Reduced, x0: [f64; 2], opts: &SolverOptions) -> Option<LocalResult> {
    let mut x = clamp_box(x0);
    let mut f = r.f(x);
    if !f.is_finite() {
        return None;
    }
    let mut pg = f64::INFINITY;
    for it in 0..opts.max_iterations {
        let Some(g) = gradient(r, x) else {
            return Some(LocalResult { x, f, pg, iterations: it, converged: false });
        };
        pg = projected_gradient_norm(x, g);
        if pg < opts.optimality_tol * f.max(1.0) {
            return Some(LocalResult { x, f, pg, iterations: it, converged: true });
        }
        let eps = 1e-9;
        let active = [0, 1].map(|k| (x[k] <= D_MIN + eps && g[k] > 0.0) || (x[k] >= PI - eps && g[k] < 0.0));
        let mut dir = [0.0; 2];
        let newton = hessian(r, x, f).and_then(|h| match active {
            [false, false] => {
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                (h[0][0] > 0.0 && det > 0.0)
                    .then(|| [(h[1][1] * g[0] - h[0][1] * g[1]) / det, (h[0][0] * g[1] - h[1][0] * g[0]) / det])
            }
            [true, false] => (h[1][1] > 0.0).then(|| [0.0, g[1] / h[1][1]]),
            [false, true] => (h[0][0] > 0.0).then(|| [g[0] / h[0][0], 0.0]),
            [true, true] => Some([0.0, 0.0]),
        });
        match newton {
            Some(d) => dir = d,
            None => {
                for k in 0..2 {
                    if !active[k] {
                        dir[k] = g[k];
                    }
                }
                let n = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
                if n > 0.5 {
                    dir = [dir[0] * 0.5 / n, dir[1] * 0.5 / n];
                }
            }
        }
        if dir == [0.0, 0.0] {
            return Some(LocalResult { x, f, pg, iterations: it, converged: pg < opts.optimality_tol * f.max(1.0) });
        }
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-14 {
            let xn = clamp_box([x[0] - t * dir[0], x[1] - t * dir[1]]);
            let fnew = r.f(xn);
            let decrease = g[0] * (x[0] - xn[0]) + g[1] * (x[1] - xn[1]);
            if fnew.is_finite() && fnew <= f - 1e-4 * decrease.max(0.0) && xn != x {
                moved = fnew < f || decrease <= 0.0;
                x = xn;
                f = fnew;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            // no descent left at the resolution of the finite differences
            let converged = pg < 1e2 * opts.optimality_tol * f.max(1.0);
            return Some(LocalResult { x, f, pg, iterations: it + 1, converged });
        }
    }
    Some(LocalResult { x, f, pg, iterations: opts.max_iterations, converged: false })
}

fn gated_point(p: &ConverterParams) -> OperatingPoint {
    let zero = Complex64::new(0.0, 0.0);
    let vc1 = p.v1;
    OperatingPoint {
        control: ControlVector { d1: PI, d2: PI, d3: 0.0 },
        s_qd1: zero,
        s_qd2: zero,
        state: EnvelopeState::new(0.0, vc1, zero, zero, p.vc2_ref),
        p_target: 0.0,
        io: 0.0,
        pin: 0.0,
        pout: 0.0,
        objective: 0.0,
        converged: true,
        gated: true,
        iterations: 0,
        pg_norm: 0.0,
        constraint_residual: 0.0,
    }
}

fn start_points(warm: Option<&OperatingPoint>, opts: &SolverOptions, p_target: f64) -> Vec<[f64; 2]> {
    let mut starts = vec![[PI, PI], [PI, 2.0 * PI / 3.0], [2.0 * PI / 3.0, PI], [PI, PI / 3.0], [PI / 3.0, PI]];
    if let Some(w) = warm.filter(|w| !w.gated && w.converged) {
        starts.insert(0, [w.control.d1, w.control.d2]);
    }
    // deterministic per (seed, power) so sweep rows are order independent
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ p_target.to_bits());
    for _ in 0..opts.random_starts {
        starts.push([rng.random_range(0.2..PI), rng.random_range(0.2..PI)]);
    }
    starts
}

/// Minimum-current operating point delivering `p_target` watts at
/// `Vc2 = vc2_ref`.
pub fn solve_operating_point(
    p_target: f64,
    p: &ConverterParams,
    warm_start: Option<&OperatingPoint>,
) -> Result<OperatingPoint> {
    solve_operating_point_with(p_target, p, warm_start, &SolverOptions::default())
}

pub fn solve_operating_point_with(
    p_target: f64,
    p: &ConverterParams,
    warm_start: Option<&OperatingPoint>,
    opts: &SolverOptions,
) -> Result<OperatingPoint> {
    if !p_target.is_finite() {
        return Err(DabError::Domain { what: "P_target", value: p_target, domain: "finite" });
    }
    if !(p.vc2_ref > 0.0) {
        return Err(DabError::InvalidParameter {
            name: "vc2_ref",
            reason: "must be > 0 to define Io = P / Vc2".into(),
        });
    }
    if p_target == 0.0 {
        return Ok(gated_point(p));
    }
    let io = p_target / p.vc2_ref;
    let mut vc1 = p.v1;
    let passes = if p.model.resistive_input_drop { 50 } else { 1 };
    let mut best: Option<(LocalResult, Reduced)> = None;
    let mut warm = warm_start.copied();
    for _ in 0..passes {
        let reduced = Reduced::new(vc1, p.vc2_ref, io, p)?;
        best = None;
        for x0 in start_points(warm.as_ref(), opts, p_target) {
            if let Some(res) = local_minimize(&reduced, x0, opts) {
                let better = match &best {
                    None => true,
                    Some((b, _)) => (res.converged && !b.converged) || (res.converged == b.converged && res.f < b.f),
                };
                if better {
                    best = Some((res, reduced));
                }
            }
        }
        let Some((res, red)) = &best else { break };
        let op = assemble(p_target, io, vc1, res, red, p)?;
        let next = p.v1 - p.r * op.state.id;
        if !p.model.resistive_input_drop || (next - vc1).abs() <= 1e-12 * p.v1 {
            break;
        }
        vc1 = next;
        warm = Some(op);
    }
    let Some((res, red)) = best else {
        let limits = power_limits(p)?;
        let limit = if p_target > 0.0 { limits.forward } else { limits.backward };
        return Err(DabError::Infeasible { p_target, limit });
    };
    let op = assemble(p_target, io, vc1, &res, &red, p)?;
    if !op.converged {
        log::warn!(
            "operating point at {p_target} W not converged after {} iterations (pg = {:e})",
            op.iterations,
            op.pg_norm
        );
    }
    Ok(op)
}

fn assemble(
    p_target: f64,
    io: f64,
    vc1: f64,
    res: &LocalResult,
    red: &Reduced,
    p: &ConverterParams,
) -> Result<OperatingPoint> {
    let [d1, d2] = res.x;
    let (_, delta) = red.eval(d1, d2).ok_or(DabError::SolverFailed {
        p_target,
        iterations: res.iterations,
        reason: "final point infeasible".into(),
    })?;
    let control = ControlVector::from_delta(d1, d2, delta)?;
    let (s1, s2) = control.phasors();
    let (i1, i2) = solve_currents(s1, s2, vc1, p.vc2_ref, p)?;
    let id = (s1 * i1.conj()).re / 2.0;
    let delivered = p.n * (s2 * i2.conj()).re / 2.0;
    let constraint_residual = (delivered - io).abs() / io.abs().max(1e-12);
    Ok(OperatingPoint {
        control,
        s_qd1: s1,
        s_qd2: s2,
        state: EnvelopeState::new(id, vc1, i1, i2, p.vc2_ref),
        p_target,
        io,
        pin: p.v1 * id,
        pout: p.vc2_ref * io,
        objective: i1.norm_sqr() + i2.norm_sqr(),
        converged: res.converged && constraint_residual < 1e-6,
        gated: false,
        iterations: res.iterations,
        pg_norm: res.pg,
        constraint_residual,
    })
}

/// One sweep row; failed rows keep the error text and no point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p_target: f64,
    pub point: Option<OperatingPoint>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn converged(&self) -> bool {
        self.point.is_some_and(|op| op.converged)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.converged()).count()
    }

    pub fn points(&self) -> impl Iterator<Item = &OperatingPoint> {
        self.rows.iter().filter_map(|r| r.point.as_ref())
    }
}

/// Contiguous closed power interval [W].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub start: f64,
    pub end: f64,
}

/// Pulse widths within this distance of `pi` count as saturated.
pub const SATURATION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub failures: usize,
    /// Powers where `delta` changes sign (zero rows are skipped), located
    /// by linear interpolation.
    pub delta_sign_changes: Vec<f64>,
    /// Runs of consecutive converged rows with `d1` (`d2`) at `pi`.
    pub d1_saturated: Vec<Region>,
    pub d2_saturated: Vec<Region>,
    pub failed_points: Vec<f64>,
}

fn saturated_runs(table: &SweepTable, pick: impl Fn(&OperatingPoint) -> f64) -> Vec<Region> {
    let mut out: Vec<Region> = Vec::new();
    let mut open = false;
    for row in &table.rows {
        let hit = row.point.is_some_and(|op| op.converged && (PI - pick(&op)).abs() < SATURATION_TOL);
        match (hit, open) {
            (true, true) => out.last_mut().expect("open run").end = row.p_target,
            (true, false) => out.push(Region { start: row.p_target, end: row.p_target }),
            _ => {}
        }
        open = hit;
    }
    out
}

pub fn summarize_sweep(table: &SweepTable) -> SweepSummary {
    let signed: Vec<(f64, f64)> =
        table.points().filter(|op| op.converged && op.delta() != 0.0).map(|op| (op.p_target, op.delta())).collect();
    let delta_sign_changes = signed
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| {
            let ((p0, d0), (p1, d1)) = (w[0], w[1]);
            p0 + d0 / (d0 - d1) * (p1 - p0)
        })
        .collect();
    SweepSummary {
        rows: table.rows.len(),
        failures: table.failures(),
        delta_sign_changes,
        d1_saturated: saturated_runs(table, |op| op.control.d1),
        d2_saturated: saturated_runs(table, |op| op.control.d2),
        failed_points: table.rows.iter().filter(|r| !r.converged()).map(|r| r.p_target).collect(),
    }
}

/// Uniform grid of `steps` powers from `p_min` to `p_max` inclusive.
pub fn power_grid(p_min: f64, p_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(DabError::Domain { what: "steps", value: steps as f64, domain: ">= 2" });
    }
    if !(p_min.is_finite() && p_max.is_finite() && p_min < p_max) {
        return Err(DabError::Domain { what: "p_max", value: p_max, domain: "finite and > p_min" });
    }
    let step = (p_max - p_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            let v = p_min + step * k as f64;
            // snap round-off so a grid through zero hits it exactly
            if v.abs() < 1e-9 * step {
                0.0
            } else {
                v
            }
        })
        .collect())
}

pub fn sweep_power(p_min: f64, p_max: f64, steps: usize, p: &ConverterParams) -> Result<SweepTable> {
    sweep_power_with(p_min, p_max, steps, p, &SolverOptions::default())
}

pub fn sweep_power_with(
    p_min: f64,
    p_max: f64,
    steps: usize,
    p: &ConverterParams,
    opts: &SolverOptions,
) -> Result<SweepTable> {
    let grid = power_grid(p_min, p_max, steps)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut warm: Option<OperatingPoint> = None;
    for pt in grid {
        match solve_operating_point_with(pt, p, warm.as_ref(), opts) {
            Ok(op) => {
                warm = Some(op);
                rows.push(SweepRow { p_target: pt, point: Some(op), error: None });
            }
            Err(e) => {
                log::warn!("sweep point {pt} W failed: {e}");
                rows.push(SweepRow { p_target: pt, point: None, error: Some(e.to_string()) });
            }
        }
    }
    Ok(SweepTable { rows })
}

/// Largest FHA output power in each direction at `Vc1 = V1`, `Vc2 = Vc2_ref`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLimits {
    pub forward: f64,
    /// Negative number.
    pub backward: f64,
}

pub fn max_transferable_power(p: &ConverterParams) -> Result<f64> {
    Ok(power_limits(p)?.forward)
}

pub fn power_limits(p: &ConverterParams) -> Result<PowerLimits> {
    let red = Reduced::new(p.v1, p.vc2_ref, 0.0, p)?;
    let k = p.vc2_ref * p.n / 2.0;
    // max over delta of Pout at fixed pulse widths, for direction sign
    let extreme = |x: [f64; 2], sign: f64| {
        let s1 = FHA_GAIN * (x[0] / 2.0).sin();
        let s2 = FHA_GAIN * (x[1] / 2.0).sin();
        k * (sign * s1 * s2 * red.u[1].norm() + s2 * s2 * red.w[1].re)
    };
    let search = |sign: f64| {
        let n = 48;
        let mut best = ([PI, PI], f64::NEG_INFINITY);
        for a in 1..=n {
            for b in 1..=n {
                let x = [PI * a as f64 / n as f64, PI * b as f64 / n as f64];
                let v = sign * extreme(x, sign);
                if v > best.1 {
                    best = (x, v);
                }
            }
        }
        // compass polish
        let mut step = PI / n as f64;
        while step > 1e-10 {
            let mut improved = false;
            for (da, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let x = clamp_box([best.0[0] + da, best.0[1] + db]);
                let v = sign * extreme(x, sign);
                if v > best.1 {
                    best = (x, v);
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        sign * best.1
    };
    Ok(PowerLimits { forward: search(1.0), backward: search(-1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{dc_power_balance, envelope_rhs, steady_state_residual};
    use crate::model::LoadModel;

    fn params() -> ConverterParams {
        ConverterParams::table_one()
    }

    #[test]
    fn zero_phasors_give_zero_currents() {
        let z = Complex64::new(0.0, 0.0);
        let (a, b) = solve_currents(z, z, 100.0, 200.0, &params()).unwrap();
        assert_eq!((a, b), (z, z));
    }

    #[test]
    fn current_solve_round_trip() {
        let p = params();
        let s1 = Complex64::new(1.2, 0.0);
        let s2 = Complex64::from_polar(0.9, -0.3);
        let (i1, i2) = solve_currents(s1, s2, 100.0, 200.0, &p).unwrap();
        let op = OperatingPoint {
            s_qd1: s1,
            s_qd2: s2,
            state: EnvelopeState::new(0.0, 100.0, i1, i2, 200.0),
            ..gated_point(&p)
        };
        let r = steady_state_residual(&op, &p);
        let drive = (p.l2 / p.h()).abs() * p.v1;
        for v in [r.primary_q, r.primary_d, r.secondary_q, r.secondary_d] {
            assert!(v.abs() < 1e-10 * drive, "{v}");
        }
    }

    #[test]
    fn zero_power_is_gated() {
        let op = solve_operating_point(0.0, &params(), None).unwrap();
        assert!(op.gated && op.converged);
        assert_eq!(op.delta(), 0.0);
        assert_eq!(op.objective, 0.0);
        assert_eq!((op.control.d1, op.control.d2), (PI, PI));
    }

    #[test]
    fn forward_saturates_primary_backward_saturates_secondary() {
        let p = params();
        let fwd = solve_operating_point(500.0, &p, None).unwrap();
        assert!(fwd.converged);
        assert!(fwd.delta() > 0.0);
        assert!((fwd.control.d1 - PI).abs() < 1e-3);
        assert!(fwd.control.d2 < PI - 1e-2);
        let bwd = solve_operating_point(-500.0, &p, None).unwrap();
        assert!(bwd.converged);
        assert!(bwd.delta() < 0.0);
        assert!((bwd.control.d2 - PI).abs() < 1e-3);
        assert!(bwd.control.d1 < PI - 1e-2);
    }

    #[test]
    fn solved_points_satisfy_steady_state() {
        let p = params();
        for pt in [-1000.0, -300.0, 300.0, 1000.0] {
            let op = solve_operating_point(pt, &p, None).unwrap();
            assert!(op.converged, "{pt}");
            let r = steady_state_residual(&op, &p);
            assert_eq!(r.input_voltage, 0.0);
            assert!(r.scaled_max_norm(&op, &p) < 1e-6, "{pt}: {r:?}");
            assert!((op.pout - pt).abs() < 1e-9 * pt.abs());
        }
    }

    #[test]
    fn envelope_fixed_point_with_input_drop() {
        let mut p = params();
        p.model.resistive_input_drop = true;
        let op = solve_operating_point(300.0, &p, None).unwrap();
        assert!(op.converged);
        let d = envelope_rhs(&op.state, op.s_qd1, op.s_qd2, &LoadModel::ConstantCurrent(op.io), &p).unwrap();
        let x = op.state;
        let i_scale = x.i_qd1().norm().max(x.i_qd2().norm());
        // derivatives relative to state / time constant 1/omega_s
        let w = p.omega_s();
        assert!(d.id.abs() * p.ld / p.v1 < 1e-6);
        assert!(d.vc1.abs() * p.c1 < 1e-6 * x.id.abs().max(1.0));
        assert!(d.vc2.abs() * p.c2 < 1e-6 * op.io.abs().max(1.0));
        for v in [d.iq1, d.id1, d.iq2, d.id2] {
            assert!(v.abs() < 1e-6 * w * i_scale, "{v}");
        }
    }

    #[test]
    fn power_balance_matches_losses() {
        let p = params();
        let op = solve_operating_point(1000.0, &p, None).unwrap();
        let b = dc_power_balance(&op, &p);
        assert!(b.pin > b.pout);
        assert!(((b.pin - b.pout) - b.losses()).abs() < 0.01 * b.losses());
        let op = solve_operating_point(-1000.0, &p, None).unwrap();
        let b = dc_power_balance(&op, &p);
        assert!(b.pin < 0.0);
        assert!(b.pin.abs() < b.pout.abs());
        let z = dc_power_balance(&gated_point(&p), &p);
        assert_eq!((z.pin, z.pout), (0.0, 0.0));
    }

    #[test]
    fn optimality_certificate() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for pt in [-700.0, 400.0, 900.0] {
            let op = solve_operating_point(pt, &p, None).unwrap();
            let red = Reduced::new(p.v1, p.vc2_ref, op.io, &p).unwrap();
            for _ in 0..50 {
                let a: f64 = rng.random_range(0.0..2.0 * PI);
                let b: f64 = rng.random_range(-1.0..1.0);
                let dir = [a.cos() * (1.0 - b * b).sqrt(), a.sin() * (1.0 - b * b).sqrt(), b];
                let d1 = (op.control.d1 + 1e-2 * dir[0]).clamp(D_MIN, PI);
                let d2 = (op.control.d2 + 1e-2 * dir[1]).clamp(D_MIN, PI);
                let want = op.delta() + 1e-2 * dir[2];
                // re-project: the constraint branch nearest the perturbed shift
                let Some(sh) = red.shifts(d1, d2) else { continue };
                let delta =
                    if (wrap_angle(sh[0] - want)).abs() < (wrap_angle(sh[1] - want)).abs() { sh[0] } else { sh[1] };
                let f = red.objective_at(d1, d2, delta);
                assert!(f >= op.objective * (1.0 - 1e-6), "{pt}: {f} < {}", op.objective);
            }
        }
    }

    #[test]
    fn sweep_sign_change_and_symmetry() {
        let p = params();
        let t = sweep_power(-1000.0, 1000.0, 21, &p).unwrap();
        assert_eq!(t.failures(), 0);
        for op in t.points() {
            assert_eq!(op.delta().signum() * op.p_target.signum().abs(), op.p_target.signum());
        }
        let pts: Vec<&OperatingPoint> = t.points().collect();
        for k in 0..10 {
            let a = pts[k].i_qd1().norm();
            let b = pts[20 - k].i_qd1().norm();
            assert!((a - b).abs() < 0.15 * a.max(b), "{k}: {a} vs {b}");
            if pts[20 - k].p_target > 0.0 {
                assert!(pts[20 - k].pin >= pts[20 - k].pout);
            }
        }
    }

    #[test]
    fn infeasible_power_is_reported() {
        let p = params();
        let limit = max_transferable_power(&p).unwrap();
        match solve_operating_point(1.5 * limit, &p, None) {
            Err(DabError::Infeasible { limit: l, .. }) => assert!((l - limit).abs() < 1e-9 * limit),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    /// Lossless two-source power on a grid of pulse widths and shifts.
    fn lossless_grid_oracle(p: &ConverterParams) -> f64 {
        let leq = (p.l1 * p.l2 - p.lm * p.lm) / p.lm;
        let v2 = p.n * p.vc2_ref;
        let mut best = 0.0f64;
        let n = 60;
        for a in 1..=n {
            for b in 1..=n {
                for c in 0..=n {
                    let d1 = PI * a as f64 / n as f64;
                    let d2 = PI * b as f64 / n as f64;
                    let delta = PI * c as f64 / n as f64;
                    let pw = p.v1 * v2 * FHA_GAIN.powi(2) * (d1 / 2.0).sin() * (d2 / 2.0).sin() * delta.sin()
                        / (2.0 * p.omega_s() * leq);
                    best = best.max(pw);
                }
            }
        }
        best
    }

    #[test]
    fn lossless_limit_matches_series_inductance_formula() {
        let mut p = params();
        p.r1 = 0.0;
        p.r2 = 0.0;
        let ours = max_transferable_power(&p).unwrap();
        let oracle = lossless_grid_oracle(&p);
        assert!((ours - oracle).abs() < 0.02 * oracle, "{ours} vs {oracle}");
    }

    #[test]
    fn power_limit_scales_inversely_with_frequency() {
        let p = params();
        assert!(max_transferable_power(&p).unwrap() > 1000.0);
        let mut lossless = p;
        lossless.r1 = 0.0;
        lossless.r2 = 0.0;
        let mut fast = lossless;
        fast.fs *= 2.0;
        let base = max_transferable_power(&lossless).unwrap();
        let doubled = max_transferable_power(&fast).unwrap();
        assert!((doubled / base - 0.5).abs() < 0.05 * 0.5, "{base} -> {doubled}");
        let oracle_ratio = lossless_grid_oracle(&fast) / lossless_grid_oracle(&lossless);
        assert!((doubled / base - oracle_ratio).abs() < 0.02 * oracle_ratio);
        // with winding loss the transfer term (mean of both directions) still halves
        let mut q = p;
        q.fs *= 2.0;
        let transfer = |l: PowerLimits| (l.forward - l.backward) / 2.0;
        let ratio = transfer(power_limits(&q).unwrap()) / transfer(power_limits(&p).unwrap());
        assert!((ratio - 0.5).abs() < 0.05 * 0.5, "{ratio}");
    }

    #[test]
    fn grid_hits_zero_exactly() {
        let g = power_grid(-1000.0, 1000.0, 41).unwrap();
        assert_eq!(g[20], 0.0);
        assert!(power_grid(0.0, 1.0, 1).is_err());
        assert!(power_grid(1.0, 0.0, 5).is_err());
    }

    #[test]
    fn summary_reports_single_sign_change_and_saturation() {
        let p = ConverterParams::table_one();
        let t = sweep_power(-1000.0, 1000.0, 21, &p).unwrap();
        let s = summarize_sweep(&t);
        assert_eq!(s.failures, 0);
        assert_eq!(s.delta_sign_changes.len(), 1);
        assert!(s.delta_sign_changes[0].abs() <= 100.0);
        assert_eq!(s.d1_saturated.len(), 1);
        assert!(s.d1_saturated[0].start <= 100.0 && s.d1_saturated[0].end == 1000.0);
        assert_eq!(s.d2_saturated.len(), 1);
        assert!(s.d2_saturated[0].start == -1000.0 && s.d2_saturated[0].end >= -100.0);
    }
}
