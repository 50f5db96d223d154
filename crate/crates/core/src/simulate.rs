//! Full-order switched simulation with fixed-step RK4 on a grid aligned to
//! every switching edge, plus per-cycle averages for FHA cross-checks.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DabError, Result};
use crate::model::{
    from_time_frame, full_order_rhs, switching_waveform, to_time_frame, ControlVector, FullState, LoadModel,
};
use crate::numerics::rk4_step;
use crate::optsolve::OperatingPoint;
use crate::params::ConverterParams;
use crate::zvs::instantaneous_current;

/// Any state magnitude beyond this is treated as divergence.
pub const DIVERGENCE_BOUND: f64 = 1e7;

/// Number of accumulated integrals carried alongside the state.
const ACC: usize = 12;
const N: usize = 5 + ACC;

/// Integrals over one switching period, divided by the period.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CycleAverages {
    pub pin: f64,
    pub pout: f64,
    pub id_sq: f64,
    pub i1_sq: f64,
    pub i2_sq: f64,
    pub vc2: f64,
    /// dc-side power of each bridge, `<s1 I1 Vc1>` and `<n s2 I2 Vc2>`.
    pub bridge1: f64,
    pub bridge2: f64,
    /// Fundamental phasors in the primary-real convention.
    pub i_qd1: Complex64,
    pub i_qd2: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveforms {
    pub t: Vec<f64>,
    pub states: Vec<FullState>,
    pub s1: Vec<i8>,
    pub s2: Vec<i8>,
    /// Samples per second of the uniform grid.
    pub sample_rate: f64,
    pub duration: f64,
    pub cycles_run: usize,
    pub final_state: FullState,
    /// Averages over the last completed cycle.
    pub last_cycle: CycleAverages,
    /// Relative state change between the last two cycle boundaries.
    pub cycle_change: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub max_cycles: usize,
    pub steps_per_cycle: usize,
    /// Stop once the cycle-boundary change drops below this (0 disables).
    pub settle_tol: f64,
    /// Keep samples of only the last this-many cycles (`None` keeps all).
    pub record_last: Option<usize>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { max_cycles: 200, steps_per_cycle: 1000, settle_tol: 0.0, record_last: None }
    }
}

/// Switching edges of both bridges within one period, as angles in `[0, 2 pi)`.
pub fn switching_edges(ctrl: &ControlVector) -> Vec<f64> {
    let wrap = |a: f64| a.rem_euclid(2.0 * PI);
    let delta = ctrl.delta();
    let mut out = Vec::with_capacity(8);
    for (d, phase) in [(ctrl.d1, 0.0), (ctrl.d2, delta)] {
        if d <= 0.0 || d >= PI {
            // full square: only the zero crossings switch
            if d >= PI {
                out.extend([wrap(phase), wrap(phase + PI)]);
            }
            continue;
        }
        for c in [PI / 2.0, 3.0 * PI / 2.0] {
            out.extend([wrap(phase + c - d / 2.0), wrap(phase + c + d / 2.0)]);
        }
    }
    out
}

/// Segment boundaries of one period: the uniform sample grid merged with the
/// switching edges. Returns `(theta, is_sample)` pairs ending at `2 pi`.
fn cycle_breakpoints(ctrl: &ControlVector, steps: usize) -> Vec<(f64, bool)> {
    let h = 2.0 * PI / steps as f64;
    let mut pts: Vec<(f64, bool)> = (0..=steps).map(|k| (h * k as f64, true)).collect();
    for e in switching_edges(ctrl) {
        let k = (e / h).round();
        if (e - k * h).abs() > 1e-9 * h {
            pts.push((e, false));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts
}

fn check_finite(x: &FullState, t: f64) -> Result<()> {
    let arr = x.to_array();
    if arr.iter().all(|v| v.is_finite() && v.abs() < DIVERGENCE_BOUND) {
        Ok(())
    } else {
        Err(DabError::IntegrationBlowup { t })
    }
}

/// Integrates `cycles` switching periods from `x0`.
pub fn run_switched(
    ctrl: &ControlVector,
    load: &LoadModel,
    p: &ConverterParams,
    cycles: usize,
    steps_per_cycle: usize,
    x0: &FullState,
) -> std::result::Result<Waveforms, SimulationFailure> {
    let opts = SimOptions { max_cycles: cycles, steps_per_cycle, ..Default::default() };
    simulate(ctrl, load, p, x0, &opts)
}

/// Divergence with the trace recorded up to the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationFailure {
    pub error: DabError,
    pub partial: Option<Box<Waveforms>>,
}

impl std::fmt::Display for SimulationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for SimulationFailure {}

impl From<DabError> for SimulationFailure {
    fn from(error: DabError) -> Self {
        Self { error, partial: None }
    }
}

impl From<SimulationFailure> for DabError {
    fn from(f: SimulationFailure) -> Self {
        f.error
    }
}

pub fn simulate(
    ctrl: &ControlVector,
    load: &LoadModel,
    p: &ConverterParams,
    x0: &FullState,
    opts: &SimOptions,
) -> std::result::Result<Waveforms, SimulationFailure> {
    if opts.steps_per_cycle < 200 || !opts.steps_per_cycle.is_multiple_of(2) {
        return Err(DabError::Domain {
            what: "steps_per_cycle",
            value: opts.steps_per_cycle as f64,
            domain: "even and >= 200",
        }
        .into());
    }
    if opts.max_cycles == 0 {
        return Err(DabError::Domain { what: "cycles", value: 0.0, domain: ">= 1" }.into());
    }
    check_finite(x0, 0.0)?;
    let w = p.omega_s();
    let period = p.period();
    let delta = ctrl.delta();
    let breaks = cycle_breakpoints(ctrl, opts.steps_per_cycle);
    let s_mid: Vec<(f64, f64)> = breaks
        .windows(2)
        .map(|seg| {
            let mid = 0.5 * (seg[0].0 + seg[1].0);
            (
                switching_waveform(ctrl.d1, 0.0, mid).expect("validated width") as f64,
                switching_waveform(ctrl.d2, delta, mid).expect("validated width") as f64,
            )
        })
        .collect();
    let s_at = |theta: f64| {
        (
            switching_waveform(ctrl.d1, 0.0, theta).expect("validated width"),
            switching_waveform(ctrl.d2, delta, theta).expect("validated width"),
        )
    };

    let mut wf = Waveforms {
        t: Vec::new(),
        states: Vec::new(),
        s1: Vec::new(),
        s2: Vec::new(),
        sample_rate: opts.steps_per_cycle as f64 * p.fs,
        duration: 0.0,
        cycles_run: 0,
        final_state: *x0,
        last_cycle: CycleAverages::default(),
        cycle_change: f64::INFINITY,
    };
    // start index of each recorded cycle, for the rolling window
    let mut cycle_starts: VecDeque<usize> = VecDeque::new();
    let mut x = *x0;
    let v1 = p.v1;
    let (a0, b0) = s_at(0.0);
    wf.t.push(0.0);
    wf.states.push(x);
    wf.s1.push(a0);
    wf.s2.push(b0);
    for cycle in 0..opts.max_cycles {
        let t0 = cycle as f64 * period;
        cycle_starts.push_back(wf.t.len() - 1);
        if let Some(k) = opts.record_last {
            while cycle_starts.len() > k.max(1) {
                cycle_starts.pop_front();
                let cut = cycle_starts[0];
                wf.t.drain(..cut);
                wf.states.drain(..cut);
                wf.s1.drain(..cut);
                wf.s2.drain(..cut);
                for c in cycle_starts.iter_mut() {
                    *c -= cut;
                }
            }
        }
        let mut y = [0.0; N];
        y[..5].copy_from_slice(&x.to_array());
        for (seg, &(s1, s2)) in breaks.windows(2).zip(&s_mid) {
            let (th0, th1) = (seg[0].0, seg[1].0);
            let dt = (th1 - th0) / w;
            if dt <= 0.0 {
                continue;
            }
            let rhs = |t: f64, y: &[f64; N]| -> [f64; N] {
                let st = FullState::from_array([y[0], y[1], y[2], y[3], y[4]]);
                let mut d = [0.0; N];
                let Ok(dx) = full_order_rhs(&st, s1, s2, load, p) else {
                    return [f64::NAN; N];
                };
                d[..5].copy_from_slice(&dx.to_array());
                let io = load.current(st.vc2).unwrap_or(f64::NAN);
                let theta = w * (t - t0);
                let (sn, cs) = theta.sin_cos();
                d[5] = v1 * st.id;
                d[6] = st.vc2 * io;
                d[7] = st.id * st.id;
                d[8] = st.i1 * st.i1;
                d[9] = st.i2 * st.i2;
                d[10] = st.vc2;
                d[11] = st.i1 * cs;
                d[12] = st.i1 * sn;
                d[13] = st.i2 * cs;
                d[14] = st.i2 * sn;
                d[15] = s1 * st.i1 * st.vc1;
                d[16] = p.n * s2 * st.i2 * st.vc2;
                d
            };
            let t_seg = t0 + th0 / w;
            y = match rk4_step(rhs, &y, t_seg, dt) {
                Ok(v) => v,
                Err(e) => return Err(fail(e, wf, x, cycle)),
            };
            let xs = FullState::from_array([y[0], y[1], y[2], y[3], y[4]]);
            if let Err(e) = check_finite(&xs, t_seg + dt) {
                return Err(fail(e, wf, x, cycle));
            }
            if seg[1].1 && th1 > 0.0 {
                let (a, b) = if th1 < 2.0 * PI { s_at(th1) } else { s_at(0.0) };
                wf.t.push(t0 + th1 / w);
                wf.states.push(xs);
                wf.s1.push(a);
                wf.s2.push(b);
            }
        }
        let next = FullState::from_array([y[0], y[1], y[2], y[3], y[4]]);
        let (xa, na) = (x.to_array(), next.to_array());
        let scale = na.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        wf.cycle_change = xa.iter().zip(&na).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
        // cos/sin projections give the time-frame phasor Z = 2 <x e^{-j theta}>
        let f = 1.0 / period;
        let z1 = Complex64::new(2.0 * f * y[11], -2.0 * f * y[12]);
        let z2 = Complex64::new(2.0 * f * y[13], -2.0 * f * y[14]);
        wf.last_cycle = CycleAverages {
            pin: f * y[5],
            pout: f * y[6],
            id_sq: f * y[7],
            i1_sq: f * y[8],
            i2_sq: f * y[9],
            vc2: f * y[10],
            bridge1: f * y[15],
            bridge2: f * y[16],
            i_qd1: from_time_frame(z1),
            i_qd2: from_time_frame(z2),
        };
        x = next;
        wf.cycles_run = cycle + 1;
        wf.final_state = x;
        wf.duration = wf.cycles_run as f64 * period;
        if opts.settle_tol > 0.0 && wf.cycle_change < opts.settle_tol {
            break;
        }
    }
    Ok(wf)
}

fn fail(error: DabError, mut wf: Waveforms, x: FullState, cycle: usize) -> SimulationFailure {
    wf.final_state = x;
    wf.cycles_run = cycle;
    SimulationFailure { error, partial: Some(Box::new(wf)) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyMetrics {
    pub vc2_avg: f64,
    pub pout_avg: f64,
    pub pin_avg: f64,
    /// `r <Id^2> + R1 <I1^2> + R2 <I2^2>` [W].
    pub losses: f64,
    pub i_qd1_hat: Complex64,
    pub i_qd2_hat: Complex64,
    pub settled: bool,
    pub cycle_change: f64,
}

/// Settling threshold on the cycle-boundary change.
pub const SETTLED_TOL: f64 = 1e-3;

pub fn steady_metrics(w: &Waveforms, p: &ConverterParams) -> SteadyMetrics {
    let c = &w.last_cycle;
    SteadyMetrics {
        vc2_avg: c.vc2,
        pout_avg: c.pout,
        pin_avg: c.pin,
        losses: p.r * c.id_sq + p.r1 * c.i1_sq + p.r2 * c.i2_sq,
        i_qd1_hat: c.i_qd1,
        i_qd2_hat: c.i_qd2,
        settled: w.cycle_change < SETTLED_TOL,
        cycle_change: w.cycle_change,
    }
}

/// Single-bin Fourier projection of one uniformly sampled period
/// (`samples.len()` points, no repeated endpoint) starting at `theta = 0`,
/// returned in the primary-real phasor convention.
pub fn fundamental_phasor(samples: &[f64]) -> Complex64 {
    let n = samples.len() as f64;
    let z: Complex64 =
        samples.iter().enumerate().map(|(k, &v)| Complex64::from_polar(v, -2.0 * PI * k as f64 / n)).sum();
    from_time_frame(z * (2.0 / n))
}

/// Initial state matching an envelope point at `theta = 0`.
pub fn state_from_envelope(op: &OperatingPoint) -> FullState {
    let x = &op.state;
    FullState {
        id: x.id,
        vc1: x.vc1,
        i1: instantaneous_current(to_time_frame(x.i_qd1()), 0.0),
        i2: instantaneous_current(to_time_frame(x.i_qd2()), 0.0),
        vc2: x.vc2,
    }
}

/// Side-by-side FHA and switched results at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub p_target: f64,
    pub fha_i_qd1: Complex64,
    pub fha_i_qd2: Complex64,
    pub sim: SteadyMetrics,
    /// `|Pout_sim - P| / |P|` (0 at zero power when the simulation is also 0).
    pub power_error: f64,
    pub i1_mag_error: f64,
    pub i2_mag_error: f64,
    /// Both pulse widths at full square.
    pub square_drive: bool,
    pub cycles: usize,
}

/// Runs an operating point's controls open loop at constant load current
/// until the cycle change falls below `settle_tol` or `max_cycles` elapse.
pub fn validate_point(op: &OperatingPoint, p: &ConverterParams, opts: &SimOptions) -> Result<Comparison> {
    let rel = |a: f64, b: f64| {
        if b.abs() > 0.0 {
            (a - b).abs() / b.abs()
        } else {
            a.abs()
        }
    };
    let load = LoadModel::ConstantCurrent(op.io);
    let (d1, d2) = if op.gated { (0.0, 0.0) } else { (op.control.d1, op.control.d2) };
    let ctrl = ControlVector::new(d1, d2, op.control.d3)?;
    let wf = simulate(&ctrl, &load, p, &state_from_envelope(op), opts)?;
    let sim = steady_metrics(&wf, p);
    Ok(Comparison {
        p_target: op.p_target,
        fha_i_qd1: op.i_qd1(),
        fha_i_qd2: op.i_qd2(),
        power_error: rel(sim.pout_avg, op.p_target),
        i1_mag_error: rel(sim.i_qd1_hat.norm(), op.i_qd1().norm()),
        i2_mag_error: rel(sim.i_qd2_hat.norm(), op.i_qd2().norm()),
        square_drive: (op.control.d1 - PI).abs() < 1e-3 && (op.control.d2 - PI).abs() < 1e-3,
        cycles: wf.cycles_run,
        sim,
    })
}

/// Relative output-power error allowed by cross-validation.
pub const POWER_BUDGET: f64 = 0.15;
/// Relative fundamental-phasor magnitude error allowed by cross-validation.
pub const PHASOR_BUDGET: f64 = 0.10;

impl Comparison {
    pub fn power_ok(&self) -> bool {
        self.power_error <= POWER_BUDGET
    }

    pub fn phasors_ok(&self) -> bool {
        self.i1_mag_error <= PHASOR_BUDGET && self.i2_mag_error <= PHASOR_BUDGET
    }

    /// Power and phasor budgets are both applied at every point.
    pub fn within_budget(&self) -> bool {
        self.power_ok() && self.phasors_ok()
    }
}

/// Defaults for cross-validation runs: settle to 1e-7 per cycle within
/// 5000 cycles, recording only the final cycle.
pub fn validation_options() -> SimOptions {
    SimOptions { max_cycles: 5000, steps_per_cycle: 1000, settle_tol: 1e-7, record_last: Some(1) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optsolve::{solve_currents, solve_operating_point};

    fn idle() -> ControlVector {
        ControlVector::new(0.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn idle_bridges_follow_rlc_response() {
        let p = ConverterParams::table_one();
        let x0 = FullState { vc1: 90.0, vc2: 200.0, ..Default::default() };
        let cycles = 400;
        let wf = run_switched(&idle(), &LoadModel::ConstantCurrent(0.0), &p, cycles, 200, &x0).unwrap();
        // Ld Id' = V1 - Vc1 - r Id, C1 Vc1' = Id: underdamped about Vc1 = V1
        let alpha = p.r / (2.0 * p.ld);
        let w0 = 1.0 / (p.ld * p.c1).sqrt();
        let wd = (w0 * w0 - alpha * alpha).sqrt();
        let t = wf.duration;
        let e0 = x0.vc1 - p.v1;
        let e = (-alpha * t).exp() * (e0 * (wd * t).cos() + alpha * e0 / wd * (wd * t).sin());
        let got = wf.final_state.vc1 - p.v1;
        assert!((got - e).abs() < 1e-6 * e0.abs(), "{got} vs {e}");
        assert_eq!(wf.final_state.i1, 0.0);
        assert_eq!(wf.final_state.vc2, 200.0);
        assert_eq!(wf.t.len(), cycles * 200 + 1);
    }

    #[test]
    fn edges_fall_on_segment_boundaries() {
        let ctrl = ControlVector::from_delta(2.1, 2.7, 0.37).unwrap();
        let br = cycle_breakpoints(&ctrl, 200);
        for e in switching_edges(&ctrl) {
            assert!(br.iter().any(|(t, _)| (t - e).abs() < 1e-9));
        }
        assert_eq!(br.iter().filter(|b| b.1).count(), 201);
    }

    /// Stiff dc links so the bridge power reflects the controls alone.
    fn frozen_buses() -> ConverterParams {
        let mut p = ConverterParams::table_one();
        p.c1 = 1e3;
        p.c2 = 1e3;
        p
    }

    fn bridge_power(ctrl: &ControlVector, p: &ConverterParams) -> f64 {
        let (s1, s2) = ctrl.phasors();
        let (i1, i2) = solve_currents(s1, s2, p.v1, p.vc2_ref, p).unwrap();
        let x0 = FullState {
            id: 0.0,
            vc1: p.v1,
            i1: instantaneous_current(to_time_frame(i1), 0.0),
            i2: instantaneous_current(to_time_frame(i2), 0.0),
            vc2: p.vc2_ref,
        };
        let opts = SimOptions { max_cycles: 5000, steps_per_cycle: 200, settle_tol: 1e-9, record_last: Some(1) };
        simulate(ctrl, &LoadModel::ConstantCurrent(0.0), p, &x0, &opts).unwrap().last_cycle.bridge2
    }

    #[test]
    fn power_sign_follows_shift() {
        let p = frozen_buses();
        for delta in [0.2, -0.2] {
            let ctrl = ControlVector::from_delta(PI, PI, delta).unwrap();
            let (s1, s2) = ctrl.phasors();
            let (_, i2) = solve_currents(s1, s2, p.v1, p.vc2_ref, &p).unwrap();
            let fha = p.n * p.vc2_ref * (s2 * i2.conj()).re / 2.0;
            let sim = bridge_power(&ctrl, &p);
            assert_eq!(sim.signum(), delta.signum());
            assert_eq!(fha.signum(), delta.signum());
        }
    }

    #[test]
    fn shift_reversal_flips_power() {
        let p = frozen_buses();
        let fwd = bridge_power(&ControlVector::from_delta(2.5, 2.5, 0.05).unwrap(), &p);
        let bwd = bridge_power(&ControlVector::from_delta(2.5, 2.5, -0.05).unwrap(), &p);
        assert!(fwd > 0.0 && bwd < 0.0);
        assert!((fwd + bwd).abs() < 0.02 * fwd.abs(), "{fwd} vs {bwd}");
    }

    #[test]
    fn step_refinement_converges() {
        let p = ConverterParams::table_one();
        let op = solve_operating_point(500.0, &p, None).unwrap();
        let load = LoadModel::ConstantCurrent(op.io);
        let x0 = state_from_envelope(&op);
        let a = run_switched(&op.control, &load, &p, 10, 1000, &x0).unwrap().final_state.to_array();
        let b = run_switched(&op.control, &load, &p, 10, 2000, &x0).unwrap().final_state.to_array();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..5 {
            assert!((a[i] - b[i]).abs() < 1e-5 * scale, "{i}: {} vs {}", a[i], b[i]);
        }
    }

    #[test]
    fn rejects_bad_grid_and_reports_blowup() {
        let p = ConverterParams::table_one();
        let x0 = FullState::default();
        assert!(run_switched(&idle(), &LoadModel::ConstantCurrent(0.0), &p, 1, 199, &x0).is_err());
        assert!(run_switched(&idle(), &LoadModel::ConstantCurrent(0.0), &p, 1, 201, &x0).is_err());
        let mut bad = p;
        bad.r = -5e3;
        let x0 = FullState { vc1: 90.0, ..Default::default() };
        let err = run_switched(&idle(), &LoadModel::ConstantCurrent(0.0), &bad, 50, 200, &x0).unwrap_err();
        assert!(matches!(err.error, DabError::IntegrationBlowup { .. }));
        let partial = err.partial.expect("partial trace");
        assert!(!partial.t.is_empty());
    }

    #[test]
    fn fundamental_round_trip() {
        let n = 1000;
        let cos: Vec<f64> = (0..n).map(|k| (2.0 * PI * k as f64 / n as f64).cos()).collect();
        let z = fundamental_phasor(&cos);
        assert!((z.norm() - 1.0).abs() < 1e-12);
        // cos is sin advanced by pi/2: primary-real phasor j
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let want = Complex64::new(3.2, -1.7);
        let wave: Vec<f64> =
            (0..n).map(|k| instantaneous_current(to_time_frame(want), 2.0 * PI * k as f64 / n as f64)).collect();
        assert!((fundamental_phasor(&wave) - want).norm() < 1e-6);
    }

    #[test]
    fn settled_cycle_energy_balance() {
        let p = ConverterParams::table_one();
        let op = solve_operating_point(500.0, &p, None).unwrap();
        let c = validate_point(&op, &p, &validation_options()).unwrap();
        assert!(c.sim.settled);
        let lhs = c.sim.pin_avg - c.sim.pout_avg;
        assert!((lhs - c.sim.losses).abs() < 0.01 * c.sim.losses, "{lhs} vs {}", c.sim.losses);
        assert!(c.power_error < 0.15, "{c:?}");
    }

    #[test]
    fn rolling_window_keeps_last_cycles() {
        let p = ConverterParams::table_one();
        let x0 = FullState { vc1: 100.0, vc2: 200.0, ..Default::default() };
        let ctrl = ControlVector::from_delta(PI, PI, 0.1).unwrap();
        let opts = SimOptions { max_cycles: 7, steps_per_cycle: 200, settle_tol: 0.0, record_last: Some(2) };
        let wf = simulate(&ctrl, &LoadModel::ConstantCurrent(0.0), &p, &x0, &opts).unwrap();
        assert_eq!(wf.t.len(), 2 * 200 + 1);
        assert!((wf.t[0] - 5.0 * p.period()).abs() < 1e-15);
        assert_eq!(*wf.states.last().unwrap(), wf.final_state);
        let full = run_switched(&ctrl, &LoadModel::ConstantCurrent(0.0), &p, 7, 200, &x0).unwrap();
        assert_eq!(full.t.len(), 7 * 200 + 1);
        assert_eq!(full.final_state, wf.final_state);
    }
}
