//! First-harmonic envelope model: seven real states in the frame rotating
//! at the switching frequency, and the steady-state residual system.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::LoadModel;
use crate::optsolve::OperatingPoint;
use crate::params::ConverterParams;

/// `[Id, Vc1, Iq1, Id1, Iq2, Id2, Vc2]`; winding current phasors are
/// `I_qd = I_q + j I_d`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnvelopeState {
    pub id: f64,
    pub vc1: f64,
    pub iq1: f64,
    pub id1: f64,
    pub iq2: f64,
    pub id2: f64,
    pub vc2: f64,
}

impl EnvelopeState {
    pub const NAMES: [&'static str; 7] = ["Id", "Vc1", "Iq1", "Id1", "Iq2", "Id2", "Vc2"];

    pub fn new(id: f64, vc1: f64, i_qd1: Complex64, i_qd2: Complex64, vc2: f64) -> Self {
        Self { id, vc1, iq1: i_qd1.re, id1: i_qd1.im, iq2: i_qd2.re, id2: i_qd2.im, vc2 }
    }

    pub fn i_qd1(&self) -> Complex64 {
        Complex64::new(self.iq1, self.id1)
    }

    pub fn i_qd2(&self) -> Complex64 {
        Complex64::new(self.iq2, self.id2)
    }

    pub fn to_array(&self) -> [f64; 7] {
        [self.id, self.vc1, self.iq1, self.id1, self.iq2, self.id2, self.vc2]
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        Self { id: a[0], vc1: a[1], iq1: a[2], id1: a[3], iq2: a[4], id2: a[5], vc2: a[6] }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Time derivative of the envelope model for control phasors `s_qd1`, `s_qd2`.
pub fn envelope_rhs(
    xe: &EnvelopeState,
    s_qd1: Complex64,
    s_qd2: Complex64,
    load: &LoadModel,
    p: &ConverterParams,
) -> Result<EnvelopeState> {
    let io = load.current(xe.vc2)?;
    let a = p.winding_matrix();
    let b = p.drive_matrix();
    let i1 = xe.i_qd1();
    let i2 = xe.i_qd2();
    let v1 = s_qd1 * xe.vc1;
    let v2 = s_qd2 * xe.vc2;
    let rot = Complex64::new(0.0, -p.omega_s());
    let di1 = i1 * a[0][0] + i2 * a[0][1] + v1 * b[0][0] + v2 * b[0][1] + rot * i1;
    let di2 = i1 * a[1][0] + i2 * a[1][1] + v1 * b[1][0] + v2 * b[1][1] + rot * i2;
    Ok(EnvelopeState {
        id: (p.v1 - xe.vc1 - p.r * xe.id) / p.ld,
        vc1: xe.id / p.c1 - (s_qd1 * i1.conj()).re / (2.0 * p.c1),
        iq1: di1.re,
        id1: di1.im,
        iq2: di2.re,
        id2: di2.im,
        vc2: p.n * (s_qd2 * i2.conj()).re / (2.0 * p.c2) - io / p.c2,
    })
}

/// Residuals of the seven steady-state equations, each in the unit of its
/// equation: input voltage [V], dc current balances [A], winding current
/// equations [A/s].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateResidual {
    pub input_voltage: f64,
    pub input_current: f64,
    pub primary_q: f64,
    pub primary_d: f64,
    pub secondary_q: f64,
    pub secondary_d: f64,
    pub output_current: f64,
}

impl SteadyStateResidual {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.input_voltage,
            self.input_current,
            self.primary_q,
            self.primary_d,
            self.secondary_q,
            self.secondary_d,
            self.output_current,
        ]
    }

    /// Max-norm after dividing each residual by a characteristic magnitude:
    /// `V1` for the voltage balance, the larger of 1 A and the dc currents
    /// for the current balances, and the full-square drive term
    /// `|L2/h| (4/pi) V1` for the winding equations.
    pub fn scaled_max_norm(&self, op: &OperatingPoint, p: &ConverterParams) -> f64 {
        let current = 1.0f64.max(op.state.id.abs()).max(op.io.abs());
        let drive = (p.l2 / p.h()).abs() * 4.0 / std::f64::consts::PI * p.v1;
        let r = self;
        [
            r.input_voltage.abs() / p.v1,
            r.input_current.abs() / current,
            r.primary_q.abs() / drive,
            r.primary_d.abs() / drive,
            r.secondary_q.abs() / drive,
            r.secondary_d.abs() / drive,
            r.output_current.abs() / current,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Evaluates the steady-state equations at a stored operating point.
pub fn steady_state_residual(op: &OperatingPoint, p: &ConverterParams) -> SteadyStateResidual {
    let x = &op.state;
    let (s1, s2) = (op.s_qd1, op.s_qd2);
    let a = p.winding_matrix();
    let b = p.drive_matrix();
    let w = p.omega_s();
    let vc1_target = if p.model.resistive_input_drop { p.v1 - p.r * x.id } else { p.v1 };
    SteadyStateResidual {
        input_voltage: x.vc1 - vc1_target,
        input_current: s1.re * x.iq1 + s1.im * x.id1 - 2.0 * x.id,
        primary_q: a[0][0] * x.iq1 + a[0][1] * x.iq2 + b[0][0] * s1.re * x.vc1 + b[0][1] * s2.re * x.vc2 + w * x.id1,
        primary_d: a[0][0] * x.id1 + a[0][1] * x.id2 + b[0][0] * s1.im * x.vc1 + b[0][1] * s2.im * x.vc2 - w * x.iq1,
        secondary_q: a[1][0] * x.iq1 + a[1][1] * x.iq2 + b[1][0] * s1.re * x.vc1 + b[1][1] * s2.re * x.vc2 + w * x.id2,
        secondary_d: a[1][0] * x.id1 + a[1][1] * x.id2 + b[1][0] * s1.im * x.vc1 + b[1][1] * s2.im * x.vc2 - w * x.iq2,
        output_current: s2.re * x.iq2 + s2.im * x.id2 - 2.0 * op.io / p.n,
    }
}

/// dc-side power bookkeeping of an operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBalance {
    /// `V1 * Id` [W].
    pub pin: f64,
    /// `Vc2 * Io` [W].
    pub pout: f64,
    /// `R1 |I_qd1|^2 / 2 + R2 |I_qd2|^2 / 2` [W].
    pub copper_loss: f64,
    /// `Id * (V1 - Vc1)`: `r * Id^2` at the exact input balance, zero when
    /// the steady state pins `Vc1 = V1`.
    pub filter_loss: f64,
}

impl PowerBalance {
    pub fn losses(&self) -> f64 {
        self.copper_loss + self.filter_loss
    }
}

pub fn dc_power_balance(op: &OperatingPoint, p: &ConverterParams) -> PowerBalance {
    let x = &op.state;
    PowerBalance {
        pin: p.v1 * x.id,
        pout: x.vc2 * op.io,
        copper_loss: 0.5 * (p.r1 * x.i_qd1().norm_sqr() + p.r2 * x.i_qd2().norm_sqr()),
        filter_loss: x.id * (p.v1 - x.vc1),
    }
}
