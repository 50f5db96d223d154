//! Full-order switched model of the DAB: control vector, quasi-square
//! switching functions and the five-state right-hand side.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DabError, Result};
use crate::params::ConverterParams;

/// Outer shift between the primary and secondary fundamentals.
pub fn outer_phase_shift(d1: f64, d2: f64, d3: f64) -> f64 {
    d3 + (d1 - d2) / 2.0
}

/// Triple-phase-shift control: pulse widths `d1`, `d2` and bridge shift `d3`
/// (radians). The fundamental shift `delta` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlVector {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl ControlVector {
    pub fn new(d1: f64, d2: f64, d3: f64) -> Result<Self> {
        check_pulse_width("d1", d1)?;
        check_pulse_width("d2", d2)?;
        if !d3.is_finite() {
            return Err(DabError::Domain { what: "d3", value: d3, domain: "finite" });
        }
        Ok(Self { d1, d2, d3 })
    }

    pub fn from_delta(d1: f64, d2: f64, delta: f64) -> Result<Self> {
        Self::new(d1, d2, delta - (d1 - d2) / 2.0)
    }

    pub fn delta(&self) -> f64 {
        outer_phase_shift(self.d1, self.d2, self.d3)
    }

    /// Fundamental phasors of the two bridge voltages.
    pub fn phasors(&self) -> (Complex64, Complex64) {
        fundamental_phasors(self.d1, self.d2, self.delta()).expect("pulse widths validated at construction")
    }
}

fn check_pulse_width(what: &'static str, d: f64) -> Result<()> {
    if (0.0..=PI).contains(&d) {
        Ok(())
    } else {
        Err(DabError::Domain { what, value: d, domain: "[0, pi]" })
    }
}

/// Quasi-square wave of pulse width `d`; the positive pulse is centred at
/// `theta - phase = pi/2`, the negative one at `3*pi/2`.
pub fn switching_waveform(d: f64, phase: f64, theta: f64) -> Result<i8> {
    check_pulse_width("d", d)?;
    let half = d / 2.0;
    if wrap_angle(theta - phase - FRAC_PI_2).abs() < half {
        Ok(1)
    } else if wrap_angle(theta - phase + FRAC_PI_2).abs() < half {
        Ok(-1)
    } else {
        Ok(0)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Fundamental phasors in the primary-real frame:
/// `S_qd1 = (4/pi) sin(d1/2)` and `S_qd2 = (4/pi) sin(d2/2) e^{-j delta}`.
pub fn fundamental_phasors(d1: f64, d2: f64, delta: f64) -> Result<(Complex64, Complex64)> {
    check_pulse_width("d1", d1)?;
    check_pulse_width("d2", d2)?;
    let k = 4.0 / PI;
    Ok((Complex64::new(k * (d1 / 2.0).sin(), 0.0), Complex64::from_polar(k * (d2 / 2.0).sin(), -delta)))
}

/// Rotates a primary-real-frame phasor into the sine-referenced time frame
/// of the switching waveforms, so that `x(theta) = Re(to_time_frame(X) e^{j theta})`.
pub fn to_time_frame(z: Complex64) -> Complex64 {
    z * Complex64::new(0.0, -1.0)
}

pub fn from_time_frame(z: Complex64) -> Complex64 {
    z * Complex64::new(0.0, 1.0)
}

/// Switched-model state `[Id, Vc1, I1, I2, Vc2]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FullState {
    pub id: f64,
    pub vc1: f64,
    pub i1: f64,
    pub i2: f64,
    pub vc2: f64,
}

impl FullState {
    pub const NAMES: [&'static str; 5] = ["Id", "Vc1", "I1", "I2", "Vc2"];

    pub fn to_array(&self) -> [f64; 5] {
        [self.id, self.vc1, self.i1, self.i2, self.vc2]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self { id: a[0], vc1: a[1], i1: a[2], i2: a[3], vc2: a[4] }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LoadModel {
    /// Fixed load current [A].
    ConstantCurrent(f64),
    /// Fixed load power [W]; draws `P / Vc2`.
    ConstantPower(f64),
}

impl LoadModel {
    pub fn current(&self, vc2: f64) -> Result<f64> {
        match *self {
            LoadModel::ConstantCurrent(io) => Ok(io),
            LoadModel::ConstantPower(p) => {
                if vc2 > 0.0 {
                    Ok(p / vc2)
                } else {
                    Err(DabError::SingularLoad { vc2 })
                }
            }
        }
    }
}

/// Time derivative of the switched model for bridge states `s1`, `s2`.
pub fn full_order_rhs(x: &FullState, s1: f64, s2: f64, load: &LoadModel, p: &ConverterParams) -> Result<FullState> {
    let io = load.current(x.vc2)?;
    let a = p.winding_matrix();
    let b = p.drive_matrix();
    let v1 = s1 * x.vc1;
    let v2 = s2 * x.vc2;
    Ok(FullState {
        id: (p.v1 - x.vc1 - p.r * x.id) / p.ld,
        vc1: (x.id - s1 * x.i1) / p.c1,
        i1: a[0][0] * x.i1 + a[0][1] * x.i2 + b[0][0] * v1 + b[0][1] * v2,
        i2: a[1][0] * x.i1 + a[1][1] * x.i2 + b[1][0] * v1 + b[1][1] * v2,
        vc2: (p.n * s2 * x.i2 - io) / p.c2,
    })
}
