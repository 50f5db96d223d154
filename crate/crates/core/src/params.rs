//! Converter parameters and the model-reading switches.
//!
//! Defaults reproduce the published DAB parameter table. `c1`, `c2` and `r`
//! are not published; their defaults are calibrated against the published
//! eigenvalue tables (see `dabkit calibrate`). `i1_min`/`i2_min` are fitted
//! ZVS charge thresholds.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DabError, Result};

/// How the secondary dc voltage enters the winding equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SecondaryVoltage {
    /// The ac-side source is the primary-referred voltage `n * Vc2`,
    /// consistent with the `n * s2 * I2` output current.
    #[default]
    Referred,
    /// The ac-side source is `Vc2` as printed.
    Literal,
}

/// Coefficient of `R1 * I1` in the primary winding equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WindingResistance {
    /// `L1 * R1 / h`, as published.
    #[default]
    AsPublished,
    /// `L2 * R1 / h`, from inverting the coupled-inductor equations.
    Reciprocal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ModelOptions {
    pub secondary_voltage: SecondaryVoltage,
    pub winding_resistance: WindingResistance,
    /// Use `Vc1 = V1 - r * Id` in the steady state instead of `Vc1 = V1`.
    pub resistive_input_drop: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConverterParams {
    /// Input dc voltage [V].
    pub v1: f64,
    /// Primary self inductance [H].
    pub l1: f64,
    /// Primary-referred secondary self inductance [H].
    pub l2: f64,
    /// Magnetizing (mutual) inductance [H].
    pub lm: f64,
    /// Winding resistances [ohm].
    pub r1: f64,
    pub r2: f64,
    /// Input filter inductance [H] and its series resistance [ohm].
    pub ld: f64,
    pub r: f64,
    /// dc-link capacitances [F].
    pub c1: f64,
    pub c2: f64,
    /// Turns ratio.
    pub n: f64,
    /// Switching frequency [Hz].
    pub fs: f64,
    /// Desired output voltage [V].
    pub vc2_ref: f64,
    /// ZVS charge thresholds [A].
    pub i1_min: f64,
    pub i2_min: f64,
    pub model: ModelOptions,
}

impl Default for ConverterParams {
    fn default() -> Self {
        Self::table_one()
    }
}

impl ConverterParams {
    /// Published parameters plus the calibrated `c1`, `c2`, `r` and ZVS
    /// thresholds.
    pub fn table_one() -> Self {
        Self {
            v1: 100.0,
            l1: 4.2134e-3,
            l2: 4.2158e-3,
            lm: 4.205e-3,
            r1: 0.45,
            r2: 0.45,
            ld: 10e-3,
            r: 0.068,
            c1: 1.01e-3,
            c2: 0.254e-3,
            n: 0.5,
            fs: 25e3,
            vc2_ref: 200.0,
            i1_min: 2.1,
            i2_min: 1.35,
            model: ModelOptions::default(),
        }
    }

    /// `h = Lm^2 - L1*L2`.
    pub fn h(&self) -> f64 {
        self.lm * self.lm - self.l1 * self.l2
    }

    pub fn omega_s(&self) -> f64 {
        2.0 * PI * self.fs
    }

    pub fn period(&self) -> f64 {
        1.0 / self.fs
    }

    /// Factor applied to `Vc2` where it drives the winding equations.
    pub fn secondary_gain(&self) -> f64 {
        match self.model.secondary_voltage {
            SecondaryVoltage::Referred => self.n,
            SecondaryVoltage::Literal => 1.0,
        }
    }

    /// Winding resistance matrix `[[a11, a12], [a21, a22]]` of the current
    /// equations (already divided by `h`).
    pub fn winding_matrix(&self) -> [[f64; 2]; 2] {
        let h = self.h();
        let self_l = match self.model.winding_resistance {
            WindingResistance::AsPublished => self.l1,
            WindingResistance::Reciprocal => self.l2,
        };
        [[self_l * self.r1 / h, self.lm * self.r2 / h], [self.lm * self.r1 / h, self.l1 * self.r2 / h]]
    }

    /// Coefficients multiplying `(s1*Vc1, s2*Vc2)` in the current equations,
    /// including the secondary gain: `[[-L2/h, Lm*k/h], [-Lm/h, L1*k/h]]`.
    pub fn drive_matrix(&self) -> [[f64; 2]; 2] {
        let h = self.h();
        let k = self.secondary_gain();
        [[-self.l2 / h, self.lm * k / h], [-self.lm / h, self.l1 * k / h]]
    }

    /// Checks the hard invariants and returns soft warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let positive = [
            ("v1", self.v1),
            ("l1", self.l1),
            ("l2", self.l2),
            ("lm", self.lm),
            ("ld", self.ld),
            ("c1", self.c1),
            ("c2", self.c2),
            ("n", self.n),
            ("fs", self.fs),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(DabError::InvalidParameter { name, reason: format!("must be finite and > 0, got {v}") });
            }
        }
        let non_negative =
            [("r1", self.r1), ("r2", self.r2), ("r", self.r), ("i1_min", self.i1_min), ("i2_min", self.i2_min)];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(DabError::InvalidParameter { name, reason: format!("must be finite and >= 0, got {v}") });
            }
        }
        if !self.vc2_ref.is_finite() {
            return Err(DabError::InvalidParameter { name: "vc2_ref", reason: "must be finite".into() });
        }
        let h = self.h();
        if h == 0.0 || h.abs() < 1e-12 * self.l1 * self.l2 {
            return Err(DabError::InvalidParameter {
                name: "lm",
                reason: format!("h = Lm^2 - L1*L2 = {h:e} is (numerically) zero"),
            });
        }
        let mut warnings = Vec::new();
        if self.l1 * self.l1 <= self.lm * self.lm {
            warnings.push(format!(
                "L1^2 = {:e} <= Lm^2 = {:e}: transformer zero dynamics are not stable",
                self.l1 * self.l1,
                self.lm * self.lm
            ));
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(warnings)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let p: ConverterParams = toml::from_str(text).map_err(|e| DabError::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("parameters always serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| DabError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_one_invariants() {
        let p = ConverterParams::table_one();
        assert!(p.validate().unwrap().is_empty());
        assert!(p.h() < 0.0);
        assert!((p.omega_s() - 1.5708e5).abs() < 10.0);
        assert!(p.l1 * p.l1 > p.lm * p.lm);
    }

    #[test]
    fn rejects_non_physical_values() {
        let mut p = ConverterParams::table_one();
        p.c1 = 0.0;
        assert!(p.validate().is_err());
        let mut p = ConverterParams::table_one();
        p.r1 = -0.1;
        assert!(p.validate().is_err());
        let mut p = ConverterParams::table_one();
        p.lm = (p.l1 * p.l2).sqrt();
        assert!(p.validate().is_err());
    }

    #[test]
    fn warns_when_magnetizing_exceeds_self_inductance() {
        let mut p = ConverterParams::table_one();
        p.lm = 4.3e-3;
        p.l2 = 5.0e-3;
        assert_eq!(p.validate().unwrap().len(), 1);
    }

    #[test]
    fn toml_round_trip_and_partial_files() {
        let p = ConverterParams::table_one();
        let back = ConverterParams::from_toml_str(&p.to_toml_string()).unwrap();
        assert_eq!(p, back);

        let partial = ConverterParams::from_toml_str("v1 = 120.0\n[model]\nsecondary_voltage = \"literal\"\n").unwrap();
        assert_eq!(partial.v1, 120.0);
        assert_eq!(partial.l1, p.l1);
        assert_eq!(partial.model.secondary_voltage, SecondaryVoltage::Literal);
        assert_eq!(partial.secondary_gain(), 1.0);

        assert!(ConverterParams::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn reciprocal_variant_changes_only_a11() {
        let mut p = ConverterParams::table_one();
        let a = p.winding_matrix();
        p.model.winding_resistance = WindingResistance::Reciprocal;
        let b = p.winding_matrix();
        assert_ne!(a[0][0], b[0][0]);
        assert_eq!(a[0][1], b[0][1]);
        assert_eq!(a[1], b[1]);
    }
}
