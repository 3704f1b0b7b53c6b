// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! NV ground-state level structure and its dependence on α and m_e.
//!
//! The zero-field splitting scales as D ∝ μ_B² a₀⁻³ ∝ α⁴ m_e and the Zeeman
//! term as Z = γ_e B₀ ∝ α m_e⁻². The logarithmic derivative of the transition
//! frequency E_∓ = D ∓ Z then follows directly from the two power laws.
//!
//! Frequencies cross this module's boundary in hertz; angular frequencies are
//! used internally and are named `omega_*`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::PhysicalConstants;

/// D/2π of the NV ground state in Hz.
pub const DEFAULT_ZERO_FIELD_SPLITTING_HZ: f64 = 2.87e9;
/// Default guard against the ground-state level crossing, as D − Z in Hz.
pub const DEFAULT_DEGENERACY_FLOOR_HZ: f64 = 1.0e6;
/// Largest fractional constant variation accepted by the linearized shift.
pub const LINEAR_REGIME_LIMIT: f64 = 1.0e-2;

#[derive(Debug, Error, PartialEq)]
pub enum SpinError {
    #[error("invalid spin model: {0}")]
    InvalidModel(String),
    #[error("transition {branch:?} is within {gap_hz:.3e} Hz of the level crossing (floor {floor_hz:.3e} Hz)")]
    DegenerateBranch {
        branch: Branch,
        gap_hz: f64,
        floor_hz: f64,
    },
    #[error("fractional variation {0:e} outside the linearized regime")]
    OutsideLinearRegime(f64),
}

/// Which m_s = 0 ↔ m_s = ∓1 transition is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// m_s = 0 ↔ −1, E_-/ħ = D − γ_e B₀
    EMinus,
    /// m_s = 0 ↔ +1, E_+/ħ = D + γ_e B₀
    EPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NvSpinModel {
    /// D in rad/s.
    pub omega_zero_field: f64,
    /// B₀ in tesla.
    pub magnetic_field_b0: f64,
    pub constants: PhysicalConstants,
}

impl Default for NvSpinModel {
    fn default() -> Self {
        Self {
            omega_zero_field: 2.0 * PI * DEFAULT_ZERO_FIELD_SPLITTING_HZ,
            magnetic_field_b0: 0.0,
            constants: PhysicalConstants::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionFrequencies {
    pub minus_hz: f64,
    pub plus_hz: f64,
}

impl TransitionFrequencies {
    /// True when B₀ has pushed E_- through zero.
    pub fn is_off_branch(&self) -> bool {
        self.minus_hz <= 0.0
    }
}

/// Logarithmic derivatives of D and of the Zeeman term with respect to α and m_e.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingExponents {
    pub d_alpha: f64,
    pub d_me: f64,
    pub z_alpha: f64,
    pub z_me: f64,
}

impl Default for ScalingExponents {
    fn default() -> Self {
        Self {
            d_alpha: 4.0,
            d_me: 1.0,
            z_alpha: 1.0,
            z_me: -2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCoefficients {
    pub k_alpha: f64,
    pub k_me: f64,
    pub branch: Branch,
}

impl NvSpinModel {
    pub fn new(zero_field_hz: f64, b0_tesla: f64) -> Result<Self, SpinError> {
        let model = Self {
            omega_zero_field: 2.0 * PI * zero_field_hz,
            magnetic_field_b0: b0_tesla,
            constants: PhysicalConstants::default(),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_field(b0_tesla: f64) -> Result<Self, SpinError> {
        Self::new(DEFAULT_ZERO_FIELD_SPLITTING_HZ, b0_tesla)
    }

    pub fn validate(&self) -> Result<(), SpinError> {
        if !(self.omega_zero_field.is_finite() && self.omega_zero_field > 0.0) {
            return Err(SpinError::InvalidModel(format!(
                "zero-field splitting must be positive, got {} rad/s",
                self.omega_zero_field
            )));
        }
        if !(self.magnetic_field_b0.is_finite() && self.magnetic_field_b0 >= 0.0) {
            return Err(SpinError::InvalidModel(format!(
                "B0 must be non-negative, got {} T",
                self.magnetic_field_b0
            )));
        }
        if !self.constants.is_consistent() {
            return Err(SpinError::InvalidModel(
                "physical constants are inconsistent".into(),
            ));
        }
        Ok(())
    }

    /// Z = γ_e B₀ in rad/s.
    pub fn omega_zeeman(&self) -> f64 {
        2.0 * PI * self.constants.electron_gyromagnetic * self.magnetic_field_b0
    }

    pub fn transition_frequencies(&self) -> TransitionFrequencies {
        let d = self.omega_zero_field / (2.0 * PI);
        let z = self.constants.electron_gyromagnetic * self.magnetic_field_b0;
        TransitionFrequencies {
            minus_hz: d - z,
            plus_hz: d + z,
        }
    }

    /// Transition angular frequency of `branch` in rad/s.
    pub fn omega_transition(&self, branch: Branch) -> f64 {
        match branch {
            Branch::EMinus => self.omega_zero_field - self.omega_zeeman(),
            Branch::EPlus => self.omega_zero_field + self.omega_zeeman(),
        }
    }

    /// B₀ at which E_- vanishes.
    pub fn level_crossing_field(&self) -> f64 {
        self.omega_zero_field / (2.0 * PI * self.constants.electron_gyromagnetic)
    }

    pub fn sensitivity_coefficients(
        &self,
        exps: &ScalingExponents,
        branch: Branch,
    ) -> Result<SensitivityCoefficients, SpinError> {
        self.sensitivity_coefficients_with_floor(exps, branch, DEFAULT_DEGENERACY_FLOOR_HZ)
    }

    /// d ln E / d ln α and d ln E / d ln m_e for the chosen branch, refusing
    /// to evaluate within `floor_hz` of the level crossing.
    pub fn sensitivity_coefficients_with_floor(
        &self,
        exps: &ScalingExponents,
        branch: Branch,
        floor_hz: f64,
    ) -> Result<SensitivityCoefficients, SpinError> {
        let d = self.omega_zero_field;
        let z = match branch {
            Branch::EMinus => -self.omega_zeeman(),
            Branch::EPlus => self.omega_zeeman(),
        };
        let e = d + z;
        if e.abs() <= 2.0 * PI * floor_hz {
            return Err(SpinError::DegenerateBranch {
                branch,
                gap_hz: e / (2.0 * PI),
                floor_hz,
            });
        }
        Ok(SensitivityCoefficients {
            k_alpha: (exps.d_alpha * d + exps.z_alpha * z) / e,
            k_me: (exps.d_me * d + exps.z_me * z) / e,
            branch,
        })
    }

    /// Angular amplitude δ_s of the level-splitting oscillation produced by
    /// fractional variations of α and m_e.
    pub fn level_shift_amplitude(
        &self,
        coeffs: &SensitivityCoefficients,
        frac_alpha: f64,
        frac_me: f64,
    ) -> Result<f64, SpinError> {
        for frac in [frac_alpha, frac_me] {
            if !(frac.abs() < LINEAR_REGIME_LIMIT) {
                return Err(SpinError::OutsideLinearRegime(frac));
            }
        }
        Ok((coeffs.k_alpha * frac_alpha + coeffs.k_me * frac_me)
            * self.omega_transition(coeffs.branch))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const GHZ: f64 = 1e9;

    #[test]
    fn zero_field_is_degenerate() {
        let f = NvSpinModel::with_field(0.0).unwrap().transition_frequencies();
        assert_eq!(f.minus_hz, 2.87 * GHZ);
        assert_eq!(f.plus_hz, 2.87 * GHZ);
    }

    #[test]
    fn transitions_at_51_mt() {
        let f = NvSpinModel::with_field(0.051).unwrap().transition_frequencies();
        let z = 28.024_951_424_2 * 0.051;
        assert_relative_eq!(f.minus_hz / GHZ, 2.87 - z, max_relative = 1e-12);
        assert_relative_eq!(f.plus_hz / GHZ, 2.87 + z, max_relative = 1e-12);
        assert!((f.minus_hz / GHZ - 1.441).abs() < 1e-3);
        assert!((f.plus_hz / GHZ - 4.299).abs() < 1e-3);
        assert!(f.plus_hz >= f.minus_hz);
    }

    #[test]
    fn level_crossing_near_102_mt() {
        let m = NvSpinModel::default();
        let b = m.level_crossing_field();
        assert!((b - 0.1024).abs() < 1e-4);
        let f = NvSpinModel::with_field(b).unwrap().transition_frequencies();
        assert!(f.minus_hz.abs() < 1.0);
        let past = NvSpinModel::with_field(0.12).unwrap().transition_frequencies();
        assert!(past.is_off_branch());
    }

    #[test]
    fn coefficients_match_reference_points() {
        let exps = ScalingExponents::default();
        let k = NvSpinModel::with_field(0.051)
            .unwrap()
            .sensitivity_coefficients(&exps, Branch::EMinus)
            .unwrap();
        assert!((k.k_alpha - 6.98).abs() < 0.01, "{}", k.k_alpha);
        assert!((k.k_me - 3.98).abs() < 0.01, "{}", k.k_me);

        let k0 = NvSpinModel::with_field(0.0)
            .unwrap()
            .sensitivity_coefficients(&exps, Branch::EMinus)
            .unwrap();
        assert_eq!((k0.k_alpha, k0.k_me), (4.0, 1.0));

        let kh = NvSpinModel::with_field(0.0255)
            .unwrap()
            .sensitivity_coefficients(&exps, Branch::EMinus)
            .unwrap();
        assert!((kh.k_alpha - 4.99).abs() < 0.01);
        assert!((kh.k_me - 1.99).abs() < 0.01);
    }

    /// Symbolic-free oracle: numerically differentiate ln E_-(α, m_e) built
    /// from the raw power laws.
    #[test]
    fn coefficients_match_finite_difference_of_power_laws() {
        let d0 = 2.87;
        let z0 = 28.024_951_424_2 * 0.051;
        let e = |a: f64, m: f64| d0 * a.powi(4) * m - z0 * a / (m * m);
        let h = 1e-6;
        let ka = ((e(1.0 + h, 1.0)).ln() - (e(1.0 - h, 1.0)).ln()) / (2.0 * h);
        let km = ((e(1.0, 1.0 + h)).ln() - (e(1.0, 1.0 - h)).ln()) / (2.0 * h);
        let k = NvSpinModel::with_field(0.051)
            .unwrap()
            .sensitivity_coefficients(&ScalingExponents::default(), Branch::EMinus)
            .unwrap();
        assert_relative_eq!(k.k_alpha, ka, max_relative = 1e-8);
        assert_relative_eq!(k.k_me, km, max_relative = 1e-8);
    }

    #[test]
    fn plus_branch_flips_zeeman_sign() {
        let k = NvSpinModel::with_field(0.051)
            .unwrap()
            .sensitivity_coefficients(&ScalingExponents::default(), Branch::EPlus)
            .unwrap();
        let d = 2.87;
        let z = 28.024_951_424_2 * 0.051;
        assert_relative_eq!(k.k_alpha, (4.0 * d + z) / (d + z), max_relative = 1e-12);
        assert_relative_eq!(k.k_me, (d - 2.0 * z) / (d + z), max_relative = 1e-12);
    }

    #[test]
    fn degenerate_branch_is_rejected() {
        let m = NvSpinModel::default();
        let b = m.level_crossing_field();
        let err = NvSpinModel::with_field(b)
            .unwrap()
            .sensitivity_coefficients(&ScalingExponents::default(), Branch::EMinus)
            .unwrap_err();
        assert!(matches!(err, SpinError::DegenerateBranch { .. }));
        // A 2 MHz gap clears the default floor but not a 5 MHz floor.
        let b = (2.87e9 - 2e6) / 28.024_951_424_2e9;
        let near = NvSpinModel::with_field(b).unwrap();
        assert!(near
            .sensitivity_coefficients(&ScalingExponents::default(), Branch::EMinus)
            .is_ok());
        assert!(near
            .sensitivity_coefficients_with_floor(&ScalingExponents::default(), Branch::EMinus, 5e6)
            .is_err());
    }

    #[test]
    fn invalid_models() {
        assert!(NvSpinModel::new(-1.0, 0.0).is_err());
        assert!(NvSpinModel::new(2.87e9, -0.01).is_err());
        assert!(NvSpinModel::new(2.87e9, f64::NAN).is_err());
    }

    #[test]
    fn level_shift_examples() {
        let m = NvSpinModel::with_field(0.051).unwrap();
        let k = m
            .sensitivity_coefficients(&ScalingExponents::default(), Branch::EMinus)
            .unwrap();
        assert_eq!(m.level_shift_amplitude(&k, 0.0, 0.0).unwrap(), 0.0);

        let ds = m.level_shift_amplitude(&k, 1e-6, 0.0).unwrap();
        assert!((ds / (2.0 * PI) - 10.06e3).abs() < 10.0, "{}", ds / (2.0 * PI));

        let a = m.level_shift_amplitude(&k, 5e-6, 0.0).unwrap();
        let b = m.level_shift_amplitude(&k, 0.0, 8.7e-6).unwrap();
        assert!((a / b - 1.0).abs() < 0.01);

        assert_eq!(
            m.level_shift_amplitude(&k, 0.02, 0.0),
            Err(SpinError::OutsideLinearRegime(0.02))
        );
    }
}
