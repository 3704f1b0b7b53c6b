// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! Scalar-field dark matter: mass ↔ Compton frequency, field amplitude and
//! coupling limits Λ_γ⁻¹, Λ_e⁻¹ in GeV⁻¹.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{HBAR_C_GEV_CM, PLANCK_EV_S};

pub const DEFAULT_RHO_GEV_CM3: f64 = 0.4;
pub const DEFAULT_COHERENCE_Q: f64 = 1.0e6;
pub const DEFAULT_ENSEMBLE_FACTOR: f64 = 2.8e4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DarkMatterError {
    #[error("invalid dark matter input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DarkMatterModel {
    /// Local density in GeV/cm³.
    #[serde(default = "default_rho")]
    pub rho_gev_cm3: f64,
    /// Quality factor of the field oscillation. Carried for provenance only.
    #[serde(default = "default_q")]
    pub coherence_q: f64,
}

fn default_rho() -> f64 {
    DEFAULT_RHO_GEV_CM3
}

fn default_q() -> f64 {
    DEFAULT_COHERENCE_Q
}

impl Default for DarkMatterModel {
    fn default() -> Self {
        Self {
            rho_gev_cm3: DEFAULT_RHO_GEV_CM3,
            coherence_q: DEFAULT_COHERENCE_Q,
        }
    }
}

impl DarkMatterModel {
    pub fn validate(&self) -> Result<(), DarkMatterError> {
        if !(self.rho_gev_cm3.is_finite() && self.rho_gev_cm3 > 0.0) {
            return Err(DarkMatterError::InvalidInput(format!(
                "rho_dm must be positive, got {}",
                self.rho_gev_cm3
            )));
        }
        if !(self.coherence_q.is_finite() && self.coherence_q > 0.0) {
            return Err(DarkMatterError::InvalidInput(format!(
                "coherence_q must be positive, got {}",
                self.coherence_q
            )));
        }
        Ok(())
    }

    /// ρ in natural units, GeV⁴.
    pub fn rho_natural(&self) -> f64 {
        self.rho_gev_cm3 * HBAR_C_GEV_CM.powi(3)
    }
}

/// m_φ c² = h f, in eV.
pub fn mass_from_frequency(freq_hz: f64) -> f64 {
    PLANCK_EV_S * freq_hz
}

pub fn frequency_from_mass(m_phi_ev: f64) -> f64 {
    m_phi_ev / PLANCK_EV_S
}

/// φ₀ = √(2ρ)/m_φ in GeV.
pub fn field_amplitude(dm: &DarkMatterModel, m_phi_ev: f64) -> Result<f64, DarkMatterError> {
    if !(m_phi_ev.is_finite() && m_phi_ev > 0.0) {
        return Err(DarkMatterError::InvalidInput(format!(
            "mass must be positive, got {m_phi_ev} eV"
        )));
    }
    dm.validate()?;
    Ok((2.0 * dm.rho_natural()).sqrt() / (m_phi_ev * 1e-9))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingLimit {
    pub m_phi_ev: f64,
    pub freq_hz: f64,
    pub inv_lambda_gamma: f64,
    pub inv_lambda_e: f64,
    pub projected: bool,
}

/// Linear couplings: δα/α = φ/Λ_γ and δm_e/m_e = φ/Λ_e.
pub fn coupling_limit(
    freq_hz: f64,
    frac_alpha_up: f64,
    frac_me_up: f64,
    dm: &DarkMatterModel,
) -> Result<CouplingLimit, DarkMatterError> {
    if !(freq_hz.is_finite() && freq_hz > 0.0) {
        return Err(DarkMatterError::InvalidInput(format!(
            "frequency must be positive, got {freq_hz}"
        )));
    }
    for v in [frac_alpha_up, frac_me_up] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(DarkMatterError::InvalidInput(format!(
                "variation limit must be finite and non-negative, got {v}"
            )));
        }
    }
    let m_phi_ev = mass_from_frequency(freq_hz);
    let phi0 = field_amplitude(dm, m_phi_ev)?;
    Ok(CouplingLimit {
        m_phi_ev,
        freq_hz,
        inv_lambda_gamma: frac_alpha_up / phi0,
        inv_lambda_e: frac_me_up / phi0,
        projected: false,
    })
}

/// Rescales a single-sensor limit to an ensemble that is `factor` times more
/// sensitive.
pub fn ensemble_projection(limit: &CouplingLimit, factor: f64) -> Result<CouplingLimit, DarkMatterError> {
    if !(factor.is_finite() && factor >= 1.0) {
        return Err(DarkMatterError::InvalidInput(format!(
            "ensemble factor must be at least 1, got {factor}"
        )));
    }
    Ok(CouplingLimit {
        inv_lambda_gamma: limit.inv_lambda_gamma / factor,
        inv_lambda_e: limit.inv_lambda_e / factor,
        projected: true,
        ..*limit
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mass_window() {
        assert_relative_eq!(mass_from_frequency(0.1e9) * 1e6, 0.41357, max_relative = 1e-4);
        assert_relative_eq!(mass_from_frequency(12e9) * 1e6, 49.628, max_relative = 1e-4);
        assert_relative_eq!(mass_from_frequency(57e9) * 1e3, 0.23573, max_relative = 1e-4);
        let f = 3.3e9;
        assert_relative_eq!(frequency_from_mass(mass_from_frequency(f)), f, max_relative = 1e-15);
    }

    #[test]
    fn density_in_natural_units() {
        // 1 cm⁻¹ = ħc GeV, so GeV/cm³ = (ħc)³ GeV⁴.
        let cm_inv_gev = 1.973_269_804e-14_f64;
        let oracle = 0.4 * cm_inv_gev * cm_inv_gev * cm_inv_gev;
        assert_relative_eq!(DarkMatterModel::default().rho_natural(), oracle, max_relative = 1e-14);
        assert_relative_eq!(oracle, 3.073e-42, max_relative = 1e-3);
    }

    #[test]
    fn amplitude_at_one_gigahertz() {
        let dm = DarkMatterModel::default();
        let phi0 = field_amplitude(&dm, mass_from_frequency(1e9)).unwrap();
        assert_relative_eq!(phi0, 5.99e-7, max_relative = 2e-3);
        let half = field_amplitude(&dm, 2.0 * mass_from_frequency(1e9)).unwrap();
        assert_relative_eq!(half, phi0 / 2.0, max_relative = 1e-14);
        assert!(field_amplitude(&dm, 0.0).is_err());
    }

    #[test]
    fn coupling_limits() {
        let dm = DarkMatterModel::default();
        let l = coupling_limit(1e9, 5e-6, 8e-6, &dm).unwrap();
        assert_relative_eq!(l.inv_lambda_gamma, 8.35, max_relative = 2e-3);
        assert!(!l.projected);
        let zero = coupling_limit(1e9, 0.0, 0.0, &dm).unwrap();
        assert_eq!((zero.inv_lambda_gamma, zero.inv_lambda_e), (0.0, 0.0));
        let doubled = coupling_limit(2e9, 5e-6, 8e-6, &dm).unwrap();
        assert_relative_eq!(doubled.inv_lambda_gamma, 2.0 * l.inv_lambda_gamma, max_relative = 1e-14);
        assert!(coupling_limit(1e9, -1.0, 0.0, &dm).is_err());
    }

    #[test]
    fn projection() {
        let dm = DarkMatterModel::default();
        let l = coupling_limit(1e9, 5e-6, 8e-6, &dm).unwrap();
        let p = ensemble_projection(&l, DEFAULT_ENSEMBLE_FACTOR).unwrap();
        assert!(p.projected);
        assert_relative_eq!(p.inv_lambda_gamma, 2.98e-4, max_relative = 2e-3);
        assert_relative_eq!(p.inv_lambda_e / p.inv_lambda_gamma, 1.6, max_relative = 1e-14);
        let same = ensemble_projection(&l, 1.0).unwrap();
        assert_eq!(same.inv_lambda_gamma, l.inv_lambda_gamma);
        assert!(ensemble_projection(&l, 0.5).is_err());
    }
}
