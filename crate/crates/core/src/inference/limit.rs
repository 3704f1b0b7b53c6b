// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! Upper limits: excess relaxation rate, then the fractional variation of the
//! constants that would have produced it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{InferenceError, RateEstimate};
use crate::mixer::{lineshape_factor, MixingConfig, SMALL_ARGUMENT_LIMIT};
use crate::spin::SensitivityCoefficients;

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Number of standard deviations added for a given confidence level.
///
/// 95% maps to exactly 2σ. Other levels use the two-sided Gaussian quantile,
/// the convention of which 2σ ≈ 95% is the rounded form.
pub fn z_for_confidence(confidence: f64) -> Result<f64, InferenceError> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(InferenceError::InvalidInput(format!(
            "confidence must be in (0, 1), got {confidence}"
        )));
    }
    if (confidence - DEFAULT_CONFIDENCE).abs() < 1e-12 {
        return Ok(2.0);
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(0.5 * (1.0 + confidence)))
}

/// Excess-rate bound with the ingredients it was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateLimit {
    /// γ̂ = signal − reference, unclipped.
    pub point: f64,
    pub sigma: f64,
    pub z: f64,
    /// max(γ̂, 0) + z·σ
    pub upper: f64,
}

impl RateLimit {
    pub fn from_estimates(
        signal_fit: &RateEstimate,
        reference_fit: &RateEstimate,
        confidence: f64,
    ) -> Result<Self, InferenceError> {
        let values = [signal_fit.rate, signal_fit.sigma, reference_fit.rate, reference_fit.sigma];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(InferenceError::InvalidInput("non-finite rate estimate".into()));
        }
        let z = z_for_confidence(confidence)?;
        let point = signal_fit.rate - reference_fit.rate;
        let sigma = signal_fit.sigma.hypot(reference_fit.sigma);
        Ok(Self {
            point,
            sigma,
            z,
            upper: point.max(0.0) + z * sigma,
        })
    }

    /// γ̂ + z·σ without the physical-boundary clip.
    pub fn unclipped_upper(&self) -> f64 {
        self.point + self.z * self.sigma
    }
}

/// γ_φ^up = max(γ̂, 0) + z·σ with γ̂ = signal − reference.
pub fn excess_rate_limit(
    signal_fit: &RateEstimate,
    reference_fit: &RateEstimate,
    confidence: f64,
) -> Result<f64, InferenceError> {
    RateLimit::from_estimates(signal_fit, reference_fit, confidence).map(|l| l.upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperLimit {
    /// Per-direction excess rate bound, s⁻¹.
    pub gamma_phi_up: f64,
    /// Implied bound on δE/E before attribution to a single constant.
    pub frac_energy_up: f64,
    pub frac_variation_up_alpha: f64,
    pub frac_variation_up_me: f64,
    pub confidence: f64,
    pub config: MixingConfig,
    pub coeffs: SensitivityCoefficients,
}

/// Inverts rate → Ω_eff → δ_s → δE/E → δα/α and δm_e/m_e, attributing the
/// whole shift to one constant at a time.
pub fn variation_upper_limit(
    gamma_phi_up: f64,
    config: &MixingConfig,
    coeffs: &SensitivityCoefficients,
    confidence: f64,
) -> Result<UpperLimit, InferenceError> {
    if !(gamma_phi_up.is_finite() && gamma_phi_up >= 0.0) {
        return Err(InferenceError::InvalidInput(format!(
            "rate bound must be finite and non-negative, got {gamma_phi_up}"
        )));
    }
    let gamma2 = config.noise.gamma2;
    let rabi = config.drive.rabi_omega1;
    if !(gamma2 > 0.0 && rabi > 0.0 && config.omega_spin > 0.0) {
        return Err(InferenceError::InvalidInput(
            "inversion needs positive Γ₂, Ω₁ and ω_s".into(),
        ));
    }
    let omega_phi = config.signal.omega_phi;
    let omega_eff_up = (2.0 * gamma2 * gamma_phi_up / (PI / 2.0).sqrt()).sqrt();
    let delta_s_up = 2.0 * omega_phi * omega_eff_up / rabi;
    let index = delta_s_up / omega_phi;
    if index >= SMALL_ARGUMENT_LIMIT {
        return Err(InferenceError::SidebandInversionInvalid(index));
    }
    let frac_energy_up =
        delta_s_up / config.omega_spin / lineshape_factor(config.detuning(), gamma2);
    Ok(UpperLimit {
        gamma_phi_up,
        frac_energy_up,
        frac_variation_up_alpha: frac_energy_up / coeffs.k_alpha,
        frac_variation_up_me: frac_energy_up / coeffs.k_me,
        confidence,
        config: *config,
        coeffs: *coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixer::{
        effective_rabi, induced_relaxation_rate, Band, MixerDrive, NoiseModel, SignalHypothesis,
    };
    use crate::spin::{Branch, NvSpinModel, ScalingExponents};

    fn est(rate: f64, sigma: f64) -> RateEstimate {
        RateEstimate {
            rate,
            sigma,
            fit_amplitude: 0.0,
            fit_offset: 0.0,
            chi2_per_dof: 1.0,
        }
    }

    #[test]
    fn two_sigma_convention() {
        let s = est(10.0, 1.0 / 2f64.sqrt());
        let r = est(10.0, 1.0 / 2f64.sqrt());
        assert!((excess_rate_limit(&s, &r, 0.95).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn negative_fluctuation_is_clipped() {
        let sigma = 1.0 / 2f64.sqrt();
        let l = RateLimit::from_estimates(&est(5.0, sigma), &est(10.0, sigma), 0.95).unwrap();
        assert!((l.sigma - 1.0).abs() < 1e-12);
        assert_eq!(l.point, -5.0);
        assert!((l.upper - 2.0).abs() < 1e-12);
        assert!((l.unclipped_upper() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_errors() {
        let v = excess_rate_limit(&est(13.0, 2.0), &est(10.0, 2.0), 0.95).unwrap();
        assert!((v - 8.657).abs() < 1e-3, "{v}");
    }

    #[test]
    fn other_confidence_levels() {
        assert!((z_for_confidence(0.6827).unwrap() - 1.0).abs() < 1e-3);
        assert!(z_for_confidence(1.0).is_err());
        assert!(excess_rate_limit(&est(f64::NAN, 1.0), &est(0.0, 1.0), 0.95).is_err());
    }

    fn chain() -> (MixingConfig, SensitivityCoefficients) {
        let spin = NvSpinModel::with_field(0.051).unwrap();
        let coeffs = spin
            .sensitivity_coefficients(&ScalingExponents::default(), Branch::EMinus)
            .unwrap();
        let omega_spin = spin.omega_transition(Branch::EMinus);
        let omega_phi = 2.0 * PI * 3e9;
        let cfg = MixingConfig {
            omega_spin,
            drive: MixerDrive {
                omega1: omega_phi - omega_spin,
                rabi_omega1: 2.0 * PI * 10e6,
                band: Band::Difference,
            },
            signal: SignalHypothesis { omega_phi, delta_s: 0.0, phase: 0.0 },
            noise: NoiseModel { gamma1: 100.0, gamma2: 2.0 * PI * 1e6 },
        };
        (cfg, coeffs)
    }

    #[test]
    fn zero_rate_gives_zero_limits() {
        let (cfg, k) = chain();
        let l = variation_upper_limit(0.0, &cfg, &k, 0.95).unwrap();
        assert_eq!((l.frac_variation_up_alpha, l.frac_variation_up_me), (0.0, 0.0));
    }

    #[test]
    fn limit_ratio_is_coefficient_ratio() {
        let (cfg, k) = chain();
        let l = variation_upper_limit(40.0, &cfg, &k, 0.95).unwrap();
        let ratio = l.frac_variation_up_me / l.frac_variation_up_alpha;
        assert!((ratio - k.k_alpha / k.k_me).abs() < 1e-12);
        assert!((ratio - 1.754).abs() < 0.001);
    }

    #[test]
    fn inversion_undoes_forward_chain() {
        let (cfg, k) = chain();
        let spin_shift = 1e-5 * k.k_alpha * cfg.omega_spin;
        let signal = SignalHypothesis { delta_s: spin_shift, ..cfg.signal };
        let rate = induced_relaxation_rate(effective_rabi(&signal, &cfg.drive).unwrap(), 0.0, &cfg.noise);
        let l = variation_upper_limit(rate, &cfg, &k, 0.95).unwrap();
        // Small-argument inversion of J₁ at index ~1e-5.
        assert!((l.frac_variation_up_alpha / 1e-5 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn scaling_chain_by_doubling() {
        let (cfg, k) = chain();
        let base = variation_upper_limit(10.0, &cfg, &k, 0.95).unwrap().frac_energy_up;
        let quad = variation_upper_limit(40.0, &cfg, &k, 0.95).unwrap().frac_energy_up;
        assert!((quad / base - 2.0).abs() < 1e-12);

        let mut hi = cfg;
        hi.signal.omega_phi *= 2.0;
        hi.drive.omega1 = hi.signal.omega_phi - hi.omega_spin;
        let f = variation_upper_limit(10.0, &hi, &k, 0.95).unwrap().frac_energy_up;
        assert!((f / base - 2.0).abs() < 1e-12);

        let mut strong = cfg;
        strong.drive.rabi_omega1 *= 2.0;
        let f = variation_upper_limit(10.0, &strong, &k, 0.95).unwrap().frac_energy_up;
        assert!((f / base - 0.5).abs() < 1e-12);
    }

    #[test]
    fn off_resonance_penalty_is_exact() {
        let (cfg, k) = chain();
        let mut off = cfg;
        let d = 1.3 * cfg.noise.gamma2;
        off.drive.omega1 -= d;
        let on = variation_upper_limit(10.0, &cfg, &k, 0.95).unwrap().frac_energy_up;
        let detuned = variation_upper_limit(10.0, &off, &k, 0.95).unwrap().frac_energy_up;
        let expected = (off.detuning().powi(2) / (2.0 * cfg.noise.gamma2.powi(2))).exp();
        assert!((detuned / on / expected - 1.0).abs() < 1e-12);
        assert!((off.detuning().abs() - d).abs() < 1e-3);
    }

    #[test]
    fn huge_rate_breaks_inversion() {
        let (cfg, k) = chain();
        let err = variation_upper_limit(1e13, &cfg, &k, 0.95).unwrap_err();
        assert!(matches!(err, InferenceError::SidebandInversionInvalid(_)));
    }
}
