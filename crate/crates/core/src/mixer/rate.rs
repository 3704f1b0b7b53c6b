// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use super::{bessel_j1, MixerDrive, MixerError, NoiseModel, SignalHypothesis};

/// Modulation index below which J₁(x) ≈ x/2 holds to 1%.
pub const SMALL_ARGUMENT_LIMIT: f64 = 0.28;

/// Effective Rabi frequency of the first mixing sideband, Ω₁·J₁(δ_s/ω_φ).
pub fn effective_rabi(signal: &SignalHypothesis, drive: &MixerDrive) -> Result<f64, MixerError> {
    let beta = signal.modulation_index();
    if !(beta < 1.0) {
        return Err(MixerError::SidebandExpansionInvalid(beta));
    }
    Ok(drive.rabi_omega1 * bessel_j1(beta))
}

/// Gaussian response exp(−Δω²/(2Γ₂²)).
pub fn lineshape_factor(detuning: f64, gamma2: f64) -> f64 {
    (-detuning * detuning / (2.0 * gamma2 * gamma2)).exp()
}

/// γ_φ = √(π/2)·Ω_eff²/(2Γ₂)·exp(−Δω²/(2Γ₂²)).
///
/// This is the golden-rule rate for a unit-area Gaussian line of standard
/// deviation Γ₂. Per-direction convention, see the module docs.
pub fn induced_relaxation_rate(omega_eff: f64, detuning: f64, noise: &NoiseModel) -> f64 {
    if omega_eff == 0.0 {
        return 0.0;
    }
    (PI / 2.0).sqrt() * omega_eff * omega_eff / (2.0 * noise.gamma2)
        * lineshape_factor(detuning, noise.gamma2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InducedRate {
    pub gamma_phi: f64,
    /// Ω_eff ≥ Γ₂: the drive is coherent and the rate equation is outside
    /// its regime of validity.
    pub coherent_regime: bool,
}

/// [`induced_relaxation_rate`] plus the coherent-regime flag.
pub fn induced_relaxation_rate_checked(
    omega_eff: f64,
    detuning: f64,
    noise: &NoiseModel,
) -> InducedRate {
    let coherent_regime = omega_eff >= noise.gamma2;
    if coherent_regime {
        log::warn!(
            "effective Rabi {:.3e} rad/s exceeds linewidth {:.3e} rad/s; rate model not valid",
            omega_eff,
            noise.gamma2
        );
    }
    InducedRate {
        gamma_phi: induced_relaxation_rate(omega_eff, detuning, noise),
        coherent_regime,
    }
}
