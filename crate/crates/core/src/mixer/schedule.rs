// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

use super::{Band, MixerError};

/// Bias-drive frequency ω₁ that puts the first-order mixing product of the
/// signal and the drive on the spin transition.
///
/// `rabi_omega1` is only used to reject difference-band requests where the
/// signal already sits within a Rabi linewidth of the transition.
pub fn mixing_schedule(
    omega_phi: f64,
    omega_spin: f64,
    band: Band,
    rabi_omega1: f64,
) -> Result<f64, MixerError> {
    match band {
        Band::Sum => Ok(omega_phi + omega_spin),
        Band::Difference => {
            let gap = (omega_phi - omega_spin).abs();
            if gap < rabi_omega1 || gap == 0.0 {
                return Err(MixerError::DegenerateMixing {
                    omega_phi,
                    omega_spin,
                });
            }
            Ok(gap)
        }
    }
}

/// Mismatch Δω between the mixing product selected by `band` and the spin
/// transition. Zero when `omega1` comes from [`mixing_schedule`].
pub fn sideband_detuning(omega_phi: f64, omega1: f64, omega_spin: f64, band: Band) -> f64 {
    let product = match band {
        Band::Sum => omega1 - omega_phi,
        Band::Difference if omega_phi > omega_spin => omega_phi - omega1,
        Band::Difference => omega_phi + omega1,
    };
    product - omega_spin
}

/// Sign s of the drive's circular component that carries the resonant mixing
/// product: the frame rotating at s·ω₁ leaves a residual splitting
/// ω_s − s·ω₁ closest to ±ω_φ.
pub fn rotating_frame_sign(omega_phi: f64, omega1: f64, omega_spin: f64) -> f64 {
    let miss = |s: f64| ((omega_spin - s * omega1).abs() - omega_phi).abs();
    if miss(1.0) <= miss(-1.0) {
        1.0
    } else {
        -1.0
    }
}
