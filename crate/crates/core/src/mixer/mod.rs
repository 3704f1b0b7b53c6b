// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum-mixing detection model.
//!
//! A bias drive at ω₁ mixes with an oscillation of the spin splitting at ω_φ.
//! When ω₁ is scheduled so that a first-order sideband lands on the spin
//! transition, the oscillation shows up as an excess relaxation rate γ_φ.
//!
//! Rate convention: every rate in this module (Γ₁, γ_φ) is a per-direction
//! transition rate. The population of the initial state relaxes towards ½ as
//! `½ + ½·exp(−2(Γ₁ + γ_φ)t)`, so a fitted exponential decay constant is twice
//! the rate reported here.

mod bessel;
mod ode;
mod propagate;
mod rate;
mod schedule;
mod trace;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bessel::{bessel_j, bessel_j1};
pub use ode::{DormandPrince, OdeError, OdeOptions};
pub use propagate::{
    propagate_config, propagate_mixing, DephasingModel, Frame, PropagationOptions,
    DEFAULT_HOP_FRACTION,
};
pub use rate::{
    effective_rabi, induced_relaxation_rate, induced_relaxation_rate_checked, lineshape_factor,
    InducedRate, SMALL_ARGUMENT_LIMIT,
};
pub use schedule::{mixing_schedule, rotating_frame_sign, sideband_detuning};
pub use trace::{PopulationTrace, TraceDecay};

/// Drive/spin ratio above which the rotating-wave picture is considered shaky.
pub const DRIVE_RATIO_WARNING: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MixerError {
    #[error("invalid mixing configuration: {0}")]
    InvalidConfig(String),
    #[error("signal at {omega_phi:.6e} rad/s is within Ω₁ of the spin transition {omega_spin:.6e} rad/s; drive it directly")]
    DegenerateMixing { omega_phi: f64, omega_spin: f64 },
    #[error("modulation index δ_s/ω_φ = {0:.4} is outside the sideband expansion")]
    SidebandExpansionInvalid(f64),
    #[error("max step {requested:.3e} s does not resolve the {carrier:.3e} rad/s carrier (need ≤ {required:.3e} s)")]
    StepSizeTooCoarse {
        requested: f64,
        required: f64,
        carrier: f64,
    },
    #[error("solver diverged at t = {time:.6e}: population {population:.9}, trace {trace:.9}")]
    SolverDiverged {
        time: f64,
        population: f64,
        trace: f64,
    },
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Which first-order mixing product is tuned onto the spin transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    /// ω₁ = |ω_φ − ω_s|
    #[default]
    Difference,
    /// ω₁ = ω_φ + ω_s
    Sum,
}

/// Bias a.c. drive. Angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixerDrive {
    pub omega1: f64,
    /// Ω₁; zero describes an undriven reference measurement.
    pub rabi_omega1: f64,
    pub band: Band,
}

impl MixerDrive {
    pub fn validate(&self) -> Result<(), MixerError> {
        if !(self.omega1.is_finite() && self.omega1 > 0.0) {
            return Err(MixerError::InvalidConfig(format!(
                "drive frequency must be positive, got {}",
                self.omega1
            )));
        }
        if !(self.rabi_omega1.is_finite() && self.rabi_omega1 >= 0.0) {
            return Err(MixerError::InvalidConfig(format!(
                "drive strength must be non-negative, got {}",
                self.rabi_omega1
            )));
        }
        if self.rabi_omega1 > DRIVE_RATIO_WARNING * self.omega1 {
            log::warn!(
                "drive strength {:.3e} exceeds {} of the drive frequency {:.3e}",
                self.rabi_omega1,
                DRIVE_RATIO_WARNING,
                self.omega1
            );
        }
        Ok(())
    }
}

/// Oscillation of the spin splitting, δ_s·cos(ω_φ t + θ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalHypothesis {
    pub omega_phi: f64,
    pub delta_s: f64,
    pub phase: f64,
}

impl SignalHypothesis {
    pub fn modulation_index(&self) -> f64 {
        self.delta_s / self.omega_phi
    }

    pub fn validate(&self) -> Result<(), MixerError> {
        if !(self.omega_phi.is_finite() && self.omega_phi > 0.0) {
            return Err(MixerError::InvalidConfig(format!(
                "signal frequency must be positive, got {}",
                self.omega_phi
            )));
        }
        if !(self.delta_s.is_finite() && self.delta_s >= 0.0) || !self.phase.is_finite() {
            return Err(MixerError::InvalidConfig(format!(
                "signal amplitude must be non-negative, got {}",
                self.delta_s
            )));
        }
        let beta = self.modulation_index();
        if beta >= 1.0 {
            return Err(MixerError::SidebandExpansionInvalid(beta));
        }
        Ok(())
    }
}

/// Baseline relaxation Γ₁ (per-direction, s⁻¹) and linewidth Γ₂ (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub gamma1: f64,
    pub gamma2: f64,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<(), MixerError> {
        if !(self.gamma1.is_finite() && self.gamma1 >= 0.0) {
            return Err(MixerError::InvalidConfig(format!(
                "gamma1 must be non-negative, got {}",
                self.gamma1
            )));
        }
        if !(self.gamma2.is_finite() && self.gamma2 >= 0.5 * self.gamma1) {
            return Err(MixerError::InvalidConfig(format!(
                "gamma2 = {} must be at least gamma1/2 = {}",
                self.gamma2,
                0.5 * self.gamma1
            )));
        }
        Ok(())
    }
}

/// Everything needed to describe one detection point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingConfig {
    /// Spin transition ω_s in rad/s.
    pub omega_spin: f64,
    pub drive: MixerDrive,
    pub signal: SignalHypothesis,
    pub noise: NoiseModel,
}

impl MixingConfig {
    pub fn validate(&self) -> Result<(), MixerError> {
        if !(self.omega_spin.is_finite() && self.omega_spin > 0.0) {
            return Err(MixerError::InvalidConfig(format!(
                "spin transition must be positive, got {}",
                self.omega_spin
            )));
        }
        self.drive.validate()?;
        self.signal.validate()?;
        self.noise.validate()
    }

    /// Δω between the scheduled mixing product and the spin transition.
    pub fn detuning(&self) -> f64 {
        sideband_detuning(
            self.signal.omega_phi,
            self.drive.omega1,
            self.omega_spin,
            self.drive.band,
        )
    }

    /// Analytic excess rate γ_φ for this configuration.
    pub fn analytic_rate(&self) -> Result<InducedRate, MixerError> {
        let omega_eff = effective_rabi(&self.signal, &self.drive)?;
        Ok(induced_relaxation_rate_checked(
            omega_eff,
            self.detuning(),
            &self.noise,
        ))
    }
}
