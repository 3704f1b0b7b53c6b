// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! Density-matrix propagation of the driven, modulated two-level system
//! {m_s = 0, m_s = −1}:
//!
//! H(t)/ħ = ½[ω_s + δ_s cos(ω_φ t + θ)]σ_z + Ω₁ cos(ω₁ t)σ_x
//!
//! Each density matrix is stored as an unnormalized Bloch vector
//! ρ = ½(w + xσ_x + yσ_y + zσ_z), so the equations of motion are real.
//!
//! Dephasing comes in two flavours. [`DephasingModel::Lindblad`] is the
//! Markovian channel, which gives a Lorentzian line of half width Γ₂.
//! [`DephasingModel::SpectralDiffusion`] splits the spin into frequency
//! classes with a Gaussian distribution of standard deviation Γ₂ and lets each
//! class jump to a freshly drawn detuning at rate κ (strong-collision model).
//! For Ω_eff ≪ κ ≪ Γ₂ the population relaxes exponentially at the golden-rule
//! rate of a Gaussian line, which is what the analytic rate model assumes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ode::{DormandPrince, OdeOptions};
use super::schedule::rotating_frame_sign;
use super::trace::PopulationTrace;
use super::{MixerDrive, MixerError, MixingConfig, NoiseModel, SignalHypothesis};
use crate::spin::{Branch, NvSpinModel};

/// Default κ/Γ₂ for the spectral-diffusion model.
pub const DEFAULT_HOP_FRACTION: f64 = 0.1;
const MIN_STEPS_PER_PERIOD: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DephasingModel {
    /// Markovian pure dephasing; coherences decay at Γ₂ in total.
    Lindblad,
    /// Gaussian frequency classes (σ = Γ₂) with redistribution rate
    /// κ = `hop_fraction`·Γ₂. Classes cover ±`span_sigmas`·Γ₂ with spacing
    /// `spacing`·κ.
    SpectralDiffusion {
        hop_fraction: f64,
        span_sigmas: f64,
        spacing: f64,
    },
}

impl Default for DephasingModel {
    fn default() -> Self {
        DephasingModel::SpectralDiffusion {
            hop_fraction: DEFAULT_HOP_FRACTION,
            span_sigmas: 3.5,
            spacing: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    #[default]
    Lab,
    /// Frame co-rotating with the circular drive component that carries the
    /// resonant mixing product; the other component (at 2ω₁ in this frame) is
    /// dropped.
    Rotating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationOptions {
    pub frame: Frame,
    pub dephasing: DephasingModel,
    /// Integrator steps per period of the fastest carrier.
    pub steps_per_period: f64,
    /// Explicit cap on the step; must itself resolve the fastest carrier.
    pub max_step: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    /// Allowed excursion of populations outside [0, 1] and of the trace from 1.
    pub tolerance: f64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            frame: Frame::Lab,
            dephasing: DephasingModel::default(),
            steps_per_period: MIN_STEPS_PER_PERIOD,
            max_step: None,
            rtol: 1e-8,
            atol: 1e-10,
            tolerance: 1e-6,
        }
    }
}

struct FrequencyClasses {
    offsets: Vec<f64>,
    weights: Vec<f64>,
    hop_rate: f64,
    pure_dephasing: f64,
}

impl FrequencyClasses {
    fn build(noise: &NoiseModel, model: &DephasingModel) -> Result<Self, MixerError> {
        let single = |pure_dephasing| Self {
            offsets: vec![0.0],
            weights: vec![1.0],
            hop_rate: 0.0,
            pure_dephasing,
        };
        if noise.gamma2 == 0.0 {
            return Ok(single(0.0));
        }
        match *model {
            DephasingModel::Lindblad => {
                let pure = noise.gamma2 - noise.gamma1;
                if pure < 0.0 {
                    return Err(MixerError::InvalidConfig(format!(
                        "Lindblad dephasing needs gamma2 ≥ gamma1 ({} < {})",
                        noise.gamma2, noise.gamma1
                    )));
                }
                Ok(single(pure))
            }
            DephasingModel::SpectralDiffusion {
                hop_fraction,
                span_sigmas,
                spacing,
            } => {
                if !(hop_fraction > 0.0 && span_sigmas > 0.0 && spacing > 0.0) {
                    return Err(MixerError::InvalidConfig(
                        "spectral diffusion parameters must be positive".into(),
                    ));
                }
                let sigma = noise.gamma2;
                let hop_rate = hop_fraction * sigma;
                let half = (span_sigmas / (hop_fraction * spacing)).ceil() as usize;
                let step = span_sigmas * sigma / half as f64;
                let offsets: Vec<f64> = (0..=2 * half)
                    .map(|k| (k as f64 - half as f64) * step)
                    .collect();
                let mut weights: Vec<f64> = offsets
                    .iter()
                    .map(|d| (-d * d / (2.0 * sigma * sigma)).exp())
                    .collect();
                let norm: f64 = weights.iter().sum();
                weights.iter_mut().for_each(|w| *w /= norm);
                Ok(Self {
                    offsets,
                    weights,
                    hop_rate,
                    pure_dephasing: 0.0,
                })
            }
        }
    }

    fn max_offset(&self) -> f64 {
        self.offsets.iter().fold(0.0f64, |m, d| m.max(d.abs()))
    }
}

/// Propagates the m_s = 0 population of `spin`'s E_- transition.
pub fn propagate_mixing(
    spin: &NvSpinModel,
    drive: &MixerDrive,
    signal: &SignalHypothesis,
    noise: &NoiseModel,
    duration: f64,
    n_samples: usize,
    opts: &PropagationOptions,
) -> Result<PopulationTrace, MixerError> {
    let config = MixingConfig {
        omega_spin: spin.omega_transition(Branch::EMinus),
        drive: *drive,
        signal: *signal,
        noise: *noise,
    };
    propagate_config(&config, duration, n_samples, opts)
}

/// Same as [`propagate_mixing`] with the spin transition given directly.
pub fn propagate_config(
    config: &MixingConfig,
    duration: f64,
    n_samples: usize,
    opts: &PropagationOptions,
) -> Result<PopulationTrace, MixerError> {
    config.validate()?;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(MixerError::InvalidConfig(format!(
            "duration must be positive, got {duration}"
        )));
    }
    if n_samples < 2 {
        return Err(MixerError::InvalidConfig(format!(
            "need at least 2 samples, got {n_samples}"
        )));
    }

    let MixingConfig {
        omega_spin,
        drive,
        signal,
        noise,
    } = *config;
    let classes = FrequencyClasses::build(&noise, &opts.dephasing)?;

    let splitting = match opts.frame {
        Frame::Lab => omega_spin,
        Frame::Rotating => {
            omega_spin - rotating_frame_sign(signal.omega_phi, drive.omega1, omega_spin) * drive.omega1
        }
    };
    let spread = signal.delta_s + classes.max_offset();
    let carrier = match opts.frame {
        Frame::Lab => signal
            .omega_phi
            .max(drive.omega1)
            .max(splitting.abs() + spread),
        Frame::Rotating => signal.omega_phi.max(splitting.abs() + spread),
    };
    let required = 2.0 * PI / (carrier * MIN_STEPS_PER_PERIOD);
    let steps = opts.steps_per_period.max(MIN_STEPS_PER_PERIOD);
    let mut max_step = 2.0 * PI / (carrier * steps);
    if let Some(requested) = opts.max_step {
        if requested > required || opts.steps_per_period < MIN_STEPS_PER_PERIOD {
            return Err(MixerError::StepSizeTooCoarse {
                requested,
                required,
                carrier,
            });
        }
        max_step = max_step.min(requested);
    } else if opts.steps_per_period < MIN_STEPS_PER_PERIOD {
        return Err(MixerError::StepSizeTooCoarse {
            requested: 2.0 * PI / (carrier * opts.steps_per_period),
            required,
            carrier,
        });
    }

    let n_classes = classes.offsets.len();
    let dim = 4 * n_classes;
    let mut state = vec![0.0; dim];
    for (k, &p) in classes.weights.iter().enumerate() {
        state[4 * k] = p;
        state[4 * k + 3] = -p;
    }

    let ode_opts = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        max_step,
        norm_indices: Some((0..n_classes).map(|k| 4 * k + 3).collect()),
        ..Default::default()
    };
    let times: Vec<f64> = (0..n_samples)
        .map(|i| duration * i as f64 / (n_samples - 1) as f64)
        .collect();

    let gamma1 = noise.gamma1;
    let transverse = gamma1 + classes.pure_dephasing;
    let hop = classes.hop_rate;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let hx = match opts.frame {
            Frame::Lab => 2.0 * drive.rabi_omega1 * (drive.omega1 * t).cos(),
            Frame::Rotating => drive.rabi_omega1,
        };
        let hz0 = splitting + signal.delta_s * (signal.omega_phi * t + signal.phase).cos();
        let mut total = [0.0; 4];
        if hop > 0.0 {
            for c in y.chunks_exact(4) {
                for (acc, v) in total.iter_mut().zip(c) {
                    *acc += v;
                }
            }
        }
        for (k, (c, d)) in y.chunks_exact(4).zip(dy.chunks_exact_mut(4)).enumerate() {
            let (w, x, yy, z) = (c[0], c[1], c[2], c[3]);
            let hz = hz0 + classes.offsets[k];
            d[0] = 0.0;
            d[1] = -hz * yy - transverse * x;
            d[2] = hz * x - hx * z - transverse * yy;
            d[3] = hx * yy - 2.0 * gamma1 * z;
            if hop > 0.0 {
                let p = classes.weights[k];
                d[0] += hop * (p * total[0] - w);
                d[1] += hop * (p * total[1] - x);
                d[2] += hop * (p * total[2] - yy);
                d[3] += hop * (p * total[3] - z);
            }
        }
    };

    let mut populations = Vec::with_capacity(n_samples);
    let mut traces = Vec::with_capacity(n_samples);
    let mut diverged = None;
    let mut solver = DormandPrince::new(dim, ode_opts);
    solver.integrate(rhs, 0.0, &mut state, &times, |_, t, y| {
        match check_sample(t, y, opts.tolerance) {
            Ok((population, trace)) => {
                populations.push(population);
                traces.push(trace);
                true
            }
            Err(e) => {
                diverged = Some(e);
                false
            }
        }
    })?;
    if let Some(err) = diverged {
        return Err(err);
    }

    Ok(PopulationTrace {
        times,
        populations,
        traces,
        meta: *config,
    })
}

/// Population of the initial state and total trace, or `SolverDiverged`.
fn check_sample(t: f64, y: &[f64], tol: f64) -> Result<(f64, f64), MixerError> {
    let (trace, zsum) = y
        .chunks_exact(4)
        .fold((0.0, 0.0), |(w, z), c| (w + c[0], z + c[3]));
    let population = 0.5 * (trace - zsum);
    if population >= -tol && population <= 1.0 + tol && (trace - 1.0).abs() <= tol {
        Ok((population, trace))
    } else {
        Err(MixerError::SolverDiverged {
            time: t,
            population,
            trace,
        })
    }
}
