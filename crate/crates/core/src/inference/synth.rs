// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! Poisson photon-count synthesis for closed-loop tests and synthetic sweeps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::fit::invert3;
use super::DecayRecord;

/// Measurement protocol shared by signal and reference records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDesign {
    pub wait_times: Vec<f64>,
    pub shots: u64,
    /// Fractional fluorescence drop between t = 0 and full relaxation.
    pub contrast: f64,
    /// Mean photon counts per shot at t = 0.
    pub baseline_rate: f64,
}

impl MeasurementDesign {
    /// `n` wait times log-spaced over [`t_min`, `t_max`].
    pub fn log_spaced(n: usize, t_min: f64, t_max: f64, shots: u64, contrast: f64, baseline_rate: f64) -> Self {
        let wait_times = (0..n)
            .map(|i| (t_min.ln() + (t_max / t_min).ln() * i as f64 / (n.max(2) - 1) as f64).exp())
            .collect();
        Self {
            wait_times,
            shots,
            contrast,
            baseline_rate,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.contrast > 0.0 && self.contrast <= 1.0) {
            return Err(format!("contrast must be in (0, 1], got {}", self.contrast));
        }
        if self.shots == 0 {
            return Err("shots must be positive".into());
        }
        if !(self.baseline_rate.is_finite() && self.baseline_rate > 0.0) {
            return Err(format!("baseline rate must be positive, got {}", self.baseline_rate));
        }
        if self.wait_times.len() < 4 || self.wait_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err("need ≥ 4 strictly increasing wait times".into());
        }
        Ok(())
    }

    /// Expected counts per shot for decay constant `gamma_total`.
    pub fn expected_per_shot(&self, gamma_total: f64, t: f64) -> f64 {
        self.baseline_rate * (1.0 - self.contrast * (1.0 - (-gamma_total * t).exp()))
    }

    pub fn synthesize(&self, gamma_total: f64, seed: u64) -> DecayRecord {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shots = self.shots as f64;
        let counts = self
            .wait_times
            .iter()
            .map(|&t| {
                let mean = shots * self.expected_per_shot(gamma_total, t);
                if mean <= 0.0 {
                    return 0;
                }
                // `Poisson::new` only fails for non-positive or non-finite means.
                Poisson::new(mean).map_or(0, |p| p.sample(&mut rng) as u64)
            })
            .collect();
        DecayRecord {
            wait_times: self.wait_times.clone(),
            counts,
            shots: vec![self.shots; self.wait_times.len()],
            reference_counts_bright: Some(self.baseline_rate),
            reference_counts_dark: Some(self.baseline_rate * (1.0 - 2.0 * self.contrast)),
        }
    }

    /// Cramér–Rao standard error of the fitted decay constant.
    pub fn fisher_rate_sigma(&self, gamma_total: f64) -> f64 {
        let a = self.baseline_rate * self.contrast;
        let shots = self.shots as f64;
        let mut info = [[0.0; 3]; 3];
        for &t in &self.wait_times {
            let e = (-gamma_total * t).exp();
            let j = [e, -a * t * e, 1.0];
            let var = self.expected_per_shot(gamma_total, t) / shots;
            for r in 0..3 {
                for c in 0..3 {
                    info[r][c] += j[r] * j[c] / var;
                }
            }
        }
        invert3(&info).map_or(f64::INFINITY, |cov| cov[1][1].sqrt())
    }
}

/// Free-function form of [`MeasurementDesign::synthesize`].
pub fn synthesize_measurement(
    true_gamma_total: f64,
    contrast: f64,
    baseline_rate: f64,
    wait_times: &[f64],
    shots: u64,
    seed: u64,
) -> Result<DecayRecord, String> {
    let design = MeasurementDesign {
        wait_times: wait_times.to_vec(),
        shots,
        contrast,
        baseline_rate,
    };
    design.validate()?;
    Ok(design.synthesize(true_gamma_total, seed))
}
