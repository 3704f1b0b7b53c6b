// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;

use super::MixingConfig;
use crate::inference::{fit_exponential, FitError};

/// Population of the initialized spin state sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    pub populations: Vec<f64>,
    /// Total density-matrix trace at each sample.
    pub traces: Vec<f64>,
    pub meta: MixingConfig,
}

/// Exponential relaxation fitted to a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceDecay {
    /// λ in P(t) = A·exp(−λt) + C.
    pub decay_constant: f64,
    /// λ/2, the per-direction transition rate.
    pub transition_rate: f64,
    /// λ/2 − Γ₁, the rate attributable to the drive and signal.
    pub excess_rate: f64,
    pub amplitude: f64,
    pub offset: f64,
}

impl PopulationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_trace_error(&self) -> f64 {
        self.traces
            .iter()
            .fold(0.0f64, |m, tr| m.max((tr - 1.0).abs()))
    }

    /// Unweighted fit of A·exp(−λt) + C over the samples with t ≥ `t_start`.
    pub fn fit_decay_from(&self, t_start: f64) -> Result<TraceDecay, FitError> {
        let (t, y): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.populations)
            .filter(|(t, _)| **t >= t_start)
            .map(|(t, p)| (*t, *p))
            .unzip();
        let w = vec![1.0; t.len()];
        let fit = fit_exponential(&t, &y, &w)?;
        let transition_rate = 0.5 * fit.rate;
        Ok(TraceDecay {
            decay_constant: fit.rate,
            transition_rate,
            excess_rate: transition_rate - self.meta.noise.gamma1,
            amplitude: fit.amplitude,
            offset: fit.offset,
        })
    }

    pub fn fit_decay(&self) -> Result<TraceDecay, FitError> {
        self.fit_decay_from(0.0)
    }

    /// CSV with header `t_s,population`, 15 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t_s,population")?;
        for (t, p) in self.times.iter().zip(&self.populations) {
            writeln!(out, "{t:.14e},{p:.14e}")?;
        }
        out.flush()
    }
}
