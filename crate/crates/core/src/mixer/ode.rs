// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! Embedded Dormand–Prince 5(4) integrator with step-size control.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {0:.6e}")]
    StepUnderflow(f64),
    #[error("exceeded {0} steps")]
    TooManySteps(u64),
    #[error("non-finite state at t = {0:.6e}")]
    NonFinite(f64),
    #[error("output times must be increasing and start at or after t0")]
    BadOutputTimes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: u64,
    /// Components entering the error norm; all of them when `None`.
    pub norm_indices: Option<Vec<usize>>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            max_step: f64::INFINITY,
            max_steps: 200_000_000,
            norm_indices: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: u64,
    pub rejected: u64,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub struct DormandPrince {
    opts: OdeOptions,
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    next: Vec<f64>,
    err: Vec<f64>,
}

impl DormandPrince {
    pub fn new(dim: usize, opts: OdeOptions) -> Self {
        Self {
            opts,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            stage: vec![0.0; dim],
            next: vec![0.0; dim],
            err: vec![0.0; dim],
        }
    }

    /// Integrates `y' = rhs(t, y)` from `t0`, calling `observe(i, t, y)` exactly
    /// at every `t_out[i]`. `y` holds the state at the last output time on return.
    pub fn integrate<F, O>(
        &mut self,
        mut rhs: F,
        t0: f64,
        y: &mut [f64],
        t_out: &[f64],
        mut observe: O,
    ) -> Result<OdeStats, OdeError>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        O: FnMut(usize, f64, &[f64]) -> bool,
    {
        let n = y.len();
        if t_out.windows(2).any(|w| w[1] <= w[0]) || t_out.first().is_some_and(|&t| t < t0) {
            return Err(OdeError::BadOutputTimes);
        }
        let mut stats = OdeStats::default();
        let mut t = t0;
        let span = t_out.last().map_or(0.0, |&t1| t1 - t0);
        let mut h = (span / 100.0).min(self.opts.max_step).max(f64::MIN_POSITIVE);
        rhs(t, y, &mut self.k[0]);

        for (i, &target) in t_out.iter().enumerate() {
            while t < target {
                if stats.accepted + stats.rejected >= self.opts.max_steps {
                    return Err(OdeError::TooManySteps(self.opts.max_steps));
                }
                let remaining = target - t;
                let last = h >= remaining;
                let step = if last { remaining } else { h };
                if step <= 1e-14 * t.abs().max(1.0) && !last {
                    return Err(OdeError::StepUnderflow(t));
                }

                for s in 1..7 {
                    for j in 0..n {
                        let mut acc = 0.0;
                        for (r, a) in A[s][..s].iter().enumerate() {
                            acc += a * self.k[r][j];
                        }
                        self.stage[j] = y[j] + step * acc;
                    }
                    rhs(t + C[s] * step, &self.stage, &mut self.k[s]);
                }
                // The seventh stage was evaluated at the fifth-order solution.
                self.next.copy_from_slice(&self.stage);
                for j in 0..n {
                    let mut acc = 0.0;
                    for (r, e) in E.iter().enumerate() {
                        acc += e * self.k[r][j];
                    }
                    self.err[j] = step * acc;
                }
                let norm = self.error_norm(y);
                if !norm.is_finite() {
                    return Err(OdeError::NonFinite(t));
                }
                if norm <= 1.0 {
                    t = if last { target } else { t + step };
                    y.copy_from_slice(&self.next);
                    self.k.swap(0, 6);
                    stats.accepted += 1;
                    let grow = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                    if !last || grow < 1.0 {
                        h = (step * grow).min(self.opts.max_step);
                    }
                } else {
                    stats.rejected += 1;
                    h = step * (0.9 * norm.powf(-0.2)).clamp(0.1, 1.0);
                }
            }
            if !observe(i, t, y) {
                break;
            }
        }
        Ok(stats)
    }

    fn error_norm(&self, y: &[f64]) -> f64 {
        let scale = |j: usize| {
            let e = self.err[j] / (self.opts.atol + self.opts.rtol * y[j].abs().max(self.next[j].abs()));
            e * e
        };
        let (sum, count) = match &self.opts.norm_indices {
            Some(idx) => (idx.iter().map(|&j| scale(j)).sum::<f64>(), idx.len()),
            None => ((0..y.len()).map(scale).sum::<f64>(), y.len()),
        };
        (sum / count.max(1) as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_accurate() {
        let mut dp = DormandPrince::new(1, OdeOptions::default());
        let mut y = [1.0];
        let times: Vec<f64> = (1..=10).map(|i| i as f64 * 0.5).collect();
        let mut seen = Vec::new();
        dp.integrate(
            |_, y, dy| dy[0] = -0.7 * y[0],
            0.0,
            &mut y,
            &times,
            |_, t, y| {
                seen.push((t, y[0]));
                true
            },
        )
        .unwrap();
        assert_eq!(seen.len(), 10);
        for (t, v) in seen {
            assert!((v - (-0.7 * t).exp()).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn harmonic_oscillator_with_capped_step() {
        let opts = OdeOptions { max_step: 0.05, ..Default::default() };
        let mut dp = DormandPrince::new(2, opts);
        let mut y = [1.0, 0.0];
        let w = 3.0;
        let stats = dp
            .integrate(
                |_, y, dy| {
                    dy[0] = y[1];
                    dy[1] = -w * w * y[0];
                },
                0.0,
                &mut y,
                &[20.0],
                |_, _, _| true,
            )
            .unwrap();
        assert!((y[0] - (w * 20.0).cos()).abs() < 1e-7);
        assert!(stats.accepted >= 400);
    }

    #[test]
    fn rejects_unsorted_output_times() {
        let mut dp = DormandPrince::new(1, OdeOptions::default());
        let mut y = [1.0];
        let r = dp.integrate(|_, _, dy| dy[0] = 0.0, 0.0, &mut y, &[1.0, 0.5], |_, _, _| true);
        assert_eq!(r, Err(OdeError::BadOutputTimes));
    }
}
