// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! Weighted least squares for A·exp(−Γt) + C.
//!
//! For fixed Γ the model is linear in (A, C), so the search runs over Γ alone
//! (log grid, then golden section) and finishes with Gauss–Newton steps on all
//! three parameters. Standard errors come from (JᵀWJ)⁻¹ at the optimum.

use super::{DecayRecord, FitError};

const GRID_POINTS: usize = 240;
const GOLDEN_ITERS: usize = 200;
const POLISH_ITERS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub amplitude: f64,
    pub rate: f64,
    pub offset: f64,
    /// Covariance of (amplitude, rate, offset).
    pub covariance: [[f64; 3]; 3],
    pub chi2: f64,
    pub dof: usize,
}

impl ExponentialFit {
    pub fn rate_sigma(&self) -> f64 {
        self.covariance[1][1].sqrt()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (-self.rate * t).exp() + self.offset
    }
}

/// Decay constant of a relaxation measurement with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub rate: f64,
    pub sigma: f64,
    /// Counts per shot.
    pub fit_amplitude: f64,
    /// Counts per shot.
    pub fit_offset: f64,
    pub chi2_per_dof: f64,
}

impl RateEstimate {
    /// Halves rate and error: fluorescence decay constant → per-direction rate.
    pub fn transition_rate(&self) -> RateEstimate {
        RateEstimate {
            rate: 0.5 * self.rate,
            sigma: 0.5 * self.sigma,
            ..*self
        }
    }
}

/// Fits the record's counts per shot with Poisson weights.
pub fn fit_relaxation(record: &DecayRecord) -> Result<RateEstimate, FitError> {
    record.validate().map_err(FitError::InvalidInput)?;
    if record.counts.windows(2).all(|w| w[0] == w[1]) {
        return Err(FitError::DegenerateData("all counts are equal".into()));
    }
    let y = record.rates_per_shot();
    let weights: Vec<f64> = record
        .counts
        .iter()
        .zip(&record.shots)
        .map(|(&c, &s)| {
            let s = s as f64;
            s * s / (c.max(1) as f64)
        })
        .collect();
    let fit = fit_exponential(&record.wait_times, &y, &weights)?;
    Ok(RateEstimate {
        rate: fit.rate,
        sigma: fit.rate_sigma(),
        fit_amplitude: fit.amplitude,
        fit_offset: fit.offset,
        chi2_per_dof: fit.chi2 / fit.dof.max(1) as f64,
    })
}

/// Weighted fit of y ≈ A·exp(−Γt) + C with weights 1/σ².
pub fn fit_exponential(t: &[f64], y: &[f64], weights: &[f64]) -> Result<ExponentialFit, FitError> {
    let n = t.len();
    if y.len() != n || weights.len() != n {
        return Err(FitError::InvalidInput("length mismatch".into()));
    }
    if n < 4 {
        return Err(FitError::InvalidInput(format!("need ≥ 4 points, got {n}")));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) || y.iter().any(|v| !v.is_finite()) {
        return Err(FitError::InvalidInput("non-finite data or weights".into()));
    }
    if y.windows(2).all(|w| w[0] == w[1]) {
        return Err(FitError::DegenerateData("all values are equal".into()));
    }
    let t_min = t.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_max = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = t_max - t_min;
    if !(span > 0.0) {
        return Err(FitError::InvalidInput("times do not span an interval".into()));
    }
    let shortest = t
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .filter(|d| *d > 0.0)
        .fold(span, f64::min);

    // Work in shifted time so exp() stays well scaled.
    let ts: Vec<f64> = t.iter().map(|v| v - t_min).collect();
    let problem = Problem { t: &ts, y, w: weights };

    let lo = (1e-3 / span).ln();
    let hi = (20.0 / shortest).max(1e3 / span).ln();
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let scores: Vec<f64> = grid.iter().map(|&g| problem.profile(g.exp()).2).collect();
    let best = scores
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| FitError::FitDidNotConverge("objective is not finite".into()))?;
    if best == 0 || best == GRID_POINTS - 1 {
        return Err(FitError::DegenerateData(format!(
            "best decay constant at the edge of the searchable range [{:.3e}, {:.3e}]",
            lo.exp(),
            hi.exp()
        )));
    }

    // Golden section on ln Γ between the grid neighbours.
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = problem.profile(c.exp()).2;
    let mut fd = problem.profile(d.exp()).2;
    for _ in 0..GOLDEN_ITERS {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = problem.profile(c.exp()).2;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = problem.profile(d.exp()).2;
        }
    }
    let rate0 = (0.5 * (a + b)).exp();
    let (amp0, off0, chi0) = problem.profile(rate0);
    let mut p = [amp0, rate0, off0];
    let mut chi2 = chi0;

    // Gauss–Newton polish in the full parameter space.
    for _ in 0..POLISH_ITERS {
        let (jtj, jtr) = problem.normal_equations(&p);
        let Some(inv) = invert3(&jtj) else { break };
        let delta: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| inv[i][j] * jtr[j]).sum());
        let trial = [p[0] + delta[0], p[1] + delta[1], p[2] + delta[2]];
        if !(trial[1] > 0.0) {
            break;
        }
        let chi_trial = problem.chi2(&trial);
        if !(chi_trial <= chi2) {
            break;
        }
        let done = (chi2 - chi_trial) <= 1e-15 * chi2.max(f64::MIN_POSITIVE);
        p = trial;
        chi2 = chi_trial;
        if done {
            break;
        }
    }
    if !p.iter().all(|v| v.is_finite()) {
        return Err(FitError::FitDidNotConverge("non-finite parameters".into()));
    }

    let (jtj, _) = problem.normal_equations(&p);
    let covariance = invert3(&jtj)
        .ok_or_else(|| FitError::DegenerateData("singular curvature at the optimum".into()))?;
    // Undo the time shift: A·exp(−Γ(t − t_min)) = A·exp(Γ t_min)·exp(−Γt).
    let scale = (p[1] * t_min).exp();
    let mut cov = covariance;
    if t_min != 0.0 {
        // d(A')/dA = scale, d(A')/dΓ = A·t_min·scale
        let g = [scale, p[0] * t_min * scale, 0.0];
        let var_a: f64 = (0..3).map(|i| (0..3).map(|j| g[i] * covariance[i][j] * g[j]).sum::<f64>()).sum();
        let cov_a = |k: usize| (0..3).map(|i| g[i] * covariance[i][k]).sum::<f64>();
        cov[0][0] = var_a;
        for k in 1..3 {
            cov[0][k] = cov_a(k);
            cov[k][0] = cov[0][k];
        }
    }
    Ok(ExponentialFit {
        amplitude: p[0] * scale,
        rate: p[1],
        offset: p[2],
        covariance: cov,
        chi2,
        dof: n - 3,
    })
}

struct Problem<'a> {
    t: &'a [f64],
    y: &'a [f64],
    w: &'a [f64],
}

impl Problem<'_> {
    /// Best (A, C) for a fixed decay constant and the resulting χ².
    fn profile(&self, rate: f64) -> (f64, f64, f64) {
        let (mut s_ee, mut s_e, mut s_1, mut s_ey, mut s_y) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((&t, &y), &w) in self.t.iter().zip(self.y).zip(self.w) {
            let e = (-rate * t).exp();
            s_ee += w * e * e;
            s_e += w * e;
            s_1 += w;
            s_ey += w * e * y;
            s_y += w * y;
        }
        let det = s_ee * s_1 - s_e * s_e;
        if !(det.abs() > 1e-300) {
            return (0.0, 0.0, f64::INFINITY);
        }
        let a = (s_ey * s_1 - s_e * s_y) / det;
        let c = (s_ee * s_y - s_e * s_ey) / det;
        (a, c, self.chi2(&[a, rate, c]))
    }

    fn chi2(&self, p: &[f64; 3]) -> f64 {
        self.t
            .iter()
            .zip(self.y)
            .zip(self.w)
            .map(|((&t, &y), &w)| {
                let r = y - (p[0] * (-p[1] * t).exp() + p[2]);
                w * r * r
            })
            .sum()
    }

    fn normal_equations(&self, p: &[f64; 3]) -> ([[f64; 3]; 3], [f64; 3]) {
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for ((&t, &y), &w) in self.t.iter().zip(self.y).zip(self.w) {
            let e = (-p[1] * t).exp();
            let j = [e, -p[0] * t * e, 1.0];
            let r = y - (p[0] * e + p[2]);
            for a in 0..3 {
                jtr[a] += w * j[a] * r;
                for b in 0..3 {
                    jtj[a][b] += w * j[a] * j[b];
                }
            }
        }
        (jtj, jtr)
    }
}

pub(super) fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let c = |r0: usize, c0: usize, r1: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let cof = [
        [c(1, 1, 2, 2), -c(1, 0, 2, 2), c(1, 0, 2, 1)],
        [-c(0, 1, 2, 2), c(0, 0, 2, 2), -c(0, 0, 2, 1)],
        [c(0, 1, 1, 2), -c(0, 0, 1, 2), c(0, 0, 1, 1)],
    ];
    let det = m[0][0] * cof[0][0] + m[0][1] * cof[0][1] + m[0][2] * cof[0][2];
    if !(det.is_finite() && det.abs() > 0.0) {
        return None;
    }
    // inverse = adjugate / det, adjugate = cofactorᵀ
    Some(std::array::from_fn(|i| std::array::from_fn(|j| cof[j][i] / det)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_times(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n)
            .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    #[test]
    fn exact_model_recovery() {
        let t = log_times(20, 1e-5, 3e-2);
        let y: Vec<f64> = t.iter().map(|t| (-100.0 * t).exp() + 0.7).collect();
        let fit = fit_exponential(&t, &y, &vec![1.0; t.len()]).unwrap();
        assert!((fit.rate / 100.0 - 1.0).abs() < 1e-6, "{}", fit.rate);
        assert!((fit.amplitude - 1.0).abs() < 1e-6);
        assert!((fit.offset - 0.7).abs() < 1e-6);
    }

    #[test]
    fn exact_recovery_with_time_offset() {
        let t: Vec<f64> = (0..30).map(|i| 5.0 + 0.2 * i as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| 2.5 * (-0.3 * t).exp() - 0.1).collect();
        let fit = fit_exponential(&t, &y, &vec![1.0; t.len()]).unwrap();
        assert!((fit.rate - 0.3).abs() < 1e-9);
        assert!((fit.amplitude - 2.5).abs() < 1e-7);
        assert!((fit.offset + 0.1).abs() < 1e-9);
    }

    #[test]
    fn standard_error_matches_linear_propagation() {
        // With unit weights and σ_y = 1, the rate variance is (JᵀJ)⁻¹₁₁.
        let t = log_times(12, 0.01, 5.0);
        let y: Vec<f64> = t.iter().map(|t| 3.0 * (-1.2 * t).exp() + 1.0).collect();
        let fit = fit_exponential(&t, &y, &vec![1.0; t.len()]).unwrap();
        let h = 1e-6;
        // finite-difference Jacobian oracle
        let model = |a: f64, g: f64, c: f64, t: f64| a * (-g * t).exp() + c;
        let mut jtj = [[0.0; 3]; 3];
        for &ti in &t {
            let j = [
                (model(3.0 + h, 1.2, 1.0, ti) - model(3.0 - h, 1.2, 1.0, ti)) / (2.0 * h),
                (model(3.0, 1.2 + h, 1.0, ti) - model(3.0, 1.2 - h, 1.0, ti)) / (2.0 * h),
                1.0,
            ];
            for a in 0..3 {
                for b in 0..3 {
                    jtj[a][b] += j[a] * j[b];
                }
            }
        }
        let inv = invert3(&jtj).unwrap();
        assert!((fit.covariance[1][1] / inv[1][1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn flat_counts_are_degenerate() {
        let r = DecayRecord::new(vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![100; 5], vec![10; 5]).unwrap();
        assert!(matches!(fit_relaxation(&r), Err(FitError::DegenerateData(_))));
    }

    #[test]
    fn non_decaying_noise_is_degenerate_or_flagged() {
        // Alternating values: no monotone decay anywhere in range.
        let t: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { 1.1 }).collect();
        let r = fit_exponential(&t, &y, &[1.0; 10]);
        match r {
            Err(FitError::DegenerateData(_)) => {}
            Ok(fit) => assert!(fit.rate_sigma() > fit.rate, "{fit:?}"),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn inverse_is_inverse() {
        let m = [[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]];
        let inv = invert3(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(invert3(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]]).is_none());
    }
}
