// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use rayon::prelude::*;

use super::config::{Mode, PointPlan, SweepConfig};
use super::table::{
    read_records, ExclusionRow, ExclusionTable, PointFailure, Provenance, SCHEDULE_LABEL,
};
use super::PipelineError;
use crate::darkmatter::coupling_limit;
use crate::inference::{
    fit_relaxation, variation_upper_limit, RateEstimate, RateLimit, UpperLimit,
};
use crate::mixer::{mixing_schedule, MixerDrive, MixingConfig, SignalHypothesis};

/// Everything computed for one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEvaluation {
    pub row: ExclusionRow,
    pub rate: RateLimit,
    pub limit: UpperLimit,
    /// Per-direction excess rate that was injected, s⁻¹.
    pub injected_rate: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable seed for random stream `stream` of point `index`.
pub fn point_seed(master_seed: u64, index: usize, stream: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ index as u64) ^ stream)
}

fn mixing_config(plan: &PointPlan) -> Result<MixingConfig, String> {
    let omega_spin = plan.spin.omega_transition(plan.branch);
    let omega_phi = 2.0 * PI * plan.freq_hz;
    let omega1 = match plan.omega1 {
        Some(w) => w,
        None => mixing_schedule(omega_phi, omega_spin, plan.band, plan.rabi_omega1)
            .map_err(|e| e.to_string())?,
    };
    Ok(MixingConfig {
        omega_spin,
        drive: MixerDrive {
            omega1,
            rabi_omega1: plan.rabi_omega1,
            band: plan.band,
        },
        signal: SignalHypothesis {
            omega_phi,
            delta_s: 0.0,
            phase: 0.0,
        },
        noise: plan.noise,
    })
}

fn fisher_estimate(plan: &PointPlan, decay_constant: f64) -> RateEstimate {
    RateEstimate {
        rate: decay_constant,
        sigma: plan.design.fisher_rate_sigma(decay_constant),
        fit_amplitude: -plan.design.baseline_rate * plan.design.contrast,
        fit_offset: plan.design.baseline_rate * (1.0 - plan.design.contrast),
        chi2_per_dof: 1.0,
    }
}

/// Runs the full chain for sweep point `index` at `freq_hz`.
pub fn evaluate_point(
    config: &SweepConfig,
    index: usize,
    freq_hz: f64,
) -> Result<PointEvaluation, String> {
    let plan = config.plan(index, freq_hz);
    let coeffs = plan
        .spin
        .sensitivity_coefficients(&config.spin.exponents, plan.branch)
        .map_err(|e| e.to_string())?;
    let base = mixing_config(&plan)?;
    base.validate().map_err(|e| e.to_string())?;

    let mut injected = base;
    injected.signal.delta_s = plan
        .spin
        .level_shift_amplitude(&coeffs, plan.inject_frac_alpha, plan.inject_frac_me)
        .map_err(|e| e.to_string())?
        .abs();
    let injected_rate = if injected.signal.delta_s > 0.0 {
        injected.analytic_rate().map_err(|e| e.to_string())?.gamma_phi
    } else {
        0.0
    };

    // Fluorescence decay constants are twice the per-direction rates.
    let gamma1 = plan.noise.gamma1;
    let signal_decay = 2.0 * (gamma1 + injected_rate);
    let reference_decay = 2.0 * gamma1;

    let (signal, reference) = match config.sweep.mode {
        Mode::Analytic => (
            fisher_estimate(&plan, signal_decay),
            fisher_estimate(&plan, reference_decay),
        ),
        Mode::Synthetic => {
            plan.design.validate()?;
            let seed = config.sweep.master_seed;
            let s = plan.design.synthesize(signal_decay, point_seed(seed, index, 0));
            let r = plan.design.synthesize(reference_decay, point_seed(seed, index, 1));
            (
                fit_relaxation(&s).map_err(|e| format!("signal fit: {e}"))?,
                fit_relaxation(&r).map_err(|e| format!("reference fit: {e}"))?,
            )
        }
        Mode::Ingest => {
            let dir = config
                .sweep
                .records_dir
                .as_deref()
                .ok_or("ingest mode needs records_dir")?;
            let (s, r) = read_records(dir, index).map_err(|e| e.to_string())?;
            (
                fit_relaxation(&s).map_err(|e| format!("signal fit: {e}"))?,
                fit_relaxation(&r).map_err(|e| format!("reference fit: {e}"))?,
            )
        }
    };

    let rate = RateLimit::from_estimates(
        &signal.transition_rate(),
        &reference.transition_rate(),
        config.sweep.confidence,
    )
    .map_err(|e| e.to_string())?;
    let limit = variation_upper_limit(rate.upper, &base, &coeffs, config.sweep.confidence)
        .map_err(|e| e.to_string())?;
    let coupling = coupling_limit(
        freq_hz,
        limit.frac_variation_up_alpha,
        limit.frac_variation_up_me,
        &config.darkmatter,
    )
    .map_err(|e| e.to_string())?;

    let row = ExclusionRow {
        freq_hz,
        m_phi_ev: coupling.m_phi_ev,
        omega1_hz: base.drive.omega1 / (2.0 * PI),
        gamma_up_hz: rate.upper,
        dalpha_up: limit.frac_variation_up_alpha,
        dme_up: limit.frac_variation_up_me,
        inv_lambda_gamma_gev: coupling.inv_lambda_gamma,
        inv_lambda_e_gev: coupling.inv_lambda_e,
        projected: false,
    };
    Ok(PointEvaluation {
        row,
        rate,
        limit,
        injected_rate,
    })
}

/// Evaluates every grid point on `workers` threads and merges in grid order.
/// Failed points are collected, not fatal.
pub fn run_sweep(config: &SweepConfig, workers: usize) -> Result<ExclusionTable, PipelineError> {
    config.validate()?;
    let freqs = config.frequencies();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))?;
    let results: Vec<Result<ExclusionRow, String>> = pool.install(|| {
        freqs
            .par_iter()
            .enumerate()
            .map(|(i, &f)| evaluate_point(config, i, f).map(|p| p.row))
            .collect()
    });

    let mut rows = Vec::with_capacity(freqs.len());
    let mut failures = Vec::new();
    for (index, (res, &freq_hz)) in results.into_iter().zip(&freqs).enumerate() {
        match res {
            Ok(row) => rows.push(row),
            Err(reason) => {
                log::warn!("point {index} ({freq_hz:.6e} Hz) failed: {reason}");
                failures.push(PointFailure {
                    index,
                    freq_hz,
                    reason,
                });
            }
        }
    }

    let mut table = ExclusionTable {
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: config.fingerprint(),
            master_seed: config.sweep.master_seed,
            mode: config.sweep.mode,
            confidence: config.sweep.confidence,
            rho_dm_gev_cm3: config.darkmatter.rho_gev_cm3,
            ensemble_factor: None,
            schedule: SCHEDULE_LABEL.to_string(),
        },
        rows,
        failures,
    };
    if let Some(factor) = config.sweep.ensemble_factor {
        table
            .append_projection(factor)
            .map_err(|e| PipelineError::Invalid(e.to_string()))?;
    }
    Ok(table)
}
