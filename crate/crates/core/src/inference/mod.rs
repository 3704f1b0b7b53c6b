// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! From relaxation measurements to upper limits on δα/α and δm_e/m_e.
//!
//! Fitted decay constants describe the measured fluorescence,
//! `A·exp(−Γt) + C`. The mixer's rates are per-direction transition rates,
//! half of Γ; [`RateEstimate::transition_rate`] does that conversion.

mod fit;
mod limit;
mod record;
mod synth;

use thiserror::Error;

pub use fit::{fit_exponential, fit_relaxation, ExponentialFit, RateEstimate};
pub use limit::{
    excess_rate_limit, variation_upper_limit, z_for_confidence, RateLimit, UpperLimit,
    DEFAULT_CONFIDENCE,
};
pub use record::DecayRecord;
pub use synth::{synthesize_measurement, MeasurementDesign};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("fit did not converge: {0}")]
    FitDidNotConverge(String),
    #[error("no decay information in data: {0}")]
    DegenerateData(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("implied modulation index {0:.4} is beyond the small-argument inversion")]
    SidebandInversionInvalid(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// CSV parsing failure pinned to a 1-based line and a column name.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column `{column}`: {message}")]
pub struct SchemaError {
    pub line: usize,
    pub column: String,
    pub message: String,
}
