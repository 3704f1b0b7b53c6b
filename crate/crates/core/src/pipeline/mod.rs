// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! Sweep orchestration: per-point schedule, measurement, fit, limits and
//! exclusion table output.

mod config;
mod sweep;
mod table;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::inference::SchemaError;

pub use config::{
    validate_config, DriveSection, MeasurementSection, Mode, NoiseSection, PointOverride,
    PointPlan, SpinSection, SweepConfig, SweepSection, CALIBRATED_SHOTS,
};
pub use sweep::{evaluate_point, point_seed, run_sweep, PointEvaluation};
pub use table::{
    read_record, read_records, read_rows_csv, read_table, record_paths, write_rows_csv,
    ExclusionRow, ExclusionTable, PointFailure, Provenance, TableFormat, SCHEDULE_LABEL,
    TABLE_HEADER,
};

/// Invalid configuration, located by a dotted field path.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("config `{path}`: {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    ConfigInvalid(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Schema { path: PathBuf, source: SchemaError },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("{0}")]
    Invalid(String),
}

impl PipelineError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
