// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::Mode;
use super::PipelineError;
use crate::darkmatter::{coupling_limit, ensemble_projection, DarkMatterError, DarkMatterModel};
use crate::inference::{DecayRecord, SchemaError};

pub const TABLE_HEADER: [&str; 9] = [
    "freq_hz",
    "m_phi_ev",
    "omega1_hz",
    "gamma_up_hz",
    "dalpha_up",
    "dme_up",
    "inv_lambda_gamma_gev",
    "inv_lambda_e_gev",
    "projected",
];

pub const SCHEDULE_LABEL: &str =
    "reconstruction: first-order mixing schedule at fixed B0, not the experimental table";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusionRow {
    pub freq_hz: f64,
    pub m_phi_ev: f64,
    /// ω₁/2π
    pub omega1_hz: f64,
    /// Per-direction excess rate bound, s⁻¹.
    pub gamma_up_hz: f64,
    pub dalpha_up: f64,
    pub dme_up: f64,
    pub inv_lambda_gamma_gev: f64,
    pub inv_lambda_e_gev: f64,
    pub projected: bool,
}

impl ExclusionRow {
    fn values(&self) -> [f64; 8] {
        [
            self.freq_hz,
            self.m_phi_ev,
            self.omega1_hz,
            self.gamma_up_hz,
            self.dalpha_up,
            self.dme_up,
            self.inv_lambda_gamma_gev,
            self.inv_lambda_e_gev,
        ]
    }

    /// Recomputes the coupling columns from the variation columns.
    pub fn with_darkmatter(&self, dm: &DarkMatterModel) -> Result<Self, DarkMatterError> {
        let l = coupling_limit(self.freq_hz, self.dalpha_up, self.dme_up, dm)?;
        Ok(Self {
            m_phi_ev: l.m_phi_ev,
            inv_lambda_gamma_gev: l.inv_lambda_gamma,
            inv_lambda_e_gev: l.inv_lambda_e,
            projected: false,
            ..*self
        })
    }

    pub fn projected(&self, factor: f64) -> Result<Self, DarkMatterError> {
        let l = crate::darkmatter::CouplingLimit {
            m_phi_ev: self.m_phi_ev,
            freq_hz: self.freq_hz,
            inv_lambda_gamma: self.inv_lambda_gamma_gev,
            inv_lambda_e: self.inv_lambda_e_gev,
            projected: self.projected,
        };
        let p = ensemble_projection(&l, factor)?;
        Ok(Self {
            inv_lambda_gamma_gev: p.inv_lambda_gamma,
            inv_lambda_e_gev: p.inv_lambda_e,
            projected: true,
            ..*self
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub config_sha256: String,
    pub master_seed: u64,
    pub mode: Mode,
    pub confidence: f64,
    pub rho_dm_gev_cm3: f64,
    pub ensemble_factor: Option<f64>,
    pub schedule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub index: usize,
    pub freq_hz: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionTable {
    pub provenance: Provenance,
    pub rows: Vec<ExclusionRow>,
    #[serde(default)]
    pub failures: Vec<PointFailure>,
}

impl ExclusionTable {
    /// Unprojected rows followed by a block of projected copies.
    pub fn append_projection(&mut self, factor: f64) -> Result<(), DarkMatterError> {
        let extra = self
            .rows
            .iter()
            .filter(|r| !r.projected)
            .map(|r| r.projected(factor))
            .collect::<Result<Vec<_>, _>>()?;
        self.rows.retain(|r| !r.projected);
        self.rows.extend(extra);
        self.provenance.ensemble_factor = Some(factor);
        Ok(())
    }

    pub fn write<W: Write>(&self, out: W, format: TableFormat) -> std::io::Result<()> {
        match format {
            TableFormat::Csv => write_rows_csv(&self.rows, out),
            TableFormat::Json => {
                let mut out = out;
                serde_json::to_writer_pretty(&mut out, self)?;
                writeln!(out)?;
                out.flush()
            }
        }
    }

    pub fn write_path(&self, path: &Path, format: TableFormat) -> Result<(), PipelineError> {
        let file = File::create(path).map_err(|e| PipelineError::io(path, e))?;
        self.write(std::io::BufWriter::new(file), format)
            .map_err(|e| PipelineError::io(path, e))
    }

    pub fn read_json<R: std::io::Read>(input: R) -> Result<Self, serde_json::Error> {
        serde_json::from_reader(input)
    }
}

pub fn write_rows_csv<W: Write>(rows: &[ExclusionRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", TABLE_HEADER.join(","))?;
    for r in rows {
        for v in r.values() {
            write!(out, "{v:e},")?;
        }
        writeln!(out, "{}", u8::from(r.projected))?;
    }
    out.flush()
}

/// Parses the exclusion CSV. Errors name the 1-based line and the column.
pub fn read_rows_csv<R: BufRead>(input: R) -> Result<Vec<ExclusionRow>, SchemaError> {
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let bad = |column: &str, message: String| SchemaError {
            line: lineno,
            column: column.to_string(),
            message,
        };
        let line = line.map_err(|e| bad("", e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if !header_seen {
            if fields != TABLE_HEADER {
                return Err(bad(
                    fields.first().unwrap_or(&""),
                    format!("expected header `{}`", TABLE_HEADER.join(",")),
                ));
            }
            header_seen = true;
            continue;
        }
        if fields.len() != TABLE_HEADER.len() {
            let column = TABLE_HEADER[fields.len().min(TABLE_HEADER.len() - 1)];
            return Err(bad(
                column,
                format!("expected {} fields, found {}", TABLE_HEADER.len(), fields.len()),
            ));
        }
        let mut v = [0.0; 8];
        for (i, slot) in v.iter_mut().enumerate() {
            let x: f64 = fields[i]
                .parse()
                .map_err(|e| bad(TABLE_HEADER[i], format!("`{}`: {e}", fields[i])))?;
            if !(x.is_finite() && x >= 0.0) {
                return Err(bad(TABLE_HEADER[i], format!("must be finite and non-negative, got {x}")));
            }
            *slot = x;
        }
        let projected = match fields[8] {
            "0" | "false" => false,
            "1" | "true" => true,
            other => return Err(bad("projected", format!("expected 0 or 1, got `{other}`"))),
        };
        rows.push(ExclusionRow {
            freq_hz: v[0],
            m_phi_ev: v[1],
            omega1_hz: v[2],
            gamma_up_hz: v[3],
            dalpha_up: v[4],
            dme_up: v[5],
            inv_lambda_gamma_gev: v[6],
            inv_lambda_e_gev: v[7],
            projected,
        });
    }
    if !header_seen {
        return Err(SchemaError {
            line: 1,
            column: TABLE_HEADER[0].to_string(),
            message: "missing header".into(),
        });
    }
    Ok(rows)
}

pub fn read_table(path: &Path) -> Result<Vec<ExclusionRow>, PipelineError> {
    let file = File::open(path).map_err(|e| PipelineError::io(path, e))?;
    read_rows_csv(BufReader::new(file)).map_err(|e| PipelineError::Schema {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn record_paths(dir: &Path, index: usize) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("point_{index:03}_signal.csv")),
        dir.join(format!("point_{index:03}_reference.csv")),
    )
}

pub fn read_record(path: &Path) -> Result<DecayRecord, PipelineError> {
    let file = File::open(path).map_err(|e| PipelineError::io(path, e))?;
    DecayRecord::read_csv(BufReader::new(file)).map_err(|e| PipelineError::Schema {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Signal and reference records of sweep point `index`.
pub fn read_records(dir: &Path, index: usize) -> Result<(DecayRecord, DecayRecord), PipelineError> {
    let (s, r) = record_paths(dir, index);
    Ok((read_record(&s)?, read_record(&r)?))
}
