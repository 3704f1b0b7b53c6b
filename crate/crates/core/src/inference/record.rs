// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

use std::io::{BufRead, Write};

use super::SchemaError;

const HEADER: [&str; 3] = ["t_s", "counts", "shots"];

/// Photon counts of a relaxation measurement, summed over `shots` repetitions
/// at each wait time.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRecord {
    pub wait_times: Vec<f64>,
    pub counts: Vec<u64>,
    pub shots: Vec<u64>,
    /// Optional calibration count rates per shot.
    pub reference_counts_bright: Option<f64>,
    pub reference_counts_dark: Option<f64>,
}

impl DecayRecord {
    pub fn new(wait_times: Vec<f64>, counts: Vec<u64>, shots: Vec<u64>) -> Result<Self, String> {
        let r = Self {
            wait_times,
            counts,
            shots,
            reference_counts_bright: None,
            reference_counts_dark: None,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn len(&self) -> usize {
        self.wait_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wait_times.is_empty()
    }

    pub fn validate(&self) -> Result<(), String> {
        let n = self.wait_times.len();
        if self.counts.len() != n || self.shots.len() != n {
            return Err(format!(
                "column lengths differ: {} times, {} counts, {} shots",
                n,
                self.counts.len(),
                self.shots.len()
            ));
        }
        if n < 4 {
            return Err(format!("need at least 4 points, got {n}"));
        }
        if self.wait_times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err("wait times must be finite and non-negative".into());
        }
        if self.wait_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err("wait times must be strictly increasing".into());
        }
        if self.shots.contains(&0) {
            return Err("shots must be positive".into());
        }
        Ok(())
    }

    /// Counts per shot at each wait time.
    pub fn rates_per_shot(&self) -> Vec<f64> {
        self.counts
            .iter()
            .zip(&self.shots)
            .map(|(&c, &s)| c as f64 / s as f64)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", HEADER.join(","))?;
        for ((t, c), s) in self.wait_times.iter().zip(&self.counts).zip(&self.shots) {
            writeln!(out, "{t:e},{c},{s}")?;
        }
        out.flush()
    }

    /// Parses `t_s,counts,shots` CSV. Blank lines and `#` comments are skipped.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self, SchemaError> {
        let mut header_seen = false;
        let (mut t, mut c, mut s) = (Vec::new(), Vec::new(), Vec::new());
        for (idx, line) in input.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| SchemaError {
                line: lineno,
                column: String::new(),
                message: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            if !header_seen {
                if fields != HEADER {
                    return Err(SchemaError {
                        line: lineno,
                        column: fields.first().unwrap_or(&"").to_string(),
                        message: format!("expected header `{}`", HEADER.join(",")),
                    });
                }
                header_seen = true;
                continue;
            }
            if fields.len() != HEADER.len() {
                let column = HEADER.get(fields.len()).unwrap_or(&HEADER[2]);
                return Err(SchemaError {
                    line: lineno,
                    column: column.to_string(),
                    message: format!("expected {} fields, found {}", HEADER.len(), fields.len()),
                });
            }
            let bad = |col: &str, msg: String| SchemaError {
                line: lineno,
                column: col.to_string(),
                message: msg,
            };
            t.push(
                fields[0]
                    .parse::<f64>()
                    .map_err(|e| bad("t_s", format!("`{}`: {e}", fields[0])))?,
            );
            c.push(
                fields[1]
                    .parse::<u64>()
                    .map_err(|e| bad("counts", format!("`{}`: {e}", fields[1])))?,
            );
            s.push(
                fields[2]
                    .parse::<u64>()
                    .map_err(|e| bad("shots", format!("`{}`: {e}", fields[2])))?,
            );
        }
        if !header_seen {
            return Err(SchemaError {
                line: 1,
                column: String::new(),
                message: "empty file".into(),
            });
        }
        let record = DecayRecord {
            wait_times: t,
            counts: c,
            shots: s,
            reference_counts_bright: None,
            reference_counts_dark: None,
        };
        record.validate().map_err(|message| SchemaError {
            line: 0,
            column: String::new(),
            message,
        })?;
        Ok(record)
    }
}
