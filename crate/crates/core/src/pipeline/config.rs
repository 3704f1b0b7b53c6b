// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! TOML sweep configuration. Every section is optional and unknown keys are
//! rejected.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ConfigError;
use crate::darkmatter::DarkMatterModel;
use crate::inference::{MeasurementDesign, DEFAULT_CONFIDENCE};
use crate::mixer::{Band, NoiseModel};
use crate::spin::{Branch, NvSpinModel, ScalingExponents, DEFAULT_ZERO_FIELD_SPLITTING_HZ};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Zero excess rate with Cramér–Rao errors; no sampling.
    #[default]
    Analytic,
    /// Analytic rate plus Poisson photon counts, fitted like real data.
    Synthetic,
    /// Signal and reference records read from `records_dir`.
    Ingest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub mode: Mode,
    pub freq_min_hz: f64,
    pub freq_max_hz: f64,
    pub points: usize,
    /// Explicit grid; replaces the log-spaced one when present.
    pub frequencies_hz: Option<Vec<f64>>,
    pub master_seed: u64,
    /// Appends ensemble-projected rows when set.
    pub ensemble_factor: Option<f64>,
    pub confidence: f64,
    pub records_dir: Option<PathBuf>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            mode: Mode::default(),
            freq_min_hz: 0.1e9,
            freq_max_hz: 12e9,
            points: 147,
            frequencies_hz: None,
            master_seed: 0,
            ensemble_factor: None,
            confidence: DEFAULT_CONFIDENCE,
            records_dir: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpinSection {
    pub zero_field_hz: f64,
    pub b0_tesla: f64,
    pub branch: Branch,
    pub exponents: ScalingExponents,
}

impl Default for SpinSection {
    fn default() -> Self {
        Self {
            zero_field_hz: DEFAULT_ZERO_FIELD_SPLITTING_HZ,
            b0_tesla: 0.051,
            branch: Branch::EMinus,
            exponents: ScalingExponents::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    /// Ω₁/2π
    pub rabi_hz: f64,
    pub band: Band,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self {
            rabi_hz: 10e6,
            band: Band::Difference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    /// Per-direction Γ₁ in s⁻¹.
    pub gamma1_per_s: f64,
    /// Γ₂/2π
    pub gamma2_hz: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            gamma1_per_s: 100.0,
            gamma2_hz: 1e6,
        }
    }
}

impl NoiseSection {
    pub fn model(&self) -> NoiseModel {
        NoiseModel {
            gamma1: self.gamma1_per_s,
            gamma2: 2.0 * PI * self.gamma2_hz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasurementSection {
    pub wait_min_s: f64,
    pub wait_max_s: f64,
    pub wait_points: usize,
    /// Explicit wait times; replaces the log-spaced grid when present.
    pub wait_times_s: Option<Vec<f64>>,
    pub shots: u64,
    pub contrast: f64,
    pub baseline_rate: f64,
}

/// Shots per wait time that put the best default-sweep limit near 5 ppm.
pub const CALIBRATED_SHOTS: u64 = 170_000;

impl Default for MeasurementSection {
    fn default() -> Self {
        Self {
            wait_min_s: 10e-6,
            wait_max_s: 30e-3,
            wait_points: 20,
            wait_times_s: None,
            shots: CALIBRATED_SHOTS,
            contrast: 0.3,
            baseline_rate: 0.03,
        }
    }
}

impl MeasurementSection {
    pub fn design(&self, shots: u64, wait_times: Option<&[f64]>) -> MeasurementDesign {
        match wait_times.or(self.wait_times_s.as_deref()) {
            Some(t) => MeasurementDesign {
                wait_times: t.to_vec(),
                shots,
                contrast: self.contrast,
                baseline_rate: self.baseline_rate,
            },
            None => MeasurementDesign::log_spaced(
                self.wait_points,
                self.wait_min_s,
                self.wait_max_s,
                shots,
                self.contrast,
                self.baseline_rate,
            ),
        }
    }
}

/// Per-point replacements for the global settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PointOverride {
    pub index: usize,
    pub b0_tesla: Option<f64>,
    pub rabi_hz: Option<f64>,
    pub band: Option<Band>,
    /// ω₁/2π; bypasses the mixing schedule, so the point may be detuned.
    pub omega1_hz: Option<f64>,
    pub gamma1_per_s: Option<f64>,
    pub gamma2_hz: Option<f64>,
    pub shots: Option<u64>,
    pub wait_times_s: Option<Vec<f64>>,
    pub inject_frac_alpha: Option<f64>,
    pub inject_frac_me: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub sweep: SweepSection,
    pub spin: SpinSection,
    pub drive: DriveSection,
    pub noise: NoiseSection,
    pub measurement: MeasurementSection,
    pub darkmatter: DarkMatterModel,
    pub overrides: Vec<PointOverride>,
}

/// Settings for one sweep point after overrides are applied.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPlan {
    pub index: usize,
    pub freq_hz: f64,
    pub spin: NvSpinModel,
    pub branch: Branch,
    pub rabi_omega1: f64,
    pub band: Band,
    pub omega1: Option<f64>,
    pub noise: NoiseModel,
    pub design: MeasurementDesign,
    pub inject_frac_alpha: f64,
    pub inject_frac_me: f64,
}

fn err(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        path: path.into(),
        message: message.into(),
    }
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(err(path, format!("must be positive and finite, got {v}")))
    }
}

fn increasing(path: &str, v: &[f64]) -> Result<(), ConfigError> {
    if let Some(i) = v.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(err(format!("{path}[{i}]"), format!("must be positive, got {}", v[i])));
    }
    if let Some(i) = v.windows(2).position(|w| w[1] <= w[0]) {
        return Err(err(format!("{path}[{}]", i + 1), "values must be strictly increasing"));
    }
    Ok(())
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| {
                let line = text[..s.start].matches('\n').count() + 1;
                format!("line {line}")
            });
            err(path.unwrap_or_default(), e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn frequencies(&self) -> Vec<f64> {
        if let Some(f) = &self.sweep.frequencies_hz {
            return f.clone();
        }
        let n = self.sweep.points;
        let (lo, hi) = (self.sweep.freq_min_hz, self.sweep.freq_max_hz);
        match n {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..n)
                .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.sweep;
        if let Some(f) = &s.frequencies_hz {
            increasing("sweep.frequencies_hz", f)?;
        } else {
            positive("sweep.freq_min_hz", s.freq_min_hz)?;
            positive("sweep.freq_max_hz", s.freq_max_hz)?;
            if s.points > 1 && s.freq_max_hz <= s.freq_min_hz {
                return Err(err("sweep.freq_max_hz", "must exceed freq_min_hz"));
            }
        }
        if !(s.confidence > 0.0 && s.confidence < 1.0) {
            return Err(err("sweep.confidence", format!("must be in (0, 1), got {}", s.confidence)));
        }
        if let Some(f) = s.ensemble_factor {
            if !(f.is_finite() && f >= 1.0) {
                return Err(err("sweep.ensemble_factor", format!("must be at least 1, got {f}")));
            }
        }
        if s.mode == Mode::Ingest && s.records_dir.is_none() {
            return Err(err("sweep.records_dir", "required in ingest mode"));
        }

        NvSpinModel::new(self.spin.zero_field_hz, self.spin.b0_tesla)
            .map_err(|e| err("spin", e.to_string()))?;
        positive("drive.rabi_hz", self.drive.rabi_hz)?;
        self.noise
            .model()
            .validate()
            .map_err(|e| err("noise", e.to_string()))?;
        self.measurement
            .design(self.measurement.shots, None)
            .validate()
            .map_err(|e| err("measurement", e))?;
        self.darkmatter
            .validate()
            .map_err(|e| err("darkmatter", e.to_string()))?;

        let n = self.frequencies().len();
        let mut seen = vec![false; n];
        for (i, o) in self.overrides.iter().enumerate() {
            let p = |field: &str| format!("overrides[{i}].{field}");
            if o.index >= n {
                return Err(err(p("index"), format!("{} is outside the {n}-point grid", o.index)));
            }
            if std::mem::replace(&mut seen[o.index], true) {
                return Err(err(p("index"), format!("point {} overridden twice", o.index)));
            }
            for (name, v) in [
                ("b0_tesla", o.b0_tesla),
                ("rabi_hz", o.rabi_hz),
                ("omega1_hz", o.omega1_hz),
                ("gamma2_hz", o.gamma2_hz),
            ] {
                if let Some(v) = v {
                    positive(&p(name), v)?;
                }
            }
            for (name, v) in [
                ("gamma1_per_s", o.gamma1_per_s),
                ("inject_frac_alpha", o.inject_frac_alpha),
                ("inject_frac_me", o.inject_frac_me),
            ] {
                if let Some(v) = v {
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(err(p(name), format!("must be non-negative, got {v}")));
                    }
                }
            }
            if o.shots == Some(0) {
                return Err(err(p("shots"), "must be positive"));
            }
            if let Some(t) = &o.wait_times_s {
                increasing(&p("wait_times_s"), t)?;
            }
            let plan = self.plan(o.index, 0.0);
            plan.noise.validate().map_err(|e| err(p("gamma2_hz"), e.to_string()))?;
            plan.design.validate().map_err(|e| err(p("wait_times_s"), e))?;
        }
        Ok(())
    }

    /// Merged settings for point `index` at `freq_hz`.
    pub fn plan(&self, index: usize, freq_hz: f64) -> PointPlan {
        let o = self.overrides.iter().find(|o| o.index == index);
        let get = |f: fn(&PointOverride) -> Option<f64>, default: f64| o.and_then(f).unwrap_or(default);
        let b0 = get(|o| o.b0_tesla, self.spin.b0_tesla);
        let mut spin = NvSpinModel::default();
        spin.omega_zero_field = 2.0 * PI * self.spin.zero_field_hz;
        spin.magnetic_field_b0 = b0;
        let noise = NoiseSection {
            gamma1_per_s: get(|o| o.gamma1_per_s, self.noise.gamma1_per_s),
            gamma2_hz: get(|o| o.gamma2_hz, self.noise.gamma2_hz),
        }
        .model();
        let shots = o.and_then(|o| o.shots).unwrap_or(self.measurement.shots);
        let design = self
            .measurement
            .design(shots, o.and_then(|o| o.wait_times_s.as_deref()));
        PointPlan {
            index,
            freq_hz,
            spin,
            branch: self.spin.branch,
            rabi_omega1: 2.0 * PI * get(|o| o.rabi_hz, self.drive.rabi_hz),
            band: o.and_then(|o| o.band).unwrap_or(self.drive.band),
            omega1: o.and_then(|o| o.omega1_hz).map(|f| 2.0 * PI * f),
            noise,
            design,
            inject_frac_alpha: get(|o| o.inject_frac_alpha, 0.0),
            inject_frac_me: get(|o| o.inject_frac_me, 0.0),
        }
    }
}

pub fn validate_config(path: &Path) -> Result<SweepConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err(path.display().to_string(), e.to_string()))?;
    SweepConfig::from_toml_str(&text)
}
