// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! C ABI over the nvscalar core.
//!
//! Objects are opaque handles created by `nvs_*_new`/`nvs_*_from_*` and
//! released by the matching `nvs_*_free`. Every fallible call returns an
//! [`NvsStatus`]; the message for the last failure on the calling thread is
//! available from [`nvs_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nvscalar::darkmatter;
use nvscalar::mixer::{
    effective_rabi, induced_relaxation_rate, Band, MixerDrive, NoiseModel, SignalHypothesis,
};
use nvscalar::pipeline::{
    run_sweep, validate_config, ExclusionTable, PipelineError, SweepConfig, TableFormat,
};
use nvscalar::spin::{Branch, NvSpinModel, ScalingExponents};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NvsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Degenerate = 3,
    Config = 4,
    Io = 5,
    /// The sweep finished but some points failed; the table holds the rest.
    Partial = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NvsBranch {
    EMinus = 0,
    EPlus = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NvsFormat {
    Csv = 0,
    Json = 1,
}

/// One exclusion-table row.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NvsRow {
    pub freq_hz: f64,
    pub m_phi_ev: f64,
    pub omega1_hz: f64,
    pub gamma_up_hz: f64,
    pub dalpha_up: f64,
    pub dme_up: f64,
    pub inv_lambda_gamma_gev: f64,
    pub inv_lambda_e_gev: f64,
    pub projected: bool,
}

pub struct NvsSpinModel(NvSpinModel);

pub struct NvsSweepConfig(SweepConfig);

pub struct NvsTable(ExclusionTable);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: NvsStatus, message: impl Into<String>) -> NvsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
    status
}

fn guard(f: impl FnOnce() -> NvsStatus) -> NvsStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(NvsStatus::Panic, "panic in nvscalar"))
}

fn pipeline_status(e: &PipelineError) -> NvsStatus {
    match e {
        PipelineError::ConfigInvalid(_) => NvsStatus::Config,
        PipelineError::Io { .. } | PipelineError::Schema { .. } => NvsStatus::Io,
        _ => NvsStatus::InvalidArgument,
    }
}

impl From<NvsBranch> for Branch {
    fn from(b: NvsBranch) -> Self {
        match b {
            NvsBranch::EMinus => Branch::EMinus,
            NvsBranch::EPlus => Branch::EPlus,
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, NvsStatus> {
    if s.is_null() {
        return Err(fail(NvsStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(NvsStatus::InvalidArgument, "string is not UTF-8"))
}

/// Copies the last error message of this thread into `buf` (NUL terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn nvs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nvs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer; the handle is released with
/// [`nvs_spin_model_free`].
#[no_mangle]
pub unsafe extern "C" fn nvs_spin_model_new(
    zero_field_hz: f64,
    b0_tesla: f64,
    out: *mut *mut NvsSpinModel,
) -> NvsStatus {
    guard(|| {
        if out.is_null() {
            return fail(NvsStatus::NullPointer, "out is null");
        }
        match NvSpinModel::new(zero_field_hz, b0_tesla) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(NvsSpinModel(m)));
                NvsStatus::Ok
            }
            Err(e) => fail(NvsStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `model` must be null or a handle from [`nvs_spin_model_new`].
#[no_mangle]
pub unsafe extern "C" fn nvs_spin_model_free(model: *mut NvsSpinModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Transition frequency of `branch` in Hz.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nvs_spin_transition_hz(
    model: *const NvsSpinModel,
    branch: NvsBranch,
    out_hz: *mut f64,
) -> NvsStatus {
    guard(|| {
        if model.is_null() || out_hz.is_null() {
            return fail(NvsStatus::NullPointer, "null argument");
        }
        let f = (*model).0.transition_frequencies();
        *out_hz = match branch {
            NvsBranch::EMinus => f.minus_hz,
            NvsBranch::EPlus => f.plus_hz,
        };
        NvsStatus::Ok
    })
}

/// Sensitivity coefficients with the default scaling exponents.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nvs_sensitivity_coefficients(
    model: *const NvsSpinModel,
    branch: NvsBranch,
    k_alpha: *mut f64,
    k_me: *mut f64,
) -> NvsStatus {
    guard(|| {
        if model.is_null() || k_alpha.is_null() || k_me.is_null() {
            return fail(NvsStatus::NullPointer, "null argument");
        }
        match (*model)
            .0
            .sensitivity_coefficients(&ScalingExponents::default(), branch.into())
        {
            Ok(c) => {
                *k_alpha = c.k_alpha;
                *k_me = c.k_me;
                NvsStatus::Ok
            }
            Err(e) => fail(NvsStatus::Degenerate, e.to_string()),
        }
    })
}

/// m_φ in eV for a Compton frequency in Hz.
#[no_mangle]
pub extern "C" fn nvs_mass_from_frequency(freq_hz: f64) -> f64 {
    darkmatter::mass_from_frequency(freq_hz)
}

#[no_mangle]
pub extern "C" fn nvs_frequency_from_mass(m_phi_ev: f64) -> f64 {
    darkmatter::frequency_from_mass(m_phi_ev)
}

/// Ω₁·J₁(δ_s/ω_φ). Angular units.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nvs_effective_rabi(
    omega_phi: f64,
    delta_s: f64,
    rabi_omega1: f64,
    out: *mut f64,
) -> NvsStatus {
    guard(|| {
        if out.is_null() {
            return fail(NvsStatus::NullPointer, "out is null");
        }
        let signal = SignalHypothesis {
            omega_phi,
            delta_s,
            phase: 0.0,
        };
        let drive = MixerDrive {
            omega1: omega_phi,
            rabi_omega1,
            band: Band::Difference,
        };
        match effective_rabi(&signal, &drive) {
            Ok(w) => {
                *out = w;
                NvsStatus::Ok
            }
            Err(e) => fail(NvsStatus::OutOfRange, e.to_string()),
        }
    })
}

/// Induced per-direction relaxation rate for a given Ω_eff and detuning.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nvs_induced_rate(
    omega_eff: f64,
    detuning: f64,
    gamma1: f64,
    gamma2: f64,
    out: *mut f64,
) -> NvsStatus {
    guard(|| {
        if out.is_null() {
            return fail(NvsStatus::NullPointer, "out is null");
        }
        let noise = NoiseModel { gamma1, gamma2 };
        if let Err(e) = noise.validate() {
            return fail(NvsStatus::InvalidArgument, e.to_string());
        }
        if !(omega_eff.is_finite() && omega_eff >= 0.0 && detuning.is_finite() && gamma2 > 0.0) {
            return fail(NvsStatus::InvalidArgument, "rate inputs must be finite, gamma2 > 0");
        }
        *out = induced_relaxation_rate(omega_eff, detuning, &noise);
        NvsStatus::Ok
    })
}

/// Parses and validates a TOML sweep configuration.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn nvs_sweep_config_from_toml(
    toml: *const c_char,
    out: *mut *mut NvsSweepConfig,
) -> NvsStatus {
    guard(|| {
        if out.is_null() {
            return fail(NvsStatus::NullPointer, "out is null");
        }
        let text = match str_arg(toml) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match SweepConfig::from_toml_str(text) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(NvsSweepConfig(c)));
                NvsStatus::Ok
            }
            Err(e) => fail(NvsStatus::Config, e.to_string()),
        }
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn nvs_sweep_config_from_file(
    path: *const c_char,
    out: *mut *mut NvsSweepConfig,
) -> NvsStatus {
    guard(|| {
        if out.is_null() {
            return fail(NvsStatus::NullPointer, "out is null");
        }
        let path = match str_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match validate_config(Path::new(path)) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(NvsSweepConfig(c)));
                NvsStatus::Ok
            }
            Err(e) => fail(NvsStatus::Config, e.to_string()),
        }
    })
}

/// Replaces the master seed.
///
/// # Safety
/// `config` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn nvs_sweep_config_set_seed(config: *mut NvsSweepConfig, seed: u64) -> NvsStatus {
    if config.is_null() {
        return fail(NvsStatus::NullPointer, "config is null");
    }
    (*config).0.sweep.master_seed = seed;
    NvsStatus::Ok
}

/// # Safety
/// `config` must be null or a handle from `nvs_sweep_config_from_*`.
#[no_mangle]
pub unsafe extern "C" fn nvs_sweep_config_free(config: *mut NvsSweepConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the sweep on `workers` threads. On `NVS_STATUS_OK` or
/// `NVS_STATUS_PARTIAL` a table is written to `out`.
///
/// # Safety
/// `config` must be a valid handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn nvs_run_sweep(
    config: *const NvsSweepConfig,
    workers: usize,
    out: *mut *mut NvsTable,
) -> NvsStatus {
    guard(|| {
        if config.is_null() || out.is_null() {
            return fail(NvsStatus::NullPointer, "null argument");
        }
        match run_sweep(&(*config).0, workers) {
            Ok(t) => {
                let failed = t.failures.len();
                *out = Box::into_raw(Box::new(NvsTable(t)));
                if failed == 0 {
                    NvsStatus::Ok
                } else {
                    fail(NvsStatus::Partial, format!("{failed} sweep points failed"))
                }
            }
            Err(e) => fail(pipeline_status(&e), e.to_string()),
        }
    })
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `table` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn nvs_table_len(table: *const NvsTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.rows.len())
}

/// # Safety
/// `table` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn nvs_table_failure_count(table: *const NvsTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.failures.len())
}

/// # Safety
/// `table` must be a valid handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn nvs_table_row(
    table: *const NvsTable,
    index: usize,
    out: *mut NvsRow,
) -> NvsStatus {
    if table.is_null() || out.is_null() {
        return fail(NvsStatus::NullPointer, "null argument");
    }
    let rows = &(*table).0.rows;
    let Some(r) = rows.get(index) else {
        return fail(NvsStatus::OutOfRange, format!("row {index} of {}", rows.len()));
    };
    *out = NvsRow {
        freq_hz: r.freq_hz,
        m_phi_ev: r.m_phi_ev,
        omega1_hz: r.omega1_hz,
        gamma_up_hz: r.gamma_up_hz,
        dalpha_up: r.dalpha_up,
        dme_up: r.dme_up,
        inv_lambda_gamma_gev: r.inv_lambda_gamma_gev,
        inv_lambda_e_gev: r.inv_lambda_e_gev,
        projected: r.projected,
    };
    NvsStatus::Ok
}

/// Writes the table as CSV or JSON.
///
/// # Safety
/// `table` must be a valid handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nvs_table_write(
    table: *const NvsTable,
    path: *const c_char,
    format: NvsFormat,
) -> NvsStatus {
    guard(|| {
        if table.is_null() {
            return fail(NvsStatus::NullPointer, "table is null");
        }
        let path = match str_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let format = match format {
            NvsFormat::Csv => TableFormat::Csv,
            NvsFormat::Json => TableFormat::Json,
        };
        match (*table).0.write_path(Path::new(path), format) {
            Ok(()) => NvsStatus::Ok,
            Err(e) => fail(pipeline_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `table` must be null or a handle from [`nvs_run_sweep`].
#[no_mangle]
pub unsafe extern "C" fn nvs_table_free(table: *mut NvsTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}
