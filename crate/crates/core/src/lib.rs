// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulation and inference for NV-center searches for oscillating
//! fundamental constants.
//!
//! The chain runs from the spin model (how the E_- transition depends on α
//! and m_e), through quantum mixing (how a fast level oscillation becomes
//! excess relaxation), to upper limits on δα/α and δm_e/m_e and finally to
//! scalar dark matter couplings.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constants;
pub mod darkmatter;
pub mod inference;
pub mod mixer;
pub mod pipeline;
pub mod spin;

pub use darkmatter::{CouplingLimit, DarkMatterModel};
pub use inference::{DecayRecord, RateEstimate, UpperLimit};
pub use mixer::{MixingConfig, PopulationTrace};
pub use pipeline::{run_sweep, ExclusionTable, SweepConfig};
pub use spin::{NvSpinModel, SensitivityCoefficients};
