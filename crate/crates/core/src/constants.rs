// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

//! Physical constants (CODATA 2018 exact / recommended values).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Planck constant in J·s (exact).
pub const PLANCK_J_S: f64 = 6.626_070_15e-34;
/// Planck constant in eV·s (exact to the quoted digits).
pub const PLANCK_EV_S: f64 = 4.135_667_696e-15;
/// Speed of light in m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Free-electron gyromagnetic ratio γ_e/2π in Hz/T.
pub const ELECTRON_GYROMAGNETIC_HZ_PER_T: f64 = 28.024_951_424_2e9;
/// ħc in GeV·cm, used for natural-unit conversions.
pub const HBAR_C_GEV_CM: f64 = 1.973_269_804e-14;

/// Bundle of constants carried by the spin model so that sensitivity studies
/// can perturb them without touching globals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// J·s
    pub h_planck: f64,
    /// J·s
    pub hbar: f64,
    /// m/s
    pub c_light: f64,
    /// γ_e/2π in Hz/T
    pub electron_gyromagnetic: f64,
    /// Planck constant in eV·s, i.e. eV per Hz.
    pub ev_per_hz: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            h_planck: PLANCK_J_S,
            hbar: PLANCK_J_S / (2.0 * PI),
            c_light: SPEED_OF_LIGHT,
            electron_gyromagnetic: ELECTRON_GYROMAGNETIC_HZ_PER_T,
            ev_per_hz: PLANCK_EV_S,
        }
    }
}

impl PhysicalConstants {
    /// Checks positivity and the h = 2πħ identity.
    pub fn is_consistent(&self) -> bool {
        let positive = [
            self.h_planck,
            self.hbar,
            self.c_light,
            self.electron_gyromagnetic,
            self.ev_per_hz,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0);
        positive && ((self.h_planck - 2.0 * PI * self.hbar) / self.h_planck).abs() < 1e-12
    }
}
