// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

use nvscalar::darkmatter::{
    coupling_limit, ensemble_projection, field_amplitude, frequency_from_mass,
    mass_from_frequency, DarkMatterModel,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn mass_round_trip(f in 1e3f64..1e15) {
        let back = frequency_from_mass(mass_from_frequency(f));
        prop_assert!((back / f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn amplitude_inverse_in_mass(f in 1e6f64..1e12, rho in 0.01f64..10.0) {
        let dm = DarkMatterModel { rho_gev_cm3: rho, ..Default::default() };
        let m = mass_from_frequency(f);
        let a = field_amplitude(&dm, m).unwrap();
        let b = field_amplitude(&dm, 2.0 * m).unwrap();
        prop_assert!((a / b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn couplings_linear(f in 1e8f64..1e11, va in 0.0f64..1e-2, vm in 0.0f64..1e-2) {
        let dm = DarkMatterModel::default();
        let a = coupling_limit(f, va, vm, &dm).unwrap();
        let b = coupling_limit(f, 2.0 * va, 2.0 * vm, &dm).unwrap();
        let c = coupling_limit(2.0 * f, va, vm, &dm).unwrap();
        prop_assert!((b.inv_lambda_gamma - 2.0 * a.inv_lambda_gamma).abs() <= 1e-12 * b.inv_lambda_gamma);
        prop_assert!((c.inv_lambda_e - 2.0 * a.inv_lambda_e).abs() <= 1e-12 * c.inv_lambda_e);
        prop_assert!(a.inv_lambda_gamma >= 0.0 && a.inv_lambda_e >= 0.0);
        prop_assert!((a.m_phi_ev / f / 4.135667696e-15 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn projection_preserves_ratio(va in 1e-8f64..1e-2, vm in 1e-8f64..1e-2, factor in 1.0f64..1e6) {
        let l = coupling_limit(1e9, va, vm, &DarkMatterModel::default()).unwrap();
        let p = ensemble_projection(&l, factor).unwrap();
        prop_assert!(p.projected);
        prop_assert!((p.inv_lambda_e / p.inv_lambda_gamma - l.inv_lambda_e / l.inv_lambda_gamma).abs()
            <= 1e-12 * (l.inv_lambda_e / l.inv_lambda_gamma));
        prop_assert!((l.inv_lambda_gamma / p.inv_lambda_gamma / factor - 1.0).abs() < 1e-12);
    }
}
