use num_complex::Complex64;
use proptest::prelude::*;
use wiggle_core::disorder::{effective_profile, sample_alloy_field, DotGeometry, Extent, Statistics};
use wiggle_core::heterostructure::{build_profile, InterfaceShape, ProfileSpec};
use wiggle_core::spectrofit::voltage_to_energy;
use wiggle_core::valley::{evaluate_spec, BlochCoefficientTable, ValleyConfig};
use wiggle_core::{Execution, MaterialConstants};

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn profile_stays_in_unit_interval(
        amplitude in 0.0..0.4f64,
        offset in 0.0..0.3f64,
        width in 0.2..3.0f64,
        lambda in 1.0..5.0f64,
        linear in any::<bool>(),
    ) {
        let spec = ProfileSpec {
            amplitude,
            well_offset: offset,
            interface_width: width,
            wavelength: Some(lambda),
            interface_shape: if linear { InterfaceShape::LinearGrade } else { InterfaceShape::Tanh },
            ..ProfileSpec::default()
        };
        let p = build_profile(&spec, &MaterialConstants::default()).unwrap();
        prop_assert!(p.xbar.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn valley_splitting_ignores_global_bloch_phases(
        phi_plus in 0.0..6.3f64,
        phi_minus in 0.0..6.3f64,
        amplitude in 0.01..0.2f64,
    ) {
        let c = MaterialConstants::default();
        let table = BlochCoefficientTable::diamond_model_broken(&c, 7, 0.2);
        let mut rotated = table.clone();
        for e in &mut rotated.entries {
            e.c_plus *= Complex64::from_polar(1.0, phi_plus);
            e.c_minus *= Complex64::from_polar(1.0, phi_minus);
        }
        let cfg = ValleyConfig::default();
        let coupler = cfg.coupler(&table, &c);
        let spec = cfg.refined(&ProfileSpec::wiggle(amplitude, 2.0 * c.k0()), &coupler);
        let a = evaluate_spec(&spec, &coupler, &cfg).unwrap();
        let b = evaluate_spec(&spec, &cfg.coupler(&rotated, &c), &cfg).unwrap();
        prop_assert!((a.e_v - b.e_v).abs() <= 1e-10 * a.e_v);
    }

    #[test]
    fn statistics_are_permutation_invariant(
        mut values in proptest::collection::vec(-1e3..1e3f64, 1..40),
        seed in any::<u64>(),
    ) {
        let before = Statistics::from_values(&values).unwrap();
        // deterministic shuffle driven by the seed
        let n = values.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            values.swap(i, (s >> 33) as usize % (i + 1));
        }
        let after = Statistics::from_values(&values).unwrap();
        prop_assert!((before.mean - after.mean).abs() <= 1e-9 * before.mean.abs().max(1.0));
        prop_assert_eq!(before.median, after.median);
        prop_assert_eq!(before.percentile_5, after.percentile_5);
        prop_assert_eq!(before.percentile_95, after.percentile_95);
    }

    #[test]
    fn energy_is_linear_in_voltage(dv in -1.0..1.0f64, alpha in 1e-3..1.0f64, k in -5.0..5.0f64) {
        let a = voltage_to_energy(k * dv, alpha).unwrap();
        let b = k * voltage_to_energy(dv, alpha).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn effective_concentration_stays_in_unit_interval(seed in any::<u64>(), amplitude in 0.0..0.3f64) {
        let c = MaterialConstants::default();
        let spec = ProfileSpec {
            depth_below: 6.0,
            height_above: 3.0,
            ..ProfileSpec::wiggle(amplitude, 3.5)
        };
        let profile = build_profile(&spec, &c).unwrap();
        let dot = DotGeometry { hbar_omega_x: 20.0, hbar_omega_y: 20.0, center: (0.0, 0.0) };
        let f = sample_alloy_field(&profile, Extent::centered(40.0, 40.0), seed, &c, Execution::Sequential).unwrap();
        let eff = effective_profile(&f, &dot, &c).unwrap();
        prop_assert!(eff.xbar.iter().all(|x| (0.0..=1.0).contains(x)));
        for p in f.layer_concentrations(&dot, &c).unwrap() {
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
