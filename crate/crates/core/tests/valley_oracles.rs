use std::f64::consts::PI;

use wiggle_core::envelope::{ground_state, EnvelopeSolution};
use wiggle_core::heterostructure::{build_profile, potential_from_profile, ProfileSpec};
use wiggle_core::valley::scan::q_grid;
use wiggle_core::valley::{
    evaluate_spec, intervalley_element, scan_q, BlochCoefficientTable, ValleyConfig, ValleyMode, WiggleTerm,
};
use wiggle_core::{Execution, MaterialConstants};

fn gaussian(sigma: f64, h: f64, half: f64) -> EnvelopeSolution {
    let n = (half / h).round() as i64;
    let z: Vec<f64> = (-n..=n).map(|i| i as f64 * h).collect();
    let norm = (PI.sqrt() * sigma).powf(-0.5);
    EnvelopeSolution {
        psi: z.iter().map(|z| norm * (-z * z / (2.0 * sigma * sigma)).exp()).collect(),
        z,
        energy: 0.0,
        state_index: 0,
        spacing: h,
    }
}

#[test]
fn gaussian_envelope_matches_closed_form() {
    let c = MaterialConstants::default();
    let table = BlochCoefficientTable::fallback();
    let two_k0 = 2.0 * c.k0();
    for (sigma, q, n_ge) in [(1.5, 19.0, 0.05), (2.0, 18.5, 0.02), (1.0, 21.0, 0.1)] {
        let env = gaussian(sigma, 0.004, 25.0);
        let w = WiggleTerm {
            amplitude: n_ge,
            q,
            origin: 0.0,
            window: None,
        };
        let got = intervalley_element(&env, &table, &w, &c).unwrap();
        let f = |k: f64| (-k * k * sigma * sigma / 4.0).exp();
        let want = n_ge * c.v0.abs() / 4.0 * (f(two_k0 - q) + f(two_k0 + q) - 2.0 * f(two_k0)).abs();
        let rel = (got.delta.norm() - want).abs() / want;
        assert!(rel < 1e-6, "sigma {sigma} q {q}: {} vs {want}", got.delta.norm());
        assert_eq!(got.e_v, 2.0 * got.delta.norm());
    }
}

#[test]
fn symmetric_table_extinguishes_umklapp_coupling() {
    let c = MaterialConstants::default();
    let spec = ProfileSpec {
        points_per_monolayer: 16,
        ..ProfileSpec::wiggle(0.05, c.q_umklapp())
    };
    let cfg = ValleyConfig::default();
    let sym = BlochCoefficientTable::diamond_model(&c, 7);
    let rnd = sym.randomized_phases(11);
    let e_sym = evaluate_spec(&spec, &cfg.coupler(&sym, &c), &cfg).unwrap().e_v;
    let e_rnd = evaluate_spec(&spec, &cfg.coupler(&rnd, &c), &cfg).unwrap().e_v;
    assert!(e_sym < 0.1 * e_rnd, "symmetric {e_sym} vs randomized {e_rnd}");
}

#[test]
fn two_component_agrees_with_perturbative_in_weak_coupling() {
    let c = MaterialConstants::default();
    let table = BlochCoefficientTable::diamond_model_broken(&c, 7, 0.2);
    for q in [c.q_umklapp(), 12.0] {
        let spec = ProfileSpec {
            points_per_monolayer: 16,
            ..ProfileSpec::wiggle(0.05, q)
        };
        let pert = ValleyConfig::default();
        let full = ValleyConfig {
            mode: ValleyMode::TwoComponent,
            ..Default::default()
        };
        let a = evaluate_spec(&spec, &pert.coupler(&table, &c), &pert).unwrap().e_v;
        let b = evaluate_spec(&spec, &full.coupler(&table, &c), &full).unwrap().e_v;
        assert!(((b - a) / a).abs() < 0.05, "q {q}: perturbative {a}, two-component {b}");
    }
}

#[test]
fn coupling_decays_far_from_resonance() {
    let c = MaterialConstants::default();
    let table = BlochCoefficientTable::fallback();
    let cfg = ValleyConfig::default();
    let curve = scan_q(
        &ProfileSpec::wiggle(0.05, 1.0),
        &q_grid(20.0, 60.0, 40),
        &table,
        &cfg,
        &c,
        Execution::Parallel,
    )
    .unwrap();
    let near = curve.max_in(19.0, 21.0).unwrap().1;
    let far = curve.max_in(45.0, 60.0).unwrap().1;
    assert!(far < 0.02 * near, "far {far} vs resonance {near}");
}

#[test]
fn main_peak_is_linear_in_concentration() {
    let c = MaterialConstants::default();
    let table = BlochCoefficientTable::fallback();
    let cfg = ValleyConfig::default();
    let grid = q_grid(18.5, 20.5, 80);
    let peak = |a: f64| {
        scan_q(&ProfileSpec::wiggle(a, 1.0), &grid, &table, &cfg, &c, Execution::Parallel)
            .unwrap()
            .max_in(18.5, 20.5)
            .unwrap()
            .1
    };
    let ratio = peak(0.10) / peak(0.05);
    assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
}

#[test]
fn element_is_linear_in_v0_and_concentration_for_fixed_envelope() {
    let c = MaterialConstants::default();
    let spec = ProfileSpec {
        points_per_monolayer: 16,
        ..ProfileSpec::wiggle(0.05, 19.0)
    };
    let pot = potential_from_profile(&build_profile(&spec, &c).unwrap(), &Default::default(), &c).unwrap();
    let env = ground_state(&pot, c.m_l, &c).unwrap();
    let table = BlochCoefficientTable::diamond_model_broken(&c, 2, 0.2);
    let w = WiggleTerm::from_spec(&spec);
    let base = intervalley_element(&env, &table, &w, &c).unwrap().e_v;
    let c2 = MaterialConstants { v0: 2.0 * c.v0, ..c };
    let w2 = WiggleTerm {
        amplitude: 2.0 * w.amplitude,
        ..w
    };
    let both = intervalley_element(&env, &table, &w2, &c2).unwrap().e_v;
    assert!((both / base - 4.0).abs() < 1e-12);
}
