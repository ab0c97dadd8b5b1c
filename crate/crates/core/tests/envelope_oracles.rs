use std::f64::consts::PI;

use wiggle_core::envelope::{solve_envelope, solve_hard_wall};
use wiggle_core::heterostructure::{build_profile, potential_from_profile, Grid, PotentialParams, PotentialProfile, ProfileSpec};
use wiggle_core::MaterialConstants;

const AIRY_A1: f64 = 2.338107410459767;

fn hard_wall_grid(h: f64, n: usize) -> Grid {
    // wall at z = 0 and z = (n + 1) h
    Grid {
        first: 1,
        len: n,
        spacing: h,
        origin: 0.0,
        points_per_monolayer: 1,
    }
}

#[test]
fn triangular_well_matches_airy_zero() {
    let c = MaterialConstants::default();
    let (m, ef) = (c.m_l, 0.0085);
    let h = 0.005;
    let n = 8000;
    let grid = hard_wall_grid(h, n);
    let v = (0..n).map(|i| ef * grid.z(i)).collect();
    let pot = PotentialProfile::from_total(grid, v).unwrap();
    let e = solve_hard_wall(&pot, m, 1, &c).unwrap()[0].energy;
    let exact = AIRY_A1 * (c.kinetic_prefactor(m) * ef * ef).powf(1.0 / 3.0);
    let rel = (e - exact).abs() / exact;
    assert!(rel < 1e-3, "E = {e}, Airy = {exact}, rel {rel}");
}

#[test]
fn infinite_well_converges_under_refinement() {
    let c = MaterialConstants::default();
    let l = 10.0;
    let mut last = f64::INFINITY;
    for n in [199usize, 399, 799, 1599] {
        let h = l / (n + 1) as f64;
        let pot = PotentialProfile::from_total(hard_wall_grid(h, n), vec![0.0; n]).unwrap();
        let states = solve_hard_wall(&pot, 0.92, 3, &c).unwrap();
        let mut worst: f64 = 0.0;
        for (k, s) in states.iter().enumerate() {
            let m = (k + 1) as f64;
            let exact = m * m * PI * PI * c.kinetic_prefactor(0.92) / (l * l);
            worst = worst.max(((s.energy - exact) / exact).abs());
        }
        assert!(worst < last, "error must shrink with refinement");
        last = worst;
    }
    assert!(last < 1e-4, "finest relative error {last}");
}

#[test]
fn wiggle_well_states_are_orthonormal() {
    let c = MaterialConstants::default();
    let spec = ProfileSpec {
        points_per_monolayer: 8,
        ..ProfileSpec::wiggle(0.09, 2.0 * PI / 1.8)
    };
    let pot = potential_from_profile(&build_profile(&spec, &c).unwrap(), &PotentialParams::default(), &c).unwrap();
    let states = solve_envelope(&pot, c.m_l, 4, &c).unwrap();
    for a in &states {
        for b in &states {
            let o = a.overlap(b);
            let want = if a.state_index == b.state_index { 1.0 } else { 0.0 };
            assert!((o - want).abs() < 1e-8, "<{}|{}> = {o}", a.state_index, b.state_index);
        }
    }
}
