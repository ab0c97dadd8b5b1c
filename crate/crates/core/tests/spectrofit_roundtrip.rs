use wiggle_core::constants::K_B;
use wiggle_core::spectrofit::{
    energy_with_error, fit_lever_arm, fit_lever_arm_from_traces, fit_transition, synthetic_tau_points,
    synthetic_trace, Measured, TransitionParams,
};

// 50 to 500 mK in 25 mK steps
fn temperatures() -> Vec<f64> {
    (0..19).map(|k| 0.05 + 0.025 * k as f64).collect()
}

// The fit is a noisy estimator, so the tolerance is checked per draw and
// required to hold for at least 95% of them.
#[test]
fn lever_arm_recovered_at_one_percent_noise() {
    let draws = 200;
    let (mut ok_alpha, mut ok_t) = (0, 0);
    let (mut bias_alpha, mut bias_t) = (0.0, 0.0);
    for seed in 0..draws {
        let pts = synthetic_tau_points(0.1, 0.1, &temperatures(), 0.01, seed);
        let f = fit_lever_arm(&pts).unwrap();
        ok_alpha += usize::from((f.alpha / 0.1 - 1.0).abs() < 0.01);
        ok_t += usize::from((f.t_e0 / 0.1 - 1.0).abs() < 0.05);
        bias_alpha += f.alpha / 0.1 - 1.0;
        bias_t += f.t_e0 / 0.1 - 1.0;
    }
    let n = draws as f64;
    assert!(ok_alpha as f64 >= 0.95 * n, "alpha within 1% in {ok_alpha}/{draws}");
    assert!(ok_t as f64 >= 0.95 * n, "T_e0 within 5% in {ok_t}/{draws}");
    assert!((bias_alpha / n).abs() < 1e-3 && (bias_t / n).abs() < 5e-3);
}

#[test]
fn lever_arm_from_fitted_traces() {
    let (alpha, t_e0) = (0.1, 0.1);
    let traces: Vec<_> = temperatures()
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let tau = (t * t + t_e0 * t_e0).sqrt() / alpha;
            let half = 12.0 * K_B * tau;
            let p = TransitionParams {
                amplitude: 1.0,
                tau,
                slope: 0.3,
                v0: 0.2,
                offset: 1.5,
            };
            synthetic_trace(&p, (0.2 - half, 0.2 + half), 301, 0.01, 100 + k as u64, Some(t))
        })
        .collect();
    let (fits, lever) = fit_lever_arm_from_traces(&traces).unwrap();
    assert_eq!(fits.len(), temperatures().len());
    assert!((lever.alpha / alpha - 1.0).abs() < 0.01, "alpha {}", lever.alpha);
    assert!((lever.t_e0 / t_e0 - 1.0).abs() < 0.05, "T_e0 {}", lever.t_e0);
}

#[test]
fn symmetric_window_centers_v0() {
    let p = TransitionParams {
        amplitude: 1.0,
        tau: 0.002 / K_B,
        slope: 0.0,
        v0: 0.0,
        offset: 0.0,
    };
    for seed in 0..10 {
        let f = fit_transition(&synthetic_trace(&p, (-0.03, 0.03), 201, 0.01, seed, None)).unwrap();
        assert!(f.params.v0.abs() < 3.0 * f.std_errors.v0, "seed {seed}");
        assert!((f.params.tau / p.tau - 1.0).abs() < 0.02);
    }
}

#[test]
fn tau_invariant_under_affine_current_rescaling() {
    let p = TransitionParams {
        amplitude: 0.8,
        tau: 0.002 / K_B,
        slope: 1.0,
        v0: 0.01,
        offset: 0.2,
    };
    let t = synthetic_trace(&p, (-0.03, 0.05), 201, 0.01, 9, None);
    let base = fit_transition(&t).unwrap();
    for (scale, shift) in [(3.0, 0.0), (1e-6, 2e-6), (-2.0, 7.0), (150.0, -40.0)] {
        let mut u = t.clone();
        u.sensor_current.iter_mut().for_each(|i| *i = scale * *i + shift);
        let f = fit_transition(&u).unwrap();
        assert!((f.params.tau / base.params.tau - 1.0).abs() < 1e-6, "scale {scale}");
        assert!((f.params.amplitude / (scale * base.params.amplitude) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn standard_errors_grow_with_noise() {
    let p = TransitionParams {
        amplitude: 1.0,
        tau: 0.002 / K_B,
        slope: 0.0,
        v0: 0.0,
        offset: 0.0,
    };
    let draws = 60;
    let mean_err = |noise: f64| {
        (0..draws)
            .map(|s| {
                fit_transition(&synthetic_trace(&p, (-0.03, 0.03), 201, noise, s, None))
                    .unwrap()
                    .std_errors
                    .tau
            })
            .sum::<f64>()
            / draws as f64
    };
    let errs: Vec<f64> = [0.002, 0.005, 0.01, 0.02, 0.05].iter().map(|&n| mean_err(n)).collect();
    assert!(errs.windows(2).all(|w| w[1] > w[0]), "{errs:?}");

    let lever = |noise: f64| {
        (0..draws)
            .map(|s| fit_lever_arm(&synthetic_tau_points(0.1, 0.1, &temperatures(), noise, s)).unwrap().alpha_err)
            .sum::<f64>()
            / draws as f64
    };
    let le: Vec<f64> = [0.002, 0.005, 0.01, 0.02].iter().map(|&n| lever(n)).collect();
    assert!(le.windows(2).all(|w| w[1] > w[0]), "{le:?}");
}

#[test]
fn quadrature_propagation_is_exact() {
    let dv = Measured {
        value: 164e-6,
        std_err: 0.02 * 164e-6,
    };
    let alpha = Measured {
        value: 0.1,
        std_err: 0.003,
    };
    let e = energy_with_error(dv, alpha).unwrap();
    let closed = 0.1 * 164e-6 * (0.02f64.powi(2) + 0.03f64.powi(2)).sqrt();
    assert!((e.std_err - closed).abs() <= 1e-15 * closed.abs().max(1e-30) + f64::EPSILON * closed);
    assert_eq!(e.value, 0.1 * 164e-6);
}
