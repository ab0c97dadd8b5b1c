//! Thermally broadened charge transition
//! `I(V) = A tanh((V − V0) / (2 k_B τ)) + b V + I0`, `τ = T_e / α`.
//!
//! `τ` carries units of K·V/eV, so `k_B τ` is a voltage. The fit works
//! with the tanh half-width `w = 2 k_B τ` (V) and converts at the end.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, LmOptions};
use super::TransitionTrace;
use crate::constants::K_B;
use crate::{Error, Result};

/// Parameters of the transition model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionParams {
    pub amplitude: f64,
    /// K·V/eV
    pub tau: f64,
    pub slope: f64,
    /// V
    pub v0: f64,
    pub offset: f64,
}

impl TransitionParams {
    /// `2 k_B τ` in volts.
    pub fn width(&self) -> f64 {
        2.0 * K_B * self.tau
    }

    pub fn current(&self, v: f64) -> f64 {
        self.amplitude * ((v - self.v0) / self.width()).tanh() + self.slope * v + self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionFit {
    pub params: TransitionParams,
    /// One standard error per parameter, from `s² (JᵀJ)⁻¹`.
    pub std_errors: TransitionParams,
    /// Order: amplitude, tau, slope, v0, offset.
    pub covariance: Vec<Vec<f64>>,
    pub residual_rms: f64,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_mc: Option<f64>,
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// First voltage where the (ascending) normalized rise crosses `level`.
fn crossing(v: &[f64], s: &[f64], level: f64) -> Option<f64> {
    s.windows(2).zip(v.windows(2)).find_map(|(sw, vw)| {
        if (sw[0] - level) * (sw[1] - level) <= 0.0 && sw[0] != sw[1] {
            Some(vw[0] + (level - sw[0]) * (vw[1] - vw[0]) / (sw[1] - sw[0]))
        } else {
            None
        }
    })
}

/// Heuristic starting point: b from the edge slopes, A and I0 from the
/// edge levels, V0 at the steepest smoothed point and the width from the
/// 25–75 % rise.
fn initial_guess(v: &[f64], i: &[f64]) -> [f64; 5] {
    let n = v.len();
    let edge = (n / 10).max(3);
    let (bl, _) = linear_fit(&v[..edge], &i[..edge]);
    let (br, _) = linear_fit(&v[n - edge..], &i[n - edge..]);
    let b = 0.5 * (bl + br);
    let y: Vec<f64> = v.iter().zip(i).map(|(v, i)| i - b * v).collect();
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let (lo, hi) = (mean(&y[..edge]), mean(&y[n - edge..]));
    let amplitude = 0.5 * (hi - lo);
    let offset = 0.5 * (hi + lo);

    let half = 2usize;
    let mut best = (0.0, v[n / 2]);
    for k in half..n - half {
        let d = (y[k + half] - y[k - half]) / (v[k + half] - v[k - half]);
        if d.abs() > best.0 {
            best = (d.abs(), v[k]);
        }
    }
    let v0 = best.1;
    let span = v[n - 1] - v[0];
    let width = if amplitude != 0.0 {
        let s: Vec<f64> = y.iter().map(|y| (y - offset) / amplitude).collect();
        match (crossing(v, &s, -0.5), crossing(v, &s, 0.5)) {
            // tanh(x) = ±1/2 at x = ±0.5493
            (Some(a), Some(c)) if c > a => (c - a) / 1.0986,
            _ => 0.1 * span,
        }
    } else {
        0.1 * span
    };
    [amplitude, width.max(1e-6 * span), b, v0, offset]
}

/// Fits the five-parameter transition model.
pub fn fit_transition(trace: &TransitionTrace) -> Result<TransitionFit> {
    trace.validate()?;
    let (v, i) = trace.ascending();
    let x0 = initial_guess(&v, &i);
    let fit = levenberg_marquardt(&x0, LmOptions::default(), |p| {
        let (a, w, b, v0, i0) = (p[0], p[1], p[2], p[3], p[4]);
        let mut jac = DMatrix::zeros(v.len(), 5);
        let r = v
            .iter()
            .zip(&i)
            .enumerate()
            .map(|(k, (&vk, &ik))| {
                let x = (vk - v0) / w;
                let t = x.tanh();
                let sech2 = 1.0 - t * t;
                jac[(k, 0)] = t;
                jac[(k, 1)] = -a * sech2 * x / w;
                jac[(k, 2)] = vk;
                jac[(k, 3)] = -a * sech2 / w;
                jac[(k, 4)] = 1.0;
                a * t + b * vk + i0 - ik
            })
            .collect();
        (r, jac)
    })?;
    let p = &fit.params;
    let se = fit.std_errors();
    let rms = fit.residual_rms();
    let amplitude = p[0].abs();
    let scale = i.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    if amplitude < 3.0 * rms || amplitude <= 1e-9 * scale {
        return Err(Error::NoTransitionFound { amplitude, rms });
    }
    // tanh is odd: report a positive width with the sign carried by A
    let sign = p[1].signum();
    let to_tau = 1.0 / (2.0 * K_B);
    let mut cov = fit.covariance.clone();
    for k in 0..5 {
        let f = match k {
            0 => sign,
            1 => sign * to_tau,
            _ => 1.0,
        };
        for m in 0..5 {
            cov[(k, m)] *= f;
            cov[(m, k)] *= f;
        }
    }
    Ok(TransitionFit {
        params: TransitionParams {
            amplitude: sign * p[0],
            tau: sign * p[1] * to_tau,
            slope: p[2],
            v0: p[3],
            offset: p[4],
        },
        std_errors: TransitionParams {
            amplitude: se[0],
            tau: se[1] * to_tau,
            slope: se[2],
            v0: se[3],
            offset: se[4],
        },
        covariance: (0..5).map(|k| (0..5).map(|m| cov[(k, m)]).collect()).collect(),
        residual_rms: rms,
        iterations: fit.iterations,
        t_mc: trace.t_mc,
    })
}
