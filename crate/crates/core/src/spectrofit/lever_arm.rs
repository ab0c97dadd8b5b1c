//! Lever arm and base electron temperature from the temperature dependence
//! `τ(T_MC) = sqrt(T_MC² + T_e0²) / α`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::lm::{levenberg_marquardt, LmOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauPoint {
    /// K
    pub t_mc: f64,
    /// K·V/eV
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeverArmFit {
    /// eV/V
    pub alpha: f64,
    pub alpha_err: f64,
    /// K
    pub t_e0: f64,
    pub t_e0_err: f64,
    /// Order: alpha, t_e0.
    pub covariance: [[f64; 2]; 2],
    pub points: Vec<TauPoint>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl LeverArmFit {
    pub fn tau_at(&self, t_mc: f64) -> f64 {
        (t_mc * t_mc + self.t_e0 * self.t_e0).sqrt() / self.alpha
    }
}

pub fn fit_lever_arm(points: &[TauPoint]) -> Result<LeverArmFit> {
    if points.len() < 3 {
        return Err(Error::InvalidInput("a lever-arm fit needs at least 3 points".into()));
    }
    if points
        .iter()
        .any(|p| !(p.t_mc.is_finite() && p.t_mc >= 0.0 && p.tau.is_finite() && p.tau > 0.0))
    {
        return Err(Error::InvalidInput("T_MC must be ≥ 0 and tau > 0".into()));
    }
    // τ² = T²/α² + T_e0²/α² is linear in T²
    let x: Vec<f64> = points.iter().map(|p| p.t_mc * p.t_mc).collect();
    let y: Vec<f64> = points.iter().map(|p| p.tau * p.tau).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::IllConditioned("all points share one T_MC".into()));
    }
    let slope = sxy / sxx;
    if slope <= 0.0 {
        return Err(Error::IllConditioned("tau does not grow with T_MC".into()));
    }
    let alpha0 = slope.powf(-0.5);
    let t0 = ((my - slope * mx).max(0.0) / slope).sqrt();
    let tmax = points.iter().fold(0.0_f64, |m, p| m.max(p.t_mc));
    let x0 = [alpha0, t0.max(1e-3 * tmax)];

    let fit = levenberg_marquardt(&x0, LmOptions::default(), |p| {
        let (a, t0) = (p[0], p[1]);
        let mut jac = DMatrix::zeros(points.len(), 2);
        let r = points
            .iter()
            .enumerate()
            .map(|(k, pt)| {
                let s = (pt.t_mc * pt.t_mc + t0 * t0).sqrt();
                jac[(k, 0)] = -s / (a * a);
                jac[(k, 1)] = if s > 0.0 { t0 / (a * s) } else { 0.0 };
                s / a - pt.tau
            })
            .collect();
        (r, jac)
    })?;
    let alpha = fit.params[0];
    if !(alpha > 0.0) {
        return Err(Error::IllConditioned(format!("fitted alpha {alpha} is not positive")));
    }
    // the model is even in T_e0
    let sign = fit.params[1].signum();
    let t_e0 = fit.params[1].abs();
    if tmax < 0.5 * t_e0 {
        return Err(Error::IllConditioned(format!(
            "highest T_MC {tmax} K is far below the fitted T_e0 {t_e0} K"
        )));
    }
    let se = fit.std_errors();
    let c = &fit.covariance;
    Ok(LeverArmFit {
        alpha,
        alpha_err: se[0],
        t_e0,
        t_e0_err: se[1],
        covariance: [[c[(0, 0)], sign * c[(0, 1)]], [sign * c[(1, 0)], c[(1, 1)]]],
        points: points.to_vec(),
        residuals: fit.residuals,
        iterations: fit.iterations,
    })
}
