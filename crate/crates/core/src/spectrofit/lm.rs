//! Levenberg–Marquardt least squares with Marquardt diagonal scaling.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when an accepted step lowers the SSR by less than this
    /// relative amount.
    pub ftol: f64,
    /// Stop when every parameter moves by less than this relative amount.
    pub xtol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            ftol: 1e-14,
            xtol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmFit {
    pub params: Vec<f64>,
    /// `s² (JᵀJ)⁻¹` with `s² = SSR / (n − p)`.
    pub covariance: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub ssr: f64,
    pub iterations: usize,
}

impl LmFit {
    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.params.len())
            .map(|i| self.covariance[(i, i)].max(0.0).sqrt())
            .collect()
    }

    pub fn residual_rms(&self) -> f64 {
        (self.ssr / self.residuals.len() as f64).sqrt()
    }
}

/// Minimizes `Σ r_i(p)²`. `eval` returns the residuals (model − data) and
/// their Jacobian (rows = observations).
pub fn levenberg_marquardt<F>(x0: &[f64], options: LmOptions, eval: F) -> Result<LmFit>
where
    F: Fn(&[f64]) -> (Vec<f64>, DMatrix<f64>),
{
    let p = x0.len();
    let mut x = x0.to_vec();
    let (mut r, mut jac) = eval(&x);
    let n = r.len();
    if n <= p {
        return Err(Error::InvalidInput(format!("{n} observations cannot fix {p} parameters")));
    }
    let ssr_of = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let mut ssr = ssr_of(&r);
    if !ssr.is_finite() {
        return Err(Error::InvalidInput("initial guess gives non-finite residuals".into()));
    }
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iterations {
        iterations += 1;
        if ssr == 0.0 {
            converged = true;
            break;
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * DVector::from_column_slice(&r);
        let dmax = jtj.diagonal().max();
        let mut accepted = false;
        while lambda < 1e30 {
            let mut a = jtj.clone();
            for i in 0..p {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-12 * dmax);
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let (rt, jt) = eval(&trial);
            let st = ssr_of(&rt);
            if st.is_finite() && st < ssr {
                let small_step = trial
                    .iter()
                    .zip(&x)
                    .all(|(a, b)| (a - b).abs() <= options.xtol * (b.abs() + options.xtol));
                let small_gain = (ssr - st) <= options.ftol * ssr;
                x = trial;
                r = rt;
                jac = jt;
                ssr = st;
                lambda = (lambda / 10.0).max(1e-15);
                accepted = true;
                converged = small_step || small_gain;
                break;
            }
            lambda *= 10.0;
        }
        // no downhill step at any damping: a minimum to machine precision
        if !accepted || converged {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iterations });
    }
    let jtj = jac.transpose() * &jac;
    let s2 = ssr / (n - p) as f64;
    let inv = jtj
        .clone()
        .try_inverse()
        .or_else(|| jtj.pseudo_inverse(1e-300).ok())
        .unwrap_or_else(|| DMatrix::from_element(p, p, f64::NAN));
    Ok(LmFit {
        params: x,
        covariance: inv * s2,
        residuals: r,
        ssr,
        iterations,
    })
}
