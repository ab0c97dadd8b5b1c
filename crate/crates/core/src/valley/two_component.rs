//! Two-component envelope equation
//!
//! ```text
//! [ T + V      Δ(z) ] [φ₊]     [φ₊]
//! [ Δ*(z)    T + V  ] [φ₋] = E [φ₋]
//! ```
//!
//! discretized with the same 3-point kinetic operator as the single-valley
//! solver. Ordering unknowns as (φ₊ᵢ, φ₋ᵢ) makes the matrix block
//! tridiagonal with 2×2 Hermitian diagonal blocks and scalar off-diagonal
//! blocks `−t·I`, so eigenvalues follow from a block Sturm count
//! (Sylvester inertia of the block LDLᴴ factorization) and bisection.

use num_complex::Complex64;

use crate::constants::MaterialConstants;
use crate::envelope::check_uniform;
use crate::envelope::tridiag::bisect;
use crate::heterostructure::PotentialProfile;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct TwoComponentHamiltonian {
    diag: Vec<f64>,
    hop: f64,
    coupling: Vec<Complex64>,
}

impl TwoComponentHamiltonian {
    pub fn new(
        potential: &PotentialProfile,
        coupling: Vec<Complex64>,
        mass: f64,
        constants: &MaterialConstants,
    ) -> Result<Self> {
        let h = potential.spacing();
        check_uniform(&potential.z, h)?;
        if coupling.len() != potential.len() {
            return Err(Error::InvalidInput("coupling kernel length differs from grid".into()));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::spec("mass", "must be positive"));
        }
        let t = constants.kinetic_prefactor(mass) / (h * h);
        Ok(Self {
            diag: potential.v_total.iter().map(|v| 2.0 * t + v).collect(),
            hop: t,
            coupling,
        })
    }

    fn bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (d, c) in self.diag.iter().zip(&self.coupling) {
            let r = 2.0 * self.hop + c.norm();
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let (lo, hi) = self.bounds();
        let pivmin = f64::EPSILON * lo.abs().max(hi.abs()) * 1e-3;
        let t2 = self.hop * self.hop;
        let mut count = 0;
        // previous block D = [[p, c], [c*, r]] stored through its inverse
        let mut inv: Option<(f64, f64, Complex64)> = None;
        for (d, c) in self.diag.iter().zip(&self.coupling) {
            let (mut p, mut r, mut cc) = (d - sigma, d - sigma, *c);
            if let Some((ip, ir, ic)) = inv {
                p -= t2 * ip;
                r -= t2 * ir;
                cc -= t2 * ic;
            }
            let mean = 0.5 * (p + r);
            let spread = (0.25 * (p - r) * (p - r) + cc.norm_sqr()).sqrt();
            let mut lam_lo = mean - spread;
            let mut lam_hi = mean + spread;
            if lam_lo.abs() < pivmin {
                lam_lo = -pivmin;
            }
            if lam_hi.abs() < pivmin {
                lam_hi = -pivmin;
            }
            count += (lam_lo < 0.0) as usize + (lam_hi < 0.0) as usize;
            let det = lam_lo * lam_hi;
            // D⁻¹ = adj(D) / det
            inv = Some((r / det, p / det, -cc / det));
        }
        count
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (lo, hi) = self.bounds();
        let pad = f64::EPSILON * lo.abs().max(hi.abs()) * 4.0;
        bisect(lo - pad, hi + pad, |s| self.count_below(s) > k)
    }
}

/// Lowest two levels (the valley doublet) of the two-component problem.
pub fn doublet(
    potential: &PotentialProfile,
    coupling: Vec<Complex64>,
    mass: f64,
    constants: &MaterialConstants,
) -> Result<(f64, f64)> {
    let ham = TwoComponentHamiltonian::new(potential, coupling, mass, constants)?;
    let e0 = ham.eigenvalue(0);
    let e1 = ham.eigenvalue(1);
    let boundary = potential.v_total[0].min(potential.v_total[potential.len() - 1]);
    if e1 >= boundary {
        return Err(Error::NotConfined {
            state: 1,
            energy: e1,
            boundary,
        });
    }
    Ok((e0, e1))
}
