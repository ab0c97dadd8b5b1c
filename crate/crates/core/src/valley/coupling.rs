//! First-order intervalley matrix element
//! `Δ = Σ_G S(G) ∫ |ψ(z)|² e^{iQ_G z} U(z) dz`, `Q_G = G − 2k0`,
//! evaluated by trapezoidal quadrature on the envelope grid.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bloch::{BlochCoefficientTable, StructureFactor};
use crate::constants::MaterialConstants;
use crate::envelope::EnvelopeSolution;
use crate::heterostructure::ProfileSpec;
use crate::{Error, Result};

/// Points per period required of every oscillation in the quadrature.
pub const DEFAULT_MIN_POINTS_PER_PERIOD: f64 = 6.0;

/// The oscillatory potential `(A V0 / 2)[1 − cos(q (z − origin))]`,
/// restricted to `window` when given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WiggleTerm {
    pub amplitude: f64,
    pub q: f64,
    /// Phase reference and lattice origin (reported z of the interface).
    pub origin: f64,
    /// Reported-z interval carrying the oscillation.
    pub window: Option<(f64, f64)>,
}

impl WiggleTerm {
    pub fn from_spec(spec: &ProfileSpec) -> Self {
        Self {
            amplitude: spec.amplitude,
            q: spec.q(),
            origin: spec.z_offset,
            window: Some((spec.z_offset - spec.well_width, spec.z_offset)),
        }
    }
}

/// Precomputed structure factor plus the constants needed to evaluate
/// intervalley elements repeatedly (q-scans, ensembles).
#[derive(Debug, Clone)]
pub struct Coupler {
    pub structure: StructureFactor,
    pub constants: MaterialConstants,
    pub min_points_per_period: f64,
}

impl Coupler {
    pub fn new(table: &BlochCoefficientTable, constants: &MaterialConstants) -> Self {
        Self {
            structure: table.structure_factor(),
            constants: *constants,
            min_points_per_period: DEFAULT_MIN_POINTS_PER_PERIOD,
        }
    }

    /// `Q_G = G (2π/a0) − 2k0` for each significant structure-factor term.
    pub fn terms(&self) -> Vec<(f64, Complex64)> {
        let unit = self.constants.reciprocal_unit();
        let two_k0 = 2.0 * self.constants.k0();
        self.structure
            .significant()
            .map(|(g, s)| (g as f64 * unit - two_k0, s))
            .collect()
    }

    /// Largest |Q_G| + `extra` over significant terms.
    pub fn max_frequency(&self, extra: f64) -> f64 {
        self.terms()
            .iter()
            .map(|(q, _)| q.abs() + extra)
            .fold(0.0, f64::max)
    }

    /// Grid spacing needed to resolve every term with an extra wavevector
    /// `extra` at the configured points per period.
    pub fn required_spacing(&self, extra: f64) -> f64 {
        let f = self.max_frequency(extra);
        if f == 0.0 {
            f64::INFINITY
        } else {
            TAU / (f * self.min_points_per_period)
        }
    }

    pub(crate) fn check_resolution(&self, spacing: f64, extra: f64) -> Result<()> {
        let frequency = self.max_frequency(extra);
        if frequency == 0.0 {
            return Ok(());
        }
        let points_per_period = TAU / (frequency * spacing);
        if points_per_period < self.min_points_per_period {
            return Err(Error::GridTooCoarse {
                frequency,
                points_per_period,
                required: self.min_points_per_period,
            });
        }
        Ok(())
    }

    /// Matrix element of the Wiggle Well oscillation. The cosine is split
    /// into `e^{±iqz}/2` before quadrature, so each structure-factor term
    /// needs three Fourier sums of the (windowed) density.
    pub fn wiggle_element(&self, envelope: &EnvelopeSolution, wiggle: &WiggleTerm) -> Result<Complex64> {
        self.check_resolution(envelope.spacing, wiggle.q)?;
        if wiggle.amplitude == 0.0 {
            return Ok(Complex64::default());
        }
        let weights = window_weights(&envelope.z, envelope.spacing, wiggle.window);
        let density: Vec<f64> = envelope
            .psi
            .iter()
            .zip(&weights)
            .map(|(p, w)| p * p * w)
            .collect();
        let u: Vec<f64> = envelope.z.iter().map(|z| z - wiggle.origin).collect();
        let prefactor = 0.5 * wiggle.amplitude * self.constants.v0;
        let mut delta = Complex64::default();
        for (q_g, s) in self.terms() {
            let t0 = fourier_sum(&density, &u, q_g);
            let tp = fourier_sum(&density, &u, q_g + wiggle.q);
            let tm = fourier_sum(&density, &u, q_g - wiggle.q);
            delta += s * prefactor * (t0 - 0.5 * (tp + tm));
        }
        Ok(delta)
    }

    /// Matrix element of an arbitrary coupling potential `u_pot` sampled on
    /// the envelope grid. `origin` is the reported z of the lattice origin.
    pub fn potential_element(&self, envelope: &EnvelopeSolution, u_pot: &[f64], origin: f64) -> Result<Complex64> {
        if u_pot.len() != envelope.psi.len() {
            return Err(Error::InvalidInput("coupling potential length differs from envelope grid".into()));
        }
        self.check_resolution(envelope.spacing, 0.0)?;
        let h = envelope.spacing;
        let density: Vec<f64> = envelope
            .psi
            .iter()
            .zip(u_pot)
            .map(|(p, v)| p * p * v * h)
            .collect();
        let u: Vec<f64> = envelope.z.iter().map(|z| z - origin).collect();
        Ok(self
            .terms()
            .into_iter()
            .map(|(q_g, s)| s * fourier_sum(&density, &u, q_g))
            .sum())
    }

    /// Position-dependent off-diagonal coupling `Σ_G S(G) e^{iQ_G z} U(z)`
    /// of the two-component envelope equation.
    pub fn kernel(&self, z: &[f64], u_pot: &[f64], origin: f64) -> Vec<Complex64> {
        let terms = self.terms();
        z.iter()
            .zip(u_pot)
            .map(|(z, v)| {
                if *v == 0.0 {
                    return Complex64::default();
                }
                let u = z - origin;
                let phase: Complex64 = terms
                    .iter()
                    .map(|(q_g, s)| s * Complex64::from_polar(1.0, q_g * u))
                    .sum();
                phase * v
            })
            .collect()
    }
}

/// Σ_i f_i e^{i k u_i}.
fn fourier_sum(f: &[f64], u: &[f64], k: f64) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (fi, ui) in f.iter().zip(u) {
        if *fi != 0.0 {
            let (s, c) = (k * ui).sin_cos();
            re += fi * c;
            im += fi * s;
        }
    }
    Complex64::new(re, im)
}

/// Trapezoid weights of the indicator of `window` (h inside, h/2 on an
/// edge that falls on a grid point).
fn window_weights(z: &[f64], h: f64, window: Option<(f64, f64)>) -> Vec<f64> {
    let Some((lo, hi)) = window else {
        return vec![h; z.len()];
    };
    let eps = 1e-9 * h;
    z.iter()
        .map(|&zi| {
            if zi < lo - eps || zi > hi + eps {
                0.0
            } else if (zi - lo).abs() <= eps || (zi - hi).abs() <= eps {
                0.5 * h
            } else {
                h
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_envelope(sigma: f64, h: f64, half_width: f64) -> EnvelopeSolution {
        let n = (half_width / h).round() as i64;
        let z: Vec<f64> = (-n..=n).map(|i| i as f64 * h).collect();
        let norm = (std::f64::consts::PI.sqrt() * sigma).powf(-0.5);
        let psi = z.iter().map(|z| norm * (-z * z / (2.0 * sigma * sigma)).exp()).collect();
        EnvelopeSolution {
            z,
            psi,
            energy: 0.0,
            state_index: 0,
            spacing: h,
        }
    }

    #[test]
    fn zero_amplitude_gives_zero() {
        let c = MaterialConstants::default();
        let coupler = Coupler::new(&BlochCoefficientTable::fallback(), &c);
        let env = gaussian_envelope(1.5, 0.01, 15.0);
        let w = WiggleTerm {
            amplitude: 0.0,
            q: 19.0,
            origin: 0.0,
            window: None,
        };
        assert_eq!(coupler.wiggle_element(&env, &w).unwrap(), Complex64::default());
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let c = MaterialConstants::default();
        let coupler = Coupler::new(&BlochCoefficientTable::fallback(), &c);
        let env = gaussian_envelope(1.5, 0.06, 15.0);
        let w = WiggleTerm {
            amplitude: 0.05,
            q: 19.44,
            origin: 0.0,
            window: None,
        };
        assert!(matches!(coupler.wiggle_element(&env, &w), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn analytic_and_potential_paths_agree() {
        let c = MaterialConstants::default();
        let table = BlochCoefficientTable::diamond_model_broken(&c, 5, 0.2);
        let coupler = Coupler::new(&table, &c);
        let env = gaussian_envelope(2.0, 0.005, 20.0);
        let w = WiggleTerm {
            amplitude: 0.05,
            q: 3.7,
            origin: 0.3,
            window: Some((-12.0, 0.3)),
        };
        let u_pot: Vec<f64> = env
            .z
            .iter()
            .map(|&z| {
                if (-12.0..=0.3).contains(&z) {
                    0.5 * w.amplitude * c.v0 * (1.0 - (w.q * (z - w.origin)).cos())
                } else {
                    0.0
                }
            })
            .collect();
        let a = coupler.wiggle_element(&env, &w).unwrap();
        let b = coupler.potential_element(&env, &u_pot, w.origin).unwrap();
        // the two differ only through edge weights where the integrand is ~0
        assert!((a - b).norm() < 1e-6 * a.norm(), "{a} vs {b}");
    }
}
