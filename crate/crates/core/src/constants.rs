//! Material and physical constants. Units: nm, eV, Ge fraction.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// ħ²/(2 m0) in eV·nm² (CODATA 2018).
pub const HBAR2_OVER_2M0: f64 = 0.038_099_821;

/// Boltzmann constant in eV/K.
pub const K_B: f64 = 8.617_333e-5;

/// Material parameters of strained Si on SiGe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaterialConstants {
    /// Cubic lattice constant (nm).
    pub a0: f64,
    /// Valley minimum position as a fraction of 2π/a0.
    pub k0_fraction: f64,
    /// Longitudinal effective mass (m0).
    pub m_l: f64,
    /// Transverse effective mass (m0).
    pub m_t: f64,
    /// Ge-Si conduction-band site-energy difference (eV).
    pub v0: f64,
    /// ħ²/(2 m0) (eV·nm²).
    pub hbar2_over_2m0: f64,
}

impl Default for MaterialConstants {
    fn default() -> Self {
        Self {
            a0: 0.543,
            k0_fraction: 0.84,
            m_l: 0.92,
            m_t: 0.19,
            v0: -1.53,
            hbar2_over_2m0: HBAR2_OVER_2M0,
        }
    }
}

impl MaterialConstants {
    /// Valley minimum wavevector k0 (nm⁻¹).
    pub fn k0(&self) -> f64 {
        self.k0_fraction * self.reciprocal_unit()
    }

    /// 2π/a0 (nm⁻¹).
    pub fn reciprocal_unit(&self) -> f64 {
        2.0 * PI / self.a0
    }

    /// (001) monolayer spacing a0/4 (nm).
    pub fn monolayer(&self) -> f64 {
        self.a0 / 4.0
    }

    /// Wavevector of the single-zone valley coupling peak, 2k0.
    pub fn q_intra_zone(&self) -> f64 {
        2.0 * self.k0()
    }

    /// Wavevector of the Umklapp peak, 4π/a0 − 2k0.
    pub fn q_umklapp(&self) -> f64 {
        2.0 * self.reciprocal_unit() - 2.0 * self.k0()
    }

    /// Kinetic prefactor ħ²/(2m) for a mass given in units of m0.
    pub fn kinetic_prefactor(&self, mass: f64) -> f64 {
        self.hbar2_over_2m0 / mass
    }

    pub(crate) fn validate(&self) -> crate::Result<()> {
        let positive = [
            ("a0", self.a0),
            ("k0_fraction", self.k0_fraction),
            ("m_l", self.m_l),
            ("m_t", self.m_t),
            ("hbar2_over_2m0", self.hbar2_over_2m0),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::Error::spec(name, format!("must be positive, got {v}")));
            }
        }
        if !self.v0.is_finite() {
            return Err(crate::Error::spec("v0", "must be finite"));
        }
        Ok(())
    }
}
