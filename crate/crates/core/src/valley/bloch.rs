//! Plane-wave coefficients `c±(K)` of the cell-periodic parts of the two
//! z-valley Bloch functions, and the intervalley structure factor built
//! from them.
//!
//! Reciprocal-lattice vectors are stored as integer triples in units of
//! 2π/a0 (all-odd or all-even Miller indices for the fcc lattice).

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::MaterialConstants;
use crate::io;
use crate::{Error, Result};

/// CSV header of coefficient tables.
pub const TABLE_HEADER: [&str; 7] = ["Kx", "Ky", "Kz", "re_c_plus", "im_c_plus", "re_c_minus", "im_c_minus"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochEntry {
    pub k: [i32; 3],
    pub c_plus: Complex64,
    pub c_minus: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    pub min: f64,
    pub max: f64,
}

impl Default for NormBounds {
    fn default() -> Self {
        Self { min: 0.95, max: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochCoefficientTable {
    pub entries: Vec<BlochEntry>,
    pub source_label: String,
}

/// Σ over pairs with equal (Kx, Ky) of `c₊*(K) c₋(K′)`, keyed by
/// `Kz − K′z` in units of 2π/a0.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureFactor {
    pub terms: BTreeMap<i32, Complex64>,
}

impl StructureFactor {
    /// Terms whose weight is not negligible relative to the largest one.
    pub fn significant(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        let max = self.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        self.terms
            .iter()
            .filter(move |(_, c)| c.norm() > 1e-13 * max)
            .map(|(g, c)| (*g, *c))
    }

    pub fn get(&self, g: i32) -> Complex64 {
        self.terms.get(&g).copied().unwrap_or_default()
    }
}

const TOL_INTEGER: f64 = 1e-6;

impl BlochCoefficientTable {
    /// Single plane wave `K = 0`, `c± = 1`.
    pub fn fallback() -> Self {
        Self {
            entries: vec![BlochEntry {
                k: [0, 0, 0],
                c_plus: Complex64::new(1.0, 0.0),
                c_minus: Complex64::new(1.0, 0.0),
            }],
            source_label: "single-coefficient fallback (K = 0, c = 1)".into(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norms(&self) -> (f64, f64) {
        let p = self.entries.iter().map(|e| e.c_plus.norm_sqr()).sum();
        let m = self.entries.iter().map(|e| e.c_minus.norm_sqr()).sum();
        (p, m)
    }

    pub fn validate(&self, bounds: NormBounds) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::InvalidTable("table is empty".into()));
        }
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.k) {
                return Err(Error::InvalidTable(format!("duplicate K vector {:?}", e.k)));
            }
            let all_odd = e.k.iter().all(|v| v.rem_euclid(2) == 1);
            let all_even = e.k.iter().all(|v| v.rem_euclid(2) == 0);
            if !(all_odd || all_even) {
                return Err(Error::InvalidTable(format!(
                    "K = {:?} is not an fcc reciprocal-lattice vector",
                    e.k
                )));
            }
            let finite = [e.c_plus, e.c_minus]
                .iter()
                .all(|c| c.re.is_finite() && c.im.is_finite());
            if !finite {
                return Err(Error::InvalidTable(format!("non-finite coefficient at K = {:?}", e.k)));
            }
        }
        let (p, m) = self.norms();
        for (name, v) in [("c_plus", p), ("c_minus", m)] {
            if v < bounds.min - 1e-12 || v > bounds.max + 1e-12 {
                return Err(Error::InvalidTable(format!(
                    "sum |{name}|^2 = {v:.6} outside [{}, {}]",
                    bounds.min, bounds.max
                )));
            }
        }
        Ok(())
    }

    pub fn structure_factor(&self) -> StructureFactor {
        let mut terms: BTreeMap<i32, Complex64> = BTreeMap::new();
        for a in &self.entries {
            for b in &self.entries {
                if a.k[0] == b.k[0] && a.k[1] == b.k[1] {
                    *terms.entry(a.k[2] - b.k[2]).or_default() += a.c_plus.conj() * b.c_minus;
                }
            }
        }
        StructureFactor { terms }
    }

    /// Loads an 7-column CSV (`Kx, Ky, Kz, re/im c+, re/im c-`), K in
    /// units of 2π/a0. The source label defaults to the file name.
    pub fn load_csv(path: &Path, bounds: NormBounds) -> Result<Self> {
        let (header, rows) = io::read_numeric_csv(path)?;
        if header.len() != TABLE_HEADER.len() {
            return Err(Error::InvalidTable(format!(
                "{}: expected {} columns ({}), found {}",
                path.display(),
                TABLE_HEADER.len(),
                TABLE_HEADER.join(", "),
                header.len()
            )));
        }
        let mut entries = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            let mut k = [0i32; 3];
            for d in 0..3 {
                let v = r[d];
                if (v - v.round()).abs() > TOL_INTEGER {
                    return Err(Error::InvalidTable(format!(
                        "{}: row {}: K component {v} is not an integer multiple of 2π/a0",
                        path.display(),
                        i + 2
                    )));
                }
                k[d] = v.round() as i32;
            }
            entries.push(BlochEntry {
                k,
                c_plus: Complex64::new(r[3], r[4]),
                c_minus: Complex64::new(r[5], r[6]),
            });
        }
        let table = Self {
            entries,
            source_label: path
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
        };
        table.validate(bounds)?;
        Ok(table)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(TABLE_HEADER)?;
        for e in &self.entries {
            w.write_record([
                e.k[0].to_string(),
                e.k[1].to_string(),
                e.k[2].to_string(),
                e.c_plus.re.to_string(),
                e.c_plus.im.to_string(),
                e.c_minus.re.to_string(),
                e.c_minus.im.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Model 59-entry table (shells up to ⟨222⟩) obeying the diamond
    /// 4₁ screw symmetry `{C4z | a(1,1,1)/4}` of the lowest Δ₁ band and
    /// time reversal `c₋(K) = c₊(−K)*`.
    ///
    /// Plane-wave components are `e^{i(k0 ẑ − K)·r}`, the convention in
    /// which the intervalley phase is `Kz − K′z − 2k0`, so the symmetry
    /// reads `c(R⁻¹K) = i^−(h+k+l) c(K)`.
    /// Magnitudes fall off as `exp(−β(|k0 ẑ − K|² − k0²))` (units 2π/a0)
    /// and the total weight is normalized to 0.98. Orbit phases are drawn
    /// from `seed`. This is a synthetic stand-in for computed tables: it
    /// reproduces the selection rules (the `Kz − K′z = ±2` structure factor
    /// vanishes, giving the Umklapp extinction) but not band-structure
    /// magnitudes.
    pub fn diamond_model(constants: &MaterialConstants, seed: u64) -> Self {
        let beta = 1.5;
        let kf = constants.k0_fraction;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c_plus: BTreeMap<[i32; 3], Complex64> = BTreeMap::new();
        for rep in shell_vectors() {
            if c_plus.contains_key(&rep) {
                continue;
            }
            let orbit = screw_orbit(rep);
            let dz = kf - rep[2] as f64;
            let mag2 = (rep[0] * rep[0] + rep[1] * rep[1]) as f64 + dz * dz - kf * kf;
            let mag = (-beta * mag2).exp();
            let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let mut c = Complex64::from_polar(mag, phase);
            if orbit.len() == 1 && rep[2].rem_euclid(4) != 0 {
                // on-axis vectors with Kz ≢ 0 (mod 4) are forbidden
                c = Complex64::default();
            }
            for k in orbit {
                c_plus.insert(k, c);
                c *= i_pow(-(k[0] + k[1] + k[2]));
            }
        }
        let table = Self::from_plus(c_plus, "synthetic diamond-symmetric model table".into());
        table.normalized(0.98)
    }

    /// `diamond_model` with every `c₊` perturbed by a random complex
    /// amount of relative size `strength`, mimicking alloy-modified
    /// coefficients that break the screw selection rule.
    pub fn diamond_model_broken(constants: &MaterialConstants, seed: u64, strength: f64) -> Self {
        let base = Self::diamond_model(constants, seed);
        let typical = base
            .entries
            .iter()
            .map(|e| e.c_plus.norm())
            .fold(0.0, f64::max);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_b40c_e111_0000);
        let mut c_plus = BTreeMap::new();
        for e in &base.entries {
            let scale = strength * e.c_plus.norm().max(0.05 * typical);
            let kick = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
            c_plus.insert(e.k, e.c_plus + kick);
        }
        Self::from_plus(c_plus, format!("synthetic symmetry-broken model table (strength {strength})"))
            .normalized(0.98)
    }

    /// Same magnitudes as `self`, with an independent random phase on every
    /// `c₊` (time reversal kept for `c₋`).
    pub fn randomized_phases(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c_plus: BTreeMap<[i32; 3], Complex64> = self
            .entries
            .iter()
            .map(|e| {
                let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                (e.k, Complex64::from_polar(e.c_plus.norm(), phase))
            })
            .collect();
        Self::from_plus(c_plus, format!("{} (randomized phases)", self.source_label))
    }

    fn from_plus(c_plus: BTreeMap<[i32; 3], Complex64>, source_label: String) -> Self {
        let entries = c_plus
            .iter()
            .map(|(k, c)| {
                let minus_k = [-k[0], -k[1], -k[2]];
                let c_minus = c_plus.get(&minus_k).map_or(Complex64::default(), |c| c.conj());
                BlochEntry {
                    k: *k,
                    c_plus: *c,
                    c_minus,
                }
            })
            .collect();
        Self { entries, source_label }
    }

    fn normalized(mut self, total: f64) -> Self {
        let (p, _) = self.norms();
        let s = (total / p).sqrt();
        for e in &mut self.entries {
            e.c_plus *= s;
            e.c_minus *= s;
        }
        self
    }
}

fn i_pow(n: i32) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Orbit of K under repeated R⁻¹: (h, k, l) → (k, −h, l).
fn screw_orbit(k: [i32; 3]) -> Vec<[i32; 3]> {
    let mut out = vec![k];
    let mut cur = k;
    loop {
        cur = [cur[1], -cur[0], cur[2]];
        if cur == k {
            return out;
        }
        out.push(cur);
    }
}

/// fcc reciprocal-lattice vectors with |K|² ≤ 12 (shells 000, 111, 200,
/// 220, 311, 222): 59 vectors.
pub fn shell_vectors() -> Vec<[i32; 3]> {
    let mut out = Vec::new();
    for h in -3..=3i32 {
        for k in -3..=3i32 {
            for l in -3..=3i32 {
                let odd = [h, k, l].iter().all(|v| v.rem_euclid(2) == 1);
                let even = [h, k, l].iter().all(|v| v.rem_euclid(2) == 0);
                if (odd || even) && h * h + k * k + l * l <= 12 {
                    out.push([h, k, l]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_have_59_vectors() {
        assert_eq!(shell_vectors().len(), 59);
    }

    #[test]
    fn fallback_is_valid() {
        let t = BlochCoefficientTable::fallback();
        t.validate(NormBounds::default()).unwrap();
        let s = t.structure_factor();
        assert_eq!(s.terms.len(), 1);
        assert_eq!(s.get(0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn model_table_is_valid_and_extinguishes_umklapp() {
        let c = MaterialConstants::default();
        let t = BlochCoefficientTable::diamond_model(&c, 7);
        assert_eq!(t.len(), 59);
        t.validate(NormBounds::default()).unwrap();
        let s = t.structure_factor();
        let main = s.get(0).norm();
        assert!(main > 1e-3, "S(0) = {main}");
        assert!(s.get(2).norm() < 1e-14 * main.max(1.0));
        assert!(s.get(-2).norm() < 1e-14 * main.max(1.0));
        // odd differences never pair up (equal Kx, Ky forces equal parity)
        assert!(s.terms.keys().all(|g| g % 2 == 0));
    }

    #[test]
    fn broken_and_randomized_tables_restore_umklapp_term() {
        let c = MaterialConstants::default();
        let sym = BlochCoefficientTable::diamond_model(&c, 7);
        for t in [
            BlochCoefficientTable::diamond_model_broken(&c, 7, 0.2),
            sym.randomized_phases(11),
        ] {
            t.validate(NormBounds::default()).unwrap();
            assert!(t.structure_factor().get(2).norm() > 1e-4);
        }
    }

    #[test]
    fn duplicate_vectors_rejected() {
        let mut t = BlochCoefficientTable::fallback();
        t.entries.push(t.entries[0]);
        assert!(matches!(t.validate(NormBounds { min: 0.0, max: 2.0 }), Err(Error::InvalidTable(_))));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.csv");
        let t = BlochCoefficientTable::diamond_model(&MaterialConstants::default(), 3);
        t.write_csv(&path).unwrap();
        let back = BlochCoefficientTable::load_csv(&path, NormBounds::default()).unwrap();
        assert_eq!(back.entries, t.entries);
    }

    #[test]
    fn wrong_column_count_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "Kx,Ky,Kz,re\n0,0,0,1\n").unwrap();
        let err = BlochCoefficientTable::load_csv(&path, NormBounds::default()).unwrap_err();
        assert!(err.to_string().contains("expected 7 columns"));
    }
}
