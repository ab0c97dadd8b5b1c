//! Random-alloy disorder seen by a quantum dot.
//!
//! Each (001) monolayer is a square lattice of sites with spacing
//! `a0/√2`, shifted by half a cell from layer to layer as in diamond.
//! Sites are Ge with the probability given by the mean concentration of
//! their layer. A dot with Gaussian lateral density `|χ(x, y)|²` averages
//! each layer into an effective concentration `p_eff(ℓ)`, and the layer
//! fluctuations `p_eff(ℓ) − x̄(ℓ)` are added to the smooth profile.

pub mod ensemble;
pub mod sweep;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::{MaterialConstants, HBAR2_OVER_2M0};
use crate::exec::Execution;
use crate::heterostructure::ConcentrationProfile;
use crate::{Error, Result};

pub use ensemble::{ensemble, DisorderEnsemble, EnsembleSample, EnsembleSpec, Statistics};
pub use sweep::{
    case1_sweep, case2_sweep, paired_sweeps, write_sweep_csv, PairedSweep, SweepPoint, SweepRange, SweepSpec,
};

/// Largest fraction of `|χ|²` allowed outside the sampled field.
pub const MAX_LOST_MASS: f64 = 1e-6;

/// Lateral harmonic confinement `½ m_t [ω_x² x² + ω_y² (y − y0)²]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DotGeometry {
    /// meV
    pub hbar_omega_x: f64,
    /// meV
    pub hbar_omega_y: f64,
    /// (x0, y0) in nm.
    pub center: (f64, f64),
}

impl Default for DotGeometry {
    fn default() -> Self {
        Self {
            hbar_omega_x: 2.0,
            hbar_omega_y: 2.0,
            center: (0.0, 0.0),
        }
    }
}

impl DotGeometry {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("hbar_omega_x", self.hbar_omega_x), ("hbar_omega_y", self.hbar_omega_y)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::spec(field, "must be positive"));
            }
        }
        if !(self.center.0.is_finite() && self.center.1.is_finite()) {
            return Err(Error::spec("center", "must be finite"));
        }
        Ok(())
    }

    /// `r = sqrt(ħ / (m_t ω))` in nm for an orbital energy in meV.
    pub fn radius(hbar_omega_mev: f64, constants: &MaterialConstants) -> f64 {
        (2.0 * HBAR2_OVER_2M0 / (constants.m_t * hbar_omega_mev * 1e-3)).sqrt()
    }

    pub fn radii(&self, constants: &MaterialConstants) -> (f64, f64) {
        (
            Self::radius(self.hbar_omega_x, constants),
            Self::radius(self.hbar_omega_y, constants),
        )
    }

    /// Fraction of `|χ|²` outside `extent`.
    pub fn lost_mass(&self, extent: &Extent, constants: &MaterialConstants) -> f64 {
        let (rx, ry) = self.radii(constants);
        // |χ|² ∝ exp(−x²/r²): the tail beyond distance d is erfc(d/r)/2
        let inside = |c: f64, r: f64, (lo, hi): (f64, f64)| {
            if c <= lo || c >= hi {
                return 0.0;
            }
            1.0 - 0.5 * libm::erfc((c - lo) / r) - 0.5 * libm::erfc((hi - c) / r)
        };
        1.0 - inside(self.center.0, rx, extent.x) * inside(self.center.1, ry, extent.y)
    }
}

/// Lateral region (nm) filled with sampled atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Default for Extent {
    fn default() -> Self {
        Self::centered(120.0, 120.0)
    }
}

impl Extent {
    pub fn centered(width: f64, height: f64) -> Self {
        Self {
            x: (-0.5 * width, 0.5 * width),
            y: (-0.5 * height, 0.5 * height),
        }
    }

    /// Smallest box holding every dot with `margin` radii on each side.
    pub fn covering(dots: &[DotGeometry], margin: f64, constants: &MaterialConstants) -> Self {
        let mut e = Self {
            x: (f64::INFINITY, f64::NEG_INFINITY),
            y: (f64::INFINITY, f64::NEG_INFINITY),
        };
        for d in dots {
            let (rx, ry) = d.radii(constants);
            e.x = (e.x.0.min(d.center.0 - margin * rx), e.x.1.max(d.center.0 + margin * rx));
            e.y = (e.y.0.min(d.center.1 - margin * ry), e.y.1.max(d.center.1 + margin * ry));
        }
        e
    }

    /// Union with `other`.
    pub fn union(&self, other: &Extent) -> Self {
        Self {
            x: (self.x.0.min(other.x.0), self.x.1.max(other.x.1)),
            y: (self.y.0.min(other.y.0), self.y.1.max(other.y.1)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && hi > lo;
        if !(ok(self.x) && ok(self.y)) {
            return Err(Error::spec("extent", "needs finite bounds with max > min"));
        }
        Ok(())
    }
}

/// Default margin (in dot radii) used when an extent is fitted to dots.
pub const DEFAULT_MARGIN: f64 = 4.0;

/// The sampled atoms of one monolayer.
#[derive(Debug, Clone, PartialEq)]
pub struct AlloyLayer {
    pub index: i64,
    /// Reported z of the layer centre (nm).
    pub z: f64,
    /// Ge probability of every site.
    pub xbar: f64,
    /// Occupancy bits, row-major (`y` outer), `words_per_row` words per row.
    bits: Vec<u64>,
    pub ge_count: usize,
}

/// Random-alloy realization over a profile's monolayers.
#[derive(Debug, Clone, PartialEq)]
pub struct AlloyField {
    pub seed: u64,
    pub extent: Extent,
    /// In-plane site spacing (nm).
    pub spacing: f64,
    pub nx: usize,
    pub ny: usize,
    words_per_row: usize,
    pub layers: Vec<AlloyLayer>,
    pub profile: ConcentrationProfile,
}

/// Half-cell shift of the site lattice of monolayer `layer`.
fn layer_shift(layer: i64) -> (f64, f64) {
    match layer.rem_euclid(4) {
        0 => (0.0, 0.0),
        1 => (0.5, 0.0),
        2 => (0.5, 0.5),
        _ => (0.0, 0.5),
    }
}

/// Mean of the profile over the grid points of each monolayer.
pub fn layer_means(profile: &ConcentrationProfile) -> Vec<(i64, f64)> {
    let grid = &profile.grid;
    let (lo, hi) = grid.layer_range();
    let mut sums = vec![(0.0, 0usize); (hi - lo + 1) as usize];
    for (i, x) in profile.xbar.iter().enumerate() {
        let s = &mut sums[(grid.layer_of(i) - lo) as usize];
        s.0 += x;
        s.1 += 1;
    }
    sums.iter()
        .enumerate()
        .map(|(k, (s, n))| (lo + k as i64, s / *n as f64))
        .collect()
}

impl AlloyField {
    pub fn site_count(&self) -> usize {
        self.nx * self.ny * self.layers.len()
    }

    pub fn sites_per_layer(&self) -> usize {
        self.nx * self.ny
    }

    /// Lateral position of site (i, j) in `layer`.
    pub fn site_position(&self, layer: i64, i: usize, j: usize) -> (f64, f64) {
        let (sx, sy) = layer_shift(layer);
        (
            self.extent.x.0 + (i as f64 + sx) * self.spacing,
            self.extent.y.0 + (j as f64 + sy) * self.spacing,
        )
    }

    pub fn is_ge(&self, layer: usize, i: usize, j: usize) -> bool {
        let w = self.layers[layer].bits[j * self.words_per_row + i / 64];
        w >> (i % 64) & 1 == 1
    }

    /// Dot-weighted Ge fraction `p_eff` of every layer, in layer order.
    pub fn layer_concentrations(&self, dot: &DotGeometry, constants: &MaterialConstants) -> Result<Vec<f64>> {
        dot.validate()?;
        let lost_mass = dot.lost_mass(&self.extent, constants);
        if lost_mass > MAX_LOST_MASS {
            return Err(Error::ExtentTooSmall { lost_mass });
        }
        let (rx, ry) = dot.radii(constants);
        Ok(self.weighted(dot.center, rx, ry))
    }

    /// `Σ w·occupancy / Σ w` per layer for `w = exp(−x²/rx² − y²/ry²)`
    /// about `center`, with no truncation check.
    fn weighted(&self, center: (f64, f64), rx: f64, ry: f64) -> Vec<f64> {
        let axis = |n: usize, start: f64, c: f64, r: f64, shift: f64| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let d = (start + (i as f64 + shift) * self.spacing - c) / r;
                    (-d * d).exp()
                })
                .collect()
        };
        // two possible shifts per axis
        let wx = [0.0, 0.5].map(|s| axis(self.nx, self.extent.x.0, center.0, rx, s));
        let wy = [0.0, 0.5].map(|s| axis(self.ny, self.extent.y.0, center.1, ry, s));
        let sx: [f64; 2] = [wx[0].iter().sum(), wx[1].iter().sum()];
        let sy: [f64; 2] = [wy[0].iter().sum(), wy[1].iter().sum()];
        self.layers
            .iter()
            .map(|layer| {
                if layer.xbar == 0.0 || layer.xbar == 1.0 {
                    return layer.xbar;
                }
                let (hx, hy) = layer_shift(layer.index);
                let (ix, iy) = ((hx > 0.0) as usize, (hy > 0.0) as usize);
                let (wx, wy) = (&wx[ix], &wy[iy]);
                let mut total = 0.0;
                for (j, wj) in wy.iter().enumerate() {
                    let row = &layer.bits[j * self.words_per_row..(j + 1) * self.words_per_row];
                    let mut acc = 0.0;
                    for (k, &word) in row.iter().enumerate() {
                        let mut w = word;
                        while w != 0 {
                            let b = w.trailing_zeros() as usize;
                            acc += wx[k * 64 + b];
                            w &= w - 1;
                        }
                    }
                    total += wj * acc;
                }
                (total / (sx[ix] * sy[iy])).clamp(0.0, 1.0)
            })
            .collect()
    }
}

/// Draws every site of every monolayer of `profile` inside `extent`.
/// Layer ℓ uses its own ChaCha stream of `seed`, so the field does not
/// depend on the execution strategy.
pub fn sample_alloy_field(
    profile: &ConcentrationProfile,
    extent: Extent,
    seed: u64,
    constants: &MaterialConstants,
    exec: Execution,
) -> Result<AlloyField> {
    extent.validate()?;
    let spacing = constants.a0 / std::f64::consts::SQRT_2;
    let nx = ((extent.x.1 - extent.x.0) / spacing).floor() as usize;
    let ny = ((extent.y.1 - extent.y.0) / spacing).floor() as usize;
    if nx == 0 || ny == 0 {
        return Err(Error::spec("extent", "holds no lattice sites"));
    }
    let words_per_row = nx.div_ceil(64);
    let a_ml = constants.monolayer();
    let means = layer_means(profile);
    let layers = exec.map(means.len(), |k| {
        let (index, xbar) = means[k];
        let mut bits = vec![0u64; words_per_row * ny];
        let mut ge_count = 0;
        if xbar >= 1.0 {
            for j in 0..ny {
                for i in 0..nx {
                    bits[j * words_per_row + i / 64] |= 1 << (i % 64);
                }
            }
            ge_count = nx * ny;
        } else if xbar > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            for j in 0..ny {
                for i in 0..nx {
                    if rng.random_bool(xbar) {
                        bits[j * words_per_row + i / 64] |= 1 << (i % 64);
                        ge_count += 1;
                    }
                }
            }
        }
        AlloyLayer {
            index,
            z: index as f64 * a_ml + profile.grid.origin,
            xbar,
            bits,
            ge_count,
        }
    });
    Ok(AlloyField {
        seed,
        extent,
        spacing,
        nx,
        ny,
        words_per_row,
        layers,
        profile: profile.clone(),
    })
}

/// Profile seen by `dot`: the smooth profile plus the layer fluctuations
/// `p_eff(ℓ) − x̄(ℓ)`, held constant across each monolayer.
pub fn effective_profile(
    field: &AlloyField,
    dot: &DotGeometry,
    constants: &MaterialConstants,
) -> Result<ConcentrationProfile> {
    let p_eff = field.layer_concentrations(dot, constants)?;
    let mut out = field.profile.clone();
    let first = field.layers[0].index;
    for (i, x) in out.xbar.iter_mut().enumerate() {
        let k = (out.grid.layer_of(i) - first) as usize;
        *x = (*x + p_eff[k] - field.layers[k].xbar).clamp(0.0, 1.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heterostructure::{build_profile, InterfaceShape, ProfileSpec};

    fn c() -> MaterialConstants {
        MaterialConstants::default()
    }

    fn small_profile() -> ConcentrationProfile {
        let spec = ProfileSpec {
            depth_below: 3.0,
            height_above: 2.0,
            interface_shape: InterfaceShape::LinearGrade,
            ..ProfileSpec::wiggle(0.1, std::f64::consts::TAU / 1.8)
        };
        build_profile(&spec, &c()).unwrap()
    }

    #[test]
    fn dot_radii() {
        let c = c();
        assert!((DotGeometry::radius(1.0, &c) - 20.0).abs() < 0.1);
        assert!((DotGeometry::radius(2.0, &c) - 14.2).abs() < 0.1);
    }

    #[test]
    fn same_seed_same_field_under_any_execution() {
        let p = small_profile();
        let e = Extent::centered(20.0, 20.0);
        let a = sample_alloy_field(&p, e, 9, &c(), Execution::Sequential).unwrap();
        let b = sample_alloy_field(&p, e, 9, &c(), Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let d = sample_alloy_field(&p, e, 10, &c(), Execution::Sequential).unwrap();
        assert_ne!(a.layers, d.layers);
    }

    #[test]
    fn pure_layers_are_exact() {
        let mut spec = small_profile().provenance;
        spec.amplitude = 0.0;
        let p = build_profile(&spec, &c()).unwrap();
        let f = sample_alloy_field(&p, Extent::centered(20.0, 20.0), 3, &c(), Execution::Sequential).unwrap();
        let dot = DotGeometry {
            hbar_omega_x: 200.0,
            hbar_omega_y: 200.0,
            center: (0.0, 0.0),
        };
        let p_eff = f.layer_concentrations(&dot, &c()).unwrap();
        for (l, pe) in f.layers.iter().zip(&p_eff) {
            if l.xbar == 0.0 {
                assert_eq!(l.ge_count, 0);
                assert_eq!(*pe, 0.0);
            }
            assert!((0.0..=1.0).contains(pe));
        }
        assert!(f.layers.iter().any(|l| l.xbar == 0.0));
    }

    #[test]
    fn small_extent_is_rejected() {
        let p = small_profile();
        let f = sample_alloy_field(&p, Extent::centered(40.0, 40.0), 1, &c(), Execution::Sequential).unwrap();
        let err = f.layer_concentrations(&DotGeometry::default(), &c()).unwrap_err();
        assert!(matches!(err, Error::ExtentTooSmall { .. }));
    }

    #[test]
    fn covering_extent_is_large_enough() {
        let c = c();
        let dots = [
            DotGeometry {
                hbar_omega_x: 1.0,
                ..Default::default()
            },
            DotGeometry {
                center: (0.0, 20.0),
                ..Default::default()
            },
        ];
        let e = Extent::covering(&dots, DEFAULT_MARGIN, &c);
        for d in dots {
            assert!(d.lost_mass(&e, &c) < MAX_LOST_MASS);
        }
        assert!(DotGeometry::default().lost_mass(&Extent::default(), &c) < MAX_LOST_MASS);
    }

    #[test]
    fn uniform_weights_give_layer_mean() {
        // a very wide dot weights every site almost equally
        let p = small_profile();
        let c = c();
        let f = sample_alloy_field(&p, Extent::centered(30.0, 30.0), 5, &c, Execution::Sequential).unwrap();
        let n = f.sites_per_layer() as f64;
        for (l, pe) in f.layers.iter().zip(f.weighted((0.0, 0.0), 2e3, 2e3)) {
            assert!((pe - l.ge_count as f64 / n).abs() < 1e-3);
            let sigma = (l.xbar * (1.0 - l.xbar) / n).sqrt();
            assert!((pe - l.xbar).abs() <= 5.0 * sigma + 1e-3);
        }
    }

    #[test]
    fn effective_profile_without_disorder_weighting_is_stable() {
        let p = small_profile();
        let c = c();
        let f = sample_alloy_field(&p, Extent::centered(120.0, 120.0), 5, &c, Execution::Sequential).unwrap();
        let dot = DotGeometry::default();
        let a = effective_profile(&f, &dot, &c).unwrap();
        let b = effective_profile(&f, &dot, &c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.grid, p.grid);
    }
}
