//! Ge concentration profiles of Wiggle Well heterostructures and the 1D
//! potential energy landscape derived from them.
//!
//! Coordinates: z = 0 (before `z_offset`) is the midpoint of the upper
//! well/barrier interface. The well occupies `[-well_width, 0]`, the
//! electron is pushed toward the upper interface by the field term
//! `V_F = -eFz`, and the oscillation phase is referenced to the upper
//! interface so that the oscillatory concentration vanishes there.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::MaterialConstants;
use crate::io;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InterfaceShape {
    LinearGrade,
    #[default]
    Tanh,
}

impl InterfaceShape {
    /// Normalized step rising from 0 (well side, `u → -∞`) to 1 (barrier
    /// side) across an interface of width `width` centred at `u = 0`.
    pub fn step(self, u: f64, width: f64) -> f64 {
        match self {
            InterfaceShape::Tanh => 0.5 * (1.0 + (u / width).tanh()),
            InterfaceShape::LinearGrade => ((u + 0.5 * width) / width).clamp(0.0, 1.0),
        }
    }
}

/// Deterministic description of a Wiggle Well stack.
///
/// `amplitude` is the peak of the oscillatory Ge fraction: inside the well
/// the oscillation runs from 0 to `amplitude`, so its spatial average is
/// `amplitude / 2`. Use [`ProfileSpec::with_average_concentration`] when
/// starting from an average concentration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSpec {
    /// nm
    pub well_width: f64,
    /// Peak oscillatory Ge fraction A.
    pub amplitude: f64,
    /// Oscillation wavevector q (nm⁻¹). Ignored when `wavelength` is set.
    pub wavevector: f64,
    /// Oscillation wavelength λ = 2π/q (nm); overrides `wavevector`.
    pub wavelength: Option<f64>,
    /// Baseline Ge fraction of the well, below the oscillation.
    pub well_offset: f64,
    /// Barrier minus peak-well Ge fraction.
    pub delta_rho: f64,
    /// Barrier Ge fraction. Derived as `well_offset + amplitude + delta_rho`
    /// when absent; rejected when present and inconsistent.
    pub barrier_concentration: Option<f64>,
    /// Interface width W (nm).
    pub interface_width: f64,
    pub interface_shape: InterfaceShape,
    /// Simulated extent below the upper interface (well side), nm.
    pub depth_below: f64,
    /// Simulated extent above the upper interface (barrier side), nm.
    pub height_above: f64,
    /// Grid points per (001) monolayer.
    pub points_per_monolayer: usize,
    /// Translation applied to all reported z coordinates (nm).
    pub z_offset: f64,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self {
            well_width: 40.0,
            amplitude: 0.0,
            wavevector: 2.0 * PI / 1.8,
            wavelength: None,
            well_offset: 0.0,
            delta_rho: 0.25,
            barrier_concentration: None,
            interface_width: 1.0,
            interface_shape: InterfaceShape::Tanh,
            depth_below: 30.0,
            height_above: 10.0,
            points_per_monolayer: 4,
            z_offset: 0.0,
        }
    }
}

const CONSISTENCY_TOL: f64 = 1e-9;

impl ProfileSpec {
    /// Wiggle Well with peak amplitude `amplitude` and wavevector `q`.
    pub fn wiggle(amplitude: f64, q: f64) -> Self {
        Self {
            amplitude,
            wavevector: q,
            ..Self::default()
        }
    }

    /// Sets the amplitude from an average oscillatory concentration
    /// (the peak is twice the average).
    pub fn with_average_concentration(mut self, average: f64) -> Self {
        self.amplitude = 2.0 * average;
        self
    }

    pub fn average_concentration(&self) -> f64 {
        0.5 * self.amplitude
    }

    pub fn q(&self) -> f64 {
        match self.wavelength {
            Some(lambda) => 2.0 * PI / lambda,
            None => self.wavevector,
        }
    }

    pub fn peak_well_concentration(&self) -> f64 {
        self.well_offset + self.amplitude
    }

    pub fn barrier(&self) -> f64 {
        self.barrier_concentration
            .unwrap_or(self.peak_well_concentration() + self.delta_rho)
    }

    pub fn grid_spacing(&self, constants: &MaterialConstants) -> f64 {
        constants.monolayer() / self.points_per_monolayer as f64
    }

    pub fn validate(&self) -> Result<()> {
        let fraction = |name: &str, v: f64| -> Result<()> {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(Error::spec(name, format!("must lie in [0, 1], got {v}")));
            }
            Ok(())
        };
        if !(self.well_width.is_finite() && self.well_width > 0.0) {
            return Err(Error::spec("well_width", format!("must be positive, got {}", self.well_width)));
        }
        fraction("amplitude", self.amplitude)?;
        fraction("well_offset", self.well_offset)?;
        fraction("delta_rho", self.delta_rho)?;
        if self.peak_well_concentration() > 1.0 {
            return Err(Error::spec(
                "amplitude",
                format!(
                    "peak well concentration well_offset + amplitude = {} exceeds 1",
                    self.peak_well_concentration()
                ),
            ));
        }
        let expected_barrier = self.peak_well_concentration() + self.delta_rho;
        if let Some(b) = self.barrier_concentration {
            fraction("barrier_concentration", b)?;
            if (b - expected_barrier).abs() > CONSISTENCY_TOL {
                return Err(Error::spec(
                    "barrier_concentration",
                    format!(
                        "{b} differs from well_offset + amplitude + delta_rho = {expected_barrier}"
                    ),
                ));
            }
        } else if expected_barrier > 1.0 {
            return Err(Error::spec(
                "delta_rho",
                format!("derived barrier concentration {expected_barrier} exceeds 1"),
            ));
        }
        if let Some(lambda) = self.wavelength {
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(Error::spec("wavelength", format!("must be positive, got {lambda}")));
            }
        } else if !(self.wavevector.is_finite() && self.wavevector >= 0.0) {
            return Err(Error::spec("wavevector", format!("must be non-negative, got {}", self.wavevector)));
        }
        if !(self.interface_width.is_finite() && self.interface_width > 0.0) {
            return Err(Error::spec("interface_width", "must be positive"));
        }
        if !(self.depth_below.is_finite() && self.depth_below > 0.0) {
            return Err(Error::spec("depth_below", "must be positive"));
        }
        if !(self.height_above.is_finite() && self.height_above > 0.0) {
            return Err(Error::spec("height_above", "must be positive"));
        }
        if self.points_per_monolayer == 0 {
            return Err(Error::spec("points_per_monolayer", "must be at least 1"));
        }
        if !self.z_offset.is_finite() {
            return Err(Error::spec("z_offset", "must be finite"));
        }
        Ok(())
    }

    /// Normalized barrier indicator s(u) ∈ [0, 1] at interface-relative
    /// position u: 0 in the well, 1 in the barriers.
    pub fn barrier_fraction(&self, u: f64) -> f64 {
        let w = self.interface_width;
        let top = self.interface_shape.step(u, w);
        let bottom = self.interface_shape.step(-self.well_width - u, w);
        (top + bottom).min(1.0)
    }

    /// Non-oscillatory (background) Ge fraction at interface-relative u.
    pub fn background(&self, u: f64) -> f64 {
        self.well_offset + (self.barrier() - self.well_offset) * self.barrier_fraction(u)
    }

    /// Oscillatory Ge fraction (A/2)[1 − cos(q u)] inside the well, 0 outside.
    pub fn oscillation(&self, u: f64) -> f64 {
        if u > 0.0 || u < -self.well_width || self.amplitude == 0.0 {
            return 0.0;
        }
        0.5 * self.amplitude * (1.0 - (self.q() * u).cos())
    }
}

/// Uniform, monolayer-aligned grid: `z_i = (first + i) * spacing + origin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub first: i64,
    pub len: usize,
    pub spacing: f64,
    /// Reported position of the upper interface midpoint.
    pub origin: f64,
    pub points_per_monolayer: usize,
}

impl Grid {
    pub fn for_spec(spec: &ProfileSpec, constants: &MaterialConstants) -> Self {
        let h = spec.grid_spacing(constants);
        let below = (spec.depth_below / h - 1e-9).ceil() as i64;
        let above = (spec.height_above / h - 1e-9).ceil() as i64;
        Self {
            first: -below,
            len: (below + above + 1) as usize,
            spacing: h,
            origin: spec.z_offset,
            points_per_monolayer: spec.points_per_monolayer,
        }
    }

    /// Interface-relative coordinate of point i.
    pub fn local(&self, i: usize) -> f64 {
        (self.first + i as i64) as f64 * self.spacing
    }

    pub fn z(&self, i: usize) -> f64 {
        self.local(i) + self.origin
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.z(i)).collect()
    }

    /// Monolayer index owning grid point i (cell `[l - 1/2, l + 1/2)`).
    pub fn layer_of(&self, i: usize) -> i64 {
        let p = self.points_per_monolayer as i64;
        (self.first + i as i64 + p / 2).div_euclid(p)
    }

    /// Inclusive range of monolayer indices covered by the grid.
    pub fn layer_range(&self) -> (i64, i64) {
        (self.layer_of(0), self.layer_of(self.len - 1))
    }
}

/// Mean Ge fraction on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationProfile {
    pub grid: Grid,
    pub z: Vec<f64>,
    pub xbar: Vec<f64>,
    pub provenance: ProfileSpec,
}

impl ConcentrationProfile {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.grid.spacing
    }

    /// Background (non-oscillatory, disorder-free) concentration per point.
    pub fn background(&self) -> Vec<f64> {
        (0..self.grid.len)
            .map(|i| self.provenance.background(self.grid.local(i)))
            .collect()
    }

    /// Concentration deviation from the background: the oscillation, plus
    /// alloy fluctuations for disorder-derived profiles.
    pub fn oscillatory_part(&self) -> Vec<f64> {
        (0..self.grid.len)
            .map(|i| self.xbar[i] - self.provenance.background(self.grid.local(i)))
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        io::write_columns(path, &["z_nm", "ge_fraction"], &[&self.z, &self.xbar])
    }
}

/// Deterministic profile from a spec.
pub fn build_profile(spec: &ProfileSpec, constants: &MaterialConstants) -> Result<ConcentrationProfile> {
    spec.validate()?;
    constants.validate()?;
    let grid = Grid::for_spec(spec, constants);
    let xbar: Vec<f64> = (0..grid.len)
        .map(|i| {
            let u = grid.local(i);
            (spec.background(u) + spec.oscillation(u)).clamp(0.0, 1.0)
        })
        .collect();
    Ok(ConcentrationProfile {
        z: grid.positions(),
        grid,
        xbar,
        provenance: spec.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialParams {
    /// Vertical electric field (MV/m).
    pub field_mv_per_m: f64,
    /// Barrier height B (eV).
    pub barrier_height: f64,
}

impl Default for PotentialParams {
    fn default() -> Self {
        Self {
            field_mv_per_m: 8.5,
            barrier_height: 0.15,
        }
    }
}

impl PotentialParams {
    /// eF in eV/nm (1 MV/m = 1e-3 V/nm).
    pub fn field_ev_per_nm(&self) -> f64 {
        self.field_mv_per_m * 1e-3
    }
}

/// `V_total = V_F + V_B + V_osc` on the profile grid, all in eV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialProfile {
    pub grid: Grid,
    pub z: Vec<f64>,
    pub v_field: Vec<f64>,
    pub v_barrier: Vec<f64>,
    pub v_osc: Vec<f64>,
    pub v_total: Vec<f64>,
    pub params: PotentialParams,
}

impl PotentialProfile {
    pub fn spacing(&self) -> f64 {
        self.grid.spacing
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Adds `c` to every point of the total potential.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.v_total.iter_mut().for_each(|v| *v += c);
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        io::write_columns(
            path,
            &["z_nm", "V_F_eV", "V_B_eV", "V_osc_eV", "V_total_eV"],
            &[&self.z, &self.v_field, &self.v_barrier, &self.v_osc, &self.v_total],
        )
    }

    /// Potential from explicit samples (for analytic test problems).
    pub fn from_total(grid: Grid, v_total: Vec<f64>) -> Result<Self> {
        if v_total.len() != grid.len {
            return Err(Error::InvalidInput(format!(
                "potential has {} points, grid has {}",
                v_total.len(),
                grid.len
            )));
        }
        let n = grid.len;
        Ok(Self {
            z: grid.positions(),
            grid,
            v_field: vec![0.0; n],
            v_barrier: vec![0.0; n],
            v_osc: vec![0.0; n],
            v_total,
            params: PotentialParams {
                field_mv_per_m: 0.0,
                barrier_height: 0.0,
            },
        })
    }
}

pub fn potential_from_profile(
    profile: &ConcentrationProfile,
    params: &PotentialParams,
    constants: &MaterialConstants,
) -> Result<PotentialProfile> {
    if !(params.field_mv_per_m.is_finite() && params.field_mv_per_m >= 0.0) {
        return Err(Error::spec("field_mv_per_m", "must be non-negative"));
    }
    if !params.barrier_height.is_finite() {
        return Err(Error::spec("barrier_height", "must be finite"));
    }
    let spec = &profile.provenance;
    let grid = profile.grid;
    let ef = params.field_ev_per_nm();
    let n = grid.len;
    let mut v_field = Vec::with_capacity(n);
    let mut v_barrier = Vec::with_capacity(n);
    let mut v_osc = Vec::with_capacity(n);
    let mut v_total = Vec::with_capacity(n);
    for i in 0..n {
        let u = grid.local(i);
        let f = -ef * u;
        let b = params.barrier_height * spec.barrier_fraction(u);
        let dx = profile.xbar[i] - spec.background(u);
        let o = if dx == 0.0 { 0.0 } else { constants.v0 * dx };
        v_field.push(f);
        v_barrier.push(b);
        v_osc.push(o);
        v_total.push(f + b + o);
    }
    Ok(PotentialProfile {
        z: profile.z.clone(),
        grid,
        v_field,
        v_barrier,
        v_osc,
        v_total,
        params: *params,
    })
}
