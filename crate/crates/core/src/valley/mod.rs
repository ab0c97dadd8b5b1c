//! Valley splitting of the two z valleys.
//!
//! Two routes are provided: the first-order matrix element
//! `E_v = 2|⟨φ₊|U|φ₋⟩|` evaluated with the single-valley ground envelope,
//! and the full two-component envelope equation whose lowest doublet gap
//! includes all higher-order processes (e.g. the `q ≈ k0` harmonic).

pub mod bloch;
pub mod coupling;
pub mod scan;
pub mod two_component;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::MaterialConstants;
use crate::envelope::{ground_state, EnvelopeSolution};
use crate::heterostructure::{
    build_profile, potential_from_profile, ConcentrationProfile, PotentialParams, PotentialProfile, ProfileSpec,
};
use crate::Result;

pub use bloch::{BlochCoefficientTable, BlochEntry, NormBounds, StructureFactor};
pub use coupling::{Coupler, WiggleTerm};
pub use scan::{local_maxima, scan_q, ValleySplittingCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ValleyMode {
    #[default]
    Perturbative,
    #[serde(alias = "two_component")]
    TwoComponent,
}

impl std::str::FromStr for ValleyMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.replace('-', "_").as_str() {
            "perturbative" => Ok(Self::Perturbative),
            "two_component" => Ok(Self::TwoComponent),
            other => Err(format!("unknown mode `{other}` (expected perturbative or two-component)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValleyCouplingResult {
    /// nm⁻¹
    pub q: f64,
    /// First-order intervalley matrix element (eV).
    pub delta: Complex64,
    /// Valley splitting (eV).
    pub e_v: f64,
    pub mode: ValleyMode,
}

/// Settings shared by every valley-splitting evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValleyConfig {
    pub mode: ValleyMode,
    /// MV/m
    pub field_mv_per_m: f64,
    /// eV
    pub barrier_height: f64,
    /// Add the barrier potential to the intervalley coupling (interface
    /// valley splitting). Off: only the Ge-induced term couples valleys.
    pub include_interface: bool,
    pub min_points_per_period: f64,
    /// Raise the grid density of scanned profiles until every coupling
    /// oscillation is resolved.
    pub auto_refine: bool,
}

impl Default for ValleyConfig {
    fn default() -> Self {
        let p = PotentialParams::default();
        Self {
            mode: ValleyMode::Perturbative,
            field_mv_per_m: p.field_mv_per_m,
            barrier_height: p.barrier_height,
            include_interface: false,
            min_points_per_period: coupling::DEFAULT_MIN_POINTS_PER_PERIOD,
            auto_refine: true,
        }
    }
}

impl ValleyConfig {
    pub fn potential_params(&self) -> PotentialParams {
        PotentialParams {
            field_mv_per_m: self.field_mv_per_m,
            barrier_height: self.barrier_height,
        }
    }

    pub fn coupler(&self, table: &BlochCoefficientTable, constants: &MaterialConstants) -> Coupler {
        let mut c = Coupler::new(table, constants);
        c.min_points_per_period = self.min_points_per_period;
        c
    }

    /// Smallest points-per-monolayer ≥ `base` that resolves a Wiggle
    /// oscillation of wavevector up to `q_max`.
    pub fn points_per_monolayer(&self, base: usize, q_max: f64, coupler: &Coupler) -> usize {
        if !self.auto_refine {
            return base;
        }
        let a_ml = coupler.constants.monolayer();
        let need = (a_ml / coupler.required_spacing(q_max) - 1e-9).ceil().max(1.0) as usize;
        base.max(need)
    }

    /// `spec` with its grid density raised to resolve its own oscillation.
    pub fn refined(&self, spec: &ProfileSpec, coupler: &Coupler) -> ProfileSpec {
        ProfileSpec {
            points_per_monolayer: self.points_per_monolayer(spec.points_per_monolayer, spec.q(), coupler),
            ..spec.clone()
        }
    }
}

/// First-order intervalley element of a Wiggle Well oscillation;
/// `E_v = 2|Δ|`.
pub fn intervalley_element(
    envelope: &EnvelopeSolution,
    table: &BlochCoefficientTable,
    wiggle: &WiggleTerm,
    constants: &MaterialConstants,
) -> Result<ValleyCouplingResult> {
    let delta = Coupler::new(table, constants).wiggle_element(envelope, wiggle)?;
    Ok(ValleyCouplingResult {
        q: wiggle.q,
        delta,
        e_v: 2.0 * delta.norm(),
        mode: ValleyMode::Perturbative,
    })
}

/// Potential that couples the two valleys: the Ge-induced term, plus the
/// barrier when `include_interface` is set.
pub fn coupling_potential(potential: &PotentialProfile, include_interface: bool) -> Vec<f64> {
    if include_interface {
        potential
            .v_osc
            .iter()
            .zip(&potential.v_barrier)
            .map(|(o, b)| o + b)
            .collect()
    } else {
        potential.v_osc.clone()
    }
}

/// Doublet gap of the two-component equation.
pub fn two_component_spectrum(
    potential: &PotentialProfile,
    coupler: &Coupler,
    include_interface: bool,
    q: f64,
) -> Result<ValleyCouplingResult> {
    let constants = &coupler.constants;
    let u_pot = coupling_potential(potential, include_interface);
    coupler.check_resolution(potential.spacing(), 0.0)?;
    let origin = potential.grid.origin;
    let kernel = coupler.kernel(&potential.z, &u_pot, origin);
    let (e0, e1) = two_component::doublet(potential, kernel, constants.m_l, constants)?;
    let envelope = ground_state(potential, constants.m_l, constants)?;
    let delta = coupler.potential_element(&envelope, &u_pot, origin)?;
    Ok(ValleyCouplingResult {
        q,
        delta,
        e_v: (e1 - e0).max(0.0),
        mode: ValleyMode::TwoComponent,
    })
}

/// Valley splitting of an arbitrary concentration profile (deterministic
/// or disorder-derived). The oscillation is treated through its sampled
/// potential.
pub fn evaluate_profile(
    profile: &ConcentrationProfile,
    coupler: &Coupler,
    config: &ValleyConfig,
) -> Result<ValleyCouplingResult> {
    let constants = &coupler.constants;
    let potential = potential_from_profile(profile, &config.potential_params(), constants)?;
    let q = profile.provenance.q();
    match config.mode {
        ValleyMode::Perturbative => {
            let envelope = ground_state(&potential, constants.m_l, constants)?;
            let u_pot = coupling_potential(&potential, config.include_interface);
            let delta = coupler.potential_element(&envelope, &u_pot, potential.grid.origin)?;
            Ok(ValleyCouplingResult {
                q,
                delta,
                e_v: 2.0 * delta.norm(),
                mode: ValleyMode::Perturbative,
            })
        }
        ValleyMode::TwoComponent => two_component_spectrum(&potential, coupler, config.include_interface, q),
    }
}

/// Valley splitting of a deterministic Wiggle Well. In perturbative mode
/// the oscillation enters through the analytic cosine expansion.
pub fn evaluate_spec(
    spec: &ProfileSpec,
    coupler: &Coupler,
    config: &ValleyConfig,
) -> Result<ValleyCouplingResult> {
    let constants = &coupler.constants;
    let profile = build_profile(spec, constants)?;
    match config.mode {
        ValleyMode::Perturbative => {
            let potential = potential_from_profile(&profile, &config.potential_params(), constants)?;
            let envelope = ground_state(&potential, constants.m_l, constants)?;
            let mut delta = coupler.wiggle_element(&envelope, &WiggleTerm::from_spec(spec))?;
            if config.include_interface {
                delta += coupler.potential_element(&envelope, &potential.v_barrier, potential.grid.origin)?;
            }
            Ok(ValleyCouplingResult {
                q: spec.q(),
                delta,
                e_v: 2.0 * delta.norm(),
                mode: ValleyMode::Perturbative,
            })
        }
        ValleyMode::TwoComponent => evaluate_profile(&profile, coupler, config),
    }
}
