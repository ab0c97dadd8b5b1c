//! Dot sweeps over one alloy realization.
//!
//! Case 1 moves the dot by `y0_shift` while ħω_x goes from `omega_x.0`
//! to `omega_x.1`, both linear in one sweep parameter `t ∈ [0, 1]`.
//! Case 2 changes ħω_x alone with the dot held in place.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{effective_profile, sample_alloy_field, AlloyField, DotGeometry, Extent, DEFAULT_MARGIN};
use crate::constants::MaterialConstants;
use crate::exec::Execution;
use crate::heterostructure::{build_profile, ProfileSpec};
use crate::io;
use crate::valley::{evaluate_profile, BlochCoefficientTable, Coupler, ValleyConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepRange {
    /// ħω_x at the two ends (meV).
    pub omega_x: (f64, f64),
    /// Total y0 displacement of Case 1 (nm).
    pub y0_shift: f64,
    /// Settings per sweep, endpoints included.
    pub points: usize,
}

impl Default for SweepRange {
    fn default() -> Self {
        Self {
            omega_x: (1.0, 2.0),
            y0_shift: 20.0,
            points: 2,
        }
    }
}

impl SweepRange {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::spec("points", "a sweep needs at least its two endpoints"));
        }
        if !self.y0_shift.is_finite() {
            return Err(Error::spec("y0_shift", "must be finite"));
        }
        Ok(())
    }

    pub fn params(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    /// Dot at sweep parameter `t` for a Case 1 sweep (`moving`) or Case 2.
    pub fn dot_at(&self, template: &DotGeometry, t: f64, moving: bool) -> DotGeometry {
        let shift = if moving { self.y0_shift } else { 0.0 };
        DotGeometry {
            hbar_omega_x: self.omega_x.0 + t * (self.omega_x.1 - self.omega_x.0),
            center: (template.center.0, template.center.1 + t * shift),
            ..*template
        }
    }

    /// Extent fitted to every dot either case visits.
    pub fn extent(&self, template: &DotGeometry, constants: &MaterialConstants) -> Extent {
        let dots: Vec<DotGeometry> = [0.0, 1.0]
            .iter()
            .flat_map(|&t| [self.dot_at(template, t, true), self.dot_at(template, t, false)])
            .collect();
        Extent::covering(&dots, DEFAULT_MARGIN, constants)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub sweep_param: f64,
    pub y0_nm: f64,
    #[serde(rename = "E_orb_meV")]
    pub e_orb_mev: f64,
    /// eV
    pub e_v: f64,
    pub seed: u64,
}

#[derive(Serialize)]
struct SweepRow {
    sweep_param: f64,
    y0_nm: f64,
    #[serde(rename = "E_orb_meV")]
    e_orb_mev: f64,
    #[serde(rename = "E_v_ueV")]
    e_v_uev: f64,
    seed: u64,
    #[serde(rename = "E_v_eV")]
    e_v_ev: f64,
}

/// Columns `sweep_param, y0_nm, E_orb_meV, E_v_ueV, seed, E_v_eV`.
pub fn write_sweep_csv(path: &Path, points: &[SweepPoint]) -> Result<()> {
    let rows: Vec<SweepRow> = points
        .iter()
        .map(|p| SweepRow {
            sweep_param: p.sweep_param,
            y0_nm: p.y0_nm,
            e_orb_mev: p.e_orb_mev,
            e_v_uev: p.e_v * 1e6,
            seed: p.seed,
            e_v_ev: p.e_v,
        })
        .collect();
    io::write_records(path, &rows)
}

fn sweep(
    field: &AlloyField,
    template: &DotGeometry,
    range: &SweepRange,
    moving: bool,
    coupler: &Coupler,
    config: &ValleyConfig,
) -> Result<Vec<SweepPoint>> {
    range.validate()?;
    range
        .params()
        .into_iter()
        .map(|t| {
            let dot = range.dot_at(template, t, moving);
            let profile = effective_profile(field, &dot, &coupler.constants)?;
            let r = evaluate_profile(&profile, coupler, config)?;
            Ok(SweepPoint {
                sweep_param: t,
                y0_nm: dot.center.1,
                e_orb_mev: dot.hbar_omega_x,
                e_v: r.e_v,
                seed: field.seed,
            })
        })
        .collect()
}

/// Moving dot: y0 and ħω_x change together.
pub fn case1_sweep(
    field: &AlloyField,
    template: &DotGeometry,
    range: &SweepRange,
    coupler: &Coupler,
    config: &ValleyConfig,
) -> Result<Vec<SweepPoint>> {
    sweep(field, template, range, true, coupler, config)
}

/// Stationary dot: only ħω_x changes.
pub fn case2_sweep(
    field: &AlloyField,
    template: &DotGeometry,
    range: &SweepRange,
    coupler: &Coupler,
    config: &ValleyConfig,
) -> Result<Vec<SweepPoint>> {
    sweep(field, template, range, false, coupler, config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub profile: ProfileSpec,
    pub dot: DotGeometry,
    pub range: SweepRange,
    pub seeds: Vec<u64>,
    /// Lateral field size; fitted to the swept dots when absent.
    pub extent: Option<Extent>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            profile: ProfileSpec::default(),
            dot: DotGeometry::default(),
            range: SweepRange::default(),
            seeds: (0..20).collect(),
            extent: None,
        }
    }
}

/// Both cases for one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSweep {
    pub seed: u64,
    pub case1: Vec<SweepPoint>,
    pub case2: Vec<SweepPoint>,
}

impl PairedSweep {
    /// Change of E_v between the sweep ends (eV) for each case.
    pub fn deltas(&self) -> (f64, f64) {
        let d = |p: &[SweepPoint]| p[p.len() - 1].e_v - p[0].e_v;
        (d(&self.case1), d(&self.case2))
    }
}

/// Runs Case 1 and Case 2 on a shared field for each seed, in parallel
/// over seeds.
pub fn paired_sweeps(
    spec: &SweepSpec,
    table: &BlochCoefficientTable,
    config: &ValleyConfig,
    constants: &MaterialConstants,
    exec: Execution,
) -> Result<Vec<PairedSweep>> {
    spec.range.validate()?;
    spec.dot.validate()?;
    if spec.seeds.is_empty() {
        return Err(Error::spec("seeds", "must not be empty"));
    }
    let coupler = config.coupler(table, constants);
    let profile = build_profile(&config.refined(&spec.profile, &coupler), constants)?;
    let extent = spec
        .extent
        .unwrap_or_else(|| spec.range.extent(&spec.dot, constants));
    exec.try_map(spec.seeds.len(), |k| {
        let seed = spec.seeds[k];
        let field = sample_alloy_field(&profile, extent, seed, constants, Execution::Sequential)?;
        Ok(PairedSweep {
            seed,
            case1: case1_sweep(&field, &spec.dot, &spec.range, &coupler, config)?,
            case2: case2_sweep(&field, &spec.dot, &spec.range, &coupler, config)?,
        })
    })
}
