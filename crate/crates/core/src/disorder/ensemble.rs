//! Disorder ensembles: one alloy realization per seed, same dot.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{effective_profile, sample_alloy_field, DotGeometry, Extent, DEFAULT_MARGIN};
use crate::constants::MaterialConstants;
use crate::exec::Execution;
use crate::heterostructure::{build_profile, ProfileSpec};
use crate::io;
use crate::valley::{evaluate_profile, BlochCoefficientTable, ValleyConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSpec {
    pub profile: ProfileSpec,
    pub n_samples: usize,
    pub dot: DotGeometry,
    pub base_seed: u64,
    /// Lateral field size; fitted to the dot when absent.
    pub extent: Option<Extent>,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            profile: ProfileSpec::default(),
            n_samples: 40,
            dot: DotGeometry::default(),
            base_seed: 0,
            extent: None,
        }
    }
}

impl EnsembleSpec {
    pub fn seed(&self, k: usize) -> u64 {
        self.base_seed.wrapping_add(k as u64)
    }

    pub fn resolved_extent(&self, constants: &MaterialConstants) -> Extent {
        self.extent
            .unwrap_or_else(|| Extent::covering(&[self.dot], DEFAULT_MARGIN, constants))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSample {
    pub sample_index: usize,
    pub seed: u64,
    /// eV
    pub e_v: f64,
    #[serde(rename = "E_orb_meV")]
    pub e_orb_mev: f64,
    pub dot: DotGeometry,
}

/// Order statistics use linear interpolation between ranks; `std` is the
/// population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Statistics {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub percentile_5: f64,
    pub percentile_25: f64,
    pub median: f64,
    pub percentile_75: f64,
    pub percentile_95: f64,
}

impl Statistics {
    /// Values are sorted first, so the result does not depend on their
    /// order.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("statistics of an empty sample".into()));
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        let pct = |p: f64| {
            let pos = p * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Ok(Self {
            n,
            mean,
            std: var.sqrt(),
            percentile_5: pct(0.05),
            percentile_25: pct(0.25),
            median: pct(0.5),
            percentile_75: pct(0.75),
            percentile_95: pct(0.95),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderEnsemble {
    pub samples: Vec<EnsembleSample>,
    /// Statistics of E_v in eV.
    pub statistics: Statistics,
    pub spec: EnsembleSpec,
    pub extent: Extent,
    pub table: String,
}

#[derive(Serialize)]
struct SampleRow {
    sample_index: usize,
    seed: u64,
    #[serde(rename = "E_orb_meV")]
    e_orb_mev: f64,
    #[serde(rename = "E_v_ueV")]
    e_v_uev: f64,
    #[serde(rename = "E_v_eV")]
    e_v_ev: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    #[serde(rename = "E_v_eV")]
    e_v_ev: &'a Statistics,
    #[serde(rename = "E_v_ueV")]
    e_v_uev: Statistics,
    peak_concentration: f64,
    average_concentration: f64,
    spec: &'a EnsembleSpec,
    extent: &'a Extent,
    table: &'a str,
}

impl DisorderEnsemble {
    pub fn e_v_values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.e_v).collect()
    }

    /// Recomputes the statistics from the stored samples.
    pub fn recompute_statistics(&self) -> Result<Statistics> {
        Statistics::from_values(&self.e_v_values())
    }

    /// Columns `sample_index, seed, E_orb_meV, E_v_ueV, E_v_eV`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<SampleRow> = self
            .samples
            .iter()
            .map(|s| SampleRow {
                sample_index: s.sample_index,
                seed: s.seed,
                e_orb_mev: s.e_orb_mev,
                e_v_uev: s.e_v * 1e6,
                e_v_ev: s.e_v,
            })
            .collect();
        io::write_records(path, &rows)
    }

    pub fn write_summary(&self, path: &Path) -> Result<()> {
        let uev: Vec<f64> = self.samples.iter().map(|s| s.e_v * 1e6).collect();
        io::write_json(
            path,
            &Summary {
                e_v_ev: &self.statistics,
                e_v_uev: Statistics::from_values(&uev)?,
                peak_concentration: self.spec.profile.amplitude,
                average_concentration: self.spec.profile.average_concentration(),
                spec: &self.spec,
                extent: &self.extent,
                table: &self.table,
            },
        )
    }
}

/// Valley splitting of one disorder realization.
pub fn sample_valley_splitting(
    spec: &EnsembleSpec,
    seed: u64,
    table: &BlochCoefficientTable,
    config: &ValleyConfig,
    constants: &MaterialConstants,
    exec: Execution,
) -> Result<f64> {
    let coupler = config.coupler(table, constants);
    let profile = build_profile(&config.refined(&spec.profile, &coupler), constants)?;
    let field = sample_alloy_field(&profile, spec.resolved_extent(constants), seed, constants, exec)?;
    let effective = effective_profile(&field, &spec.dot, constants)?;
    Ok(evaluate_profile(&effective, &coupler, config)?.e_v)
}

/// Sample k uses seed `base_seed + k`. Samples run in parallel under
/// `exec`; each owns its field and RNG streams, so the result does not
/// depend on scheduling.
pub fn ensemble(
    spec: &EnsembleSpec,
    table: &BlochCoefficientTable,
    config: &ValleyConfig,
    constants: &MaterialConstants,
    exec: Execution,
) -> Result<DisorderEnsemble> {
    if spec.n_samples == 0 {
        return Err(Error::spec("n_samples", "must be at least 1"));
    }
    spec.dot.validate()?;
    let extent = spec.resolved_extent(constants);
    extent.validate()?;
    let coupler = config.coupler(table, constants);
    let profile = build_profile(&config.refined(&spec.profile, &coupler), constants)?;
    let samples = exec.try_map(spec.n_samples, |k| {
        let seed = spec.seed(k);
        // the fan-out is over samples; each field is drawn sequentially
        let field = sample_alloy_field(&profile, extent, seed, constants, Execution::Sequential)?;
        let effective = effective_profile(&field, &spec.dot, constants)?;
        let r = evaluate_profile(&effective, &coupler, config)?;
        Ok::<_, Error>(EnsembleSample {
            sample_index: k,
            seed,
            e_v: r.e_v,
            e_orb_mev: spec.dot.hbar_omega_x,
            dot: spec.dot,
        })
    })?;
    let statistics = Statistics::from_values(&samples.iter().map(|s| s.e_v).collect::<Vec<_>>())?;
    Ok(DisorderEnsemble {
        samples,
        statistics,
        spec: spec.clone(),
        extent,
        table: table.source_label.clone(),
    })
}
