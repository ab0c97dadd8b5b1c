use serde::{Deserialize, Serialize};
use wiggle_core::disorder::{ensemble, DisorderEnsemble, EnsembleSpec, Statistics};
use wiggle_core::io;
use wiggle_core::valley::ValleyConfig;
use wiggle_core::{Execution, MaterialConstants};

use super::{check_fraction, label, Context};
use crate::config::{self, ConcentrationKind, TableConfig};
use crate::failure::RunResult;
use crate::output::OutputDir;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleRun {
    pub ensemble: EnsembleSpec,
    /// When set, one ensemble per entry, overriding the profile amplitude.
    pub concentrations: Option<Vec<f64>>,
    pub concentration_kind: ConcentrationKind,
    pub valley: ValleyConfig,
    pub table: TableConfig,
    pub constants: MaterialConstants,
}

#[derive(Serialize)]
struct SummaryRow {
    peak_concentration: f64,
    average_concentration: f64,
    n: usize,
    #[serde(rename = "mean_eV")]
    mean_ev: f64,
    #[serde(rename = "mean_ueV")]
    mean_uev: f64,
    #[serde(rename = "std_ueV")]
    std_uev: f64,
    #[serde(rename = "p5_ueV")]
    p5_uev: f64,
    #[serde(rename = "p25_eV")]
    p25_ev: f64,
    #[serde(rename = "p25_ueV")]
    p25_uev: f64,
    #[serde(rename = "median_ueV")]
    median_uev: f64,
    #[serde(rename = "p75_eV")]
    p75_ev: f64,
    #[serde(rename = "p75_ueV")]
    p75_uev: f64,
    #[serde(rename = "p95_ueV")]
    p95_uev: f64,
}

impl SummaryRow {
    fn new(e: &DisorderEnsemble) -> Self {
        let s: &Statistics = &e.statistics;
        Self {
            peak_concentration: e.spec.profile.amplitude,
            average_concentration: e.spec.profile.average_concentration(),
            n: s.n,
            mean_ev: s.mean,
            mean_uev: s.mean * 1e6,
            std_uev: s.std * 1e6,
            p5_uev: s.percentile_5 * 1e6,
            p25_ev: s.percentile_25,
            p25_uev: s.percentile_25 * 1e6,
            median_uev: s.median * 1e6,
            p75_ev: s.percentile_75,
            p75_uev: s.percentile_75 * 1e6,
            p95_uev: s.percentile_95 * 1e6,
        }
    }
}

pub fn run(ctx: &Context) -> RunResult<()> {
    let mut cfg: EnsembleRun = config::load(ctx.config.as_deref(), "ensemble")?;
    config::resolve_physics(
        &mut cfg.valley,
        &mut cfg.table,
        ctx.mode,
        ctx.table.as_deref(),
        ctx.config.as_deref(),
    )?;
    if let Some(seed) = ctx.seed {
        cfg.ensemble.base_seed = seed;
    }
    let specs: Vec<EnsembleSpec> = match &cfg.concentrations {
        Some(list) => {
            check_fraction("concentrations", list)?;
            list.iter()
                .map(|&x| EnsembleSpec {
                    profile: cfg.concentration_kind.apply(&cfg.ensemble.profile, x),
                    ..cfg.ensemble.clone()
                })
                .collect()
        }
        None => vec![cfg.ensemble.clone()],
    };
    let table = cfg.table.load(&cfg.constants)?;
    let runs = specs
        .iter()
        .map(|s| ensemble(s, &table, &cfg.valley, &cfg.constants, Execution::Parallel))
        .collect::<wiggle_core::Result<Vec<_>>>()?;

    let mut out = OutputDir::create(&ctx.out)?;
    let mut rows = Vec::new();
    for e in &runs {
        let tag = label(e.spec.profile.amplitude);
        out.csv(&format!("ensemble_{tag}.csv"), e.samples.len(), |p| e.write_csv(p))?;
        let summary = format!("ensemble_{tag}_summary.json");
        e.write_summary(&out.path(&summary))?;
        out.check_json(&summary)?;
        let row = SummaryRow::new(e);
        println!(
            "ensemble: A = {:.4} ({} samples): mean {:.1} ueV, p25 {:.1}, p75 {:.1}",
            row.peak_concentration, row.n, row.mean_uev, row.p25_uev, row.p75_uev
        );
        rows.push(row);
    }
    out.csv("ensembles_summary.csv", rows.len(), |p| io::write_records(p, &rows))?;
    let mut seeds: Vec<u64> = specs
        .iter()
        .flat_map(|s| (0..s.n_samples).map(|k| s.seed(k)))
        .collect();
    seeds.sort_unstable();
    seeds.dedup();
    let manifest = out.finish("ensemble", &cfg, &seeds, ctx.workers)?;
    println!("ensemble: {} ensembles -> {}", runs.len(), manifest.display());
    Ok(())
}
