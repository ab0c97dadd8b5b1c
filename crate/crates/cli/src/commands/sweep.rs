use serde::{Deserialize, Serialize};
use wiggle_core::disorder::{paired_sweeps, write_sweep_csv, PairedSweep, Statistics, SweepPoint, SweepSpec};
use wiggle_core::io;
use wiggle_core::valley::ValleyConfig;
use wiggle_core::{Execution, MaterialConstants};

use super::Context;
use crate::config::{self, TableConfig};
use crate::failure::{Failure, RunResult};
use crate::output::OutputDir;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepRun {
    pub sweep: SweepSpec,
    pub valley: ValleyConfig,
    pub table: TableConfig,
    pub constants: MaterialConstants,
}

#[derive(Serialize)]
struct DeltaRow {
    seed: u64,
    #[serde(rename = "dE_v_case1_eV")]
    case1_ev: f64,
    #[serde(rename = "dE_v_case1_ueV")]
    case1_uev: f64,
    #[serde(rename = "dE_v_case2_eV")]
    case2_ev: f64,
    #[serde(rename = "dE_v_case2_ueV")]
    case2_uev: f64,
}

/// Spread of the end-to-end changes of E_v (µeV).
#[derive(Debug, Serialize, Deserialize)]
pub struct DeltaSpread {
    #[serde(rename = "mean_ueV")]
    pub mean_uev: f64,
    #[serde(rename = "std_ueV")]
    pub std_uev: f64,
    #[serde(rename = "range_ueV")]
    pub range_uev: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MeanAtSetting {
    pub sweep_param: f64,
    #[serde(rename = "E_orb_meV")]
    pub e_orb_mev: f64,
    #[serde(rename = "case1_ueV")]
    pub case1_uev: f64,
    #[serde(rename = "case2_ueV")]
    pub case2_uev: f64,
    #[serde(rename = "combined_ueV")]
    pub combined_uev: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepSummary {
    pub seeds: usize,
    pub case1: DeltaSpread,
    pub case2: DeltaSpread,
    pub mean_by_setting: Vec<MeanAtSetting>,
}

fn spread(values: &[f64]) -> RunResult<DeltaSpread> {
    let s = Statistics::from_values(values)?;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(DeltaSpread {
        mean_uev: s.mean * 1e6,
        std_uev: s.std * 1e6,
        range_uev: (hi - lo) * 1e6,
    })
}

fn summarize(sweeps: &[PairedSweep]) -> RunResult<SweepSummary> {
    let (d1, d2): (Vec<f64>, Vec<f64>) = sweeps.iter().map(PairedSweep::deltas).unzip();
    let n = sweeps.len() as f64;
    let points = sweeps[0].case1.len();
    let mean_at = |k: usize, pick: fn(&PairedSweep) -> &[SweepPoint]| {
        sweeps.iter().map(|s| pick(s)[k].e_v).sum::<f64>() / n * 1e6
    };
    let mean_by_setting = (0..points)
        .map(|k| {
            let c1 = mean_at(k, |s| &s.case1);
            let c2 = mean_at(k, |s| &s.case2);
            MeanAtSetting {
                sweep_param: sweeps[0].case1[k].sweep_param,
                e_orb_mev: sweeps[0].case1[k].e_orb_mev,
                case1_uev: c1,
                case2_uev: c2,
                combined_uev: 0.5 * (c1 + c2),
            }
        })
        .collect();
    Ok(SweepSummary {
        seeds: sweeps.len(),
        case1: spread(&d1)?,
        case2: spread(&d2)?,
        mean_by_setting,
    })
}

pub fn run(ctx: &Context) -> RunResult<()> {
    let mut cfg: SweepRun = config::load(ctx.config.as_deref(), "dot-sweep")?;
    config::resolve_physics(
        &mut cfg.valley,
        &mut cfg.table,
        ctx.mode,
        ctx.table.as_deref(),
        ctx.config.as_deref(),
    )?;
    if let Some(seed) = ctx.seed {
        let n = cfg.sweep.seeds.len() as u64;
        cfg.sweep.seeds = (seed..seed + n).collect();
    }
    if cfg.sweep.seeds.is_empty() {
        return Err(Failure::new("invalid_spec", "invalid value for `seeds`: must not be empty"));
    }
    let table = cfg.table.load(&cfg.constants)?;
    let sweeps = paired_sweeps(&cfg.sweep, &table, &cfg.valley, &cfg.constants, Execution::Parallel)?;

    let mut out = OutputDir::create(&ctx.out)?;
    let case1: Vec<SweepPoint> = sweeps.iter().flat_map(|s| s.case1.iter().copied()).collect();
    let case2: Vec<SweepPoint> = sweeps.iter().flat_map(|s| s.case2.iter().copied()).collect();
    out.csv("sweep_case1.csv", case1.len(), |p| write_sweep_csv(p, &case1))?;
    out.csv("sweep_case2.csv", case2.len(), |p| write_sweep_csv(p, &case2))?;
    let deltas: Vec<DeltaRow> = sweeps
        .iter()
        .map(|s| {
            let (a, b) = s.deltas();
            DeltaRow {
                seed: s.seed,
                case1_ev: a,
                case1_uev: a * 1e6,
                case2_ev: b,
                case2_uev: b * 1e6,
            }
        })
        .collect();
    out.csv("sweep_deltas.csv", deltas.len(), |p| io::write_records(p, &deltas))?;
    let summary = summarize(&sweeps)?;
    out.json("sweep_summary.json", &summary)?;
    println!(
        "dot-sweep: {} seeds, dE_v std case1 {:.1} ueV, case2 {:.1} ueV",
        summary.seeds, summary.case1.std_uev, summary.case2.std_uev
    );
    let manifest = out.finish("dot-sweep", &cfg, &cfg.sweep.seeds, ctx.workers)?;
    println!("dot-sweep: -> {}", manifest.display());
    Ok(())
}
