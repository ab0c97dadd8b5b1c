use serde::{Deserialize, Serialize};
use wiggle_core::heterostructure::ProfileSpec;
use wiggle_core::io;
use wiggle_core::valley::scan::{q_grid, ScanMetadata};
use wiggle_core::valley::{scan_q, ValleyConfig, ValleySplittingCurve};
use wiggle_core::{Execution, MaterialConstants};

use super::{check_fraction, label, Context};
use crate::config::{self, ConcentrationKind, TableConfig};
use crate::failure::{Failure, RunResult};
use crate::output::OutputDir;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanRun {
    /// Template; its amplitude and wavevector are replaced per curve.
    pub profile: ProfileSpec,
    /// One curve per entry.
    pub concentrations: Vec<f64>,
    pub concentration_kind: ConcentrationKind,
    /// The grid is `points` values on (q_min, q_max], nm⁻¹.
    pub q_min: f64,
    pub q_max: f64,
    pub points: usize,
    pub valley: ValleyConfig,
    pub table: TableConfig,
    pub constants: MaterialConstants,
}

impl Default for ScanRun {
    fn default() -> Self {
        Self {
            profile: ProfileSpec::default(),
            concentrations: vec![0.05],
            concentration_kind: ConcentrationKind::Peak,
            q_min: 0.0,
            q_max: 25.0,
            points: 250,
            valley: ValleyConfig::default(),
            table: TableConfig::default(),
            constants: MaterialConstants::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Peak {
    pub q_inv_nm: f64,
    #[serde(rename = "E_v_eV")]
    pub e_v_ev: f64,
    #[serde(rename = "E_v_ueV")]
    pub e_v_uev: f64,
}

impl Peak {
    fn new(q: f64, e: f64) -> Self {
        Self {
            q_inv_nm: q,
            e_v_ev: e,
            e_v_uev: e * 1e6,
        }
    }
}

#[derive(Serialize)]
struct CurveReport<'a> {
    file: String,
    peak_concentration: f64,
    average_concentration: f64,
    global_max: Peak,
    local_maxima: Vec<Peak>,
    metadata: &'a ScanMetadata,
}

pub fn run(ctx: &Context) -> RunResult<()> {
    let mut cfg: ScanRun = config::load(ctx.config.as_deref(), "scan-q")?;
    config::resolve_physics(
        &mut cfg.valley,
        &mut cfg.table,
        ctx.mode,
        ctx.table.as_deref(),
        ctx.config.as_deref(),
    )?;
    check_fraction("concentrations", &cfg.concentrations)?;
    if cfg.points < 3 || !(cfg.q_min >= 0.0 && cfg.q_max > cfg.q_min) {
        return Err(Failure::new(
            "invalid_spec",
            "invalid value for `points`/`q_min`/`q_max`: need points >= 3 and 0 <= q_min < q_max",
        ));
    }
    let table = cfg.table.load(&cfg.constants)?;
    let grid = q_grid(cfg.q_min, cfg.q_max, cfg.points);

    let curves = cfg
        .concentrations
        .iter()
        .map(|&x| {
            let template = cfg.concentration_kind.apply(&cfg.profile, x);
            scan_q(&template, &grid, &table, &cfg.valley, &cfg.constants, Execution::Parallel)
        })
        .collect::<wiggle_core::Result<Vec<ValleySplittingCurve>>>()?;

    let mut out = OutputDir::create(&ctx.out)?;
    let mut reports = Vec::new();
    let mut header = vec!["q_inv_nm".to_owned()];
    let mut columns: Vec<Vec<f64>> = vec![grid.clone()];
    for curve in &curves {
        let m = &curve.metadata;
        let tag = label(m.peak_concentration);
        let file = format!("scan_{tag}.csv");
        out.csv(&file, grid.len(), |p| curve.write_csv(p))?;
        let (q, e) = curve.max_in(f64::NEG_INFINITY, f64::INFINITY).expect("non-empty scan");
        let report = CurveReport {
            file,
            peak_concentration: m.peak_concentration,
            average_concentration: m.average_concentration,
            global_max: Peak::new(q, e),
            local_maxima: curve
                .local_maxima()
                .into_iter()
                .map(|i| Peak::new(curve.q_values[i], curve.e_v_values[i]))
                .collect(),
            metadata: m,
        };
        out.json(&format!("scan_{tag}.json"), &report)?;
        println!(
            "scan-q: A = {:.4}: global max {:.4e} eV at q = {:.3} nm^-1, {} local maxima",
            m.peak_concentration,
            e,
            q,
            report.local_maxima.len()
        );
        reports.push(report);
        header.push(format!("E_v_eV_{tag}"));
        header.push(format!("E_v_ueV_{tag}"));
        columns.push(curve.e_v_values.clone());
        columns.push(curve.e_v_values.iter().map(|e| e * 1e6).collect());
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let cols: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    out.csv("scan_combined.csv", grid.len(), |p| io::write_columns(p, &header, &cols))?;
    out.json("peaks.json", &reports)?;
    let manifest = out.finish("scan-q", &cfg, &[], ctx.workers)?;
    println!("scan-q: {} curves -> {}", curves.len(), manifest.display());
    Ok(())
}
