use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wiggle_core::io;
use wiggle_core::spectrofit::{
    energy_with_error, fit_lever_arm, fit_transition, LeverArmFit, Measured, TauPoint, TransitionFit, TransitionTrace,
};
use wiggle_core::Execution;

use super::Context;
use crate::config::{self, resolve_path};
use crate::failure::{Failure, RunResult};
use crate::output::OutputDir;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitTransitionRun {
    /// Trace CSVs; relative paths are taken from the config file's folder.
    pub traces: Vec<PathBuf>,
}

/// A measured voltage splitting to convert with the fitted lever arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Splitting {
    /// V
    pub dv: f64,
    /// V
    #[serde(default)]
    pub dv_err: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitLeverArmRun {
    /// Traces carrying T_MC; each is fitted for τ first.
    pub traces: Vec<PathBuf>,
    /// Alternatively, a CSV of `T_MC_K, tau` pairs.
    pub points: Option<PathBuf>,
    pub splittings: Vec<Splitting>,
}

#[derive(Serialize)]
struct NamedFit<'a> {
    trace: &'a Path,
    #[serde(flatten)]
    fit: &'a TransitionFit,
    #[serde(rename = "width_V")]
    width_v: f64,
}

fn resolve_all(paths: &mut [PathBuf], base: Option<&Path>) {
    for p in paths {
        *p = resolve_path(p, base);
    }
}

fn fit_traces(paths: &[PathBuf]) -> RunResult<Vec<TransitionFit>> {
    if paths.is_empty() {
        return Err(Failure::config("no traces given: list them under `traces` or on the command line"));
    }
    Execution::Parallel
        .try_map(paths.len(), |k| {
            let trace = TransitionTrace::load_csv(&paths[k])?;
            fit_transition(&trace).map_err(|e| match e {
                wiggle_core::Error::NoTransitionFound { .. } => {
                    wiggle_core::Error::InvalidInput(format!("{}: {e}", paths[k].display()))
                }
                other => other,
            })
        })
        .map_err(Failure::from)
}

fn write_fits(out: &mut OutputDir, paths: &[PathBuf], fits: &[TransitionFit]) -> RunResult<()> {
    let named: Vec<NamedFit> = paths
        .iter()
        .zip(fits)
        .map(|(p, f)| NamedFit {
            trace: p,
            fit: f,
            width_v: f.params.width(),
        })
        .collect();
    out.json("transition_fits.json", &named)?;
    let idx: Vec<f64> = (0..fits.len()).map(|k| k as f64).collect();
    let col = |f: fn(&TransitionFit) -> f64| fits.iter().map(f).collect::<Vec<f64>>();
    let mut header = vec!["trace_index", "tau", "tau_err", "width_V", "amplitude", "V0_V", "slope", "offset", "residual_rms"];
    let mut columns = vec![
        idx,
        col(|f| f.params.tau),
        col(|f| f.std_errors.tau),
        col(|f| f.params.width()),
        col(|f| f.params.amplitude),
        col(|f| f.params.v0),
        col(|f| f.params.slope),
        col(|f| f.params.offset),
        col(|f| f.residual_rms),
    ];
    if fits.iter().all(|f| f.t_mc.is_some()) {
        header.push("T_MC_K");
        columns.push(fits.iter().map(|f| f.t_mc.unwrap_or_default()).collect());
    }
    let cols: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    out.csv("transition_fits.csv", fits.len(), |p| io::write_columns(p, &header, &cols))
}

pub fn run_transition(ctx: &Context, cli_traces: &[PathBuf]) -> RunResult<()> {
    let mut cfg: FitTransitionRun = config::load(ctx.config.as_deref(), "fit-transition")?;
    if !cli_traces.is_empty() {
        cfg.traces = cli_traces.to_vec();
        resolve_all(&mut cfg.traces, None);
    } else {
        resolve_all(&mut cfg.traces, ctx.config.as_deref());
    }
    let fits = fit_traces(&cfg.traces)?;
    let mut out = OutputDir::create(&ctx.out)?;
    write_fits(&mut out, &cfg.traces, &fits)?;
    for (p, f) in cfg.traces.iter().zip(&fits) {
        println!(
            "fit-transition: {}: tau = {:.4} ± {:.4} K·V/eV",
            p.display(),
            f.params.tau,
            f.std_errors.tau
        );
    }
    let manifest = out.finish("fit-transition", &cfg, &[], ctx.workers)?;
    println!("fit-transition: {} traces -> {}", fits.len(), manifest.display());
    Ok(())
}

#[derive(Serialize)]
struct EnergyRow {
    #[serde(rename = "dV_V")]
    dv: f64,
    #[serde(rename = "dV_err_V")]
    dv_err: f64,
    #[serde(rename = "E_eV")]
    e_ev: f64,
    #[serde(rename = "E_err_eV")]
    e_err_ev: f64,
    #[serde(rename = "E_ueV")]
    e_uev: f64,
    #[serde(rename = "E_err_ueV")]
    e_err_uev: f64,
}

fn load_points(path: &Path) -> RunResult<Vec<TauPoint>> {
    let (header, rows) = io::read_numeric_csv(path)?;
    if header.len() < 2 || header[0] != "T_MC_K" || header[1] != "tau" {
        return Err(Failure::new(
            "invalid_input",
            format!("{}: expected header `T_MC_K,tau`", path.display()),
        ));
    }
    Ok(rows.iter().map(|r| TauPoint { t_mc: r[0], tau: r[1] }).collect())
}

pub fn run_lever_arm(ctx: &Context, cli_traces: &[PathBuf]) -> RunResult<()> {
    let mut cfg: FitLeverArmRun = config::load(ctx.config.as_deref(), "fit-leverarm")?;
    if !cli_traces.is_empty() {
        cfg.traces = cli_traces.to_vec();
        cfg.points = None;
        resolve_all(&mut cfg.traces, None);
    } else {
        resolve_all(&mut cfg.traces, ctx.config.as_deref());
        cfg.points = cfg.points.map(|p| resolve_path(&p, ctx.config.as_deref()));
    }
    let (fits, points) = match (&cfg.points, cfg.traces.is_empty()) {
        (Some(_), false) => return Err(Failure::config("set either `traces` or `points`, not both")),
        (Some(p), true) => (Vec::new(), load_points(p)?),
        (None, _) => {
            let fits = fit_traces(&cfg.traces)?;
            let points = fits
                .iter()
                .zip(&cfg.traces)
                .map(|(f, p)| {
                    f.t_mc.map(|t_mc| TauPoint { t_mc, tau: f.params.tau }).ok_or_else(|| {
                        Failure::new(
                            "invalid_input",
                            format!("{}: no T_MC (add a T_MC_K column or a .json sidecar)", p.display()),
                        )
                    })
                })
                .collect::<RunResult<Vec<_>>>()?;
            (fits, points)
        }
    };
    let lever: LeverArmFit = fit_lever_arm(&points)?;
    let alpha = Measured {
        value: lever.alpha,
        std_err: lever.alpha_err,
    };
    let energies = cfg
        .splittings
        .iter()
        .map(|s| {
            let e = energy_with_error(
                Measured {
                    value: s.dv,
                    std_err: s.dv_err,
                },
                alpha,
            )?;
            Ok(EnergyRow {
                dv: s.dv,
                dv_err: s.dv_err,
                e_ev: e.value,
                e_err_ev: e.std_err,
                e_uev: e.value * 1e6,
                e_err_uev: e.std_err * 1e6,
            })
        })
        .collect::<wiggle_core::Result<Vec<_>>>()?;

    let mut out = OutputDir::create(&ctx.out)?;
    if !fits.is_empty() {
        write_fits(&mut out, &cfg.traces, &fits)?;
    }
    out.json("lever_arm.json", &lever)?;
    let t: Vec<f64> = points.iter().map(|p| p.t_mc).collect();
    let tau: Vec<f64> = points.iter().map(|p| p.tau).collect();
    let model: Vec<f64> = t.iter().map(|&t| lever.tau_at(t)).collect();
    out.csv("lever_arm_points.csv", points.len(), |p| {
        io::write_columns(
            p,
            &["T_MC_K", "tau", "tau_fit", "residual"],
            &[&t, &tau, &model, &lever.residuals],
        )
    })?;
    if !energies.is_empty() {
        out.csv("energies.csv", energies.len(), |p| io::write_records(p, &energies))?;
    }
    println!(
        "fit-leverarm: alpha = {:.5} ± {:.5} eV/V, T_e0 = {:.4} ± {:.4} K",
        lever.alpha, lever.alpha_err, lever.t_e0, lever.t_e0_err
    );
    let manifest = out.finish("fit-leverarm", &cfg, &[], ctx.workers)?;
    println!("fit-leverarm: -> {}", manifest.display());
    Ok(())
}
