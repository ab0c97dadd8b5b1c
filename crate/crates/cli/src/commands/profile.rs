use serde::{Deserialize, Serialize};
use wiggle_core::envelope::solve_envelope;
use wiggle_core::heterostructure::{build_profile, potential_from_profile, ProfileSpec};
use wiggle_core::valley::ValleyConfig;
use wiggle_core::MaterialConstants;

use super::Context;
use crate::config;
use crate::failure::{Failure, RunResult};
use crate::output::OutputDir;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileRun {
    pub profile: ProfileSpec,
    /// Field and barrier height of the potential.
    pub valley: ValleyConfig,
    pub constants: MaterialConstants,
    /// Envelope states to solve for.
    pub states: usize,
}

impl Default for ProfileRun {
    fn default() -> Self {
        Self {
            profile: ProfileSpec::default(),
            valley: ValleyConfig::default(),
            constants: MaterialConstants::default(),
            states: 2,
        }
    }
}

#[derive(Serialize)]
struct Level {
    state: usize,
    #[serde(rename = "energy_eV")]
    energy_ev: f64,
    #[serde(rename = "energy_ueV")]
    energy_uev: f64,
}

pub fn run(ctx: &Context) -> RunResult<()> {
    let cfg: ProfileRun = config::load(ctx.config.as_deref(), "profile")?;
    if cfg.states == 0 {
        return Err(Failure::new("invalid_spec", "invalid value for `states`: must be at least 1"));
    }
    let c = &cfg.constants;
    let profile = build_profile(&cfg.profile, c)?;
    let potential = potential_from_profile(&profile, &cfg.valley.potential_params(), c)?;
    let states = solve_envelope(&potential, c.m_l, cfg.states, c)?;

    let mut out = OutputDir::create(&ctx.out)?;
    let n = profile.len();
    out.csv("profile.csv", n, |p| profile.write_csv(p))?;
    out.csv("potential.csv", n, |p| potential.write_csv(p))?;
    for s in &states {
        out.csv(&format!("envelope_state{}.csv", s.state_index), n, |p| s.write_csv(p))?;
    }
    let levels: Vec<Level> = states
        .iter()
        .map(|s| Level {
            state: s.state_index,
            energy_ev: s.energy,
            energy_uev: s.energy * 1e6,
        })
        .collect();
    out.json("levels.json", &levels)?;
    let manifest = out.finish("profile", &cfg, &[], ctx.workers)?;
    println!(
        "profile: {n} grid points, ground state {:.6} eV -> {}",
        states[0].energy,
        manifest.display()
    );
    Ok(())
}
