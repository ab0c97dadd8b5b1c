//! Regenerates the coefficient tables and synthetic traces under `data/`.
//!
//! cargo run -p wiggle-core --example bundled_data -- <repo>/data

use std::path::PathBuf;

use wiggle_core::constants::K_B;
use wiggle_core::spectrofit::{synthetic_trace, TransitionParams};
use wiggle_core::valley::BlochCoefficientTable;
use wiggle_core::MaterialConstants;

const ALPHA: f64 = 0.1;
const T_E0: f64 = 0.1;

fn main() -> wiggle_core::Result<()> {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    let c = MaterialConstants::default();
    let tables = root.join("tables");
    std::fs::create_dir_all(&tables)?;
    BlochCoefficientTable::fallback().write_csv(&tables.join("fallback.csv"))?;
    BlochCoefficientTable::diamond_model(&c, 7).write_csv(&tables.join("diamond_model.csv"))?;
    BlochCoefficientTable::diamond_model_broken(&c, 7, 0.2).write_csv(&tables.join("diamond_model_broken.csv"))?;

    // 50 to 500 mK in 25 mK steps, 1% noise
    let traces = root.join("traces");
    std::fs::create_dir_all(&traces)?;
    for k in 0..19 {
        let t_mc = 0.05 + 0.025 * k as f64;
        let tau = (t_mc * t_mc + T_E0 * T_E0).sqrt() / ALPHA;
        let half = 12.0 * K_B * tau;
        let p = TransitionParams {
            amplitude: 1.0,
            tau,
            slope: 0.5,
            v0: 0.31,
            offset: 2.0,
        };
        let path = traces.join(format!("T{:03}mK.csv", (t_mc * 1e3).round() as u32));
        // the first trace keeps T_MC in a sidecar, the rest in a column
        if k == 0 {
            synthetic_trace(&p, (p.v0 - half, p.v0 + half), 301, 0.01, 500 + k, None).write_csv(&path)?;
            std::fs::write(path.with_extension("json"), format!("{{\"T_MC_K\": {t_mc}}}\n"))?;
        } else {
            synthetic_trace(&p, (p.v0 - half, p.v0 + half), 301, 0.01, 500 + k, Some(t_mc)).write_csv(&path)?;
        }
    }
    std::fs::write(
        traces.join("truth.json"),
        format!("{{\"alpha_eV_per_V\": {ALPHA}, \"T_e0_K\": {T_E0}, \"noise\": 0.01}}\n"),
    )?;
    Ok(())
}
