pub mod ensemble;
pub mod fit;
pub mod profile;
pub mod scan;
pub mod sweep;

use std::path::PathBuf;

use wiggle_core::valley::ValleyMode;

/// Command-line settings shared by all subcommands.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub workers: usize,
    pub mode: Option<ValleyMode>,
    pub table: Option<PathBuf>,
}

/// File-name friendly label of a concentration, e.g. `0.05` -> `0p0500`.
pub fn label(x: f64) -> String {
    format!("{x:.4}").replace('.', "p").replace('-', "m")
}

fn check_fraction(name: &str, values: &[f64]) -> crate::failure::RunResult<()> {
    if values.is_empty() {
        return Err(crate::failure::Failure::new(
            "invalid_spec",
            format!("invalid value for `{name}`: must not be empty"),
        ));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(crate::failure::Failure::new(
            "invalid_spec",
            format!("invalid value for `{name}`: {v} is not a Ge fraction in [0, 1]"),
        ));
    }
    Ok(())
}
