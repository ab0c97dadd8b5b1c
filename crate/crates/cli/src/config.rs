//! Run configuration files: TOML (default) or JSON, or a previous run's
//! manifest, whose embedded config reproduces that run.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use wiggle_core::heterostructure::ProfileSpec;
use wiggle_core::valley::{BlochCoefficientTable, NormBounds, ValleyConfig, ValleyMode};
use wiggle_core::MaterialConstants;

use crate::failure::{Failure, RunResult};

/// Reads a config of type `T` for `command`. Missing file means defaults.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>, command: &str) -> RunResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        let value = match value.get("manifest_version") {
            Some(_) => unwrap_manifest(value, command, path)?,
            None => value,
        };
        serde_json::from_value(value).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
    }
}

fn unwrap_manifest(mut value: serde_json::Value, command: &str, path: &Path) -> RunResult<serde_json::Value> {
    let recorded = value.get("command").and_then(|c| c.as_str()).unwrap_or_default();
    if recorded != command {
        return Err(Failure::config(format!(
            "{} is a manifest of `{recorded}`, not `{command}`",
            path.display()
        )));
    }
    value
        .get_mut("config")
        .map(serde_json::Value::take)
        .ok_or_else(|| Failure::config(format!("{}: manifest has no `config`", path.display())))
}

/// Joins relative paths onto the config file's directory.
pub fn resolve_path(p: &Path, base: Option<&Path>) -> PathBuf {
    if p.is_absolute() {
        return p.to_path_buf();
    }
    let joined = match base.and_then(Path::parent) {
        Some(dir) => dir.join(p),
        None => p.to_path_buf(),
    };
    std::fs::canonicalize(&joined)
        .or_else(|_| std::path::absolute(&joined))
        .unwrap_or(joined)
}

/// Whether a scan or ensemble concentration list holds peak amplitudes
/// or averages (peak = 2 × average).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcentrationKind {
    #[default]
    Peak,
    Average,
}

impl ConcentrationKind {
    pub fn apply(self, spec: &ProfileSpec, value: f64) -> ProfileSpec {
        match self {
            Self::Peak => ProfileSpec {
                amplitude: value,
                ..spec.clone()
            },
            Self::Average => spec.clone().with_average_concentration(value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinTable {
    /// One coefficient per valley.
    Fallback,
    /// Symmetry-respecting 59-entry model.
    DiamondModel,
    /// The model with weakly broken screw symmetry.
    DiamondModelBroken,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TableConfig {
    /// CSV table; relative paths are taken from the config file's folder.
    pub path: Option<PathBuf>,
    pub builtin: Option<BuiltinTable>,
    /// Phase seed of the model tables.
    pub model_seed: u64,
    /// Symmetry-breaking strength of `diamond_model_broken`.
    pub break_strength: f64,
    pub norm_bounds: NormBounds,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            path: None,
            builtin: None,
            model_seed: 7,
            break_strength: 0.2,
            norm_bounds: NormBounds::default(),
        }
    }
}

impl TableConfig {
    /// Fills in what `load` will use, so manifests record it explicitly.
    pub fn resolve(&mut self, mode: ValleyMode, config_path: Option<&Path>) -> RunResult<()> {
        match (&self.path, self.builtin) {
            (Some(_), Some(_)) => Err(Failure::config("set either `table.path` or `table.builtin`, not both")),
            (Some(p), None) => {
                let abs = resolve_path(p, config_path);
                if !abs.is_file() {
                    return Err(Failure::new(
                        "missing_table",
                        format!(
                            "coefficient table {} does not exist; pass --table <path> to a CSV with columns \
                             Kx,Ky,Kz,re_c_plus,im_c_plus,re_c_minus,im_c_minus or set `table.builtin`",
                            abs.display()
                        ),
                    ));
                }
                self.path = Some(abs);
                Ok(())
            }
            (None, Some(_)) => Ok(()),
            (None, None) if mode == ValleyMode::TwoComponent => Err(Failure::new(
                "missing_table",
                "two-component mode needs a Bloch coefficient table: pass --table <path> or set \
                 `table.path` (or `table.builtin = \"diamond_model_broken\"`) in the config",
            )),
            (None, None) => {
                self.builtin = Some(BuiltinTable::Fallback);
                Ok(())
            }
        }
    }

    pub fn load(&self, constants: &MaterialConstants) -> RunResult<BlochCoefficientTable> {
        if let Some(p) = &self.path {
            return Ok(BlochCoefficientTable::load_csv(p, self.norm_bounds)?);
        }
        Ok(match self.builtin.unwrap_or(BuiltinTable::Fallback) {
            BuiltinTable::Fallback => BlochCoefficientTable::fallback(),
            BuiltinTable::DiamondModel => BlochCoefficientTable::diamond_model(constants, self.model_seed),
            BuiltinTable::DiamondModelBroken => {
                BlochCoefficientTable::diamond_model_broken(constants, self.model_seed, self.break_strength)
            }
        })
    }
}

/// Applies the `--mode` and `--table` overrides to a command's valley
/// settings and resolves its table.
pub fn resolve_physics(
    valley: &mut ValleyConfig,
    table: &mut TableConfig,
    mode: Option<ValleyMode>,
    table_flag: Option<&Path>,
    config_path: Option<&Path>,
) -> RunResult<()> {
    if let Some(m) = mode {
        valley.mode = m;
    }
    if let Some(t) = table_flag {
        table.builtin = None;
        table.path = Some(std::path::absolute(t).unwrap_or_else(|_| t.to_path_buf()));
    }
    table.resolve(valley.mode, config_path)
}
