//! Output folder bookkeeping: every file is checked after it is written,
//! and the manifest goes last so its presence marks a complete run.

use std::path::{Path, PathBuf};

use serde::Serialize;
use wiggle_core::io;

use crate::failure::{Failure, RunResult};

pub const MANIFEST: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    pub bytes: u64,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    manifest_version: u32,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a C,
    seeds: &'a [u64],
    workers: usize,
    outputs: &'a [OutputRecord],
}

pub struct OutputDir {
    root: PathBuf,
    records: Vec<OutputRecord>,
}

impl OutputDir {
    /// Creates the folder and drops any manifest of an earlier run.
    pub fn create(root: &Path) -> RunResult<Self> {
        std::fs::create_dir_all(root)
            .map_err(|e| Failure::new("io", format!("cannot create {}: {e}", root.display())))?;
        let stale = root.join(MANIFEST);
        if stale.exists() {
            std::fs::remove_file(&stale)?;
        }
        Ok(Self {
            root: root.to_path_buf(),
            records: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes a numeric CSV through `write` and checks it holds
    /// `expected_rows` rows of finite numbers.
    pub fn csv(
        &mut self,
        name: &str,
        expected_rows: usize,
        write: impl FnOnce(&Path) -> wiggle_core::Result<()>,
    ) -> RunResult<()> {
        let path = self.path(name);
        write(&path)?;
        let (_, rows) = io::read_numeric_csv(&path)?;
        if rows.len() != expected_rows {
            return Err(Failure::output(format!(
                "{name}: wrote {} rows, expected {expected_rows}",
                rows.len()
            )));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Failure::output(format!("{name}: contains non-finite values")));
        }
        self.push(name, Some(rows.len()))
    }

    /// Writes pretty JSON and checks it parses back.
    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> RunResult<()> {
        let path = self.path(name);
        io::write_json(&path, value)?;
        self.check_json(name)
    }

    /// Records a JSON file written elsewhere, after checking it parses.
    pub fn check_json(&mut self, name: &str) -> RunResult<()> {
        let text = std::fs::read_to_string(self.path(name))?;
        serde_json::from_str::<serde_json::Value>(&text)
            .map_err(|e| Failure::output(format!("{name}: not valid JSON: {e}")))?;
        self.push(name, None)
    }

    fn push(&mut self, name: &str, rows: Option<usize>) -> RunResult<()> {
        let bytes = std::fs::metadata(self.path(name))?.len();
        self.records.push(OutputRecord {
            file: name.to_owned(),
            rows,
            bytes,
        });
        Ok(())
    }

    /// Writes the manifest atomically (temp file, then rename).
    pub fn finish<C: Serialize>(self, command: &str, config: &C, seeds: &[u64], workers: usize) -> RunResult<PathBuf> {
        let manifest = Manifest {
            manifest_version: MANIFEST_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            seeds,
            workers,
            outputs: &self.records,
        };
        let tmp = self.path(".manifest.json.tmp");
        io::write_json(&tmp, &manifest)?;
        let dest = self.path(MANIFEST);
        std::fs::rename(&tmp, &dest)?;
        Ok(dest)
    }
}
