//! Error categories and process exit codes.

use std::fmt;

use serde::Serialize;

/// A run failure with a stable category string.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub category: &'static str,
    pub message: String,
}

impl Failure {
    pub fn new(category: &'static str, message: impl Into<String>) -> Self {
        Self {
            category,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new("config", message)
    }

    pub fn output(message: impl Into<String>) -> Self {
        Self::new("output_validation", message)
    }

    /// 3 configuration, 4 input data, 5 numerics, 6 I/O and output
    /// validation. Clap reports usage errors with 2.
    pub fn exit_code(&self) -> i32 {
        match self.category {
            "config" | "invalid_spec" | "missing_table" => 3,
            "invalid_input" | "invalid_table" | "csv" | "json" | "no_transition_found" => 4,
            "not_confined" | "degenerate_grid" | "grid_too_coarse" | "extent_too_small" | "non_convergence"
            | "ill_conditioned" => 5,
            _ => 6,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<wiggle_core::Error> for Failure {
    fn from(e: wiggle_core::Error) -> Self {
        Self::new(e.category(), e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::new("io", e.to_string())
    }
}

pub type RunResult<T> = Result<T, Failure>;
