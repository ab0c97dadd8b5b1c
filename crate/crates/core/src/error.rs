use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidSpec { field: String, reason: String },

    #[error("state {state} is not confined: energy {energy:.6e} eV exceeds boundary potential {boundary:.6e} eV")]
    NotConfined {
        state: usize,
        energy: f64,
        boundary: f64,
    },

    #[error("grid spacing is not uniform (max deviation {deviation:.3e} nm)")]
    DegenerateGrid { deviation: f64 },

    #[error("grid too coarse: frequency {frequency:.3} nm^-1 has only {points_per_period:.2} points per period (need {required})")]
    GridTooCoarse {
        frequency: f64,
        points_per_period: f64,
        required: f64,
    },

    #[error("alloy field extent too small: dot weighting would truncate {lost_mass:.3e} of |chi|^2")]
    ExtentTooSmall { lost_mass: f64 },

    #[error("no transition found: fitted |A| = {amplitude:.3e} is below 3x residual rms {rms:.3e}")]
    NoTransitionFound { amplitude: f64, rms: f64 },

    #[error("fit did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("invalid coefficient table: {0}")]
    InvalidTable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn spec(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidSpec {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Stable machine-readable category, used for CLI exit reporting.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidSpec { .. } => "invalid_spec",
            Error::NotConfined { .. } => "not_confined",
            Error::DegenerateGrid { .. } => "degenerate_grid",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::ExtentTooSmall { .. } => "extent_too_small",
            Error::NoTransitionFound { .. } => "no_transition_found",
            Error::NonConvergence { .. } => "non_convergence",
            Error::IllConditioned(_) => "ill_conditioned",
            Error::InvalidTable(_) => "invalid_table",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
