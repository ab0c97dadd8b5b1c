//! Valley splitting in Si/SiGe Wiggle Well quantum wells.
//!
//! The crate is organized bottom-up:
//!
//! - [`heterostructure`]: Ge concentration profiles and the 1D potential.
//! - [`envelope`]: finite-difference envelope-function eigenstates.
//! - [`valley`]: Bloch coefficient tables, intervalley coupling, valley
//!   splitting (perturbative and two-component) and q-scans.
//! - [`disorder`]: random-alloy fields, dot-weighted effective profiles,
//!   dot sweeps and ensembles.
//! - [`spectrofit`]: charge-sensor transition fits and lever arms.
//!
//! Units are nm, eV and Ge fraction unless a name says otherwise.

pub mod constants;
pub mod disorder;
pub mod envelope;
pub mod error;
pub mod exec;
pub mod heterostructure;
pub mod io;
pub mod spectrofit;
pub mod valley;

pub use constants::MaterialConstants;
pub use error::{Error, Result};
pub use exec::Execution;
