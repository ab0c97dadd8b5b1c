//! Bound states of the 1D effective-mass Schrödinger equation
//! `-(ħ²/2m) ψ'' + V(z) ψ = E ψ` with Dirichlet boundaries, discretized by
//! 3-point finite differences on the potential's uniform grid.

pub mod tridiag;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::MaterialConstants;
use crate::heterostructure::PotentialProfile;
use crate::io;
use crate::{Error, Result};

pub use tridiag::SymTridiagonal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSolution {
    pub z: Vec<f64>,
    /// Real amplitude (nm^-1/2), `Σ ψ² Δz = 1`, positive at its largest
    /// magnitude.
    pub psi: Vec<f64>,
    /// eV
    pub energy: f64,
    pub state_index: usize,
    pub spacing: f64,
}

impl EnvelopeSolution {
    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|p| p * p).collect()
    }

    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|p| p * p).sum::<f64>() * self.spacing
    }

    pub fn overlap(&self, other: &EnvelopeSolution) -> f64 {
        self.psi.iter().zip(&other.psi).map(|(a, b)| a * b).sum::<f64>() * self.spacing
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let density = self.density();
        io::write_columns(path, &["z_nm", "psi", "psi_squared"], &[&self.z, &self.psi, &density])
    }
}

#[derive(Debug, Serialize)]
struct EnergySidecar<'a> {
    mass_m0: f64,
    energies_ev: Vec<f64>,
    state_files: &'a [String],
}

/// Writes `<stem>_state<k>.csv` per state plus `<stem>_energies.json`.
pub fn write_solutions(dir: &Path, stem: &str, mass: f64, states: &[EnvelopeSolution]) -> Result<()> {
    let files: Vec<String> = states
        .iter()
        .map(|s| format!("{stem}_state{}.csv", s.state_index))
        .collect();
    for (s, f) in states.iter().zip(&files) {
        s.write_csv(&dir.join(f))?;
    }
    io::write_json(
        &dir.join(format!("{stem}_energies.json")),
        &EnergySidecar {
            mass_m0: mass,
            energies_ev: states.iter().map(|s| s.energy).collect(),
            state_files: &files,
        },
    )
}

/// Checks that `z` is uniform with spacing `h`.
pub(crate) fn check_uniform(z: &[f64], h: f64) -> Result<()> {
    let deviation = z
        .windows(2)
        .map(|w| ((w[1] - w[0]) - h).abs())
        .fold(0.0, f64::max);
    if !(h > 0.0) || deviation > 1e-9 * h.max(1.0) {
        return Err(Error::DegenerateGrid { deviation });
    }
    Ok(())
}

/// Finite-difference Hamiltonian for mass `mass` (units of m0).
pub fn hamiltonian(potential: &PotentialProfile, mass: f64, constants: &MaterialConstants) -> Result<SymTridiagonal> {
    let h = potential.spacing();
    check_uniform(&potential.z, h)?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::spec("mass", "must be positive"));
    }
    let t = constants.kinetic_prefactor(mass) / (h * h);
    let n = potential.len();
    let diag = potential.v_total.iter().map(|v| 2.0 * t + v).collect();
    Ok(SymTridiagonal::new(diag, vec![-t; n - 1]))
}

/// Lowest `n_states` eigenpairs, energies ascending. Each returned state
/// must lie below the smaller of the two boundary potentials.
pub fn solve_envelope(
    potential: &PotentialProfile,
    mass: f64,
    n_states: usize,
    constants: &MaterialConstants,
) -> Result<Vec<EnvelopeSolution>> {
    solve(potential, mass, n_states, constants, true)
}

/// As [`solve_envelope`] but treats the grid ends as impenetrable walls,
/// so no confinement check is made.
pub fn solve_hard_wall(
    potential: &PotentialProfile,
    mass: f64,
    n_states: usize,
    constants: &MaterialConstants,
) -> Result<Vec<EnvelopeSolution>> {
    solve(potential, mass, n_states, constants, false)
}

fn solve(
    potential: &PotentialProfile,
    mass: f64,
    n_states: usize,
    constants: &MaterialConstants,
    check_confined: bool,
) -> Result<Vec<EnvelopeSolution>> {
    if potential.len() < 3 {
        return Err(Error::InvalidInput("potential needs at least 3 grid points".into()));
    }
    if n_states == 0 || n_states > potential.len() {
        return Err(Error::InvalidInput(format!("cannot solve for {n_states} states")));
    }
    let h = potential.spacing();
    let ham = hamiltonian(potential, mass, constants)?;
    let boundary = potential.v_total[0].min(potential.v_total[potential.len() - 1]);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n_states);
    let mut out = Vec::with_capacity(n_states);
    for k in 0..n_states {
        let energy = ham.eigenvalue(k);
        if check_confined && energy >= boundary {
            return Err(Error::NotConfined {
                state: k,
                energy,
                boundary,
            });
        }
        let v = ham.eigenvector(energy, &vectors);
        let scale = 1.0 / h.sqrt();
        let peak = v
            .iter()
            .cloned()
            .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
        let sign = if peak < 0.0 { -1.0 } else { 1.0 };
        let psi = v.iter().map(|x| sign * scale * x).collect();
        vectors.push(v);
        out.push(EnvelopeSolution {
            z: potential.z.clone(),
            psi,
            energy,
            state_index: k,
            spacing: h,
        });
    }
    Ok(out)
}

/// Ground state only.
pub fn ground_state(potential: &PotentialProfile, mass: f64, constants: &MaterialConstants) -> Result<EnvelopeSolution> {
    Ok(solve_envelope(potential, mass, 1, constants)?.remove(0))
}
