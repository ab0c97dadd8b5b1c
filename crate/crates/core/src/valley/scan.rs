//! E_v(q) scans over the Wiggle Well wavevector.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bloch::BlochCoefficientTable;
use super::{evaluate_spec, ValleyConfig, ValleyCouplingResult};
use crate::constants::MaterialConstants;
use crate::exec::Execution;
use crate::heterostructure::ProfileSpec;
use crate::io;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    /// Template with the grid density actually used; its wavevector is
    /// replaced by each scanned q.
    pub profile: ProfileSpec,
    pub peak_concentration: f64,
    pub average_concentration: f64,
    pub valley: ValleyConfig,
    pub table: String,
    pub table_entries: usize,
    pub constants: MaterialConstants,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValleySplittingCurve {
    pub q_values: Vec<f64>,
    /// eV
    pub e_v_values: Vec<f64>,
    pub results: Vec<ValleyCouplingResult>,
    pub metadata: ScanMetadata,
}

impl ValleySplittingCurve {
    /// Indices of interior local maxima (plateaus count once, at their
    /// first point).
    pub fn local_maxima(&self) -> Vec<usize> {
        local_maxima(&self.e_v_values)
    }

    /// Location and height of the largest E_v with q in `[lo, hi]`.
    pub fn max_in(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        self.q_values
            .iter()
            .zip(&self.e_v_values)
            .filter(|(q, _)| (lo..=hi).contains(*q))
            .fold(None, |best: Option<(f64, f64)>, (&q, &e)| match best {
                Some((_, b)) if b >= e => best,
                _ => Some((q, e)),
            })
    }

    /// The local maximum closest to `q`, if any lies within `tolerance`.
    pub fn peak_near(&self, q: f64, tolerance: f64) -> Option<(f64, f64)> {
        self.local_maxima()
            .into_iter()
            .map(|i| (self.q_values[i], self.e_v_values[i]))
            .filter(|(p, _)| (p - q).abs() <= tolerance)
            .min_by(|a, b| (a.0 - q).abs().total_cmp(&(b.0 - q).abs()))
    }

    /// Columns `q_inv_nm, E_v_eV, E_v_ueV`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let uev: Vec<f64> = self.e_v_values.iter().map(|e| e * 1e6).collect();
        io::write_columns(
            path,
            &["q_inv_nm", "E_v_eV", "E_v_ueV"],
            &[&self.q_values, &self.e_v_values, &uev],
        )
    }

    pub fn write_metadata(&self, path: &Path) -> Result<()> {
        io::write_json(path, &self.metadata)
    }
}

pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let n = values.len();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Evaluates E_v for every q of `q_grid` with the profile rebuilt and the
/// envelope re-solved per q. With `auto_refine` the whole scan uses one
/// grid density, fine enough for the largest q.
pub fn scan_q(
    template: &ProfileSpec,
    q_grid: &[f64],
    table: &BlochCoefficientTable,
    config: &ValleyConfig,
    constants: &MaterialConstants,
    exec: Execution,
) -> Result<ValleySplittingCurve> {
    if q_grid.is_empty() {
        return Err(Error::spec("q_grid", "must not be empty"));
    }
    if q_grid.iter().any(|q| !(q.is_finite() && *q > 0.0)) {
        return Err(Error::spec("q_grid", "values must be positive and finite"));
    }
    if q_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::spec("q_grid", "must be strictly increasing"));
    }
    table.validate(Default::default())?;
    let coupler = config.coupler(table, constants);
    let q_max = q_grid[q_grid.len() - 1];
    let mut profile = template.clone();
    profile.wavelength = None;
    profile.points_per_monolayer = config.points_per_monolayer(template.points_per_monolayer, q_max, &coupler);
    profile.validate()?;

    let results = exec.try_map(q_grid.len(), |i| {
        let spec = ProfileSpec {
            wavevector: q_grid[i],
            ..profile.clone()
        };
        evaluate_spec(&spec, &coupler, config)
    })?;
    Ok(ValleySplittingCurve {
        q_values: q_grid.to_vec(),
        e_v_values: results.iter().map(|r| r.e_v).collect(),
        results,
        metadata: ScanMetadata {
            peak_concentration: profile.amplitude,
            average_concentration: profile.average_concentration(),
            profile,
            valley: config.clone(),
            table: table.source_label.clone(),
            table_entries: table.len(),
            constants: *constants,
        },
    })
}

/// `n` evenly spaced points on `(lo, hi]`.
pub fn q_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / n as f64;
    (1..=n).map(|i| lo + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maxima_finder() {
        assert_eq!(local_maxima(&[0.0, 1.0, 0.5, 2.0, 2.0, 1.0, 3.0]), vec![1, 3]);
        assert!(local_maxima(&[1.0, 2.0, 3.0]).is_empty());
    }

    #[test]
    fn grid_is_half_open() {
        let g = q_grid(0.0, 25.0, 100);
        assert_eq!(g.len(), 100);
        assert!(g[0] > 0.0);
        assert!((g[99] - 25.0).abs() < 1e-12);
    }

    #[test]
    fn bad_q_grids_are_rejected() {
        let c = MaterialConstants::default();
        let t = BlochCoefficientTable::fallback();
        let s = ProfileSpec::wiggle(0.05, 1.0);
        let cfg = ValleyConfig::default();
        for g in [vec![], vec![1.0, 1.0], vec![-1.0, 2.0], vec![2.0, 1.0]] {
            assert!(scan_q(&s, &g, &t, &cfg, &c, Execution::Sequential).is_err());
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let c = MaterialConstants::default();
        let t = BlochCoefficientTable::fallback();
        let s = ProfileSpec::wiggle(0.05, 1.0);
        let cfg = ValleyConfig::default();
        let g = q_grid(17.0, 21.0, 12);
        let a = scan_q(&s, &g, &t, &cfg, &c, Execution::Sequential).unwrap();
        let b = scan_q(&s, &g, &t, &cfg, &c, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let (qp, _) = a.max_in(17.0, 21.0).unwrap();
        assert!((qp - 19.44).abs() < 0.4, "peak at {qp}");
    }
}
