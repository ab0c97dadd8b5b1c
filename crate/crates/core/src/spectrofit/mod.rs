//! Charge-sensor transition fits, lever arms and voltage-to-energy
//! conversion, plus synthetic data for round-trip checks.

pub mod lever_arm;
pub mod lm;
pub mod transition;

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::io;
use crate::{Error, Result};

pub use lever_arm::{fit_lever_arm, LeverArmFit, TauPoint};
pub use transition::{fit_transition, TransitionFit, TransitionParams};

pub const MIN_TRACE_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionTrace {
    /// V, strictly monotone.
    pub gate_voltage: Vec<f64>,
    pub sensor_current: Vec<f64>,
    /// Mixing-chamber temperature (K).
    pub t_mc: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct TraceSidecar {
    #[serde(rename = "T_MC_K")]
    t_mc: f64,
}

impl TransitionTrace {
    pub fn validate(&self) -> Result<()> {
        let n = self.gate_voltage.len();
        if n != self.sensor_current.len() {
            return Err(Error::InvalidInput("voltage and current lengths differ".into()));
        }
        if n < MIN_TRACE_SAMPLES {
            return Err(Error::InvalidInput(format!(
                "a trace needs at least {MIN_TRACE_SAMPLES} samples, got {n}"
            )));
        }
        if self.gate_voltage.iter().chain(&self.sensor_current).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("trace contains non-finite values".into()));
        }
        let up = self.gate_voltage.windows(2).all(|w| w[1] > w[0]);
        let down = self.gate_voltage.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(Error::InvalidInput("gate voltages must be strictly monotone".into()));
        }
        Ok(())
    }

    /// Samples ordered by increasing voltage.
    pub fn ascending(&self) -> (Vec<f64>, Vec<f64>) {
        let (mut v, mut i) = (self.gate_voltage.clone(), self.sensor_current.clone());
        if v.len() > 1 && v[1] < v[0] {
            v.reverse();
            i.reverse();
        }
        (v, i)
    }

    /// Reads `voltage_V, current_au[, T_MC_K]`. Without the third column
    /// the temperature comes from a `<stem>.json` sidecar holding
    /// `{"T_MC_K": ...}`, if present.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let (header, rows) = io::read_numeric_csv(path)?;
        if header.len() < 2 || header[0] != "voltage_V" || header[1] != "current_au" {
            return Err(Error::InvalidInput(format!(
                "{}: expected header `voltage_V,current_au[,T_MC_K]`",
                path.display()
            )));
        }
        let mut t_mc = None;
        if header.get(2).map(String::as_str) == Some("T_MC_K") {
            t_mc = rows.first().map(|r| r[2]);
            if rows.iter().any(|r| Some(r[2]) != t_mc) {
                return Err(Error::InvalidInput("T_MC_K column must be constant".into()));
            }
        } else if let Some(sidecar) = Self::sidecar(path) {
            let s: TraceSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar)?)?;
            t_mc = Some(s.t_mc);
        }
        let trace = Self {
            gate_voltage: rows.iter().map(|r| r[0]).collect(),
            sensor_current: rows.iter().map(|r| r[1]).collect(),
            t_mc,
        };
        trace.validate()?;
        Ok(trace)
    }

    fn sidecar(path: &Path) -> Option<PathBuf> {
        let p = path.with_extension("json");
        p.exists().then_some(p)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        match self.t_mc {
            Some(t) => {
                let col = vec![t; self.gate_voltage.len()];
                io::write_columns(
                    path,
                    &["voltage_V", "current_au", "T_MC_K"],
                    &[&self.gate_voltage, &self.sensor_current, &col],
                )
            }
            None => io::write_columns(
                path,
                &["voltage_V", "current_au"],
                &[&self.gate_voltage, &self.sensor_current],
            ),
        }
    }
}

/// A value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub std_err: f64,
}

impl Measured {
    pub fn relative_error(&self) -> f64 {
        (self.std_err / self.value).abs()
    }
}

/// `E = α · dV` (eV).
pub fn voltage_to_energy(dv: f64, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::spec("alpha", "must be positive"));
    }
    Ok(alpha * dv)
}

/// `E = α · dV` with relative errors of `dV` and `α` added in quadrature.
pub fn energy_with_error(dv: Measured, alpha: Measured) -> Result<Measured> {
    let value = voltage_to_energy(dv.value, alpha.value)?;
    let std_err = if dv.value == 0.0 {
        // relative error is undefined; propagate the absolute part only
        alpha.value * dv.std_err
    } else {
        value.abs() * dv.relative_error().hypot(alpha.relative_error())
    };
    Ok(Measured { value, std_err })
}

/// Transition trace on `n` evenly spaced voltages spanning `window`, with
/// Gaussian noise of standard deviation `noise · |A|`.
pub fn synthetic_trace(
    params: &TransitionParams,
    window: (f64, f64),
    n: usize,
    noise: f64,
    seed: u64,
    t_mc: Option<f64>,
) -> TransitionTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let step = (window.1 - window.0) / (n.max(2) - 1) as f64;
    let gate_voltage: Vec<f64> = (0..n).map(|k| window.0 + k as f64 * step).collect();
    let sensor_current = gate_voltage
        .iter()
        .map(|&v| params.current(v) + noise * params.amplitude.abs() * normal.sample(&mut rng))
        .collect();
    TransitionTrace {
        gate_voltage,
        sensor_current,
        t_mc,
    }
}

/// `τ(T) = sqrt(T² + T_e0²)/α` with relative Gaussian noise `noise`.
pub fn synthetic_tau_points(alpha: f64, t_e0: f64, temperatures: &[f64], noise: f64, seed: u64) -> Vec<TauPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    temperatures
        .iter()
        .map(|&t| TauPoint {
            t_mc: t,
            tau: (t * t + t_e0 * t_e0).sqrt() / alpha * (1.0 + noise * normal.sample(&mut rng)),
        })
        .collect()
}

/// Fits every trace and then the lever arm from the resulting
/// `(T_MC, τ)` pairs. Every trace must carry a temperature.
pub fn fit_lever_arm_from_traces(traces: &[TransitionTrace]) -> Result<(Vec<TransitionFit>, LeverArmFit)> {
    let fits = traces.iter().map(fit_transition).collect::<Result<Vec<_>>>()?;
    let points = fits
        .iter()
        .map(|f| {
            f.t_mc
                .map(|t_mc| TauPoint { t_mc, tau: f.params.tau })
                .ok_or_else(|| Error::InvalidInput("trace without T_MC".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let lever = fit_lever_arm(&points)?;
    Ok((fits, lever))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_conversion() {
        assert_eq!(voltage_to_energy(0.0, 0.1).unwrap(), 0.0);
        assert!((voltage_to_energy(164e-6, 1.0).unwrap() - 164e-6).abs() < 1e-18);
        assert!(voltage_to_energy(1.0, 0.0).is_err());
    }

    #[test]
    fn quadrature_errors() {
        let e = energy_with_error(
            Measured {
                value: 1e-3,
                std_err: 2e-5,
            },
            Measured {
                value: 0.1,
                std_err: 3e-3,
            },
        )
        .unwrap();
        let rel = e.std_err / e.value;
        assert!((rel - (0.02f64.powi(2) + 0.03f64.powi(2)).sqrt()).abs() < 1e-12);
        assert!((rel - 0.036).abs() < 1e-3);
    }

    #[test]
    fn trace_csv_round_trip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = TransitionParams {
            amplitude: 1.0,
            tau: 20.0,
            slope: 0.0,
            v0: 0.0,
            offset: 0.0,
        };
        let t = synthetic_trace(&p, (-0.02, 0.02), 40, 0.0, 0, None);
        let path = dir.path().join("t.csv");
        t.write_csv(&path).unwrap();
        std::fs::write(dir.path().join("t.json"), r#"{"T_MC_K": 0.25}"#).unwrap();
        let back = TransitionTrace::load_csv(&path).unwrap();
        assert_eq!(back.t_mc, Some(0.25));
        assert_eq!(back.gate_voltage.len(), 40);
    }

    #[test]
    fn non_monotone_trace_rejected() {
        let mut t = TransitionTrace {
            gate_voltage: (0..12).map(f64::from).collect(),
            sensor_current: vec![0.0; 12],
            t_mc: None,
        };
        t.gate_voltage.swap(3, 4);
        assert!(t.validate().is_err());
    }
}
