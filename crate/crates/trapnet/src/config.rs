//! Run configuration shared by the command line and `--config` files.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use trapnet_core::dynamics::safe_horizon;
use trapnet_core::spectra::TrapCriterion;
use trapnet_core::PiLatticeSpec;

use crate::error::CliError;

/// Lead length used when none is given.
pub const DEFAULT_LEADS: usize = 400;
pub const DEFAULT_SAMPLES: usize = 720;
pub const DEFAULT_STEPS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Trap,
    Evolve,
    Bound,
    Transmit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    #[default]
    JointNodes,
    CouplingCancellation,
}

impl From<Criterion> for TrapCriterion {
    fn from(c: Criterion) -> Self {
        match c {
            Criterion::JointNodes => TrapCriterion::JointNodes,
            Criterion::CouplingCancellation => TrapCriterion::CouplingCancellation,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_steps() -> usize {
    DEFAULT_STEPS
}

/// Everything a run needs. Fields that do not apply to `command` are
/// ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,

    pub n0: Option<usize>,
    pub len: Option<usize>,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default = "one")]
    pub kappa0: f64,
    pub m: Option<usize>,

    /// Graph file for `trap`; the pi-lattice parameters are used otherwise.
    pub graph: Option<PathBuf>,
    pub subgraph: Option<usize>,
    #[serde(default)]
    pub criterion: Criterion,

    /// 1-based central-chain modes for `evolve`; all when absent.
    pub modes: Option<Vec<usize>>,
    pub t_max: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Explicit time grid, overriding `t_max` and `samples`.
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub allow_reflections: bool,

    pub long_time: Option<usize>,

    /// Energy window of a `transmit` sweep.
    pub e_min: Option<f64>,
    pub e_max: Option<f64>,
    /// Momentum window; when both are set it replaces the energy window.
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    #[serde(default = "default_steps")]
    pub steps: usize,
    pub compare: Option<usize>,

    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            n0: None,
            len: None,
            kappa: 1.0,
            kappa0: 1.0,
            m: None,
            graph: None,
            subgraph: None,
            criterion: Criterion::default(),
            modes: None,
            t_max: None,
            samples: DEFAULT_SAMPLES,
            times: None,
            allow_reflections: false,
            long_time: None,
            e_min: None,
            e_max: None,
            k_min: None,
            k_max: None,
            steps: DEFAULT_STEPS,
            compare: None,
            output: None,
            format: Format::default(),
        }
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::json(origin, &e))
    }

    /// Pi-lattice parameters; `n0` and `len` are required.
    pub fn lattice(&self) -> Result<PiLatticeSpec, CliError> {
        let n0 = self.n0.ok_or_else(|| CliError::Input("--n0 is required".into()))?;
        let len = self.len.ok_or_else(|| CliError::Input("--len is required".into()))?;
        let spec = PiLatticeSpec {
            n0,
            len,
            kappa: self.kappa,
            kappa0: self.kappa0,
            m: self.m.unwrap_or(DEFAULT_LEADS),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default energy window: the band of chain `c` less a small margin.
    pub fn energy_range(&self) -> (f64, f64) {
        let edge = 2.0 * self.kappa;
        (
            self.e_min.unwrap_or(-edge * 0.999),
            self.e_max.unwrap_or(edge * 0.999),
        )
    }

    pub fn momentum_range(&self) -> Option<(f64, f64)> {
        self.k_min.zip(self.k_max)
    }

    pub fn time_grid(&self) -> Vec<f64> {
        if let Some(times) = &self.times {
            return times.clone();
        }
        let t_max = self
            .t_max
            .unwrap_or_else(|| safe_horizon(self.m.unwrap_or(DEFAULT_LEADS), self.kappa));
        trapnet_core::dynamics::time_grid(t_max, self.samples)
    }

    /// Checks the invariants that do not depend on the physics.
    pub fn validate(&self) -> Result<(), CliError> {
        let input = |msg: String| Err(CliError::Input(msg));
        match self.command {
            Command::Transmit => {
                if self.steps < 2 {
                    return input(format!("steps must be at least 2 (got {})", self.steps));
                }
                if self.k_min.is_some() != self.k_max.is_some() {
                    return input("give both k_min and k_max, or neither".into());
                }
                let (lo, hi) = self.momentum_range().unwrap_or_else(|| self.energy_range());
                if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
                    return input(format!("sweep range [{lo}, {hi}] is empty"));
                }
            }
            Command::Evolve => {
                let times = self.time_grid();
                if times.is_empty() {
                    return input("time grid is empty".into());
                }
                if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
                    return input(format!("time {t} must be finite and non-negative"));
                }
                if self.times.is_none() && self.samples == 0 {
                    return input("samples must be at least 1".into());
                }
            }
            Command::Trap | Command::Bound => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_fills_defaults() {
        let cfg = RunConfig::from_json(r#"{"command": "bound", "n0": 2, "len": 4}"#, "test").unwrap();
        assert_eq!(cfg.kappa, 1.0);
        assert_eq!(cfg.samples, DEFAULT_SAMPLES);
        assert_eq!(cfg.lattice().unwrap().m, DEFAULT_LEADS);
    }

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::new(Command::Transmit);
        cfg.n0 = Some(3);
        cfg.len = Some(5);
        cfg.compare = Some(6);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text, "test").unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_ranges() {
        assert!(RunConfig::from_json(r#"{"command": "trap", "bogus": 1}"#, "test").is_err());
        let mut cfg = RunConfig::new(Command::Transmit);
        cfg.steps = 1;
        assert!(cfg.validate().is_err());
        cfg.steps = 10;
        cfg.e_min = Some(1.0);
        cfg.e_max = Some(0.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn default_time_grid_spans_safe_window() {
        let mut cfg = RunConfig::new(Command::Evolve);
        cfg.m = Some(400);
        let t = cfg.time_grid();
        assert_eq!(t.len(), DEFAULT_SAMPLES);
        assert!((t[t.len() - 1] - 180.0).abs() < 1e-12);
    }
}
