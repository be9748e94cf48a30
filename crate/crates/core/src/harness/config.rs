use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::Label;
use crate::error::{Error, Result};
use crate::measure::{BaseMeasure, ProcessFamily};

/// Every default used by the experiments, in one place.
pub mod defaults {
    /// Trials per experiment cell.
    pub const TRIALS: usize = 200;
    pub const SEED: u64 = 0;
    pub const HORIZON: usize = 256;
    pub const SIGMA: f64 = 1.0;
    /// Confidence parameter of the compression bound.
    pub const DELTA: f64 = 0.05;
    /// Sample sizes of the learning curve.
    pub const N_GRID: [usize; 5] = [32, 128, 512, 2048, 4096];
    /// Fresh draws used to measure a predictor's error.
    pub const HOLDOUT: usize = 100_000;
    /// Length of the anchor of the learning-curve target.
    pub const PAC_SEQUENCE: usize = 64;
    /// Learner plays per generated stream.
    pub const RUNS_PER_STREAM: usize = 1;
    /// Standard errors of slack allowed on Monte-Carlo comparisons.
    pub const SE_ALLOWANCE: f64 = 3.0;
    /// Fraction of `T` the separation adversary must force, mean regret.
    pub const SEPARATION_FRACTION: f64 = 0.45;
    /// Fraction of `m/8` the grid adversary must force.
    pub const GRID_FRACTION: f64 = 0.9;
    /// Band for the coin-flip adversary's regret per round.
    pub const COINFLIP_BAND: (f64, f64) = (0.40, 0.60);
    /// Sample sizes over which the complexity supremum is truncated.
    pub const COMPLEXITY_N_GRID: [usize; 3] = [16, 64, 256];
    /// Paths per complexity cell.
    pub const COMPLEXITY_TRIALS: usize = 10;
    /// Compression round trips checked by `verify-compression`.
    pub const COMPRESSION_TRIALS: usize = 10_000;
    pub const COMPRESSION_MAX_N: usize = 50;
    pub const COMPRESSION_MAX_SEQ: usize = 20;
    /// Random instances per entropy check.
    pub const ENTROPY_INSTANCES: usize = 100;

    /// Scales `2^-1, ..., 2^-8`.
    pub fn eps_grid() -> Vec<f64> {
        (1..=8).map(|k| 0.5f64.powi(k)).collect()
    }
}

/// What an experiment measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Regret,
    PacCurve,
    Sufficiency,
    EntropySuite,
    Compression,
}

/// The hypothesis class an experiment is about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ClassSpec {
    /// Separation hypotheses; the adversary chooses the anchor.
    Separation,
    /// Indicators of finite point sets.
    PointIndicators,
    /// Indicators of subsets of the first `count` non-dyadic rationals.
    RationalIndicators { count: usize },
    /// Constants `1..=k`.
    Constants { k: u64 },
    /// Thresholds at every cell of the `side × side` grid.
    GridThresholds { side: u32 },
    /// `count` random bit tables on the grid.
    RandomTables { side: u32, count: usize },
}

/// The adversary generating each trial's stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum AdversarySpec {
    Separation { domain: BaseMeasure },
    Coinflip,
    /// A random class member labels draws from a smooth process.
    RealizableSmooth {
        domain: BaseMeasure,
        #[serde(default = "base_family")]
        family: ProcessFamily,
    },
    /// Streams built against the class as an expert set; patterns cycle by
    /// trial index.
    ExpertCorpus,
}

fn base_family() -> ProcessFamily {
    ProcessFamily::Base
}

/// The learner played in each trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum LearnerSpec {
    /// Uniform over a fixed pool.
    RandomGuess { pool: Vec<Label> },
    /// Uniform over anchored labels consistent with the feedback so far.
    PrefixGuess,
    /// Exponential weights over separation hypotheses anchored at sequences
    /// the learner draws itself, thinned to a `d_μ` cover at scale `eps`.
    SeparationCover {
        sequences: usize,
        per_sequence: usize,
        eps: f64,
    },
    /// Exponential weights over the whole (finite) class.
    Rewa,
    /// Exponential weights over a greedy `d_μ` cover of the class.
    Cover { eps: f64 },
    MemorizeConstant,
}

/// One experiment, read from a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub class: Option<ClassSpec>,
    #[serde(default)]
    pub adversary: Option<AdversarySpec>,
    #[serde(default)]
    pub learner: Option<LearnerSpec>,
    #[serde(default = "d_horizon")]
    pub horizon: usize,
    #[serde(default = "d_n_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "d_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_sigma")]
    pub sigma: f64,
    /// σ values swept by the sufficiency experiment.
    #[serde(default)]
    pub sigmas: Option<Vec<f64>>,
    #[serde(default = "defaults::eps_grid")]
    pub eps_grid: Vec<f64>,
    #[serde(default = "d_delta")]
    pub delta: f64,
    #[serde(default = "d_runs")]
    pub runs_per_stream: usize,
    #[serde(default = "d_holdout")]
    pub holdout: usize,
    #[serde(default = "d_complexity_n")]
    pub complexity_n_grid: Vec<usize>,
    #[serde(default = "d_complexity_trials")]
    pub complexity_trials: usize,
    #[serde(default = "d_instances")]
    pub instances: usize,
}

fn d_horizon() -> usize {
    defaults::HORIZON
}
fn d_n_grid() -> Vec<usize> {
    defaults::N_GRID.to_vec()
}
fn d_trials() -> usize {
    defaults::TRIALS
}
fn d_sigma() -> f64 {
    defaults::SIGMA
}
fn d_delta() -> f64 {
    defaults::DELTA
}
fn d_runs() -> usize {
    defaults::RUNS_PER_STREAM
}
fn d_holdout() -> usize {
    defaults::HOLDOUT
}
fn d_complexity_n() -> Vec<usize> {
    defaults::COMPLEXITY_N_GRID.to_vec()
}
fn d_complexity_trials() -> usize {
    defaults::COMPLEXITY_TRIALS
}
fn d_instances() -> usize {
    defaults::ENTROPY_INSTANCES
}

impl ExperimentConfig {
    /// A configuration with every optional field at its default.
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            class: None,
            adversary: None,
            learner: None,
            horizon: defaults::HORIZON,
            n_grid: defaults::N_GRID.to_vec(),
            trials: defaults::TRIALS,
            seed: defaults::SEED,
            sigma: defaults::SIGMA,
            sigmas: None,
            eps_grid: defaults::eps_grid(),
            delta: defaults::DELTA,
            runs_per_stream: defaults::RUNS_PER_STREAM,
            holdout: defaults::HOLDOUT,
            complexity_n_grid: defaults::COMPLEXITY_N_GRID.to_vec(),
            complexity_trials: defaults::COMPLEXITY_TRIALS,
            instances: defaults::ENTROPY_INSTANCES,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        ExperimentConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: String| Err(Error::Config(format!("field `{field}`: {why}")));
        if self.trials == 0 {
            return bad("trials", "must be at least 1".into());
        }
        if self.runs_per_stream == 0 {
            return bad("runs_per_stream", "must be at least 1".into());
        }
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return bad("sigma", format!("{} outside (0, 1]", self.sigma));
        }
        if let Some(sigmas) = &self.sigmas {
            if sigmas.is_empty() || sigmas.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
                return bad("sigmas", "every value must lie in (0, 1]".into());
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta", format!("{} outside (0, 1)", self.delta));
        }
        if self.eps_grid.is_empty() || self.eps_grid.iter().any(|e| !(*e > 0.0)) {
            return bad("eps_grid", "needs positive scales".into());
        }
        if self.n_grid.iter().any(|&n| n < 2) {
            return bad("n_grid", "sample sizes must be at least 2".into());
        }
        match self.kind {
            ExperimentKind::Regret => {
                if self.adversary.is_none() {
                    return bad("adversary", "required for regret experiments".into());
                }
                if self.learner.is_none() {
                    return bad("learner", "required for regret experiments".into());
                }
            }
            ExperimentKind::Sufficiency if self.class.is_none() => {
                return bad("class", "required for sufficiency experiments".into());
            }
            _ => {}
        }
        Ok(())
    }

    /// Seed of trial `index`.
    pub fn trial_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }

    pub fn sigma_sweep(&self) -> Vec<f64> {
        self.sigmas.clone().unwrap_or_else(|| vec![self.sigma])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ExperimentConfig::from_json(r#"{"kind": "pac_curve"}"#).unwrap();
        assert_eq!(c.trials, 200);
        assert_eq!(c.delta, 0.05);
        assert_eq!(c.eps_grid.len(), 8);
        assert_eq!(c.eps_grid[7], 1.0 / 256.0);
    }

    #[test]
    fn errors_name_the_field() {
        let e = ExperimentConfig::from_json(r#"{"kind": "pac_curve", "trials": 0}"#).unwrap_err();
        assert!(e.to_string().contains("trials"));
        let e = ExperimentConfig::from_json(r#"{"kind": "regret"}"#).unwrap_err();
        assert!(e.to_string().contains("adversary"));
        let e = ExperimentConfig::from_json(r#"{"kind": "pac_curve", "bogus": 1}"#).unwrap_err();
        assert!(e.to_string().contains("bogus"));
    }

    #[test]
    fn full_regret_config_round_trips() {
        let mut c = ExperimentConfig::new(ExperimentKind::Regret);
        c.adversary = Some(AdversarySpec::Separation {
            domain: BaseMeasure::UniformGrid { side: 8 },
        });
        c.learner = Some(LearnerSpec::PrefixGuess);
        c.class = Some(ClassSpec::GridThresholds { side: 8 });
        let text = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }
}
