use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::adversaries::StreamBundle;
use crate::covering::lemmas::LemmaReport;
use crate::covering::{ComplexityEstimate, RegretBound};
use crate::error::Result;
use crate::game::{Comparator, RegretReport};
use super::config::LearnerSpec;

/// A pass/fail check computed from recorded data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub name: String,
    /// The result the check reproduces, in words.
    pub cites: String,
    pub observed: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl Flag {
    /// Passes when `observed <= threshold`.
    pub fn at_most(name: &str, cites: &str, observed: f64, threshold: f64, detail: String) -> Flag {
        Flag {
            name: name.into(),
            cites: cites.into(),
            observed,
            threshold,
            passed: observed <= threshold,
            detail,
        }
    }

    /// Passes when `observed >= threshold`.
    pub fn at_least(name: &str, cites: &str, observed: f64, threshold: f64, detail: String) -> Flag {
        Flag {
            name: name.into(),
            cites: cites.into(),
            observed,
            threshold,
            passed: observed >= threshold,
            detail,
        }
    }
}

/// One trial, flattened for CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub group: String,
    pub trial: usize,
    pub seed: u64,
    /// Horizon `T` for games, sample size `n` for learning curves.
    pub size: usize,
    pub learner_loss: Option<f64>,
    pub comparator_loss: Option<u64>,
    pub regret: Option<f64>,
    /// Standard error over learner plays of the same stream.
    pub regret_se: Option<f64>,
    pub error: Option<f64>,
    pub bound: Option<f64>,
    pub distinct: Option<bool>,
}

impl TrialRecord {
    pub fn new(group: impl Into<String>, trial: usize, seed: u64, size: usize) -> Self {
        TrialRecord {
            group: group.into(),
            trial,
            seed,
            size,
            learner_loss: None,
            comparator_loss: None,
            regret: None,
            regret_se: None,
            error: None,
            bound: None,
            distinct: None,
        }
    }
}

/// An aggregate statistic of one group of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub group: String,
    pub statistic: String,
    pub value: f64,
    pub se: Option<f64>,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub x: f64,
    pub y: f64,
    pub lo: f64,
    pub hi: f64,
}

/// An `(x, y, band)` series written to `plotdata/<name>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<PlotPoint>,
}

/// A bound overlaid on the measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

/// Complexity estimates and the bound they give at one σ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityProfile {
    pub sigma: f64,
    pub estimates: Vec<ComplexityEstimate>,
    pub bound: RegretBound,
    pub cover_size: usize,
}

/// Everything needed to replay one game bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub learner: LearnerSpec,
    /// The fixed expert set, for learners that weight one.
    pub experts: Option<Vec<crate::classes::Hypothesis>>,
    pub horizon: usize,
    pub seed: u64,
    pub run: usize,
    pub bundle: StreamBundle,
    pub comparator: Comparator,
    pub report: RegretReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub summary: Vec<SummaryRow>,
    pub bounds: Vec<NamedValue>,
    pub flags: Vec<Flag>,
    pub records: Vec<TrialRecord>,
    pub series: Vec<PlotSeries>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub complexity: Vec<ComplexityProfile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lemmas: Vec<LemmaReport>,
    /// Replay records for the first few trials; written to their own files.
    #[serde(skip)]
    pub replays: Vec<ReplayRecord>,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig) -> Self {
        ExperimentReport {
            config,
            summary: Vec::new(),
            bounds: Vec::new(),
            flags: Vec::new(),
            records: Vec::new(),
            series: Vec::new(),
            complexity: Vec::new(),
            lemmas: Vec::new(),
            replays: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.flags.iter().all(|f| f.passed)
    }

    pub fn flag(&self, name: &str) -> Option<&Flag> {
        self.flags.iter().find(|f| f.name == name)
    }

    pub fn summary_value(&self, group: &str, statistic: &str) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.group == group && r.statistic == statistic)
    }

    /// Writes `report.json`, `summary.csv`, the per-trial CSV,
    /// `plotdata/*.csv` and `replays/*.json` under `dir`.
    pub fn write(&self, dir: &Path, records_name: &str) -> Result<()> {
        fs::create_dir_all(dir.join("plotdata"))?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        write_csv(&dir.join("summary.csv"), &self.summary)?;
        write_csv(&dir.join(records_name), &self.records)?;
        for s in &self.series {
            write_csv(&dir.join("plotdata").join(format!("{}.csv", s.name)), &s.points)?;
        }
        if !self.replays.is_empty() {
            fs::create_dir_all(dir.join("replays"))?;
            for r in &self.replays {
                let name = format!("seed_{}_run_{}.json", r.seed, r.run);
                fs::write(dir.join("replays").join(name), serde_json::to_string(r)?)?;
            }
        }
        Ok(())
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
