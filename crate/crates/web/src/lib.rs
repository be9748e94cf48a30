//! Browser bindings: each export runs a small experiment and returns JSON
//! for the page in `www/` to draw.

use serde::Serialize;
use smoothlab::harness::{
    run_pac_curve, run_regret_experiment, run_sufficiency_experiment, AdversarySpec, ClassSpec, ExperimentConfig,
    ExperimentKind, Flag, LearnerSpec, PlotSeries,
};
use smoothlab::{BaseMeasure, Label, Result};
use wasm_bindgen::prelude::*;

/// What every export returns.
#[derive(Debug, Serialize)]
pub struct DemoOutput {
    pub series: Vec<PlotSeries>,
    pub flags: Vec<Flag>,
    /// Headline numbers, in display order.
    pub numbers: Vec<(String, f64)>,
}

fn learner_named(name: &str) -> Result<LearnerSpec> {
    Ok(match name {
        "prefix_guess" => LearnerSpec::PrefixGuess,
        "random_guess" => LearnerSpec::RandomGuess {
            pool: vec![Label::Bit(false), Label::Bit(true)],
        },
        "separation_cover" => LearnerSpec::SeparationCover {
            sequences: 4,
            per_sequence: 4,
            eps: 0.5,
        },
        other => return Err(smoothlab::Error::Config(format!("field `learner`: unknown learner {other}"))),
    })
}

/// Mean cumulative regret of a learner against the separation or
/// coin-flip adversary, with the `t/2` reference line.
pub fn regret_curve_json(adversary: &str, learner: &str, horizon: usize, trials: usize, seed: u64) -> Result<String> {
    let mut c = ExperimentConfig::new(ExperimentKind::Regret);
    c.adversary = Some(match adversary {
        "separation" => AdversarySpec::Separation {
            domain: BaseMeasure::UniformUnit,
        },
        "coinflip" => AdversarySpec::Coinflip,
        other => return Err(smoothlab::Error::Config(format!("field `adversary`: unknown adversary {other}"))),
    });
    c.learner = Some(if adversary == "coinflip" {
        LearnerSpec::RandomGuess {
            pool: vec![Label::Bit(false), Label::Bit(true)],
        }
    } else {
        learner_named(learner)?
    });
    c.horizon = horizon;
    c.trials = trials;
    c.seed = seed;
    let report = run_regret_experiment(&c)?;
    let mut series = report.series;
    series.push(PlotSeries {
        name: "half_t".into(),
        x_label: "t".into(),
        y_label: "t/2".into(),
        points: (1..=horizon)
            .map(|t| {
                let y = t as f64 / 2.0;
                smoothlab::harness::PlotPoint { x: t as f64, y, lo: y, hi: y }
            })
            .collect(),
    });
    let numbers = report
        .summary
        .iter()
        .map(|r| (r.statistic.clone(), r.value))
        .collect();
    to_json(&DemoOutput {
        series,
        flags: report.flags,
        numbers,
    })
}

/// Complexity estimate of grid thresholds at `sigma`, the entropy bound at
/// every scale, and the measured regret of the resulting cover learner.
pub fn sufficiency_json(side: u32, sigma: f64, horizon: usize, trials: usize, seed: u64) -> Result<String> {
    let mut c = ExperimentConfig::new(ExperimentKind::Sufficiency);
    c.class = Some(ClassSpec::GridThresholds { side });
    c.sigma = sigma;
    c.horizon = horizon;
    c.trials = trials;
    c.seed = seed;
    c.complexity_trials = 3;
    c.complexity_n_grid = vec![16, 64];
    let report = run_sufficiency_experiment(&c)?;
    let profile = &report.complexity[0];
    let mut numbers: Vec<(String, f64)> = report.summary.iter().map(|r| (r.statistic.clone(), r.value)).collect();
    numbers.extend(profile.estimates.iter().map(|e| (format!("C at eps^2 = {}", e.eps), e.value)));
    to_json(&DemoOutput {
        series: report.series,
        flags: report.flags,
        numbers,
    })
}

/// Median holdout error of the compression learner against the bound.
pub fn pac_curve_json(trials: usize, holdout: usize, seed: u64) -> Result<String> {
    let mut c = ExperimentConfig::new(ExperimentKind::PacCurve);
    c.trials = trials;
    c.holdout = holdout;
    c.seed = seed;
    c.n_grid = vec![8, 32, 128, 512, 2048];
    let report = run_pac_curve(&c)?;
    let numbers = report
        .summary
        .iter()
        .filter(|r| r.statistic == "median_error")
        .map(|r| (r.group.clone(), r.value))
        .collect();
    to_json(&DemoOutput {
        series: report.series,
        flags: report.flags,
        numbers,
    })
}

fn to_json(out: &DemoOutput) -> Result<String> {
    Ok(serde_json::to_string(out)?)
}

fn js(r: Result<String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn regret_curve(adversary: &str, learner: &str, horizon: usize, trials: usize, seed: u64) -> Result<String, JsError> {
    js(regret_curve_json(adversary, learner, horizon, trials, seed))
}

#[wasm_bindgen]
pub fn sufficiency_profile(side: u32, sigma: f64, horizon: usize, trials: usize, seed: u64) -> Result<String, JsError> {
    js(sufficiency_json(side, sigma, horizon, trials, seed))
}

#[wasm_bindgen]
pub fn pac_curve(trials: usize, holdout: usize, seed: u64) -> Result<String, JsError> {
    js(pac_curve_json(trials, holdout, seed))
}
