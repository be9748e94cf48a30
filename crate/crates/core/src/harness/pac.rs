use std::collections::HashMap;

use rand::Rng;

use super::config::{defaults, ExperimentConfig, ExperimentKind};
use super::report::{ExperimentReport, Flag, PlotPoint, PlotSeries, SummaryRow, TrialRecord};
use super::{class_rng, map_trials};
use crate::classes::SeparationHypothesis;
use crate::compression::{compression_learner, pac_error_bound, RealizableSample};
use crate::domain::{Bits, Instance, InstanceSequence, Label, Payload};
use crate::error::{Error, Result};
use crate::game::{trial_rngs, SimRng};
use crate::stats::{mean_se, median, proportion_se};

/// A fixed separation target with a sampling distribution that puts half
/// its mass uniformly on the anchor and half uniformly on `[0, 1)`.
struct SeparationSource {
    target: SeparationHypothesis,
    position: HashMap<Instance, usize>,
}

impl SeparationSource {
    fn new(len: usize, rng: &mut SimRng) -> Result<Self> {
        let seq = loop {
            let items: Vec<Instance> = (0..len).map(|_| Instance::Dyadic(rng.gen())).collect();
            if let Ok(seq) = InstanceSequence::new(items) {
                break seq;
            }
        };
        let position = seq.items().iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let theta = Bits::new((0..len).map(|_| rng.gen()).collect());
        Ok(SeparationSource {
            target: SeparationHypothesis::new(seq, theta)?,
            position,
        })
    }

    fn draw(&self, rng: &mut SimRng) -> Instance {
        if rng.gen_bool(0.5) {
            self.target.seq().items()[rng.gen_range(0..self.position.len())]
        } else {
            Instance::Dyadic(rng.gen())
        }
    }

    fn label(&self, x: &Instance) -> Label {
        let payload = match self.position.get(x) {
            Some(&j) => Payload::Prefix(self.target.theta().prefix(j + 1)),
            None => Payload::Star,
        };
        Label::Anchored {
            seq: self.target.seq().clone(),
            payload,
        }
    }

    /// Fraction of `holdout` fresh draws on which `f` and the target differ.
    fn holdout_error(&self, f: &SeparationHypothesis, holdout: usize, rng: &mut SimRng) -> f64 {
        // Both share the anchor, so they differ exactly at anchor positions
        // at or after the first bit where their strings differ.
        let first_diff = f
            .theta()
            .as_slice()
            .iter()
            .zip(self.target.theta().as_slice())
            .position(|(a, b)| a != b);
        let Some(first_diff) = first_diff else {
            return 0.0;
        };
        let mistakes = (0..holdout)
            .filter(|_| {
                let x = self.draw(rng);
                self.position.get(&x).is_some_and(|&j| j >= first_diff)
            })
            .count();
        mistakes as f64 / holdout as f64
    }
}

/// Learning curve of the size-one compression learner on a realizable
/// separation source, with the compression bound overlaid.
pub fn run_pac_curve(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut config = config.clone();
    config.kind = ExperimentKind::PacCurve;
    config.validate()?;
    if config.n_grid.is_empty() {
        return Err(Error::Config("field `n_grid`: needs at least one sample size".into()));
    }
    if config.holdout == 0 {
        return Err(Error::Config("field `holdout`: must be at least 1".into()));
    }
    let source = SeparationSource::new(defaults::PAC_SEQUENCE, &mut class_rng(config.seed))?;
    let trials = config.trials;
    let cells = config.n_grid.len() * trials;
    let results = map_trials(cells, |index| {
        let n = config.n_grid[index / trials];
        let seed = config.trial_seed(index);
        let (mut rng, _) = trial_rngs(seed);
        let pairs: Vec<(Instance, Label)> = (0..n)
            .map(|_| {
                let x = source.draw(&mut rng);
                let y = source.label(&x);
                (x, y)
            })
            .collect();
        let f = compression_learner(&RealizableSample::new(pairs)?)?;
        let error = source.holdout_error(&f, config.holdout, &mut rng);
        let bound = pac_error_bound(n as f64, 1.0, config.delta)?;
        let mut record = TrialRecord::new(format!("n={n}"), index % trials, seed, n);
        record.error = Some(error);
        record.bound = Some(bound);
        Ok(record)
    })?;

    let mut report = ExperimentReport::new(config.clone());
    let mut medians = Vec::new();
    let mut median_points = Vec::new();
    let mut mean_points = Vec::new();
    let mut bound_points = Vec::new();
    for (k, &n) in config.n_grid.iter().enumerate() {
        let rows = &results[k * trials..(k + 1) * trials];
        let group = format!("n={n}");
        let errors: Vec<f64> = rows.iter().map(|r| r.error.expect("set")).collect();
        let bound = rows[0].bound.expect("set");
        let violations = rows.iter().filter(|r| r.error > r.bound).count();
        let freq = violations as f64 / trials as f64;
        let se = proportion_se(freq, trials);
        let s = mean_se(&errors);
        let med = median(&errors);
        medians.push(med);
        for (statistic, value, se) in [
            ("mean_error", s.mean, Some(s.se)),
            ("median_error", med, None),
            ("bound", bound, None),
            ("violation_frequency", freq, Some(se)),
            ("best_in_class_error", 0.0, None),
        ] {
            report.summary.push(SummaryRow {
                group: group.clone(),
                statistic: statistic.into(),
                value,
                se,
                trials,
            });
        }
        let threshold = config.delta + defaults::SE_ALLOWANCE * se;
        report.flags.push(Flag::at_most(
            &format!("bound_violation_rate_n{n}"),
            "compression generalization bound holds with probability 1 - delta",
            freq,
            threshold,
            format!("{violations} of {trials} trials exceed the bound {bound:.4}"),
        ));
        let x = n as f64;
        median_points.push(PlotPoint { x, y: med, lo: med, hi: med });
        mean_points.push(PlotPoint {
            x,
            y: s.mean,
            lo: s.mean - s.se,
            hi: s.mean + s.se,
        });
        bound_points.push(PlotPoint { x, y: bound, lo: bound, hi: bound });
    }
    if config.n_grid.len() >= 2 {
        let (small, large) = (config.n_grid[0], config.n_grid[config.n_grid.len() - 1]);
        let (first, last) = (medians[0], medians[medians.len() - 1]);
        report.flags.push(Flag {
            name: "median_error_decreases".into(),
            cites: "consistency: more data gives smaller error".into(),
            observed: last,
            threshold: first,
            passed: last < first,
            detail: format!("median error {last:.5} at n = {large} against {first:.5} at n = {small}"),
        });
    }
    for (name, points) in [
        ("error_vs_n_median", median_points),
        ("error_vs_n_mean", mean_points),
        ("bound_vs_n", bound_points),
    ] {
        report.series.push(PlotSeries {
            name: name.into(),
            x_label: "n".into(),
            y_label: "error".into(),
            points,
        });
    }
    report.records = results;
    Ok(report)
}
