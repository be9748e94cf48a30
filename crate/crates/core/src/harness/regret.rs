use super::config::{defaults, AdversarySpec, ClassSpec, ExperimentConfig, ExperimentKind, LearnerSpec};
use super::report::{ExperimentReport, Flag, NamedValue, PlotPoint, PlotSeries, ReplayRecord, SummaryRow, TrialRecord};
use super::{build_learner, class_rng, map_trials, measure_cover, run_rng};
use crate::adversaries::{
    coinflip_stream, expert_stream, grid_distinct_probability, realizable_smooth_stream, separation_stream,
    ExpertPattern, StreamBundle,
};
use crate::classes::Hypothesis;
use crate::covering::rewa_regret_bound;
use crate::error::{Error, Result};
use crate::game::{comparator_loss, comparator_prefix_losses, run_game, trial_rngs, Comparator, RegretReport};
use crate::learners::{RewaBatch, RewaLearner, RewaState};
use crate::measure::{make_smooth_process, BaseMeasure};
use crate::stats::{mean_se, proportion_se};
use rand::Rng;

/// Trials whose games are kept for replay.
const REPLAY_TRIALS: usize = 3;

struct TrialOutcome {
    record: TrialRecord,
    /// Cumulative regret after each round of the first play.
    curve: Vec<f64>,
    replay: Option<ReplayRecord>,
}

fn incompatible(why: &str) -> Error {
    Error::Config(format!("incompatible class/adversary pairing: {why}"))
}

/// Plays the configured learner against `config.trials` adversary streams.
pub fn run_regret_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut config = config.clone();
    config.kind = ExperimentKind::Regret;
    config.validate()?;
    let adversary = config.adversary.clone().expect("validated");
    let learner = config.learner.clone().expect("validated");
    let horizon = config.horizon;
    if horizon == 0 {
        return Err(Error::Config("field `horizon`: must be at least 1".into()));
    }

    let mut crng = class_rng(config.seed);
    let class = match &config.class {
        Some(spec) => spec.materialize(&mut crng)?,
        None => None,
    };
    let domain = match &adversary {
        AdversarySpec::Separation { domain } | AdversarySpec::RealizableSmooth { domain, .. } => *domain,
        AdversarySpec::Coinflip => BaseMeasure::UniformUnit,
        AdversarySpec::ExpertCorpus => {
            let side = config
                .class
                .as_ref()
                .and_then(ClassSpec::grid_side)
                .ok_or_else(|| incompatible("expert streams need a grid-valued class"))?;
            BaseMeasure::UniformGrid { side }
        }
    };
    domain.validate()?;
    let process = match &adversary {
        AdversarySpec::RealizableSmooth { family, .. } => {
            if class.is_none() {
                return Err(incompatible("realizable streams need a finite class to draw targets from"));
            }
            Some(make_smooth_process(family, config.sigma, domain, horizon)?)
        }
        _ => None,
    };
    if matches!(adversary, AdversarySpec::ExpertCorpus) && class.as_ref().map_or(0, Vec::len) < 2 {
        return Err(incompatible("expert streams need at least two experts"));
    }
    let experts: Option<Vec<Hypothesis>> = match &learner {
        LearnerSpec::Rewa => Some(
            class
                .clone()
                .ok_or_else(|| Error::Config("field `learner`: exponential weights need a finite class".into()))?,
        ),
        LearnerSpec::Cover { eps } => {
            let class = class
                .as_ref()
                .ok_or_else(|| Error::Config("field `learner`: a cover needs a finite class".into()))?;
            Some(measure_cover(class, &domain, *eps, &mut crng)?)
        }
        _ => None,
    };

    let outcomes = map_trials(config.trials, |trial| {
        let seed = config.trial_seed(trial);
        let (mut arng, _) = trial_rngs(seed);
        let bundle = match &adversary {
            AdversarySpec::Separation { domain } => separation_stream(horizon, *domain, &mut arng)?,
            AdversarySpec::Coinflip => coinflip_stream(horizon, &mut arng)?,
            AdversarySpec::RealizableSmooth { .. } => {
                let class = class.as_ref().expect("checked");
                let target = &class[arng.gen_range(0..class.len())];
                realizable_smooth_stream(target, process.as_ref().expect("checked"), &mut arng)?
            }
            AdversarySpec::ExpertCorpus => {
                let pattern = ExpertPattern::ALL[trial % ExpertPattern::ALL.len()];
                let side = config.class.as_ref().and_then(ClassSpec::grid_side).expect("checked");
                expert_stream(class.as_ref().expect("checked"), side, horizon, pattern, &mut arng)?
            }
        };
        play_trial(&config, &learner, experts.as_deref(), class.as_deref(), bundle, trial, seed)
    })?;

    let mut report = ExperimentReport::new(config.clone());
    let n = outcomes.len();
    let regrets: Vec<f64> = outcomes.iter().map(|o| o.record.regret.expect("set")).collect();
    let losses: Vec<f64> = outcomes.iter().map(|o| o.record.learner_loss.expect("set")).collect();
    let comps: Vec<u64> = outcomes.iter().map(|o| o.record.comparator_loss.expect("set")).collect();
    let r = mean_se(&regrets);
    let l = mean_se(&losses);
    let t = horizon as f64;
    report.summary.push(summary("all", "mean_regret", r.mean, Some(r.se), n));
    report.summary.push(summary("all", "regret_per_round", r.mean / t, Some(r.se / t), n));
    report.summary.push(summary("all", "mean_learner_loss", l.mean, Some(l.se), n));
    report.summary.push(summary(
        "all",
        "max_comparator_loss",
        comps.iter().copied().max().unwrap_or(0) as f64,
        None,
        n,
    ));
    if let Some(e) = &experts {
        report.bounds.push(NamedValue {
            name: "rewa_bound".into(),
            value: rewa_regret_bound(horizon, e.len()),
        });
    }

    let se3 = defaults::SE_ALLOWANCE;
    match &adversary {
        AdversarySpec::Separation { domain: BaseMeasure::UniformUnit } => {
            let threshold = defaults::SEPARATION_FRACTION * t;
            report.flags.push(Flag::at_least(
                "separation_regret_linear",
                "separation class lower bound: expected regret at least T/2",
                r.mean,
                threshold,
                format!("mean regret {:.2} ± {:.2} over {n} trials against {:.1}", r.mean, r.se, threshold),
            ));
        }
        AdversarySpec::Separation { domain: BaseMeasure::UniformGrid { side } } => {
            let m = (*side as usize).min(horizon);
            let threshold = defaults::GRID_FRACTION * m as f64 / 8.0;
            report.flags.push(Flag::at_least(
                "grid_separation_regret",
                "separation on a finite grid: expected regret at least m/8",
                r.mean,
                threshold,
                format!("mean regret {:.3} ± {:.3} over {n} trials", r.mean, r.se),
            ));
            let distinct = outcomes.iter().filter(|o| o.record.distinct == Some(true)).count() as f64 / n as f64;
            report.summary.push(summary("all", "distinct_frequency", distinct, Some(proportion_se(distinct, n)), n));
            if m == *side as usize {
                let p = grid_distinct_probability(*side);
                let tol = se3 * proportion_se(p, n);
                report.bounds.push(NamedValue {
                    name: "distinct_probability".into(),
                    value: p,
                });
                report.flags.push(Flag::at_most(
                    "grid_distinct_frequency",
                    "anchored grid draws are distinct with probability prod(1 - i/m^2)",
                    (distinct - p).abs(),
                    tol,
                    format!("frequency {distinct:.4} against {p:.4}"),
                ));
            }
        }
        AdversarySpec::Coinflip => {
            let worst = comps.iter().copied().max().unwrap_or(0) as f64;
            report.flags.push(Flag::at_most(
                "coinflip_comparator_zero",
                "smooth coin flips stay realizable by a finite-support indicator",
                worst,
                0.0,
                "largest comparator loss over all trials".into(),
            ));
            let (lo, hi) = defaults::COINFLIP_BAND;
            let rate = r.mean / t;
            report.flags.push(Flag {
                name: "coinflip_regret_rate".into(),
                cites: "finite-support indicators are not learnable under smoothness: regret T/2".into(),
                observed: rate,
                threshold: lo,
                passed: (lo..=hi).contains(&rate),
                detail: format!("regret per round {rate:.4} must lie in [{lo}, {hi}]"),
            });
        }
        AdversarySpec::RealizableSmooth { .. } => {
            if matches!(learner, LearnerSpec::MemorizeConstant) {
                let worst = losses.iter().copied().fold(0.0, f64::max);
                report.flags.push(Flag::at_most(
                    "memorize_at_most_one_mistake",
                    "constant-value class: memorizing the first label errs at most once",
                    worst,
                    1.0,
                    "largest learner loss over all trials".into(),
                ));
            }
            if let (LearnerSpec::Rewa, Some(e)) = (&learner, &experts) {
                let bound = rewa_regret_bound(horizon, e.len());
                report.flags.push(Flag::at_most(
                    "rewa_guarantee",
                    "exponential weights guarantee sqrt(2 T ln N)",
                    r.mean,
                    bound + se3 * r.se,
                    format!("mean regret {:.2} ± {:.2} against {bound:.2} + {se3} SE", r.mean, r.se),
                ));
            }
        }
        AdversarySpec::ExpertCorpus => {
            if let (LearnerSpec::Rewa, Some(e)) = (&learner, &experts) {
                let bound = rewa_regret_bound(horizon, e.len());
                let slack = outcomes
                    .iter()
                    .map(|o| o.record.regret.expect("set") - se3 * o.record.regret_se.unwrap_or(0.0))
                    .fold(f64::NEG_INFINITY, f64::max);
                let worst = regrets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                report.flags.push(Flag::at_most(
                    "rewa_guarantee_every_stream",
                    "exponential weights guarantee sqrt(2 T ln N)",
                    slack,
                    bound,
                    format!(
                        "largest seed-averaged regret {worst:.2} (less {se3} SE: {slack:.2}) against {bound:.2} over {n} streams"
                    ),
                ));
            }
        }
    }

    // Mean cumulative regret with a one-SE band.
    let mut points = Vec::with_capacity(horizon);
    let mut column = vec![0.0; n];
    for step in 0..horizon {
        for (c, o) in column.iter_mut().zip(&outcomes) {
            *c = o.curve[step];
        }
        let s = mean_se(&column);
        points.push(PlotPoint {
            x: (step + 1) as f64,
            y: s.mean,
            lo: s.mean - s.se,
            hi: s.mean + s.se,
        });
    }
    report.series.push(PlotSeries {
        name: "regret_vs_t".into(),
        x_label: "t".into(),
        y_label: "mean cumulative regret".into(),
        points,
    });
    for o in outcomes {
        report.records.push(o.record);
        if let Some(r) = o.replay {
            report.replays.push(r);
        }
    }
    Ok(report)
}

fn summary(group: &str, statistic: &str, value: f64, se: Option<f64>, trials: usize) -> SummaryRow {
    SummaryRow {
        group: group.into(),
        statistic: statistic.into(),
        value,
        se,
        trials,
    }
}

fn play_trial(
    config: &ExperimentConfig,
    spec: &LearnerSpec,
    experts: Option<&[Hypothesis]>,
    class: Option<&[Hypothesis]>,
    bundle: StreamBundle,
    trial: usize,
    seed: u64,
) -> Result<TrialOutcome> {
    let stream = &bundle.stream;
    let horizon = stream.len();
    let comparator = match &bundle.witness {
        Some(w) => Comparator::RealizabilityWitness(w.clone()),
        None => Comparator::ExhaustiveOverFiniteSet(
            class.ok_or_else(|| incompatible("the stream has no witness and the class is not finite"))?.to_vec(),
        ),
    };
    let comp = comparator_loss(stream, &comparator)?;
    let runs = config.runs_per_stream;
    let mut losses = Vec::with_capacity(runs);
    let mut first: Option<RegretReport> = None;
    let weighted = matches!(spec, LearnerSpec::Rewa | LearnerSpec::Cover { .. });
    if let (true, Some(experts)) = (weighted, experts) {
        let batch = RewaBatch::tuned(experts, stream)?;
        for run in 0..runs {
            let mut rng = run_rng(seed, run);
            if run == 0 {
                let r = batch.play(&mut rng);
                losses.push(r.learner_loss as f64);
                first = Some(r);
            } else {
                losses.push(batch.play_loss(&mut rng) as f64);
            }
        }
    } else {
        let mu = bundle.process.base();
        for run in 0..runs {
            let mut rng = run_rng(seed, run);
            let mut learner = build_learner(spec, experts, horizon, &mu, &mut rng)?;
            let r = run_game(stream, &mut learner, &mut rng)?;
            losses.push(r.learner_loss as f64);
            if run == 0 {
                first = Some(r);
            }
        }
    }
    let first = first.expect("runs >= 1").with_seed(seed).with_comparator(comp);
    let prefix = comparator_prefix_losses(stream, &comparator)?;
    let curve = first
        .cumulative_losses()
        .iter()
        .zip(&prefix)
        .map(|(&l, &c)| l as f64 - c as f64)
        .collect();
    let s = mean_se(&losses);
    let group = match bundle.witness {
        None => ExpertPattern::ALL[trial % ExpertPattern::ALL.len()].name().to_string(),
        Some(_) => "all".to_string(),
    };
    let mut record = TrialRecord::new(group, trial, seed, horizon);
    record.learner_loss = Some(s.mean);
    record.comparator_loss = Some(comp);
    record.regret = Some(s.mean - comp as f64);
    record.regret_se = (runs > 1).then_some(s.se);
    record.distinct = Some(bundle.distinct);
    let replay = (trial < REPLAY_TRIALS).then(|| ReplayRecord {
        learner: spec.clone(),
        experts: if weighted { experts.map(<[Hypothesis]>::to_vec) } else { None },
        horizon,
        seed,
        run: 0,
        bundle,
        comparator,
        report: first,
    });
    Ok(TrialOutcome { record, curve, replay })
}

/// Re-runs a recorded game and returns the fresh report.
///
/// The bundle's certificate and witness are re-checked first. The result
/// equals `record.report` whenever the record is authentic.
pub fn replay(record: &ReplayRecord) -> Result<RegretReport> {
    record.bundle.verify()?;
    let stream = &record.bundle.stream;
    if stream.len() != record.horizon {
        return Err(Error::Invalid(format!(
            "bundle has {} rounds but the record says {}",
            stream.len(),
            record.horizon
        )));
    }
    let mut rng = run_rng(record.seed, record.run);
    let report = match &record.experts {
        Some(experts) => {
            let mut learner = RewaLearner::new(RewaState::tuned(experts.clone(), record.horizon)?);
            run_game(stream, &mut learner, &mut rng)?
        }
        None => {
            let mu = record.bundle.process.base();
            let mut learner = build_learner(&record.learner, None, record.horizon, &mu, &mut rng)?;
            run_game(stream, &mut learner, &mut rng)?
        }
    };
    let comp = comparator_loss(stream, &record.comparator)?;
    Ok(report.with_seed(record.seed).with_comparator(comp))
}
