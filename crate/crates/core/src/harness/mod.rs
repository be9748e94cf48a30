//! Seeded Monte-Carlo experiments.
//!
//! Trial `i` of an experiment with base seed `s` uses seed `s + i`; the
//! adversary and learner draw from separate streams of that seed (see
//! [`crate::trial_rngs`]), and classes that need randomness draw from a
//! third stream of the base seed. Trials may run in parallel, but results
//! are always reduced in trial order, so a report depends only on its
//! configuration.

mod config;
mod pac;
mod regret;
mod report;
mod suites;
mod sufficiency;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub use config::{defaults, AdversarySpec, ClassSpec, ExperimentConfig, ExperimentKind, LearnerSpec};
pub use pac::run_pac_curve;
pub use regret::{replay, run_regret_experiment};
pub use report::{
    ComplexityProfile, ExperimentReport, Flag, NamedValue, PlotPoint, PlotSeries, ReplayRecord, SummaryRow,
    TrialRecord,
};
pub use suites::{run_entropy_suite, verify_compression};
pub use sufficiency::run_sufficiency_experiment;

use crate::classes::{self, Hypothesis, IndicatorHypothesis, NonDyadicRational, SeparationHypothesis};
use crate::covering::{greedy_cover, FiniteMetricView};
use crate::domain::{Bits, Instance, InstanceSequence};
use crate::error::{Error, Result};
use crate::game::{Learner, SimRng};
use crate::learners::{cover_learner, MemorizeConstantLearner, PrefixGuessLearner, RandomGuessLearner, RewaLearner, RewaState};
use crate::measure::BaseMeasure;

/// Largest rational-indicator class that is enumerated (`2^count` members).
pub const RATIONAL_LIMIT: usize = 10;

/// Draws used to estimate `d_μ` on the unit interval.
const DISTANCE_SAMPLES: usize = 4096;

/// Runs whichever experiment `config.kind` names.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    match config.kind {
        ExperimentKind::Regret => run_regret_experiment(config),
        ExperimentKind::PacCurve => run_pac_curve(config),
        ExperimentKind::Sufficiency => run_sufficiency_experiment(config),
        ExperimentKind::EntropySuite => run_entropy_suite(config),
        ExperimentKind::Compression => verify_compression(config),
    }
}

/// Randomness for building the class, shared by every trial.
pub(crate) fn class_rng(seed: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(2);
    rng
}

/// Learner randomness for play `run` of a trial; play 0 is the learner
/// stream of [`crate::trial_rngs`].
pub fn run_rng(trial_seed: u64, run: usize) -> SimRng {
    let mut rng = SimRng::seed_from_u64(trial_seed);
    rng.set_stream(1 + run as u64);
    rng
}

/// Maps `f` over trial indices, in parallel when enabled, keeping order.
pub(crate) fn map_trials<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// The first `count` non-dyadic rationals in `(0, 1)`, by denominator then
/// numerator.
pub fn first_rationals(count: usize) -> Vec<NonDyadicRational> {
    let mut out = Vec::with_capacity(count);
    let mut den = 3u64;
    while out.len() < count {
        for num in 1..den {
            if out.len() == count {
                break;
            }
            if let Ok(r) = NonDyadicRational::new(num, den) {
                if r.den() == den {
                    out.push(r);
                }
            }
        }
        den += 1;
    }
    out
}

impl ClassSpec {
    /// The members of the class, when it is finite and small enough to list.
    pub fn materialize(&self, rng: &mut SimRng) -> Result<Option<Vec<Hypothesis>>> {
        Ok(match *self {
            ClassSpec::Separation | ClassSpec::PointIndicators => None,
            ClassSpec::RationalIndicators { count } => {
                if count > RATIONAL_LIMIT {
                    return Err(Error::Config(format!(
                        "field `class.count`: {count} exceeds the enumeration limit {RATIONAL_LIMIT}"
                    )));
                }
                let rationals = first_rationals(count);
                Some(
                    (0u32..1 << count)
                        .map(|mask| {
                            Hypothesis::Indicator(IndicatorHypothesis::rationals(
                                rationals.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, r)| *r),
                            ))
                        })
                        .collect(),
                )
            }
            ClassSpec::Constants { k } => {
                if k == 0 {
                    return Err(Error::Config("field `class.k`: need at least one constant".into()));
                }
                Some(classes::constants(k))
            }
            ClassSpec::GridThresholds { side } => {
                BaseMeasure::UniformGrid { side }.validate()?;
                Some(classes::grid_thresholds(side))
            }
            ClassSpec::RandomTables { side, count } => {
                BaseMeasure::UniformGrid { side }.validate()?;
                let cells = (side * side) as usize;
                if count == 0 || (cells < 64 && count as u128 > 1u128 << cells) {
                    return Err(Error::Config(format!(
                        "field `class.count`: cannot draw {count} distinct tables on {cells} cells"
                    )));
                }
                Some(classes::random_bit_tables(cells, count, rng))
            }
        })
    }

    /// The grid a grid-valued class lives on.
    pub fn grid_side(&self) -> Option<u32> {
        match *self {
            ClassSpec::GridThresholds { side } | ClassSpec::RandomTables { side, .. } => Some(side),
            _ => None,
        }
    }
}

/// Indices of a greedy `eps`-cover of `class` in `d_μ`.
pub fn measure_cover(class: &[Hypothesis], mu: &BaseMeasure, eps: f64, rng: &mut SimRng) -> Result<Vec<Hypothesis>> {
    let view = FiniteMetricView::measure(class, mu, DISTANCE_SAMPLES, rng)?;
    Ok(greedy_cover(&view, eps).into_iter().map(|i| class[i].clone()).collect())
}

/// `n` distinct draws from `mu`.
fn distinct_sequence(mu: &BaseMeasure, n: usize, rng: &mut SimRng) -> Result<InstanceSequence> {
    if let Some(cells) = mu.cells() {
        if n > cells {
            return Err(Error::Config(format!("cannot draw {n} distinct cells out of {cells}")));
        }
        let points = mu.grid_points().expect("grid");
        return InstanceSequence::new(points.choose_multiple(rng, n).copied().collect());
    }
    loop {
        let items: Vec<Instance> = (0..n).map(|_| mu.sample(rng)).collect();
        if let Ok(seq) = InstanceSequence::new(items) {
            return Ok(seq);
        }
    }
}

/// Builds the learner `spec` describes.
///
/// `experts` is the fixed expert set of weighting learners; `mu` is the
/// domain the game is played on. Learners that randomize their own
/// construction draw from `rng` before the game starts.
pub fn build_learner(
    spec: &LearnerSpec,
    experts: Option<&[Hypothesis]>,
    horizon: usize,
    mu: &BaseMeasure,
    rng: &mut SimRng,
) -> Result<Box<dyn Learner>> {
    Ok(match spec {
        LearnerSpec::RandomGuess { pool } => Box::new(RandomGuessLearner::new(pool.clone())?),
        LearnerSpec::PrefixGuess => Box::new(PrefixGuessLearner::default()),
        LearnerSpec::MemorizeConstant => Box::new(MemorizeConstantLearner::default()),
        LearnerSpec::Rewa | LearnerSpec::Cover { .. } => {
            let experts = experts.ok_or_else(|| {
                Error::Config("field `learner`: exponential weights need a finite class".into())
            })?;
            Box::new(RewaLearner::new(RewaState::tuned(experts.to_vec(), horizon)?).named("rewa"))
        }
        LearnerSpec::SeparationCover {
            sequences,
            per_sequence,
            eps,
        } => {
            if *sequences == 0 || *per_sequence == 0 {
                return Err(Error::Config(
                    "field `learner`: the separation cover needs sequences and hypotheses".into(),
                ));
            }
            let len = mu.cells().map_or(horizon, |c| horizon.min(c)).max(1);
            let mut pool = Vec::with_capacity(sequences * per_sequence);
            for _ in 0..*sequences {
                let seq = distinct_sequence(mu, len, rng)?;
                for _ in 0..*per_sequence {
                    let theta = Bits::new((0..len).map(|_| rng.gen()).collect());
                    pool.push(Hypothesis::Separation(SeparationHypothesis::new(seq.clone(), theta)?));
                }
            }
            let cover = measure_cover(&pool, mu, *eps, rng)?;
            Box::new(cover_learner(cover, horizon)?.named("separation_cover"))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_listed_without_repeats() {
        let r = first_rationals(6);
        let shown: Vec<String> = r.iter().map(|r| format!("{}/{}", r.num(), r.den())).collect();
        assert_eq!(shown, ["1/3", "2/3", "1/5", "2/5", "3/5", "4/5"]);
    }

    #[test]
    fn rational_class_is_the_power_set() {
        let mut rng = class_rng(0);
        let class = ClassSpec::RationalIndicators { count: 4 }.materialize(&mut rng).unwrap().unwrap();
        assert_eq!(class.len(), 16);
        assert!(ClassSpec::RationalIndicators { count: 11 }.materialize(&mut rng).is_err());
    }

    #[test]
    fn run_zero_is_the_learner_stream() {
        let (_, mut a) = crate::trial_rngs(9);
        let mut b = run_rng(9, 0);
        assert_eq!(a.gen::<u64>(), b.gen::<u64>());
        let mut c = run_rng(9, 1);
        assert_ne!(run_rng(9, 0).gen::<u64>(), c.gen::<u64>());
    }
}
