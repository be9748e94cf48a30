//! The sequential game between an oblivious adversary and a learner.
//!
//! Each round the engine shows `x_t`, collects the learner's prediction,
//! and only then delivers `y_t`. The label is never reachable from inside
//! [`Learner::predict`]; a learner that asks for it through
//! [`RoundView::peek_label`] aborts the game with a protocol error.

use std::cell::Cell;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::classes::Hypothesis;
use crate::domain::{Instance, Label, LabeledStream};
use crate::error::{Error, Result};

/// The seeded random source used everywhere in the laboratory.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Independent adversary and learner streams derived from one trial seed.
pub fn trial_rngs(seed: u64) -> (SimRng, SimRng) {
    let mut adversary = SimRng::seed_from_u64(seed);
    adversary.set_stream(0);
    let mut learner = SimRng::seed_from_u64(seed);
    learner.set_stream(1);
    (adversary, learner)
}

/// The set of labels a learner is allowed to emit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelDomain {
    Any,
    Bits,
    Nats,
    Anchored,
    Finite(Vec<Label>),
}

impl LabelDomain {
    pub fn contains(&self, y: &Label) -> bool {
        match self {
            LabelDomain::Any => true,
            LabelDomain::Bits => matches!(y, Label::Bit(_)),
            LabelDomain::Nats => matches!(y, Label::Nat(_)),
            LabelDomain::Anchored => matches!(y, Label::Anchored { .. }),
            LabelDomain::Finite(pool) => pool.contains(y),
        }
    }
}

/// What a learner sees while predicting round `t`.
pub struct RoundView<'a> {
    round: usize,
    x: &'a Instance,
    peeked: Cell<bool>,
}

impl<'a> RoundView<'a> {
    /// Zero-based round index.
    pub fn round(&self) -> usize {
        self.round
    }

    pub fn instance(&self) -> &'a Instance {
        self.x
    }

    /// The label is sealed until the prediction is committed, so this
    /// always returns `None`; calling it marks the round as a violation.
    pub fn peek_label(&self) -> Option<&'a Label> {
        self.peeked.set(true);
        None
    }
}

/// An online learner.
pub trait Learner {
    fn name(&self) -> String;

    fn label_domain(&self) -> LabelDomain;

    /// Prediction for the current round; randomness must come from `rng`.
    fn predict(&mut self, view: &RoundView<'_>, rng: &mut SimRng) -> Label;

    /// Feedback for round `round`, delivered after its prediction.
    fn observe(&mut self, round: usize, x: &Instance, y: &Label);
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn label_domain(&self) -> LabelDomain {
        (**self).label_domain()
    }

    fn predict(&mut self, view: &RoundView<'_>, rng: &mut SimRng) -> Label {
        (**self).predict(view, rng)
    }

    fn observe(&mut self, round: usize, x: &Instance, y: &Label) {
        (**self).observe(round, x, y)
    }
}

/// Outcome of one game.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegretReport {
    pub seed: u64,
    pub horizon: usize,
    pub learner_loss: u64,
    pub comparator_loss: Option<u64>,
    pub regret: Option<i64>,
    pub per_round_losses: Vec<u8>,
}

/// One flat CSV/JSON row of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatReport {
    pub seed: u64,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub learner_loss: u64,
    pub comparator_loss: Option<u64>,
    pub regret: Option<i64>,
}

impl RegretReport {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_comparator(mut self, comparator_loss: u64) -> Self {
        self.comparator_loss = Some(comparator_loss);
        self.regret = Some(self.learner_loss as i64 - comparator_loss as i64);
        self
    }

    pub fn flat(&self) -> FlatReport {
        FlatReport {
            seed: self.seed,
            horizon: self.horizon,
            learner_loss: self.learner_loss,
            comparator_loss: self.comparator_loss,
            regret: self.regret,
        }
    }

    /// Running sums of the per-round losses.
    pub fn cumulative_losses(&self) -> Vec<u64> {
        self.per_round_losses
            .iter()
            .scan(0u64, |acc, &l| {
                *acc += u64::from(l);
                Some(*acc)
            })
            .collect()
    }
}

/// Plays `learner` against `stream`.
pub fn run_game<L: Learner + ?Sized>(
    stream: &LabeledStream,
    learner: &mut L,
    rng: &mut SimRng,
) -> Result<RegretReport> {
    let domain = learner.label_domain();
    let mut per_round_losses = Vec::with_capacity(stream.len());
    let mut learner_loss = 0u64;
    for (round, pair) in stream.pairs().iter().enumerate() {
        let view = RoundView {
            round,
            x: &pair.x,
            peeked: Cell::new(false),
        };
        let prediction = learner.predict(&view, rng);
        if view.peeked.get() {
            return Err(Error::Protocol {
                round,
                reason: format!("{} requested y_t before predicting", learner.name()),
            });
        }
        if !domain.contains(&prediction) {
            return Err(Error::Protocol {
                round,
                reason: format!(
                    "{} predicted {prediction} outside its label domain",
                    learner.name()
                ),
            });
        }
        let loss = u8::from(prediction != pair.y);
        learner_loss += u64::from(loss);
        per_round_losses.push(loss);
        learner.observe(round, &pair.x, &pair.y);
    }
    Ok(RegretReport {
        seed: 0,
        horizon: stream.len(),
        learner_loss,
        comparator_loss: None,
        regret: None,
        per_round_losses,
    })
}

/// The benchmark the learner is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    ExhaustiveOverFiniteSet(Vec<Hypothesis>),
    RealizabilityWitness(Hypothesis),
}

/// Cumulative mistakes of `h` on `stream`.
pub fn hypothesis_loss(stream: &LabeledStream, h: &Hypothesis) -> u64 {
    stream
        .pairs()
        .iter()
        .filter(|p| h.eval(&p.x) != p.y)
        .count() as u64
}

/// Best cumulative loss among the comparator's hypotheses.
pub fn comparator_loss(stream: &LabeledStream, comparator: &Comparator) -> Result<u64> {
    match comparator {
        Comparator::ExhaustiveOverFiniteSet(class) => class
            .iter()
            .map(|h| hypothesis_loss(stream, h))
            .min()
            .ok_or(Error::EmptyComparator),
        Comparator::RealizabilityWitness(h) => {
            for (round, p) in stream.pairs().iter().enumerate() {
                if h.eval(&p.x) != p.y {
                    return Err(Error::Witness { round });
                }
            }
            Ok(0)
        }
    }
}

/// Best cumulative loss after every prefix of the stream.
pub fn comparator_prefix_losses(stream: &LabeledStream, comparator: &Comparator) -> Result<Vec<u64>> {
    match comparator {
        Comparator::RealizabilityWitness(_) => {
            comparator_loss(stream, comparator)?;
            Ok(vec![0; stream.len()])
        }
        Comparator::ExhaustiveOverFiniteSet(class) => {
            if class.is_empty() {
                return Err(Error::EmptyComparator);
            }
            let mut running = vec![0u64; class.len()];
            let mut out = Vec::with_capacity(stream.len());
            for p in stream.pairs() {
                for (acc, h) in running.iter_mut().zip(class) {
                    *acc += u64::from(h.eval(&p.x) != p.y);
                }
                out.push(*running.iter().min().expect("nonempty"));
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::ConstantHypothesis;

    struct Cheater;

    impl Learner for Cheater {
        fn name(&self) -> String {
            "cheater".into()
        }
        fn label_domain(&self) -> LabelDomain {
            LabelDomain::Any
        }
        fn predict(&mut self, view: &RoundView<'_>, _rng: &mut SimRng) -> Label {
            view.peek_label().cloned().unwrap_or(Label::Nat(0))
        }
        fn observe(&mut self, _: usize, _: &Instance, _: &Label) {}
    }

    struct Fixed(Label, LabelDomain);

    impl Learner for Fixed {
        fn name(&self) -> String {
            "fixed".into()
        }
        fn label_domain(&self) -> LabelDomain {
            self.1.clone()
        }
        fn predict(&mut self, _: &RoundView<'_>, _: &mut SimRng) -> Label {
            self.0.clone()
        }
        fn observe(&mut self, _: usize, _: &Instance, _: &Label) {}
    }

    fn ones_stream(n: usize, ones: usize) -> LabeledStream {
        LabeledStream::from_pairs(
            (0..n).map(|i| (Instance::Dyadic(i as u64), Label::Nat(u64::from(i < ones)))),
        )
    }

    #[test]
    fn cheating_oracle_is_rejected() {
        let stream = ones_stream(5, 2);
        let mut rng = SimRng::seed_from_u64(0);
        let err = run_game(&stream, &mut Cheater, &mut rng).unwrap_err();
        assert!(matches!(err, Error::Protocol { round: 0, .. }));
    }

    #[test]
    fn out_of_domain_predictions_are_rejected() {
        let stream = ones_stream(3, 1);
        let mut rng = SimRng::seed_from_u64(0);
        let mut learner = Fixed(Label::Nat(1), LabelDomain::Bits);
        assert!(matches!(
            run_game(&stream, &mut learner, &mut rng),
            Err(Error::Protocol { .. })
        ));
    }

    #[test]
    fn constant_comparators_pick_the_minimum() {
        let stream = ones_stream(10, 3);
        let class = vec![
            Hypothesis::Constant(ConstantHypothesis { value: 0 }),
            Hypothesis::Constant(ConstantHypothesis { value: 1 }),
        ];
        let c = Comparator::ExhaustiveOverFiniteSet(class);
        assert_eq!(comparator_loss(&stream, &c).unwrap(), 3);
        let prefix = comparator_prefix_losses(&stream, &c).unwrap();
        assert_eq!(prefix.len(), 10);
        assert_eq!(*prefix.last().unwrap(), 3);
    }

    #[test]
    fn empty_comparator_is_an_error() {
        let stream = ones_stream(2, 1);
        let c = Comparator::ExhaustiveOverFiniteSet(vec![]);
        assert!(matches!(comparator_loss(&stream, &c), Err(Error::EmptyComparator)));
    }

    #[test]
    fn mislabeling_witness_is_an_error() {
        let stream = ones_stream(4, 1);
        let c = Comparator::RealizabilityWitness(Hypothesis::Constant(ConstantHypothesis { value: 0 }));
        assert!(matches!(comparator_loss(&stream, &c), Err(Error::Witness { round: 0 })));
    }

    #[test]
    fn report_regret_is_loss_difference() {
        let stream = ones_stream(10, 3);
        let mut rng = SimRng::seed_from_u64(0);
        let mut learner = Fixed(Label::Nat(1), LabelDomain::Nats);
        let report = run_game(&stream, &mut learner, &mut rng).unwrap().with_comparator(3);
        assert_eq!(report.learner_loss, 7);
        assert_eq!(report.regret, Some(4));
        assert_eq!(report.cumulative_losses().last(), Some(&7));
    }

    #[test]
    fn trial_streams_differ() {
        use rand::RngCore;
        let (mut a, mut l) = trial_rngs(5);
        assert_ne!(a.next_u64(), l.next_u64());
        let (mut a2, _) = trial_rngs(5);
        let (mut a3, _) = trial_rngs(5);
        assert_eq!(a2.next_u64(), a3.next_u64());
    }
}
