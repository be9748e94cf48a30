use rand::Rng;

use crate::domain::{Bits, Instance, InstanceSequence, Label, Payload};
use crate::error::{Error, Result};
use crate::game::{LabelDomain, Learner, RoundView, SimRng};

/// Uniform guesses from a fixed pool, ignoring all feedback.
#[derive(Debug, Clone)]
pub struct RandomGuessLearner {
    pool: Vec<Label>,
}

impl RandomGuessLearner {
    pub fn new(pool: Vec<Label>) -> Result<Self> {
        if pool.is_empty() {
            return Err(Error::Config("random guessing needs a nonempty label pool".into()));
        }
        Ok(RandomGuessLearner { pool })
    }
}

impl Learner for RandomGuessLearner {
    fn name(&self) -> String {
        format!("random_guess(K={})", self.pool.len())
    }

    fn label_domain(&self) -> LabelDomain {
        LabelDomain::Finite(self.pool.clone())
    }

    fn predict(&mut self, _view: &RoundView<'_>, rng: &mut SimRng) -> Label {
        self.pool[rng.gen_range(0..self.pool.len())].clone()
    }

    fn observe(&mut self, _: usize, _: &Instance, _: &Label) {}
}

/// Random guessing among anchored labels consistent with everything seen.
///
/// After the first anchored label the anchor is known; at `seq[t]` the
/// learner fills the bits it has already seen and guesses the rest, which
/// is the best any learner can do against the separation adversary.
#[derive(Debug, Clone, Default)]
pub struct PrefixGuessLearner {
    seq: Option<InstanceSequence>,
    known: Vec<Option<bool>>,
}

impl Learner for PrefixGuessLearner {
    fn name(&self) -> String {
        "prefix_guess".into()
    }

    fn label_domain(&self) -> LabelDomain {
        LabelDomain::Anchored
    }

    fn predict(&mut self, view: &RoundView<'_>, rng: &mut SimRng) -> Label {
        let x = view.instance();
        match &self.seq {
            None => Label::Anchored {
                seq: InstanceSequence::new(vec![*x]).expect("one item"),
                payload: Payload::Prefix(Bits::new(vec![rng.gen()])),
            },
            Some(seq) => {
                let payload = match seq.position(x) {
                    None => Payload::Star,
                    Some(p) => Payload::Prefix(Bits::new(
                        self.known[..=p].iter().map(|b| b.unwrap_or_else(|| rng.gen())).collect(),
                    )),
                };
                Label::Anchored {
                    seq: seq.clone(),
                    payload,
                }
            }
        }
    }

    fn observe(&mut self, _: usize, _: &Instance, y: &Label) {
        let Label::Anchored { seq, payload } = y else {
            return;
        };
        if self.seq.as_ref() != Some(seq) {
            self.seq = Some(seq.clone());
            self.known = vec![None; seq.len()];
        }
        if let Payload::Prefix(bits) = payload {
            for (slot, &b) in self.known.iter_mut().zip(bits.as_slice()) {
                *slot = Some(b);
            }
        }
    }
}

/// Predicts `Nat(0)` until a label is revealed, then repeats that label.
///
/// Makes at most one mistake on a stream labeled by a constant; no
/// guarantee otherwise.
#[derive(Debug, Clone, Default)]
pub struct MemorizeConstantLearner {
    value: Option<Label>,
}

impl Learner for MemorizeConstantLearner {
    fn name(&self) -> String {
        "memorize_constant".into()
    }

    fn label_domain(&self) -> LabelDomain {
        LabelDomain::Nats
    }

    fn predict(&mut self, _view: &RoundView<'_>, _rng: &mut SimRng) -> Label {
        self.value.clone().unwrap_or(Label::Nat(0))
    }

    fn observe(&mut self, _: usize, _: &Instance, y: &Label) {
        if self.value.is_none() {
            self.value = Some(y.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::LabeledStream;
    use crate::game::run_game;
    use rand::SeedableRng;

    fn constant_stream(v: u64, n: usize) -> LabeledStream {
        LabeledStream::from_pairs((0..n).map(|i| (Instance::Dyadic(i as u64), Label::Nat(v))))
    }

    #[test]
    fn memorizer_mistakes() {
        let mut rng = SimRng::seed_from_u64(0);
        let r = run_game(&constant_stream(0, 50), &mut MemorizeConstantLearner::default(), &mut rng).unwrap();
        assert_eq!(r.learner_loss, 0);
        let r = run_game(&constant_stream(7, 50), &mut MemorizeConstantLearner::default(), &mut rng).unwrap();
        assert_eq!(r.learner_loss, 1);
        assert_eq!(r.per_round_losses[0], 1);
    }

    #[test]
    fn singleton_pool_is_constant() {
        let mut rng = SimRng::seed_from_u64(0);
        let mut l = RandomGuessLearner::new(vec![Label::Nat(2)]).unwrap();
        let r = run_game(&constant_stream(2, 30), &mut l, &mut rng).unwrap();
        assert_eq!(r.learner_loss, 0);
        assert!(RandomGuessLearner::new(vec![]).is_err());
    }

    #[test]
    fn four_label_guessing_loses_three_quarters() {
        let mut rng = SimRng::seed_from_u64(5);
        let pool: Vec<Label> = (0..4).map(Label::Nat).collect();
        let mut l = RandomGuessLearner::new(pool).unwrap();
        let stream = LabeledStream::from_pairs((0..1000u64).map(|i| (Instance::Dyadic(i), Label::Nat(i % 4))));
        let r = run_game(&stream, &mut l, &mut rng).unwrap();
        // Binomial(1000, 3/4): sd ≈ 13.7.
        let sd = (1000.0f64 * 0.75 * 0.25).sqrt();
        assert!((r.learner_loss as f64 - 750.0).abs() <= 3.0 * sd, "{}", r.learner_loss);
    }
}
