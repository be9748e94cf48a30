//! Oblivious adversaries.
//!
//! Every generator materializes the full stream before any learner runs and
//! takes no learner input, only a seeded random source.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classes::{Hypothesis, IndicatorHypothesis, SeparationHypothesis};
use crate::domain::{Bits, Instance, InstanceSequence, Label, LabeledStream, Payload};
use crate::error::{Error, Result};
use crate::game::{comparator_loss, Comparator, SimRng};
use crate::measure::{BaseMeasure, SmoothProcess};

/// A fixed stream together with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamBundle {
    pub stream: LabeledStream,
    /// A hypothesis with zero loss on the stream, when the construction has one.
    pub witness: Option<Hypothesis>,
    pub process: SmoothProcess,
    /// Whether the anchored rounds used pairwise distinct instances.
    pub distinct: bool,
}

impl StreamBundle {
    /// Re-checks the process certificate and the witness.
    pub fn verify(&self) -> Result<()> {
        self.process.verify()?;
        self.stream.check_horizon(self.process.horizon())?;
        if let Some(w) = &self.witness {
            comparator_loss(&self.stream, &Comparator::RealizabilityWitness(w.clone()))?;
        }
        Ok(())
    }
}

/// Draws `n` i.i.d. points from `mu`, redrawing the whole batch on a
/// collision.
fn distinct_draws(mu: &BaseMeasure, n: usize, rng: &mut SimRng) -> Vec<Instance> {
    loop {
        let xs: Vec<Instance> = (0..n).map(|_| mu.sample(rng)).collect();
        let mut seen = HashSet::with_capacity(n);
        if xs.iter().all(|x| seen.insert(*x)) {
            return xs;
        }
    }
}

fn random_bits(n: usize, rng: &mut SimRng) -> Bits {
    Bits::new((0..n).map(|_| rng.gen()).collect())
}

/// The separation adversary.
///
/// On the unit interval all `T` instances are distinct uniform draws and
/// round `t` is labeled `((x_1..x_T), θ_{≤t})` for a uniform `θ`. On the grid
/// `{1..m^2}` the first `min(m, T)` rounds are anchored and later rounds are
/// labeled by the witness. When the anchored draws repeat a cell the anchor
/// is their first-occurrence order padded with the smallest unused cells, so
/// a witness always exists; the bundle is then marked non-distinct.
pub fn separation_stream(horizon: usize, domain: BaseMeasure, rng: &mut SimRng) -> Result<StreamBundle> {
    domain.validate()?;
    let process = SmoothProcess::iid(domain, horizon)?;
    match domain {
        BaseMeasure::UniformUnit => {
            let xs = distinct_draws(&domain, horizon, rng);
            let theta = random_bits(horizon, rng);
            let seq = InstanceSequence::new(xs.clone())?;
            let pairs = xs.iter().enumerate().map(|(t, x)| {
                let y = Label::Anchored {
                    seq: seq.clone(),
                    payload: Payload::Prefix(theta.prefix(t + 1)),
                };
                (*x, y)
            });
            let stream = LabeledStream::from_pairs(pairs.collect::<Vec<_>>());
            let witness = SeparationHypothesis::new(seq, theta)?;
            Ok(StreamBundle {
                stream,
                witness: Some(Hypothesis::Separation(witness)),
                process,
                distinct: true,
            })
        }
        BaseMeasure::UniformGrid { side } => {
            let m = (side as usize).min(horizon);
            let xs: Vec<Instance> = (0..horizon).map(|_| domain.sample(rng)).collect();
            let theta = random_bits(m, rng);
            let mut anchor: Vec<Instance> = Vec::with_capacity(m);
            for x in &xs[..m] {
                if !anchor.contains(x) {
                    anchor.push(*x);
                }
            }
            let distinct = anchor.len() == m;
            let mut next = 1;
            while anchor.len() < m {
                let candidate = Instance::Grid { index: next, side };
                if !anchor.contains(&candidate) {
                    anchor.push(candidate);
                }
                next += 1;
            }
            let witness = SeparationHypothesis::new(InstanceSequence::new(anchor)?, theta)?;
            let stream = LabeledStream::from_pairs(xs.iter().map(|x| (*x, witness.eval(x))).collect::<Vec<_>>());
            Ok(StreamBundle {
                stream,
                witness: Some(Hypothesis::Separation(witness)),
                process,
                distinct,
            })
        }
    }
}

/// Probability that `m` uniform draws from `m^2` cells are pairwise distinct.
pub fn grid_distinct_probability(m: u32) -> f64 {
    let cells = f64::from(m) * f64::from(m);
    (0..m).map(|i| 1.0 - f64::from(i) / cells).product()
}

/// Uniform instances with fair-coin bit labels.
///
/// The witness is the indicator of the instances labeled one, which is
/// finite and therefore in the class of finite-support indicators.
pub fn coinflip_stream(horizon: usize, rng: &mut SimRng) -> Result<StreamBundle> {
    let mu = BaseMeasure::UniformUnit;
    let process = SmoothProcess::iid(mu, horizon)?;
    let xs = distinct_draws(&mu, horizon, rng);
    let ys: Vec<bool> = (0..horizon).map(|_| rng.gen()).collect();
    let witness = IndicatorHypothesis::points(xs.iter().zip(&ys).filter(|(_, &y)| y).map(|(x, _)| *x));
    let stream = LabeledStream::from_pairs(xs.into_iter().zip(ys.into_iter().map(Label::Bit)).collect::<Vec<_>>());
    Ok(StreamBundle {
        stream,
        witness: Some(Hypothesis::Indicator(witness)),
        process,
        distinct: true,
    })
}

/// `x_t ~ ν_t` independently and `y_t = h(x_t)`.
pub fn realizable_smooth_stream(h: &Hypothesis, process: &SmoothProcess, rng: &mut SimRng) -> Result<StreamBundle> {
    process.verify()?;
    let xs = process.sample_path(rng);
    let mut seen = HashSet::with_capacity(xs.len());
    let distinct = xs.iter().all(|x| seen.insert(*x));
    let stream = LabeledStream::from_pairs(xs.into_iter().map(|x| {
        let y = h.eval(&x);
        (x, y)
    }).collect::<Vec<_>>());
    Ok(StreamBundle {
        stream,
        witness: Some(h.clone()),
        process: process.clone(),
        distinct,
    })
}

/// Label patterns for streams played against a fixed expert set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpertPattern {
    /// Uniform instances with fair-coin labels.
    RandomLabels,
    /// Instances where two experts disagree, labeled by each in turn.
    Alternating,
    /// Labeled by one expert for the first half and another afterwards.
    Switching,
}

impl ExpertPattern {
    pub const ALL: [ExpertPattern; 3] = [
        ExpertPattern::RandomLabels,
        ExpertPattern::Alternating,
        ExpertPattern::Switching,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExpertPattern::RandomLabels => "random_labels",
            ExpertPattern::Alternating => "alternating",
            ExpertPattern::Switching => "switching",
        }
    }
}

/// A stream on the grid built to stress exponential weights over `experts`
/// (bit-valued hypotheses on the grid `side × side`).
pub fn expert_stream(
    experts: &[Hypothesis],
    side: u32,
    horizon: usize,
    pattern: ExpertPattern,
    rng: &mut SimRng,
) -> Result<StreamBundle> {
    let mu = BaseMeasure::UniformGrid { side };
    mu.validate()?;
    if experts.len() < 2 && pattern != ExpertPattern::RandomLabels {
        return Err(Error::Config(format!("{pattern:?} needs at least two experts")));
    }
    let process = SmoothProcess::iid(mu, horizon)?;
    let points = mu.grid_points().expect("grid measure");
    let pairs: Vec<(Instance, Label)> = match pattern {
        ExpertPattern::RandomLabels => (0..horizon)
            .map(|_| (mu.sample(rng), Label::Bit(rng.gen())))
            .collect(),
        ExpertPattern::Alternating => {
            let (a, b, cells) = loop {
                let picked: Vec<&Hypothesis> = experts.choose_multiple(rng, 2).collect();
                let cells: Vec<Instance> = points.iter().copied().filter(|x| picked[0].disagree(picked[1], x)).collect();
                if !cells.is_empty() {
                    break (picked[0], picked[1], cells);
                }
                if experts.windows(2).all(|w| w[0] == w[1]) {
                    return Err(Error::Config("all experts coincide".into()));
                }
            };
            (0..horizon)
                .map(|t| {
                    let x = *cells.choose(rng).expect("nonempty");
                    let y = if t % 2 == 0 { a.eval(&x) } else { b.eval(&x) };
                    (x, y)
                })
                .collect()
        }
        ExpertPattern::Switching => {
            let picked: Vec<&Hypothesis> = experts.choose_multiple(rng, 2).collect();
            (0..horizon)
                .map(|t| {
                    let x = mu.sample(rng);
                    let h = if t < horizon / 2 { picked[0] } else { picked[1] };
                    (x, h.eval(&x))
                })
                .collect()
        }
    };
    Ok(StreamBundle {
        stream: LabeledStream::from_pairs(pairs),
        witness: None,
        process,
        distinct: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{random_bit_tables, ConstantHypothesis};
    use crate::game::hypothesis_loss;
    use rand::SeedableRng;

    #[test]
    fn separation_witness_has_zero_loss() {
        let mut rng = SimRng::seed_from_u64(3);
        for domain in [BaseMeasure::UniformUnit, BaseMeasure::UniformGrid { side: 4 }] {
            let b = separation_stream(40, domain, &mut rng).unwrap();
            b.verify().unwrap();
            assert_eq!(hypothesis_loss(&b.stream, b.witness.as_ref().unwrap()), 0);
        }
    }

    #[test]
    fn separation_labels_are_prefix_coherent() {
        let mut rng = SimRng::seed_from_u64(4);
        let b = separation_stream(30, BaseMeasure::UniformUnit, &mut rng).unwrap();
        assert!(b.distinct);
        let prefixes: Vec<&Bits> = b
            .stream
            .pairs()
            .iter()
            .map(|p| match p.y.payload() {
                Some(Payload::Prefix(bits)) => bits,
                other => panic!("unexpected payload {other:?}"),
            })
            .collect();
        for (t, w) in prefixes.windows(2).enumerate() {
            assert_eq!(w[0].len(), t + 1);
            assert!(w[0].is_prefix_of(w[1]));
        }
    }

    #[test]
    fn repeated_grid_draws_still_have_a_witness() {
        let mut rng = SimRng::seed_from_u64(0);
        let mut saw_repeat = false;
        for _ in 0..200 {
            let b = separation_stream(6, BaseMeasure::UniformGrid { side: 2 }, &mut rng).unwrap();
            b.verify().unwrap();
            saw_repeat |= !b.distinct;
        }
        assert!(saw_repeat);
    }

    #[test]
    fn two_by_two_grid_distinctness() {
        assert_eq!(grid_distinct_probability(2), 0.75);
        let p8: f64 = (0..8).map(|i| 1.0 - i as f64 / 64.0).product();
        assert!((grid_distinct_probability(8) - p8).abs() < 1e-15);
    }

    #[test]
    fn coinflip_witness_and_empty_horizon() {
        let mut rng = SimRng::seed_from_u64(9);
        let b = coinflip_stream(100, &mut rng).unwrap();
        b.verify().unwrap();
        let empty = coinflip_stream(0, &mut rng).unwrap();
        assert!(empty.stream.is_empty());
    }

    #[test]
    fn constant_realizable_stream() {
        let mut rng = SimRng::seed_from_u64(1);
        let h = Hypothesis::Constant(ConstantHypothesis { value: 3 });
        let p = SmoothProcess::iid(BaseMeasure::UniformUnit, 20).unwrap();
        let b = realizable_smooth_stream(&h, &p, &mut rng).unwrap();
        assert!(b.stream.pairs().iter().all(|p| p.y == Label::Nat(3)));
    }

    #[test]
    fn expert_patterns_build() {
        let mut rng = SimRng::seed_from_u64(2);
        let experts = random_bit_tables(16, 8, &mut rng);
        for pattern in ExpertPattern::ALL {
            let b = expert_stream(&experts, 4, 50, pattern, &mut rng).unwrap();
            assert_eq!(b.stream.len(), 50);
            b.verify().unwrap();
        }
    }
}
