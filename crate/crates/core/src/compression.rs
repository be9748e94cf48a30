//! The size-one compression scheme for the separation class.
//!
//! `compress` keeps the single pair whose prefix payload is longest (or the
//! first pair when every payload is `★`); `reconstruct` rebuilds a
//! separation hypothesis over the anchor with the kept prefix extended by
//! zeros.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::classes::SeparationHypothesis;
use crate::domain::{Bits, Instance, InstanceSequence, Label, Payload};
use crate::error::{Error, Result};
use crate::game::SimRng;

/// A nonempty sample labeled by some separation hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizableSample {
    pairs: Vec<(Instance, Label)>,
}

impl RealizableSample {
    /// Checks that one anchor and one bit string explain every label.
    pub fn new(pairs: Vec<(Instance, Label)>) -> Result<Self> {
        let anchor = match pairs.first() {
            None => return Err(Error::Realizability("empty sample".into())),
            Some((_, Label::Anchored { seq, .. })) => seq.clone(),
            Some((_, other)) => {
                return Err(Error::Realizability(format!("label {other} is not anchored")))
            }
        };
        let mut longest: Option<&Bits> = None;
        for (i, (x, y)) in pairs.iter().enumerate() {
            let Label::Anchored { seq, payload } = y else {
                return Err(Error::Realizability(format!("label {y} is not anchored")));
            };
            if *seq != anchor {
                return Err(Error::Realizability(format!(
                    "pair {} carries a different anchor",
                    i + 1
                )));
            }
            match payload {
                Payload::Star => {
                    if seq.contains(x) {
                        return Err(Error::Realizability(format!(
                            "pair {} is on the anchor but labeled with a star",
                            i + 1
                        )));
                    }
                }
                Payload::Prefix(bits) => {
                    if bits.is_empty() || seq.position(x) != Some(bits.len() - 1) {
                        return Err(Error::Realizability(format!(
                            "pair {} has a prefix of length {} at the wrong position",
                            i + 1,
                            bits.len()
                        )));
                    }
                    longest = match longest {
                        None => Some(bits),
                        Some(prev) if prev.len() >= bits.len() => {
                            if !bits.is_prefix_of(prev) {
                                return Err(incoherent(i));
                            }
                            Some(prev)
                        }
                        Some(prev) => {
                            if !prev.is_prefix_of(bits) {
                                return Err(incoherent(i));
                            }
                            Some(bits)
                        }
                    };
                }
            }
        }
        Ok(RealizableSample { pairs })
    }

    pub fn pairs(&self) -> &[(Instance, Label)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn incoherent(i: usize) -> Error {
    Error::Realizability(format!("prefix at pair {} contradicts an earlier one", i + 1))
}

/// Keeps one pair of `sample`.
pub fn compress(sample: &RealizableSample) -> (Instance, Label) {
    let mut best: Option<(usize, usize)> = None;
    for (i, (_, y)) in sample.pairs.iter().enumerate() {
        if let Some(len) = y.payload().and_then(Payload::prefix_len) {
            if best.is_none_or(|(_, l)| len > l) {
                best = Some((i, len));
            }
        }
    }
    sample.pairs[best.map_or(0, |(i, _)| i)].clone()
}

/// Rebuilds a hypothesis from a single kept pair.
pub fn reconstruct(pair: &(Instance, Label)) -> Result<SeparationHypothesis> {
    let Label::Anchored { seq, payload } = &pair.1 else {
        return Err(Error::Invalid(format!("cannot reconstruct from label {}", pair.1)));
    };
    let theta = match payload {
        Payload::Star => Bits::zeros(seq.len()),
        Payload::Prefix(bits) => bits.zero_extended(seq.len()),
    };
    SeparationHypothesis::new(seq.clone(), theta)
}

/// `f_S = reconstruct(compress(S))`.
pub fn compression_learner(sample: &RealizableSample) -> Result<SeparationHypothesis> {
    reconstruct(&compress(sample))
}

/// Whether `h` reproduces every label of the sample.
pub fn agrees_on_sample(h: &SeparationHypothesis, sample: &RealizableSample) -> bool {
    sample.pairs.iter().all(|(x, y)| h.eval(x) == *y)
}

/// Generalization bound for a compression scheme of size `k` on `n`
/// samples, using natural logarithms:
/// `100 * sqrt((k ln(n/k) + k + ln(1/δ)) / n)`.
pub fn pac_error_bound(n: f64, k: f64, delta: f64) -> Result<f64> {
    if !(k >= 1.0 && k <= n / 2.0) {
        return Err(Error::Precondition(format!(
            "compression size {k} must lie in [1, n/2] for n = {n}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition(format!("delta {delta} outside (0, 1)")));
    }
    Ok(100.0 * ((k * (n / k).ln() + k + (1.0 / delta).ln()) / n).sqrt())
}

/// A random realizable sample over a random anchor.
///
/// The anchor has between 1 and `max_seq_len` dyadic points; the sample has
/// between 1 and `max_n` queries, each on the anchor or off it with equal
/// probability.
pub fn random_realizable_sample(
    rng: &mut SimRng,
    max_n: usize,
    max_seq_len: usize,
) -> (SeparationHypothesis, RealizableSample) {
    let seq_len = rng.gen_range(1..=max_seq_len);
    let seq = loop {
        let items: Vec<Instance> = (0..seq_len).map(|_| Instance::Dyadic(rng.gen())).collect();
        if let Ok(seq) = InstanceSequence::new(items) {
            break seq;
        }
    };
    let theta = Bits::new((0..seq_len).map(|_| rng.gen()).collect());
    let h = SeparationHypothesis::new(seq.clone(), theta).expect("lengths match");
    let n = rng.gen_range(1..=max_n);
    let pairs = (0..n)
        .map(|_| {
            let x = if rng.gen_bool(0.5) {
                *seq.items().choose(rng).expect("nonempty")
            } else {
                loop {
                    let x = Instance::Dyadic(rng.gen());
                    if !seq.contains(&x) {
                        break x;
                    }
                }
            };
            (x, h.eval(&x))
        })
        .collect();
    let sample = RealizableSample::new(pairs).expect("labels come from h");
    (h, sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn u(x: f64) -> Instance {
        Instance::unit(x).unwrap()
    }

    fn anchor() -> InstanceSequence {
        InstanceSequence::new(vec![u(0.1), u(0.2), u(0.3)]).unwrap()
    }

    fn lab(payload: Payload) -> Label {
        Label::anchored(anchor(), payload).unwrap()
    }

    fn prefix(s: &str) -> Payload {
        Payload::Prefix(s.parse().unwrap())
    }

    #[test]
    fn all_star_keeps_first_pair() {
        let s = RealizableSample::new(vec![(u(0.5), lab(Payload::Star)), (u(0.6), lab(Payload::Star))])
            .unwrap();
        assert_eq!(compress(&s), (u(0.5), lab(Payload::Star)));
    }

    #[test]
    fn longest_prefix_is_kept() {
        let s = RealizableSample::new(vec![
            (u(0.5), lab(Payload::Star)),
            (u(0.2), lab(prefix("01"))),
            (u(0.1), lab(prefix("0"))),
        ])
        .unwrap();
        assert_eq!(compress(&s), (u(0.2), lab(prefix("01"))));
    }

    #[test]
    fn ties_go_to_the_earliest_pair() {
        let s = RealizableSample::new(vec![
            (u(0.1), lab(prefix("1"))),
            (u(0.2), lab(prefix("10"))),
            (u(0.2), lab(prefix("10"))),
        ])
        .unwrap();
        let kept = compress(&s);
        assert_eq!(kept, s.pairs()[1]);
    }

    #[test]
    fn singleton_sample() {
        let s = RealizableSample::new(vec![(u(0.3), lab(prefix("110")))]).unwrap();
        assert_eq!(compress(&s), s.pairs()[0]);
    }

    #[test]
    fn reconstruction_zero_completes() {
        let h = reconstruct(&(u(0.9), lab(Payload::Star))).unwrap();
        assert_eq!(h.theta().to_string(), "000");
        let h = reconstruct(&(u(0.1), lab(prefix("1")))).unwrap();
        assert_eq!(h.theta().to_string(), "100");
        assert_eq!(h.seq(), &anchor());
        assert!(reconstruct(&(u(0.1), Label::Bit(true))).is_err());
    }

    #[test]
    fn single_star_sample_yields_all_zero_hypothesis() {
        let s = RealizableSample::new(vec![(u(0.9), lab(Payload::Star))]).unwrap();
        let f = compression_learner(&s).unwrap();
        assert_eq!(f.theta(), &Bits::zeros(3));
    }

    #[test]
    fn unrealizable_samples_are_rejected() {
        let other = InstanceSequence::new(vec![u(0.1)]).unwrap();
        let mixed = vec![
            (u(0.5), lab(Payload::Star)),
            (u(0.6), Label::anchored(other, Payload::Star).unwrap()),
        ];
        assert!(matches!(RealizableSample::new(mixed), Err(Error::Realizability(_))));
        let wrong_spot = vec![(u(0.3), lab(prefix("1")))];
        assert!(RealizableSample::new(wrong_spot).is_err());
        let star_on_anchor = vec![(u(0.2), lab(Payload::Star))];
        assert!(RealizableSample::new(star_on_anchor).is_err());
        let incoherent = vec![(u(0.1), lab(prefix("1"))), (u(0.2), lab(prefix("01")))];
        assert!(RealizableSample::new(incoherent).is_err());
        assert!(RealizableSample::new(vec![]).is_err());
    }

    #[test]
    fn bound_values() {
        // 100 * sqrt((ln 400 + 1 + ln 20) / 400)
        let b = pac_error_bound(400.0, 1.0, 0.05).unwrap();
        assert!((b - 15.8019).abs() < 1e-3, "{b}");
        let e = std::f64::consts::E;
        let b = pac_error_bound(e, 1.0, 1.0 - 1e-15).unwrap();
        assert!((b - 100.0 * (2.0 / e).sqrt()).abs() < 1e-6);
        assert!((b - 85.78).abs() < 5e-3);
        assert!(pac_error_bound(10.0, 6.0, 0.1).is_err());
        assert!(pac_error_bound(10.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn bound_decreases_in_n() {
        let mut prev = f64::INFINITY;
        for n in 3..2000 {
            let b = pac_error_bound(n as f64, 1.0, 0.05).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn reconstruction_agrees_with_every_sample(seed in any::<u64>()) {
            let mut rng = SimRng::seed_from_u64(seed);
            let (_, sample) = random_realizable_sample(&mut rng, 50, 20);
            let kept = compress(&sample);
            prop_assert!(sample.pairs().contains(&kept));
            let longest = sample
                .pairs()
                .iter()
                .filter_map(|(_, y)| y.payload().and_then(Payload::prefix_len))
                .max();
            prop_assert_eq!(kept.1.payload().and_then(Payload::prefix_len), longest);
            let f = reconstruct(&kept).unwrap();
            prop_assert!(agrees_on_sample(&f, &sample));
        }
    }
}
