//! Hypothesis classes used by the experiments.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::domain::{Bits, Instance, InstanceSequence, Label, Payload};
use crate::error::{Error, Result};

/// `h^θ` anchored at a sequence of distinct instances.
///
/// On `seq[t]` it returns `(seq, θ[..=t])`; everywhere else `(seq, ★)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SeparationRepr")]
pub struct SeparationHypothesis {
    seq: InstanceSequence,
    theta: Bits,
}

#[derive(Deserialize)]
struct SeparationRepr {
    seq: InstanceSequence,
    theta: Bits,
}

impl TryFrom<SeparationRepr> for SeparationHypothesis {
    type Error = Error;

    fn try_from(r: SeparationRepr) -> Result<Self> {
        SeparationHypothesis::new(r.seq, r.theta)
    }
}

impl SeparationHypothesis {
    pub fn new(seq: InstanceSequence, theta: Bits) -> Result<Self> {
        if seq.len() != theta.len() {
            return Err(Error::Invalid(format!(
                "theta has {} bits for a sequence of {}",
                theta.len(),
                seq.len()
            )));
        }
        Ok(SeparationHypothesis { seq, theta })
    }

    pub fn seq(&self) -> &InstanceSequence {
        &self.seq
    }

    pub fn theta(&self) -> &Bits {
        &self.theta
    }

    /// Length of the prefix revealed at `x`, or `None` off the sequence.
    pub fn prefix_len_at(&self, x: &Instance) -> Option<usize> {
        self.seq.position(x).map(|p| p + 1)
    }

    pub fn eval(&self, x: &Instance) -> Label {
        let payload = match self.prefix_len_at(x) {
            Some(len) => Payload::Prefix(self.theta.prefix(len)),
            None => Payload::Star,
        };
        Label::Anchored {
            seq: self.seq.clone(),
            payload,
        }
    }
}

/// A rational `num / den` in lowest terms whose denominator is not a power
/// of two, so it never coincides with a dyadic point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(u64, u64)", into = "(u64, u64)")]
pub struct NonDyadicRational {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl NonDyadicRational {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num >= den {
            return Err(Error::Invalid(format!("{num}/{den} is not in [0, 1)")));
        }
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        if den.is_power_of_two() {
            return Err(Error::Invalid(format!("{num}/{den} is dyadic")));
        }
        Ok(NonDyadicRational { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }
}

impl TryFrom<(u64, u64)> for NonDyadicRational {
    type Error = Error;

    fn try_from((num, den): (u64, u64)) -> Result<Self> {
        NonDyadicRational::new(num, den)
    }
}

impl From<NonDyadicRational> for (u64, u64) {
    fn from(r: NonDyadicRational) -> Self {
        (r.num, r.den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Points(BTreeSet<Instance>),
    Rationals(BTreeSet<NonDyadicRational>),
}

/// `x ↦ 1{x ∈ S}` for a finite set `S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndicatorHypothesis {
    pub support: Support,
}

impl IndicatorHypothesis {
    pub fn points(points: impl IntoIterator<Item = Instance>) -> Self {
        IndicatorHypothesis {
            support: Support::Points(points.into_iter().collect()),
        }
    }

    pub fn rationals(points: impl IntoIterator<Item = NonDyadicRational>) -> Self {
        IndicatorHypothesis {
            support: Support::Rationals(points.into_iter().collect()),
        }
    }

    pub fn eval(&self, x: &Instance) -> Label {
        Label::Bit(match &self.support {
            Support::Points(s) => s.contains(x),
            // Neither dyadic nor grid points are non-dyadic rationals.
            Support::Rationals(_) => false,
        })
    }

    /// Value at a rational point of the domain.
    pub fn eval_rational(&self, r: &NonDyadicRational) -> Label {
        Label::Bit(match &self.support {
            Support::Points(_) => false,
            Support::Rationals(s) => s.contains(r),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstantHypothesis {
    pub value: u64,
}

impl ConstantHypothesis {
    pub fn eval(&self, _x: &Instance) -> Label {
        Label::Nat(self.value)
    }
}

/// `x ↦ 1{x ≥ cutoff}` on a totally ordered domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThresholdHypothesis {
    pub cutoff: Instance,
}

impl ThresholdHypothesis {
    pub fn eval(&self, x: &Instance) -> Label {
        debug_assert!(x.same_domain(&self.cutoff));
        Label::Bit(*x >= self.cutoff)
    }
}

/// A lookup table over `k` equal cells of the domain.
///
/// Grid instances use their own cell (the table must have `side^2`
/// entries); a dyadic `x` uses cell `floor(x * k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TableHypothesis {
    values: Vec<Label>,
}

impl TableHypothesis {
    pub fn new(values: Vec<Label>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("empty table".into()));
        }
        Ok(TableHypothesis { values })
    }

    pub fn bits(values: impl IntoIterator<Item = bool>) -> Result<Self> {
        TableHypothesis::new(values.into_iter().map(Label::Bit).collect())
    }

    pub fn values(&self) -> &[Label] {
        &self.values
    }

    pub fn cell(&self, x: &Instance) -> usize {
        match *x {
            Instance::Grid { index, .. } => {
                let i = index as usize - 1;
                debug_assert!(i < self.values.len(), "table smaller than grid");
                i.min(self.values.len() - 1)
            }
            Instance::Dyadic(k) => ((u128::from(k) * self.values.len() as u128) >> 64) as usize,
        }
    }

    pub fn eval(&self, x: &Instance) -> Label {
        self.values[self.cell(x)].clone()
    }
}

/// A member of one of the laboratory's hypothesis classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Hypothesis {
    Separation(SeparationHypothesis),
    Indicator(IndicatorHypothesis),
    Constant(ConstantHypothesis),
    Threshold(ThresholdHypothesis),
    Table(TableHypothesis),
}

impl Hypothesis {
    pub fn eval(&self, x: &Instance) -> Label {
        match self {
            Hypothesis::Separation(h) => h.eval(x),
            Hypothesis::Indicator(h) => h.eval(x),
            Hypothesis::Constant(h) => h.eval(x),
            Hypothesis::Threshold(h) => h.eval(x),
            Hypothesis::Table(h) => h.eval(x),
        }
    }

    /// Whether the two hypotheses disagree at `x`.
    pub fn disagree(&self, other: &Hypothesis, x: &Instance) -> bool {
        match (self, other) {
            (Hypothesis::Separation(a), Hypothesis::Separation(b)) => {
                if a.seq != b.seq {
                    return true;
                }
                match a.prefix_len_at(x) {
                    None => false,
                    Some(len) => a.theta.as_slice()[..len] != b.theta.as_slice()[..len],
                }
            }
            _ => self.eval(x) != other.eval(x),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Hypothesis::Separation(_) => "separation",
            Hypothesis::Indicator(_) => "indicator",
            Hypothesis::Constant(_) => "constant",
            Hypothesis::Threshold(_) => "threshold",
            Hypothesis::Table(_) => "table",
        }
    }
}

pub fn separation_eval(h: &SeparationHypothesis, x: &Instance) -> Label {
    h.eval(x)
}

pub fn indicator_eval(h: &IndicatorHypothesis, x: &Instance) -> Label {
    h.eval(x)
}

pub fn constant_eval(h: &ConstantHypothesis, x: &Instance) -> Label {
    h.eval(x)
}

pub fn threshold_eval(h: &ThresholdHypothesis, x: &Instance) -> Label {
    h.eval(x)
}

/// Thresholds at every grid cell `1..=side^2`; cutoff 1 is constant one.
pub fn grid_thresholds(side: u32) -> Vec<Hypothesis> {
    (1..=side * side)
        .map(|index| Hypothesis::Threshold(ThresholdHypothesis {
            cutoff: Instance::Grid { index, side },
        }))
        .collect()
}

/// Constant hypotheses with values `1..=k`.
pub fn constants(k: u64) -> Vec<Hypothesis> {
    (1..=k)
        .map(|value| Hypothesis::Constant(ConstantHypothesis { value }))
        .collect()
}

/// `count` random bit tables over `cells` grid cells, pairwise distinct.
pub fn random_bit_tables(cells: usize, count: usize, rng: &mut crate::game::SimRng) -> Vec<Hypothesis> {
    use rand::Rng;
    assert!(
        cells >= 64 || count as u128 <= 1u128 << cells,
        "only {} distinct tables exist over {cells} cells",
        1u128 << cells.min(127)
    );
    let mut out: Vec<Hypothesis> = Vec::with_capacity(count);
    while out.len() < count {
        let h = Hypothesis::Table(
            TableHypothesis::bits((0..cells).map(|_| rng.gen::<bool>())).expect("cells > 0"),
        );
        if !out.contains(&h) {
            out.push(h);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(x: f64) -> Instance {
        Instance::unit(x).unwrap()
    }

    fn example() -> SeparationHypothesis {
        let seq = InstanceSequence::new(vec![u(0.25), u(0.75)]).unwrap();
        SeparationHypothesis::new(seq, "10".parse().unwrap()).unwrap()
    }

    #[test]
    fn separation_labels() {
        let h = example();
        let seq = h.seq().clone();
        assert_eq!(
            h.eval(&u(0.75)),
            Label::Anchored { seq: seq.clone(), payload: Payload::Prefix("10".parse().unwrap()) }
        );
        assert_eq!(h.eval(&u(0.5)), Label::Anchored { seq: seq.clone(), payload: Payload::Star });
        assert_eq!(
            h.eval(&u(0.25)),
            Label::Anchored { seq, payload: Payload::Prefix("1".parse().unwrap()) }
        );
    }

    #[test]
    fn theta_length_must_match() {
        let seq = InstanceSequence::new(vec![u(0.25)]).unwrap();
        assert!(SeparationHypothesis::new(seq, Bits::zeros(2)).is_err());
    }

    #[test]
    fn different_anchors_disagree_everywhere() {
        let a = Hypothesis::Separation(example());
        let seq = InstanceSequence::new(vec![u(0.75), u(0.25)]).unwrap();
        let b = Hypothesis::Separation(SeparationHypothesis::new(seq, "10".parse().unwrap()).unwrap());
        for x in [0.25, 0.5, 0.75, 0.9] {
            assert!(a.disagree(&b, &u(x)));
            assert_ne!(a.eval(&u(x)), b.eval(&u(x)));
        }
    }

    #[test]
    fn indicators() {
        let empty = IndicatorHypothesis::points([]);
        assert_eq!(empty.eval(&u(0.3)), Label::Bit(false));
        let single = IndicatorHypothesis::points([u(0.3)]);
        assert_eq!(single.eval(&u(0.3)), Label::Bit(true));
        let third = NonDyadicRational::new(1, 3).unwrap();
        let rational = IndicatorHypothesis::rationals([third]);
        assert_eq!(rational.eval(&u(1.0 / 3.0)), Label::Bit(false));
        assert_eq!(rational.eval_rational(&third), Label::Bit(true));
    }

    #[test]
    fn dyadic_rationals_are_rejected() {
        assert!(NonDyadicRational::new(1, 4).is_err());
        assert!(NonDyadicRational::new(3, 12).is_err());
        assert!(NonDyadicRational::new(2, 6).is_ok());
        assert_eq!(NonDyadicRational::new(2, 6).unwrap(), NonDyadicRational::new(1, 3).unwrap());
        assert!(serde_json::from_str::<NonDyadicRational>("[1,2]").is_err());
    }

    #[test]
    fn constants_and_thresholds() {
        let c = ConstantHypothesis { value: 7 };
        assert_eq!(c.eval(&u(0.1)), Label::Nat(7));
        assert_eq!(c.eval(&u(0.9)), Label::Nat(7));
        let t = ThresholdHypothesis { cutoff: u(0.5) };
        assert_eq!(t.eval(&u(0.75)), Label::Bit(true));
        assert_eq!(t.eval(&u(0.25)), Label::Bit(false));
        let lowest = ThresholdHypothesis { cutoff: Instance::Dyadic(0) };
        for x in [0.0, 0.3, 0.999] {
            assert_eq!(lowest.eval(&u(x)), Label::Bit(true));
        }
        let grid = grid_thresholds(2);
        assert_eq!(grid.len(), 4);
        assert_eq!(grid[0].eval(&Instance::Grid { index: 1, side: 2 }), Label::Bit(true));
    }

    #[test]
    fn tables_bin_unit_points() {
        let t = TableHypothesis::bits([false, true]).unwrap();
        assert_eq!(t.eval(&u(0.25)), Label::Bit(false));
        assert_eq!(t.eval(&u(0.75)), Label::Bit(true));
        assert_eq!(t.eval(&Instance::Grid { index: 2, side: 1 }), Label::Bit(true));
    }

    #[test]
    fn hypotheses_round_trip_through_json() {
        let hs = vec![
            Hypothesis::Separation(example()),
            Hypothesis::Indicator(IndicatorHypothesis::rationals([NonDyadicRational::new(1, 3).unwrap()])),
            Hypothesis::Constant(ConstantHypothesis { value: 3 }),
            Hypothesis::Threshold(ThresholdHypothesis { cutoff: u(0.5) }),
        ];
        let json = serde_json::to_string(&hs).unwrap();
        let back: Vec<Hypothesis> = serde_json::from_str(&json).unwrap();
        assert_eq!(hs, back);
    }
}
