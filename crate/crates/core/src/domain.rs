//! Instances, labels and labeled streams.
//!
//! The unit interval is represented by dyadic points `k / 2^64`; the finite
//! domain is the grid `{1, ..., m^2}`. Labels are discrete and compared by
//! full content, so anchored labels embed the whole instance sequence they
//! were generated from.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

/// A point of the instance space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", try_from = "InstanceRepr")]
pub enum Instance {
    /// `numerator / 2^64` in `[0, 1)`.
    Dyadic(u64),
    /// Cell `index` of the grid `{1, ..., side^2}`.
    Grid { index: u32, side: u32 },
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum InstanceRepr {
    Dyadic(u64),
    Grid { index: u32, side: u32 },
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = Error;

    fn try_from(repr: InstanceRepr) -> Result<Self> {
        match repr {
            InstanceRepr::Dyadic(k) => Ok(Instance::Dyadic(k)),
            InstanceRepr::Grid { index, side } => Instance::grid(index, side),
        }
    }
}

impl Instance {
    pub fn grid(index: u32, side: u32) -> Result<Self> {
        let cells = grid_cells(side)?;
        if index == 0 || u64::from(index) > cells {
            return Err(Error::Invalid(format!(
                "grid index {index} outside [1, {cells}]"
            )));
        }
        Ok(Instance::Grid { index, side })
    }

    /// The dyadic point nearest below `x`, for `x` in `[0, 1)`.
    pub fn unit(x: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Invalid(format!("{x} is not in [0, 1)")));
        }
        Ok(Instance::Dyadic((x * TWO_POW_64) as u64))
    }

    /// Position in `[0, 1)`; grid cell `i` of `n` maps to `(i - 1) / n`.
    pub fn to_f64(&self) -> f64 {
        match *self {
            Instance::Dyadic(k) => k as f64 / TWO_POW_64,
            Instance::Grid { index, side } => {
                f64::from(index - 1) / (f64::from(side) * f64::from(side))
            }
        }
    }

    pub fn same_domain(&self, other: &Instance) -> bool {
        match (self, other) {
            (Instance::Dyadic(_), Instance::Dyadic(_)) => true,
            (Instance::Grid { side: a, .. }, Instance::Grid { side: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Dyadic(k) => write!(f, "{k}/2^64"),
            Instance::Grid { index, side } => write!(f, "#{index}/{side}^2"),
        }
    }
}

pub(crate) fn grid_cells(side: u32) -> Result<u64> {
    if side == 0 || side > 4096 {
        return Err(Error::Invalid(format!("grid side {side} outside [1, 4096]")));
    }
    Ok(u64::from(side) * u64::from(side))
}

/// An ordered sequence of pairwise distinct instances.
///
/// Cloning shares the underlying storage; equality first checks identity.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "Vec<Instance>", into = "Vec<Instance>")]
pub struct InstanceSequence(Arc<[Instance]>);

impl InstanceSequence {
    pub fn new(items: Vec<Instance>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(items.len());
        for (i, x) in items.iter().enumerate() {
            if !seen.insert(*x) {
                return Err(Error::Invalid(format!(
                    "instance sequence repeats {x} at position {}",
                    i + 1
                )));
            }
        }
        Ok(InstanceSequence(items.into()))
    }

    pub fn empty() -> Self {
        InstanceSequence(Arc::from(Vec::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn items(&self) -> &[Instance] {
        &self.0
    }

    /// Zero-based position of `x`, if present.
    pub fn position(&self, x: &Instance) -> Option<usize> {
        self.0.iter().position(|z| z == x)
    }

    pub fn contains(&self, x: &Instance) -> bool {
        self.position(x).is_some()
    }
}

impl PartialEq for InstanceSequence {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for InstanceSequence {}

impl std::hash::Hash for InstanceSequence {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl fmt::Debug for InstanceSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl TryFrom<Vec<Instance>> for InstanceSequence {
    type Error = Error;

    fn try_from(items: Vec<Instance>) -> Result<Self> {
        InstanceSequence::new(items)
    }
}

impl From<InstanceSequence> for Vec<Instance> {
    fn from(seq: InstanceSequence) -> Self {
        seq.0.to_vec()
    }
}

/// A finite bit string, serialized as a string of `0` and `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Bits(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// The first `len` bits.
    pub fn prefix(&self, len: usize) -> Bits {
        Bits(self.0[..len].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Bits) -> bool {
        other.0.starts_with(&self.0)
    }

    /// This string extended with zeros to `len` bits.
    pub fn zero_extended(&self, len: usize) -> Bits {
        let mut bits = self.0.clone();
        bits.resize(len.max(bits.len()), false);
        Bits(bits)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Invalid(format!("bad bit {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Second component of an anchored label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Prefix(Bits),
    Star,
}

impl Payload {
    pub fn prefix_len(&self) -> Option<usize> {
        match self {
            Payload::Prefix(bits) => Some(bits.len()),
            Payload::Star => None,
        }
    }
}

/// A discrete label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", try_from = "LabelRepr")]
pub enum Label {
    Anchored { seq: InstanceSequence, payload: Payload },
    Bit(bool),
    Nat(u64),
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum LabelRepr {
    Anchored { seq: InstanceSequence, payload: Payload },
    Bit(bool),
    Nat(u64),
}

impl TryFrom<LabelRepr> for Label {
    type Error = Error;

    fn try_from(repr: LabelRepr) -> Result<Self> {
        match repr {
            LabelRepr::Anchored { seq, payload } => Label::anchored(seq, payload),
            LabelRepr::Bit(b) => Ok(Label::Bit(b)),
            LabelRepr::Nat(n) => Ok(Label::Nat(n)),
        }
    }
}

impl Label {
    pub fn anchored(seq: InstanceSequence, payload: Payload) -> Result<Self> {
        if let Payload::Prefix(bits) = &payload {
            if bits.len() > seq.len() {
                return Err(Error::Invalid(format!(
                    "prefix of length {} exceeds anchor of length {}",
                    bits.len(),
                    seq.len()
                )));
            }
        }
        Ok(Label::Anchored { seq, payload })
    }

    /// Canonical serialized form; equal labels produce equal bytes.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("labels always serialize")
    }

    pub fn anchor(&self) -> Option<&InstanceSequence> {
        match self {
            Label::Anchored { seq, .. } => Some(seq),
            _ => None,
        }
    }

    pub fn payload(&self) -> Option<&Payload> {
        match self {
            Label::Anchored { payload, .. } => Some(payload),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Anchored { seq, payload } => match payload {
                Payload::Prefix(bits) => write!(f, "(<{}>, {bits})", seq.len()),
                Payload::Star => write!(f, "(<{}>, *)", seq.len()),
            },
            Label::Bit(b) => write!(f, "{}", u8::from(*b)),
            Label::Nat(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub x: Instance,
    pub y: Label,
}

/// The oblivious adversary's full stream `(x_t, y_t)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabeledStream {
    pairs: Vec<LabeledPair>,
}

impl LabeledStream {
    pub fn new(pairs: Vec<LabeledPair>) -> Self {
        LabeledStream { pairs }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Instance, Label)>) -> Self {
        LabeledStream {
            pairs: pairs.into_iter().map(|(x, y)| LabeledPair { x, y }).collect(),
        }
    }

    /// Checks the stream length against the configured horizon.
    pub fn check_horizon(&self, horizon: usize) -> Result<()> {
        if self.pairs.len() != horizon {
            return Err(Error::Config(format!(
                "stream has {} rounds, horizon is {horizon}",
                self.pairs.len()
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[LabeledPair] {
        &self.pairs
    }

    pub fn instances(&self) -> impl Iterator<Item = &Instance> {
        self.pairs.iter().map(|p| &p.x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(xs: &[f64]) -> InstanceSequence {
        InstanceSequence::new(xs.iter().map(|&x| Instance::unit(x).unwrap()).collect()).unwrap()
    }

    #[test]
    fn grid_bounds() {
        assert!(Instance::grid(9, 3).is_ok());
        assert!(Instance::grid(0, 3).is_err());
        assert!(Instance::grid(10, 3).is_err());
        let bad: std::result::Result<Instance, _> =
            serde_json::from_str(r#"{"grid":{"index":10,"side":3}}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn dyadic_numerators_serialize_as_decimal_integers() {
        let x = Instance::Dyadic(u64::MAX);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"dyadic":18446744073709551615}"#);
        assert_eq!(serde_json::from_str::<Instance>(&s).unwrap(), x);
    }

    #[test]
    fn sequences_reject_repeats() {
        let x = Instance::unit(0.5).unwrap();
        assert!(InstanceSequence::new(vec![x, x]).is_err());
        assert!(serde_json::from_str::<InstanceSequence>(
            r#"[{"dyadic":3},{"dyadic":3}]"#
        )
        .is_err());
    }

    #[test]
    fn anchored_prefix_cannot_exceed_anchor() {
        let s = seq(&[0.25]);
        assert!(Label::anchored(s.clone(), Payload::Prefix(Bits::zeros(2))).is_err());
        assert!(Label::anchored(s, Payload::Prefix(Bits::zeros(1))).is_ok());
    }

    #[test]
    fn label_equality_compares_anchor_content() {
        let a = Label::anchored(seq(&[0.25, 0.75]), Payload::Star).unwrap();
        let b = Label::anchored(seq(&[0.25, 0.75]), Payload::Star).unwrap();
        let c = Label::anchored(seq(&[0.75, 0.25]), Payload::Star).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.canonical_bytes(), b.canonical_bytes());
        assert_ne!(a.canonical_bytes(), c.canonical_bytes());
    }

    #[test]
    fn bits_text_form() {
        let b: Bits = "0110".parse().unwrap();
        assert_eq!(b.to_string(), "0110");
        assert!(b.prefix(2).is_prefix_of(&b));
        assert_eq!(b.zero_extended(6).to_string(), "011000");
        assert!("012".parse::<Bits>().is_err());
    }

    #[test]
    fn stream_horizon_check() {
        let s = LabeledStream::from_pairs([(Instance::Dyadic(1), Label::Bit(true))]);
        assert!(s.check_horizon(1).is_ok());
        assert!(s.check_horizon(2).is_err());
    }
}
