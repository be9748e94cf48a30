//! A simulation laboratory for smoothed online classification.
//!
//! The crate is organised around the sequential game in [`game`]: an
//! oblivious adversary from [`adversaries`] fixes a labeled stream drawn
//! from a σ-smooth process ([`measure`]), a learner from [`learners`] plays
//! it, and the [`harness`] aggregates seeded trials into reports. The
//! [`covering`] module holds the metric-entropy toolkit and bound
//! evaluators, and [`compression`] the size-one compression scheme for the
//! separation class.

// Range checks are written as `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classes;
pub mod adversaries;
pub mod compression;
pub mod covering;
pub mod domain;
pub mod error;
pub mod game;
pub mod harness;
pub mod learners;
pub mod measure;
pub mod stats;

pub use classes::Hypothesis;
pub use domain::{Bits, Instance, InstanceSequence, Label, LabeledPair, LabeledStream, Payload};
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, ExperimentReport};
pub use game::{run_game, trial_rngs, Comparator, Learner, RegretReport, SimRng};
pub use measure::{BaseMeasure, ProcessFamily, SmoothDistribution, SmoothProcess};
