//! Online learners: randomized exponential weights and baselines.

mod baselines;
mod rewa;

pub use baselines::{MemorizeConstantLearner, PrefixGuessLearner, RandomGuessLearner};
pub use rewa::{
    cover_learner, rewa_predict, rewa_update, tuned_eta, RewaBatch, RewaLearner, RewaState,
};

/// `random_guess_learner(pool)`: uniform over a fixed label pool.
pub fn random_guess_learner(pool: Vec<crate::Label>) -> crate::Result<RandomGuessLearner> {
    RandomGuessLearner::new(pool)
}

/// `memorize_constant_learner()`: repeats the first revealed label.
pub fn memorize_constant_learner() -> MemorizeConstantLearner {
    MemorizeConstantLearner::default()
}
