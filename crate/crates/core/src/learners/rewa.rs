use rand::Rng;

use crate::classes::Hypothesis;
use crate::domain::{Instance, Label, LabeledStream};
use crate::error::{Error, Result};
use crate::game::{LabelDomain, Learner, RegretReport, RoundView, SimRng};

/// `sqrt(8 ln N / T)`; zero when there is nothing to learn.
pub fn tuned_eta(experts: usize, horizon: usize) -> f64 {
    if experts <= 1 || horizon == 0 {
        return 0.0;
    }
    (8.0 * (experts as f64).ln() / horizon as f64).sqrt()
}

/// Softmax of log-weights, shifted by their maximum.
fn probabilities(log_weights: &[f64]) -> Vec<f64> {
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = log_weights.iter().map(|w| (w - max).exp()).collect();
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    p
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// First index whose cumulative probability exceeds `u`.
fn select(cum: &[f64], u: f64) -> usize {
    cum.partition_point(|&c| c <= u).min(cum.len() - 1)
}

/// Exponential weights over a finite expert set, kept in the log domain.
#[derive(Debug, Clone)]
pub struct RewaState {
    experts: Vec<Hypothesis>,
    log_weights: Vec<f64>,
    eta: f64,
    horizon: usize,
    next_round: usize,
}

impl RewaState {
    pub fn new(experts: Vec<Hypothesis>, eta: f64, horizon: usize) -> Result<Self> {
        if experts.is_empty() {
            return Err(Error::Config("exponential weights needs at least one expert".into()));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::Config(format!("learning rate {eta} must be finite and nonnegative")));
        }
        let n = experts.len();
        Ok(RewaState {
            experts,
            log_weights: vec![0.0; n],
            eta,
            horizon,
            next_round: 0,
        })
    }

    /// Uses `η = sqrt(8 ln N / T)`.
    pub fn tuned(experts: Vec<Hypothesis>, horizon: usize) -> Result<Self> {
        let eta = tuned_eta(experts.len(), horizon);
        RewaState::new(experts, eta, horizon)
    }

    pub fn experts(&self) -> &[Hypothesis] {
        &self.experts
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Current selection probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        probabilities(&self.log_weights)
    }

    /// Samples an expert and returns its label at `x`; uses one uniform draw.
    pub fn predict(&self, x: &Instance, rng: &mut SimRng) -> Label {
        let cum = cumulative(&self.probabilities());
        let i = select(&cum, rng.gen::<f64>());
        self.experts[i].eval(x)
    }

    /// Charges `η` to every expert that mislabels `x`. Each round may be
    /// updated once, in order.
    pub fn update(&mut self, round: usize, x: &Instance, y: &Label) -> Result<()> {
        if round != self.next_round {
            return Err(Error::Protocol {
                round,
                reason: format!("weights expected an update for round {}", self.next_round),
            });
        }
        for (w, h) in self.log_weights.iter_mut().zip(&self.experts) {
            if h.eval(x) != *y {
                *w -= self.eta;
            }
        }
        self.next_round += 1;
        Ok(())
    }
}

pub fn rewa_predict(state: &RewaState, x: &Instance, rng: &mut SimRng) -> Label {
    state.predict(x, rng)
}

pub fn rewa_update(state: &mut RewaState, round: usize, x: &Instance, y: &Label) -> Result<()> {
    state.update(round, x, y)
}

/// [`RewaState`] as a game learner.
#[derive(Debug, Clone)]
pub struct RewaLearner {
    state: RewaState,
    name: String,
}

impl RewaLearner {
    pub fn new(state: RewaState) -> Self {
        let name = format!("rewa(N={})", state.experts.len());
        RewaLearner { state, name }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn state(&self) -> &RewaState {
        &self.state
    }
}

impl Learner for RewaLearner {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn label_domain(&self) -> LabelDomain {
        LabelDomain::Any
    }

    fn predict(&mut self, view: &RoundView<'_>, rng: &mut SimRng) -> Label {
        self.state.predict(view.instance(), rng)
    }

    fn observe(&mut self, round: usize, x: &Instance, y: &Label) {
        self.state
            .update(round, x, y)
            .expect("the game engine delivers each round exactly once");
    }
}

/// Exponential weights over a cover with `η = sqrt(8 ln N / T)`.
pub fn cover_learner(cover: Vec<Hypothesis>, horizon: usize) -> Result<RewaLearner> {
    Ok(RewaLearner::new(RewaState::tuned(cover, horizon)?).named("cover_rewa"))
}

/// Exponential weights evaluated once per stream.
///
/// Against an oblivious stream the selection probabilities do not depend on
/// the learner's draws, so they are computed once and each seed replays only
/// its uniform draws. [`RewaBatch::play`] reproduces [`crate::run_game`] with
/// a [`RewaLearner`] bit for bit.
#[derive(Debug, Clone)]
pub struct RewaBatch {
    experts: usize,
    cumulative: Vec<f64>,
    losses: Vec<u8>,
    expected: f64,
    expert_losses: Vec<u64>,
}

impl RewaBatch {
    pub fn new(experts: &[Hypothesis], eta: f64, stream: &LabeledStream) -> Result<Self> {
        let mut state = RewaState::new(experts.to_vec(), eta, stream.len())?;
        let n = experts.len();
        let mut cum_all = Vec::with_capacity(n * stream.len());
        let mut losses = Vec::with_capacity(n * stream.len());
        let mut expected = 0.0;
        let mut expert_losses = vec![0u64; n];
        for (round, p) in stream.pairs().iter().enumerate() {
            let probs = state.probabilities();
            let row: Vec<u8> = experts.iter().map(|h| u8::from(h.eval(&p.x) != p.y)).collect();
            expected += probs.iter().zip(&row).map(|(q, &l)| q * f64::from(l)).sum::<f64>();
            for (acc, &l) in expert_losses.iter_mut().zip(&row) {
                *acc += u64::from(l);
            }
            cum_all.extend(cumulative(&probs));
            losses.extend_from_slice(&row);
            state.update(round, &p.x, &p.y)?;
        }
        Ok(RewaBatch {
            experts: n,
            cumulative: cum_all,
            losses,
            expected,
            expert_losses,
        })
    }

    pub fn tuned(experts: &[Hypothesis], stream: &LabeledStream) -> Result<Self> {
        RewaBatch::new(experts, tuned_eta(experts.len(), stream.len()), stream)
    }

    pub fn horizon(&self) -> usize {
        self.cumulative.len() / self.experts
    }

    /// Exact expected cumulative loss over the learner's randomness.
    pub fn expected_loss(&self) -> f64 {
        self.expected
    }

    /// Cumulative loss of each expert.
    pub fn expert_losses(&self) -> &[u64] {
        &self.expert_losses
    }

    pub fn best_expert_loss(&self) -> u64 {
        *self.expert_losses.iter().min().expect("at least one expert")
    }

    /// One randomized play with the learner stream `rng`.
    pub fn play(&self, rng: &mut SimRng) -> RegretReport {
        let n = self.experts;
        let horizon = self.horizon();
        let mut per_round_losses = Vec::with_capacity(horizon);
        let mut learner_loss = 0u64;
        for t in 0..horizon {
            let i = select(&self.cumulative[t * n..(t + 1) * n], rng.gen::<f64>());
            let l = self.losses[t * n + i];
            learner_loss += u64::from(l);
            per_round_losses.push(l);
        }
        RegretReport {
            seed: 0,
            horizon,
            learner_loss,
            comparator_loss: None,
            regret: None,
            per_round_losses,
        }
    }

    /// Learner loss of one play, without the per-round record.
    pub fn play_loss(&self, rng: &mut SimRng) -> u64 {
        let n = self.experts;
        (0..self.horizon())
            .map(|t| {
                let i = select(&self.cumulative[t * n..(t + 1) * n], rng.gen::<f64>());
                u64::from(self.losses[t * n + i])
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{constants, ConstantHypothesis};
    use crate::game::run_game;
    use rand::SeedableRng;

    fn c(v: u64) -> Hypothesis {
        Hypothesis::Constant(ConstantHypothesis { value: v })
    }

    #[test]
    fn single_expert_always_speaks() {
        let s = RewaState::tuned(vec![c(4)], 10).unwrap();
        let mut rng = SimRng::seed_from_u64(0);
        for _ in 0..20 {
            assert_eq!(s.predict(&Instance::Dyadic(1), &mut rng), Label::Nat(4));
        }
    }

    #[test]
    fn one_step_update_with_unit_rate() {
        let mut s = RewaState::new(vec![c(1), c(2)], 1.0, 5).unwrap();
        s.update(0, &Instance::Dyadic(0), &Label::Nat(2)).unwrap();
        let p = s.probabilities();
        let e = (-1.0f64).exp();
        assert!((p[0] - e / (1.0 + e)).abs() < 1e-12);
        assert!((p[1] - 1.0 / (1.0 + e)).abs() < 1e-12);
        assert!((p[0] - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn uniform_losses_keep_probabilities() {
        let mut s = RewaState::new(constants(3), 0.7, 5).unwrap();
        let before = s.probabilities();
        s.update(0, &Instance::Dyadic(0), &Label::Nat(9)).unwrap();
        assert_eq!(before, s.probabilities());
        s.update(1, &Instance::Dyadic(0), &Label::Bit(true)).unwrap();
        assert_eq!(before, s.probabilities());
    }

    #[test]
    fn double_update_is_rejected() {
        let mut s = RewaState::tuned(constants(2), 5).unwrap();
        s.update(0, &Instance::Dyadic(0), &Label::Nat(1)).unwrap();
        assert!(matches!(
            s.update(0, &Instance::Dyadic(0), &Label::Nat(1)),
            Err(Error::Protocol { .. })
        ));
    }

    #[test]
    fn bound_value() {
        let b = (2.0 * 1024.0 * 64f64.ln()).sqrt();
        assert!((b - 92.3).abs() < 0.05);
        assert!((tuned_eta(64, 1024) - (8.0 * 64f64.ln() / 1024.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn batch_replays_the_game_exactly() {
        let experts = constants(5);
        let mut gen = SimRng::seed_from_u64(11);
        let stream = LabeledStream::from_pairs((0..200).map(|t| {
            let v = if t < 120 { 2 } else { gen.gen_range(1..=5) };
            (Instance::Dyadic(t), Label::Nat(v))
        }));
        let batch = RewaBatch::tuned(&experts, &stream).unwrap();
        for seed in 0..20 {
            let mut learner = cover_learner(experts.clone(), stream.len()).unwrap();
            let mut r1 = SimRng::seed_from_u64(seed);
            let mut r2 = SimRng::seed_from_u64(seed);
            let a = run_game(&stream, &mut learner, &mut r1).unwrap();
            let b = batch.play(&mut r2);
            assert_eq!(a, b);
            let mut r3 = SimRng::seed_from_u64(seed);
            assert_eq!(batch.play_loss(&mut r3), a.learner_loss);
        }
    }
}
