//! Self-learning experts: state, append-only history, update rule, advice map
//! and safe-advice wrapper.
//!
//! Three families are provided:
//!
//! * **OGD** experts run projected online gradient descent over a Euclidean
//!   ball, either on a scalar squared loss or on a generalized linear model
//!   `x ↦ f(vᵀx)` with a fixed link `f`.
//! * **UCB1** experts are stochastic bandit algorithms over `d` base actions;
//!   their state is a (one-hot) distribution over those actions.
//! * **Static** experts never learn and always return the same advice.
//!
//! Safe advice aggregates the states seen at training time, either by
//! averaging them or by sampling one uniformly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Advice, Environment, LossMeter, Outcome, Payload};
use crate::error::{Error, Result};
use crate::link::{Link, PredictionLoss};
use crate::rng::{stream_rng, Stream, StreamRng};

/// Leading constant of the OGD regret bound `c·G·D·√n`.
pub const OGD_BOUND_CONSTANT: f64 = 1.5;

/// Default leading constant of the UCB1 anytime bound `c·√(d·n·ln(n·d/δ))`.
pub const UCB1_BOUND_CONSTANT: f64 = 8.0;

/// `1.5·G·D·√n`, the deterministic regret of projected OGD with `η_t = D/(G√t)`.
pub fn ogd_regret_bound(n: u64, lipschitz: f64, diameter: f64) -> f64 {
    OGD_BOUND_CONSTANT * lipschitz * diameter * (n as f64).sqrt()
}

/// An anytime high-probability bound `U_k(n, δ)` on an expert's prefix-hindsight regret.
#[derive(Debug, Clone, PartialEq)]
pub enum RegretBound {
    /// Experts that cannot incur internal regret (static advice).
    Zero,
    /// `constant·G·D·√n`; independent of `δ`.
    Ogd {
        lipschitz: f64,
        diameter: f64,
        constant: f64,
    },
    /// `constant·√(arms·n·ln(n·arms/δ))`.
    Ucb1Anytime { arms: usize, constant: f64 },
    /// `beta·n^alpha·ln(1/δ)`; a generic polynomial rate.
    Power { beta: f64, alpha: f64 },
}

impl RegretBound {
    pub fn evaluate(&self, n: u64, delta: f64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let nf = n as f64;
        match *self {
            RegretBound::Zero => 0.0,
            RegretBound::Ogd {
                lipschitz,
                diameter,
                constant,
            } => constant * lipschitz * diameter * nf.sqrt(),
            RegretBound::Ucb1Anytime { arms, constant } => {
                let d = arms as f64;
                constant * (d * nf * (nf * d / delta).ln().max(0.0)).sqrt()
            }
            RegretBound::Power { beta, alpha } => beta * nf.powf(alpha) * (1.0 / delta).ln().max(0.0),
        }
    }

    /// Growth exponent `α` in `U_k(n, δ) = Õ(n^α)`.
    pub fn alpha(&self) -> f64 {
        match *self {
            RegretBound::Zero => 0.0,
            RegretBound::Ogd { .. } | RegretBound::Ucb1Anytime { .. } => 0.5,
            RegretBound::Power { alpha, .. } => alpha,
        }
    }

    /// Leading constant `β_k`.
    pub fn beta(&self) -> f64 {
        match *self {
            RegretBound::Zero => 0.0,
            RegretBound::Ogd {
                lipschitz,
                diameter,
                constant,
            } => constant * lipschitz * diameter,
            RegretBound::Ucb1Anytime { arms, constant } => constant * (arms as f64).sqrt(),
            RegretBound::Power { beta, .. } => beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// `η_t = scale/√t`.
    InverseSqrt(f64),
}

impl StepSchedule {
    /// Step size of the `t`-th update (1-based).
    pub fn step(&self, t: u64) -> f64 {
        match *self {
            StepSchedule::Constant(eta) => eta,
            StepSchedule::InverseSqrt(scale) => scale / (t.max(1) as f64).sqrt(),
        }
    }
}

/// What an OGD expert predicts and how its gradient is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum OgdModel {
    /// Advice is the scalar state `w`; loss `(w − ξ)²`.
    Scalar,
    /// Advice is the parameter `v` of `x ↦ link(vᵀx)`.
    Glm { link: Link, loss: PredictionLoss },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Wrapper {
    /// Mean of the advice snapshots taken at training time.
    #[default]
    Average,
    /// One uniformly sampled advice snapshot.
    Sample,
}

/// Safe-advice variant for bandit experts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BanditAdvice {
    /// Average of the distribution vectors held at training time.
    #[default]
    FullVector,
    /// Empirical distribution of the actions actually played.
    EmpiricalMarginal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UpdateRule {
    Ogd {
        model: OgdModel,
        center: Vec<f64>,
        radius: f64,
        steps: StepSchedule,
    },
    Ucb1 { arms: usize },
    Static { advice: Advice },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpertSpec {
    pub rule: UpdateRule,
    pub wrapper: Wrapper,
    pub bandit_advice: BanditAdvice,
    pub bound: RegretBound,
    /// Initial state `w_k^1`; ignored for bandit and static experts.
    pub initial: Vec<f64>,
}

impl ExpertSpec {
    /// Scalar OGD on `[center − radius, center + radius]` with squared loss against `ξ ∈ [0, 1]`.
    pub fn scalar_ogd(center: f64, radius: f64, initial: f64) -> Self {
        // sup |w − ξ| over the interval and ξ ∈ [0, 1].
        let lipschitz = 2.0 * (center + radius).max(1.0 - center + radius);
        let diameter = 2.0 * radius;
        ExpertSpec {
            rule: UpdateRule::Ogd {
                model: OgdModel::Scalar,
                center: vec![center],
                radius,
                steps: StepSchedule::InverseSqrt(diameter / lipschitz),
            },
            wrapper: Wrapper::Average,
            bandit_advice: BanditAdvice::default(),
            bound: RegretBound::Ogd {
                lipschitz,
                diameter,
                constant: OGD_BOUND_CONSTANT,
            },
            initial: vec![initial],
        }
    }

    /// GLM expert fitting `v` in the centered ball of `radius` in `dim` dimensions.
    pub fn glm(link: Link, loss: PredictionLoss, dim: usize, radius: f64, bound_constant: f64) -> Self {
        let lipschitz = (loss.derivative_bound() * link.max_slope(radius)).max(1e-12);
        let diameter = 2.0 * radius;
        ExpertSpec {
            rule: UpdateRule::Ogd {
                model: OgdModel::Glm { link, loss },
                center: vec![0.0; dim],
                radius,
                steps: StepSchedule::InverseSqrt(diameter / lipschitz),
            },
            wrapper: Wrapper::Average,
            bandit_advice: BanditAdvice::default(),
            bound: RegretBound::Ogd {
                lipschitz,
                diameter,
                constant: bound_constant,
            },
            initial: vec![0.0; dim],
        }
    }

    pub fn ucb1(arms: usize, bound_constant: f64) -> Self {
        ExpertSpec {
            rule: UpdateRule::Ucb1 { arms },
            wrapper: Wrapper::Average,
            bandit_advice: BanditAdvice::FullVector,
            bound: RegretBound::Ucb1Anytime {
                arms,
                constant: bound_constant,
            },
            initial: Vec::new(),
        }
    }

    pub fn fixed(advice: Advice) -> Self {
        ExpertSpec {
            rule: UpdateRule::Static { advice },
            wrapper: Wrapper::Average,
            bandit_advice: BanditAdvice::default(),
            bound: RegretBound::Zero,
            initial: Vec::new(),
        }
    }

    pub fn with_wrapper(mut self, wrapper: Wrapper) -> Self {
        self.wrapper = wrapper;
        self
    }

    pub fn with_bandit_advice(mut self, rule: BanditAdvice) -> Self {
        self.bandit_advice = rule;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpertState {
    pub w: Vec<f64>,
    /// Number of updates applied so far.
    pub version: u64,
}

/// Append-only record of `(w_k^τ, ℓ_k^τ(w_k^τ))` over the expert's training rounds.
#[derive(Debug, Clone, Default)]
pub struct ExpertHistory {
    dim: usize,
    states: Vec<f64>,
    losses: Vec<f64>,
    advice_sum: Vec<f64>,
    action_counts: Vec<u64>,
}

impl ExpertHistory {
    fn new(dim: usize, actions: usize) -> Self {
        ExpertHistory {
            dim,
            states: Vec::new(),
            losses: Vec::new(),
            advice_sum: vec![0.0; dim],
            action_counts: vec![0; actions],
        }
    }

    fn push(&mut self, state: &[f64], loss: f64, action: Option<usize>) {
        debug_assert_eq!(state.len(), self.dim);
        self.states.extend_from_slice(state);
        self.losses.push(loss);
        for (acc, v) in self.advice_sum.iter_mut().zip(state) {
            *acc += v;
        }
        if let Some(a) = action {
            self.action_counts[a] += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.losses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.losses.is_empty()
    }

    /// State snapshot of the `i`-th training session.
    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn action_counts(&self) -> &[u64] {
        &self.action_counts
    }

    fn mean_state(&self) -> Vec<f64> {
        let n = self.len() as f64;
        self.advice_sum.iter().map(|s| s / n).collect()
    }
}

/// Loss incurred by an expert's current state on this round's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayedLoss {
    /// Advice actually evaluated (a one-hot action for bandit experts).
    pub advice: Advice,
    pub action: Option<usize>,
    pub loss: f64,
}

#[derive(Debug, Clone, Default)]
struct ArmStats {
    pulls: Vec<u64>,
    loss_sums: Vec<f64>,
}

impl ArmStats {
    /// UCB1 for losses: untried arms first, then `mean − √(2 ln t / n_a)`, lowest index on ties.
    fn next_arm(&self) -> usize {
        if let Some(a) = self.pulls.iter().position(|&n| n == 0) {
            return a;
        }
        let t: u64 = self.pulls.iter().sum();
        let log_t = (t as f64).ln();
        let mut best = 0;
        let mut best_index = f64::INFINITY;
        for (a, (&n, &s)) in self.pulls.iter().zip(&self.loss_sums).enumerate() {
            let n = n as f64;
            let index = s / n - (2.0 * log_t / n).sqrt();
            if index < best_index {
                best_index = index;
                best = a;
            }
        }
        best
    }
}

fn one_hot(len: usize, at: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[at] = 1.0;
    v
}

/// Index drawn from `probs` by inverse CDF at `u ∈ [0, 1)`.
pub(crate) fn inverse_cdf(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left mass below 1; fall back to the last action with positive mass.
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}

/// One projected gradient step `Π_ball(w − η·g)`.
pub fn ogd_step(w: &[f64], gradient: &[f64], eta: f64, center: &[f64], radius: f64) -> Vec<f64> {
    let mut next: Vec<f64> = w.iter().zip(gradient).map(|(w, g)| w - eta * g).collect();
    project_onto_ball(&mut next, center, radius);
    next
}

fn project_onto_ball(w: &mut [f64], center: &[f64], radius: f64) {
    let dist = w
        .iter()
        .zip(center)
        .map(|(a, c)| (a - c).powi(2))
        .sum::<f64>()
        .sqrt();
    if dist > radius {
        let s = radius / dist;
        for (a, c) in w.iter_mut().zip(center) {
            *a = c + (*a - c) * s;
        }
    }
}

fn ogd_gradient(model: &OgdModel, w: &[f64], outcome: &Outcome) -> Result<Vec<f64>> {
    match (model, &outcome.payload) {
        (OgdModel::Scalar, Payload::Scalar(xi)) => Ok(vec![2.0 * (w[0] - xi)]),
        (OgdModel::Glm { link, loss }, Payload::Labeled { x, label }) => {
            let z: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
            let pred = link.value(z);
            let scale = loss.derivative(pred, *label) * link.derivative(z);
            Ok(x.iter().map(|xi| scale * xi).collect())
        }
        (model, payload) => Err(Error::Internal(format!(
            "OGD model {model:?} cannot differentiate payload {payload:?}"
        ))),
    }
}

/// A self-learning expert owned by one run.
#[derive(Debug, Clone)]
pub struct Expert {
    id: usize,
    spec: ExpertSpec,
    state: ExpertState,
    history: ExpertHistory,
    arms: Option<ArmStats>,
    sampler: StreamRng,
    wrapper_rng: StreamRng,
}

impl Expert {
    pub fn new(id: usize, spec: ExpertSpec, master_seed: u64) -> Result<Self> {
        let (w, actions) = match &spec.rule {
            UpdateRule::Ogd { center, radius, .. } => {
                if spec.initial.len() != center.len() {
                    return Err(Error::Config(format!(
                        "expert {}: initial state has dimension {}, domain has {}",
                        id + 1,
                        spec.initial.len(),
                        center.len()
                    )));
                }
                if radius.is_nan() || *radius <= 0.0 {
                    return Err(Error::Config(format!("expert {}: OGD radius must be positive", id + 1)));
                }
                let mut w = spec.initial.clone();
                project_onto_ball(&mut w, center, *radius);
                (w, 0)
            }
            UpdateRule::Ucb1 { arms } => {
                if *arms == 0 {
                    return Err(Error::Config(format!("expert {}: bandit needs at least one arm", id + 1)));
                }
                (one_hot(*arms, 0), *arms)
            }
            UpdateRule::Static { advice } => (advice.components().to_vec(), 0),
        };
        if let UpdateRule::Ogd { steps, .. } = &spec.rule {
            let ok = match *steps {
                StepSchedule::Constant(e) | StepSchedule::InverseSqrt(e) => e > 0.0 && e.is_finite(),
            };
            if !ok {
                return Err(Error::Config(format!("expert {}: step sizes must be positive", id + 1)));
            }
        }
        let arms = match &spec.rule {
            UpdateRule::Ucb1 { arms } => Some(ArmStats {
                pulls: vec![0; *arms],
                loss_sums: vec![0.0; *arms],
            }),
            _ => None,
        };
        Ok(Expert {
            id,
            history: ExpertHistory::new(w.len(), actions),
            state: ExpertState { w, version: 0 },
            spec,
            arms,
            sampler: stream_rng(master_seed, Stream::ExpertSampling(id)),
            wrapper_rng: stream_rng(master_seed, Stream::Wrapper(id)),
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn spec(&self) -> &ExpertSpec {
        &self.spec
    }

    pub fn state(&self) -> &ExpertState {
        &self.state
    }

    pub fn history(&self) -> &ExpertHistory {
        &self.history
    }

    pub fn bound(&self) -> &RegretBound {
        &self.spec.bound
    }

    pub fn is_trained(&self) -> bool {
        !self.history.is_empty()
    }

    fn advice_of(&self, w: &[f64]) -> Advice {
        match &self.spec.rule {
            UpdateRule::Ogd {
                model: OgdModel::Scalar,
                ..
            } => Advice::Scalar(w[0]),
            UpdateRule::Ogd { .. } => Advice::Predictor {
                expert: self.id,
                params: w.to_vec(),
            },
            UpdateRule::Ucb1 { .. } => Advice::Mixed {
                expert: self.id,
                probs: w.to_vec(),
            },
            UpdateRule::Static { advice } => advice.clone(),
        }
    }

    /// `g_k(w_k^t)` for the current state.
    pub fn current_advice(&self) -> Advice {
        self.advice_of(&self.state.w)
    }

    /// `ℓ(g_k(w_k^t), ξ_t)`; bandit experts first sample `a_t ∼ w_k^t`.
    pub fn realized_loss(
        &mut self,
        env: &dyn Environment,
        outcome: &Outcome,
        meter: &mut LossMeter,
    ) -> Result<PlayedLoss> {
        let (advice, action) = match &self.spec.rule {
            UpdateRule::Ucb1 { arms } => {
                let u: f64 = self.sampler.random();
                let a = inverse_cdf(&self.state.w, u);
                (
                    Advice::Mixed {
                        expert: self.id,
                        probs: one_hot(*arms, a),
                    },
                    Some(a),
                )
            }
            _ => (self.current_advice(), None),
        };
        let loss = env.loss(&advice, outcome, meter)?;
        Ok(PlayedLoss { advice, action, loss })
    }

    /// Record `(w_k^t, ℓ_k^t)` in the history, then apply the update rule `w ← 𝒜_k(H)`.
    pub fn train(&mut self, played: &PlayedLoss, outcome: &Outcome) -> Result<()> {
        self.history.push(&self.state.w, played.loss, played.action);
        let t = self.state.version + 1;
        match &self.spec.rule {
            UpdateRule::Ogd {
                model,
                center,
                radius,
                steps,
            } => {
                let grad = ogd_gradient(model, &self.state.w, outcome)?;
                if grad.iter().any(|g| !g.is_finite()) {
                    return Err(Error::DivergedExpert { expert: self.id });
                }
                let next = ogd_step(&self.state.w, &grad, steps.step(t), center, *radius);
                if next.iter().any(|v| !v.is_finite()) {
                    return Err(Error::DivergedExpert { expert: self.id });
                }
                self.state.w = next;
            }
            UpdateRule::Ucb1 { arms } => {
                let stats = self.arms.as_mut().expect("bandit expert keeps arm statistics");
                let a = played
                    .action
                    .ok_or_else(|| Error::Internal("bandit update without an action".into()))?;
                stats.pulls[a] += 1;
                stats.loss_sums[a] += played.loss;
                self.state.w = one_hot(*arms, stats.next_arm());
            }
            UpdateRule::Static { .. } => {}
        }
        self.state.version = t;
        Ok(())
    }

    /// `υ_k(H_k)`: aggregate the trained states into a safe advice.
    pub fn safe_advice(&mut self) -> Result<Advice> {
        if self.history.is_empty() {
            return Err(Error::UntrainedExpert { expert: self.id });
        }
        if let (UpdateRule::Ucb1 { .. }, BanditAdvice::EmpiricalMarginal) = (&self.spec.rule, self.spec.bandit_advice) {
            let n = self.history.len() as f64;
            let probs = self.history.action_counts.iter().map(|&c| c as f64 / n).collect::<Vec<_>>();
            return Ok(self.advice_of(&probs));
        }
        match self.spec.wrapper {
            Wrapper::Average => Ok(self.advice_of(&self.history.mean_state())),
            Wrapper::Sample => {
                let i = self.wrapper_rng.random_range(0..self.history.len());
                Ok(self.advice_of(self.history.state(i)))
            }
        }
    }

    /// `L_k*` of this expert's hypothesis class in `env`.
    pub fn class_optimum(&self, env: &dyn Environment) -> Option<f64> {
        match &self.spec.rule {
            UpdateRule::Static { advice } => env.expected_loss(advice),
            _ => env.oracle_optimum(self.id),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{BernoulliBank, ScalarUniform};

    fn scalar_outcome(xi: f64) -> Outcome {
        Outcome {
            round: 1,
            payload: Payload::Scalar(xi),
        }
    }

    #[test]
    fn ogd_step_example() {
        // w − η·2(w − ξ) with w = 0.5, η = 0.1, ξ = 0.
        let grad = ogd_gradient(&OgdModel::Scalar, &[0.5], &scalar_outcome(0.0)).unwrap();
        assert_eq!(grad, vec![1.0]);
        let next = ogd_step(&[0.5], &grad, 0.1, &[0.5], 0.5);
        assert!((next[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn ogd_stationary_point_is_fixed() {
        let mut spec = ExpertSpec::scalar_ogd(0.5, 0.5, 0.3);
        if let UpdateRule::Ogd { steps, .. } = &mut spec.rule {
            *steps = StepSchedule::Constant(0.1);
        }
        let mut e = Expert::new(0, spec, 1).unwrap();
        let env = ScalarUniform::new(0.0, 1.0, 1);
        let out = scalar_outcome(0.3);
        let played = e.realized_loss(&env, &out, &mut LossMeter::default()).unwrap();
        assert_eq!(played.loss, 0.0);
        e.train(&played, &out).unwrap();
        assert_eq!(e.state().w, vec![0.3]);
        assert_eq!(e.state().version, 1);
    }

    #[test]
    fn static_expert_never_moves() {
        let mut e = Expert::new(0, ExpertSpec::fixed(Advice::Scalar(0.25)), 3).unwrap();
        let env = ScalarUniform::new(0.0, 1.0, 1);
        for xi in [0.0, 0.9, 0.4] {
            let out = scalar_outcome(xi);
            let p = e.realized_loss(&env, &out, &mut LossMeter::default()).unwrap();
            e.train(&p, &out).unwrap();
            assert_eq!(e.current_advice(), Advice::Scalar(0.25));
        }
    }

    #[test]
    fn realized_loss_examples() {
        let env = ScalarUniform::new(0.0, 1.0, 1);
        let mut meter = LossMeter::default();
        let mut e = Expert::new(0, ExpertSpec::fixed(Advice::Scalar(0.5)), 0).unwrap();
        assert_eq!(e.realized_loss(&env, &scalar_outcome(0.5), &mut meter).unwrap().loss, 0.0);
        let mut e = Expert::new(0, ExpertSpec::fixed(Advice::Scalar(0.2)), 0).unwrap();
        let l = e.realized_loss(&env, &scalar_outcome(1.0), &mut meter).unwrap().loss;
        assert!((l - 0.64).abs() < 1e-12);
    }

    #[test]
    fn degenerate_bandit_state_always_plays_its_arm() {
        let mut env = BernoulliBank::new(vec![vec![0.3, 0.9]], 5).unwrap();
        let mut e = Expert::new(0, ExpertSpec::ucb1(2, 8.0), 5).unwrap();
        assert_eq!(e.state().w, vec![1.0, 0.0]);
        for round in 1..=50 {
            let out = env.sample(round);
            let p = e.realized_loss(&env, &out, &mut LossMeter::default()).unwrap();
            assert_eq!(p.action, Some(0));
            let Payload::Bits { bits, .. } = &out.payload else { unreachable!() };
            assert_eq!(p.loss, if bits[0] { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn safe_advice_averages() {
        let mut h = ExpertHistory::new(1, 0);
        h.push(&[0.2], 0.0, None);
        h.push(&[0.4], 0.0, None);
        assert!((h.mean_state()[0] - 0.3).abs() < 1e-15);

        let mut h = ExpertHistory::new(1, 0);
        h.push(&[0.7], 0.0, None);
        assert_eq!(h.mean_state(), vec![0.7]);

        let mut h = ExpertHistory::new(2, 2);
        h.push(&[1.0, 0.0], 0.0, Some(0));
        h.push(&[0.0, 1.0], 0.0, Some(1));
        let m = h.mean_state();
        assert_eq!(m, vec![0.5, 0.5]);
        assert!(Advice::Mixed { expert: 0, probs: m }.is_on_simplex());
    }

    #[test]
    fn untrained_expert_has_no_safe_advice() {
        let mut e = Expert::new(2, ExpertSpec::ucb1(3, 8.0), 0).unwrap();
        let err = e.safe_advice().unwrap_err();
        assert!(err.to_string().contains("untrained expert"));
    }

    #[test]
    fn sampling_wrapper_returns_a_past_snapshot() {
        let spec = ExpertSpec::scalar_ogd(0.5, 0.5, 0.0).with_wrapper(Wrapper::Sample);
        let mut e = Expert::new(0, spec, 11).unwrap();
        let env = ScalarUniform::new(0.0, 1.0, 1);
        for xi in [1.0, 0.0, 0.6, 0.2] {
            let out = scalar_outcome(xi);
            let p = e.realized_loss(&env, &out, &mut LossMeter::default()).unwrap();
            e.train(&p, &out).unwrap();
        }
        let snapshots: Vec<f64> = (0..e.history().len()).map(|i| e.history().state(i)[0]).collect();
        for _ in 0..20 {
            let Advice::Scalar(v) = e.safe_advice().unwrap() else { panic!() };
            assert!(snapshots.contains(&v));
        }
    }

    #[test]
    fn ogd_bound_examples() {
        assert_eq!(ogd_regret_bound(0, 1.0, 1.0), 0.0);
        assert!((ogd_regret_bound(4, 1.0, 1.0) - 3.0).abs() < 1e-15);
        assert!((ogd_regret_bound(100, 2.0, 0.5) - 15.0).abs() < 1e-12);
    }

    #[test]
    fn diverging_gradient_is_reported() {
        let spec = ExpertSpec::glm(
            Link::Sigmoid { slope: 4.0, offset: 0.0 },
            PredictionLoss::Squared,
            2,
            1.0,
            1.5,
        );
        let mut e = Expert::new(4, spec, 0).unwrap();
        let out = Outcome {
            round: 1,
            payload: Payload::Labeled {
                x: vec![f64::NAN, 0.0],
                label: 0.5,
            },
        };
        let played = PlayedLoss {
            advice: e.current_advice(),
            action: None,
            loss: 0.1,
        };
        let err = e.train(&played, &out).unwrap_err();
        assert!(err.to_string().contains("diverged expert"));
    }

    #[test]
    fn ucb1_prefers_the_lower_loss_arm() {
        let mut env = BernoulliBank::new(vec![vec![0.8, 0.2]], 9).unwrap();
        let mut e = Expert::new(0, ExpertSpec::ucb1(2, 8.0), 9).unwrap();
        let mut meter = LossMeter::default();
        for round in 1..=2000 {
            let out = env.sample(round);
            let p = e.realized_loss(&env, &out, &mut meter).unwrap();
            e.train(&p, &out).unwrap();
        }
        let counts = e.history().action_counts();
        assert!(counts[1] > 5 * counts[0], "{counts:?}");
    }
}
