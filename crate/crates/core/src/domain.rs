//! Shared vocabulary: outcomes, advice, bounded losses and the environment contract.
//!
//! The meta layer never looks inside an [`Outcome`] or an [`Advice`]; it only
//! consumes scalar losses in `[0, 1]`. Payload encodings are owned by the
//! environment that produces them.

use crate::error::{Error, Result};

/// One environment draw `ξ_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// 1-based round index.
    pub round: u64,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// A real-valued sample (scalar regression environments).
    Scalar(f64),
    /// Bernoulli draws for every base arm of every expert (row-major, expert-major),
    /// plus one uniform used to resolve a mixed advice into a single action.
    Bits {
        bits: Vec<bool>,
        arms_per_expert: Vec<usize>,
        play: f64,
    },
    /// A feature vector on the unit sphere with its label.
    Labeled { x: Vec<f64>, label: f64 },
}

/// A point of the decision space `U`, tagged by the kind of expert that produced it.
#[derive(Debug, Clone, PartialEq)]
pub enum Advice {
    Scalar(f64),
    /// Distribution over the base actions of `expert`.
    Mixed { expert: usize, probs: Vec<f64> },
    /// Parameters of `expert`'s predictor.
    Predictor { expert: usize, params: Vec<f64> },
}

impl Advice {
    /// Flat numeric view, used by averaging wrappers.
    pub fn components(&self) -> &[f64] {
        match self {
            Advice::Scalar(v) => std::slice::from_ref(v),
            Advice::Mixed { probs, .. } => probs,
            Advice::Predictor { params, .. } => params,
        }
    }

    /// Same tag, new components.
    pub fn with_components(&self, values: Vec<f64>) -> Advice {
        match self {
            Advice::Scalar(_) => Advice::Scalar(values[0]),
            Advice::Mixed { expert, .. } => Advice::Mixed {
                expert: *expert,
                probs: values,
            },
            Advice::Predictor { expert, .. } => Advice::Predictor {
                expert: *expert,
                params: values,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Advice::Scalar(_) => "scalar",
            Advice::Mixed { .. } => "mixed",
            Advice::Predictor { .. } => "predictor",
        }
    }

    /// `true` when a mixed advice is a probability vector (within 1e-9).
    pub fn is_on_simplex(&self) -> bool {
        match self {
            Advice::Mixed { probs, .. } => {
                probs.iter().all(|p| *p >= 0.0) && (probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9
            }
            _ => true,
        }
    }
}

/// Clamp a raw loss into `[0, 1]`.
pub fn clip_loss(raw: f64) -> Result<f64> {
    if !raw.is_finite() {
        return Err(Error::NonFiniteLoss(raw));
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Clips losses and counts how many needed clipping.
#[derive(Debug, Default, Clone)]
pub struct LossMeter {
    clipped: u64,
}

impl LossMeter {
    pub fn clip(&mut self, raw: f64) -> Result<f64> {
        let v = clip_loss(raw)?;
        if v != raw {
            self.clipped += 1;
        }
        Ok(v)
    }

    pub fn clipped(&self) -> u64 {
        self.clipped
    }
}

/// A stochastic i.i.d. environment.
///
/// Implementations own their random stream; two instances built from the same
/// seed must emit identical outcome sequences.
pub trait Environment: Send {
    fn name(&self) -> &'static str;

    /// Draw the outcome of round `round`.
    fn sample(&mut self, round: u64) -> Outcome;

    /// Unclipped loss of `advice` on `outcome`.
    fn raw_loss(&self, advice: &Advice, outcome: &Outcome) -> Result<f64>;

    /// Analytic (or precomputed) `L_k*` for expert `k` of this environment's expert bank.
    fn oracle_optimum(&self, expert: usize) -> Option<f64>;

    /// `L(u) = E_ξ ℓ(u, ξ)` when cheaply computable.
    fn expected_loss(&self, advice: &Advice) -> Option<f64>;

    /// `L(u)` where an estimate is affordable only at checkpoints.
    fn checkpoint_expected_loss(&self, advice: &Advice) -> Option<f64> {
        self.expected_loss(advice)
    }

    /// Loss clipped into `[0, 1]` through `meter`.
    fn loss(&self, advice: &Advice, outcome: &Outcome, meter: &mut LossMeter) -> Result<f64> {
        meter.clip(self.raw_loss(advice, outcome)?)
    }
}
