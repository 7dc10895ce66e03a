//! Comparator procedures sharing the engine's round structure.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::experts::inverse_cdf;
use crate::meta::{RoundView, Selection, Selector};
use crate::rng::{stream_rng, Stream, StreamRng};

/// `S_t = {((t−1)·M + j) mod K : j < M}`, advised by its first element.
pub fn round_robin_select(round: u64, experts: usize, budget: usize) -> Selection {
    let start = ((round - 1) as usize * budget) % experts;
    let training_set: Vec<usize> = (0..budget).map(|j| (start + j) % experts).collect();
    Selection {
        advisor: training_set[0],
        training_set,
    }
}

#[derive(Debug, Clone)]
pub struct RoundRobin {
    experts: usize,
}

impl RoundRobin {
    pub fn new(experts: usize) -> Self {
        RoundRobin { experts }
    }
}

impl Selector for RoundRobin {
    fn name(&self) -> &'static str {
        "round-robin"
    }

    fn select(&mut self, view: &RoundView<'_>) -> Result<Selection> {
        Ok(round_robin_select(view.round, self.experts, view.budget))
    }
}

/// Exponential weights with importance-weighted losses: the advisor is drawn from
/// the weights, `M − 1` further experts are observed uniformly at random.
#[derive(Debug, Clone)]
pub struct LimitedAdvice {
    log_weights: Vec<f64>,
    /// Multiplier on `η_t = √(M·ln K/(K·t))`.
    rate_scale: f64,
    /// Uniform exploration mixed into the sampling distribution.
    exploration: f64,
    probs: Vec<f64>,
    rng: StreamRng,
}

impl LimitedAdvice {
    pub fn new(experts: usize, rate_scale: f64, exploration: f64, seed: u64) -> Self {
        LimitedAdvice {
            log_weights: vec![0.0; experts],
            rate_scale,
            exploration,
            probs: vec![1.0 / experts as f64; experts],
            rng: stream_rng(seed, Stream::Procedure),
        }
    }

    /// Normalized weights.
    pub fn weights(&self) -> Vec<f64> {
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = self.log_weights.iter().map(|w| (w - max).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }

    /// Sampling distribution `(1 − γ)·w + γ/K`.
    pub fn distribution(&self) -> Result<Vec<f64>> {
        if self.log_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::WeightsCollapsed);
        }
        let k = self.log_weights.len() as f64;
        Ok(self
            .weights()
            .into_iter()
            .map(|w| (1.0 - self.exploration) * w + self.exploration / k)
            .collect())
    }

    /// `P(k ∈ S_t)` under the current distribution.
    fn observation_probability(&self, k: usize, budget: usize) -> f64 {
        let n = self.probs.len();
        if n == 1 {
            return 1.0;
        }
        let p = self.probs[k];
        p + (1.0 - p) * (budget - 1) as f64 / (n - 1) as f64
    }

    pub fn learning_rate(&self, round: u64, budget: usize) -> f64 {
        let k = self.log_weights.len() as f64;
        if k < 2.0 {
            return 0.0;
        }
        self.rate_scale * (budget as f64 * k.ln() / (k * round as f64)).sqrt()
    }
}

impl Selector for LimitedAdvice {
    fn name(&self) -> &'static str {
        "limited-advice"
    }

    fn select(&mut self, view: &RoundView<'_>) -> Result<Selection> {
        self.probs = self.distribution()?;
        let u: f64 = self.rng.random();
        let advisor = inverse_cdf(&self.probs, u);
        let k = self.probs.len();
        let others: Vec<usize> = (0..k).filter(|&j| j != advisor).collect();
        let mut training_set = vec![advisor];
        for i in sample(&mut self.rng, others.len(), view.budget - 1) {
            training_set.push(others[i]);
        }
        Ok(Selection {
            training_set,
            advisor,
        })
    }

    fn observe(&mut self, round: u64, selection: &Selection, losses: &[f64]) -> Result<()> {
        let budget = selection.training_set.len();
        let eta = self.learning_rate(round, budget);
        for (&k, &loss) in selection.training_set.iter().zip(losses) {
            let q = self.observation_probability(k, budget);
            self.log_weights[k] -= eta * loss / q;
        }
        let max = self.log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::WeightsCollapsed);
        }
        for w in &mut self.log_weights {
            *w -= max;
        }
        Ok(())
    }
}

/// Plays and trains `k* = argmin_k L_k*` every round (lowest index on ties).
#[derive(Debug, Clone)]
pub struct OracleSelector {
    best: usize,
}

impl OracleSelector {
    pub fn new(optima: Option<&[f64]>) -> Result<Self> {
        let optima = optima.ok_or(Error::OracleUnavailable)?;
        let best = optima
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
            .map(|(k, _)| k)
            .ok_or(Error::OracleUnavailable)?;
        Ok(OracleSelector { best })
    }

    pub fn best(&self) -> usize {
        self.best
    }
}

impl Selector for OracleSelector {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn select(&mut self, _view: &RoundView<'_>) -> Result<Selection> {
        Ok(Selection {
            training_set: vec![self.best],
            advisor: self.best,
        })
    }
}
