//! The round engine and the M-LCB selection rule.
//!
//! Every procedure (M-LCB and the baselines) shares one round structure:
//!
//! 1. bounds are computed for all experts from their history through `t − 1`;
//! 2. the procedure's [`Selector`] picks a training set `S_t` and an advisor `i_t ∈ S_t`;
//! 3. the advisor's safe advice is played against a fresh outcome `ξ_t`;
//! 4. every `k ∈ S_t` incurs its own realized loss and updates; others are untouched.
//!
//! Untrained experts have no bounds. M-LCB treats their LCB as `−∞` and never
//! lets them advise while a trained member of `S_t` exists; an entirely
//! untrained `S_t` is advised by its lowest index using the initial state.

use std::cmp::Ordering;

use crate::confidence::{bounds, Bounds, ConfidenceConfig};
use crate::domain::{Advice, Environment, LossMeter};
use crate::error::{Error, Result};
use crate::experts::{Expert, RegretBound};

/// Per-expert training bookkeeping.
#[derive(Debug, Clone, Default)]
pub struct ExpertLedger {
    pub counts: Vec<u64>,
    pub loss_sums: Vec<f64>,
    /// Training rounds of every expert, kept only when requested.
    pub trained_rounds: Option<Vec<Vec<u64>>>,
}

impl ExpertLedger {
    pub fn new(experts: usize, keep_rounds: bool) -> Self {
        ExpertLedger {
            counts: vec![0; experts],
            loss_sums: vec![0.0; experts],
            trained_rounds: keep_rounds.then(|| vec![Vec::new(); experts]),
        }
    }

    pub fn running_loss(&self, k: usize) -> Option<f64> {
        (self.counts[k] > 0).then(|| self.loss_sums[k] / self.counts[k] as f64)
    }

    fn record(&mut self, k: usize, loss: f64, round: u64) {
        self.counts[k] += 1;
        self.loss_sums[k] += loss;
        if let Some(r) = &mut self.trained_rounds {
            r[k].push(round);
        }
    }
}

/// What a selector sees before choosing.
pub struct RoundView<'a> {
    pub round: u64,
    pub budget: usize,
    pub ledger: &'a ExpertLedger,
    /// `None` for untrained experts.
    pub bounds: &'a [Option<Bounds>],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub training_set: Vec<usize>,
    pub advisor: usize,
}

pub trait Selector: Send {
    fn name(&self) -> &'static str;

    fn select(&mut self, view: &RoundView<'_>) -> Result<Selection>;

    /// Training losses of `S_t`, in the order of `selection.training_set`.
    fn observe(&mut self, _round: u64, _selection: &Selection, _losses: &[f64]) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundDecision {
    pub round: u64,
    /// `S_t`, sorted ascending.
    pub training_set: Vec<usize>,
    pub advisor: usize,
    pub advice: Advice,
    pub procedure_loss: f64,
    /// `L(u^t)` when the environment can evaluate it exactly.
    pub expected_loss: Option<f64>,
    /// Realized training losses, aligned with `training_set`.
    pub expert_losses: Vec<f64>,
}

fn rank_key(a: &(usize, Option<f64>), b: &(usize, Option<f64>)) -> Ordering {
    match (a.1, b.1) {
        (None, None) => a.0.cmp(&b.0),
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => x.total_cmp(&y).then(a.0.cmp(&b.0)),
    }
}

/// Bottom-`M` experts by LCB (untrained first, lowest index on ties), in rank order.
pub fn select_training_set(lcbs: &[Option<f64>], budget: usize) -> Result<Vec<usize>> {
    if budget < 1 || budget > lcbs.len() {
        return Err(Error::Config(format!(
            "M must satisfy 1 ≤ M ≤ K (M = {budget}, K = {})",
            lcbs.len()
        )));
    }
    let mut ranked: Vec<(usize, Option<f64>)> = lcbs.iter().copied().enumerate().collect();
    ranked.sort_by(rank_key);
    Ok(ranked.into_iter().take(budget).map(|(k, _)| k).collect())
}

/// Member of `training_set` with the smallest UCB; untrained members only when no member is trained.
pub fn select_advisor(training_set: &[usize], ucbs: &[Option<f64>]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &k in training_set {
        if let Some(u) = ucbs[k] {
            match best {
                Some((b, bu)) if u > bu || (u == bu && k > b) => {}
                _ => best = Some((k, u)),
            }
        }
    }
    match best {
        Some((k, _)) => Ok(k),
        None => training_set
            .iter()
            .copied()
            .min()
            .ok_or_else(|| Error::Internal("empty training set".into())),
    }
}

/// The M-LCB rule.
#[derive(Debug, Clone, Default)]
pub struct MLcb;

impl Selector for MLcb {
    fn name(&self) -> &'static str {
        "m-lcb"
    }

    fn select(&mut self, view: &RoundView<'_>) -> Result<Selection> {
        let lcbs: Vec<Option<f64>> = view.bounds.iter().map(|b| b.map(|b| b.lcb)).collect();
        let ucbs: Vec<Option<f64>> = view.bounds.iter().map(|b| b.map(|b| b.ucb)).collect();
        let training_set = select_training_set(&lcbs, view.budget)?;
        let advisor = select_advisor(&training_set, &ucbs)?;
        Ok(Selection {
            training_set,
            advisor,
        })
    }
}

/// Runs one procedure on one environment with one expert bank.
pub struct Engine {
    experts: Vec<Expert>,
    env: Box<dyn Environment>,
    selector: Box<dyn Selector>,
    confidence: ConfidenceConfig,
    budget: usize,
    ledger: ExpertLedger,
    bounds: Vec<Option<Bounds>>,
    meter: LossMeter,
    round: u64,
}

impl Engine {
    pub fn new(
        experts: Vec<Expert>,
        env: Box<dyn Environment>,
        selector: Box<dyn Selector>,
        confidence: ConfidenceConfig,
        budget: usize,
    ) -> Result<Self> {
        let k = experts.len();
        if k == 0 {
            return Err(Error::Config("at least one expert is required".into()));
        }
        if budget < 1 || budget > k {
            return Err(Error::Config(format!("M must satisfy 1 ≤ M ≤ K (M = {budget}, K = {k})")));
        }
        if confidence.experts != k {
            return Err(Error::Config(format!(
                "confidence configured for {} experts, bank has {k}",
                confidence.experts
            )));
        }
        Ok(Engine {
            experts,
            env,
            selector,
            confidence,
            budget,
            ledger: ExpertLedger::new(k, false),
            bounds: vec![None; k],
            meter: LossMeter::default(),
            round: 0,
        })
    }

    pub fn keep_trained_rounds(mut self) -> Self {
        self.ledger.trained_rounds = Some(vec![Vec::new(); self.experts.len()]);
        self
    }

    pub fn procedure(&self) -> &'static str {
        self.selector.name()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn experts(&self) -> &[Expert] {
        &self.experts
    }

    pub fn environment(&self) -> &dyn Environment {
        self.env.as_ref()
    }

    pub fn ledger(&self) -> &ExpertLedger {
        &self.ledger
    }

    /// Bounds used by the most recent round (history through `t − 1`).
    pub fn bounds(&self) -> &[Option<Bounds>] {
        &self.bounds
    }

    pub fn confidence(&self) -> &ConfidenceConfig {
        &self.confidence
    }

    pub fn regret_bounds(&self) -> Vec<RegretBound> {
        self.experts.iter().map(|e| e.bound().clone()).collect()
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn clipped_losses(&self) -> u64 {
        self.meter.clipped()
    }

    /// `L_k*` for every expert, if the environment knows them all.
    pub fn class_optima(&self) -> Option<Vec<f64>> {
        self.experts.iter().map(|e| e.class_optimum(self.env.as_ref())).collect()
    }

    fn refresh_bounds(&mut self) -> Result<()> {
        for (k, e) in self.experts.iter().enumerate() {
            self.bounds[k] = match self.ledger.running_loss(k) {
                Some(l) => Some(bounds(l, self.ledger.counts[k], e.bound(), &self.confidence)?),
                None => None,
            };
        }
        Ok(())
    }

    fn check_selection(&self, s: &Selection) -> Result<()> {
        let k = self.experts.len();
        let mut seen = vec![false; k];
        for &i in &s.training_set {
            if i >= k || seen[i] {
                return Err(Error::Internal(format!("invalid training set {:?}", s.training_set)));
            }
            seen[i] = true;
        }
        if s.training_set.is_empty() || s.training_set.len() > self.budget {
            return Err(Error::Internal(format!(
                "training set of size {} violates budget {}",
                s.training_set.len(),
                self.budget
            )));
        }
        if !s.training_set.contains(&s.advisor) {
            return Err(Error::Internal(format!("advisor {} outside training set", s.advisor)));
        }
        Ok(())
    }

    /// Play round `t = self.round() + 1`.
    pub fn step(&mut self) -> Result<RoundDecision> {
        let round = self.round + 1;
        self.step_inner(round).map_err(|e| e.at_round(round))
    }

    fn step_inner(&mut self, round: u64) -> Result<RoundDecision> {
        self.refresh_bounds()?;
        let selection = self.selector.select(&RoundView {
            round,
            budget: self.budget,
            ledger: &self.ledger,
            bounds: &self.bounds,
        })?;
        self.check_selection(&selection)?;

        let advisor = &mut self.experts[selection.advisor];
        let advice = if advisor.is_trained() {
            advisor.safe_advice()?
        } else {
            advisor.current_advice()
        };
        let outcome = self.env.sample(round);
        let procedure_loss = self.env.loss(&advice, &outcome, &mut self.meter)?;
        let expected_loss = self.env.expected_loss(&advice);

        let mut losses = Vec::with_capacity(selection.training_set.len());
        for &k in &selection.training_set {
            let played = self.experts[k].realized_loss(self.env.as_ref(), &outcome, &mut self.meter)?;
            self.experts[k].train(&played, &outcome)?;
            self.ledger.record(k, played.loss, round);
            losses.push(played.loss);
        }
        self.selector.observe(round, &selection, &losses)?;
        self.round = round;

        let mut order: Vec<usize> = (0..selection.training_set.len()).collect();
        order.sort_by_key(|&i| selection.training_set[i]);
        Ok(RoundDecision {
            round,
            training_set: order.iter().map(|&i| selection.training_set[i]).collect(),
            advisor: selection.advisor,
            advice,
            procedure_loss,
            expected_loss,
            expert_losses: order.iter().map(|&i| losses[i]).collect(),
        })
    }
}
