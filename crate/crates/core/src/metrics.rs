//! Regret accounting, the interval-width budget `Δ(T)`, coverage of the
//! confidence brackets and per-round budget audits.

use crate::confidence::{bounds, interval_width, Bounds, ConfidenceConfig};
use crate::error::{Error, Result};
use crate::experts::RegretBound;
use crate::meta::{Engine, RoundDecision};

/// Partial sums of `ℓ_t − L*`.
pub fn realized_regret(losses: &[f64], l_star: f64) -> Vec<f64> {
    losses
        .iter()
        .scan(0.0, |acc, l| {
            *acc += l - l_star;
            Some(*acc)
        })
        .collect()
}

/// Index of the smallest optimum, lowest index on ties.
pub fn best_expert(optima: &[f64]) -> usize {
    optima
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(k, _)| k)
        .expect("non-empty optimum table")
}

/// `L̄*`: mean of the `M` smallest optima.
pub fn top_m_mean(optima: &[f64], budget: usize) -> f64 {
    let mut sorted = optima.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[..budget].iter().sum::<f64>() / budget as f64
}

/// `(1/M)·Σ_{k∈S_t} L_k* − L̄*`.
pub fn topm_regret_increment(selected: &[usize], optima: Option<&[f64]>, budget: usize) -> Result<f64> {
    let optima = optima.ok_or(Error::MissingOracle(selected.first().copied().unwrap_or(0)))?;
    let chosen: f64 = selected.iter().map(|&k| optima[k]).sum();
    Ok(chosen / budget as f64 - top_m_mean(optima, budget))
}

/// Closed-form `Δ(T)` from final training counts under the standard scheme:
/// `Σ_{n≤n_{k*}} w_{k*}(n) + (1/M)·Σ_k Σ_{n≤n_k} w_k(n)`.
pub fn interval_budget(
    counts: &[u64],
    regret_bounds: &[RegretBound],
    cfg: &ConfidenceConfig,
    best: usize,
    budget: usize,
) -> Result<f64> {
    let mut total = 0.0;
    for (k, (&n_k, b)) in counts.iter().zip(regret_bounds).enumerate() {
        let mut sum = 0.0;
        for n in 1..=n_k {
            sum += interval_width(n, b, cfg)?;
        }
        total += sum / budget as f64;
        if k == best {
            total += sum;
        }
    }
    Ok(total)
}

/// Least-squares slope of `ln(value)` against `ln(t)` over `t ∈ [t1, t2]`.
pub fn loglog_slope(points: &[(f64, f64)], t1: f64, t2: f64) -> Result<f64> {
    if t2 < 4.0 * t1 {
        return Err(Error::Config(format!("slope window [{t1}, {t2}] must satisfy t2 >= 4·t1")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, v) in points.iter().filter(|(t, _)| (t1..=t2).contains(t)) {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::RegretNotPositive(t));
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    if xs.len() < 2 {
        return Err(Error::Config(format!("fewer than two points in [{t1}, {t2}]")));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Counts `(k, t)` pairs with `L_k* ∉ [LCB, UCB]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Coverage {
    pub violations: u64,
    pub checks: u64,
}

impl Coverage {
    pub fn check(&mut self, bounds: &[Option<Bounds>], optima: &[f64]) {
        for (b, l) in bounds.iter().zip(optima) {
            if let Some(b) = b {
                self.checks += 1;
                if !b.contains(*l) {
                    self.violations += 1;
                }
            }
        }
    }

    /// `true` when the run left the concentration event.
    pub fn run_failed(&self) -> bool {
        self.violations > 0
    }
}

/// `(violations, total_checks)` over a trace of per-round bounds.
pub fn coverage_stats(trace: &[Vec<Option<Bounds>>], optima: &[f64]) -> (u64, u64) {
    let mut c = Coverage::default();
    for b in trace {
        c.check(b, optima);
    }
    (c.violations, c.checks)
}

/// Per-round check of the training budget and of the counting identities.
#[derive(Debug, Clone)]
pub struct BudgetAudit {
    budget: usize,
    counts: Vec<u64>,
    selected: u64,
    pub rounds: u64,
    pub violations: Vec<String>,
}

impl BudgetAudit {
    pub fn new(experts: usize, budget: usize) -> Self {
        BudgetAudit {
            budget,
            counts: vec![0; experts],
            selected: 0,
            rounds: 0,
            violations: Vec::new(),
        }
    }

    /// `counts_after` are the training counts once round `d.round` is complete.
    pub fn audit(&mut self, d: &RoundDecision, counts_after: &[u64]) {
        self.rounds += 1;
        let t = d.round;
        if d.training_set.len() > self.budget {
            self.violations.push(format!("t={t}: |S| = {} > M", d.training_set.len()));
        }
        if !d.training_set.contains(&d.advisor) {
            self.violations.push(format!("t={t}: advisor {} not in S", d.advisor));
        }
        for (k, (before, after)) in self.counts.iter().zip(counts_after).enumerate() {
            let expected = before + d.training_set.contains(&k) as u64;
            if *after != expected {
                self.violations.push(format!("t={t}: n_{} went {before} -> {after}", k + 1));
            }
        }
        self.selected += d.training_set.len() as u64;
        let total: u64 = counts_after.iter().sum();
        if total != self.selected {
            self.violations.push(format!("t={t}: Σn = {total} but Σ|S| = {}", self.selected));
        }
        self.counts.copy_from_slice(counts_after);
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every round up to 1000, then about 20 log-spaced rounds per decade, then `horizon`.
pub fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=horizon.min(1000)).collect();
    let mut i = 1;
    loop {
        let t = (1000.0 * 10f64.powf(i as f64 / 20.0)).round() as u64;
        if t >= horizon {
            break;
        }
        if t > *out.last().unwrap_or(&0) {
            out.push(t);
        }
        i += 1;
    }
    if horizon > 1000 {
        out.push(horizon);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: u64,
    pub cum_regret: f64,
    pub cum_pseudo_regret: Option<f64>,
    pub cum_topm_regret: f64,
    pub delta_budget: f64,
    /// `L(u^t)` at this round, exact or estimated.
    pub expected_loss: Option<f64>,
    pub train_counts: Vec<u64>,
}

/// Incremental regret bookkeeping for one run.
#[derive(Debug, Clone)]
pub struct RunTracker {
    optima: Vec<f64>,
    best: usize,
    l_star: f64,
    l_bar: f64,
    budget: usize,
    late_from: u64,
    pub cum_regret: f64,
    pub cum_pseudo_regret: Option<f64>,
    pub cum_topm_regret: f64,
    pub min_topm_increment: f64,
    pub delta_budget: f64,
    pub coverage: Coverage,
    pub audit: BudgetAudit,
    pub advisor_counts: Vec<u64>,
    /// Advisor counts over the final 10% of rounds.
    pub late_advisor_counts: Vec<u64>,
    last_expected: Option<f64>,
}

impl RunTracker {
    pub fn new(engine: &Engine, horizon: u64) -> Result<Self> {
        let k = engine.experts().len();
        let optima = engine.class_optima().ok_or_else(|| {
            let missing = (0..k)
                .find(|&i| engine.experts()[i].class_optimum(engine.environment()).is_none())
                .unwrap_or(0);
            Error::MissingOracle(missing)
        })?;
        let best = best_expert(&optima);
        let budget = engine.budget();
        Ok(RunTracker {
            l_star: optima[best],
            l_bar: top_m_mean(&optima, budget),
            best,
            budget,
            late_from: horizon - horizon / 10,
            cum_regret: 0.0,
            cum_pseudo_regret: Some(0.0),
            cum_topm_regret: 0.0,
            min_topm_increment: f64::INFINITY,
            delta_budget: 0.0,
            coverage: Coverage::default(),
            audit: BudgetAudit::new(k, budget),
            advisor_counts: vec![0; k],
            late_advisor_counts: vec![0; k],
            last_expected: None,
            optima,
        })
    }

    pub fn optima(&self) -> &[f64] {
        &self.optima
    }

    pub fn best(&self) -> usize {
        self.best
    }

    pub fn l_star(&self) -> f64 {
        self.l_star
    }

    /// Fold in round `d`; `engine` must be in its post-round state.
    pub fn record(&mut self, d: &RoundDecision, engine: &Engine) -> Result<()> {
        self.coverage.check(engine.bounds(), &self.optima);
        self.audit.audit(d, &engine.ledger().counts);

        self.cum_regret += d.procedure_loss - self.l_star;
        self.cum_pseudo_regret = match (self.cum_pseudo_regret, d.expected_loss) {
            (Some(acc), Some(l)) => Some(acc + l - self.l_star),
            _ => None,
        };
        self.last_expected = d.expected_loss;

        let chosen: f64 = d.training_set.iter().map(|&k| self.optima[k]).sum();
        let inc = chosen / self.budget as f64 - self.l_bar;
        self.cum_topm_regret += inc;
        self.min_topm_increment = self.min_topm_increment.min(inc);

        let ledger = engine.ledger();
        for &k in &d.training_set {
            let n = ledger.counts[k];
            let l = ledger.running_loss(k).expect("trained this round");
            let w = bounds(l, n, engine.experts()[k].bound(), engine.confidence())?.width();
            self.delta_budget += w / self.budget as f64;
            if k == self.best {
                self.delta_budget += w;
            }
        }

        self.advisor_counts[d.advisor] += 1;
        if d.round > self.late_from {
            self.late_advisor_counts[d.advisor] += 1;
        }
        Ok(())
    }

    /// State after the latest recorded round; `L(u^t)` is estimated if not exact.
    pub fn snapshot(&self, d: &RoundDecision, engine: &Engine) -> Snapshot {
        Snapshot {
            t: d.round,
            cum_regret: self.cum_regret,
            cum_pseudo_regret: self.cum_pseudo_regret,
            cum_topm_regret: self.cum_topm_regret,
            delta_budget: self.delta_budget,
            expected_loss: self
                .last_expected
                .or_else(|| engine.environment().checkpoint_expected_loss(&d.advice)),
            train_counts: engine.ledger().counts.clone(),
        }
    }

    /// Most frequent advisor over the final 10% of rounds (lowest index on ties).
    pub fn late_mode_advisor(&self) -> usize {
        let max = *self.late_advisor_counts.iter().max().unwrap();
        self.late_advisor_counts.iter().position(|&c| c == max).unwrap()
    }
}
