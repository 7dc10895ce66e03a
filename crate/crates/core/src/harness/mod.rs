//! Experiment runner: seed fan-out over (procedure, M) cells, CSV traces and JSON summaries.

pub mod config;
pub mod output;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{LimitedAdvice, OracleSelector, RoundRobin};
use crate::error::{Error, Result};
use crate::experts::Expert;
use crate::meta::{Engine, MLcb, Selector};
use crate::metrics::{checkpoints, RunTracker};

pub use config::{
    resolve, validate_config, Diagnostic, EnvironmentSpec, ExperimentConfig, Overrides, ProcedureKind, ResolvedConfig,
    TraceMode,
};

/// One CSV row. Expert ids are 0-based here and written 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub run_id: String,
    pub t: u64,
    pub procedure: ProcedureKind,
    pub budget: usize,
    pub advisor: Option<usize>,
    pub training_set: Vec<usize>,
    pub procedure_loss: Option<f64>,
    pub expected_loss: Option<f64>,
    pub cum_regret: Option<f64>,
    pub cum_pseudo_regret: Option<f64>,
    pub cum_topm_regret: Option<f64>,
    pub delta_budget: Option<f64>,
    /// Present on checkpoint rows only.
    pub train_counts: Option<Vec<u64>>,
    pub error: Option<String>,
}

/// End-of-run statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunFinal {
    pub rounds: u64,
    pub cum_regret: f64,
    pub cum_pseudo_regret: Option<f64>,
    pub cum_topm_regret: f64,
    pub delta_budget: f64,
    pub min_topm_increment: Option<f64>,
    pub coverage_violations: u64,
    pub coverage_checks: u64,
    pub audit_rounds: u64,
    pub audit_violations: Vec<String>,
    pub train_counts: Vec<u64>,
    pub advisor_counts: Vec<u64>,
    pub late_advisor_counts: Vec<u64>,
    /// 1-based.
    pub late_mode_advisor: Option<usize>,
    /// `None` when pseudo-regret is not tracked per round.
    pub pseudo_within_delta: Option<bool>,
    pub clipped_losses: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub procedure: ProcedureKind,
    pub budget: usize,
    pub seed: u64,
    pub rows: Vec<TraceRow>,
    /// Checkpoint snapshots feeding the summary, aligned with `checkpoints(horizon)`.
    pub checkpoints: Vec<CheckpointValues>,
    pub final_stats: Option<RunFinal>,
    pub error: Option<String>,
}

impl RunOutput {
    pub fn run_id(&self) -> String {
        run_id(self.procedure, self.budget, self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointValues {
    pub t: u64,
    pub cum_regret: f64,
    pub cum_pseudo_regret: Option<f64>,
    pub cum_topm_regret: f64,
    pub delta_budget: f64,
    pub expected_loss: Option<f64>,
}

pub fn run_id(procedure: ProcedureKind, budget: usize, seed: u64) -> String {
    format!("{}-M{budget}-s{seed}", procedure.name())
}

fn selector(cfg: &ResolvedConfig, procedure: ProcedureKind, seed: u64, experts: &[Expert], env: &dyn crate::domain::Environment) -> Result<Box<dyn Selector>> {
    let k = experts.len();
    Ok(match procedure {
        ProcedureKind::MLcb => Box::new(MLcb),
        ProcedureKind::RoundRobin => Box::new(RoundRobin::new(k)),
        ProcedureKind::LimitedAdvice => Box::new(LimitedAdvice::new(
            k,
            cfg.limited_advice.rate_scale,
            cfg.limited_advice.exploration,
            seed,
        )),
        ProcedureKind::Oracle => {
            let optima: Option<Vec<f64>> = experts.iter().map(|e| e.class_optimum(env)).collect();
            Box::new(OracleSelector::new(optima.as_deref())?)
        }
    })
}

/// Fresh engine for one run.
pub fn build_engine(cfg: &ResolvedConfig, procedure: ProcedureKind, budget: usize, seed: u64) -> Result<Engine> {
    let env = cfg.environment.build(seed)?;
    let experts = cfg
        .experts
        .iter()
        .enumerate()
        .map(|(k, spec)| Expert::new(k, spec.clone(), seed))
        .collect::<Result<Vec<_>>>()?;
    let sel = selector(cfg, procedure, seed, &experts, env.as_ref())?;
    Engine::new(experts, env, sel, cfg.confidence(), budget)
}

/// Runs `horizon` rounds of `engine`, logging rows at `checkpoints(horizon)` (or every round in full mode).
pub fn run_horizon(
    engine: &mut Engine,
    horizon: u64,
    mode: TraceMode,
    run_id: &str,
    procedure: ProcedureKind,
) -> (Vec<TraceRow>, Vec<CheckpointValues>, Result<RunFinal>) {
    let mut rows = Vec::new();
    let mut snaps = Vec::new();
    let mut tracker = match RunTracker::new(engine, horizon.max(1)) {
        Ok(t) => t,
        Err(e) => return (rows, snaps, Err(e)),
    };
    let marks: BTreeSet<u64> = checkpoints(horizon).into_iter().collect();
    let budget = engine.budget();
    for t in 1..=horizon {
        let step = engine.step().and_then(|d| tracker.record(&d, engine).map(|_| d));
        let d = match step {
            Ok(d) => d,
            Err(e) => {
                rows.push(TraceRow {
                    run_id: run_id.to_string(),
                    t,
                    procedure,
                    budget,
                    advisor: None,
                    training_set: Vec::new(),
                    procedure_loss: None,
                    expected_loss: None,
                    cum_regret: None,
                    cum_pseudo_regret: None,
                    cum_topm_regret: None,
                    delta_budget: None,
                    train_counts: None,
                    error: Some(e.to_string()),
                });
                return (rows, snaps, Err(e));
            }
        };
        let is_mark = marks.contains(&t);
        if !is_mark && mode == TraceMode::Compact {
            continue;
        }
        let (expected, counts) = if is_mark {
            let s = tracker.snapshot(&d, engine);
            snaps.push(CheckpointValues {
                t,
                cum_regret: s.cum_regret,
                cum_pseudo_regret: s.cum_pseudo_regret,
                cum_topm_regret: s.cum_topm_regret,
                delta_budget: s.delta_budget,
                expected_loss: s.expected_loss,
            });
            (s.expected_loss, Some(s.train_counts))
        } else {
            (d.expected_loss, None)
        };
        rows.push(TraceRow {
            run_id: run_id.to_string(),
            t,
            procedure,
            budget,
            advisor: Some(d.advisor),
            training_set: d.training_set.clone(),
            procedure_loss: Some(d.procedure_loss),
            expected_loss: expected,
            cum_regret: Some(tracker.cum_regret),
            cum_pseudo_regret: tracker.cum_pseudo_regret,
            cum_topm_regret: Some(tracker.cum_topm_regret),
            delta_budget: Some(tracker.delta_budget),
            train_counts: counts,
            error: None,
        });
    }
    let pseudo_within_delta = tracker.cum_pseudo_regret.map(|p| p <= tracker.delta_budget);
    let fin = RunFinal {
        rounds: horizon,
        cum_regret: tracker.cum_regret,
        cum_pseudo_regret: tracker.cum_pseudo_regret,
        cum_topm_regret: tracker.cum_topm_regret,
        delta_budget: tracker.delta_budget,
        min_topm_increment: tracker.min_topm_increment.is_finite().then_some(tracker.min_topm_increment),
        coverage_violations: tracker.coverage.violations,
        coverage_checks: tracker.coverage.checks,
        audit_rounds: tracker.audit.rounds,
        audit_violations: tracker.audit.violations.clone(),
        train_counts: engine.ledger().counts.clone(),
        advisor_counts: tracker.advisor_counts.clone(),
        late_advisor_counts: tracker.late_advisor_counts.clone(),
        late_mode_advisor: (horizon > 0).then(|| tracker.late_mode_advisor() + 1),
        pseudo_within_delta,
        clipped_losses: engine.clipped_losses(),
    };
    (rows, snaps, Ok(fin))
}

/// One (procedure, M, seed) run.
pub fn run_single(cfg: &ResolvedConfig, procedure: ProcedureKind, budget: usize, seed: u64) -> RunOutput {
    let id = run_id(procedure, budget, seed);
    let mut out = RunOutput {
        procedure,
        budget,
        seed,
        rows: Vec::new(),
        checkpoints: Vec::new(),
        final_stats: None,
        error: None,
    };
    let mut engine = match build_engine(cfg, procedure, budget, seed) {
        Ok(e) => e,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    let (rows, snaps, fin) = run_horizon(&mut engine, cfg.horizon, cfg.trace, &id, procedure);
    out.rows = rows;
    out.checkpoints = snaps;
    match fin {
        Ok(f) => out.final_stats = Some(f),
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}

/// All runs of an experiment, ordered by (procedure, M, seed) as listed in the config.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub runs: Vec<RunOutput>,
}

impl ExperimentResult {
    /// Runs of one cell.
    pub fn cell(&self, procedure: ProcedureKind, budget: usize) -> impl Iterator<Item = &RunOutput> {
        self.runs
            .iter()
            .filter(move |r| r.procedure == procedure && r.budget == budget)
    }

    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Every (procedure, M, seed) job in merge order.
pub fn jobs(cfg: &ResolvedConfig) -> Vec<(ProcedureKind, usize, u64)> {
    let mut out = Vec::new();
    for &p in &cfg.procedures {
        for &m in &cfg.budgets {
            for &s in &cfg.seeds {
                out.push((p, m, s));
            }
        }
    }
    out
}

/// Runs every job; `threads = Some(1)` is sequential, `None` uses all cores.
pub fn run_experiment(cfg: &ResolvedConfig, threads: Option<usize>) -> Result<ExperimentResult> {
    let jobs = jobs(cfg);
    if let EnvironmentSpec::Glm(p) = &cfg.environment {
        // Warm the shared oracle cache once instead of racing on it.
        crate::environments::glm_oracle_table(p)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let runs = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, m, s)| run_single(cfg, p, m, s))
            .collect::<Vec<_>>()
    });
    Ok(ExperimentResult { runs })
}
