//! CSV traces, `summary.json` and `manifest.json`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{ExperimentResult, ProcedureKind, ResolvedConfig, RunFinal, RunOutput, TraceRow};
use crate::environments::glm_oracle_table;
use crate::error::Result;
use crate::experts::Expert;
use crate::harness::EnvironmentSpec;
use crate::metrics::{best_expert, checkpoints};

pub const SCHEMA_VERSION: u32 = 1;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Column order of every trace file.
pub const CSV_COLUMNS: [&str; 14] = [
    "run_id",
    "t",
    "procedure",
    "budget",
    "advisor",
    "training_set",
    "procedure_loss",
    "expected_loss",
    "cum_regret",
    "cum_pseudo_regret",
    "cum_topm_regret",
    "delta_budget",
    "train_counts",
    "error",
];

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn ids(v: &[usize]) -> String {
    v.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(";")
}

fn counts(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

fn record(row: &TraceRow) -> [String; 14] {
    [
        row.run_id.clone(),
        row.t.to_string(),
        row.procedure.name().to_string(),
        row.budget.to_string(),
        row.advisor.map(|k| (k + 1).to_string()).unwrap_or_default(),
        ids(&row.training_set),
        num(row.procedure_loss),
        num(row.expected_loss),
        num(row.cum_regret),
        num(row.cum_pseudo_regret),
        num(row.cum_topm_regret),
        num(row.delta_budget),
        row.train_counts.as_deref().map(counts).unwrap_or_default(),
        row.error.clone().unwrap_or_default(),
    ]
}

/// Writes the rows of `runs` (already in run order) as one CSV stream.
pub fn write_trace<W: Write>(out: W, runs: &[&RunOutput]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for run in runs {
        for row in &run.rows {
            w.write_record(record(row))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn trace_file_name(procedure: ProcedureKind, budget: usize) -> String {
    format!("trace_{}_M{budget}.csv", procedure.name())
}

#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub mean: Vec<Option<f64>>,
    pub std: Vec<Option<f64>>,
    /// `mean − 0.5·std`.
    pub lower: Vec<Option<f64>>,
    /// `mean + 0.5·std`.
    pub upper: Vec<Option<f64>>,
}

/// Mean and sample standard deviation of each column; `None` if any run lacks the value.
pub fn curve(columns: &[Vec<Option<f64>>]) -> Curve {
    let mut c = Curve {
        mean: Vec::new(),
        std: Vec::new(),
        lower: Vec::new(),
        upper: Vec::new(),
    };
    for col in columns {
        let vals: Option<Vec<f64>> = col.iter().copied().collect();
        let stats = vals.filter(|v| !v.is_empty()).map(|v| {
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let var = if v.len() > 1 {
                v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            (mean, var.sqrt())
        });
        c.mean.push(stats.map(|s| s.0));
        c.std.push(stats.map(|s| s.1));
        c.lower.push(stats.map(|s| s.0 - 0.5 * s.1));
        c.upper.push(stats.map(|s| s.0 + 0.5 * s.1));
    }
    c
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub run_id: String,
    pub seed: u64,
    pub error: Option<String>,
    #[serde(rename = "final")]
    pub final_stats: Option<RunFinal>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub procedure: ProcedureKind,
    pub budget: usize,
    pub trace_file: String,
    pub runs: usize,
    pub failed: usize,
    pub checkpoints: Vec<u64>,
    pub cum_regret: Curve,
    pub cum_pseudo_regret: Curve,
    pub cum_topm_regret: Curve,
    pub delta_budget: Curve,
    pub expected_loss: Curve,
    /// Mean advisor counts per expert over the whole run.
    pub selection_histogram: Vec<f64>,
    /// Mean advisor counts per expert over the final 10% of rounds.
    pub final_selection_histogram: Vec<f64>,
    /// Mean training counts per expert.
    pub budget_histogram: Vec<f64>,
    pub per_run: Vec<RunSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpertMeta {
    pub id: usize,
    pub kind: String,
    pub alpha: f64,
    pub beta: f64,
    pub optimum: Option<f64>,
    pub optimum_std_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub preset: String,
    pub horizon: u64,
    pub delta: f64,
    pub scheme: crate::confidence::Scheme,
    pub scale: f64,
    pub seeds: Vec<u64>,
    /// 1-based.
    pub best_expert: Option<usize>,
    pub experts: Vec<ExpertMeta>,
    pub notes: Vec<String>,
    pub cells: Vec<CellSummary>,
}

fn mean_counts<'a>(runs: impl Iterator<Item = &'a RunFinal>, pick: fn(&RunFinal) -> &[u64], k: usize) -> Vec<f64> {
    let mut sum = vec![0.0; k];
    let mut n = 0usize;
    for f in runs {
        for (s, c) in sum.iter_mut().zip(pick(f)) {
            *s += *c as f64;
        }
        n += 1;
    }
    if n > 0 {
        for s in &mut sum {
            *s /= n as f64;
        }
    }
    sum
}

fn cell_summary(cfg: &ResolvedConfig, runs: &[&RunOutput], procedure: ProcedureKind, budget: usize) -> CellSummary {
    let k = cfg.experts.len();
    let marks = checkpoints(cfg.horizon);
    let ok: Vec<&RunOutput> = runs.iter().copied().filter(|r| r.error.is_none()).collect();
    let column = |f: fn(&super::CheckpointValues) -> Option<f64>| -> Vec<Vec<Option<f64>>> {
        (0..marks.len())
            .map(|i| ok.iter().map(|r| r.checkpoints.get(i).and_then(f)).collect())
            .collect()
    };
    let finals = || ok.iter().filter_map(|r| r.final_stats.as_ref());
    CellSummary {
        procedure,
        budget,
        trace_file: super::output::trace_file_name(procedure, budget),
        runs: runs.len(),
        failed: runs.len() - ok.len(),
        cum_regret: curve(&column(|c| Some(c.cum_regret))),
        cum_pseudo_regret: curve(&column(|c| c.cum_pseudo_regret)),
        cum_topm_regret: curve(&column(|c| Some(c.cum_topm_regret))),
        delta_budget: curve(&column(|c| Some(c.delta_budget))),
        expected_loss: curve(&column(|c| c.expected_loss)),
        checkpoints: marks,
        selection_histogram: mean_counts(finals(), |f| &f.advisor_counts, k),
        final_selection_histogram: mean_counts(finals(), |f| &f.late_advisor_counts, k),
        budget_histogram: mean_counts(finals(), |f| &f.train_counts, k),
        per_run: runs
            .iter()
            .map(|r| RunSummary {
                run_id: r.run_id(),
                seed: r.seed,
                error: r.error.clone(),
                final_stats: r.final_stats.clone(),
            })
            .collect(),
    }
}

/// Expert metadata, including `L_k*` when the environment provides it.
pub fn expert_meta(cfg: &ResolvedConfig) -> Result<Vec<ExpertMeta>> {
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let env = cfg.environment.build(seed)?;
    let table = match &cfg.environment {
        EnvironmentSpec::Glm(p) => Some(glm_oracle_table(p)?),
        _ => None,
    };
    cfg.experts
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let e = Expert::new(k, spec.clone(), seed)?;
            Ok(ExpertMeta {
                id: k + 1,
                kind: match &spec.rule {
                    crate::experts::UpdateRule::Ogd { .. } => "ogd",
                    crate::experts::UpdateRule::Ucb1 { .. } => "ucb1",
                    crate::experts::UpdateRule::Static { .. } => "static",
                }
                .to_string(),
                alpha: spec.bound.alpha(),
                beta: spec.bound.beta(),
                optimum: e.class_optimum(env.as_ref()),
                optimum_std_error: table.as_ref().map(|t| t[k].std_error),
            })
        })
        .collect()
}

pub fn summarize(cfg: &ResolvedConfig, result: &ExperimentResult) -> Result<Summary> {
    let experts = expert_meta(cfg)?;
    let optima: Option<Vec<f64>> = experts.iter().map(|e| e.optimum).collect();
    let mut notes = vec![format!(
        "bandit advice rule: {}",
        match cfg.bandit_advice {
            crate::experts::BanditAdvice::FullVector => "full-vector",
            crate::experts::BanditAdvice::EmpiricalMarginal => "empirical-marginal",
        }
    )];
    if matches!(cfg.environment, EnvironmentSpec::Glm(_)) {
        notes.push("pseudo-regret is not tracked; expected_loss at checkpoints is a Monte-Carlo estimate".into());
    }
    let mut cells = Vec::new();
    for &p in &cfg.procedures {
        for &m in &cfg.budgets {
            let runs: Vec<&RunOutput> = result.cell(p, m).collect();
            cells.push(cell_summary(cfg, &runs, p, m));
        }
    }
    Ok(Summary {
        schema_version: SCHEMA_VERSION,
        preset: cfg.preset.clone(),
        horizon: cfg.horizon,
        delta: cfg.delta,
        scheme: cfg.scheme,
        scale: cfg.scale,
        seeds: cfg.seeds.clone(),
        best_expert: optima.map(|o| best_expert(&o) + 1),
        experts,
        notes,
        cells,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CellStatus {
    pub procedure: ProcedureKind,
    pub budget: usize,
    pub trace_file: String,
    pub runs: usize,
    pub failed: usize,
    pub errors: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub files: Vec<String>,
    pub cells: Vec<CellStatus>,
}

pub fn config_hash(cfg: &ResolvedConfig) -> Result<String> {
    let digest = Sha256::digest(cfg.canonical_json()?.as_bytes());
    Ok(hex::encode(digest))
}

pub fn manifest(cfg: &ResolvedConfig, result: &ExperimentResult) -> Result<Manifest> {
    let mut cells = Vec::new();
    let mut files = Vec::new();
    for &p in &cfg.procedures {
        for &m in &cfg.budgets {
            let runs: Vec<&RunOutput> = result.cell(p, m).collect();
            let errors: BTreeMap<String, String> = runs
                .iter()
                .filter_map(|r| r.error.clone().map(|e| (r.run_id(), e)))
                .collect();
            let name = trace_file_name(p, m);
            files.push(name.clone());
            cells.push(CellStatus {
                procedure: p,
                budget: m,
                trace_file: name,
                runs: runs.len(),
                failed: errors.len(),
                errors,
            });
        }
    }
    files.push("summary.json".into());
    Ok(Manifest {
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME").into(),
        tool_version: TOOL_VERSION.into(),
        config_hash: config_hash(cfg)?,
        config: serde_json::from_str(&cfg.canonical_json()?)?,
        files,
        cells,
    })
}

/// Writes every trace file, `summary.json` and `manifest.json` into `dir`; returns the paths written.
pub fn write_outputs(cfg: &ResolvedConfig, result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for &p in &cfg.procedures {
        for &m in &cfg.budgets {
            let runs: Vec<&RunOutput> = result.cell(p, m).collect();
            let path = dir.join(trace_file_name(p, m));
            write_trace(fs::File::create(&path)?, &runs)?;
            written.push(path);
        }
    }
    let summary = summarize(cfg, result)?;
    let path = dir.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
    written.push(path);
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest(cfg, result)?)? + "\n")?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_uses_sample_std() {
        let c = curve(&[vec![Some(1.0), Some(3.0)], vec![Some(2.0), None]]);
        assert_eq!(c.mean, vec![Some(2.0), None]);
        assert!((c.std[0].unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((c.upper[0].unwrap() - (2.0 + 0.5 * 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn ids_are_one_based() {
        assert_eq!(ids(&[0, 2]), "1;3");
        assert_eq!(counts(&[4, 0]), "4;0");
        assert_eq!(num(None), "");
        assert_eq!(num(Some(0.1)), "0.1");
    }
}
