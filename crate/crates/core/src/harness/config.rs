//! Declarative experiment configuration (TOML).
//!
//! ```toml
//! horizon = 20000
//! delta = 0.1
//! budgets = [1, 2, 3]
//! procedures = ["m-lcb", "round-robin", "limited-advice"]
//!
//! [environment]
//! preset = "glm-appendixA"
//! dim = 3
//!
//! [confidence]
//! scale = 0.3
//!
//! [seeds]
//! base = 0
//! count = 30
//!
//! [output]
//! dir = "runs/glm"
//! trace = "compact"
//! ```
//!
//! Expert ids are 1-based in configs and outputs.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::confidence::{ConfidenceConfig, Scheme};
use crate::domain::Environment;
use crate::environments::{perturbed_game_means, BernoulliBank, GlmEnv, GlmParams, ScalarUniform};
use crate::error::{Error, Result};
use crate::experts::{BanditAdvice, ExpertSpec, Wrapper, OGD_BOUND_CONSTANT, UCB1_BOUND_CONSTANT};
use crate::link::{link_family, Link, PredictionLoss};

pub const PRESETS: [&str; 4] = ["bernoulli-bank", "glm-appendixA", "perturbed-game", "scalar-uniform"];

pub const OUTPUT_ROOT_VAR: &str = "MLCB_OUTPUT_ROOT";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvironmentSection,
    #[serde(default)]
    pub experts: ExpertsSection,
    #[serde(default)]
    pub confidence: ConfidenceSection,
    #[serde(default)]
    pub limited_advice: LimitedAdviceSection,
    #[serde(default)]
    pub seeds: SeedsSection,
    #[serde(default = "default_budgets")]
    pub budgets: Vec<i64>,
    #[serde(default = "default_procedures")]
    pub procedures: Vec<String>,
    /// Defaults to 20000 for the GLM preset and 10000 otherwise.
    pub horizon: Option<i64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_budgets() -> Vec<i64> {
    vec![1]
}

fn default_procedures() -> Vec<String> {
    vec!["m-lcb".into()]
}

fn default_delta() -> f64 {
    0.1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvironmentSection {
    pub preset: String,
    #[serde(flatten)]
    pub params: toml::Table,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpertsSection {
    /// `ucb1`, `glm`, `scalar-ogd` or `static`; inferred from the preset when absent.
    pub kind: Option<String>,
    /// Leading constant of `U_k`.
    pub bound_constant: Option<f64>,
    pub wrapper: Option<Wrapper>,
    pub bandit_advice: Option<BanditAdvice>,
    /// Fixed scalar advice, one per expert (`static`).
    pub advice: Option<Vec<f64>>,
    /// Initial scalar states, one per expert (`scalar-ogd`).
    pub initial: Option<Vec<f64>>,
    /// Half-width of the scalar OGD domain around 0.5.
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfidenceSection {
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "one")]
    pub scale: f64,
}

impl Default for ConfidenceSection {
    fn default() -> Self {
        ConfidenceSection {
            scheme: Scheme::Standard,
            scale: 1.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitedAdviceSection {
    #[serde(default = "one")]
    pub rate_scale: f64,
    #[serde(default)]
    pub exploration: f64,
}

impl Default for LimitedAdviceSection {
    fn default() -> Self {
        LimitedAdviceSection {
            rate_scale: 1.0,
            exploration: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedsSection {
    #[serde(default)]
    pub base: u64,
    pub count: Option<i64>,
    pub list: Option<Vec<u64>>,
}

impl Default for SeedsSection {
    fn default() -> Self {
        SeedsSection {
            base: 0,
            count: Some(1),
            list: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceMode {
    /// Every round up to 1000, then log-spaced checkpoints.
    #[default]
    Compact,
    Full,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub trace: TraceMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcedureKind {
    MLcb,
    RoundRobin,
    LimitedAdvice,
    Oracle,
}

impl ProcedureKind {
    pub const ALL: [ProcedureKind; 4] = [
        ProcedureKind::MLcb,
        ProcedureKind::RoundRobin,
        ProcedureKind::LimitedAdvice,
        ProcedureKind::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProcedureKind::MLcb => "m-lcb",
            ProcedureKind::RoundRobin => "round-robin",
            ProcedureKind::LimitedAdvice => "limited-advice",
            ProcedureKind::Oracle => "oracle",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }
}

impl fmt::Display for ProcedureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One violated constraint, named by its config field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn diag(field: &str, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BankParams {
    means: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameParams {
    experts: usize,
    epsilon: f64,
    gap: f64,
    /// 0 selects the null game, otherwise the 1-based favoured expert.
    #[serde(default)]
    game: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GlmSection {
    #[serde(default = "three")]
    dim: usize,
    #[serde(default = "nine")]
    optimal: usize,
    #[serde(default)]
    noise: f64,
    #[serde(default)]
    loss: PredictionLoss,
    #[serde(default = "one")]
    radius: f64,
    #[serde(default = "oracle_samples")]
    oracle_samples: usize,
    #[serde(default = "checkpoint_samples")]
    checkpoint_samples: usize,
    links: Option<Vec<Link>>,
}

fn three() -> usize {
    3
}

fn nine() -> usize {
    9
}

fn oracle_samples() -> usize {
    1_000_000
}

fn checkpoint_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalarParams {
    #[serde(default)]
    low: f64,
    #[serde(default = "one")]
    high: f64,
}

/// A fully typed environment description.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvironmentSpec {
    Bernoulli { means: Vec<Vec<f64>> },
    Glm(GlmParams),
    Scalar { low: f64, high: f64 },
}

impl EnvironmentSpec {
    pub fn build(&self, seed: u64) -> Result<Box<dyn Environment>> {
        Ok(match self {
            EnvironmentSpec::Bernoulli { means } => Box::new(BernoulliBank::new(means.clone(), seed)?),
            EnvironmentSpec::Glm(p) => Box::new(GlmEnv::new(p.clone(), seed)?),
            EnvironmentSpec::Scalar { low, high } => Box::new(ScalarUniform::new(*low, *high, seed)),
        })
    }
}

fn parse_preset(env: &EnvironmentSection) -> std::result::Result<EnvironmentSpec, Diagnostic> {
    let field = "environment";
    let params = toml::Value::Table(env.params.clone());
    let bad = |e: toml::de::Error| diag(field, format!("{} parameters: {}", env.preset, e.message()));
    match env.preset.as_str() {
        "bernoulli-bank" => {
            let p: BankParams = params.try_into().map_err(bad)?;
            if p.means.is_empty() || p.means.iter().any(Vec::is_empty) {
                return Err(diag("environment.means", "every expert needs at least one arm"));
            }
            if p.means.iter().flatten().any(|m| !(0.0..=1.0).contains(m)) {
                return Err(diag("environment.means", "arm means must lie in [0, 1]"));
            }
            Ok(EnvironmentSpec::Bernoulli { means: p.means })
        }
        "perturbed-game" => {
            let p: GameParams = params.try_into().map_err(bad)?;
            if p.experts == 0 {
                return Err(diag("environment.experts", "K must be ≥ 1"));
            }
            let game = (p.game > 0).then(|| p.game - 1);
            let means = perturbed_game_means(game, p.experts, p.epsilon, p.gap)
                .map_err(|e| diag("environment", e.to_string().trim_start_matches("config error: ").to_string()))?;
            Ok(EnvironmentSpec::Bernoulli { means })
        }
        "glm-appendixA" => {
            let p: GlmSection = params.try_into().map_err(bad)?;
            let links = p.links.unwrap_or_else(link_family);
            if p.optimal == 0 || p.optimal > links.len() {
                return Err(diag(
                    "environment.optimal",
                    format!("optimal link must be in 1..={}", links.len()),
                ));
            }
            let glm = GlmParams {
                dim: p.dim,
                links,
                optimal: p.optimal - 1,
                noise: p.noise,
                loss: p.loss,
                radius: p.radius,
                oracle_samples: p.oracle_samples,
                checkpoint_samples: p.checkpoint_samples,
            };
            glm.validate()
                .map_err(|e| diag("environment", e.to_string().trim_start_matches("config error: ").to_string()))?;
            Ok(EnvironmentSpec::Glm(glm))
        }
        "scalar-uniform" => {
            let p: ScalarParams = params.try_into().map_err(bad)?;
            if !(0.0 <= p.low && p.low < p.high && p.high <= 1.0) {
                return Err(diag("environment", "scalar-uniform needs 0 <= low < high <= 1"));
            }
            Ok(EnvironmentSpec::Scalar { low: p.low, high: p.high })
        }
        other => Err(diag(
            "environment.preset",
            format!("unknown preset \"{other}\"; available presets: {}", PRESETS.join(", ")),
        )),
    }
}

fn expert_specs(env: &EnvironmentSpec, s: &ExpertsSection) -> std::result::Result<Vec<ExpertSpec>, Diagnostic> {
    let default_kind = match env {
        EnvironmentSpec::Bernoulli { .. } => "ucb1",
        EnvironmentSpec::Glm(_) => "glm",
        EnvironmentSpec::Scalar { .. } => {
            if s.advice.is_some() {
                "static"
            } else {
                "scalar-ogd"
            }
        }
    };
    let kind = s.kind.as_deref().unwrap_or(default_kind);
    let wrap = |spec: ExpertSpec| {
        let spec = spec.with_wrapper(s.wrapper.unwrap_or_default());
        spec.with_bandit_advice(s.bandit_advice.unwrap_or_default())
    };
    let specs = match (kind, env) {
        ("ucb1", EnvironmentSpec::Bernoulli { means }) => {
            let c = s.bound_constant.unwrap_or(UCB1_BOUND_CONSTANT);
            means.iter().map(|row| wrap(ExpertSpec::ucb1(row.len(), c))).collect()
        }
        ("glm", EnvironmentSpec::Glm(p)) => {
            let c = s.bound_constant.unwrap_or(OGD_BOUND_CONSTANT);
            p.links
                .iter()
                .map(|l| wrap(ExpertSpec::glm(*l, p.loss, p.dim, p.radius, c)))
                .collect()
        }
        ("scalar-ogd", EnvironmentSpec::Scalar { .. }) => {
            let init = s
                .initial
                .clone()
                .ok_or_else(|| diag("experts.initial", "scalar-ogd experts need one initial state each"))?;
            let radius = s.radius.unwrap_or(0.5);
            if !(radius > 0.0 && radius <= 0.5) {
                return Err(diag("experts.radius", "radius must lie in (0, 0.5]"));
            }
            init.iter()
                .map(|w| {
                    let mut spec = ExpertSpec::scalar_ogd(0.5, radius, *w);
                    if let (Some(c), crate::experts::RegretBound::Ogd { constant, .. }) = (s.bound_constant, &mut spec.bound) {
                        *constant = c;
                    }
                    wrap(spec)
                })
                .collect()
        }
        ("static", EnvironmentSpec::Scalar { .. }) => {
            let advice = s
                .advice
                .clone()
                .ok_or_else(|| diag("experts.advice", "static experts need one advice value each"))?;
            advice
                .iter()
                .map(|u| wrap(ExpertSpec::fixed(crate::domain::Advice::Scalar(*u))))
                .collect()
        }
        (k, _) => {
            return Err(diag(
                "experts.kind",
                format!("expert kind \"{k}\" is not available for this environment (expected \"{default_kind}\")"),
            ))
        }
    };
    Ok(specs)
}

/// CLI overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed_count: Option<i64>,
    pub budgets: Option<Vec<i64>>,
    pub procedure: Option<String>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(n) = o.seed_count {
            self.seeds.count = Some(n);
            self.seeds.list = None;
        }
        if let Some(b) = &o.budgets {
            self.budgets = b.clone();
        }
        if let Some(p) = &o.procedure {
            self.procedures = vec![p.clone()];
        }
        if let Some(d) = &o.out {
            self.output.dir = Some(d.clone());
        }
    }

    pub fn horizon_or_default(&self) -> i64 {
        self.horizon
            .unwrap_or(if self.environment.preset == "glm-appendixA" { 20_000 } else { 10_000 })
    }
}

/// Every constraint violation in `config`; empty iff the config resolves.
pub fn validate_config(config: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let env = match parse_preset(&config.environment) {
        Ok(env) => Some(env),
        Err(d) => {
            out.push(d);
            None
        }
    };
    let experts = match &env {
        Some(env) => match expert_specs(env, &config.experts) {
            Ok(specs) => Some(specs.len()),
            Err(d) => {
                out.push(d);
                None
            }
        },
        None => None,
    };
    if config.budgets.is_empty() {
        out.push(diag("budgets", "at least one budget M is required"));
    }
    for &m in &config.budgets {
        let ok = m >= 1 && experts.is_none_or(|k| m as usize <= k);
        if !ok {
            let k = experts.map_or("K".to_string(), |k| k.to_string());
            out.push(diag("budgets", format!("M must satisfy 1 ≤ M ≤ K (M = {m}, K = {k})")));
        }
    }
    if !(config.delta > 0.0 && config.delta < 1.0) {
        out.push(diag("delta", format!("delta in (0,1) (got {})", config.delta)));
    }
    if config.horizon_or_default() < 1 {
        out.push(diag("horizon", "T must be ≥ 1"));
    }
    if config.procedures.is_empty() {
        out.push(diag("procedures", "at least one procedure is required"));
    }
    for (i, p) in config.procedures.iter().enumerate() {
        if p == "ed2rb" {
            out.push(diag("procedures", "procedure \"ed2rb\" is reserved and not implemented"));
        } else if ProcedureKind::parse(p).is_none() {
            let names: Vec<&str> = ProcedureKind::ALL.iter().map(|p| p.name()).collect();
            out.push(diag(
                "procedures",
                format!("unknown procedure \"{p}\"; available: {}", names.join(", ")),
            ));
        } else if config.procedures[..i].contains(p) {
            out.push(diag("procedures", format!("procedure \"{p}\" listed twice")));
        }
    }
    match (&config.seeds.count, &config.seeds.list) {
        (Some(_), Some(_)) => out.push(diag("seeds", "give either count or list, not both")),
        (Some(n), None) if *n < 1 => out.push(diag("seeds.count", "seed count must be ≥ 1")),
        (None, Some(l)) if l.is_empty() => out.push(diag("seeds.list", "seed list is empty")),
        (None, None) => out.push(diag("seeds", "give a seed count or a seed list")),
        _ => {}
    }
    if !(config.confidence.scale >= 0.0 && config.confidence.scale.is_finite()) {
        out.push(diag("confidence.scale", "scale must be finite and ≥ 0"));
    }
    if !(0.0..=1.0).contains(&config.limited_advice.exploration) {
        out.push(diag("limited_advice.exploration", "exploration must lie in [0, 1]"));
    }
    if !(config.limited_advice.rate_scale > 0.0 && config.limited_advice.rate_scale.is_finite()) {
        out.push(diag("limited_advice.rate_scale", "rate scale must be finite and > 0"));
    }
    out
}

/// A validated, fully typed configuration.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub preset: String,
    pub environment: EnvironmentSpec,
    pub experts: Vec<ExpertSpec>,
    pub scheme: Scheme,
    pub scale: f64,
    pub delta: f64,
    pub budgets: Vec<usize>,
    pub procedures: Vec<ProcedureKind>,
    pub seeds: Vec<u64>,
    pub horizon: u64,
    pub limited_advice: LimitedAdviceSection,
    pub trace: TraceMode,
    pub output_dir: PathBuf,
    pub bandit_advice: BanditAdvice,
    pub source: ExperimentConfig,
}

impl ResolvedConfig {
    pub fn confidence(&self) -> ConfidenceConfig {
        ConfidenceConfig::new(self.delta, self.experts.len())
            .with_scheme(self.scheme)
            .with_scale(self.scale)
    }

    /// Effective configuration as canonical JSON (hashed into the manifest).
    pub fn canonical_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.source)?)
    }
}

fn output_dir(config: &ExperimentConfig, stem: &str) -> PathBuf {
    let root = std::env::var_os(OUTPUT_ROOT_VAR).map(PathBuf::from);
    match (&config.output.dir, root) {
        (Some(d), Some(root)) if d.is_relative() => root.join(d),
        (Some(d), _) => d.clone(),
        (None, Some(root)) => root.join(stem),
        (None, None) => PathBuf::from("runs").join(stem),
    }
}

/// Validate and resolve; `stem` names the default output directory.
pub fn resolve(config: &ExperimentConfig, stem: &str) -> std::result::Result<ResolvedConfig, Vec<Diagnostic>> {
    let diags = validate_config(config);
    if !diags.is_empty() {
        return Err(diags);
    }
    let environment = parse_preset(&config.environment).map_err(|d| vec![d])?;
    let experts = expert_specs(&environment, &config.experts).map_err(|d| vec![d])?;
    let seeds = match (&config.seeds.count, &config.seeds.list) {
        (_, Some(list)) => list.clone(),
        (Some(n), None) => (0..*n as u64).map(|i| config.seeds.base + i).collect(),
        (None, None) => unreachable!("validated"),
    };
    Ok(ResolvedConfig {
        preset: config.environment.preset.clone(),
        environment,
        experts,
        scheme: config.confidence.scheme,
        scale: config.confidence.scale,
        delta: config.delta,
        budgets: config.budgets.iter().map(|&m| m as usize).collect(),
        procedures: config.procedures.iter().filter_map(|p| ProcedureKind::parse(p)).collect(),
        seeds,
        horizon: config.horizon_or_default() as u64,
        limited_advice: config.limited_advice.clone(),
        trace: config.output.trace,
        output_dir: output_dir(config, stem),
        bandit_advice: config.experts.bandit_advice.unwrap_or_default(),
        source: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BANK: &str = r#"
        horizon = 100
        budgets = [1, 2]
        [environment]
        preset = "bernoulli-bank"
        means = [[0.2, 0.5], [0.6, 0.7], [0.4, 0.9]]
    "#;

    fn messages(text: &str) -> Vec<String> {
        validate_config(&ExperimentConfig::from_toml(text).unwrap())
            .iter()
            .map(|d| d.to_string())
            .collect()
    }

    #[test]
    fn valid_config_resolves() {
        let cfg = ExperimentConfig::from_toml(BANK).unwrap();
        assert!(validate_config(&cfg).is_empty());
        let r = resolve(&cfg, "bank").unwrap();
        assert_eq!(r.experts.len(), 3);
        assert_eq!(r.budgets, vec![1, 2]);
        assert_eq!(r.seeds, vec![0]);
        assert_eq!(r.procedures, vec![ProcedureKind::MLcb]);
    }

    #[test]
    fn budget_and_delta_diagnostics() {
        let m = messages(&BANK.replace("budgets = [1, 2]", "budgets = [0]"));
        assert!(m.iter().any(|s| s.contains("M must satisfy 1 ≤ M ≤ K")), "{m:?}");
        let m = messages(&BANK.replace("budgets = [1, 2]", "budgets = [4]"));
        assert!(m.iter().any(|s| s.contains("M must satisfy 1 ≤ M ≤ K")), "{m:?}");
        let m = messages(&BANK.replace("horizon = 100", "horizon = 100\ndelta = 1.5"));
        assert!(m.iter().any(|s| s.contains("delta in (0,1)")), "{m:?}");
    }

    #[test]
    fn unknown_preset_lists_the_available_ones() {
        let m = messages(&BANK.replace("bernoulli-bank", "gaussian-bank"));
        assert_eq!(m.len(), 1, "{m:?}");
        for p in PRESETS {
            assert!(m[0].contains(p));
        }
    }

    #[test]
    fn unknown_procedure_and_reserved_name() {
        let m = messages(&BANK.replace("horizon = 100", "horizon = 100\nprocedures = [\"m-lcb\", \"ed2rb\", \"exp4\"]"));
        assert!(m.iter().any(|s| s.contains("reserved")));
        assert!(m.iter().any(|s| s.contains("unknown procedure \"exp4\"")));
    }

    #[test]
    fn preset_parameters_are_checked() {
        let m = messages(&BANK.replace("means", "mean"));
        assert!(m[0].starts_with("environment:"), "{m:?}");
        let game = r#"
            [environment]
            preset = "perturbed-game"
            experts = 4
            epsilon = 0.2
            gap = 0.3
        "#;
        assert!(messages(game).iter().any(|s| s.contains("gap <= epsilon")));
    }

    #[test]
    fn glm_defaults() {
        let cfg = ExperimentConfig::from_toml("[environment]\npreset = \"glm-appendixA\"").unwrap();
        let r = resolve(&cfg, "glm").unwrap();
        assert_eq!(r.horizon, 20_000);
        assert_eq!(r.experts.len(), 10);
        let EnvironmentSpec::Glm(p) = &r.environment else { panic!() };
        assert_eq!((p.dim, p.optimal), (3, 8));
    }

    #[test]
    fn overrides_replace_fields() {
        let mut cfg = ExperimentConfig::from_toml(BANK).unwrap();
        cfg.apply(&Overrides {
            seed_count: Some(4),
            budgets: Some(vec![3]),
            procedure: Some("oracle".into()),
            out: Some("x".into()),
        });
        let r = resolve(&cfg, "bank").unwrap();
        assert_eq!(r.seeds, vec![0, 1, 2, 3]);
        assert_eq!(r.budgets, vec![3]);
        assert_eq!(r.procedures, vec![ProcedureKind::Oracle]);
    }
}
