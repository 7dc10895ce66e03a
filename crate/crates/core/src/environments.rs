//! Synthetic stochastic environments with known (or Monte-Carlo) optima.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{Advice, Environment, Outcome, Payload};
use crate::error::{Error, Result};
use crate::experts::inverse_cdf;
use crate::link::{Link, PredictionLoss};
use crate::rng::{stream_rng, Stream, StreamRng};

fn mismatch(advice: &Advice, environment: &'static str) -> Error {
    Error::AdviceMismatch {
        advice: advice.kind().to_string(),
        environment,
    }
}

/// Every expert `k` owns `d_k` Bernoulli arms; playing arm `j` costs a draw of mean `μ_{k,j}`.
#[derive(Debug, Clone)]
pub struct BernoulliBank {
    means: Vec<Vec<f64>>,
    offsets: Vec<usize>,
    arms_per_expert: Vec<usize>,
    rng: StreamRng,
}

impl BernoulliBank {
    pub fn new(means: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::Config("bank needs at least one expert".into()));
        }
        for (k, row) in means.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::Config(format!("expert {} has no arms", k + 1)));
            }
            if let Some(m) = row.iter().find(|m| !(0.0..=1.0).contains(*m)) {
                return Err(Error::Config(format!("expert {}: arm mean {m} outside [0, 1]", k + 1)));
            }
        }
        let mut offsets = Vec::with_capacity(means.len());
        let mut acc = 0;
        for row in &means {
            offsets.push(acc);
            acc += row.len();
        }
        Ok(BernoulliBank {
            arms_per_expert: means.iter().map(Vec::len).collect(),
            offsets,
            means,
            rng: stream_rng(seed, Stream::Environment),
        })
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    fn row(&self, expert: usize, advice: &Advice, probs: &[f64]) -> Result<&[f64]> {
        match self.means.get(expert) {
            Some(row) if row.len() == probs.len() => Ok(row),
            _ => Err(mismatch(advice, self.name())),
        }
    }
}

impl Environment for BernoulliBank {
    fn name(&self) -> &'static str {
        "bernoulli-bank"
    }

    fn sample(&mut self, round: u64) -> Outcome {
        let mut bits = Vec::with_capacity(self.offsets.last().unwrap() + self.means.last().unwrap().len());
        for row in &self.means {
            for &mu in row {
                bits.push(self.rng.random::<f64>() < mu);
            }
        }
        let play = self.rng.random::<f64>();
        Outcome {
            round,
            payload: Payload::Bits {
                bits,
                arms_per_expert: self.arms_per_expert.clone(),
                play,
            },
        }
    }

    fn raw_loss(&self, advice: &Advice, outcome: &Outcome) -> Result<f64> {
        let (Advice::Mixed { expert, probs }, Payload::Bits { bits, play, .. }) = (advice, &outcome.payload) else {
            return Err(mismatch(advice, self.name()));
        };
        self.row(*expert, advice, probs)?;
        let arm = inverse_cdf(probs, *play);
        Ok(if bits[self.offsets[*expert] + arm] { 1.0 } else { 0.0 })
    }

    fn oracle_optimum(&self, expert: usize) -> Option<f64> {
        self.means.get(expert).map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
    }

    fn expected_loss(&self, advice: &Advice) -> Option<f64> {
        let Advice::Mixed { expert, probs } = advice else {
            return None;
        };
        let row = self.row(*expert, advice, probs).ok()?;
        Some(row.iter().zip(probs).map(|(m, p)| m * p).sum())
    }
}

/// Mean table of the perturbed game: `game = None` is the null game, `Some(h)` favours expert `h` (0-based).
pub fn perturbed_game_means(game: Option<usize>, experts: usize, epsilon: f64, gap: f64) -> Result<Vec<Vec<f64>>> {
    if !(0.0..=1.0 / 3.0).contains(&epsilon) || !(0.0..=epsilon).contains(&gap) {
        return Err(Error::Config(format!(
            "perturbed game needs 0 <= gap <= epsilon <= 1/3 (got epsilon = {epsilon}, gap = {gap})"
        )));
    }
    if let Some(h) = game {
        if h >= experts {
            return Err(Error::Config(format!(
                "game index {} exceeds expert count {experts}",
                h + 1
            )));
        }
    }
    let worse = vec![0.5 + epsilon / 2.0, 0.5 + epsilon / 2.0 + gap];
    let better = vec![0.5 - epsilon / 2.0, 0.5 - epsilon / 2.0 - gap];
    Ok((0..experts)
        .map(|k| if Some(k) == game { better.clone() } else { worse.clone() })
        .collect())
}

/// `ξ ∼ U[low, high]` with squared loss `(u − ξ)²` on scalar advice.
#[derive(Debug, Clone)]
pub struct ScalarUniform {
    low: f64,
    high: f64,
    rng: StreamRng,
}

impl ScalarUniform {
    pub fn new(low: f64, high: f64, seed: u64) -> Self {
        ScalarUniform {
            low,
            high,
            rng: stream_rng(seed, Stream::Environment),
        }
    }

    fn variance(&self) -> f64 {
        (self.high - self.low).powi(2) / 12.0
    }
}

impl Environment for ScalarUniform {
    fn name(&self) -> &'static str {
        "scalar-uniform"
    }

    fn sample(&mut self, round: u64) -> Outcome {
        let u: f64 = self.rng.random();
        Outcome {
            round,
            payload: Payload::Scalar(self.low + (self.high - self.low) * u),
        }
    }

    fn raw_loss(&self, advice: &Advice, outcome: &Outcome) -> Result<f64> {
        match (advice, &outcome.payload) {
            (Advice::Scalar(u), Payload::Scalar(xi)) => Ok((u - xi).powi(2)),
            _ => Err(mismatch(advice, self.name())),
        }
    }

    /// Every scalar expert is assumed to have the mean inside its domain.
    fn oracle_optimum(&self, _expert: usize) -> Option<f64> {
        Some(self.variance())
    }

    fn expected_loss(&self, advice: &Advice) -> Option<f64> {
        match advice {
            Advice::Scalar(u) => Some((u - 0.5 * (self.low + self.high)).powi(2) + self.variance()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlmParams {
    pub dim: usize,
    pub links: Vec<Link>,
    /// 0-based index of the label-generating link.
    pub optimal: usize,
    /// Half-width of the uniform label noise.
    pub noise: f64,
    pub loss: PredictionLoss,
    /// Radius of every expert's parameter ball.
    pub radius: f64,
    pub oracle_samples: usize,
    /// Samples used for the per-checkpoint expected-loss estimate.
    pub checkpoint_samples: usize,
}

impl GlmParams {
    pub fn preset(dim: usize) -> Self {
        GlmParams {
            dim,
            links: crate::link::link_family(),
            optimal: 8,
            noise: 0.0,
            loss: PredictionLoss::Squared,
            radius: 1.0,
            oracle_samples: 1_000_000,
            checkpoint_samples: 10_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("GLM dimension must be positive".into()));
        }
        if self.optimal >= self.links.len() {
            return Err(Error::Config(format!(
                "optimal link {} not in family of {}",
                self.optimal + 1,
                self.links.len()
            )));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::Config("label noise must lie in [0, 1]".into()));
        }
        if self.radius.is_nan() || self.radius <= 0.0 {
            return Err(Error::Config("GLM radius must be positive".into()));
        }
        if self.oracle_samples < 1_000 || self.checkpoint_samples == 0 {
            return Err(Error::Config("GLM sample sizes too small".into()));
        }
        Ok(())
    }
}

/// Monte-Carlo estimate of `L_k*` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleEstimate {
    pub value: f64,
    pub std_error: f64,
    /// Minimizing scale `s` of `v = s·w`.
    pub argmin: f64,
}

const ORACLE_SEED: u64 = 0x6d6c_6362_6f72_636c;

fn unit_sphere(rng: &mut StreamRng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

fn label(params: &GlmParams, z: f64, rng: &mut StreamRng) -> f64 {
    let clean = params.links[params.optimal].value(z);
    if params.noise > 0.0 {
        let u: f64 = rng.random();
        (clean + params.noise * (2.0 * u - 1.0)).clamp(0.0, 1.0)
    } else {
        clean
    }
}

fn mean_loss(link: &Link, loss: PredictionLoss, s: f64, zs: &[f64], ys: &[f64]) -> f64 {
    zs.iter().zip(ys).map(|(z, y)| loss.value(link.value(s * z), *y)).sum::<f64>() / zs.len() as f64
}

fn search_optimum(link: &Link, params: &GlmParams, zs: &[f64], ys: &[f64]) -> Result<OracleEstimate> {
    const GRID: usize = 200;
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let r = params.radius;
    let coarse = zs.len().min(100_000);
    let step = 2.0 * r / GRID as f64;
    let (mut best_s, mut best_v) = (0.0, f64::INFINITY);
    for i in 0..=GRID {
        let s = -r + step * i as f64;
        let v = mean_loss(link, params.loss, s, &zs[..coarse], &ys[..coarse]);
        if v < best_v {
            best_v = v;
            best_s = s;
        }
    }
    let (mut a, mut b) = ((best_s - step).max(-r), (best_s + step).min(r));
    let f = |s: f64| mean_loss(link, params.loss, s, zs, ys);
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if b - a < 1e-9 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d);
        }
    }
    if b - a >= 1e-6 {
        return Err(Error::Search(format!("bracket [{a}, {b}] did not shrink")));
    }
    let mut s = 0.5 * (a + b);
    let mut v = f(s);
    let grid_full = f(best_s);
    if grid_full < v {
        s = best_s;
        v = grid_full;
    }
    if !v.is_finite() {
        return Err(Error::Search(format!("objective is {v} at s = {s}")));
    }
    let n = zs.len() as f64;
    let var = zs
        .iter()
        .zip(ys)
        .map(|(z, y)| (params.loss.value(link.value(s * z), *y) - v).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    Ok(OracleEstimate {
        value: v,
        std_error: (var / n).sqrt(),
        argmin: s,
    })
}

/// `L_k*` for every link, restricted to parameters along the true direction `w`.
///
/// The feature law is rotation invariant, so the table does not depend on `w`
/// and is computed once per parameter set.
pub fn glm_oracle_table(params: &GlmParams) -> Result<Arc<Vec<OracleEstimate>>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Vec<OracleEstimate>>>>> = OnceLock::new();
    let key = serde_json::to_string(params)?;
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    params.validate()?;
    let mut rng = stream_rng(ORACLE_SEED, Stream::Oracle);
    let mut zs = Vec::with_capacity(params.oracle_samples);
    let mut ys = Vec::with_capacity(params.oracle_samples);
    for _ in 0..params.oracle_samples {
        let z = unit_sphere(&mut rng, params.dim)[0];
        ys.push(label(params, z, &mut rng));
        zs.push(z);
    }
    let table = params
        .links
        .par_iter()
        .map(|link| search_optimum(link, params, &zs, &ys))
        .collect::<Result<Vec<_>>>()?;
    let table = Arc::new(table);
    cache.lock().unwrap().insert(key, table.clone());
    Ok(table)
}

/// Features uniform on the unit sphere, labels `f_{k*}(wᵀx)` plus optional noise.
#[derive(Debug, Clone)]
pub struct GlmEnv {
    params: GlmParams,
    w: Vec<f64>,
    rng: StreamRng,
    oracle: Arc<Vec<OracleEstimate>>,
    probe_x: Vec<f64>,
    probe_y: Vec<f64>,
}

impl GlmEnv {
    pub fn new(params: GlmParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let oracle = glm_oracle_table(&params)?;
        let mut rng = stream_rng(seed, Stream::Environment);
        let w = unit_sphere(&mut rng, params.dim);
        let mut probe = stream_rng(seed, Stream::Oracle);
        let mut probe_x = Vec::with_capacity(params.checkpoint_samples * params.dim);
        let mut probe_y = Vec::with_capacity(params.checkpoint_samples);
        for _ in 0..params.checkpoint_samples {
            let x = unit_sphere(&mut probe, params.dim);
            let z = dot(&w, &x);
            probe_y.push(label(&params, z, &mut probe));
            probe_x.extend(x);
        }
        Ok(GlmEnv {
            params,
            w,
            rng,
            oracle,
            probe_x,
            probe_y,
        })
    }

    pub fn params(&self) -> &GlmParams {
        &self.params
    }

    pub fn true_direction(&self) -> &[f64] {
        &self.w
    }

    pub fn oracle_table(&self) -> &[OracleEstimate] {
        &self.oracle
    }

    fn predictor<'a>(&self, advice: &'a Advice) -> Result<(&Link, &'a [f64])> {
        match advice {
            Advice::Predictor { expert, params } if *expert < self.params.links.len() && params.len() == self.params.dim => {
                Ok((&self.params.links[*expert], params))
            }
            _ => Err(mismatch(advice, self.name())),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Environment for GlmEnv {
    fn name(&self) -> &'static str {
        "glm"
    }

    fn sample(&mut self, round: u64) -> Outcome {
        let x = unit_sphere(&mut self.rng, self.params.dim);
        let label = label(&self.params, dot(&self.w, &x), &mut self.rng);
        Outcome {
            round,
            payload: Payload::Labeled { x, label },
        }
    }

    fn raw_loss(&self, advice: &Advice, outcome: &Outcome) -> Result<f64> {
        let (link, v) = self.predictor(advice)?;
        let Payload::Labeled { x, label } = &outcome.payload else {
            return Err(mismatch(advice, self.name()));
        };
        Ok(self.params.loss.value(link.value(dot(v, x)), *label))
    }

    fn oracle_optimum(&self, expert: usize) -> Option<f64> {
        self.oracle.get(expert).map(|e| e.value)
    }

    fn expected_loss(&self, _advice: &Advice) -> Option<f64> {
        None
    }

    fn checkpoint_expected_loss(&self, advice: &Advice) -> Option<f64> {
        let (link, v) = self.predictor(advice).ok()?;
        let d = self.params.dim;
        let total: f64 = self
            .probe_y
            .iter()
            .enumerate()
            .map(|(i, y)| self.params.loss.value(link.value(dot(v, &self.probe_x[i * d..(i + 1) * d])), *y))
            .sum();
        Some(total / self.probe_y.len() as f64)
    }
}
