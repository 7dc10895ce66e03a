//! Shared helpers for the integration and acceptance targets.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mlcb::confidence::ConfidenceConfig;
use mlcb::domain::Advice;
use mlcb::environments::BernoulliBank;
use mlcb::experts::{Expert, ExpertSpec};
use mlcb::meta::{Engine, MLcb, RoundDecision};

pub const GOLDEN_MEANS: [[f64; 2]; 3] = [[0.2, 0.6], [0.5, 0.3], [0.7, 0.4]];
pub const GOLDEN_SEED: u64 = 42;
pub const GOLDEN_DELTA: f64 = 0.1;
pub const GOLDEN_CONSTANT: f64 = 8.0;
pub const GOLDEN_ROUNDS: u64 = 10;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// One round as written to the golden file; ids 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRow {
    pub t: u64,
    pub training_set: Vec<usize>,
    pub advisor: usize,
    pub advice: Vec<f64>,
    pub procedure_loss: f64,
    pub expert_losses: Vec<f64>,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

pub fn format_golden(rows: &[GoldenRow]) -> String {
    let mut out = String::from("t,training_set,advisor,advice,procedure_loss,expert_losses\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.t,
            join(&r.training_set),
            r.advisor,
            join(&r.advice),
            r.procedure_loss,
            join(&r.expert_losses)
        ));
    }
    out
}

pub fn golden_row(d: &RoundDecision) -> GoldenRow {
    let advice = match &d.advice {
        Advice::Mixed { probs, .. } => probs.clone(),
        other => other.components().to_vec(),
    };
    GoldenRow {
        t: d.round,
        training_set: d.training_set.iter().map(|k| k + 1).collect(),
        advisor: d.advisor + 1,
        advice,
        procedure_loss: d.procedure_loss,
        expert_losses: d.expert_losses.clone(),
    }
}

pub fn bank_engine(means: &[Vec<f64>], seed: u64, delta: f64, constant: f64, budget: usize) -> Engine {
    let experts = means
        .iter()
        .enumerate()
        .map(|(k, row)| Expert::new(k, ExpertSpec::ucb1(row.len(), constant), seed).unwrap())
        .collect();
    let env = BernoulliBank::new(means.to_vec(), seed).unwrap();
    Engine::new(
        experts,
        Box::new(env),
        Box::new(MLcb),
        ConfidenceConfig::new(delta, means.len()),
        budget,
    )
    .unwrap()
}

pub fn engine_golden_rows() -> Vec<GoldenRow> {
    let means: Vec<Vec<f64>> = GOLDEN_MEANS.iter().map(|r| r.to_vec()).collect();
    let mut engine = bank_engine(&means, GOLDEN_SEED, GOLDEN_DELTA, GOLDEN_CONSTANT, 1);
    (0..GOLDEN_ROUNDS).map(|_| golden_row(&engine.step().unwrap())).collect()
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(id);
    r
}

fn pick(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Straight-line M = 1 procedure over UCB1 experts, written without the library.
pub fn reference_golden_rows() -> Vec<GoldenRow> {
    let k = GOLDEN_MEANS.len();
    let d = 2usize;
    let delta = GOLDEN_DELTA;
    let mut env = stream(GOLDEN_SEED, 1);
    let mut samplers: Vec<ChaCha8Rng> = (0..k).map(|i| stream(GOLDEN_SEED, 1000 + i as u64)).collect();

    let mut n = vec![0u64; k];
    let mut loss_sum = vec![0.0f64; k];
    let mut pulls = vec![vec![0u64; d]; k];
    let mut arm_sum = vec![vec![0.0f64; d]; k];
    let mut next = vec![0usize; k];
    let mut played = vec![vec![0.0f64; d]; k];
    let mut rows = Vec::new();

    for t in 1..=GOLDEN_ROUNDS {
        // Bounds from history through t − 1.
        let mut lcb = vec![f64::NEG_INFINITY; k];
        for i in 0..k {
            if n[i] == 0 {
                continue;
            }
            let nf = n[i] as f64;
            let d_arm = delta / (2.0 * k as f64);
            let d_n = delta / (7.0 * k as f64 * nf * nf);
            let u = GOLDEN_CONSTANT * (d as f64 * nf * (nf * d as f64 / d_arm).ln()).sqrt();
            let l = (1.0 / d_n).ln();
            let g = (2.0 * l / nf).sqrt() + 2.0 * l / (3.0 * nf);
            lcb[i] = loss_sum[i] / nf - u / nf - g;
        }
        let mut chosen = 0;
        for i in 1..k {
            if lcb[i] < lcb[chosen] {
                chosen = i;
            }
        }

        let advice: Vec<f64> = if n[chosen] == 0 {
            let mut v = vec![0.0; d];
            v[0] = 1.0;
            v
        } else {
            played[chosen].iter().map(|c| c / n[chosen] as f64).collect()
        };

        let mut bits = vec![vec![false; d]; k];
        for (i, row) in GOLDEN_MEANS.iter().enumerate() {
            for (a, mu) in row.iter().enumerate() {
                bits[i][a] = env.random::<f64>() < *mu;
            }
        }
        let play: f64 = env.random();
        let procedure_loss = if bits[chosen][pick(&advice, play)] { 1.0 } else { 0.0 };

        let mut state = vec![0.0; d];
        state[next[chosen]] = 1.0;
        let a = pick(&state, samplers[chosen].random::<f64>());
        let loss = if bits[chosen][a] { 1.0 } else { 0.0 };
        played[chosen][next[chosen]] += 1.0;
        pulls[chosen][a] += 1;
        arm_sum[chosen][a] += loss;
        next[chosen] = match pulls[chosen].iter().position(|&p| p == 0) {
            Some(untried) => untried,
            None => {
                let total: u64 = pulls[chosen].iter().sum();
                let mut best = 0;
                let mut best_index = f64::INFINITY;
                for b in 0..d {
                    let p = pulls[chosen][b] as f64;
                    let index = arm_sum[chosen][b] / p - (2.0 * (total as f64).ln() / p).sqrt();
                    if index < best_index {
                        best_index = index;
                        best = b;
                    }
                }
                best
            }
        };
        n[chosen] += 1;
        loss_sum[chosen] += loss;

        rows.push(GoldenRow {
            t,
            training_set: vec![chosen + 1],
            advisor: chosen + 1,
            advice,
            procedure_loss,
            expert_losses: vec![loss],
        });
    }
    rows
}

/// Optimal `M`-subset by exhaustive enumeration: untrained experts count as `−∞`,
/// then the smallest LCB sum, then the lexicographically smallest sorted index list.
pub fn enumerate_best_subset(lcbs: &[Option<f64>], budget: usize) -> Vec<usize> {
    let k = lcbs.len();
    let mut best: Option<(i64, f64, Vec<usize>)> = None;
    for mask in 0u32..(1 << k) {
        if mask.count_ones() as usize != budget {
            continue;
        }
        let set: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let untrained = set.iter().filter(|&&i| lcbs[i].is_none()).count() as i64;
        let sum: f64 = set.iter().filter_map(|&i| lcbs[i]).sum();
        let key = (-untrained, sum, set);
        let better = match &best {
            None => true,
            Some(b) => (key.0, key.1).partial_cmp(&(b.0, b.1)).unwrap().then_with(|| key.2.cmp(&b.2)).is_lt(),
        };
        if better {
            best = Some(key);
        }
    }
    best.unwrap().2
}
