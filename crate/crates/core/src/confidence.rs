//! Confidence brackets on an expert's optimal expected loss `L_k*`.
//!
//! Bounds are functions of the expert's training count `n`, its running
//! loss `L̂ = (loss sum)/n` and its regret bound `U_k`. They are never
//! evaluated at `n = 0`; the selection layer handles untrained experts.
//!
//! All logarithms are natural.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experts::RegretBound;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Standard,
    /// Standard bounds with the variance-aware `G` that uses `min(1, UCB)` as a proxy for `L_k*`.
    StandardTight,
    SelfNormalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceConfig {
    pub delta: f64,
    pub experts: usize,
    pub scheme: Scheme,
    /// Multiplier on the concentration slack (never on `U_k`).
    pub scale: f64,
    /// Replaces `δ_n` for every `n`; used to switch concentration off in tests.
    pub delta_n_override: Option<f64>,
}

impl ConfidenceConfig {
    pub fn new(delta: f64, experts: usize) -> Self {
        ConfidenceConfig {
            delta,
            experts,
            scheme: Scheme::Standard,
            scale: 1.0,
            delta_n_override: None,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// `δ/(2K)`.
    pub fn delta_arm(&self) -> f64 {
        self.delta / (2.0 * self.experts as f64)
    }

    /// `δ/(7·K·n²)`.
    pub fn delta_n(&self, n: u64) -> f64 {
        self.delta_n_override
            .unwrap_or_else(|| self.delta / (7.0 * self.experts as f64 * (n as f64).powi(2)))
    }

    /// `x = ln(3K/δ)` used by the self-normalized scheme.
    pub fn self_normalized_x(&self) -> f64 {
        (3.0 * self.experts as f64 / self.delta).ln()
    }

    /// Per-expert failure probability charged to `U_k` by the self-normalized scheme.
    pub fn self_normalized_delta(&self) -> f64 {
        self.delta / (3.0 * self.experts as f64)
    }
}

/// `√(2·ln(1/δ)/n) + 2·ln(1/δ)/(3n)`.
pub fn g_term(n: u64, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::NoObservations);
    }
    let l = (1.0 / delta).ln();
    let nf = n as f64;
    Ok((2.0 * l / nf).sqrt() + 2.0 * l / (3.0 * nf))
}

/// `√(2·ln(1/δ)/n)`.
pub fn h_term(n: u64, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::NoObservations);
    }
    Ok((2.0 * (1.0 / delta).ln() / n as f64).sqrt())
}

/// `√(2·Z·ln(1/δ)/(3n)) + 2·ln(1/δ)/n` with `Z = min(1, ucb)`.
pub fn tight_g_term(n: u64, delta: f64, ucb: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::NoObservations);
    }
    let z = ucb.clamp(0.0, 1.0);
    let l = (1.0 / delta).ln();
    let nf = n as f64;
    Ok((2.0 * z * l / (3.0 * nf)).sqrt() + 2.0 * l / nf)
}

/// `x − 2/3 + 2·ln(1 + ln n)`.
pub fn xn_term(x: f64, n: u64) -> f64 {
    xn_from_log(x, (n.max(1) as f64).ln())
}

/// `x_n` with `ln n` given directly (for non-integer `n`).
pub fn xn_from_log(x: f64, log_n: f64) -> f64 {
    x - 2.0 / 3.0 + 2.0 * (1.0 + log_n).ln()
}

fn sn_lower_slack(running_loss: f64, g: f64) -> f64 {
    (3.0 * g * running_loss.max(0.0)).sqrt() + g
}

fn sn_upper_slack(running_loss: f64, n: u64, x: f64) -> f64 {
    let nf = n as f64;
    let s = nf * running_loss.max(0.0);
    let v = 1.0 + 4.0 * s;
    9.0 * x / (2.0 * nf) * (6.0 + x.ln() + v.ln()) + (2.0 * x * v * (1.0 + 0.5 * v.ln())).sqrt() / nf
}

/// `L̂ − √(3·g·L̂) − g − U/n` with `g = 2·x_n/(3n)`.
pub fn self_normalized_lcb(running_loss: f64, n: u64, u_k_value: f64, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::NoObservations);
    }
    let g = 2.0 * xn_term(x, n) / (3.0 * n as f64);
    Ok(running_loss - sn_lower_slack(running_loss, g) - u_k_value / n as f64)
}

/// `L̂ + (9x/2n)(6 + ln x + ln(1+4S)) + (1/n)√(2x(1+4S)(1 + ½ln(1+4S)))` with `S = n·L̂`.
pub fn self_normalized_ucb(running_loss: f64, n: u64, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::NoObservations);
    }
    Ok(running_loss + sn_upper_slack(running_loss, n, x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lcb: f64,
    pub ucb: f64,
}

impl Bounds {
    pub fn width(&self) -> f64 {
        self.ucb - self.lcb
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lcb <= value && value <= self.ucb
    }
}

/// `LCB = L̂ − U_k(n, δ_arm)/n − s·G(n, δ_n)`, `UCB = L̂ + s·H(n, δ_n)`.
pub fn standard_bounds(running_loss: f64, n: u64, bound: &RegretBound, cfg: &ConfidenceConfig) -> Result<Bounds> {
    if n == 0 {
        return Err(Error::NoBounds);
    }
    let dn = cfg.delta_n(n);
    let u = bound.evaluate(n, cfg.delta_arm()) / n as f64;
    let ucb = running_loss + cfg.scale * h_term(n, dn)?;
    let g = match cfg.scheme {
        Scheme::StandardTight => tight_g_term(n, dn, ucb)?,
        _ => g_term(n, dn)?,
    };
    Ok(Bounds {
        lcb: running_loss - u - cfg.scale * g,
        ucb,
    })
}

/// Self-normalized brackets with `x = ln(3K/δ)` and `U_k` at `δ/(3K)`.
pub fn self_normalized_bounds(
    running_loss: f64,
    n: u64,
    bound: &RegretBound,
    cfg: &ConfidenceConfig,
) -> Result<Bounds> {
    if n == 0 {
        return Err(Error::NoBounds);
    }
    let x = cfg.self_normalized_x();
    let nf = n as f64;
    let g = 2.0 * xn_term(x, n) / (3.0 * nf);
    let u = bound.evaluate(n, cfg.self_normalized_delta()) / nf;
    Ok(Bounds {
        lcb: running_loss - cfg.scale * sn_lower_slack(running_loss, g) - u,
        ucb: running_loss + cfg.scale * sn_upper_slack(running_loss, n, x),
    })
}

/// Brackets under the configured scheme.
pub fn bounds(running_loss: f64, n: u64, bound: &RegretBound, cfg: &ConfidenceConfig) -> Result<Bounds> {
    match cfg.scheme {
        Scheme::Standard | Scheme::StandardTight => standard_bounds(running_loss, n, bound, cfg),
        Scheme::SelfNormalized => self_normalized_bounds(running_loss, n, bound, cfg),
    }
}

/// Closed-form standard width `s·(H + G) + U_k(n, δ_arm)/n`.
pub fn interval_width(n: u64, bound: &RegretBound, cfg: &ConfidenceConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::NoObservations);
    }
    let dn = cfg.delta_n(n);
    Ok(cfg.scale * (h_term(n, dn)? + g_term(n, dn)?) + bound.evaluate(n, cfg.delta_arm()) / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn g_and_h_examples() {
        assert_eq!(g_term(5, 1.0).unwrap(), 0.0);
        assert!(close(g_term(2, (-2.0f64).exp()).unwrap(), 2.080880229039762));
        assert!(close(g_term(18, 1.0 / E).unwrap(), 0.37037037037037035));
        assert!(close(h_term(8, 1.0 / E).unwrap(), 0.5));
        assert_eq!(h_term(1, 1.0).unwrap(), 0.0);
        assert!(close(h_term(2, 1.0 / E).unwrap(), 1.0));
    }

    #[test]
    fn zero_count_is_rejected() {
        assert!(g_term(0, 0.5).unwrap_err().to_string().contains("no observations"));
        assert!(h_term(0, 0.5).is_err());
        let cfg = ConfidenceConfig::new(0.1, 3);
        let err = standard_bounds(0.5, 0, &RegretBound::Zero, &cfg).unwrap_err();
        assert!(err.to_string().contains("untrained expert has no bounds"));
    }

    #[test]
    fn delta_splits() {
        assert!(close(ConfidenceConfig::new(0.7, 10).delta_n(1), 0.01));
        assert!(close(ConfidenceConfig::new(0.1, 5).delta_arm(), 0.01));
    }

    #[test]
    fn zero_slack_interval_collapses() {
        let mut cfg = ConfidenceConfig::new(0.1, 4);
        cfg.delta_n_override = Some(1.0);
        let b = standard_bounds(0.5, 7, &RegretBound::Zero, &cfg).unwrap();
        assert_eq!((b.lcb, b.ucb), (0.5, 0.5));
        assert_eq!(interval_width(7, &RegretBound::Zero, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn width_example() {
        let mut cfg = ConfidenceConfig::new(0.1, 4);
        cfg.delta_n_override = Some((-2.0f64).exp());
        let w = interval_width(2, &RegretBound::Zero, &cfg).unwrap();
        assert!(close(w, 3.495093791412857));
    }

    #[test]
    fn xn_examples() {
        assert!(close(xn_term(1.0, 1), 1.0 / 3.0));
        assert!(close(xn_term(2.0 / 3.0, 1), 0.0));
        assert!(close(xn_from_log(1.0, 1.0), 1.7196276944532238));
    }

    #[test]
    fn self_normalized_lcb_examples() {
        let x = 1.0;
        let g = 2.0 * xn_term(x, 40) / 120.0;
        assert!(close(self_normalized_lcb(0.0, 40, 3.0, x).unwrap(), -g - 3.0 / 40.0));
        assert!(close(self_normalized_lcb(0.48, 100, 0.0, x).unwrap(), 0.26428321358913226));
        // The slack core with g = 1/450.
        assert!((0.48 - sn_lower_slack(0.48, 1.0 / 450.0) - 0.421209).abs() < 1e-6);
        let base = self_normalized_lcb(0.3, 25, 0.0, x).unwrap();
        assert!(close(self_normalized_lcb(0.3, 25, 25.0, x).unwrap(), base - 1.0));
    }

    #[test]
    fn self_normalized_ucb_examples() {
        assert!(close(self_normalized_ucb(0.0, 1, 1.0).unwrap(), 28.414213562373096));
        assert!(close(self_normalized_ucb(0.5, 10, 1.0).unwrap(), 5.599282254815638));
        let s3 = self_normalized_ucb(0.0, 1_000, 1.0).unwrap();
        let s6 = self_normalized_ucb(0.0, 1_000_000, 1.0).unwrap();
        assert!((s3 / s6 - 1000.0).abs() < 1e-6);
    }

    #[test]
    fn tight_variant_uses_ucb_proxy() {
        let cfg = ConfidenceConfig::new(0.1, 3).with_scheme(Scheme::StandardTight);
        let b = bounds(0.02, 400, &RegretBound::Zero, &cfg).unwrap();
        let dn = cfg.delta_n(400);
        let l = (1.0 / dn).ln();
        let g = (2.0 * b.ucb * l / 1200.0).sqrt() + 2.0 * l / 400.0;
        assert!(close(b.lcb, 0.02 - g));
        let plain = standard_bounds(0.02, 400, &RegretBound::Zero, &ConfidenceConfig::new(0.1, 3)).unwrap();
        assert!(b.lcb > plain.lcb);
        assert_eq!(b.ucb, plain.ucb);
    }

    #[test]
    fn scale_touches_only_concentration() {
        let bound = RegretBound::Ogd {
            lipschitz: 2.0,
            diameter: 1.0,
            constant: 1.5,
        };
        let cfg = ConfidenceConfig::new(0.1, 3).with_scale(0.0);
        let b = standard_bounds(0.4, 9, &bound, &cfg).unwrap();
        assert!(close(b.ucb, 0.4));
        assert!(close(b.lcb, 0.4 - 1.5 * 2.0 * 3.0 / 9.0));
    }
}
