//! Bounded link functions `f: R -> [0, 1]` for generalized linear experts.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Link {
    /// `σ(slope·z + offset)`.
    Sigmoid { slope: f64, offset: f64 },
    /// `intercept + slope·z`.
    Affine { intercept: f64, slope: f64 },
    /// `base + curvature·z²`.
    EvenQuadratic { base: f64, curvature: f64 },
    /// `0.5 + gain·z·|z|`.
    SignedSquare { gain: f64 },
    /// `0.5 + linear·z + cubic·z³`.
    OddCubic { linear: f64, cubic: f64 },
    /// `σ(slope·z) − strength·sign(z)·max(0, |z| − knee)`: agrees with the plain
    /// sigmoid on `|z| <= knee` and flattens beyond it.
    TailFlattened { slope: f64, strength: f64, knee: f64 },
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl Link {
    fn raw(&self, z: f64) -> f64 {
        match *self {
            Link::Sigmoid { slope, offset } => sigmoid(slope * z + offset),
            Link::Affine { intercept, slope } => intercept + slope * z,
            Link::EvenQuadratic { base, curvature } => base + curvature * z * z,
            Link::SignedSquare { gain } => 0.5 + gain * z * z.abs(),
            Link::OddCubic { linear, cubic } => 0.5 + linear * z + cubic * z * z * z,
            Link::TailFlattened {
                slope,
                strength,
                knee,
            } => sigmoid(slope * z) - strength * z.signum() * (z.abs() - knee).max(0.0),
        }
    }

    fn raw_derivative(&self, z: f64) -> f64 {
        match *self {
            Link::Sigmoid { slope, offset } => {
                let s = sigmoid(slope * z + offset);
                slope * s * (1.0 - s)
            }
            Link::Affine { slope, .. } => slope,
            Link::EvenQuadratic { curvature, .. } => 2.0 * curvature * z,
            Link::SignedSquare { gain } => 2.0 * gain * z.abs(),
            Link::OddCubic { linear, cubic } => linear + 3.0 * cubic * z * z,
            Link::TailFlattened {
                slope,
                strength,
                knee,
            } => {
                let s = sigmoid(slope * z);
                let tail = if z.abs() > knee { strength } else { 0.0 };
                slope * s * (1.0 - s) - tail
            }
        }
    }

    /// Link value, clamped into `[0, 1]`.
    pub fn value(&self, z: f64) -> f64 {
        self.raw(z).clamp(0.0, 1.0)
    }

    /// Derivative of [`Link::value`] (zero where the clamp is active).
    pub fn derivative(&self, z: f64) -> f64 {
        let r = self.raw(z);
        if !(0.0..=1.0).contains(&r) {
            0.0
        } else {
            self.raw_derivative(z)
        }
    }

    /// Largest `|f'(z)|` over `|z| <= bound`, by a dense scan.
    pub fn max_slope(&self, bound: f64) -> f64 {
        const STEPS: usize = 20_000;
        (0..=STEPS)
            .map(|i| -bound + 2.0 * bound * i as f64 / STEPS as f64)
            .map(|z| self.derivative(z).abs())
            .fold(0.0, f64::max)
    }
}

/// Pointwise loss between a link prediction and a label, both in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictionLoss {
    #[default]
    Squared,
    Absolute,
}

impl PredictionLoss {
    pub fn value(self, prediction: f64, label: f64) -> f64 {
        match self {
            PredictionLoss::Squared => (prediction - label).powi(2),
            PredictionLoss::Absolute => (prediction - label).abs(),
        }
    }

    /// Derivative with respect to the prediction.
    pub fn derivative(self, prediction: f64, label: f64) -> f64 {
        match self {
            PredictionLoss::Squared => 2.0 * (prediction - label),
            PredictionLoss::Absolute => (prediction - label).signum(),
        }
    }

    /// Bound on `|derivative|` for predictions and labels in `[0, 1]`.
    pub fn derivative_bound(self) -> f64 {
        match self {
            PredictionLoss::Squared => 2.0,
            PredictionLoss::Absolute => 1.0,
        }
    }
}

/// The ten-link family of the GLM model-selection preset (expert 9 generates labels).
///
/// Links 7, 8 and 9 coincide on `|z| <= 0.5` and separate only in the tails.
pub fn link_family() -> Vec<Link> {
    vec![
        Link::EvenQuadratic {
            base: 0.3,
            curvature: 0.4,
        },
        Link::Affine {
            intercept: 0.5,
            slope: 0.4,
        },
        Link::Sigmoid {
            slope: 1.5,
            offset: 0.0,
        },
        Link::SignedSquare { gain: 0.3 },
        Link::Sigmoid {
            slope: 2.0,
            offset: -0.5,
        },
        Link::OddCubic {
            linear: 0.3,
            cubic: 0.1,
        },
        Link::TailFlattened {
            slope: 4.0,
            strength: 0.7,
            knee: 0.5,
        },
        Link::TailFlattened {
            slope: 4.0,
            strength: 0.5,
            knee: 0.5,
        },
        Link::Sigmoid {
            slope: 4.0,
            offset: 0.0,
        },
        Link::Sigmoid {
            slope: 2.0,
            offset: 0.5,
        },
    ]
}
