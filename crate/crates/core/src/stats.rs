//! Summary statistics used by the estimators and experiment reports.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{FppError, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Standard normal quantile `Φ^{-1}(p)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(FppError::InvalidParameter(format!("quantile level {p} not in (0, 1)")));
    }
    Ok(Normal::standard().inverse_cdf(p))
}

/// Sample mean with a normal-approximation half-width `z * sd / sqrt(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanCi {
    pub mean: f64,
    pub sd: f64,
    pub half_width: f64,
    pub count: usize,
}

impl MeanCi {
    pub fn new(values: &[f64], z: f64) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(FppError::InsufficientData("no samples".into()));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Ok(MeanCi {
            mean,
            sd,
            half_width: z * sd / (n as f64).sqrt(),
            count: n,
        })
    }

    pub fn std_error(&self) -> f64 {
        self.sd / (self.count as f64).sqrt()
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }
}

/// Wilson score interval for a binomial proportion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: usize,
    pub trials: usize,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Proportion {
    pub fn wilson(successes: usize, trials: usize, z: f64) -> Result<Self> {
        if trials == 0 || successes > trials {
            return Err(FppError::InsufficientData(format!("{successes} successes out of {trials}")));
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Ok(Proportion {
            successes,
            trials,
            estimate: p,
            lower: (centre - half).max(0.0),
            upper: (centre + half).min(1.0),
        })
    }
}

/// Outcome of comparing consecutive proportions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    /// Every step down is significant.
    StrictlyDecreasing,
    /// No step is a significant decrease.
    Nondecreasing,
    /// Neither.
    Mixed,
}

/// Lower confidence bound for `p1 − p2` from the two Wilson intervals
/// (Newcombe's hybrid score method): `d − sqrt((p1 − l1)^2 + (u2 − p2)^2)`.
pub fn newcombe_lower(p1: &Proportion, p2: &Proportion) -> f64 {
    let d = p1.estimate - p2.estimate;
    d - ((p1.estimate - p1.lower).powi(2) + (p2.upper - p2.estimate).powi(2)).sqrt()
}

/// Per-step comparison inside [`TrendTest`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    /// One-sided lower bound for `p_i − p_{i+1}`.
    pub drop_lower: f64,
    pub significant_drop: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendTest {
    pub trend: Trend,
    pub alpha: f64,
    pub proportions: Vec<Proportion>,
    pub steps: Vec<Step>,
}

/// Classify a sequence of independent proportions. Each consecutive pair is
/// compared by a one-sided Wilson-based test at level `alpha`: the drop
/// `p_i − p_{i+1}` is significant when its Newcombe lower bound is positive.
pub fn wilson_trend(counts: &[(usize, usize)], alpha: f64) -> Result<TrendTest> {
    let z = normal_quantile(1.0 - alpha)?;
    let proportions = counts
        .iter()
        .map(|&(s, n)| Proportion::wilson(s, n, z))
        .collect::<Result<Vec<_>>>()?;
    let steps: Vec<Step> = proportions
        .windows(2)
        .map(|w| {
            let drop_lower = newcombe_lower(&w[0], &w[1]);
            Step {
                drop_lower,
                significant_drop: drop_lower > 0.0,
            }
        })
        .collect();
    let trend = if steps.iter().all(|s| s.significant_drop) {
        Trend::StrictlyDecreasing
    } else if steps.iter().all(|s| !s.significant_drop) {
        Trend::Nondecreasing
    } else {
        Trend::Mixed
    };
    Ok(TrendTest {
        trend,
        alpha,
        proportions,
        steps,
    })
}
