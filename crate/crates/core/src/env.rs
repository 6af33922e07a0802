//! Environments: ordered lists of arm distributions.

use serde::{Deserialize, Serialize};

use crate::dist::ArmDistribution;
use crate::error::{Error, Result};

/// `K >= 2` arms. Serialized as `{"arms":[...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawEnvironment")]
pub struct Environment {
    arms: Vec<ArmDistribution>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvironment {
    arms: Vec<ArmDistribution>,
}

impl TryFrom<RawEnvironment> for Environment {
    type Error = Error;

    fn try_from(raw: RawEnvironment) -> Result<Self> {
        Environment::new(raw.arms)
    }
}

/// Means, best arm and gaps of a non-degenerate environment.
#[derive(Debug, Clone, PartialEq)]
pub struct GapAnalysis {
    pub best_mean: f64,
    /// Smallest index attaining `best_mean`.
    pub best_arm: usize,
    /// `gaps[k] = best_mean - mean_k`.
    pub gaps: Vec<f64>,
    /// Smallest positive gap.
    pub min_gap: f64,
}

impl Environment {
    pub fn new(arms: Vec<ArmDistribution>) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::TooFewArms(arms.len()));
        }
        Ok(Environment { arms })
    }

    pub fn arms(&self) -> &[ArmDistribution] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(ArmDistribution::mean).collect()
    }

    pub fn best_arm(&self) -> usize {
        let means = self.means();
        let mut best = 0;
        for (k, &m) in means.iter().enumerate().skip(1) {
            if m > means[best] {
                best = k;
            }
        }
        best
    }

    pub fn best_mean(&self) -> f64 {
        self.arms[self.best_arm()].mean()
    }

    /// Gap vector; all zeros in a degenerate environment.
    pub fn gaps(&self) -> Vec<f64> {
        let best = self.best_mean();
        self.arms.iter().map(|d| best - d.mean()).collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.gaps().iter().all(|&g| g == 0.0)
    }

    pub fn is_all_dirac(&self) -> bool {
        self.arms.iter().all(ArmDistribution::is_dirac)
    }

    /// Full analysis; refuses environments where every mean is equal.
    pub fn analyze(&self) -> Result<GapAnalysis> {
        let best_arm = self.best_arm();
        let best_mean = self.arms[best_arm].mean();
        let gaps = self.gaps();
        let min_gap = gaps
            .iter()
            .copied()
            .filter(|&g| g > 0.0)
            .fold(f64::INFINITY, f64::min);
        if !min_gap.is_finite() {
            return Err(Error::DegenerateEnvironment);
        }
        Ok(GapAnalysis {
            best_mean,
            best_arm,
            gaps,
            min_gap,
        })
    }
}
