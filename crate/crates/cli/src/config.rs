//! JSON experiment configs.
//!
//! ```json
//! {
//!   "environment": {"arms": [{"dirac": 0.9}, {"dirac": 0.6}]},
//!   "policies": [{"ucb_rho": 0.3}],
//!   "horizon": 100000,
//!   "replications": 1,
//!   "seed": 42,
//!   "curves": [{"kind": "prop1", "rho": 0.3}],
//!   "verify": {"kind": "prop1", "rho": 0.3},
//!   "window": [1000, 100000],
//!   "output": "out"
//! }
//! ```
//!
//! Unknown fields are rejected everywhere. Arm numbers in bound requests
//! start at 1, matching the `mean_T_k` CSV columns.

use std::num::NonZeroU64;
use std::path::{Path, PathBuf};

use bandit_bounds::bounds::BoundCurve;
use bandit_bounds::{Environment, ExplorationFn, PolicySpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: Environment,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub policies: Vec<PolicySpec>,
    pub horizon: NonZeroU64,
    #[serde(default = "one_rep")]
    pub replications: NonZeroU64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveRequest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<CurveRequest>,
    /// Inclusive round window for growth-exponent fits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[u64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn one_rep() -> NonZeroU64 {
    NonZeroU64::MIN
}

/// A bound curve, parameterised by the config's environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveRequest {
    Prop1 { rho: f64 },
    Prop2H { rho: f64 },
    Prop2F { rho: f64 },
    Thm3 { rho: f64, beta: f64 },
    Lemma1 { arm: usize, fs: Vec<ExplorationFn>, beta: f64 },
    Lower {
        arm: usize,
        #[serde(default)]
        alpha: f64,
    },
    Ucb1 {},
    DiracGeneric { fs: Vec<ExplorationFn> },
    EtcEstimate { sigma: f64, s: u64 },
}

impl CurveRequest {
    /// Builds the curve against `env`.
    pub fn build(&self, env: &Environment) -> Result<BoundCurve, CliError> {
        let gap = || env.analyze().map(|a| a.min_gap);
        let arm = |a: usize| {
            if a == 0 || a > env.num_arms() {
                Err(CliError::Config(format!("arm {a} out of range 1..={}", env.num_arms())))
            } else {
                Ok(a - 1)
            }
        };
        Ok(match self {
            CurveRequest::Prop1 { rho } => BoundCurve::prop1(*rho, gap()?)?,
            CurveRequest::Prop2H { rho } => BoundCurve::prop2_h(*rho, gap()?)?,
            CurveRequest::Prop2F { rho } => BoundCurve::prop2_f(*rho, gap()?)?,
            CurveRequest::Thm3 { rho, beta } => BoundCurve::thm3(env, *rho, *beta)?,
            CurveRequest::Lemma1 { arm: a, fs, beta } => BoundCurve::lemma1(env, arm(*a)?, fs, *beta)?,
            CurveRequest::Lower { arm: a, alpha } => BoundCurve::lower(env, arm(*a)?, *alpha)?,
            CurveRequest::Ucb1 {} => BoundCurve::ucb1(env)?,
            CurveRequest::DiracGeneric { fs } => {
                let analysis = env.analyze()?;
                if fs.len() != env.num_arms() {
                    return Err(CliError::Config(format!(
                        "dirac_generic: {} exploration functions for {} arms",
                        fs.len(),
                        env.num_arms()
                    )));
                }
                let sub = suboptimal_arm(&analysis.gaps)?;
                BoundCurve::dirac_generic(fs[sub], analysis.min_gap)?
            }
            CurveRequest::EtcEstimate { sigma, s } => BoundCurve::etc_estimate(gap()?, *sigma, *s)?,
        })
    }
}

/// The single suboptimal arm of a two-arm environment.
pub(crate) fn suboptimal_arm(gaps: &[f64]) -> Result<usize, CliError> {
    gaps.iter()
        .position(|&g| g > 0.0)
        .ok_or_else(|| CliError::Config("environment has no suboptimal arm".into()))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn horizon(&self) -> u64 {
        self.horizon.get()
    }

    pub fn replications(&self) -> u64 {
        self.replications.get()
    }

    /// Checks every precondition the commands rely on, before any compute.
    pub fn validate(&self) -> Result<(), CliError> {
        let k = self.environment.num_arms();
        if self.horizon() < k as u64 {
            return Err(CliError::Config(format!(
                "horizon: {} is shorter than the number of arms {k}",
                self.horizon()
            )));
        }
        for (i, p) in self.policies.iter().enumerate() {
            p.validate(&self.environment)
                .map_err(|e| CliError::Config(format!("policies[{i}]: {e}")))?;
        }
        for (i, c) in self.curves.iter().enumerate() {
            c.build(&self.environment)
                .map_err(|e| CliError::Config(format!("curves[{i}]: {e}")))?;
        }
        if let Some(v) = &self.verify {
            v.build(&self.environment)
                .map_err(|e| CliError::Config(format!("verify: {e}")))?;
        }
        if let Some([lo, hi]) = self.window {
            if lo == 0 || lo >= hi {
                return Err(CliError::Config(format!("window: need 1 <= lo < hi, got [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}
