//! Sequential arm-selection policies.
//!
//! Every policy starts by pulling arms `0..K` once, in order. After that:
//!
//! * UCB variants pull the smallest index maximizing
//!   `mean_hat_k + sqrt(f_k(t) / T_k(t-1))`, where `t` is the current round
//!   and `f_k(t) = rho * ln t` for UCB(ρ);
//! * explore-then-commit cycles through the arms until every arm has `s`
//!   pulls, then commits to the best empirical mean;
//! * the uniform baseline draws an arm uniformly at random.

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// `f(n) = c0 + c1 ln ln n + c2 ln n + c3 n^e` with nonnegative coefficients
/// and `e` in `[0, 1]`. The `ln ln` term is taken as 0 while `ln n <= 1`.
///
/// Missing fields default to 0, except `e` which defaults to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawExplorationFn")]
pub struct ExplorationFn {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub e: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExplorationFn {
    #[serde(default)]
    c0: f64,
    #[serde(default)]
    c1: f64,
    #[serde(default)]
    c2: f64,
    #[serde(default)]
    c3: f64,
    #[serde(default = "one")]
    e: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawExplorationFn> for ExplorationFn {
    type Error = Error;

    fn try_from(r: RawExplorationFn) -> Result<Self> {
        ExplorationFn::new(r.c0, r.c1, r.c2, r.c3, r.e)
    }
}

/// `ln ln x`, clamped to 0 when `ln x <= 1`.
#[inline]
pub fn clamped_log_log(x: f64) -> f64 {
    let l = x.ln();
    if l <= 1.0 {
        0.0
    } else {
        l.ln()
    }
}

impl ExplorationFn {
    pub fn new(c0: f64, c1: f64, c2: f64, c3: f64, e: f64) -> Result<Self> {
        for (name, c) in [("c0", c0), ("c1", c1), ("c2", c2), ("c3", c3)] {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("coefficient must be finite and nonnegative, got {c}"),
                });
            }
        }
        if !(0.0..=1.0).contains(&e) {
            return Err(Error::param("e", format!("exponent must lie in [0, 1], got {e}")));
        }
        Ok(ExplorationFn { c0, c1, c2, c3, e })
    }

    /// `rho * ln n`, the UCB(ρ) exploration function.
    pub fn log(rho: f64) -> Self {
        ExplorationFn { c0: 0.0, c1: 0.0, c2: rho, c3: 0.0, e: 1.0 }
    }

    /// `c * ln ln n`.
    pub fn log_log(c: f64) -> Self {
        ExplorationFn { c0: 0.0, c1: c, c2: 0.0, c3: 0.0, e: 1.0 }
    }

    #[inline]
    pub fn eval(&self, n: f64) -> f64 {
        let mut v = self.c0;
        if self.c1 != 0.0 {
            v += self.c1 * clamped_log_log(n);
        }
        if self.c2 != 0.0 {
            v += self.c2 * n.ln();
        }
        if self.c3 != 0.0 {
            v += self.c3 * n.powf(self.e);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    /// UCB(ρ): index `mean_hat + sqrt(rho ln t / T_k)`.
    UcbRho(f64),
    /// UCB with one exploration function per arm.
    UcbGeneric(Vec<ExplorationFn>),
    /// Pull each arm `s` times round-robin, then commit.
    #[serde(rename = "etc")]
    ExploreThenCommit { s: u64 },
    UniformRandom,
}

impl PolicySpec {
    /// Checks the spec's own parameters and its fit with `env`.
    pub fn validate(&self, env: &Environment) -> Result<()> {
        match self {
            PolicySpec::UcbRho(rho) => {
                if !(*rho > 0.0 && rho.is_finite()) {
                    return Err(Error::param("ucb_rho", format!("rho must be positive, got {rho}")));
                }
            }
            PolicySpec::UcbGeneric(fs) => {
                if fs.len() != env.num_arms() {
                    return Err(Error::param(
                        "ucb_generic",
                        format!("{} exploration functions for {} arms", fs.len(), env.num_arms()),
                    ));
                }
            }
            PolicySpec::ExploreThenCommit { s } => {
                if *s == 0 {
                    return Err(Error::param("etc.s", "s must be at least 1"));
                }
            }
            PolicySpec::UniformRandom => {}
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            PolicySpec::UcbRho(rho) => format!("ucb_rho({rho})"),
            PolicySpec::UcbGeneric(_) => "ucb_generic".to_string(),
            PolicySpec::ExploreThenCommit { s } => format!("etc(s={s})"),
            PolicySpec::UniformRandom => "uniform_random".to_string(),
        }
    }
}

/// Pull counts, reward sums and the number of completed rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    counts: Vec<u64>,
    sums: Vec<f64>,
    round: u64,
}

impl PolicyState {
    pub fn new(num_arms: usize) -> Self {
        PolicyState {
            counts: vec![0; num_arms],
            sums: vec![0.0; num_arms],
            round: 0,
        }
    }

    pub fn num_arms(&self) -> usize {
        self.counts.len()
    }

    /// Completed rounds.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    /// Empirical mean of `arm`; `None` before its first pull.
    pub fn mean(&self, arm: usize) -> Option<f64> {
        match self.counts[arm] {
            0 => None,
            c => Some(self.sums[arm] / c as f64),
        }
    }

    /// Records `reward` for `arm`.
    ///
    /// # Panics
    ///
    /// If `reward` is outside `[0, 1]` or `arm` is out of range.
    #[inline]
    pub fn update(&mut self, arm: usize, reward: f64) {
        assert!(
            (0.0..=1.0).contains(&reward),
            "reward {reward} outside [0, 1]"
        );
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        self.round += 1;
    }

    /// Smallest arm index with the highest empirical mean.
    fn empirical_best(&self) -> usize {
        let mut best = 0;
        let mut best_mean = f64::NEG_INFINITY;
        for k in 0..self.num_arms() {
            let m = self.mean(k).unwrap_or(f64::NEG_INFINITY);
            if m > best_mean {
                best = k;
                best_mean = m;
            }
        }
        best
    }
}

/// `mean_hat + sqrt(f_value / s)`.
///
/// # Panics
///
/// If `s == 0`: the index is undefined before an arm's first pull.
#[inline]
pub fn ucb_index(mean_hat: f64, s: u64, f_value: f64) -> f64 {
    assert!(s > 0, "UCB index requested for an arm with no pulls");
    mean_hat + (f_value / s as f64).sqrt()
}

/// Smallest index maximizing `score(k)`.
#[inline]
fn argmax_by(num_arms: usize, mut score: impl FnMut(usize) -> f64) -> usize {
    let mut best = 0;
    let mut best_score = score(0);
    for k in 1..num_arms {
        let s = score(k);
        if s > best_score {
            best = k;
            best_score = s;
        }
    }
    best
}

/// Chooses the arm for the next round, `t = state.round() + 1`.
///
/// Only the uniform baseline draws from `rng`.
pub fn select_arm(state: &PolicyState, spec: &PolicySpec, rng: &mut RngStream) -> usize {
    let k = state.num_arms();
    let done = state.round();
    if done < k as u64 {
        return done as usize;
    }
    let t = (done + 1) as f64;
    match spec {
        PolicySpec::UcbRho(rho) => {
            let f = rho * t.ln();
            argmax_by(k, |a| ucb_index(state.sums[a] / state.counts[a] as f64, state.counts[a], f))
        }
        PolicySpec::UcbGeneric(fs) => argmax_by(k, |a| {
            ucb_index(state.sums[a] / state.counts[a] as f64, state.counts[a], fs[a].eval(t))
        }),
        PolicySpec::ExploreThenCommit { s } => {
            if done < k as u64 * s {
                (done % k as u64) as usize
            } else {
                // Once committed, the chosen arm is the only one past `s` pulls.
                state
                    .counts
                    .iter()
                    .position(|&c| c > *s)
                    .unwrap_or_else(|| state.empirical_best())
            }
        }
        PolicySpec::UniformRandom => rng.below(k),
    }
}
