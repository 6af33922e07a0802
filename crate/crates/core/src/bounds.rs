//! Analytic count and regret bounds, evaluated as curves in the horizon `n`.
//!
//! Upper bounds on pull counts and regret for UCB-type policies, the
//! logarithmic lower-bound curve driven by the Bernoulli KL divergence, the
//! explore-then-commit regret heuristic and the sufficient conditions for
//! Hannan consistency of generalized UCB.
//!
//! Every evaluator that divides by a gap refuses degenerate environments.
//! KL divergences use the extended reals: `+inf` is a value, not an error.

use std::fmt::Write as _;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::policy::ExplorationFn;

/// Relative step of the central difference used for `h'`.
pub const PROP2_DIFF_STEP: f64 = 1e-3;

fn check_gap(name: &'static str, gap: f64) -> Result<f64> {
    if gap > 0.0 && gap <= 1.0 {
        Ok(gap)
    } else {
        Err(Error::param(name, format!("gap must lie in (0, 1], got {gap}")))
    }
}

fn check_positive(name: &'static str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {x}")))
    }
}

fn check_open_unit(name: &'static str, x: f64) -> Result<f64> {
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(Error::param(name, format!("must lie in (0, 1), got {x}")))
    }
}

/// Positive gaps of a non-degenerate environment.
fn positive_gaps(env: &Environment) -> Result<Vec<f64>> {
    let analysis = env.analyze()?;
    Ok(analysis.gaps.into_iter().filter(|&g| g > 0.0).collect())
}

// ---------------------------------------------------------------------------
// Divergences

/// `x ln(x / y)` with `0 ln 0 = 0` and `x ln(x / 0) = +inf` for `x > 0`.
fn xlogx_over_y(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        f64::INFINITY
    } else {
        x * (x / y).ln()
    }
}

/// `KL(Ber(p), Ber(q))` in nats.
pub fn kl_bernoulli(p: f64, q: f64) -> f64 {
    if p == q {
        return 0.0;
    }
    let kl = xlogx_over_y(p, q) + xlogx_over_y(1.0 - p, 1.0 - q);
    kl.max(0.0)
}

/// `D_k` for a Bernoulli arm: the infimum of `KL(Ber(mu_k), Ber(q))` over
/// `q > mu*`, which by continuity equals `KL(Ber(mu_k), Ber(mu*))`.
pub fn dk_bernoulli(env: &Environment, k: usize) -> Result<f64> {
    if k >= env.num_arms() {
        return Err(Error::param("k", format!("arm {k} out of range")));
    }
    let gaps = env.gaps();
    if gaps[k] <= 0.0 {
        return Err(Error::NotSuboptimal(k));
    }
    let mu_k = env.arms()[k].as_bernoulli().ok_or(Error::UnsupportedFamily(k))?;
    let best = env.best_mean();
    if best >= 1.0 {
        return Err(Error::InfiniteDivergence);
    }
    Ok(kl_bernoulli(mu_k, best))
}

/// Upper bound `ln(1 / (1 - gap))` on `D_k` when every arm may be a
/// two-point mixture and arm `k` is `delta_0` against a `delta_gap` best arm.
pub fn dk_twopoint_upper(gap: f64) -> Result<f64> {
    let gap = check_open_unit("gap", gap)?;
    Ok(-(-gap).ln_1p())
}

// ---------------------------------------------------------------------------
// Two Dirac arms

/// `(rho / gap^2) ln n + 1`: deterministic cap on the suboptimal arm's pulls
/// under UCB(ρ) when both arms are point masses.
pub fn prop1_count_bound(rho: f64, gap: f64, n: f64) -> Result<f64> {
    let rho = check_positive("rho", rho)?;
    let gap = check_gap("gap", gap)?;
    Ok(prop1_raw(rho, gap, n))
}

fn prop1_raw(rho: f64, gap: f64, n: f64) -> f64 {
    rho / (gap * gap) * n.ln() + 1.0
}

/// `h(t) = (rho / gap^2) ln t (1 + sqrt(2 rho ln t / ((t - 1) gap^2)))^-2`.
pub fn prop2_h(rho: f64, gap: f64, t: f64) -> f64 {
    let g2 = gap * gap;
    let l = t.ln();
    let corr = 1.0 + (2.0 * rho * l / ((t - 1.0) * g2)).sqrt();
    rho / g2 * l / (corr * corr)
}

/// `min(h'(s), 1)` with `h'` by central differences of relative step
/// [`PROP2_DIFF_STEP`].
fn prop2_slope(rho: f64, gap: f64, s: f64) -> f64 {
    let d = PROP2_DIFF_STEP * s;
    let deriv = (prop2_h(rho, gap, s + d) - prop2_h(rho, gap, s - d)) / (2.0 * d);
    deriv.min(1.0)
}

/// `f(n) = int_2^n min(h'(s), 1) ds - h(2)`, by the trapezoid rule on the
/// integer grid (plus one partial panel when `n` is fractional).
pub fn prop2_f(rho: f64, gap: f64, n: f64) -> Result<f64> {
    let rho = check_positive("rho", rho)?;
    let gap = check_gap("gap", gap)?;
    if !(n >= 2.0) {
        return Err(Error::param("n", format!("prop2 f needs n >= 2, got {n}")));
    }
    Ok(prop2_f_raw(rho, gap, n))
}

fn prop2_f_raw(rho: f64, gap: f64, n: f64) -> f64 {
    let last = n.floor() as u64;
    let mut integral = 0.0;
    let mut prev = prop2_slope(rho, gap, 2.0);
    for j in 3..=last {
        let g = prop2_slope(rho, gap, j as f64);
        integral += 0.5 * (prev + g);
        prev = g;
    }
    let frac = n - last as f64;
    if frac > 0.0 {
        integral += 0.5 * frac * (prev + prop2_slope(rho, gap, n));
    }
    integral - prop2_h(rho, gap, 2.0)
}

/// `f(n)` for every integer `n` in `0..=n_max`; entries 0 and 1 are NaN.
///
/// The accumulation order matches [`prop2_f`], so `table[n]` and
/// `prop2_f(rho, gap, n)` agree bit for bit.
pub fn prop2_f_table(rho: f64, gap: f64, n_max: u64) -> Result<Vec<f64>> {
    let rho = check_positive("rho", rho)?;
    let gap = check_gap("gap", gap)?;
    let h2 = prop2_h(rho, gap, 2.0);
    let mut table = vec![f64::NAN; (n_max + 1) as usize];
    if n_max < 2 {
        return Ok(table);
    }
    table[2] = 0.0 - h2;
    let mut integral = 0.0;
    let mut prev = prop2_slope(rho, gap, 2.0);
    for j in 3..=n_max {
        let g = prop2_slope(rho, gap, j as f64);
        integral += 0.5 * (prev + g);
        prev = g;
        table[j as usize] = integral - h2;
    }
    Ok(table)
}

/// `f_2(n) / gap^2 + 1`: cap on the suboptimal arm's pulls for UCB with
/// exploration function `f_2` on two point masses.
pub fn dirac_generic_count_bound(f2: &ExplorationFn, gap: f64, n: f64) -> Result<f64> {
    let gap = check_gap("gap", gap)?;
    Ok(f2.eval(n) / (gap * gap) + 1.0)
}

// ---------------------------------------------------------------------------
// Stochastic upper bounds

/// Regret bound of UCB(ρ) for `2 rho beta < 1`, with peeling parameter `beta`:
///
/// `sum_{k: gap_k > 0} 4 ln n / gap_k
///     + 2 gap_k (ln n / ln(1/beta) + 1) n^(1 - 2 rho beta) / (1 - 2 rho beta)`.
pub fn thm3_regret_bound(env: &Environment, rho: f64, beta: f64, n: f64) -> Result<f64> {
    let (rho, beta) = check_thm3_params(rho, beta)?;
    let gaps = positive_gaps(env)?;
    Ok(thm3_raw(&gaps, rho, beta, n))
}

fn check_thm3_params(rho: f64, beta: f64) -> Result<(f64, f64)> {
    let rho = check_positive("rho", rho)?;
    let beta = check_open_unit("beta", beta)?;
    if 2.0 * rho * beta >= 1.0 {
        return Err(Error::param(
            "rho",
            format!("needs 2 rho beta < 1, got 2 * {rho} * {beta} = {}", 2.0 * rho * beta),
        ));
    }
    if rho >= 0.5 {
        return Err(Error::param("rho", format!("must lie in (0, 1/2), got {rho}")));
    }
    Ok((rho, beta))
}

fn thm3_raw(gaps: &[f64], rho: f64, beta: f64, n: f64) -> f64 {
    let l = n.ln();
    let c = 1.0 - 2.0 * rho * beta;
    let peel = (l / (1.0 / beta).ln() + 1.0) * n.powf(c) / c;
    gaps.iter().map(|&g| 4.0 * l / g + 2.0 * g * peel).sum()
}

/// One term of the count bound's tail sum:
/// `(1 + ln t / ln(1/beta)) (exp(-2 beta f_k(t)) + exp(-2 beta f_star(t)))`.
pub fn lemma1_summand(f_k: &ExplorationFn, f_star: &ExplorationFn, beta: f64, t: f64) -> f64 {
    (1.0 + t.ln() / (1.0 / beta).ln())
        * ((-2.0 * beta * f_k.eval(t)).exp() + (-2.0 * beta * f_star.eval(t)).exp())
}

/// Count bound for a suboptimal arm under generalized UCB:
/// `u + sum_{t=u+1}^n lemma1_summand(t)` with `u = ceil(4 f_k(n) / gap_k^2)`.
pub fn lemma1_count_bound(
    f_k: &ExplorationFn,
    f_star: &ExplorationFn,
    gap: f64,
    beta: f64,
    n: u64,
) -> Result<f64> {
    let gap = check_gap("gap", gap)?;
    let beta = check_open_unit("beta", beta)?;
    Ok(lemma1_raw(f_k, f_star, gap, beta, n))
}

fn lemma1_raw(f_k: &ExplorationFn, f_star: &ExplorationFn, gap: f64, beta: f64, n: u64) -> f64 {
    let u = (4.0 * f_k.eval(n as f64) / (gap * gap)).ceil();
    let first = u as u64 + 1;
    let tail: f64 = (first..=n)
        .map(|t| lemma1_summand(f_k, f_star, beta, t as f64))
        .sum();
    u + tail
}

/// `12 sum_{k: gap_k > 0} ln n / gap_k`, the classical UCB1 regret bound.
pub fn ucb1_regret_bound(env: &Environment, n: f64) -> Result<f64> {
    if !(n > 1.0) {
        return Err(Error::param("n", format!("UCB1 bound needs n > 1, got {n}")));
    }
    let gaps = positive_gaps(env)?;
    Ok(ucb1_raw(&gaps, n))
}

fn ucb1_raw(gaps: &[f64], n: f64) -> f64 {
    12.0 * gaps.iter().map(|g| n.ln() / g).sum::<f64>()
}

// ---------------------------------------------------------------------------
// Lower bound

/// `(1 - alpha) ln n / D_k`: asymptotic lower curve on `E[T_k(n)]` for
/// α-consistent policies. `alpha = 0` is the classical consistent case.
pub fn lower_curve_alpha(env: &Environment, k: usize, alpha: f64, n: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("must lie in [0, 1), got {alpha}")));
    }
    let dk = dk_bernoulli(env, k)?;
    Ok(lower_raw(alpha, dk, n))
}

fn lower_raw(alpha: f64, dk: f64, n: f64) -> f64 {
    (1.0 - alpha) * n.ln() / dk
}

// ---------------------------------------------------------------------------
// Explore-then-commit

/// Gaussian tail approximation of the probability that the best arm's
/// empirical mean after `s` pulls falls below the second-best mean,
/// `(1/sqrt(2 pi)) (sigma / (gap sqrt s)) exp(-gap^2 s / (2 sigma^2))`,
/// clamped to `[0, 1]`.
pub fn etc_miss_probability(gap: f64, sigma: f64, s: u64) -> Result<f64> {
    let gap = check_open_unit("gap", gap)?;
    let sigma = check_positive("sigma", sigma)?;
    if s == 0 {
        return Err(Error::param("s", "must be at least 1"));
    }
    let s = s as f64;
    let z = gap * s.sqrt() / sigma;
    let p = (-0.5 * z * z).exp() / (z * (2.0 * std::f64::consts::PI).sqrt());
    Ok(p.clamp(0.0, 1.0))
}

/// Two-arm explore-then-commit regret estimate `gap s + p gap (n - 2 s)`:
/// `s` suboptimal pulls when the commit is right, `n - s` when it is wrong.
pub fn etc_regret_estimate(gap: f64, sigma: f64, s: u64, n: u64) -> Result<f64> {
    let p = etc_miss_probability(gap, sigma, s)?;
    if n < 2 * s {
        return Err(Error::param("n", format!("horizon {n} ends inside the exploration phase (2s = {})", 2 * s)));
    }
    Ok(gap * s as f64 + p * gap * (n - 2 * s) as f64)
}

// ---------------------------------------------------------------------------
// Hannan consistency

#[derive(Debug, Clone, PartialEq)]
pub struct HannanReport {
    pub passes: bool,
    pub reasons: Vec<String>,
}

/// Checks the sufficient conditions for Hannan consistency of generalized
/// UCB: each `f_k(n) = o(n)` and `f_k(n) >= gamma ln ln n` eventually, with
/// `gamma > 1/2`.
///
/// In the parametric family, `o(n)` holds iff `c3 = 0` or `e < 1`, and the
/// `ln ln` floor holds iff `c1 >= gamma`, `c2 > 0`, or `c3 > 0` with `e > 0`.
pub fn hannan_sufficient(fs: &[ExplorationFn], gamma: f64) -> HannanReport {
    let mut passes = true;
    let mut reasons = Vec::new();
    if gamma > 0.5 {
        reasons.push(format!("gamma = {gamma} > 1/2"));
    } else {
        passes = false;
        reasons.push(format!("gamma = {gamma} fails gamma > 1/2"));
    }
    for (k, f) in fs.iter().enumerate() {
        if f.c3 == 0.0 {
            reasons.push(format!("f_{k}: o(n) holds since c3 = 0"));
        } else if f.e < 1.0 {
            reasons.push(format!("f_{k}: o(n) holds since e = {} < 1", f.e));
        } else {
            passes = false;
            reasons.push(format!("f_{k}: fails o(n), c3 = {} with e = 1", f.c3));
        }

        if f.c2 > 0.0 {
            reasons.push(format!("f_{k}: ln ln floor holds via c2 = {} > 0", f.c2));
        } else if f.c3 > 0.0 && f.e > 0.0 {
            reasons.push(format!("f_{k}: ln ln floor holds via c3 n^{}", f.e));
        } else if f.c1 >= gamma {
            reasons.push(format!("f_{k}: ln ln floor holds via c1 = {} >= gamma", f.c1));
        } else {
            passes = false;
            reasons.push(format!("f_{k}: fails ln ln floor, c1 = {} < gamma = {gamma}", f.c1));
        }
    }
    HannanReport { passes, reasons }
}

// ---------------------------------------------------------------------------
// Curves

/// A bound with its parameters bound in, ready to evaluate on a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundCurve {
    Prop1 { rho: f64, gap: f64 },
    Prop2H { rho: f64, gap: f64 },
    Prop2F { rho: f64, gap: f64 },
    Thm3 { gaps: Vec<f64>, rho: f64, beta: f64 },
    Lemma1 { f_k: ExplorationFn, f_star: ExplorationFn, gap: f64, beta: f64 },
    Lower { alpha: f64, dk: f64, k: usize },
    Ucb1 { gaps: Vec<f64> },
    DiracGeneric { f: ExplorationFn, gap: f64 },
    EtcEstimate { gap: f64, sigma: f64, s: u64 },
}

impl BoundCurve {
    pub fn prop1(rho: f64, gap: f64) -> Result<Self> {
        prop1_count_bound(rho, gap, 1.0)?;
        Ok(BoundCurve::Prop1 { rho, gap })
    }

    pub fn prop2_h(rho: f64, gap: f64) -> Result<Self> {
        prop1_count_bound(rho, gap, 1.0)?;
        Ok(BoundCurve::Prop2H { rho, gap })
    }

    pub fn prop2_f(rho: f64, gap: f64) -> Result<Self> {
        prop1_count_bound(rho, gap, 1.0)?;
        Ok(BoundCurve::Prop2F { rho, gap })
    }

    pub fn thm3(env: &Environment, rho: f64, beta: f64) -> Result<Self> {
        let (rho, beta) = check_thm3_params(rho, beta)?;
        Ok(BoundCurve::Thm3 { gaps: positive_gaps(env)?, rho, beta })
    }

    /// Lemma 1 curve for arm `k` of `env`, with per-arm functions `fs`.
    pub fn lemma1(env: &Environment, k: usize, fs: &[ExplorationFn], beta: f64) -> Result<Self> {
        let analysis = env.analyze()?;
        if fs.len() != env.num_arms() {
            return Err(Error::param("fs", format!("{} functions for {} arms", fs.len(), env.num_arms())));
        }
        let gap = *analysis.gaps.get(k).ok_or_else(|| Error::param("k", format!("arm {k} out of range")))?;
        if gap <= 0.0 {
            return Err(Error::NotSuboptimal(k));
        }
        lemma1_count_bound(&fs[k], &fs[analysis.best_arm], gap, beta, 1)?;
        Ok(BoundCurve::Lemma1 { f_k: fs[k], f_star: fs[analysis.best_arm], gap, beta })
    }

    pub fn lower(env: &Environment, k: usize, alpha: f64) -> Result<Self> {
        lower_curve_alpha(env, k, alpha, 1.0)?;
        Ok(BoundCurve::Lower { alpha, dk: dk_bernoulli(env, k)?, k })
    }

    pub fn ucb1(env: &Environment) -> Result<Self> {
        Ok(BoundCurve::Ucb1 { gaps: positive_gaps(env)? })
    }

    pub fn dirac_generic(f: ExplorationFn, gap: f64) -> Result<Self> {
        check_gap("gap", gap)?;
        Ok(BoundCurve::DiracGeneric { f, gap })
    }

    pub fn etc_estimate(gap: f64, sigma: f64, s: u64) -> Result<Self> {
        etc_miss_probability(gap, sigma, s)?;
        Ok(BoundCurve::EtcEstimate { gap, sigma, s })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BoundCurve::Prop1 { .. } => "prop1",
            BoundCurve::Prop2H { .. } => "prop2_h",
            BoundCurve::Prop2F { .. } => "prop2_f",
            BoundCurve::Thm3 { .. } => "thm3",
            BoundCurve::Lemma1 { .. } => "lemma1",
            BoundCurve::Lower { .. } => "lower",
            BoundCurve::Ucb1 { .. } => "ucb1",
            BoundCurve::DiracGeneric { .. } => "dirac_generic",
            BoundCurve::EtcEstimate { .. } => "etc_estimate",
        }
    }

    /// `key=value` pairs joined by `;`, safe to embed in a CSV field.
    pub fn params(&self) -> String {
        let mut out = String::new();
        let fmt_f = |f: &ExplorationFn| format!("{}+{}lnln+{}ln+{}n^{}", f.c0, f.c1, f.c2, f.c3, f.e);
        match self {
            BoundCurve::Prop1 { rho, gap }
            | BoundCurve::Prop2H { rho, gap }
            | BoundCurve::Prop2F { rho, gap } => {
                let _ = write!(out, "rho={rho};gap={gap}");
            }
            BoundCurve::Thm3 { gaps, rho, beta } => {
                let _ = write!(out, "rho={rho};beta={beta};gaps={}", join(gaps));
            }
            BoundCurve::Lemma1 { f_k, f_star, gap, beta } => {
                let _ = write!(out, "f_k={};f_star={};gap={gap};beta={beta}", fmt_f(f_k), fmt_f(f_star));
            }
            BoundCurve::Lower { alpha, dk, k } => {
                let _ = write!(out, "arm={k};alpha={alpha};dk={dk}");
            }
            BoundCurve::Ucb1 { gaps } => {
                let _ = write!(out, "gaps={}", join(gaps));
            }
            BoundCurve::DiracGeneric { f, gap } => {
                let _ = write!(out, "f={};gap={gap}", fmt_f(f));
            }
            BoundCurve::EtcEstimate { gap, sigma, s } => {
                let _ = write!(out, "gap={gap};sigma={sigma};s={s}");
            }
        }
        out
    }

    /// Smallest horizon at which the curve is defined.
    pub fn n_min(&self) -> u64 {
        match self {
            BoundCurve::Prop2H { .. } | BoundCurve::Prop2F { .. } | BoundCurve::Ucb1 { .. } => 2,
            BoundCurve::EtcEstimate { s, .. } => 2 * s,
            _ => 1,
        }
    }

    /// Value at horizon `n`. NaN below [`BoundCurve::n_min`].
    pub fn eval(&self, n: f64) -> f64 {
        if n < self.n_min() as f64 {
            return f64::NAN;
        }
        match self {
            BoundCurve::Prop1 { rho, gap } => prop1_raw(*rho, *gap, n),
            BoundCurve::Prop2H { rho, gap } => prop2_h(*rho, *gap, n),
            BoundCurve::Prop2F { rho, gap } => prop2_f_raw(*rho, *gap, n),
            BoundCurve::Thm3 { gaps, rho, beta } => thm3_raw(gaps, *rho, *beta, n),
            BoundCurve::Lemma1 { f_k, f_star, gap, beta } => {
                lemma1_raw(f_k, f_star, *gap, *beta, n.floor() as u64)
            }
            BoundCurve::Lower { alpha, dk, .. } => lower_raw(*alpha, *dk, n),
            BoundCurve::Ucb1 { gaps } => ucb1_raw(gaps, n),
            BoundCurve::DiracGeneric { f, gap } => f.eval(n) / (gap * gap) + 1.0,
            BoundCurve::EtcEstimate { gap, sigma, s } => {
                etc_regret_estimate(*gap, *sigma, *s, n.floor() as u64).unwrap_or(f64::NAN)
            }
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join("/")
}

#[cfg(test)]
mod tests;
