//! wasm-bindgen exports for the static demo page in `www/`.
//!
//! Every export takes plain numbers or JSON strings and returns a JSON
//! string; the page parses it and draws on a canvas. The `*_json` functions
//! hold the logic and are plain Rust so they can be tested natively.

use bandit_bounds::bounds::{
    kl_bernoulli, lower_curve_alpha, prop1_count_bound, prop2_f_table, prop2_h, thm3_regret_bound,
    ucb1_regret_bound,
};
use bandit_bounds::sim::{growth_exponent, run_episode_on, run_monte_carlo_on};
use bandit_bounds::{ArmDistribution, CheckpointGrid, Environment, PolicySpec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// About `count` log-spaced rounds in `[from, n]`, always including both ends.
fn log_points(from: u64, n: u64, count: usize) -> Vec<u64> {
    let (lo, hi) = ((from as f64).ln(), (n as f64).ln());
    let mut pts: Vec<u64> = (0..count)
        .map(|i| (lo + (hi - lo) * i as f64 / (count - 1).max(1) as f64).exp().round() as u64)
        .chain([from, n])
        .filter(|&p| p >= from && p <= n)
        .collect();
    pts.sort_unstable();
    pts.dedup();
    pts
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Serialize)]
struct Sandwich {
    n: Vec<u64>,
    pulls: Vec<u64>,
    upper: Vec<f64>,
    lower: Vec<f64>,
    h: Vec<f64>,
}

/// UCB(ρ) on two point masses `a > b`: suboptimal pulls between the
/// deterministic lower curve `f(n)` and the cap `(rho / gap^2) ln n + 1`.
pub fn dirac_sandwich_json(a: f64, b: f64, rho: f64, horizon: u64) -> Result<String, String> {
    let env = Environment::new(vec![
        ArmDistribution::dirac(a).map_err(|e| e.to_string())?,
        ArmDistribution::dirac(b).map_err(|e| e.to_string())?,
    ])
    .map_err(|e| e.to_string())?;
    if a <= b {
        return Err("the first arm must have the larger mean (a > b)".into());
    }
    let gap = a - b;
    let points = log_points(2, horizon.max(2), 300);
    let tr = run_episode_on(&env, &PolicySpec::UcbRho(rho), horizon.max(2), 0, &CheckpointGrid::Custom(points))
        .map_err(|e| e.to_string())?;
    let table = prop2_f_table(rho, gap, horizon.max(2)).map_err(|e| e.to_string())?;
    let out = Sandwich {
        pulls: tr.counts.iter().map(|c| c[1]).collect(),
        upper: tr.checkpoints.iter().map(|&n| prop1_count_bound(rho, gap, n as f64).unwrap()).collect(),
        lower: tr.checkpoints.iter().map(|&n| table[n as usize]).collect(),
        h: tr.checkpoints.iter().map(|&n| prop2_h(rho, gap, n as f64)).collect(),
        n: tr.checkpoints,
    };
    Ok(serde_json::to_string(&out).expect("json"))
}

#[derive(Serialize)]
struct RegretView {
    n: Vec<u64>,
    mean: Vec<f64>,
    se: Vec<f64>,
    thm3: Option<Vec<f64>>,
    ucb1: Vec<Option<f64>>,
    /// Lower curve on regret, `sum_k gap_k ln n / D_k`, when every
    /// suboptimal arm is Bernoulli.
    lower: Option<Vec<f64>>,
    slope: Option<f64>,
    r2: Option<f64>,
}

/// Monte Carlo mean regret of UCB(ρ) on `env_json` with the bound curves
/// that apply, plus the log-log growth exponent over the upper two decades.
pub fn regret_vs_bounds_json(
    env_json: &str,
    rho: f64,
    beta: f64,
    horizon: u64,
    reps: u64,
    seed: u64,
) -> Result<String, String> {
    let env: Environment = serde_json::from_str(env_json).map_err(|e| e.to_string())?;
    let analysis = env.analyze().map_err(|e| e.to_string())?;
    let k = env.num_arms() as u64;
    let points = log_points(k, horizon, 60);
    let stats = run_monte_carlo_on(&env, &PolicySpec::UcbRho(rho), horizon, reps, seed, &CheckpointGrid::Custom(points))
        .map_err(|e| e.to_string())?;
    let ns = &stats.checkpoints;
    let thm3 = ns
        .iter()
        .map(|&n| thm3_regret_bound(&env, rho, beta, n as f64))
        .collect::<Result<Vec<_>, _>>()
        .ok();
    let ucb1 = ns
        .iter()
        .map(|&n| ucb1_regret_bound(&env, n as f64).ok().and_then(finite_or_none))
        .collect();
    let suboptimal: Vec<usize> = (0..env.num_arms()).filter(|&i| analysis.gaps[i] > 0.0).collect();
    let lower = ns
        .iter()
        .map(|&n| {
            suboptimal
                .iter()
                .map(|&i| lower_curve_alpha(&env, i, 0.0, n as f64).map(|c| analysis.gaps[i] * c))
                .sum::<Result<f64, _>>()
        })
        .collect::<Result<Vec<_>, _>>()
        .ok();
    let fit = growth_exponent(&stats, (horizon / 100).max(1)..=horizon).ok();
    let out = RegretView {
        n: stats.checkpoints.clone(),
        mean: stats.mean_regret.clone(),
        se: stats.se_regret.clone(),
        thm3,
        ucb1,
        lower,
        slope: fit.map(|f| f.slope),
        r2: fit.map(|f| f.r2),
    };
    Ok(serde_json::to_string(&out).expect("json"))
}

#[derive(Serialize)]
struct KlView {
    q: Vec<f64>,
    kl: Vec<Option<f64>>,
    pinsker: Vec<f64>,
}

/// `KL(Ber(p), Ber(q))` over a grid of `q`, with the Pinsker floor `2 (p - q)^2`.
pub fn kl_curve_json(p: f64, points: usize) -> Result<String, String> {
    if !(0.0..=1.0).contains(&p) {
        return Err(format!("p = {p} is outside [0, 1]"));
    }
    let points = points.max(2);
    let q: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let out = KlView {
        kl: q.iter().map(|&q| finite_or_none(kl_bernoulli(p, q))).collect(),
        pinsker: q.iter().map(|&q| 2.0 * (p - q) * (p - q)).collect(),
        q,
    };
    Ok(serde_json::to_string(&out).expect("json"))
}

#[wasm_bindgen]
pub fn dirac_sandwich(a: f64, b: f64, rho: f64, horizon: u32) -> Result<String, JsValue> {
    dirac_sandwich_json(a, b, rho, horizon as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn regret_vs_bounds(
    env_json: &str,
    rho: f64,
    beta: f64,
    horizon: u32,
    reps: u32,
    seed: u32,
) -> Result<String, JsValue> {
    regret_vs_bounds_json(env_json, rho, beta, horizon as u64, reps as u64, seed as u64)
        .map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn kl_curve(p: f64, points: u32) -> Result<String, JsValue> {
    kl_curve_json(p, points as usize).map_err(|e| JsValue::from_str(&e))
}
