//! Seeded episodes, Monte Carlo aggregation and growth-exponent fits.
//!
//! Regret is recorded as pseudo-regret `sum_k gap_k T_k(n)`, whose
//! expectation is the expected regret. Replication `r` of a Monte Carlo run
//! is seeded with [`derive`]`(base_seed, r)`, and per-replication results are
//! merged in replication order, so aggregates are bit-identical for any
//! thread count.

use std::ops::RangeInclusive;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::policy::{select_arm, PolicySpec, PolicyState};
use crate::rng::{mix64, RngStream};

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of replication `rep`: `mix64(base_seed + rep * 0x9E3779B97F4A7C15)`
/// with wrapping arithmetic. The stride is odd and `mix64` is a bijection,
/// so distinct `rep` values (mod 2^64) give distinct seeds.
pub fn derive(base_seed: u64, rep: u64) -> u64 {
    mix64(base_seed.wrapping_add(rep.wrapping_mul(SEED_STRIDE)))
}

/// Rounds at which an episode records its state.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum CheckpointGrid {
    /// `{1, 2, 5} x 10^j` within `[K, n]`, plus `n` itself.
    #[default]
    Log125,
    /// Every round `1..=n`.
    Every,
    /// Explicit rounds; sorted, deduplicated and clipped to `[1, n]`.
    Custom(Vec<u64>),
}

impl CheckpointGrid {
    pub fn points(&self, num_arms: usize, n: u64) -> Vec<u64> {
        let mut pts: Vec<u64> = match self {
            CheckpointGrid::Log125 => {
                let mut pts = Vec::new();
                let mut decade = 1u64;
                'outer: loop {
                    for m in [1, 2, 5] {
                        let Some(p) = decade.checked_mul(m) else { break 'outer };
                        if p > n {
                            break 'outer;
                        }
                        if p >= num_arms as u64 {
                            pts.push(p);
                        }
                    }
                    match decade.checked_mul(10) {
                        Some(d) => decade = d,
                        None => break,
                    }
                }
                pts.push(n);
                pts
            }
            CheckpointGrid::Every => (1..=n).collect(),
            CheckpointGrid::Custom(v) => v.iter().copied().filter(|&p| p >= 1 && p <= n).collect(),
        };
        pts.sort_unstable();
        pts.dedup();
        pts
    }
}

/// One episode's pull counts and pseudo-regret at each checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub checkpoints: Vec<u64>,
    /// `counts[i][k]`: pulls of arm `k` after round `checkpoints[i]`.
    pub counts: Vec<Vec<u64>>,
    pub regret: Vec<f64>,
}

impl Trajectory {
    pub fn final_counts(&self) -> &[u64] {
        self.counts.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_regret(&self) -> f64 {
        self.regret.last().copied().unwrap_or(0.0)
    }
}

fn pseudo_regret(gaps: &[f64], counts: &[u64]) -> f64 {
    gaps.iter().zip(counts).map(|(g, &c)| g * c as f64).sum()
}

fn check_run(env: &Environment, spec: &PolicySpec, n: u64) -> Result<()> {
    spec.validate(env)?;
    if n < env.num_arms() as u64 {
        return Err(Error::HorizonTooShort { horizon: n, arms: env.num_arms() });
    }
    Ok(())
}

/// Plays `n` rounds on the default log grid.
pub fn run_episode(env: &Environment, spec: &PolicySpec, n: u64, seed: u64) -> Result<Trajectory> {
    run_episode_on(env, spec, n, seed, &CheckpointGrid::Log125)
}

pub fn run_episode_on(
    env: &Environment,
    spec: &PolicySpec,
    n: u64,
    seed: u64,
    grid: &CheckpointGrid,
) -> Result<Trajectory> {
    check_run(env, spec, n)?;
    Ok(play(env, spec, n, seed, &grid.points(env.num_arms(), n), &env.gaps()))
}

fn play(env: &Environment, spec: &PolicySpec, n: u64, seed: u64, points: &[u64], gaps: &[f64]) -> Trajectory {
    let arms = env.arms();
    let mut rng = RngStream::new(seed);
    let mut state = PolicyState::new(arms.len());
    let mut counts = Vec::with_capacity(points.len());
    let mut regret = Vec::with_capacity(points.len());
    let mut next = points.iter().copied().peekable();
    for t in 1..=n {
        let arm = select_arm(&state, spec, &mut rng);
        let reward = arms[arm].sample(&mut rng);
        state.update(arm, reward);
        if next.peek() == Some(&t) {
            next.next();
            regret.push(pseudo_regret(gaps, state.counts()));
            counts.push(state.counts().to_vec());
        }
    }
    Trajectory { checkpoints: points.to_vec(), counts, regret }
}

/// Per-checkpoint means and standard errors over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateStats {
    pub checkpoints: Vec<u64>,
    pub mean_regret: Vec<f64>,
    pub se_regret: Vec<f64>,
    /// `mean_counts[i][k]`, indexed like [`Trajectory::counts`].
    pub mean_counts: Vec<Vec<f64>>,
    pub se_counts: Vec<Vec<f64>>,
    pub reps: u64,
    pub base_seed: u64,
}

/// Mean and standard error (sample standard deviation over `sqrt(len)`),
/// accumulated in iteration order as offsets from the first value, so
/// constant samples give their value back exactly with zero error.
fn mean_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let mut iter = values.clone();
    let Some(first) = iter.next() else {
        return (f64::NAN, f64::NAN);
    };
    let (shift_sum, len) = values.clone().fold((0.0, 0usize), |(s, c), x| (s + (x - first), c + 1));
    let shift_mean = shift_sum / len as f64;
    let mean = first + shift_mean;
    if len < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|x| (x - first - shift_mean) * (x - first - shift_mean)).sum();
    let var = ss / (len - 1) as f64;
    (mean, (var / len as f64).sqrt())
}

impl AggregateStats {
    fn from_trajectories(trajs: &[Trajectory], base_seed: u64) -> Self {
        let checkpoints = trajs[0].checkpoints.clone();
        let k = trajs[0].counts.first().map_or(0, Vec::len);
        let mut stats = AggregateStats {
            mean_regret: Vec::with_capacity(checkpoints.len()),
            se_regret: Vec::with_capacity(checkpoints.len()),
            mean_counts: Vec::with_capacity(checkpoints.len()),
            se_counts: Vec::with_capacity(checkpoints.len()),
            checkpoints,
            reps: trajs.len() as u64,
            base_seed,
        };
        for i in 0..stats.checkpoints.len() {
            let (m, se) = mean_se(trajs.iter().map(|t| t.regret[i]));
            stats.mean_regret.push(m);
            stats.se_regret.push(se);
            let (ms, ses) = (0..k)
                .map(|arm| mean_se(trajs.iter().map(|t| t.counts[i][arm] as f64)))
                .unzip();
            stats.mean_counts.push(ms);
            stats.se_counts.push(ses);
        }
        stats
    }

    pub fn num_arms(&self) -> usize {
        self.mean_counts.first().map_or(0, Vec::len)
    }

    /// Index of checkpoint `n`, if recorded.
    pub fn position(&self, n: u64) -> Option<usize> {
        self.checkpoints.binary_search(&n).ok()
    }

    /// CSV with header `n,mean_regret,se_regret,mean_T_1,...,mean_T_K`.
    /// Arms are numbered from 1 in the header; numbers use the shortest
    /// representation that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,mean_regret,se_regret");
        for k in 1..=self.num_arms() {
            out.push_str(&format!(",mean_T_{k}"));
        }
        out.push('\n');
        for (i, n) in self.checkpoints.iter().enumerate() {
            out.push_str(&format!("{n},{},{}", self.mean_regret[i], self.se_regret[i]));
            for c in &self.mean_counts[i] {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }
}

/// `reps` independent episodes on the default log grid.
pub fn run_monte_carlo(
    env: &Environment,
    spec: &PolicySpec,
    n: u64,
    reps: u64,
    base_seed: u64,
) -> Result<AggregateStats> {
    run_monte_carlo_on(env, spec, n, reps, base_seed, &CheckpointGrid::Log125)
}

pub fn run_monte_carlo_on(
    env: &Environment,
    spec: &PolicySpec,
    n: u64,
    reps: u64,
    base_seed: u64,
    grid: &CheckpointGrid,
) -> Result<AggregateStats> {
    check_run(env, spec, n)?;
    if reps == 0 {
        return Err(Error::param("replications", "must be at least 1"));
    }
    let points = grid.points(env.num_arms(), n);
    let gaps = env.gaps();
    let episode = |r: u64| play(env, spec, n, derive(base_seed, r), &points, &gaps);

    #[cfg(feature = "parallel")]
    let trajs: Vec<Trajectory> = {
        use rayon::prelude::*;
        (0..reps).into_par_iter().map(episode).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let trajs: Vec<Trajectory> = (0..reps).map(episode).collect();

    Ok(AggregateStats::from_trajectories(&trajs, base_seed))
}

/// Least-squares fit of `ln y` against `ln n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

/// Fits `ln y = intercept + slope ln n` over paired samples.
pub fn log_log_fit(ns: &[u64], ys: &[f64]) -> Result<GrowthFit> {
    if ns.len() < 3 {
        return Err(Error::TooFewCheckpoints(ns.len()));
    }
    if let Some(i) = ys.iter().position(|&y| !(y > 0.0)) {
        return Err(Error::NonPositiveRegret(ns[i]));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ls.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let syy: f64 = ls.iter().map(|y| (y - ybar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(GrowthFit { slope, intercept: ybar - slope * xbar, r2, points: xs.len() })
}

/// Log-log slope of mean regret over checkpoints whose round lies in `window`.
pub fn growth_exponent(stats: &AggregateStats, window: RangeInclusive<u64>) -> Result<GrowthFit> {
    let (ns, ys): (Vec<u64>, Vec<f64>) = stats
        .checkpoints
        .iter()
        .zip(&stats.mean_regret)
        .filter(|(n, _)| window.contains(n))
        .map(|(&n, &y)| (n, y))
        .unzip();
    log_log_fit(&ns, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ArmDistribution::{Bernoulli, Dirac};

    fn dirac_pair() -> Environment {
        Environment::new(vec![Dirac(0.9), Dirac(0.6)]).unwrap()
    }

    #[test]
    fn log_grid() {
        assert_eq!(
            CheckpointGrid::Log125.points(2, 1000),
            vec![2, 5, 10, 20, 50, 100, 200, 500, 1000]
        );
        assert_eq!(CheckpointGrid::Log125.points(3, 130), vec![5, 10, 20, 50, 100, 130]);
        assert_eq!(CheckpointGrid::Custom(vec![9, 3, 3, 0, 50]).points(2, 10), vec![3, 9]);
    }

    #[test]
    fn derive_distinct_and_stable() {
        assert_eq!(derive(0, 0), mix64(0));
        assert_eq!(derive(7, 3), derive(7, 3));
        let mut rng = RngStream::new(11);
        for _ in 0..1_000_000 {
            let s = rng.next_u64();
            assert_ne!(derive(s, 0), derive(s, 1));
        }
    }

    #[test]
    fn derive_collision_free() {
        let mut seeds: Vec<u64> = (0..1_000_000).map(|r| derive(0xDEAD_BEEF, r)).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 1_000_000);
    }

    #[test]
    fn horizon_equal_to_arms() {
        let env = Environment::new(vec![Dirac(0.9), Dirac(0.6), Dirac(0.2)]).unwrap();
        let tr = run_episode(&env, &PolicySpec::UcbRho(0.3), 3, 1).unwrap();
        assert_eq!(tr.checkpoints, vec![3]);
        assert_eq!(tr.final_counts(), &[1, 1, 1]);
        let gaps: f64 = env.gaps().iter().sum();
        assert_eq!(tr.final_regret(), gaps);
    }

    #[test]
    fn horizon_too_short() {
        assert_eq!(
            run_episode(&dirac_pair(), &PolicySpec::UcbRho(0.3), 1, 0),
            Err(Error::HorizonTooShort { horizon: 1, arms: 2 })
        );
    }

    #[test]
    fn dirac_prop1_cap_at_horizon() {
        let tr = run_episode(&dirac_pair(), &PolicySpec::UcbRho(0.3), 100_000, 0).unwrap();
        let cap = 0.3 * 1e5f64.ln() / (0.3 * 0.3) + 1.0;
        assert!(tr.final_counts()[1] as f64 <= cap);
    }

    #[test]
    fn uniform_random_is_balanced() {
        let env = Environment::new(vec![Bernoulli(0.75), Bernoulli(0.5)]).unwrap();
        let n = 10_000u64;
        let tr = run_episode(&env, &PolicySpec::UniformRandom, n, 42).unwrap();
        let t2 = tr.final_counts()[1] as f64;
        assert!((t2 - n as f64 / 2.0).abs() <= 3.0 * (n as f64).sqrt(), "{t2}");
    }

    #[test]
    fn single_rep_has_zero_se() {
        let env = Environment::new(vec![Bernoulli(0.75), Bernoulli(0.5)]).unwrap();
        let spec = PolicySpec::UcbRho(0.5);
        let stats = run_monte_carlo(&env, &spec, 2000, 1, 9).unwrap();
        let tr = run_episode(&env, &spec, 2000, derive(9, 0)).unwrap();
        assert_eq!(stats.mean_regret, tr.regret);
        assert!(stats.se_regret.iter().all(|&s| s == 0.0));
        assert!(run_monte_carlo(&env, &spec, 2000, 0, 9).is_err());
    }

    #[test]
    fn dirac_has_zero_variance() {
        let stats = run_monte_carlo(&dirac_pair(), &PolicySpec::UcbRho(0.3), 5000, 16, 3).unwrap();
        assert!(stats.se_regret.iter().all(|&s| s == 0.0));
        assert!(stats.se_counts.iter().flatten().all(|&s| s == 0.0));
    }

    #[test]
    fn csv_layout() {
        let stats = run_monte_carlo(&dirac_pair(), &PolicySpec::UcbRho(0.3), 10, 2, 3).unwrap();
        let csv = stats.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,mean_regret,se_regret,mean_T_1,mean_T_2"));
        assert_eq!(lines.next(), Some("2,0.30000000000000004,0,1,1"));
        assert_eq!(csv.lines().count(), 1 + 3);
    }

    #[test]
    fn power_law_slope() {
        let ns: Vec<u64> = CheckpointGrid::Log125.points(2, 100_000);
        let ys: Vec<f64> = ns.iter().map(|&n| 3.7 * (n as f64).powf(0.6)).collect();
        let fit = log_log_fit(&ns, &ys).unwrap();
        assert!((fit.slope - 0.6).abs() < 1e-6);
        assert!((fit.r2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn log_law_slope_shrinks() {
        let slope = |hi: u64| {
            let ns = CheckpointGrid::Log125.points(2, hi);
            let ns: Vec<u64> = ns.into_iter().filter(|&n| n >= 10).collect();
            let ys: Vec<f64> = ns.iter().map(|&n| 2.0 * (n as f64).ln()).collect();
            log_log_fit(&ns, &ys).unwrap().slope
        };
        let (a, b, c) = (slope(1_000), slope(1_000_000), slope(1_000_000_000_000));
        assert!(a > b && b > c && c < 0.1, "{a} {b} {c}");
    }

    #[test]
    fn fit_errors() {
        assert_eq!(log_log_fit(&[1, 2], &[1.0, 2.0]), Err(Error::TooFewCheckpoints(2)));
        assert_eq!(log_log_fit(&[1, 2, 3], &[1.0, 0.0, 2.0]), Err(Error::NonPositiveRegret(2)));
    }
}
