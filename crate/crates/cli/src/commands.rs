use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bandit_bounds::bounds::{prop2_f_table, BoundCurve};
use bandit_bounds::sim::{growth_exponent, run_episode_on, run_monte_carlo};
use bandit_bounds::{CheckpointGrid, Environment, PolicySpec};

use crate::config::{suboptimal_arm, CurveRequest, ExperimentConfig};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Verify,
    Curves,
    Exponent,
}

#[derive(Debug, Clone)]
pub struct Options {
    pub command: Command,
    pub config: PathBuf,
    /// Overrides the config's `output`; defaults to `out`.
    pub out: Option<PathBuf>,
    /// Worker threads. Changes speed only, never results.
    pub threads: Option<usize>,
    /// Overrides the config's `seed`.
    pub seed: Option<u64>,
}

/// Runs one command and returns the text report printed on stdout.
pub fn run(opts: &Options) -> Result<String, CliError> {
    let mut config = ExperimentConfig::load(&opts.config)?;
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    let out = opts
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    let body = || match opts.command {
        Command::Simulate => simulate(&config, &out),
        Command::Verify => verify(&config, &out),
        Command::Curves => curves(&config, &out),
        Command::Exponent => exponent(&config, &out),
    };
    match opts.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Config(format!("--threads {k}: {e}")))?
            .install(body),
        None => body(),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let io = |path: &Path| {
        let path = path.to_owned();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(io(&path))?;
    Ok(path)
}

fn require_policies(config: &ExperimentConfig) -> Result<(), CliError> {
    if config.policies.is_empty() {
        return Err(CliError::Config("policies: at least one policy is required".into()));
    }
    Ok(())
}

fn simulate(config: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    require_policies(config)?;
    let mut report = String::new();
    let mut files = Vec::new();
    for (i, spec) in config.policies.iter().enumerate() {
        let stats = run_monte_carlo(
            &config.environment,
            spec,
            config.horizon(),
            config.replications(),
            config.seed,
        )?;
        let name = format!("stats_{}.csv", i + 1);
        write_file(out, &name, &stats.to_csv())?;
        let last = stats.checkpoints.len() - 1;
        let _ = writeln!(
            report,
            "{}: n={} mean_regret={} se={} -> {name}",
            spec.label(),
            stats.checkpoints[last],
            stats.mean_regret[last],
            stats.se_regret[last]
        );
        files.push(name);
    }
    let sidecar = serde_json::json!({
        "command": "simulate",
        "base_seed": config.seed,
        "outputs": files,
        "config": config,
    });
    write_file(out, "run.json", &serde_json::to_string_pretty(&sidecar).expect("json"))?;
    Ok(report)
}

struct Check {
    n: u64,
    observed: f64,
    bound: f64,
    pass: bool,
}

fn dirac_pair(env: &Environment, what: &str) -> Result<usize, CliError> {
    if env.num_arms() != 2 || !env.is_all_dirac() {
        return Err(CliError::Config(format!(
            "verify {what}: needs two Dirac arms, the environment does not match"
        )));
    }
    suboptimal_arm(&env.analyze()?.gaps)
}

fn verify(config: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    let request = config
        .verify
        .as_ref()
        .ok_or_else(|| CliError::Config("verify: no bound requested".into()))?;
    let env = &config.environment;
    let n = config.horizon();
    let curve = request.build(env)?;
    let log_grid = CheckpointGrid::Log125.points(env.num_arms(), n);

    // Deterministic sandwiches are checked at every round; the report lists
    // the log-grid rounds.
    let (policy, checks, exact): (PolicySpec, Vec<Check>, bool) = match request {
        CurveRequest::Prop1 { rho } | CurveRequest::Prop2F { rho } => {
            let sub = dirac_pair(env, curve.kind())?;
            let spec = PolicySpec::UcbRho(*rho);
            let tr = run_episode_on(env, &spec, n, config.seed, &CheckpointGrid::Every)?;
            let lower = matches!(request, CurveRequest::Prop2F { .. });
            let table = if lower {
                prop2_f_table(*rho, env.analyze()?.min_gap, n)?
            } else {
                Vec::new()
            };
            let checks = tr
                .checkpoints
                .iter()
                .zip(&tr.counts)
                .filter(|(&t, _)| !lower || t >= 2)
                .map(|(&t, c)| {
                    let observed = c[sub] as f64;
                    if lower {
                        let bound = table[t as usize];
                        Check { n: t, observed, bound, pass: observed >= bound }
                    } else {
                        let bound = curve.eval(t as f64);
                        Check { n: t, observed, bound, pass: observed <= bound }
                    }
                })
                .collect();
            (spec, checks, true)
        }
        CurveRequest::DiracGeneric { fs } => {
            let sub = dirac_pair(env, curve.kind())?;
            let spec = PolicySpec::UcbGeneric(fs.clone());
            let tr = run_episode_on(env, &spec, n, config.seed, &CheckpointGrid::Every)?;
            let checks = tr
                .checkpoints
                .iter()
                .zip(&tr.counts)
                .map(|(&t, c)| {
                    let observed = c[sub] as f64;
                    let bound = curve.eval(t as f64);
                    Check { n: t, observed, bound, pass: observed <= bound }
                })
                .collect();
            (spec, checks, true)
        }
        CurveRequest::Thm3 { .. } | CurveRequest::Ucb1 {} | CurveRequest::Lemma1 { .. } => {
            let (spec, arm) = match request {
                CurveRequest::Thm3 { rho, .. } => (PolicySpec::UcbRho(*rho), None),
                CurveRequest::Lemma1 { arm, fs, .. } => (PolicySpec::UcbGeneric(fs.clone()), Some(arm - 1)),
                _ => (PolicySpec::UcbRho(2.0), None),
            };
            let stats = run_monte_carlo(env, &spec, n, config.replications(), config.seed)?;
            let checks = stats
                .checkpoints
                .iter()
                .enumerate()
                .filter(|(_, &t)| t >= curve.n_min())
                .map(|(i, &t)| {
                    let observed = match arm {
                        Some(k) => stats.mean_counts[i][k] + 2.0 * stats.se_counts[i][k],
                        None => stats.mean_regret[i] + 2.0 * stats.se_regret[i],
                    };
                    let bound = curve.eval(t as f64);
                    Check { n: t, observed, bound, pass: observed <= bound }
                })
                .collect();
            (spec, checks, false)
        }
        CurveRequest::Prop2H { .. } | CurveRequest::Lower { .. } | CurveRequest::EtcEstimate { .. } => {
            return Err(CliError::Config(format!(
                "verify: `{}` is not a finite-horizon bound that can be verified",
                curve.kind()
            )));
        }
    };

    let mut report = String::new();
    let _ = writeln!(report, "verify {} [{}] policy={}", curve.kind(), curve.params(), policy.label());
    let _ = writeln!(
        report,
        "{}",
        if exact {
            "mode: exact, every round"
        } else {
            "mode: mean + 2 SE at each checkpoint"
        }
    );
    for c in checks.iter().filter(|c| log_grid.binary_search(&c.n).is_ok()) {
        let _ = writeln!(
            report,
            "n={} observed={} bound={} {}",
            c.n,
            c.observed,
            c.bound,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    let failed: Vec<u64> = checks.iter().filter(|c| !c.pass).map(|c| c.n).collect();
    let _ = writeln!(report, "rounds checked: {}, violations: {}", checks.len(), failed.len());
    let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
    let _ = writeln!(report, "RESULT: {verdict}");
    write_file(out, "verify.txt", &report)?;
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(CliError::VerifyFailed(format!(
            "{} violations, first at n = {}\n{report}",
            failed.len(),
            failed[0]
        )))
    }
}

/// CSV `n,value,kind,params` for each requested curve on the log grid.
pub fn curves_csv(config: &ExperimentConfig) -> Result<String, CliError> {
    let env = &config.environment;
    let grid = CheckpointGrid::Log125.points(env.num_arms(), config.horizon());
    let mut csv = String::from("n,value,kind,params\n");
    for request in &config.curves {
        let curve: BoundCurve = request.build(env)?;
        let params = curve.params();
        for &n in grid.iter().filter(|&&n| n >= curve.n_min()) {
            let _ = writeln!(csv, "{n},{},{},{params}", curve.eval(n as f64), curve.kind());
        }
    }
    Ok(csv)
}

fn curves(config: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    let csv = curves_csv(config)?;
    let path = write_file(out, "curves.csv", &csv)?;
    Ok(format!(
        "{} curve(s), {} rows -> {}\n",
        config.curves.len(),
        csv.lines().count() - 1,
        path.display()
    ))
}

fn exponent(config: &ExperimentConfig, out: &Path) -> Result<String, CliError> {
    require_policies(config)?;
    let [lo, hi] = config.window.unwrap_or([1000, config.horizon()]);
    let mut csv = String::from("policy,slope,intercept,r2,points\n");
    let mut report = String::new();
    for spec in &config.policies {
        let stats = run_monte_carlo(
            &config.environment,
            spec,
            config.horizon(),
            config.replications(),
            config.seed,
        )?;
        let fit = growth_exponent(&stats, lo..=hi)?;
        let _ = writeln!(csv, "{},{},{},{},{}", spec.label(), fit.slope, fit.intercept, fit.r2, fit.points);
        let _ = writeln!(
            report,
            "{}: slope={} r2={} over n in [{lo}, {hi}] ({} checkpoints)",
            spec.label(),
            fit.slope,
            fit.r2,
            fit.points
        );
    }
    write_file(out, "exponent.csv", &csv)?;
    Ok(report)
}
