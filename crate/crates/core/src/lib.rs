//! Simulation and verification toolkit for stochastic multi-armed bandits.
//!
//! The crate is organised bottom-up:
//!
//! * [`dist`], [`env`] and [`rng`]: reward laws on `[0, 1]`, environments
//!   and a portable seeded generator.
//! * [`policy`]: UCB(ρ), UCB with per-arm exploration functions,
//!   explore-then-commit and a uniform baseline.
//! * [`bounds`]: every analytic count/regret bound as an evaluatable curve,
//!   Bernoulli KL machinery and the Hannan-consistency condition checker.
//! * [`sim`]: seeded episodes, Monte Carlo aggregation with deterministic
//!   parallel merging, and log-log growth-exponent regression.
//!
//! Arm indices are 0-based throughout the API. Logarithms are natural.

pub mod bounds;
pub mod dist;
pub mod env;
mod error;
pub mod policy;
pub mod rng;
pub mod sim;

pub use dist::ArmDistribution;
pub use env::{Environment, GapAnalysis};
pub use error::{Error, Result};
pub use policy::{ExplorationFn, PolicySpec, PolicyState};
pub use rng::RngStream;
pub use sim::{AggregateStats, CheckpointGrid, Trajectory};
