//! Randomized property suites shared by the CLI `verify` command and the
//! acceptance tests. Every trial derives its cloud from `(rng_seed, trial)`,
//! so a reported counterexample can be replayed exactly.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cache::verify_prefix_property;
use crate::error::{Error, Result};
use crate::fps::{fps, fps_oracle};
use crate::geometry::{validate_cloud, Point3, PointCloud};
use crate::io::{generate, GeneratorSpec};
use crate::prune::{fps_prune, PruneConfig};

/// Ratios exercised by the counters suite.
pub const COUNTER_RATIOS: [f64; 3] = [0.25, 0.5, 0.75];
/// Allowed relative error of the measured reduction against `(1-p)^2`.
pub const COUNTER_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Prefix,
    Oracle,
    Counters,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Prefix, Suite::Oracle, Suite::Counters];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Prefix => "prefix",
            Suite::Oracle => "oracle",
            Suite::Counters => "counters",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefix" => Ok(Suite::Prefix),
            "oracle" => Ok(Suite::Oracle),
            "counters" => Ok(Suite::Counters),
            other => Err(Error::InvalidSpec(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyConfig {
    pub trials: usize,
    pub max_n: usize,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: usize,
    pub passed: usize,
    /// Replay description of the first failing trial.
    pub first_counterexample: Option<String>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }
}

/// Cloud families cycled through by the suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Uniform,
    Clustered,
    Sphere,
    /// Small integer lattice with many duplicated points, so distance ties
    /// are everywhere.
    TieHeavy,
}

impl Family {
    const CYCLE: [Family; 4] = [Family::Uniform, Family::Clustered, Family::Sphere, Family::TieHeavy];

    pub fn for_trial(trial: usize) -> Family {
        Self::CYCLE[trial % Self::CYCLE.len()]
    }

    pub fn build(self, n: usize, seed: u64) -> Result<PointCloud<f64>> {
        match self {
            Family::Uniform => generate(&GeneratorSpec::uniform(n, seed)),
            Family::Clustered => generate(&GeneratorSpec::clusters(n, 8, 0.03, seed)),
            Family::Sphere => generate(&format!("sphere,n={n},seed={seed}").parse()?),
            Family::TieHeavy => tie_heavy_cloud(n, seed),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Uniform => "uniform",
            Family::Clustered => "clusters",
            Family::Sphere => "sphere",
            Family::TieHeavy => "tie-heavy",
        };
        f.write_str(name)
    }
}

/// Points on the `{0,1,2,3}^3` lattice; beyond 64 points every point is a
/// duplicate of an earlier one.
pub fn tie_heavy_cloud(n: usize, seed: u64) -> Result<PointCloud<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coord = || f64::from(rng.random_range(0u8..4));
    let points = (0..n).map(|_| Point3::new(coord(), coord(), coord())).collect();
    validate_cloud(points)
}

fn trial_rng(rng_seed: u64, suite: Suite, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(((suite as u64) << 32) | trial as u64);
    rng
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    if cfg.trials < 1 {
        return Err(Error::InvalidSpec("trials must be >= 1".into()));
    }
    if cfg.max_n < 1 {
        return Err(Error::InvalidSpec("max-n must be >= 1".into()));
    }
    let mut passed = 0;
    let mut first_counterexample = None;
    for trial in 0..cfg.trials {
        let outcome = match suite {
            Suite::Prefix => prefix_trial(cfg, trial)?,
            Suite::Oracle => oracle_trial(cfg, trial)?,
            Suite::Counters => counters_trial(cfg, trial)?,
        };
        match outcome {
            None => passed += 1,
            Some(why) if first_counterexample.is_none() => first_counterexample = Some(why),
            Some(_) => {}
        }
    }
    Ok(SuiteReport {
        suite,
        trials: cfg.trials,
        passed,
        first_counterexample,
    })
}

fn describe(suite: Suite, cfg: &VerifyConfig, trial: usize, family: Family, n: usize, detail: String) -> String {
    format!(
        "suite={suite} rng_seed={} trial={trial} family={family} n={n} {detail}",
        cfg.rng_seed
    )
}

/// N in [64, max_n], m1 = N/4, m2 in {m1/2, m1/4}.
fn prefix_trial(cfg: &VerifyConfig, trial: usize) -> Result<Option<String>> {
    let mut rng = trial_rng(cfg.rng_seed, Suite::Prefix, trial);
    let lo = 64.min(cfg.max_n);
    let n = rng.random_range(lo..=cfg.max_n);
    let family = Family::for_trial(trial);
    let cloud = family.build(n, rng.random())?;
    let m1 = (n / 4).max(1);
    for m2 in [(m1 / 2).max(1), (m1 / 4).max(1)] {
        let check = verify_prefix_property(&cloud, m1, m2, 0)?;
        if !check.holds {
            let k = check.first_divergence.unwrap_or(0);
            return Ok(Some(describe(
                Suite::Prefix,
                cfg,
                trial,
                family,
                n,
                format!(
                    "m1={m1} m2={m2} diverges at position {k}: expected {} got {}",
                    check.expected[k], check.actual[k]
                ),
            )));
        }
    }
    Ok(None)
}

/// N <= min(max_n, 1024), m <= 256, random seed index.
fn oracle_trial(cfg: &VerifyConfig, trial: usize) -> Result<Option<String>> {
    let mut rng = trial_rng(cfg.rng_seed, Suite::Oracle, trial);
    let n = rng.random_range(1..=cfg.max_n.min(1024));
    let m = rng.random_range(1..=n.min(256));
    let seed = rng.random_range(0..n);
    let family = Family::for_trial(trial);
    let cloud = family.build(n, rng.random())?;
    let (fast, _) = fps(&cloud, m, seed)?;
    let slow = fps_oracle(&cloud, m, seed)?;
    if fast.indices == slow.indices {
        return Ok(None);
    }
    let k = fast
        .indices
        .iter()
        .zip(&slow.indices)
        .position(|(a, b)| a != b)
        .unwrap_or(0);
    Ok(Some(describe(
        Suite::Oracle,
        cfg,
        trial,
        family,
        n,
        format!("m={m} seed={seed} diverges at position {k}"),
    )))
}

/// Measured distance evaluations of pruned vs unpruned runs. Exact counter
/// formula per run, and the ratio within [`COUNTER_TOLERANCE`] of `(1-p)^2`.
fn counters_trial(cfg: &VerifyConfig, trial: usize) -> Result<Option<String>> {
    let mut rng = trial_rng(cfg.rng_seed, Suite::Counters, trial);
    let n = rng.random_range(2048.min(cfg.max_n)..=cfg.max_n);
    let family = Family::for_trial(trial);
    let cloud = family.build(n, rng.random())?;
    let m = (n / 4).max(1);
    let (_, base) = fps(&cloud, m, 0)?;
    for p in COUNTER_RATIOS {
        let cfg_p = PruneConfig::with_ratio(p);
        let plan = cfg_p.plan(n, m)?;
        let (_, stats) = fps_prune(&cloud, m, &cfg_p, 0)?;
        let formula = (plan.candidates * (plan.kernel_budget - 1)) as u64;
        let measured = reduction_ratio(stats.distance_evals, base.distance_evals);
        let expected = (1.0 - p) * (1.0 - p);
        let within = (measured - expected).abs() <= COUNTER_TOLERANCE * expected;
        if stats.distance_evals != formula || !within {
            return Ok(Some(describe(
                Suite::Counters,
                cfg,
                trial,
                family,
                n,
                format!(
                    "p={p} evals={} formula={formula} ratio={measured:.6} expected={expected}",
                    stats.distance_evals
                ),
            )));
        }
    }
    Ok(None)
}

/// `pruned / full`, with an all-zero baseline (m = 1) counting as 1.
pub fn reduction_ratio(pruned: u64, full: u64) -> f64 {
    if full == 0 {
        1.0
    } else {
        pruned as f64 / full as f64
    }
}
