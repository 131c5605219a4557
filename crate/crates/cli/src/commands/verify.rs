use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use flashfps::verify::{run_suite, Suite, VerifyConfig};

use super::emit;
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteArg {
    Prefix,
    Oracle,
    Counters,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,

    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    /// Largest cloud size drawn by the suites.
    #[arg(long = "max-n", default_value_t = 4096)]
    pub max_n: usize,

    #[arg(long = "rng-seed", default_value_t = 0)]
    pub rng_seed: u64,
}

pub fn run(args: &VerifyArgs, threads: usize) -> Result<u8, Failure> {
    emit(&json!({
        "event": "config",
        "command": "verify",
        "suite": args.suite,
        "trials": args.trials,
        "max_n": args.max_n,
        "rng_seed": args.rng_seed,
        "threads": threads,
    }));
    let suites: Vec<Suite> = match args.suite {
        SuiteArg::Prefix => vec![Suite::Prefix],
        SuiteArg::Oracle => vec![Suite::Oracle],
        SuiteArg::Counters => vec![Suite::Counters],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let cfg = VerifyConfig {
        trials: args.trials,
        max_n: args.max_n,
        rng_seed: args.rng_seed,
    };
    let mut ok = true;
    for suite in suites {
        let start = Instant::now();
        let report = run_suite(suite, &cfg)?;
        ok &= report.all_passed();
        emit(&json!({
            "event": "suite",
            "suite": report.suite,
            "trials": report.trials,
            "passed": report.passed,
            "pass": report.all_passed(),
            "first_counterexample": report.first_counterexample,
            "elapsed_ms": start.elapsed().as_millis() as u64,
        }));
    }
    Ok(if ok { 0 } else { 1 })
}
