use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use flashfps::{cache_footprint, fps, fps_prune, io};

use super::emit;
use crate::input::{write_text, PruneArgs, SourceArgs};
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Fps,
    Flashfps,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    #[arg(long, value_enum, default_value_t = Method::Flashfps)]
    pub method: Method,

    /// Number of points to sample.
    #[arg(long)]
    pub m: usize,

    #[command(flatten)]
    pub prune: PruneArgs,

    /// Write sampled original indices, one per line.
    #[arg(long = "out-indices")]
    pub out_indices: Option<PathBuf>,

    /// Write sampled points as xyz.
    #[arg(long = "out-points")]
    pub out_points: Option<PathBuf>,
}

pub fn run(args: &SampleArgs, threads: usize) -> Result<u8, Failure> {
    if args.method == Method::Fps && args.prune.prune_ratio != 0.0 {
        return Err(Failure::usage("--prune-ratio requires --method flashfps"));
    }
    let cfg = args.prune.config();
    emit(&json!({
        "event": "config",
        "command": "sample",
        "source": args.source.describe(),
        "method": args.method,
        "m": args.m,
        "p": cfg.p,
        "seed": args.prune.seed,
        "fill": args.prune.fill,
        "rng_seed": cfg.rng_seed,
        "threads": threads,
    }));

    let cloud = args.source.load()?;
    let start = Instant::now();
    let (sample, mut stats) = match args.method {
        Method::Fps => fps(&cloud, args.m, args.prune.seed)?,
        Method::Flashfps => fps_prune(&cloud, args.m, &cfg, args.prune.seed)?,
    };
    let wall_time_ns = start.elapsed().as_nanos() as u64;
    if args.method == Method::Flashfps {
        stats.cache_bytes = cache_footprint(sample.len());
    }

    if let Some(path) = &args.out_indices {
        write_text(path, &io::format_indices(&sample.indices))?;
    }
    if let Some(path) = &args.out_points {
        io::write_xyz(&cloud.select(&sample.indices)?, path)?;
    }
    emit(&json!({
        "event": "stats",
        "n": cloud.len(),
        "m": sample.len(),
        "fill_boundary": sample.fill_boundary,
        "distance_evals": stats.distance_evals,
        "iterations": stats.iterations,
        "candidates": stats.candidates,
        "cache_bytes": stats.cache_bytes,
        "wall_time_ns": wall_time_ns,
    }));
    Ok(0)
}
