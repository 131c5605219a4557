use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use flashfps::{hierarchical_sample, io, LayerBudgets};

use super::emit;
use crate::input::{write_text, PruneArgs, SourceArgs};
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct HierArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    /// Comma-separated non-increasing layer budgets, e.g. `1024,256,64`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub budgets: Vec<usize>,

    /// Serve layers 2..L as prefixes of layer 1.
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub cache: Switch,

    #[command(flatten)]
    pub prune: PruneArgs,

    /// Directory receiving `layer1.idx`, `layer2.idx`, ...
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,

    /// Write the layer-1 cache in binary form.
    #[arg(long = "cache-out")]
    pub cache_out: Option<PathBuf>,

    /// Write a text dump of the layer-1 cache.
    #[arg(long = "cache-dump")]
    pub cache_dump: Option<PathBuf>,
}

pub fn run(args: &HierArgs, threads: usize) -> Result<u8, Failure> {
    let cfg = args.prune.config();
    emit(&json!({
        "event": "config",
        "command": "hier",
        "source": args.source.describe(),
        "budgets": args.budgets,
        "cache": args.cache,
        "p": cfg.p,
        "seed": args.prune.seed,
        "fill": args.prune.fill,
        "rng_seed": cfg.rng_seed,
        "threads": threads,
    }));
    let budgets = LayerBudgets::new(args.budgets.clone())?;
    if args.cache == Switch::Off && (args.cache_out.is_some() || args.cache_dump.is_some()) {
        return Err(Failure::usage("--cache-out/--cache-dump need --cache on"));
    }
    let cloud = args.source.load()?;

    let start = Instant::now();
    let out = hierarchical_sample(&cloud, &budgets, &cfg, args.prune.seed, args.cache == Switch::On)?;
    let wall_time_ns = start.elapsed().as_nanos() as u64;

    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(Failure::io)?;
        for (l, layer) in out.layers.iter().enumerate() {
            write_text(&dir.join(format!("layer{}.idx", l + 1)), &io::format_indices(&layer.indices))?;
        }
    }
    if let Some(record) = &out.cache {
        if let Some(path) = &args.cache_out {
            std::fs::write(path, record.to_bytes()).map_err(Failure::io)?;
        }
        if let Some(path) = &args.cache_dump {
            write_text(path, &record.to_text())?;
        }
    }

    let layers: Vec<_> = out
        .layers
        .iter()
        .zip(&out.layer_stats)
        .enumerate()
        .map(|(l, (layer, stats))| {
            json!({
                "layer": l + 1,
                "m": layer.len(),
                "fill_boundary": layer.fill_boundary,
                "distance_evals": stats.distance_evals,
                "iterations": stats.iterations,
                "candidates": stats.candidates,
                "cache_bytes": stats.cache_bytes,
            })
        })
        .collect();
    emit(&json!({
        "event": "stats",
        "n": cloud.len(),
        "layers": layers,
        "total": out.stats,
        "wall_time_ns": wall_time_ns,
    }));
    Ok(0)
}
