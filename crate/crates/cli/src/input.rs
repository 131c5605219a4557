//! Shared input and sampling flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use flashfps::{io, Cloud, FillMode, GeneratorSpec, PruneConfig};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fill {
    Slice,
    Random,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false, args = ["input", "generate"])]
pub struct SourceArgs {
    /// Point cloud file: `.ply` (ASCII) or whitespace-separated xyz.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Synthetic cloud, e.g. `uniform,n=10000,seed=1` or
    /// `clusters,n=5000,k=8,sigma=0.02,seed=3`.
    #[arg(long)]
    pub generate: Option<String>,
}

impl SourceArgs {
    pub fn load(&self) -> Result<Cloud, Failure> {
        match (&self.input, &self.generate) {
            (Some(path), None) => Ok(read_cloud(path)?),
            (None, Some(spec)) => {
                let spec: GeneratorSpec = spec.parse()?;
                Ok(flashfps::generate(&spec)?)
            }
            _ => Err(Failure::usage("exactly one of --input or --generate is required")),
        }
    }

    pub fn describe(&self) -> serde_json::Value {
        match (&self.input, &self.generate) {
            (Some(path), _) => serde_json::json!({"input": path}),
            (_, Some(spec)) => serde_json::json!({"generate": spec}),
            _ => serde_json::Value::Null,
        }
    }
}

fn read_cloud(path: &Path) -> flashfps::Result<Cloud> {
    let is_ply = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("ply"));
    if is_ply {
        io::read_ply_ascii(path)
    } else {
        io::read_xyz(path)
    }
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    /// Seed (first selected) point index.
    #[arg(long, default_value_t = 0)]
    pub seed: usize,

    /// Pruning ratio p in [0, 1).
    #[arg(long = "prune-ratio", default_value_t = 0.0)]
    pub prune_ratio: f64,

    /// How pruned iterations are back-filled.
    #[arg(long, value_enum, default_value_t = Fill::Slice)]
    pub fill: Fill,

    /// RNG seed for `--fill random`.
    #[arg(long = "rng-seed", default_value_t = 0)]
    pub rng_seed: u64,
}

impl PruneArgs {
    pub fn config(&self) -> PruneConfig {
        PruneConfig {
            p: self.prune_ratio,
            fill_mode: fill_mode(self.fill),
            rng_seed: self.rng_seed,
        }
    }
}

pub fn fill_mode(fill: Fill) -> FillMode {
    match fill {
        Fill::Slice => FillMode::DeterministicSlice,
        Fill::Random => FillMode::SeededRandom,
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(Failure::io)
}
