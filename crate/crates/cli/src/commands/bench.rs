use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use flashfps::{
    cache_footprint, coverage_radius, fps, fps_prune, Cloud, GeneratorSpec, PruneConfig, Sample,
    SamplerStats,
};

use super::emit;
use super::sample::Method;
use crate::input::{fill_mode, Fill};
use crate::report::{write_csv, write_json_lines, BenchRecord};
use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Cloud sizes, comma-separated.
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,

    /// Sample budget as a fraction of N.
    #[arg(long = "m-ratio", default_value_t = 0.25)]
    pub m_ratio: f64,

    /// Pruning ratios for the flashfps rows.
    #[arg(long = "p-list", value_delimiter = ',', default_value = "0.75")]
    pub p_list: Vec<f64>,

    #[arg(long, value_enum, value_delimiter = ',', default_value = "fps,flashfps")]
    pub methods: Vec<Method>,

    /// Timed repeats per row; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub repeat: usize,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Generator family for every cloud: uniform, clusters, sphere, collinear.
    #[arg(long = "cloud", default_value = "uniform")]
    pub cloud: String,

    #[arg(long = "gen-seed", default_value_t = 1)]
    pub gen_seed: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: usize,

    #[arg(long, value_enum, default_value_t = Fill::Slice)]
    pub fill: Fill,

    #[arg(long = "rng-seed", default_value_t = 0)]
    pub rng_seed: u64,

    /// Skip the O(N*M) covering-radius column.
    #[arg(long = "no-quality")]
    pub no_quality: bool,
}

pub fn run(args: &BenchArgs, threads: usize) -> Result<u8, Failure> {
    if args.n_list.is_empty() || args.p_list.is_empty() || args.methods.is_empty() {
        return Err(Failure::usage("sweep lists must be non-empty"));
    }
    if args.repeat < 1 {
        return Err(Failure::usage("--repeat must be >= 1"));
    }
    if !(args.m_ratio > 0.0 && args.m_ratio <= 1.0) {
        return Err(Failure::usage("--m-ratio must be in (0, 1]"));
    }
    for &p in &args.p_list {
        PruneConfig::with_ratio(p).validate()?;
    }
    emit(&json!({
        "event": "config",
        "command": "bench",
        "n_list": args.n_list,
        "m_ratio": args.m_ratio,
        "p_list": args.p_list,
        "methods": args.methods,
        "repeat": args.repeat,
        "cloud": args.cloud,
        "gen_seed": args.gen_seed,
        "seed": args.seed,
        "fill": args.fill,
        "rng_seed": args.rng_seed,
        "threads": threads,
    }));

    let mut records = Vec::new();
    for &n in &args.n_list {
        let spec: GeneratorSpec = format!("{},n={n},seed={}", args.cloud, args.gen_seed).parse()?;
        let cloud: Cloud = flashfps::generate(&spec)?;
        let m = ((n as f64 * args.m_ratio).floor() as usize).max(1);

        // the plain FPS row is the per-(N, m) baseline and is always emitted
        records.push(measure(args, &cloud, m, None)?);
        if args.methods.contains(&Method::Flashfps) {
            for &p in &args.p_list {
                records.push(measure(args, &cloud, m, Some(p))?);
            }
        }
    }

    let result = match (&args.out, args.format) {
        (Some(path), Format::Csv) => std::fs::File::create(path)
            .map_err(Failure::io)
            .and_then(|f| write_csv(f, &records).map_err(|e| Failure::usage(e.to_string()))),
        (Some(path), Format::Json) => std::fs::File::create(path)
            .and_then(|f| write_json_lines(f, &records))
            .map_err(Failure::io),
        (None, Format::Csv) => write_csv(std::io::stdout().lock(), &records).map_err(|e| Failure::usage(e.to_string())),
        (None, Format::Json) => write_json_lines(std::io::stdout().lock(), &records).map_err(Failure::io),
    };
    result.map(|_| 0)
}

/// One warm-up run, then `repeat` timed runs; reports the median time.
/// `p = None` is plain FPS.
fn measure(args: &BenchArgs, cloud: &Cloud, m: usize, p: Option<f64>) -> Result<BenchRecord, Failure> {
    let cfg = PruneConfig {
        p: p.unwrap_or(0.0),
        fill_mode: fill_mode(args.fill),
        rng_seed: args.rng_seed,
    };
    let run = || -> flashfps::Result<(Sample, SamplerStats)> {
        match p {
            None => fps(cloud, m, args.seed),
            Some(_) => fps_prune(cloud, m, &cfg, args.seed),
        }
    };
    let (sample, stats) = run()?;
    let mut times = Vec::with_capacity(args.repeat);
    for _ in 0..args.repeat {
        let start = Instant::now();
        let (_, again) = run()?;
        times.push(start.elapsed().as_nanos() as u64);
        debug_assert_eq!(again, stats);
    }
    times.sort_unstable();
    let coverage = if args.no_quality {
        None
    } else {
        Some(coverage_radius(&sample.indices, cloud)?)
    };
    let fill = match (p, args.fill) {
        (None, _) => "none".to_string(),
        (Some(_), Fill::Slice) => "slice".to_string(),
        (Some(_), Fill::Random) => format!("random:{}", args.rng_seed),
    };
    Ok(BenchRecord {
        method: if p.is_none() { "fps" } else { "flashfps" }.to_string(),
        n: cloud.len(),
        m,
        p: cfg.p,
        seed: args.seed,
        fill,
        wall_time_ns: times[times.len() / 2],
        distance_evals: stats.distance_evals,
        iterations: stats.iterations,
        cache_bytes: if p.is_some() { cache_footprint(m) } else { 0 },
        coverage_radius: coverage,
    })
}
