//! Benchmark records and their CSV / JSON-lines encodings.

use std::io::Write;

use serde::{Deserialize, Serialize};

/// Fixed CSV header; field order of [`BenchRecord`] follows it.
pub const CSV_HEADER: &str =
    "method,n,m,p,seed,fill,wall_time_ns,distance_evals,iterations,cache_bytes,coverage_radius";

/// One benchmark row. `fill` is `none` for plain FPS, `slice`, or
/// `random:<rng_seed>`, so every row names the seeds needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: String,
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub seed: usize,
    pub fill: String,
    pub wall_time_ns: u64,
    pub distance_evals: u64,
    pub iterations: u64,
    pub cache_bytes: u64,
    pub coverage_radius: Option<f64>,
}

pub fn write_csv<W: Write>(out: W, records: &[BenchRecord]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json_lines<W: Write>(mut out: W, records: &[BenchRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
