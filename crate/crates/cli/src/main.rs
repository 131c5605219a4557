mod commands;
mod input;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{bench, hier, sample, verify};

#[derive(Debug, Parser)]
#[command(name = "flashfps", version, about = "Farthest point sampling with pruning and cross-layer reuse")]
struct Cli {
    /// Worker threads for the sampling kernel; 0 means all cores. Output
    /// bytes never depend on this value.
    #[arg(long, global = true, env = "FLASHFPS_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample one layer from a cloud.
    Sample(sample::SampleArgs),
    /// Sample a hierarchy of nested layers.
    Hier(hier::HierArgs),
    /// Run randomized property suites.
    Verify(verify::VerifyArgs),
    /// Time and count samplers over a sweep of cloud sizes.
    Bench(bench::BenchArgs),
}

/// Failure of a command: exit code plus a structured message.
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl From<flashfps::Error> for Failure {
    fn from(e: flashfps::Error) -> Self {
        let code = if matches!(e, flashfps::Error::Io(_)) { 1 } else { 2 };
        Failure {
            code,
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "UsageError".into(),
            message: message.into(),
        }
    }

    pub fn io(e: std::io::Error) -> Self {
        flashfps::Error::Io(e).into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("{}", serde_json::json!({"event": "error", "kind": "ThreadPool", "message": e.to_string()}));
            return ExitCode::from(1);
        }
    };
    let threads = pool.current_num_threads();
    let result = pool.install(|| match &cli.command {
        Command::Sample(args) => sample::run(args, threads),
        Command::Hier(args) => hier::run(args, threads),
        Command::Verify(args) => verify::run(args, threads),
        Command::Bench(args) => bench::run(args, threads),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!(
                "{}",
                serde_json::json!({"event": "error", "kind": f.kind, "message": f.message})
            );
            ExitCode::from(f.code)
        }
    }
}
