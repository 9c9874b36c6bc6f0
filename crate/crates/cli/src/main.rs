use clap::Parser;
use gcorner_cli::{run, Command, JobSpec, Options};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact computations on manifolds with generalized corners.
#[derive(Debug, Parser)]
#[command(name = "gcorner", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML job file.
    input: PathBuf,
    /// Emit the JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Truncation order (nn-correct) or filtration depth (monoid-analyze).
    #[arg(long, value_name = "N")]
    order: Option<usize>,
    /// Sample points per stratum (nijenhuis).
    #[arg(long, value_name = "K")]
    samples: Option<usize>,
    /// RNG seed for sampled checks.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Worker threads for the library.
    #[arg(long, value_name = "T", default_value_t = 1)]
    threads: usize,
    /// Largest polynomial degree the layer solver accepts (nn-correct).
    #[arg(long, value_name = "D")]
    degree_cap: Option<u32>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let job = JobSpec {
        command: cli.command,
        input_path: cli.input,
        options: Options {
            json: cli.json,
            order: cli.order,
            samples: cli.samples,
            seed: cli.seed,
            threads: cli.threads,
            degree_cap: cli.degree_cap,
            timing: cli.timing,
        },
    };
    let out = run(&job);
    let text = if job.options.json {
        out.report.to_json()
    } else {
        out.report.to_text()
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(out.exit_code as u8)
}
