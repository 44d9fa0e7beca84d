use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gfcount_cli::{CliError, Command, Run, RunConfig};

/// Photon-counting statistics of driven four-level atoms.
#[derive(Parser, Debug)]
#[command(name = "gfcount", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for scans; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(args: &Args) -> Result<i32, CliError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::field("--threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::field("--threads", e.to_string()))?;
    }
    let config = RunConfig::load(&args.config)?;
    let run = Run { config: &config, out_dir: &args.out, basename: config.basename(&args.config) };
    let outcome = run.execute(args.command)?;
    for f in &outcome.files {
        log::info!("wrote {}", f.display());
    }
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let code = run(&args).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
