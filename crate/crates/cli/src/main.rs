use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fraclap_cli::{execute, CliError, RunConfig};

/// Solve fractional Laplacian Dirichlet problems from a TOML config.
#[derive(Debug, Parser)]
#[command(name = "fraclap", version)]
struct Args {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for assembly (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Progress on stderr.
    #[arg(long)]
    verbose: bool,
}

fn run(args: &Args) -> Result<bool, CliError> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let cfg = RunConfig::parse(&text)?;
    let outcome = execute(&cfg, args.verbose)?;
    outcome.write(&args.out)?;
    for c in &outcome.checks {
        let verdict = if c.passed { "ok" } else { "FAILED" };
        eprintln!("{}: {:.3e} (tolerance {:.3e}) {verdict}", c.name, c.value, c.tolerance);
    }
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let json = e.to_json();
            println!("{json}");
            let _ = std::fs::create_dir_all(&args.out).and_then(|_| std::fs::write(args.out.join("error.json"), json + "\n"));
            ExitCode::from(2)
        }
    }
}
