use std::path::PathBuf;
use std::process::ExitCode;

use affine_body_cli::{run, CliError, RunConfig, RunOptions};
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Simulate,
    Geodesic,
    Classify,
    Spectrum,
    CheckBrackets,
    CheckDecomp,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Geodesic => "geodesic",
            Command::Classify => "classify",
            Command::Spectrum => "spectrum",
            Command::CheckBrackets => "check-brackets",
            Command::CheckDecomp => "check-decomp",
        }
    }
}

/// Reduced dynamics and spectra of affinely-rigid bodies.
#[derive(Debug, Parser)]
#[command(name = "affine-body", version)]
struct Args {
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Base directory for relative artifact paths.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the summary line.
    #[arg(long)]
    quiet: bool,
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let config = RunConfig::load(&args.config)?;
    if config.name() != args.command.name() {
        return Err(CliError::Config(format!(
            "config describes `{}` but `{}` was requested",
            config.name(),
            args.command.name()
        )));
    }
    let outcome = run(&config, &RunOptions { output_dir: args.output_dir.clone(), seed: args.seed })?;
    if !args.quiet {
        println!("{}", outcome.summary);
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("affine-body: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
