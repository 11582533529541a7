use clap::Parser;
use squint::cli::{self, CliError, Command, RunConfig};
use std::path::PathBuf;

/// Squeezed-light interferometer simulator.
///
/// Computes shot-noise-limited and amplifier-assisted phase sensitivities,
/// loss thresholds, quantum-advantage maps, Wigner functions and gain
/// calibrations, writing each result as a self-describing CSV.
#[derive(Parser)]
#[command(name = "squint", version)]
struct Args {
    /// What to compute: snl | sweep | threshold | qmap | wigner | calibrate
    command: String,

    /// Config file of `key = value` lines (defaults apply when omitted)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override a single config key, e.g. --set eta=0.29 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output CSV path (default: <command>.csv)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: &Args) -> Result<String, CliError> {
    let command: Command = args.command.parse()?;
    let mut config: RunConfig = cli::load_config(args.config.as_deref())?;
    for (i, assignment) in args.set.iter().enumerate() {
        let location = format!("--set #{}", i + 1);
        let (key, value) =
            assignment
                .split_once('=')
                .ok_or_else(|| cli::ConfigError::Malformed {
                    location: location.clone(),
                    line: assignment.clone(),
                })?;
        config.set(key.trim(), value.trim(), &location)?;
    }
    cli::run_command(command, &config, args.out.as_deref())
}

fn main() {
    let args = Args::parse();
    match run(&args) {
        Ok(summary) => println!("{summary}"),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
