use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use gcfd_cli::{load_config, run_to_files, Command};

/// Fractional-derivative and advection-diffusion tooling.
///
/// Reads one config file (TOML, or a manifest JSON emitted by an earlier run)
/// and writes `<name>.csv` plus `<name>.manifest.json` into the output
/// directory.
#[derive(Parser)]
#[command(name = "gcfd", version, arg_required_else_help = true)]
struct Args {
    /// derivative | solve | convergence | weights | stability
    command: String,
    /// path to a TOML config or a previously emitted .manifest.json
    config: PathBuf,
    /// directory for the CSV and manifest outputs
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let run = || -> Result<(), gcfd_cli::CliError> {
        let command = Command::parse(&args.command)?;
        let (manifest_command, config) = load_config(&args.config)?;
        if let Some(recorded) = manifest_command {
            if recorded != command {
                return Err(gcfd_cli::CliError::Config(format!(
                    "manifest records a different command ({recorded:?})"
                )));
            }
        }
        let (csv, manifest) = run_to_files(command, &config, &args.output_dir)?;
        println!("{}", csv.display());
        println!("{}", manifest.display());
        Ok(())
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gcfd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
