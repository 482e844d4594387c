use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kdvrc_cli::commands;

#[derive(Parser)]
#[command(
    name = "kdvrc",
    version,
    about = "Shallow-water wave computing: KdV simulation, gate training, and unit conversion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one encoded case and export the space-time trajectory as CSV
    Simulate {
        /// Experiment configuration file
        #[arg(long)]
        config: PathBuf,
        /// Boolean inputs, comma separated (e.g. "1,1")
        #[arg(long)]
        case: String,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Snapshot spacing in time units (must be a multiple of dt)
        #[arg(long, default_value_t = 1.0)]
        record_step: f64,
    },
    /// Run every truth-table case, train the readout, decode, and report
    Gate {
        #[arg(long)]
        config: PathBuf,
        /// Report path (structured text)
        #[arg(long, default_value = "gate-report.toml")]
        out: PathBuf,
        /// Also save the trained model here (bit-exact round trip)
        #[arg(long)]
        model_out: Option<PathBuf>,
        /// Also save the response matrix as CSV
        #[arg(long)]
        response_out: Option<PathBuf>,
        /// Max cases integrated in parallel (default: available cores)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Re-run the gate across a parameter range, recording det, conditioning, accuracy
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// One of: x_D, L, l, eps_true, t_offset
        #[arg(long)]
        param: String,
        /// start:stop:step (inclusive)
        #[arg(long)]
        range: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the physical dimensioning table for the configured experiment
    ConvertUnits {
        #[arg(long)]
        config: PathBuf,
        /// Also write the table to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate {
            config,
            case,
            out,
            record_step,
        } => commands::simulate(config, case, out, *record_step),
        Command::Gate {
            config,
            out,
            model_out,
            response_out,
            threads,
        } => commands::gate(
            config,
            out,
            model_out.as_deref(),
            response_out.as_deref(),
            commands::resolve_threads(*threads),
        ),
        Command::Sweep {
            config,
            param,
            range,
            out,
            threads,
        } => commands::sweep(
            config,
            param,
            range,
            out,
            commands::resolve_threads(*threads),
        ),
        Command::ConvertUnits { config, out } => commands::convert_units(config, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
