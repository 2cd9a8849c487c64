use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harmonic_derating::cli::{self, Options};
use harmonic_derating::Error;

/// Harmonic analysis and derating of residential service transformers.
///
/// Settings resolve as: command-line flags, then the --config file, then
/// built-in defaults. Errors are printed as `<CODE>: <message>` on stderr.
#[derive(Parser)]
#[command(name = "harmderate", version)]
struct Args {
    /// JSON configuration (signatures, transformer, spectral settings, scenarios).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path: report file for `analyze`/`export-defaults`, directory for `scenarios` and `--seed-docs`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Highest harmonic order to extract.
    #[arg(long, global = true)]
    h_max: Option<u32>,
    /// Rated winding eddy-current loss factor P_EC-R.
    #[arg(long, global = true)]
    pec_r: Option<f64>,
    /// Write example input documents (config, spectrum, rectifier params) and exit
    /// if no command is given.
    #[arg(long, global = true)]
    seed_docs: bool,
    /// Embed the generation time in JSON reports.
    #[arg(long, global = true)]
    timestamp: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract harmonics from a `time_s,current_a` CSV and compute transformer metrics.
    Analyze {
        csv: PathBuf,
        #[arg(long, default_value_t = 60.0)]
        fundamental: f64,
    },
    /// Run the PV-penetration scenarios and print the comparison table.
    Scenarios,
    /// Synthesize a waveform CSV from a spectrum JSON document.
    Synth {
        spectrum: PathBuf,
        out_csv: PathBuf,
        /// Overrides `duration_s` from the document.
        #[arg(long, allow_hyphen_values = true)]
        duration: Option<f64>,
    },
    /// Simulate a capacitor-input rectifier and write its line current.
    Rectifier { params: PathBuf, out_csv: PathBuf },
    /// Print or write the effective configuration.
    ExportDefaults,
}

fn run(args: Args) -> Result<(), Error> {
    let opts = Options {
        config: args.config,
        out: args.out,
        h_max: args.h_max,
        pec_r: args.pec_r,
        timestamp: args.timestamp,
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();

    if args.seed_docs {
        let dir = match (&args.command, &opts.out) {
            (None, Some(dir)) => dir.clone(),
            _ => PathBuf::from("."),
        };
        cli::seed_docs(&dir, &mut out)?;
    }
    match args.command {
        None if args.seed_docs => {}
        None => {
            return Err(Error::InvalidArgument(
                "no command given; see --help".into(),
            ))
        }
        Some(Command::Analyze { csv, fundamental }) => {
            cli::cmd_analyze(&csv, fundamental, &opts, &mut out)?;
        }
        Some(Command::Scenarios) => {
            cli::cmd_scenarios(&opts, &mut out)?;
        }
        Some(Command::Synth { spectrum, out_csv, duration }) => {
            cli::cmd_synth(&spectrum, &out_csv, duration, &mut out)?;
        }
        Some(Command::Rectifier { params, out_csv }) => {
            cli::cmd_rectifier(&params, &out_csv, &opts, &mut out)?;
        }
        Some(Command::ExportDefaults) => {
            cli::cmd_export_defaults(&opts, &mut out)?;
        }
    }
    out.flush().map_err(|e| Error::io("flushing stdout", e))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
