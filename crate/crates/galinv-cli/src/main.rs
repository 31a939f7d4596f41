use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use galinv_cli::{run, Command, Format, RunConfig, EXIT_CONFIG};

/// Exact engine for Galilean-invariant spinor wave equations.
#[derive(Parser)]
#[command(name = "galinv", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Mass constant as a positive rational, e.g. 1 or 3/2.
    #[arg(long, global = true, default_value = "1")]
    mass: String,

    /// Directory for report files.
    #[arg(long, global = true, default_value = "galinv-reports")]
    output_dir: PathBuf,

    /// Report format: json, text or latex.
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Solve for the invariant family of a given spinor dimension and order.
    Derive {
        /// Spinor dimension: 1, 2 or 4.
        #[arg(long)]
        ncomp: usize,
        /// Maximum derivative order of the ansatz.
        #[arg(long)]
        order: usize,
        /// Drop mixed time-space derivative slots from the ansatz.
        #[arg(long)]
        forbid_mixed: bool,
    },
    /// Expand the N-th power of the first-order operator and verify it.
    Power {
        /// The power to expand.
        #[arg(short = 'N', long = "N", visible_alias = "n")]
        n: usize,
    },
    /// Dispersion scan of plane-wave kernels.
    Planewave {
        /// Wave vector as three rationals, e.g. --k 1 0 0.
        #[arg(long, num_args = 3)]
        k: Option<Vec<String>>,
    },
    /// Minimal coupling and elimination to the two-component equation.
    Couple,
    /// Run all headline results end to end; exit nonzero on any mismatch.
    PropSuite,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match Format::parse(&cli.common.format) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let command = match cli.command {
        CliCommand::Derive {
            ncomp,
            order,
            forbid_mixed,
        } => Command::Derive {
            ncomp,
            order,
            forbid_mixed,
        },
        CliCommand::Power { n } => Command::Power { n },
        CliCommand::Planewave { k } => Command::Planewave {
            k: k.map(|v| {
                let mut it = v.into_iter();
                [
                    it.next().unwrap_or_default(),
                    it.next().unwrap_or_default(),
                    it.next().unwrap_or_default(),
                ]
            }),
        },
        CliCommand::Couple => Command::Couple,
        CliCommand::PropSuite => Command::PropSuite,
    };
    let config = RunConfig {
        command,
        mass: cli.common.mass,
        output_dir: cli.common.output_dir,
        format,
    };
    ExitCode::from(run(&config) as u8)
}
