use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use seqmeas::cli::{self, CliError, Format, OptimizeArgs, Output};
use seqmeas::constructions::Construction;
use seqmeas::matcore::DEFAULT_TOL;
use seqmeas::optimize::{Mode, OptConfig};

#[derive(Parser)]
#[command(
    name = "seqmeas",
    version,
    about = "Sequential-measurement witnesses of macroscopic no-signalling"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one of the explicit violating constructions.
    Demo {
        /// trine or dual-basis
        kind: Construction,
        /// Local dimension (trine requires 2).
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Witness value, residual table and NSIT residual of a scenario document.
    Witness {
        input: PathBuf,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Simulated dual-basis witness against ½(1 − 1/d) for d = 2..=d-max.
    Scan {
        #[arg(long = "d-max")]
        d_max: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Self-commutation, scaled-projector and identity checks for POVMs in a document.
    Check {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Maximize the witness with seeded Nelder-Mead restarts.
    Optimize {
        #[arg(long, default_value_t = 2)]
        da: usize,
        #[arg(long, default_value_t = 2)]
        db: usize,
        #[arg(long, default_value_t = 3)]
        na: usize,
        #[arg(long, default_value_t = 2)]
        nb: usize,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// full, fixed-state, fixed-alice or projective-alice
        #[arg(long, default_value = "full")]
        mode: Mode,
        /// Scenario document supplying the frozen part in the fixed modes.
        #[arg(long)]
        fixed: Option<PathBuf>,
        /// Alternate fixed-alice / fixed-state rounds after the full search.
        #[arg(long, default_value_t = 0)]
        seesaw: usize,
        /// Worker threads (default: all cores); results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

fn run(args: Args) -> Result<Output, CliError> {
    match args.command {
        Command::Demo { kind, d, json } => cli::cmd_demo(kind, d, json),
        Command::Witness { input, json, csv, tol } => {
            let format = if json {
                Format::Json
            } else if csv {
                Format::Csv
            } else {
                Format::Text
            };
            cli::cmd_witness(&input, format, tol)
        }
        Command::Scan { d_max, csv } => cli::cmd_scan(d_max, csv),
        Command::Check { input, tol } => cli::cmd_check(&input, tol),
        Command::Optimize {
            da,
            db,
            na,
            nb,
            restarts,
            iters,
            seed,
            tol,
            mode,
            fixed,
            seesaw,
            threads,
            json,
        } => {
            if threads == Some(0) {
                return Err(CliError::Usage("--threads must be positive".into()));
            }
            let config = OptConfig {
                restarts,
                max_iters: iters,
                seed,
                tol,
                mode,
                threads,
                ..OptConfig::new(da, db, na, nb)
            };
            cli::cmd_optimize(OptimizeArgs {
                config,
                seesaw_rounds: seesaw,
                fixed_path: fixed,
                json,
            })
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(output) => {
            print!("{}", output.stdout);
            for note in output.notes {
                eprintln!("{note}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
