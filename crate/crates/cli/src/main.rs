use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crouzeix::commands::{self, Common, IDENTITY_POINTS, IDENTITY_QMAX, IDENTITY_QMIN};
use crouzeix::output::{sink, write_json, Format};
use crouzeix::verify::{self, VerifyOptions};
use crouzeix::{CliError, EXIT_INPUT, EXIT_OK};

/// Crouzeix ratios and extremal Blaschke products of small matrices.
///
/// MATRIX is a file (`-` for stdin) with the dimension on the first line
/// and one row of complex entries such as `1.5-2i` per line, or a family
/// member: `two_by_two:B`, `jordan:N`, `elliptic3:B`, `nonunique:T`.
#[derive(Debug, Parser)]
#[command(name = "crouzeix", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed of the multi-start initialization.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative tie tolerance of the search; for `verify`, replaces every
    /// check's tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Crouzeix ratio with the extremal product of each degree.
    Ratio {
        matrix: String,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// One CSV row per family member on a parameter grid.
    Sweep {
        family: String,
        /// Number of grid points.
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
    },
    /// Run the acceptance checks; exits with 3 on any failure.
    Verify {
        /// Only these criteria (repeatable).
        #[arg(long)]
        only: Vec<u8>,
    },
    /// Half-nome identity residuals on a nome grid.
    Identity {
        #[arg(long, default_value_t = IDENTITY_QMIN)]
        qmin: f64,
        #[arg(long, default_value_t = IDENTITY_QMAX)]
        qmax: f64,
        #[arg(long, default_value_t = IDENTITY_POINTS)]
        points: usize,
    },
    /// Numerical range boundary samples and fitted geometry.
    Range {
        matrix: String,
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut common = Common {
        out: cli.out,
        format: cli.format,
        tol: cli.tol,
        ..Common::default()
    };
    if let Some(s) = cli.seed {
        common.seed = s;
    }
    match cli.command {
        Command::Ratio { matrix, max_degree } => commands::cmd_ratio(&matrix, max_degree, &common),
        Command::Sweep {
            family,
            grid,
            from,
            to,
        } => commands::cmd_sweep(&family, grid, from, to, &common),
        Command::Identity { qmin, qmax, points } => {
            commands::cmd_identity(qmin, qmax, points, &common)
        }
        Command::Range { matrix, samples } => commands::cmd_range(&matrix, samples, &common),
        Command::Verify { only } => {
            let mut opts = VerifyOptions {
                tol_override: common.tol,
                only: (!only.is_empty()).then_some(only),
                ..VerifyOptions::default()
            };
            if let Some(s) = cli.seed {
                opts.search.seed = s;
                opts.seed = s;
            }
            let reports = verify::run(&opts);
            let s = verify::summary(&reports);
            let mut out = sink(common.out.as_deref())?;
            match common.format {
                Some(Format::Json) => write_json(&s, &mut out)?,
                _ => write!(out, "{}", verify::render(&reports))?,
            }
            if s.pass {
                Ok(())
            } else {
                Err(CliError::Verification {
                    failed: s.failed,
                    total: s.passed + s.failed,
                })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK } as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(h) = e.hint() {
                eprintln!("  {h}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
