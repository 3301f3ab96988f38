//! Command-line front end for `optcap`: capacity and PIE sweeps, BPSK and
//! superadditivity tables, and Monte Carlo self-checks.
//!
//! Tables go to standard output (or `--out FILE`) as CSV, or as a JSON array
//! of records with `--json`. Exit codes: 0 success, 1 usage error,
//! 2 validation failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod sweep;
pub mod table;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use optcap::infotheory::Scheme;

use crate::sweep::{Scale, SweepSpec, Variable};
use crate::table::Table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] optcap::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "optcap",
    version,
    about = "Optical channel capacity and photon information efficiency"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct NsSweepArgs {
    /// Smallest signal photon number per slot.
    #[arg(long, default_value_t = 1e-2)]
    pub ns_min: f64,
    /// Largest signal photon number per slot.
    #[arg(long, default_value_t = 1e2)]
    pub ns_max: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Space the points logarithmically.
    #[arg(long)]
    pub log: bool,
}

impl NsSweepArgs {
    fn spec(&self) -> Result<SweepSpec, CliError> {
        SweepSpec::new(Variable::Ns, scale(self.log), self.ns_min, self.ns_max, self.points)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Emit a JSON array of records instead of CSV.
    #[arg(long)]
    pub json: bool,
    /// Write to FILE instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity in bits per slot for each scheme.
    Capacity {
        #[command(flatten)]
        sweep: NsSweepArgs,
        /// Evaluate a single n_s instead of a sweep.
        #[arg(long, conflicts_with_all = ["ns_min", "ns_max", "points", "log"])]
        ns: Option<f64>,
        /// Excess noise photons per slot.
        #[arg(long, default_value_t = 0.0)]
        nn: f64,
        /// Comma-separated subset of s1,s2,holevo,fock.
        #[arg(long, value_delimiter = ',', default_value = "s1,s2,holevo,fock")]
        schemes: Vec<Scheme>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Photon information efficiency of the capacity limits and of PPM.
    Pie {
        #[command(flatten)]
        sweep: NsSweepArgs,
        #[arg(long, default_value_t = 0.0)]
        nn: f64,
        /// PPM orders (powers of two), comma-separated.
        #[arg(long, value_delimiter = ',')]
        orders: Vec<u64>,
        /// Add the approximate and exact PPM optimum.
        #[arg(long)]
        approx: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Holevo PIE on an (n_s, n_n) grid.
    Heatmap {
        #[command(flatten)]
        sweep: NsSweepArgs,
        #[arg(long, default_value_t = 1e-3)]
        nn_min: f64,
        #[arg(long, default_value_t = 10.0)]
        nn_max: f64,
        #[arg(long, default_value_t = 50)]
        nn_points: usize,
        /// Space the n_n points logarithmically.
        #[arg(long)]
        nn_log: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// PIE of BPSK with homodyne and with joint detection.
    BpskChi {
        #[command(flatten)]
        sweep: NsSweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Optimised Hadamard-word scheme with an extra antipodal word.
    Superadditivity {
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        orders: Vec<usize>,
        #[arg(long, default_value_t = 1e-4)]
        ns: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo checks of the samplers against analytic values.
    Validate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn scale(log: bool) -> Scale {
    if log {
        Scale::Log
    } else {
        Scale::Linear
    }
}

fn emit(table: &Table, output: &OutputArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &output.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write_table(table, output.json, &mut file)?;
            file.flush()?;
        }
        None => write_table(table, output.json, stdout)?,
    }
    Ok(())
}

fn write_table(table: &Table, json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    if json {
        table.write_json(out)
    } else {
        table.write_csv(out)
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let (table, output) = match cli.command {
        Command::Capacity {
            sweep,
            ns,
            nn,
            schemes,
            output,
        } => {
            let values = match ns {
                Some(x) => vec![x],
                None => sweep.spec()?.values(),
            };
            (commands::capacity_curves(&values, nn, &schemes)?, output)
        }
        Command::Pie {
            sweep,
            nn,
            orders,
            approx,
            output,
        } => {
            let spec = sweep.spec()?.with_fixed("n_n", nn);
            (commands::pie_curves(&spec, nn, &orders, approx)?, output)
        }
        Command::Heatmap {
            sweep,
            nn_min,
            nn_max,
            nn_points,
            nn_log,
            output,
        } => {
            let nn = SweepSpec::new(Variable::Nn, scale(nn_log), nn_min, nn_max, nn_points)?;
            (commands::pie_heatmap(&sweep.spec()?, &nn)?, output)
        }
        Command::BpskChi { sweep, output } => (commands::bpsk_chi(&sweep.spec()?.with_fixed("n_n", 0.0))?, output),
        Command::Superadditivity { orders, ns, output } => (commands::superadditivity(&orders, ns)?, output),
        Command::Validate { seed, samples, output } => {
            let report = commands::validate(seed, samples)?;
            emit(&report.table, &output, stdout)?;
            writeln!(stderr, "validate: {} of {} checks passed", report.passed, report.total)?;
            return Ok(if report.all_passed() { EXIT_OK } else { EXIT_VALIDATION });
        }
    };
    emit(&table, &output, stdout)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            };
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}
