//! `volcur`: volume-sampled CUR approximation, expected errors and bounds
//! from the command line.
//!
//! Exit status: 0 success, 1 invalid input, 2 numerical failure,
//! 3 enumeration cap exceeded.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use volcur_core::{Error, ErrorKind};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "volcur",
    version,
    about = "Volume-sampled CUR approximation of PSD matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
enum Command {
    /// Elementary symmetric polynomials e_0..e_k of a spectrum.
    Esp,
    /// Ratios e_{k+1}/e_k over a k range.
    Ratio,
    /// Expected nuclear error (k+1) e_{k+1}/e_k, with an optional Monte-Carlo estimate.
    ExpectedError,
    /// Exact ratio, simple bound, dyadic bound and optimal error per k.
    Bounds,
    /// Draw one subset, write the CUR approximation to --out and print a summary.
    Approx,
    /// Draw volume-sampled subsets and their CUR errors.
    Sample,
    /// Check the enumerated expectation and normalizer against the eigenvalue formulas.
    Verify,
    /// Plot data: ratios of a spectrum and of a dyadic majorant next to the tail sum.
    Figure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kernel {
    /// M = XᵀX of the data matrix X.
    Gram,
    /// M_ij = exp(−‖x_i − x_j‖² / 2σ²) over the rows of X.
    Rbf,
}

/// An inclusive range of k values, written `4` or `1..32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KRange {
    pub start: usize,
    pub end: usize,
}

impl KRange {
    pub fn iter(self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }

    pub fn single(self) -> Option<usize> {
        (self.start == self.end).then_some(self.start)
    }
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid k {t:?}: expected an integer or a range a..b"))
        };
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b)?),
            None => {
                let k = num(s)?;
                (k, k)
            }
        };
        if start == 0 || start > end {
            return Err(format!(
                "k range {start}..{end} must satisfy 1 <= start <= end"
            ));
        }
        Ok(KRange { start, end })
    }
}

#[derive(Clone, Debug, Args)]
pub struct Options {
    /// Matrix file: whitespace- or comma-separated rows (a data matrix with --kernel).
    #[arg(long, global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,

    /// Spectrum: geom:q=<f>,n=<int> | pow:p=<f>,n=<int> | dyadic:lmax=<int>,base=<f> | file:<path>.
    #[arg(long, global = true, value_name = "GENSPEC")]
    pub spectrum: Option<String>,

    /// Dominating dyadic spectrum for `bounds` and `figure`: dyadic:lmax=<int>,base=<f>.
    #[arg(long, global = true, value_name = "GENSPEC")]
    pub majorant: Option<String>,

    /// Rank k, or an inclusive range a..b.
    #[arg(long, global = true, value_name = "K|A..B")]
    pub k: Option<KRange>,

    /// Seed of the random streams.
    #[arg(long, global = true, env = "VOLCUR_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Number of volume-sampled draws.
    #[arg(long, global = true)]
    pub draws: Option<usize>,

    /// Build the matrix from a data file instead of reading it directly.
    #[arg(long, global = true, value_enum)]
    pub kernel: Option<Kernel>,

    /// Bandwidth of the rbf kernel.
    #[arg(long, global = true)]
    pub sigma: Option<f64>,

    /// Output file (written atomically); stdout if absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Validation => 1,
        ErrorKind::Numerical => 2,
        ErrorKind::CapExceeded => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.command, &cli.options) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::CapExceeded { .. }) {
                eprintln!("hint: use `volcur sample` for instances too large to enumerate");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
