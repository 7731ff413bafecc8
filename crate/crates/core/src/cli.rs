//! The `moment-bounds` command line.
//!
//! Exit codes: 0 on success, 1 when the library rejects the input, 2 on a
//! usage error. JSON goes to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::bidisperse::construct_with_moment;
use crate::bounds::{limits, BoundInput, SupportBounds};
use crate::decompose::decompose;
use crate::error::{Error, Result};
use crate::moments::{summarize, DiscreteDistribution};
use crate::sweep::{run_sweep, run_sweep_with_threads, write_report, SweepConfig};

/// Caps the number of sweep worker threads when set.
pub const THREADS_ENV: &str = "MOMENT_BOUNDS_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "moment-bounds",
    version,
    about = "Standardized moments and their limits under bounded support"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print mean, spread and moments of a distribution read from JSON.
    #[command(allow_negative_numbers = true)]
    Moments {
        /// File holding {"values": [...], "probabilities": [...]}.
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
    },
    /// Print the limits on standardized moments for a mean, spread and support.
    #[command(allow_negative_numbers = true)]
    Bounds {
        #[arg(long)]
        mean: f64,
        #[arg(long)]
        std: f64,
        #[arg(long)]
        xmin: Option<f64>,
        #[arg(long)]
        xmax: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "3,4")]
        orders: Vec<usize>,
    },
    /// Print the two-point distributions with a given mean, CoV and moment.
    #[command(allow_negative_numbers = true)]
    Construct {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        mean: f64,
        #[arg(long)]
        cov: f64,
        #[arg(long)]
        target: f64,
    },
    /// Split a distribution into two-point pieces sharing its mean.
    #[command(allow_negative_numbers = true)]
    Decompose {
        file: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Monte Carlo check of the limits and write per-bin CSV.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[arg(long)]
        xmin: f64,
        #[arg(long)]
        xmax: f64,
        #[arg(long)]
        mean: f64,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        /// Samples per bin.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
        orders: Vec<usize>,
        /// Support sizes to draw; 2 is always added.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        k_values: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Where to write samples outside the limits; defaults to OUT with
        /// a `.counterexamples.json` suffix.
        #[arg(long)]
        counterexamples: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    2
                }
            };
        }
    };
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return 2;
        }
    };
    match dispatch(cli.command, threads, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn threads_from_env() -> std::result::Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!(
                "{THREADS_ENV} must be a positive integer, got {raw:?}"
            )),
        },
    }
}

fn dispatch(
    command: Command,
    threads: Option<usize>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    match command {
        Command::Moments { file, max_order } => {
            let dist = DiscreteDistribution::from_json_file(&file)?;
            print_json(stdout, &summarize(&dist, max_order)?)
        }
        Command::Bounds {
            mean,
            std,
            xmin,
            xmax,
            orders,
        } => {
            let input = BoundInput::new(mean, std, SupportBounds::new(xmin, xmax)?)?;
            let reports = orders
                .into_iter()
                .map(|n| limits(n, &input))
                .collect::<Result<Vec<_>>>()?;
            print_json(stdout, &reports)
        }
        Command::Construct {
            order,
            mean,
            cov,
            target,
        } => {
            let specs = construct_with_moment(order, mean, cov, target)?;
            let dists: Vec<DiscreteDistribution> =
                specs.iter().map(|s| s.to_distribution()).collect();
            print_json(stdout, &dists)
        }
        Command::Decompose { file, out } => {
            let dist = DiscreteDistribution::from_json_file(&file)?;
            let decomposition = decompose(&dist)?;
            match out {
                Some(path) => decomposition.to_json_file(path),
                None => print_json(stdout, &decomposition),
            }
        }
        Command::Sweep {
            xmin,
            xmax,
            mean,
            bins,
            samples,
            orders,
            k_values,
            seed,
            out,
            counterexamples,
        } => {
            let config = SweepConfig {
                support: SupportBounds::between(xmin, xmax)?,
                mean,
                orders,
                bins,
                samples_per_bin: samples,
                k_values,
                seed,
            };
            let outcome = match threads {
                Some(n) => run_sweep_with_threads(&config, n)?,
                None => run_sweep(&config)?,
            };
            write_report(&outcome.records, &out)?;
            let _ = writeln!(
                stderr,
                "wrote {} records to {}; max delta {:.6} of {:.6}; {} samples discarded",
                outcome.records.len(),
                out.display(),
                outcome.max_delta(),
                outcome.delta_prime,
                outcome.discarded,
            );
            if !outcome.counterexamples.is_empty() {
                let path =
                    counterexamples.unwrap_or_else(|| suffixed(&out, ".counterexamples.json"));
                write_json(&path, &outcome.counterexamples)?;
                let _ = writeln!(
                    stderr,
                    "note: {} samples fall outside the limits; written to {}",
                    outcome.counterexamples.len(),
                    path.display()
                );
            }
            Ok(())
        }
    }
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn print_json<T: Serialize + ?Sized>(stdout: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable output");
    writeln!(stdout, "{text}").map_err(|source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable output");
    fs::write(path, text + "\n").map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
