//! The `collide` command line.
//!
//! Every command prints one JSON object (or CSV rows for curve outputs).
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 numerical budget or evaluation failure.

pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::analysis::{self, default_grid};
use crate::bessel;
use crate::error::Error;
use crate::montecarlo::{self, Estimate, McConfig};
use crate::walk::{Dimension, Mode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable consulted for `--seed` when the flag is absent.
pub const SEED_ENV: &str = "COLLIDE_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "collide",
    version,
    about = "Collision statistics of two independent simple random walks on Z^d"
)]
pub struct Cli {
    /// Output format; csv is available for `fit` and `expect`.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Omit wall-clock metadata so identical runs produce identical bytes.
    #[arg(long, global = true)]
    pub deterministic: bool,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Discrete,
    Continuous,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Discrete => Mode::Discrete,
            ModeArg::Continuous => Mode::Continuous,
        }
    }
}

#[derive(Debug, Args)]
pub struct DimArg {
    /// Lattice dimension d (1..=16).
    #[arg(long = "dim")]
    pub dim: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coordinate and collision probabilities at time t.
    Prob {
        #[command(flatten)]
        dim: DimArg,
        /// Time t >= 0.
        #[arg(long)]
        time: f64,
    },
    /// Expected occupation time of the collision set on [0, t_max].
    Expect {
        #[command(flatten)]
        dim: DimArg,
        /// Upper end of the time window.
        #[arg(long = "t-max")]
        t_max: f64,
    },
    /// Finite or infinite expected collisions, with numerical growth evidence.
    Classify {
        #[command(flatten)]
        dim: DimArg,
    },
    /// Extrapolate the limit of t^{d/2} P(D(t) = 0).
    Fit {
        #[command(flatten)]
        dim: DimArg,
        /// Top of the default grid 10, 10^1.5, ..., t_max.
        #[arg(long = "t-max", default_value_t = 1e6)]
        t_max: f64,
        /// Explicit comma-separated grid; overrides --t-max.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Monte Carlo estimate of the expected collision count.
    Simulate {
        #[command(flatten)]
        dim: DimArg,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Time horizon (continuous) or step count (discrete).
        #[arg(long, conflicts_with = "steps")]
        horizon: Option<f64>,
        /// Step count for discrete mode.
        #[arg(long)]
        steps: Option<u64>,
        /// Number of independent trials (at least 100).
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Master seed; trial i uses stream i.
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        /// Worker threads; results do not depend on this.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Run the built-in verification suites; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
        /// Worker threads for the Monte Carlo checks.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

/// Output of `prob`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbOutput {
    pub d: Dimension,
    pub t: f64,
    pub p_coordinate: f64,
    pub p_collision: f64,
    pub log_p_collision: f64,
    pub err_bound: f64,
    pub underflow: bool,
}

/// Output of `simulate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateOutput {
    pub d: Dimension,
    pub mode: Mode,
    pub horizon: f64,
    pub workers: usize,
    pub estimate: Estimate,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Usage(String),
    Io(std::io::Error),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(std::io::Error::other(e))
    }
}

/// Parses `args` (including the program name), runs the command, and returns
/// the process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Verify) => EXIT_VERIFY_FAILED,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INVALID
            }
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

fn dimension(arg: &DimArg) -> Result<Dimension, Failure> {
    Ok(Dimension::new(arg.dim)?)
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let csv_allowed = matches!(cli.command, Command::Fit { .. } | Command::Expect { .. });
    if cli.format == Format::Csv && !csv_allowed {
        return Err(Failure::Usage(
            "--format csv is only available for fit and expect".into(),
        ));
    }
    let mut sink: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut emit = |command: &str, record: &dyn erased::Record| -> Result<(), Failure> {
        let value = envelope(command, record.to_value(), cli.deterministic);
        serde_json::to_writer_pretty(&mut sink, &value).map_err(std::io::Error::other)?;
        writeln!(sink)?;
        Ok(())
    };

    match &cli.command {
        Command::Prob { dim, time } => {
            let d = dimension(dim)?;
            let c = bessel::collision_prob_detailed(*time, d)?;
            emit(
                "prob",
                &ProbOutput {
                    d,
                    t: *time,
                    p_coordinate: c.p_coordinate,
                    p_collision: c.p_collision,
                    log_p_collision: c.log_p_collision,
                    err_bound: c.err_bound,
                    underflow: c.underflow,
                },
            )
        }
        Command::Expect { dim, t_max } => {
            let d = dimension(dim)?;
            let est = analysis::expected_occupation(d, *t_max)?;
            match cli.format {
                Format::Json => emit("expect", &est),
                Format::Csv => {
                    let curve = analysis::occupation_curve(d, &curve_grid(*t_max))?;
                    write_csv(&mut sink, "occupation", &curve)
                }
            }
        }
        Command::Classify { dim } => {
            let d = dimension(dim)?;
            let verdict = analysis::classify_dimension(d)?;
            let mut value = serde_json::to_value(&verdict).map_err(std::io::Error::other)?;
            if let Value::Object(map) = &mut value {
                map.insert("finite".into(), Value::Bool(verdict.expected_collisions_finite));
                map.insert(
                    "growth".into(),
                    serde_json::to_value(verdict.growth_diagnostic).map_err(std::io::Error::other)?,
                );
            }
            emit("classify", &value)
        }
        Command::Fit { dim, t_max, grid } => {
            let d = dimension(dim)?;
            let grid = match grid {
                Some(g) => g.clone(),
                None => {
                    if !t_max.is_finite() || *t_max < 1e4 {
                        return Err(Failure::Usage(format!("--t-max must be at least 1e4, got {t_max}")));
                    }
                    default_grid(*t_max)
                }
            };
            let fit = analysis::fit_leading_constant(d, &grid)?;
            match cli.format {
                Format::Json => emit("fit", &fit),
                Format::Csv => {
                    let rows: Vec<(f64, f64)> = fit.t_grid.iter().copied().zip(fit.g_values.iter().copied()).collect();
                    write_csv(&mut sink, "scaled_probability", &rows)
                }
            }
        }
        Command::Simulate {
            dim,
            mode,
            horizon,
            steps,
            trials,
            seed,
            workers,
        } => {
            let d = dimension(dim)?;
            let mode = Mode::from(*mode);
            let horizon = match (mode, horizon, steps) {
                (_, Some(h), None) => *h,
                (Mode::Discrete, None, Some(n)) => *n as f64,
                (Mode::Continuous, None, Some(_)) => {
                    return Err(Failure::Usage("continuous mode takes --horizon, not --steps".into()))
                }
                _ => return Err(Failure::Usage("give --horizon (or --steps in discrete mode)".into())),
            };
            let cfg = McConfig::new(*trials, *seed).with_workers(*workers);
            let estimate = montecarlo::mc_expected_count(d, mode, horizon, cfg)?;
            emit(
                "simulate",
                &SimulateOutput {
                    d,
                    mode,
                    horizon,
                    workers: *workers,
                    estimate,
                },
            )
        }
        Command::Verify { suite, workers } => {
            if *workers == 0 {
                return Err(Failure::Usage("--workers must be at least 1".into()));
            }
            let report = verify::run_suite(*suite, *workers);
            for c in &report.checks {
                eprintln!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            emit("verify", &report)?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
    }
}

/// Four points per decade from `min(1, t_max/10)` up to `t_max`.
fn curve_grid(t_max: f64) -> Vec<f64> {
    let start = (t_max / 10.0).min(1.0);
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let t = start * 10f64.powf(k as f64 / 4.0);
        if t >= t_max * (1.0 - 1e-12) {
            break;
        }
        grid.push(t);
        k += 1;
    }
    grid.push(t_max);
    grid
}

fn write_csv(sink: &mut dyn Write, column: &str, rows: &[(f64, f64)]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["t", column])?;
    for (t, v) in rows {
        w.write_record([format!("{t:e}"), format!("{v:e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Adds the command name and, unless deterministic, a generation timestamp.
fn envelope(command: &str, record: Value, deterministic: bool) -> Value {
    let mut map = Map::new();
    map.insert("command".into(), Value::String(command.into()));
    if !deterministic {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        map.insert("generated_at".into(), Value::from(secs));
    }
    match record {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("result".into(), other);
        }
    }
    Value::Object(map)
}

mod erased {
    use serde::Serialize;
    use serde_json::Value;

    pub trait Record {
        fn to_value(&self) -> Value;
    }

    impl<T: Serialize> Record for T {
        fn to_value(&self) -> Value {
            serde_json::to_value(self).unwrap_or(Value::Null)
        }
    }
}
