//! Command-line front end: instance generation, single solves, experiment
//! sweeps, and distributed-emulation checks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rqps::experiment::{self, ExperimentSpec, Mode};
use rqps::instance::{generate_complete_uniform, read_instance, write_matrix};
use rqps::oracle::hungarian;
use rqps::solver::{solve, SolverConfig};
use rqps::Error;

/// Refuse the exact oracle above this size.
const ORACLE_MAX_N: usize = 2000;

#[derive(Parser)]
#[command(name = "rqps", version, about = "Approximate maximum weight bipartite matching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sequential,
    Distsim,
}

#[derive(Subcommand)]
enum Command {
    /// Write a complete instance with uniform random weights as a matrix file.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10.0)]
        lo: f64,
        #[arg(long, default_value_t = 100.0)]
        hi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one instance read from an edge-list or matrix file.
    Solve {
        path: PathBuf,
        #[arg(long)]
        slots: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compute the exact optimum and the approximation ratio.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 1)]
        record_every: usize,
    },
    /// Sweep sizes and runs; write mean/std/min/max ratio per grid point as CSV.
    Experiment {
        /// Instance sizes (repeat or comma-separate).
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 200, 400])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10.0)]
        lo: f64,
        #[arg(long, default_value_t = 100.0)]
        hi: f64,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        /// Slot grid as multiples of n; defaults to 1/8, 1/4, ..., 128.
        #[arg(long, value_delimiter = ',')]
        slots: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Sequential)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the distributed emulation next to the sequential solver and report
    /// per-slot rounds, messages and agreement as CSV.
    DistsimCheck {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 10.0)]
        lo: f64,
        #[arg(long, default_value_t = 100.0)]
        hi: f64,
        /// Defaults to n.
        #[arg(long)]
        slots: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Parse { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate { n, lo, hi, seed, out } => {
            let m = generate_complete_uniform(n, lo, hi, seed)?;
            match out {
                Some(p) => write_matrix(&m, p)?,
                None => io::stdout().lock().write_all(rqps::instance::format_matrix(&m).as_bytes())?,
            }
        }
        Command::Solve { path, slots, seed, oracle, record_every } => {
            let matrix = read_instance(&path)?;
            let n = matrix.n();
            if oracle && n > ORACLE_MAX_N {
                return Err(Failure::Usage(format!(
                    "--oracle refused for n = {n} > {ORACLE_MAX_N}: the exact solver is cubic in n"
                )));
            }
            let config = SolverConfig { slots: slots.unwrap_or(n), seed, record_every };
            let (matching, trajectory) = solve(&matrix, &config)?;
            let weight = trajectory.last().map_or(0.0, |p| p.weight);
            // Compute everything before printing so failures leave no partial output.
            let optimum = oracle.then(|| hungarian(&matrix).weight);
            let mut out = io::stdout().lock();
            for (i, j) in matching.pairs() {
                writeln!(out, "{i} {j}")?;
            }
            writeln!(out, "slots {}", config.slots)?;
            writeln!(out, "weight {weight}")?;
            if let Some(opt) = optimum {
                let ratio = if opt > 0.0 { weight / opt } else { 1.0 };
                writeln!(out, "optimum {opt}")?;
                writeln!(out, "ratio {ratio}")?;
            }
        }
        Command::Experiment { n, lo, hi, runs, slots, seed, mode, out } => {
            let mode = match mode {
                ModeArg::Sequential => Mode::Sequential,
                ModeArg::Distsim => Mode::Distsim,
            };
            let spec = ExperimentSpec {
                sizes: n,
                weight_lo: lo,
                weight_hi: hi,
                runs,
                slot_grid: slots.unwrap_or_else(experiment::default_slot_grid),
                seed_base: seed,
                mode,
            };
            spec.validate()?;
            let rows = experiment::run_experiment(&spec)?;
            experiment::write_csv(&rows, mode, open_out(&out)?)?;
        }
        Command::DistsimCheck { n, lo, hi, slots, seed, out } => {
            let matrix = generate_complete_uniform(n, lo, hi, seed)?;
            let rows = experiment::distsim_check(&matrix, slots.unwrap_or(n), seed)?;
            experiment::write_distsim_csv(&rows, open_out(&out)?)?;
            let agree = rows.iter().all(|r| r.matches_sequential);
            let max_rounds = rows.iter().map(|r| r.rounds).max().unwrap_or(0);
            eprintln!(
                "{} slots, max rounds per slot {max_rounds}, bound {}, sequential agreement: {}",
                rows.len(),
                4 * rqps::distsim::log2_ceil(n) + 8,
                if agree { "yes" } else { "NO" }
            );
            if !agree {
                return Err(Failure::Usage("distributed emulation diverged from the sequential solver".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
