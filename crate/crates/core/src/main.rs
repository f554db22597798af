use std::fs::File;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use xmb::enumerate::{DEFAULT_ENUM_CAP, DEFAULT_WITNESS_LIMIT, ENUM_CAP_ENV};
use xmb::{
    certify_increment_growth, construct_witness, decompose, lower_bound, read_graph,
    solve_bruteforce, solve_exact, sweep, verify_bound, write_sweep_csv, BoundsError, ClassSpec,
    EnumError, GraphError, IncrementSet, SweepOutcome, VerifyOptions, DEFAULT_BRUTE_FORCE_CAP,
};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "xmb",
    version,
    about = "Maximum weight bipartite matching bounds and verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the class bound and the (q, r) decomposition of m.
    Bound(ClassArgs),
    /// Build a graph attaining the bound and report its optimum.
    Witness {
        #[command(flatten)]
        class: ClassArgs,
        /// Write the graph file here.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Solve a graph file.
    Solve {
        graph: PathBuf,
        /// Use the exhaustive solver instead of the Hungarian method.
        #[arg(long)]
        brute_force: bool,
    },
    /// Enumerate one class and compare its minimum with the bound.
    Verify {
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        /// Maximum number of argmin graphs to report.
        #[arg(long, default_value_t = DEFAULT_WITNESS_LIMIT)]
        witnesses: usize,
    },
    /// Verify every class in a grid and emit CSV.
    Sweep {
        /// Inclusive range of total weights, e.g. 1..12.
        #[arg(long, value_parser = parse_range::<u64>)]
        m_range: RangeInclusive<u64>,
        /// Inclusive range of partition sizes, e.g. 1..3.
        #[arg(long, value_parser = parse_range::<usize>)]
        sigma_range: RangeInclusive<usize>,
        #[command(flatten)]
        enumeration: EnumArgs,
        /// Write CSV here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check growth of the optimum after adding an increment set to a graph.
    Certify {
        graph: PathBuf,
        #[arg(short, long)]
        increments: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ClassArgs {
    /// Total weight m.
    #[arg(short = 'm', long = "weight", value_parser = value_parser!(u64).range(1..))]
    m: u64,
    /// Partition size sigma.
    #[arg(short = 's', long = "sigma", value_parser = parse_positive)]
    sigma: usize,
}

#[derive(Args, Debug)]
struct EnumArgs {
    /// Number of concurrent enumeration shards.
    #[arg(long, default_value_t = 1, value_parser = parse_positive)]
    jobs: usize,
    /// Refuse classes with more graphs than this.
    #[arg(long, env = ENUM_CAP_ENV, default_value_t = DEFAULT_ENUM_CAP, value_parser = value_parser!(u64).range(1..))]
    cap: u64,
    /// Visit one row/column-sorted representative per permutation orbit.
    #[arg(long)]
    dedup: bool,
}

impl EnumArgs {
    fn options(&self, witness_limit: usize) -> VerifyOptions {
        VerifyOptions {
            jobs: self.jobs,
            cap: self.cap,
            witness_limit,
            dedup: self.dedup,
        }
    }
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

/// Parses `A..B` or `A..=B`, both inclusive.
fn parse_range<T: std::str::FromStr>(s: &str) -> Result<RangeInclusive<T>, String>
where
    T::Err: std::fmt::Display,
{
    let (lo, hi) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let lo = lo.trim().parse::<T>().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi = hi.trim().parse::<T>().map_err(|e| format!("{hi:?}: {e}"))?;
    Ok(lo..=hi)
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        let code = match e {
            GraphError::Io { .. }
            | GraphError::Malformed(_)
            | GraphError::NotSquare { .. }
            | GraphError::NegativeEntry { .. }
            | GraphError::NotAnInteger { .. }
            | GraphError::EmptyPartition => EXIT_IO,
            _ => EXIT_INVARIANT,
        };
        Failure::new(code, e)
    }
}

impl From<BoundsError> for Failure {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Graph(g) => g.into(),
            BoundsError::Malformed(_) => Failure::new(EXIT_IO, e),
            _ => Failure::new(EXIT_INVARIANT, e),
        }
    }
}

impl From<EnumError> for Failure {
    fn from(e: EnumError) -> Self {
        let code = match e {
            EnumError::CapExceeded { .. } => EXIT_CAP,
            EnumError::ThreadPool { .. } => EXIT_USAGE,
        };
        Failure::new(code, e)
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::new(EXIT_IO, e))?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "{text}").map_err(|e| Failure::new(EXIT_IO, e))
}

fn spec(class: &ClassArgs) -> Result<ClassSpec, Failure> {
    ClassSpec::new(class.m, class.sigma).map_err(|e| Failure::new(EXIT_USAGE, e))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Bound(class) => {
            let spec = spec(&class)?;
            let bound = lower_bound(spec.m, spec.sigma);
            let mut out = json!({ "m": spec.m, "sigma": spec.sigma, "bound": bound });
            if let Ok(qr) = decompose(spec.m, spec.sigma) {
                out["q"] = json!(qr.q);
                out["r"] = json!(qr.r);
            }
            print_json(&out)
        }
        Command::Witness { class, out } => {
            let spec = spec(&class)?;
            let graph = construct_witness(spec.m, spec.sigma)?;
            if let Some(path) = &out {
                graph.write(path)?;
            }
            let solved = solve_exact(&graph);
            let bound = lower_bound(spec.m, spec.sigma);
            print_json(&json!({
                "m": spec.m,
                "sigma": spec.sigma,
                "bound": bound,
                "weight": solved.weight,
                "matching": solved.matching,
                "graph": graph,
                "path": out,
            }))?;
            if solved.weight != bound || graph.total_weight() != spec.m {
                return Err(Failure::new(
                    EXIT_INVARIANT,
                    "witness does not attain the bound",
                ));
            }
            Ok(())
        }
        Command::Solve { graph, brute_force } => {
            let graph = read_graph(&graph)?;
            let result = if brute_force {
                solve_bruteforce(&graph, DEFAULT_BRUTE_FORCE_CAP)
                    .map_err(|e| Failure::new(EXIT_CAP, e))?
            } else {
                solve_exact(&graph)
            };
            print_json(&result)
        }
        Command::Verify {
            class,
            enumeration,
            witnesses,
        } => {
            let spec = spec(&class)?;
            let report = verify_bound(spec, &enumeration.options(witnesses))?;
            print_json(&report)?;
            if !report.matches {
                return Err(Failure::new(
                    EXIT_INVARIANT,
                    format!(
                        "MISMATCH for {spec}: observed minimum {} but bound {}",
                        report.min_observed, report.bound
                    ),
                ));
            }
            Ok(())
        }
        Command::Sweep {
            m_range,
            sigma_range,
            enumeration,
            out,
        } => {
            let rows = sweep(m_range, sigma_range, &enumeration.options(0))?;
            let written = match &out {
                Some(path) => {
                    let file = File::create(path)
                        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
                    write_sweep_csv(&rows, file)
                }
                None => write_sweep_csv(&rows, io::stdout().lock()),
            };
            written.map_err(|e| Failure::new(EXIT_IO, e))?;

            let mut failed = false;
            for row in &rows {
                match &row.outcome {
                    SweepOutcome::Verified(r) if !r.matches => {
                        eprintln!(
                            "MISMATCH m={} sigma={}: observed {} bound {}",
                            row.m, row.sigma, r.min_observed, r.bound
                        );
                        failed = true;
                    }
                    SweepOutcome::Skipped(reason) => {
                        eprintln!("skipped m={} sigma={}: {reason}", row.m, row.sigma)
                    }
                    SweepOutcome::Failed(reason) => {
                        eprintln!("failed m={} sigma={}: {reason}", row.m, row.sigma);
                        failed = true;
                    }
                    SweepOutcome::Verified(_) => {}
                }
            }
            if failed {
                return Err(Failure::new(EXIT_INVARIANT, "sweep found failing cells"));
            }
            Ok(())
        }
        Command::Certify { graph, increments } => {
            let graph = read_graph(&graph)?;
            let increments = IncrementSet::read(&increments, graph.sigma())?;
            let certificate = certify_increment_growth(&graph, &increments)?;
            print_json(&certificate)?;
            if !certificate.passed() {
                return Err(Failure::new(EXIT_INVARIANT, "growth certificate failed"));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
