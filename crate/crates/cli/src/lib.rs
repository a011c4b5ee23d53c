//! The `apportion` command: `solve`, `compare` and `bench`.
//!
//! Exit codes: 0 success, 1 backend mismatch or internal error, 2 invalid
//! input or arguments, 3 unresolved tie under the `report-only` policy.

pub mod bench;
pub mod compare;
pub mod input;
pub mod report;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use apportion_core::{
    solve, ApportionmentProblem, Backend, DivisorMethod, Error, MedianStrategy, TiePolicy,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use compare::Solver;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNRESOLVED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "apportion", version, about = "Highest-averages apportionment in linear time")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Allocate seats for a score table.
    Solve(SolveArgs),
    /// Cross-check the linear, heap and naive backends on random instances.
    Compare(CompareArgs),
    /// Time backends over a sweep of entity and seat counts; prints CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// CSV (`label,score` header) or JSON table; stdin when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Divisor method name or alias, e.g. `dhondt`, `webster`, `hill`.
    #[arg(long, value_parser = parse_method)]
    pub method: DivisorMethod,
    #[arg(long, value_parser = parse_count::<u64>)]
    pub seats: u64,
    #[arg(long, default_value = "linear", value_parser = parse_backend)]
    pub backend: Backend,
    #[arg(long, default_value = "by-score-then-input-order", value_parser = parse_policy)]
    pub tie_policy: TiePolicy,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Use median-of-medians instead of randomized pivots.
    #[arg(long)]
    pub deterministic_median: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 100, value_parser = parse_count::<u64>)]
    pub trials: u64,
    #[arg(long, default_value_t = 50, value_parser = parse_count::<usize>)]
    pub max_n: usize,
    #[arg(long, default_value_t = 5000, value_parser = parse_count::<u64>)]
    pub max_k: u64,
    #[arg(long, default_value_t = 1_000_000, value_parser = parse_count::<u64>)]
    pub max_score: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fix the method instead of drawing one per trial.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<DivisorMethod>,
    /// Fix the tie policy instead of drawing one per trial.
    #[arg(long, value_parser = parse_policy)]
    pub tie_policy: Option<TiePolicy>,
    /// Use this table's entities in every trial.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Entity counts, comma separated; `1e6` style is accepted.
    #[arg(long = "n", value_delimiter = ',', default_value = "1000", value_parser = parse_count::<usize>)]
    pub ns: Vec<usize>,
    /// Seat counts, comma separated.
    #[arg(long = "k", value_delimiter = ',', default_value = "1e3,1e6,1e9", value_parser = parse_count::<u64>)]
    pub ks: Vec<u64>,
    #[arg(long, default_value = "sainte-lague", value_parser = parse_method)]
    pub method: DivisorMethod,
    /// Backends, comma separated.
    #[arg(long = "backend", value_delimiter = ',', default_value = "linear", value_parser = parse_backend)]
    pub backends: Vec<Backend>,
    #[arg(long, default_value_t = 5, value_parser = parse_count::<usize>)]
    pub repeat: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub deterministic_median: bool,
}

fn parse_method(s: &str) -> Result<DivisorMethod, String> {
    s.parse().map_err(|e: Error| message(&e))
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: Error| message(&e))
}

fn parse_policy(s: &str) -> Result<TiePolicy, String> {
    s.parse().map_err(|e: Error| message(&e))
}

/// A nonnegative integer, also written as `1e6` or `10^6`.
fn parse_count<T: TryFrom<u64>>(s: &str) -> Result<T, String> {
    let s = s.trim().replace('_', "");
    let pow = |base: &str, exp: &str| -> Option<u64> {
        let (b, e) = (base.parse::<u64>().ok()?, exp.parse::<u32>().ok()?);
        b.checked_pow(e)
    };
    let value = if let Some((m, e)) = s.split_once(['e', 'E']) {
        pow("10", e).and_then(|p| m.parse::<u64>().ok()?.checked_mul(p))
    } else if let Some((b, e)) = s.split_once('^') {
        pow(b, e)
    } else {
        s.parse().ok()
    };
    value
        .and_then(|v| T::try_from(v).ok())
        .ok_or_else(|| format!("'{s}' is not a nonnegative integer in range"))
}

fn message(e: &Error) -> String {
    match e {
        Error::Validation(m) => m.clone(),
        other => other.to_string(),
    }
}

fn median_strategy(deterministic: bool) -> MedianStrategy {
    if deterministic {
        MedianStrategy::MedianOfMedians
    } else {
        MedianStrategy::Randomized
    }
}

fn read_input(path: Option<&PathBuf>, stdin: &mut dyn Read) -> Result<String, String> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display())),
        None => {
            let mut text = String::new();
            stdin.read_to_string(&mut text).map_err(|e| format!("cannot read stdin: {e}"))?;
            Ok(text)
        }
    }
}

fn load_entities(
    path: Option<&PathBuf>,
    stdin: &mut dyn Read,
) -> Result<Vec<apportion_core::Entity>, String> {
    let text = read_input(path, stdin)?;
    let source = path.map_or_else(|| "stdin".to_string(), |p| p.display().to_string());
    input::parse_table(&text).map_err(|e| format!("{source}: {e}"))
}

/// Runs the command line with the library solver.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, stdin, stdout, stderr, &solve)
}

/// [`run`] with a substitute solver, used to exercise `compare` against a
/// deliberately faulty backend.
pub fn run_with<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
    solver: &Solver,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_INVALID
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => run_solve(&args, stdin, stdout, solver),
        Command::Compare(args) => run_compare(&args, stdin, stdout, solver),
        Command::Bench(args) => run_bench(&args, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}

type Outcome = Result<i32, (i32, String)>;

fn invalid(msg: String) -> (i32, String) {
    (EXIT_INVALID, msg)
}

fn core_failure(e: Error) -> (i32, String) {
    match e {
        Error::Validation(_) | Error::Capacity(_) => (EXIT_INVALID, message(&e)),
        other => (EXIT_FAILURE, other.to_string()),
    }
}

fn run_solve(args: &SolveArgs, stdin: &mut dyn Read, out: &mut dyn Write, solver: &Solver) -> Outcome {
    let entities = load_entities(args.input.as_ref(), stdin).map_err(invalid)?;
    let problem = ApportionmentProblem::new(args.method, entities, args.seats)
        .with_backend(args.backend)
        .with_tie_policy(args.tie_policy)
        .with_median(median_strategy(args.deterministic_median));
    let result = solver(&problem).map_err(core_failure)?;
    let text = match args.format {
        Format::Text => report::render_text(&result, &problem.entities),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&result).expect("results serialize");
            s.push('\n');
            s
        }
    };
    let _ = out.write_all(text.as_bytes());
    Ok(if result.is_resolved() { EXIT_OK } else { EXIT_UNRESOLVED })
}

fn run_compare(args: &CompareArgs, stdin: &mut dyn Read, out: &mut dyn Write, solver: &Solver) -> Outcome {
    let entities = match &args.input {
        Some(p) => Some(load_entities(Some(p), stdin).map_err(invalid)?),
        None => None,
    };
    if args.max_n == 0 && entities.is_none() {
        return Err(invalid("--max-n must be at least 1".into()));
    }
    if args.max_score == 0 || args.max_score > apportion_core::api::MAX_SCORE {
        return Err(invalid(format!("--max-score must be in 1..={}", apportion_core::api::MAX_SCORE)));
    }
    let config = compare::CompareConfig {
        trials: args.trials,
        max_n: args.max_n,
        max_k: args.max_k,
        max_score: args.max_score,
        seed: args.seed,
        method: args.method,
        tie_policy: args.tie_policy,
        entities,
    };
    let report = compare::run(&config, solver);
    let _ = out.write_all(compare::render(&report, &config).as_bytes());
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
}

fn run_bench(args: &BenchArgs, out: &mut dyn Write) -> Outcome {
    let config = bench::BenchConfig {
        ns: args.ns.clone(),
        ks: args.ks.clone(),
        method: args.method,
        backends: args.backends.clone(),
        repeat: args.repeat,
        seed: args.seed,
        median: median_strategy(args.deterministic_median),
    };
    if config.ns.contains(&0) {
        return Err(invalid("--n values must be at least 1".into()));
    }
    let mut writer = csv::Writer::from_writer(out);
    bench::run(&config, |row| {
        let _ = writer.serialize(row);
        let _ = writer.flush();
    })
    .map_err(core_failure)?;
    Ok(EXIT_OK)
}
