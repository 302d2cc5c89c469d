use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use bediv_core::campaign::{Budget, Mode, DEFAULT_STATS_INTERVAL};
use bediv_core::generators::GeneratorKind;
use bediv_core::harness::SutKind;
use bediv_core::mutation::{DEFAULT_EPSILON, DEFAULT_MAX_MUTATION_SITES};
use clap::{Args, Parser, Subcommand};

mod commands;

/// Coverage-guided fuzzing over split structural/value parameter sequences.
#[derive(Debug, Parser)]
#[command(name = "bediv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a fuzzing campaign and write its corpus and statistics.
    Fuzz(FuzzArgs),
    /// Regenerate saved parameter files and check their recorded results.
    Replay(ReplayArgs),
    /// Behavioral diversity of a trace log at the requested orders.
    Diversity(DiversityArgs),
    /// Final-row differences between two stats files (b minus a).
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
struct FuzzArgs {
    #[arg(long, value_parser = parse_mode)]
    mode: Mode,
    #[arg(long, value_parser = parse_sut)]
    sut: SutKind,
    /// Defaults to the generator matching the SUT.
    #[arg(long, value_parser = parse_generator)]
    generator: Option<GeneratorKind>,
    /// Wall-clock budget, e.g. 90s, 5m or 1h.
    #[arg(long, value_parser = parse_duration, conflicts_with = "runs", required_unless_present = "runs")]
    budget: Option<Duration>,
    /// Run-count budget; the campaign clock then counts runs.
    #[arg(long)]
    runs: Option<u64>,
    #[arg(long, env = "BEDIV_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Campaign-clock units between stats rows (runs or milliseconds).
    #[arg(long, default_value_t = DEFAULT_STATS_INTERVAL)]
    stats_interval: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_MUTATION_SITES)]
    max_mutation_sites: u32,
    #[arg(long)]
    max_depth: Option<u32>,
    /// Also write <out>/trace.log.
    #[arg(long)]
    trace_log: bool,
    /// Start from the parameter files in this directory.
    #[arg(long)]
    seed_corpus: Option<PathBuf>,
    /// Count only valid traces in the branch abundances.
    #[arg(long)]
    valid_only: bool,
}

impl FuzzArgs {
    fn budget(&self) -> Budget {
        match (self.runs, self.budget) {
            (Some(n), _) => Budget::Runs(n),
            (None, Some(d)) => Budget::Time(d),
            (None, None) => unreachable!("clap requires one of --budget and --runs"),
        }
    }
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// A parameter file, or a directory of them (its queue/ and failures/
    /// subdirectories included).
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = parse_sut)]
    sut: SutKind,
    #[arg(long, value_parser = parse_generator)]
    generator: Option<GeneratorKind>,
    #[arg(long)]
    max_depth: Option<u32>,
}

#[derive(Debug, Args)]
struct DiversityArgs {
    #[arg(long)]
    log: PathBuf,
    /// Comma-separated orders.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    q: Vec<f64>,
    #[arg(long)]
    valid_only: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_sut(s: &str) -> Result<SutKind, String> {
    s.parse()
}

fn parse_generator(s: &str) -> Result<GeneratorKind, String> {
    s.parse()
}

/// Integer seconds with an optional `s`, `m` or `h` suffix.
fn parse_duration(s: &str) -> Result<Duration, String> {
    let (digits, unit) = match s.char_indices().last() {
        Some((i, c)) if c.is_ascii_alphabetic() => (&s[..i], c),
        _ => (s, 's'),
    };
    let n: u64 = digits.parse().map_err(|_| format!("invalid duration `{s}`"))?;
    let secs = match unit {
        's' => Some(n),
        'm' => n.checked_mul(60),
        'h' => n.checked_mul(3600),
        _ => return Err(format!("invalid duration unit in `{s}` (expected s, m or h)")),
    };
    secs.map(Duration::from_secs).ok_or_else(|| format!("duration `{s}` is too large"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fuzz(args) => commands::fuzz(&args),
        Command::Replay(args) => commands::replay(&args),
        Command::Diversity(args) => commands::diversity(&args),
        Command::Compare(args) => commands::compare(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(commands::EXIT_CONFIG)
        }
    }
}
