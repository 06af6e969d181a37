use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

use report::{Failure, Report};

#[derive(Parser, Debug)]
#[command(name = "gossip", version, about = "Exact finite-time gossip schedules")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Add decimal approximations next to exact values.
    #[arg(long, global = true)]
    approx: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a schedule that reaches consensus.
    Build(BuildArgs),
    /// Check a schedule file: consensus, consensus row, cost, prefix invariants.
    Verify(VerifyArgs),
    /// Run a schedule on an initial state.
    Simulate(SimulateArgs),
    /// Exhaustive search for the cheapest consensus schedule.
    Search(SearchArgs),
    /// Least total chi over dyadic decompositions of one.
    LemmaF(LemmaFArgs),
    /// Orbit, connectivity and simulation checks for swap gossip on qubits.
    Quantum(QuantumArgs),
    /// Consensus row of the mixed schedule and its distance from uniform.
    BetaReport(BetaArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BuildKind {
    Hypercube,
    Asym,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long = "type", value_enum)]
    kind: BuildKind,
    /// Dimension of the hypercube, `n = 2^m`.
    #[arg(long)]
    m: Option<u32>,
    /// Node count for the mixed schedule.
    #[arg(long)]
    n: Option<usize>,
    /// Write the schedule here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    schedule: PathBuf,
    /// Skip the per-prefix invariant suite.
    #[arg(long)]
    no_invariants: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    schedule: PathBuf,
    /// One rational per line.
    state: PathBuf,
    /// Print the state after every step.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sym,
    Asym,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, required_unless_present = "uniqueness")]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "asym")]
    mode: ModeArg,
    /// Node-update budget; defaults to the optimum plus two.
    #[arg(long)]
    budget: Option<u64>,
    /// List every witness schedule.
    #[arg(long)]
    witnesses: bool,
    /// Check the shape of minimal four-node symmetric schedules instead.
    #[arg(long, conflicts_with_all = ["certificate", "budget"])]
    uniqueness: bool,
    /// Longest schedule enumerated by `--uniqueness`.
    #[arg(long, default_value_t = 8, requires = "uniqueness")]
    max_len: usize,
    /// Nonconvergence certificate for symmetric gossip on `n` nodes.
    #[arg(long, conflicts_with = "budget")]
    certificate: bool,
    /// Step depth for `--certificate`.
    #[arg(long, default_value_t = 4, requires = "certificate")]
    depth: u64,
}

#[derive(Args, Debug)]
pub struct LemmaFArgs {
    #[arg(long)]
    n: usize,
    /// Largest exponent allowed in a part; defaults to `m + 1`.
    #[arg(long)]
    max_exp: Option<u32>,
    /// List every optimizer.
    #[arg(long)]
    all: bool,
    /// Also relate the diagonal of this consensus schedule to the bound.
    #[arg(long)]
    link: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct QuantumArgs {
    /// Qubit count.
    #[arg(long)]
    n: usize,
    /// Orbit table, connectivity, fixed space and block checks (default).
    #[arg(long)]
    components: bool,
    /// Swap list file, one `i j` pair per line.
    #[arg(long, requires = "rho")]
    simulate: Option<PathBuf>,
    /// Initial state: `mixed`, `|q><q|` or `diag:|q><q|`.
    #[arg(long, requires = "simulate")]
    rho: Option<String>,
    /// Diagonal-sector sizes and the impossibility flag.
    #[arg(long)]
    impossibility: bool,
    /// Confirm the impossibility by search to this depth.
    #[arg(long, requires = "impossibility")]
    confirm_depth: Option<u64>,
}

#[derive(Args, Debug)]
pub struct BetaArgs {
    #[arg(long)]
    n: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let started = Instant::now();
    let ctx = report::Ctx { approx: cli.approx };
    let outcome = match &cli.command {
        Command::Build(a) => commands::build(a, &ctx),
        Command::Verify(a) => commands::verify(a, &ctx),
        Command::Simulate(a) => commands::simulate(a, &ctx),
        Command::Search(a) => commands::search(a, &ctx),
        Command::LemmaF(a) => commands::lemma_f(a, &ctx),
        Command::Quantum(a) => commands::quantum(a, &ctx),
        Command::BetaReport(a) => commands::beta(a, &ctx),
    };
    match outcome {
        Ok(mut rep) => {
            rep.elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
            rep.emit(cli.json);
            if rep.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(msg)) => {
            if cli.json {
                println!("{}", serde_json::json!({ "error": msg }));
            }
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

impl Report {
    fn emit(&self, json: bool) {
        let text = if json {
            let mut s = serde_json::to_string_pretty(self).expect("report serializes");
            s.push('\n');
            s
        } else {
            self.human()
        };
        // a closed pipe downstream is not an error worth reporting
        let _ = std::io::stdout().lock().write_all(text.as_bytes());
    }
}
