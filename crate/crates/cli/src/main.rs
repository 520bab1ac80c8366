//! `wordnorm`: command-line access to norms on finite groups, free-norm
//! bounds, witness checks and profinite separation probes.
//!
//! Exit codes: 0 pass / separated / found, 1 fail / contained,
//! 2 inconclusive / catalog exhausted, 3 input or operational error.

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{Goal, Output, ProbeMode, Settings};
use wordnorm::{SearchBudget, DEFAULT_ORDER_CAP};

#[derive(Parser)]
#[command(name = "wordnorm", version, about = "Conjugation-invariant word norms and approximation witnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Largest group order any enumeration may reach.
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER_CAP)]
    cap_order: usize,

    /// Largest number of free words or partial products held by a search.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    cap_ball: usize,

    /// Most conjugated generators tried in a factorization.
    #[arg(long, global = true, default_value_t = 4)]
    budget_factors: usize,

    /// Longest conjugator tried in a factorization.
    #[arg(long, global = true, default_value_t = 2)]
    budget_conj: usize,

    /// Most relator conjugates in a factorization modulo relators.
    #[arg(long, global = true, default_value_t = 1)]
    budget_relators: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// One JSON object per line.
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Build (or load with --table) a norm on a group file and validate it.
    Norm {
        group: PathBuf,
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Quotient norm by the normal closure of the group file's `normal` elements.
    QuotientNorm {
        group: PathBuf,
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Round a norm up to an integer-valued one.
    Round {
        group: PathBuf,
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Chain norm of words along a descending chain of quotients.
    Chain { file: PathBuf },
    /// Image of the radius-m ball (times the relator closure) in a quotient.
    Ball { problem: PathBuf },
    /// Certified lower and upper bounds on free-group word norms.
    EstimateFreeNorm { problem: PathBuf },
    /// Check a witness map against one of the approximation definitions.
    CheckWitness { witness: PathBuf },
    /// Build the witness induced by the problem's quotient and check it.
    BuildLef { problem: PathBuf },
    /// Residual-finiteness separation probe in the problem's quotient.
    ProbeRf { problem: PathBuf },
    /// Class-product closure probe in the problem's quotient.
    ProbeProduct { problem: PathBuf },
    /// LEF separation probe on the problem's domain.
    ProbeLef { problem: PathBuf },
    /// Scan the problem's catalog for the first quotient achieving the goal.
    Search {
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Goal::Rf)]
        goal: Goal,
    },
    /// Replay certificates (one JSON record per line) from their own data.
    Verify { certificates: PathBuf },
    /// Randomized norm-axiom checks seeded by --seed.
    Selfcheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    if cli.cap_order == 0 || cli.cap_ball == 0 {
        anyhow::bail!("caps must be positive");
    }
    let s = Settings {
        cap_order: cli.cap_order,
        budget: SearchBudget {
            max_factors: cli.budget_factors,
            max_conjugator_len: cli.budget_conj,
            max_relator_factors: cli.budget_relators,
            max_states: cli.cap_ball,
        },
        seed: cli.seed,
    };
    match &cli.command {
        Command::Norm { group, table } => commands::norm(group, table.as_deref(), &s),
        Command::QuotientNorm { group, table } => commands::quotient(group, table.as_deref(), &s),
        Command::Round { group, table } => commands::round(group, table.as_deref(), &s),
        Command::Chain { file } => commands::chain(file, &s),
        Command::Ball { problem } => commands::ball(problem, &s),
        Command::EstimateFreeNorm { problem } => commands::estimate(problem, &s),
        Command::CheckWitness { witness } => commands::check_witness(witness, &s),
        Command::BuildLef { problem } => commands::build_lef(problem, &s),
        Command::ProbeRf { problem } => commands::probe(problem, ProbeMode::Rf, &s),
        Command::ProbeProduct { problem } => commands::probe(problem, ProbeMode::Product, &s),
        Command::ProbeLef { problem } => commands::probe(problem, ProbeMode::Lef, &s),
        Command::Search { problem, goal } => commands::search(problem, *goal, &s),
        Command::Verify { certificates } => commands::verify(certificates),
        Command::Selfcheck { trials } => commands::selfcheck(*trials, &s),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let written = match cli.format {
                Format::Text => stdout.write_all(out.text.as_bytes()),
                Format::Records => out
                    .records
                    .iter()
                    .try_for_each(|r| writeln!(stdout, "{r}")),
            };
            if written.is_err() {
                return ExitCode::from(3);
            }
            ExitCode::from(out.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
