mod check;
mod commands;
mod models;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Graded coalgebra toolkit for continuous-time Markov chains.
#[derive(Parser, Debug)]
#[command(name = "gcoalg", version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Model file (JSON). Defaults to the built-in 4-state repairable system.
    #[arg(long, global = true, conflicts_with = "builtin")]
    pub model: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub builtin: Option<Builtin>,
    /// Failure rate of the repairable built-ins (decimal or fraction).
    #[arg(long, global = true, default_value = "1")]
    pub lambda: String,
    /// Repair rate of the repairable built-ins (decimal or fraction).
    #[arg(long, global = true, default_value = "1")]
    pub mu: String,
    /// Radius of the `randomwalk` built-in.
    #[arg(long, global = true, default_value_t = 5)]
    pub radius: i64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long = "mode-arith", global = true, value_enum, default_value_t = Arith::Float)]
    pub arith: Arith,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Repairable4,
    Repairable3,
    Randomwalk,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arith {
    Rational,
    Float,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivMode {
    Behavioural,
    Trace,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Via {
    Lumping,
    Logic,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogicArg {
    Bool,
    Quant,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Attach the wrong label in the distributive law.
    SwapLabel,
    /// Keep only the first atom in monadic bind.
    FirstAtom,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the transition kernel at each requested time.
    Kernel {
        /// Times, comma separated (integers for `randomwalk`).
        #[arg(long, value_delimiter = ',', required = true)]
        time: Vec<String>,
    },
    /// Print the trace distribution of a state at a sampling word.
    Trace {
        #[arg(long)]
        state: String,
        /// Word as comma-separated `t:k` segments; empty for the unit.
        #[arg(long, default_value = "")]
        word: String,
    },
    /// Compare two states for behavioural or trace equivalence.
    Equiv {
        #[arg(long, value_enum)]
        mode: EquivMode,
        /// Two state names; the second is looked up in the second model if given.
        #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
        states: Vec<String>,
        #[arg(long, conflicts_with = "builtin2")]
        model2: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin2: Option<Builtin>,
        #[arg(long, value_delimiter = ',')]
        time_grid: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_segments: usize,
        #[arg(long, default_value_t = 4)]
        max_obs: u64,
        /// Also compare single-delay traces through eigen-coefficients.
        #[arg(long)]
        exact: bool,
    },
    /// Compute a state partition and, where possible, the quotient model.
    Quotient {
        #[arg(long, value_enum, default_value_t = Via::Lumping)]
        via: Via,
        #[arg(long, value_enum, default_value_t = LogicArg::Bool)]
        logic: LogicArg,
        /// Maximum modal depth of the formula budget.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Write the quotient model file here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a formula at one or all states.
    Eval {
        #[arg(long, value_enum)]
        logic: Option<LogicArg>,
        #[arg(long)]
        formula: String,
        #[arg(long, conflicts_with = "all")]
        state: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Run the property suites; exits with 1 if any fails.
    Check {
        /// Restrict to these suites (see `--list`).
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        #[arg(long, value_enum)]
        mutate: Option<Mutation>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// List suite names and exit.
        #[arg(long)]
        list: bool,
    },
}

/// Failure categories mapped onto exit codes.
pub enum Failure {
    /// A property did not hold (exit 1).
    Property,
    /// Bad usage or invalid input (exit 2).
    Usage(String),
}

impl From<graded_coalg::Error> for Failure {
    fn from(e: graded_coalg::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    match cli.command {
        Command::Kernel { time } => commands::kernel(g, &time),
        Command::Trace { state, word } => commands::trace(g, &state, &word),
        Command::Equiv { mode, states, model2, builtin2, time_grid, max_segments, max_obs, exact } => {
            let second = models::Source { model: model2, builtin: builtin2 };
            let opts = commands::EquivOptions { mode, time_grid, max_segments, max_obs, exact };
            commands::equiv(g, &states, &second, &opts)
        }
        Command::Quotient { via, logic, depth, output } => commands::quotient(g, via, logic, depth, output.as_deref()),
        Command::Eval { logic, formula, state, all } => commands::eval(g, logic, &formula, state.as_deref(), all),
        Command::Check { suite, mutate, seed, list } => check::run(g, &suite, mutate, seed, list),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
