use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Knowledge, belief and certainty: model checking, decision procedures,
/// proof checking and Miller's principle.
#[derive(Parser, Debug)]
#[command(name = "certlogic", version)]
pub struct Cli {
    /// Print structured output as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for enumeration and battery checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Seed for commands that sample.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct FormulaArg {
    /// Formula text.
    #[arg(short = 'f', long = "formula")]
    pub formula: String,
}

#[derive(Args, Debug)]
pub struct ModelArg {
    /// Structure file (JSON).
    #[arg(short = 'm', long = "model")]
    pub model: PathBuf,
}

#[derive(Args, Debug)]
pub struct AgentArg {
    /// Agent name or 1-based index.
    #[arg(short = 'a', long = "agent", default_value = "1")]
    pub agent: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a formula and show its canonical forms.
    Parse(FormulaArg),
    /// Truth value at one state.
    Eval {
        #[command(flatten)]
        model: ModelArg,
        /// State name.
        #[arg(short = 's', long = "state")]
        state: String,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// States where a formula holds.
    Extension {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Whether a formula holds at every state of a structure.
    Valid {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Validity of a knowledge formula in a normal system.
    Decide {
        /// System: K, KD, T, K4, KD4, S4, K5, KD5, K45, KD45, S5.
        #[arg(long = "sys")]
        sys: String,
        #[command(flatten)]
        formula: FormulaArg,
        /// Maximum tableau nodes.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Validity of a certainty formula over a class of probability structures.
    DecideCert {
        /// Class: N0, N1, Nunif or N^SYS for a serial system.
        #[arg(long = "class")]
        class: String,
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Compare S5 validity of a formula with KD45 validity of K of it.
    Bridge(FormulaArg),
    /// Translate between the knowledge and certainty languages.
    Translate {
        #[command(flatten)]
        formula: FormulaArg,
        /// Target language, `k` or `c`; inferred when omitted.
        #[arg(long)]
        to: Option<String>,
    },
    /// Equivalent formula without nested modal operators (KD45).
    Normalize {
        #[command(flatten)]
        formula: FormulaArg,
        /// Print every rewrite step.
        #[arg(long)]
        trace: bool,
    },
    /// Frame conditions of an accessibility or support relation.
    FrameProps {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        agent: AgentArg,
    },
    /// Support relation of a probability structure.
    Support {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        agent: AgentArg,
    },
    /// States with false certainties in a simple structure.
    Fb {
        #[command(flatten)]
        model: ModelArg,
        #[command(flatten)]
        agent: AgentArg,
    },
    /// Miller's principle.
    #[command(subcommand)]
    Miller(MillerCommand),
    /// Check a proof file.
    ProveCheck {
        /// Proof file (JSON).
        #[arg(short = 'p', long = "proof")]
        proof: PathBuf,
        /// Also decide the conclusion in the proof's system.
        #[arg(long)]
        confirm: bool,
    },
    /// Enumerate single-agent knowledge structures, or sample probability
    /// structures with --random.
    Enumerate {
        /// Number of states.
        #[arg(long, default_value_t = 2)]
        states: usize,
        /// Comma-separated propositions.
        #[arg(long, default_value = "p")]
        props: String,
        /// Keep only relations in this system's class.
        #[arg(long = "sys")]
        sys: Option<String>,
        /// Report structures falsifying this formula instead of listing all.
        #[arg(short = 'f', long = "formula")]
        formula: Option<String>,
        /// Print only the number of structures.
        #[arg(long)]
        count: bool,
        /// Sample this many generalized probability structures instead.
        #[arg(long)]
        random: Option<usize>,
        /// Shape of sampled structures: any, uniform, positive-simple.
        #[arg(long, default_value = "any")]
        shape: String,
        /// Largest denominator of sampled probabilities.
        #[arg(long, default_value_t = 4)]
        den: u32,
    },
}

#[derive(Subcommand, Debug)]
pub enum MillerCommand {
    /// Build the denominator-cleared instance for a formula and interval.
    Instance {
        #[command(flatten)]
        formula: FormulaArg,
        /// Interval `a,b` with 0 <= a <= b <= 1.
        #[arg(long)]
        interval: String,
        /// Outer and inner agent, `i,j`.
        #[arg(long, default_value = "1,1")]
        agents: String,
        /// Extra conditioning atoms `w_j(chi) in [c, d]`, repeatable.
        #[arg(long = "given")]
        given: Vec<String>,
    },
    /// Check a frame against a battery and uniformity.
    CheckFrame {
        /// Frame file (JSON).
        #[arg(short = 'F', long = "frame")]
        frame: PathBuf,
        /// Number of propositions to enumerate assignments over.
        #[arg(long, default_value_t = 1)]
        props: usize,
        /// Battery file; the built-in battery when omitted.
        #[arg(long)]
        battery: Option<PathBuf>,
        #[command(flatten)]
        agent: AgentArg,
    },
    /// States where the expert is certain of its own distribution.
    Sgood {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value = "1")]
        expert: String,
        #[arg(long = "agent", default_value = "2")]
        agent: String,
    },
    /// Whether the agent gives the expert's good states probability one.
    Ecc {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value = "1")]
        expert: String,
        #[arg(long = "agent", default_value = "2")]
        agent: String,
    },
}

/// Long options also accepted with a single dash, as in `-sys KD45`.
const LONG_OPTIONS: &[&str] = &[
    "sys", "class", "json", "jobs", "seed", "formula", "model", "state", "agent", "budget",
    "trace", "to", "proof", "confirm", "states", "props", "count", "random", "shape", "den",
    "interval", "agents", "given", "frame", "battery", "expert",
];

pub fn normalize_argv(args: impl IntoIterator<Item = String>) -> Vec<String> {
    args.into_iter()
        .map(|a| match a.strip_prefix('-') {
            Some(rest) if !rest.starts_with('-') && LONG_OPTIONS.contains(&rest) => format!("-{a}"),
            _ => a,
        })
        .collect()
}
