//! The `dendrite` command surface. Every subcommand draws its randomness
//! from one generator seeded by `--seed`, returns a [`Report`], and the
//! binary renders it in the requested format.

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::Value;

mod commands;
pub mod docs;
mod render;

pub use commands::dispatch;

#[derive(Parser, Debug)]
#[command(name = "dendrite", version, about = "Finite experiments on the universal dendrite")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub cfg: RunConfig,
}

#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub max_points: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// significance level of statistical checks
    #[arg(long, global = true, default_value_t = 0.001)]
    pub alpha: f64,
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    /// tuple size, branch order or number of components, by subcommand
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// JSON input, `-` for stdin; generated from the seed when absent
    #[arg(long, global = true)]
    pub input: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sequence {
    /// ends alternating between two arms at the root
    Alternating,
    /// ends hanging off a descending ray
    Descending,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Random universe over S = {∞}
    GenUniverse,
    /// Random valid system
    GenSystem,
    /// Check membership in 𝓛 condition by condition
    #[command(name = "check-L")]
    CheckL,
    /// Extend a system into 𝓛 and report the embedding
    #[command(name = "extend-L")]
    ExtendL,
    /// Amalgamate two extensions of a common base
    Amalgamate {
        /// use the non-amalgamable pair over a base outside 𝓛
        #[arg(long)]
        notap: bool,
    },
    /// Embed two systems into one
    JointEmbed,
    /// Two systems over S = {k} with no joint embedding
    JepObstruction,
    /// Classify points under a realized automorphism
    ClassifyDynamics,
    /// The D₃ homeomorphism and its square
    ExampleD3,
    /// Convex converging order rooted at an end
    BuildClo,
    /// Converging, root and convexity checks on an order
    CheckClo,
    /// A converging order that is not convex
    NonconvexExample,
    /// Move one order onto another along a partial isomorphism
    TransportOrder,
    /// Chi-square test of the invariant measure on k components
    SampleMeasure {
        /// also compare against this many ξ-fixing pushforwards
        #[arg(long, default_value_t = 0)]
        pushforwards: usize,
    },
    /// Orbits on k-tuples of branch points
    CountOrbits {
        /// branch orders, e.g. `inf` or `3,4,inf`
        #[arg(long, default_value = "inf")]
        orders: String,
    },
    /// Validate a point of K
    KspaceValidate {
        /// set ∞ at a second branch point
        #[arg(long)]
        double_infinity: bool,
    },
    /// Orbit type of a point of K
    KspaceClassify,
    /// Cauchy in D∞ against Cauchy in K for a sequence of ends
    CauchyCompare {
        #[arg(long, value_enum, default_value_t = Sequence::Alternating)]
        sequence: Sequence,
        #[arg(long, default_value_t = 24)]
        length: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GenUniverse => "gen-universe",
            Command::GenSystem => "gen-system",
            Command::CheckL => "check-L",
            Command::ExtendL => "extend-L",
            Command::Amalgamate { .. } => "amalgamate",
            Command::JointEmbed => "joint-embed",
            Command::JepObstruction => "jep-obstruction",
            Command::ClassifyDynamics => "classify-dynamics",
            Command::ExampleD3 => "example-d3",
            Command::BuildClo => "build-clo",
            Command::CheckClo => "check-clo",
            Command::NonconvexExample => "nonconvex-example",
            Command::TransportOrder => "transport-order",
            Command::SampleMeasure { .. } => "sample-measure",
            Command::CountOrbits { .. } => "count-orbits",
            Command::KspaceValidate { .. } => "kspace-validate",
            Command::KspaceClassify => "kspace-classify",
            Command::CauchyCompare { .. } => "cauchy-compare",
        }
    }
}

/// What a subcommand produced. `passed` is false when a check failed.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub table: Option<String>,
    pub dot: Option<String>,
    pub passed: bool,
}

impl Report {
    pub fn json(json: Value, passed: bool) -> Self {
        Report { json, table: None, dot: None, passed }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// bad flags or unreadable input; exit status 2
    Usage(String),
    /// the computation itself failed; exit status 1 with the JSON
    Failed(Value),
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(serde_json::json!({ "error": e.to_string() }))
}

/// The parsed `--input`, if any.
pub fn read_input<T: DeserializeOwned>(cfg: &RunConfig) -> Result<Option<T>, CliError> {
    let Some(src) = &cfg.input else { return Ok(None) };
    let text = if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("--input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(src).map_err(|e| usage(format!("--input {src}: {e}")))?
    };
    serde_json::from_str(&text).map(Some).map_err(|e| usage(format!("--input: {e}")))
}

/// The bytes to emit for a report.
pub fn render(cmd: &Command, cfg: &RunConfig, r: &Report) -> Result<String, CliError> {
    match cfg.format {
        Format::Json => Ok(format!("{}\n", serde_json::to_string_pretty(&r.json).expect("values serialize"))),
        Format::Table => r.table.clone().ok_or_else(|| usage(format!("--format table is not supported by {}", cmd.name()))),
        Format::Dot => r.dot.clone().ok_or_else(|| usage(format!("--format dot is not supported by {}", cmd.name()))),
    }
}

/// Runs a parsed command line: the text to print and the exit status.
pub fn run(cli: &Cli) -> (String, i32) {
    let outcome = dispatch(&cli.command, &cli.cfg).and_then(|r| Ok((render(&cli.command, &cli.cfg, &r)?, r.passed)));
    match outcome {
        Ok((text, passed)) => (text, if passed { 0 } else { 1 }),
        Err(CliError::Failed(v)) => (format!("{}\n", serde_json::to_string_pretty(&v).expect("values serialize")), 1),
        Err(CliError::Usage(msg)) => (format!("error: {msg}\n"), 2),
    }
}
