//! `dldef`: decide interpolant, definition and referring-expression
//! existence from the command line. Every run prints one JSON report.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::RunReport;

#[derive(Parser, Debug)]
#[command(
    name = "dldef",
    version,
    about = "Definability and interpolant existence for description logics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Dialect: alco, alch, alcho, alcio, alchi or alchio (defaults to the
    /// ontology's `dialect` line)
    #[arg(long, global = true)]
    pub dialect: Option<String>,
    /// Add the universal role to the dialect
    #[arg(long, global = true)]
    pub universal: bool,
    /// Largest number of types per closure, enforced as an atom limit
    #[arg(long, global = true, value_name = "N")]
    pub budget_types: Option<u64>,
    /// Largest number of candidate mosaics per universe
    #[arg(long, global = true, value_name = "N")]
    pub budget_mosaics: Option<usize>,
    /// Write the witness bundle to this file
    #[arg(long, global = true, value_name = "FILE")]
    pub witness: Option<PathBuf>,
    /// Print a plain-text rendering instead of JSON
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Include wall-clock time in the report
    #[arg(long, global = true)]
    pub timing: bool,
    /// Seed for a random instance when no ontology is given
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Shuffle the mosaic elimination order with this seed
    #[arg(long, global = true, value_name = "N", hide = true)]
    pub order_seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse an ontology, optionally checking a concept and a model against it
    Parse {
        #[arg(long)]
        onto: String,
        #[arg(long)]
        concept: Option<String>,
        /// Interpretation JSON to check against the ontology
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Concept satisfiability under an ontology
    Sat {
        #[arg(long)]
        onto: Option<String>,
        #[arg(long)]
        concept: String,
    },
    /// Entailment of a concept inclusion
    Entails {
        #[arg(long)]
        onto: Option<String>,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Largest Σ-bisimulation between two interpretations
    Bisim {
        #[arg(long, required_unless_present = "bundle")]
        m1: Option<PathBuf>,
        #[arg(long, required_unless_present = "bundle")]
        m2: Option<PathBuf>,
        /// A witness bundle written by `--witness`
        #[arg(long, conflicts_with_all = ["m1", "m2"])]
        bundle: Option<PathBuf>,
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long)]
        d1: Option<String>,
        #[arg(long)]
        d2: Option<String>,
        /// Ontologies the two models must satisfy
        #[arg(long)]
        o1: Option<String>,
        #[arg(long)]
        o2: Option<String>,
    },
    /// Interpolant existence for C1 ⊑ C2 under O1 ∪ O2
    InterpolantExists(TwoSided),
    /// Explicit definition existence over a signature
    DefinitionExists(Definability),
    /// Referring expression existence for an individual
    ReferringExists {
        #[arg(long)]
        onto: String,
        #[arg(long)]
        individual: String,
        /// Defaults to every symbol of the ontology except the individual
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Non-projective definition existence for a concept name
    NonprojectiveExists {
        #[arg(long)]
        onto: String,
        #[arg(long)]
        name: String,
        #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
        route: RouteArg,
    },
    /// Implicit definability over a signature
    Implicit(Definability),
    /// Bounded search for bisimilar small models
    OracleJoint {
        #[command(flatten)]
        sides: TwoSided,
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_domain: usize,
        #[command(flatten)]
        limits: Limits,
    },
    /// Bounded search for an explicit definition
    OracleEnumdef {
        #[command(flatten)]
        def: Definability,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        #[command(flatten)]
        limits: Limits,
    },
}

#[derive(Args, Debug, Clone)]
pub struct TwoSided {
    #[arg(long)]
    pub o1: Option<String>,
    #[arg(long)]
    pub c1: Option<String>,
    #[arg(long)]
    pub o2: Option<String>,
    #[arg(long)]
    pub c2: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct Definability {
    #[arg(long)]
    pub onto: Option<String>,
    #[arg(long)]
    pub concept: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct Limits {
    #[arg(long, default_value_t = 1 << 22)]
    pub max_candidates: u64,
    /// Seconds
    #[arg(long, default_value_t = 60)]
    pub time_limit: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum RouteArg {
    Auto,
    Mosaic,
    Implicit,
    Reduction,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = commands::run(&cli);
    if cli.common.timing {
        report.timing_ms = Some(start.elapsed().as_millis() as u64);
    }
    print(&report, cli.common.pretty);
    ExitCode::from(report.exit as u8)
}

fn print(report: &RunReport, pretty: bool) {
    if pretty {
        print!("{}", report.to_text());
    } else {
        println!("{}", report.to_json());
    }
}
