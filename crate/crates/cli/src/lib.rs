//! `capkit`: command-line access to the capkit-core algorithms.
//!
//! Exit codes: 0 success or property held, 1 property violated or
//! counterexample found, 2 invalid input or usage, 3 internal assertion
//! breach.

// Errors carry exact witness values.
#![allow(clippy::result_large_err)]

pub mod commands;
pub mod files;
pub mod fuzz;
pub mod output;
pub mod shrink;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use capkit_core::choquet::DEFAULT_MAX_PERMUTATIONS;
use clap::{Parser, Subcommand, ValueEnum};

use output::{envelope, Context, Failure, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "capkit", version, about = "Exact-arithmetic capacities: classify, integrate, extract probabilities")]
pub struct Cli {
    /// Emit a JSON document with provenance instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the capacity axioms.
    Validate { capacity: PathBuf },
    /// Alternating/monotone orders up to K, plus the ∞-criteria.
    Classify {
        capacity: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
    },
    /// Choquet integral of a function file.
    Integrate {
        capacity: PathBuf,
        #[arg(long)]
        function: PathBuf,
    },
    /// Apply c ↦ c^F for a comma-separated set F.
    Transform {
        capacity: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        /// Also write the result as a capacity file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List the invariant subfield.
    Subfield { capacity: PathBuf },
    /// Look for a 2-alternating capacity strictly below the input.
    Reduce { capacity: PathBuf },
    /// A probability below the capacity that agrees with it on a chain.
    Extract {
        capacity: PathBuf,
        /// Pipe-separated nested sets, e.g. "a|a,b".
        #[arg(long)]
        chain: String,
        #[arg(long, value_enum, default_value_t = PivotArg::Lowest)]
        pivot_order: PivotArg,
        #[arg(long, required_if_eq("pivot_order", "random"))]
        seed: Option<u64>,
    },
    /// A probability between a 2-alternating upper and a 2-monotone lower capacity.
    Sandwich { upper: PathBuf, lower: PathBuf },
    /// Distinct permutation measures of the capacity.
    Extreme {
        capacity: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_PERMUTATIONS)]
        max_permutations: u64,
    },
    /// Pointwise infimum of a totally ordered family.
    Inf {
        #[arg(required = true, num_args = 1..)]
        capacities: Vec<PathBuf>,
    },
    /// Seeded property campaign over generated capacities.
    Fuzz(fuzz::FuzzArgs),
    /// Write a generated capacity file.
    Gen {
        #[arg(long, value_enum)]
        class: GenClass,
        #[arg(long)]
        atoms: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; for `pair`, `<stem>.upper.json` and `<stem>.lower.json`
        /// are written next to it; for `corpus`, a directory.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// How the lower capacity of a pair is drawn.
        #[arg(long, value_enum, default_value_t = fuzz::PairArg::Conjugate)]
        pair_mode: fuzz::PairArg,
        /// Write the dense array form instead of the subset-keyed map.
        #[arg(long)]
        dense: bool,
        /// Number of capacities for `corpus`.
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PivotArg {
    Lowest,
    Highest,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenClass {
    Prob,
    #[value(name = "2alt")]
    TwoAlt,
    Belief,
    Plaus,
    Pair,
    /// Every generator family in turn.
    Corpus,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Classify { .. } => "classify",
            Command::Integrate { .. } => "integrate",
            Command::Transform { .. } => "transform",
            Command::Subfield { .. } => "subfield",
            Command::Reduce { .. } => "reduce",
            Command::Extract { .. } => "extract",
            Command::Sandwich { .. } => "sandwich",
            Command::Extreme { .. } => "extreme",
            Command::Inf { .. } => "inf",
            Command::Fuzz(_) => "fuzz",
            Command::Gen { .. } => "gen",
        }
    }
}

/// Parses `argv`, runs the command, prints its output and returns the exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let name = cli.command.name();
    let mut ctx = match Context::from_env() {
        Ok(ctx) => ctx,
        Err(f) => return report_failure(name, cli.json, &output::Provenance::default(), f),
    };
    match commands::dispatch(&cli.command, &mut ctx) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            if cli.json {
                let doc = envelope(name, &ctx.provenance, outcome.code, Ok(outcome.result));
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            } else {
                let _ = write!(stdout, "{}", outcome.text);
            }
            outcome.code
        }
        Err(f) => report_failure(name, cli.json, &ctx.provenance, f),
    }
}

fn report_failure(name: &str, json: bool, provenance: &output::Provenance, f: Failure) -> u8 {
    if json {
        let doc = envelope(name, provenance, f.code, Err(&f));
        println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    } else {
        eprintln!("error: {}", f.message);
        if let Some(details) = &f.text_details {
            eprint!("{details}");
            if !details.ends_with('\n') {
                eprintln!();
            }
        }
    }
    f.code
}
