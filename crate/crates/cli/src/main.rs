//! `tropical`: command-line access to tropical-core.
//!
//! Exit status is 0 on success, 1 on a domain error (with `{"error", "detail"}` JSON on
//! stdout) and 2 on a usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tropical_core::random::DEFAULT_SEED;

#[derive(Parser)]
#[command(name = "tropical", version, about = "Tropical curves, rational functions and expansive maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of random trials or samples (command-specific default).
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Suite {
    Lemma4,
    Cor3,
    Homlaws,
}

#[derive(Subcommand)]
pub enum Command {
    /// First Betti number of the curve.
    Genus {
        #[arg(long)]
        curve: String,
    },
    /// The model without 2-valent vertices.
    CanonicalModel {
        #[arg(long)]
        curve: String,
    },
    /// Value of a function at a point.
    Eval {
        #[arg(long = "fn")]
        f: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// Pointwise maximum of two functions.
    Oplus {
        #[arg(long = "fn")]
        f: PathBuf,
        #[arg(long = "fn2")]
        g: PathBuf,
    },
    /// Pointwise sum of two functions.
    Odot {
        #[arg(long = "fn")]
        f: PathBuf,
        #[arg(long = "fn2")]
        g: PathBuf,
    },
    /// Negation of a function.
    Oinv {
        #[arg(long = "fn")]
        f: PathBuf,
    },
    /// Zeros and poles with their orders.
    Divisor {
        #[arg(long = "fn")]
        f: PathBuf,
    },
    /// Maximum, minimum and where they are attained.
    Extrema {
        #[arg(long = "fn")]
        f: PathBuf,
    },
    /// Chip-firing move CF(subgraph; length).
    Cf {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        subgraph: PathBuf,
        #[arg(long)]
        length: String,
    },
    /// Chip-firing move from a single point.
    CfPoint {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        point: String,
        #[arg(long)]
        eps: String,
    },
    /// Tail probe CF(Γ ∖ (y, x]; ∞) for a point at infinity x.
    CfTail {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        x: String,
    },
    /// Validate a map file.
    CheckExpansive {
        #[arg(long)]
        map: String,
    },
    /// Composite `outer ∘ inner`.
    Compose {
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
    },
    /// Check harmonic-morphism data (or the data induced by a map) and print its degree.
    CheckHarmonic {
        #[arg(long, conflicts_with = "map", required_unless_present = "map")]
        data: Option<String>,
        #[arg(long)]
        map: Option<String>,
    },
    /// Isometries of a star-infinite curve.
    Aut {
        #[arg(long)]
        curve: String,
        /// List generators only.
        #[arg(long)]
        generators: bool,
    },
    /// Star-infinite test and dilation witness.
    Classify {
        #[arg(long)]
        curve: String,
    },
    /// Image of a function under the semiring isomorphism induced by a map.
    Pullback {
        #[arg(long)]
        map: String,
        #[arg(long = "fn")]
        f: PathBuf,
    },
    /// Build the isomorphism of a map, forget the map, and recover it by probing.
    Recover {
        #[arg(long)]
        map: String,
        /// Extra sample points, one per line.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Randomized checks of the isomorphism induced by a map.
    Verify {
        #[arg(long)]
        map: String,
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Graphviz description of a curve, optionally with a function and its divisor.
    ExportDot {
        #[arg(long, required_unless_present = "f")]
        curve: Option<String>,
        #[arg(long = "fn")]
        f: Option<PathBuf>,
        /// Also mark the divisor of the function.
        #[arg(long, requires = "f")]
        divisor: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(text) => match &cli.out {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("cannot write {}: {e}", path.display());
                    ExitCode::from(1)
                }
            },
            None => {
                print!("{text}");
                ExitCode::SUCCESS
            }
        },
        Err(e) => {
            println!("{}", serde_json::to_string(&e).expect("serializable"));
            ExitCode::from(1)
        }
    }
}
