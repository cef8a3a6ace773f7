mod commands;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cubehash::optsets::GeneratorSet;
use cubehash::{CodeSpec, PointSet};

use output::{Format, Precision};

/// Hamming-space LSH from error-correcting codes: exact collision
/// probabilities, crossovers, optimal zero-sets, and simulation.
#[derive(Parser, Debug)]
#[command(name = "cubehash", version)]
pub struct Cli {
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output format (each command has its own default).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Significant digits for numbers; decimal places for table crossovers.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: Option<u8>,
    #[command(subcommand)]
    pub command: Command,
}

/// Where a distance distribution comes from.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Code spec: projection:n,k | hamming:m | golay | file:PATH | concat:A+B.
    #[arg(long)]
    pub code: Option<CodeSpec>,
    /// Explicit point set "n:hex,hex,...".
    #[arg(long)]
    pub set: Option<PointSetArg>,
    /// Generators of a right-shifted down-set "n:hex,hex,...".
    #[arg(long)]
    pub gens: Option<GeneratorSet>,
}

#[derive(Debug, Clone)]
pub struct PointSetArg(pub PointSet);

impl std::str::FromStr for PointSetArg {
    type Err = cubehash::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PointSet::parse_literal(s).map(PointSetArg)
    }
}

/// A `--lhs`/`--rhs` operand: a code spec, or `set:LITERAL`, or
/// `gens:LITERAL`.
#[derive(Debug, Clone)]
pub enum Operand {
    Code(CodeSpec),
    Set(PointSet),
    Gens(GeneratorSet),
}

impl std::str::FromStr for Operand {
    type Err = cubehash::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("set:") {
            PointSet::parse_literal(rest).map(Operand::Set)
        } else if let Some(rest) = s.strip_prefix("gens:") {
            rest.parse().map(Operand::Gens)
        } else {
            s.parse().map(Operand::Code)
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Distance distribution of a set, code zero-set, or generated down-set.
    Ddf(SourceArgs),
    /// Collision probability at one or more error rates.
    Prob {
        #[command(flatten)]
        source: SourceArgs,
        /// Error rates, comma separated.
        #[arg(long, required = true, value_delimiter = ',')]
        gamma: Vec<f64>,
    },
    /// Error rates where two hashes trade places.
    Crossover {
        #[arg(long)]
        lhs: Operand,
        #[arg(long)]
        rhs: Operand,
    },
    /// Root of the Hamming-versus-projection difference polynomial.
    Alpha {
        /// Redundancies, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![4usize, 5, 6, 7])]
        m: Vec<usize>,
    },
    /// Random-code exponent bound: one point or a grid of (gamma, delta, D).
    Asymptotic {
        #[arg(long, requires = "delta")]
        gamma: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 0.02)]
        lo: f64,
        #[arg(long, default_value_t = 0.48)]
        hi: f64,
    },
    /// Right-shifted down-sets of a given size.
    Enumerate {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        count_only: bool,
    },
    /// Optimal sets of size 2^t with their ranges of optimality.
    Optimal {
        #[arg(long)]
        t: usize,
        /// Dimensions, comma separated.
        #[arg(long, required = true, value_delimiter = ',')]
        dim: Vec<usize>,
    },
    /// Convert between generators and down-sets.
    #[command(subcommand)]
    Gens(GensCommand),
    /// Monte Carlo near-duplicate search.
    Bench {
        #[arg(long, default_value = "golay")]
        code: CodeSpec,
        #[arg(long)]
        gamma: f64,
        /// Dataset size.
        #[arg(long = "M", alias = "points", default_value_t = 1 << 12)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Cap on hashing rounds per trial (default ceil(4/P)).
        #[arg(long)]
        max_rounds: Option<u64>,
        /// One CSV row per trial instead of the summary.
        #[arg(long)]
        csv: bool,
    },
    /// Regenerate the reference tables.
    Tables {
        #[arg(long, value_enum)]
        which: commands::Which,
        /// Every dimension and every regime; larger enumerations.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum GensCommand {
    /// Expand generators "n:hex,..." into the full down-set.
    Expand { gens: GeneratorSet },
    /// Minimal generators of a right-shifted down-set "n:hex,...".
    Minimize { set: PointSetArg },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let precision = Precision::new(cli.precision.map(usize::from));
    let result = commands::run(&cli).and_then(|(out, default)| {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        out.render(cli.format.unwrap_or(default), precision, &mut lock)?;
        lock.flush()?;
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe) {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
