//! Command-line front end for the `markoff` library.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "markoff", version, about = "Markoff-triple graphs mod p")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Graph {
    /// Involution graph.
    G,
    /// Rotation graph.
    Ghat,
}

#[derive(Args, Debug)]
struct PrimeArg {
    /// Prime modulus, decimal or 0x-prefixed hex.
    #[arg(long)]
    p: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hash a bit string or file to a hex digest.
    Hash {
        /// Prime modulus, decimal or 0x hex; may exceed 64 bits.
        #[arg(long)]
        p: String,
        /// Initial edge label.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        k: u8,
        /// Start vertex, default 1,1,1.
        #[arg(long, value_name = "X1,X2,X3")]
        start: Option<String>,
        /// Input as a string of 0s and 1s.
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        bits: Option<String>,
        /// Input file, read MSB-first.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Find a path between two surface points and emit a certificate.
    FindPath {
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long, value_name = "X1,X2,X3")]
        from: String,
        #[arg(long, value_name = "X1,X2,X3")]
        to: String,
        #[arg(long, value_enum, default_value = "ghat")]
        graph: Graph,
        /// Stop each orbit scan at the first ascent.
        #[arg(long)]
        greedy: bool,
        /// Pick climb coordinates and bridge planes at random.
        #[arg(long)]
        random_coords: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Replay a certificate; exit 1 if it does not hold.
    VerifyPath {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Path-finding campaign over primes, as CSV.
    BenchBgs {
        #[arg(long, default_value_t = 5)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        greedy: bool,
        #[arg(long, value_enum, default_value = "ghat")]
        graph: Graph,
        /// Fill the avg_ms column; the output is then not reproducible.
        #[arg(long)]
        timing: bool,
    },
    /// Descend an integer triple to (±1,±1,±1).
    Descend {
        #[arg(long, value_name = "A,B,C", allow_hyphen_values = true)]
        triple: String,
    },
    /// Search the integer tree for a lift of a surface point.
    Lift {
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long, value_name = "X1,X2,X3")]
        target: String,
        #[arg(long, default_value_t = markoff::lifting::DEFAULT_LIFT_BOUND)]
        bound: u128,
        /// Exit 1 when no lift is found.
        #[arg(long)]
        require_success: bool,
    },
    /// Connect two points through their integer lifts.
    LiftAttack {
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long, value_name = "X1,X2,X3")]
        from: String,
        #[arg(long, value_name = "X1,X2,X3")]
        to: String,
        #[arg(long, default_value_t = markoff::lifting::DEFAULT_LIFT_BOUND)]
        bound: u128,
        /// Exit 1 when either endpoint has no lift.
        #[arg(long)]
        require_success: bool,
    },
    /// List surface points with neighbour indices.
    Enumerate {
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long, value_enum, default_value = "g")]
        graph: Graph,
        /// Print counts as JSON instead of the adjacency list.
        #[arg(long)]
        summary: bool,
    },
    /// Rotation order of every residue, as CSV.
    Orders {
        #[command(flatten)]
        p: PrimeArg,
        /// Print the rotation orbit of this point instead.
        #[arg(long, value_name = "X1,X2,X3")]
        orbit: Option<String>,
        /// Coordinate fixed by the orbit's rotation.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        index: u8,
    },
    /// Size of the cage.
    Cage {
        #[command(flatten)]
        p: PrimeArg,
    },
    /// Full per-prime measurements, as CSV.
    Analyze {
        #[arg(long, default_value_t = 5)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        timing: bool,
        /// Largest even moment order reported.
        #[arg(long, default_value_t = 6)]
        lmax: u32,
    },
    /// Adjacency moments against the Kesten–McKay law, as CSV.
    Spectrum {
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long, default_value_t = 8)]
        lmax: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Probe vectors for the randomized trace.
        #[arg(long, default_value_t = markoff::analytics::DEFAULT_TRACE_SAMPLES)]
        samples: usize,
    },
    /// Endpoints of non-backtracking walks from (1,1,1), as CSV.
    Sample {
        #[command(flatten)]
        p: PrimeArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        length: u64,
        #[arg(long, default_value_t = 300)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Parameter screen for a prime.
    ParamCheck {
        #[command(flatten)]
        p: PrimeArg,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
