//! `qgame`: evaluate, solve and simulate quantum-logic games from the shell.

mod commands;
mod error;
mod output;
mod spec_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "qgame", version, about = "Quantum-logic games: payoffs, saddle points and protocol simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Shorthand for --format json.
    #[arg(long, conflicts_with_all = ["format", "csv", "text"])]
    json: bool,
    /// Shorthand for --format csv.
    #[arg(long, conflicts_with_all = ["format", "text"])]
    csv: bool,
    /// Shorthand for --format text.
    #[arg(long, conflicts_with = "format")]
    text: bool,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn format_or(&self, default: Format) -> Format {
        match (self.format, self.json, self.csv, self.text) {
            (Some(f), ..) => f,
            (None, true, ..) => Format::Json,
            (None, _, true, _) => Format::Csv,
            (None, _, _, true) => Format::Text,
            _ => default,
        }
    }
}

/// Where the game comes from: a description file or reduced coefficients.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct GameSource {
    /// Game description file (JSON).
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Reduced coefficients of the spin-projection game.
    #[arg(long, value_name = "A,B,C,D", value_parser = parse_coeffs, allow_hyphen_values = true)]
    coeffs: Option<[f64; 4]>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expected payoff of Alice for a pair of wave-function strategies.
    Eval {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        /// Alice's strategy.
        #[arg(long, value_name = "ALPHA,THETA", value_parser = parse_pair, allow_hyphen_values = true)]
        alice: (f64, f64),
        /// Bob's strategy.
        #[arg(long, value_name = "BETA,OMEGA", value_parser = parse_pair, allow_hyphen_values = true)]
        bob: (f64, f64),
        /// Angles are given in degrees.
        #[arg(long)]
        degrees: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Saddle-point equilibria over real strategies (alpha, beta) in [0, pi).
    Nash {
        #[command(flatten)]
        source: GameSource,
        /// Largest tolerated unilateral improvement.
        #[arg(long, default_value_t = 1e-6, value_parser = parse_positive)]
        eps: f64,
        /// Angular grid step in radians.
        #[arg(long, default_value_t = 1e-3, value_parser = parse_positive)]
        grid: f64,
        /// Also search over complex phases (experimental).
        #[arg(long)]
        phased: bool,
        /// Polar resolution of the sphere grid used by --phased.
        #[arg(long, default_value_t = 48, requires = "phased")]
        sphere_points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Best-response curves of both players.
    React {
        #[command(flatten)]
        source: GameSource,
        /// Angular grid step in radians.
        #[arg(long, default_value_t = 1e-3, value_parser = parse_positive)]
        grid: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo run of the preparation and measurement stages.
    Simulate {
        #[arg(long, value_name = "FILE")]
        spec: PathBuf,
        #[arg(long, value_name = "ALPHA,THETA", value_parser = parse_pair, allow_hyphen_values = true)]
        alice: (f64, f64),
        #[arg(long, value_name = "BETA,OMEGA", value_parser = parse_pair, allow_hyphen_values = true)]
        bob: (f64, f64),
        /// Preparation rounds per player.
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        prep_rounds: u64,
        /// Measurement rounds per complement pair.
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        meas_rounds: u64,
        /// Random seed; required so every run can be replayed.
        #[arg(long)]
        seed: u64,
        /// Worker threads (the report does not depend on this).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..1025))]
        workers: Option<u64>,
        #[arg(long)]
        degrees: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the dispersion uncertainty relation for one state.
    Uncertainty {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long)]
        degrees: bool,
        /// Scale the +-1 variables to +-PRICE.
        #[arg(long)]
        price: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Split p2 and p4 into a classical mixture plus an interference term.
    Interference {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta_a: f64,
        #[arg(long)]
        degrees: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Distributivity failures and Boolean blocks of the question lattice.
    Lattice {
        /// Number of complement pairs.
        #[arg(long, default_value_t = 2)]
        pairs: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let x = parse_finite(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("{s} must be positive"))
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match s.split(',').collect::<Vec<_>>()[..] {
        [a, b] => Ok((parse_finite(a)?, parse_finite(b)?)),
        _ => Err(format!("expected two comma-separated angles, got {s:?}")),
    }
}

fn parse_coeffs(s: &str) -> Result<[f64; 4], String> {
    let v = s.split(',').map(parse_finite).collect::<Result<Vec<_>, _>>()?;
    v.try_into()
        .map_err(|_| format!("expected four comma-separated coefficients, got {s:?}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qgame: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Command {
        Cli::try_parse_from(std::iter::once("qgame").chain(args.iter().copied()))
            .unwrap()
            .command
    }

    #[test]
    fn nash_defaults() {
        match parse(&["nash", "--spec", "g.json"]) {
            Command::Nash { eps, grid, phased, .. } => {
                assert_eq!((eps, grid, phased), (1e-6, 1e-3, false));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn angle_pairs_accept_negatives() {
        match parse(&["eval", "--spec", "g", "--alice", "-0.5,1", "--bob", "22.5,0", "--degrees"]) {
            Command::Eval { alice, bob, degrees, .. } => {
                assert_eq!(alice, (-0.5, 1.0));
                assert_eq!(bob, (22.5, 0.0));
                assert!(degrees);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        let bad: &[&[&str]] = &[
            &["nash"],
            &["nash", "--spec", "g", "--coeffs", "1,2,3,4"],
            &["nash", "--coeffs", "1,2,3"],
            &["nash", "--spec", "g", "--eps", "0"],
            &["nash", "--spec", "g", "--unknown"],
            &["eval", "--spec", "g", "--alice", "1", "--bob", "1,2"],
            &["eval", "--spec", "g", "--alice", "nan,0", "--bob", "1,2"],
            &["simulate", "--spec", "g", "--alice", "0,0", "--bob", "0,0"],
            &["simulate", "--spec", "g", "--alice", "0,0", "--bob", "0,0", "--seed", "1", "--prep-rounds", "0"],
            &["lattice", "--json", "--csv"],
        ];
        for args in bad {
            let r = Cli::try_parse_from(std::iter::once("qgame").chain(args.iter().copied()));
            assert!(r.is_err(), "{args:?} accepted");
        }
    }

    #[test]
    fn format_shorthands() {
        match parse(&["lattice", "--csv"]) {
            Command::Lattice { output, .. } => assert_eq!(output.format_or(Format::Json), Format::Csv),
            other => panic!("{other:?}"),
        }
        match parse(&["lattice"]) {
            Command::Lattice { output, .. } => assert_eq!(output.format_or(Format::Text), Format::Text),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
