use thiserror::Error;

/// Domain errors raised by the game algebra, search and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("pair count must be at least 2, got {0}")]
    PairCount(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("payoff matrix does not have the single-pairing shape with pairs = 3; use the operator form")]
    NotTableShape,
    #[error("angle {value} outside [0, pi/2]")]
    AngleOutOfRange { value: f64 },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("no definite rounds for pair {pair} of {player}; frequency undefined")]
    UndefinedEstimate { player: &'static str, pair: usize },
    #[error("game is degenerate: {0}")]
    Degenerate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
