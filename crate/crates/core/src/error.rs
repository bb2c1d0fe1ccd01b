use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {node} out of range for graph with {n} nodes")]
    InvalidNode { node: usize, n: usize },

    #[error("edge probability {value} / {n} exceeds 1 for block pair ({a}, {b})")]
    ProbabilityOverflow { a: usize, b: usize, value: f64, n: usize },

    #[error("power-law exponent must be > 2, got {0}")]
    InvalidExponent(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("group {group} is empty (total marginal mass {mass:e})")]
    DegenerateGroup { group: usize, mass: f64 },

    #[error("graph has no spectrum for {0}")]
    NoSpectrum(&'static str),

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("ground truth contains a single group")]
    DegenerateTruth,

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("edge list {0} contains no edges")]
    EmptyGraph(PathBuf),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
