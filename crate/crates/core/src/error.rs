use thiserror::Error;

use crate::network::EffectKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: String, to: String },

    #[error("self-loop on node {0}")]
    SelfLoop(String),

    #[error("non-finite weight on edge {from} -> {to}")]
    NonFiniteWeight { from: String, to: String },

    #[error("no edge records and no node universe given")]
    EmptyNetwork,

    #[error("edge endpoint {0} is not in the node universe")]
    UnknownNode(String),

    #[error("weight matrix must be {n}x{n}, got {len} entries")]
    DimensionMismatch { n: usize, len: usize },

    #[error("diagonal entry ({0},{0}) must be zero")]
    NonZeroDiagonal(usize),

    #[error("network has {actual} nodes, at least {required} required")]
    TooFewNodes { required: usize, actual: usize },

    #[error("tuple indices must be distinct and below {n}: {indices:?}")]
    InvalidTuple { indices: Vec<usize>, n: usize },

    #[error("{0} has no degeneracy diagnostic; it is always tested with reduced moments")]
    UnsupportedEffect(EffectKind),

    #[error("zero variance estimate in {0}; the statistic is undefined")]
    ZeroVariance(&'static str),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),

    #[error("edge list: {0}")]
    Parse(String),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
