//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate x[{row},{col}] = {value} lies outside [0,1]")]
    OutOfRangeCoordinate { row: usize, col: usize, value: f64 },

    #[error("edge ({i},{j}) is a self-loop")]
    SelfLoop { i: usize, j: usize },

    #[error("bad index in edge ({i},{j}): vertices are 1..={n} with i < j")]
    BadIndex { i: usize, j: usize, n: usize },

    #[error("edge {edge} is degenerate on coordinate {coordinate}: both endpoints project to {value}")]
    DegenerateEdge {
        edge: usize,
        coordinate: usize,
        value: f64,
    },

    #[error("objective undefined: projected values {m} and {m_prime} of coordinate {coordinate} coincide")]
    DomainViolation {
        coordinate: usize,
        m: usize,
        m_prime: usize,
    },

    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    #[error("solver did not converge within {0} iterations")]
    MaxIterations(usize),

    #[error("equality constraints are inconsistent (residual {residual:.3e})")]
    InconsistentConstraints { residual: f64 },

    #[error("construction would need {requested} {unit}, above the cap of {cap}")]
    SizeLimit {
        requested: u128,
        cap: u128,
        unit: &'static str,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("not a permutation of 1..={d}")]
    BadPermutation { d: usize },

    #[error("segment set has no edges")]
    EmptyEdgeSet,

    #[error("batch lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no tabulated Spearman rho minimum for dimension {0}")]
    UnsupportedDimension(usize),

    #[error("bad data: {0}")]
    BadData(String),

    #[error("design matrix is singular or badly conditioned")]
    SingularDesign,

    #[error("unknown construction kind `{0}`")]
    UnknownKind(String),

    #[error("invalid construction parameters: {0}")]
    BadConstruction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
