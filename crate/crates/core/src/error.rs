use thiserror::Error;

/// Errors raised by graphon construction, sampling, metric and counting routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("block mass at index {index} must be positive and finite, got {mass}")]
    NonPositiveMass { index: usize, mass: f64 },

    #[error("values matrix must be {expected}x{expected}, row {row} has {found} entries")]
    ShapeMismatch {
        expected: usize,
        row: usize,
        found: usize,
    },

    #[error("values matrix is not symmetric at ({row}, {col}): {a} != {b}")]
    Asymmetric { row: usize, col: usize, a: f64, b: f64 },

    #[error("value at ({row}, {col}) is {value}, outside the allowed range [{lo}, {hi}]")]
    ValueOutOfRange {
        row: usize,
        col: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid graphon: {0}")]
    InvalidGraphon(String),

    #[error("operation not supported for the {family} family: {reason}")]
    UnsupportedFamily { family: &'static str, reason: String },

    #[error("exact {what} limited to {limit} blocks, got {blocks} (about {cost:.3e} primitive operations)")]
    ExactLimit {
        what: &'static str,
        blocks: usize,
        limit: usize,
        cost: f64,
    },

    #[error("total masses differ: {left} vs {right}")]
    MassMismatch { left: f64, right: f64 },

    #[error("partition cell {cell} has zero mass")]
    ZeroMassCell { cell: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("mass quantum {quantum} exceeds the smallest block mass {smallest}")]
    QuantumTooLarge { quantum: f64, smallest: f64 },

    #[error("grid of {cells} cells exceeds the limit of {limit}")]
    GridTooFine { cells: usize, limit: usize },

    #[error("sampling region has infinite mass and isolated vertices were requested")]
    InfiniteRegion,

    #[error("time {time} is outside the sampled horizon [0, {horizon}]")]
    TimeOutOfRange { time: f64, horizon: f64 },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("motif has {vertices} vertices, limit is {limit} (about {cost:.3e} maps)")]
    MotifTooLarge {
        vertices: usize,
        limit: usize,
        cost: f64,
    },

    #[error("invalid motif: {0}")]
    InvalidMotif(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
