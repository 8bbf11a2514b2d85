use thiserror::Error;

use crate::lattice::Hex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh too coarse: {0}")]
    MeshTooCoarse(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid marks: {0}")]
    InvalidMarks(String),
    #[error("x and y must be distinct e-vertices")]
    SameVertex,
    #[error("not an e-vertex: {0}")]
    NotEVertex(String),
    #[error("disc marks coincide")]
    DegenerateMarks,
    #[error("conformal map did not converge: {0}")]
    MapNotConverged(String),
    #[error("exploration exceeded its step budget of {0} edges")]
    StepBudgetExceeded(usize),
    #[error("site {0:?} has no color")]
    IncompleteColoring(Hex),
    #[error("exploration reached its target before the arc")]
    TargetUnreachable,
    #[error("slit map evaluated at its tip")]
    NumericOverflow,
    #[error("trace resolution too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("empty set")]
    EmptySet,
    #[error("empty samples")]
    EmptySamples,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
