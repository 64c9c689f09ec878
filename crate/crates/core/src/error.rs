use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("two sides tie for the longest side")]
    AmbiguousLongestSide,
    #[error("the three points are collinear")]
    CollinearInput,
    #[error("input of {len} points exceeds the brute-force cap of {cap}")]
    InputTooLarge { len: usize, cap: usize },
    #[error("invalid frame: {0}")]
    InvalidFrame(&'static str),
    #[error("empty spectrum")]
    EmptySpectrum,
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
    #[error("configuration must hold at least 3 robots, got {0}")]
    TooFewRobots(usize),
    #[error("action covers {action} robots but the configuration has {conf}")]
    SizeMismatch { action: usize, conf: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
