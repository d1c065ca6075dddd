use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rank must be at least 2, got {0}")]
    InvalidRank(usize),

    #[error("letter {letter} is not valid for an alphabet of rank {rank}")]
    InvalidLetter { letter: i64, rank: usize },

    #[error("cannot parse word {text:?}: {reason}")]
    Parse { text: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} needs {requested} items, over the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: String,
        cap: u64,
    },

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("graph is not connected")]
    Disconnected,
}
