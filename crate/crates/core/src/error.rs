use thiserror::Error;

use crate::instance::Player;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{player} reward at ({leader}, {follower}) is {value}, outside [0, 1]")]
    ValueOutOfRange {
        player: Player,
        leader: String,
        follower: String,
        value: f64,
    },

    #[error("unknown action: {0}")]
    UnknownAction(String),

    #[error("unknown instance family: {0}")]
    UnknownFamily(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("policy incompatible with information structure: {0}")]
    IncompatibleInfoStructure(String),

    #[error("phase schedule exhausted after {phases} phases (round {round})")]
    ScheduleExhausted { phases: usize, round: u64 },

    #[error("arm {0} has no samples at commit time")]
    EmptyHistoryArm(usize),

    #[error("need at least 3 positive regret points to fit an exponent, got {0}")]
    NotEnoughPoints(usize),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed document {origin}: {source}")]
    Parse {
        origin: String,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Stamps a schedule error with the game round it surfaced in.
    pub(crate) fn at_round(self, round: u64) -> Self {
        match self {
            Error::ScheduleExhausted { phases, .. } => Error::ScheduleExhausted { phases, round },
            other => other,
        }
    }
}
