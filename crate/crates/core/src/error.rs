use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    #[error("year {0} is not present in the dataset")]
    MissingYear(u16),

    #[error("unsupported year {0}: only 1957-2017 are covered")]
    UnsupportedYear(i64),

    #[error("malformed {context}: {message}")]
    Malformed { context: String, message: String },

    #[error("{year}: missing cell for {giver} -> {receiver}")]
    MissingCell {
        year: u16,
        giver: String,
        receiver: String,
    },

    #[error("{year}: {country} awards points to itself")]
    SelfVote { year: u16, country: String },

    #[error("{year}: score {score} from {giver} to {receiver} is not attainable under that year's scheme")]
    UnattainableScore {
        year: u16,
        giver: String,
        receiver: String,
        score: u32,
    },

    #[error("{year}: the ballot cast by {giver} cannot be produced by that year's scheme")]
    UnattainableBallot { year: u16, giver: String },

    #[error("{year}: giver and receiver sets differ, but they must coincide before 2004")]
    ParticipantMismatch { year: u16 },

    #[error("{year}: at least two receivers are required, found {found}")]
    TooFewReceivers { year: u16, found: usize },

    #[error("unknown country {name:?} in {context}")]
    UnknownCountry { name: String, context: String },

    #[error("invalid region entry: {0}")]
    InvalidRegion(String),

    #[error("invalid voting scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid candidate count {0}: must be at least 1")]
    InvalidCandidateCount(i64),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid alpha {0}: must lie strictly between 0 and 1")]
    InvalidAlpha(f64),

    #[error("invalid sample size {0}")]
    InvalidSampleSize(usize),

    #[error("invalid window {start}-{end}")]
    InvalidWindow { start: i64, end: i64 },

    #[error("{giver} -> {receiver} is not eligible in {year}")]
    IneligiblePair {
        giver: String,
        receiver: String,
        year: u16,
    },

    #[error("invalid aggregation spec: {0}")]
    InvalidSpec(String),

    #[error("reciprocity ratio needs networks aggregated with one-way edges")]
    WrongMode,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Malformed {
            context: context.into(),
            message: message.into(),
        }
    }
}
