//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by snapshot ingestion, fitting, and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest parse error in {path}: {detail}")]
    Manifest { path: String, detail: String },

    #[error("data format error in {path}: {detail}")]
    DataFormat { path: String, detail: String },

    #[error("record {record}: {detail}")]
    Record { record: usize, detail: String },

    #[error("non-finite value in record {record} at state {row}, step {col}")]
    NonFinite {
        record: usize,
        row: usize,
        col: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rank {requested} out of range (feasible 1..={feasible})")]
    RankOutOfRange { requested: usize, feasible: usize },

    #[error(
        "requested rank {rank} too high: singular value {index} is below \
         1e-12 of the largest"
    )]
    RankTooHigh { rank: usize, index: usize },

    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("simulation unstable: state norm exceeded {limit:.3e} at step {step}")]
    Unstable { step: usize, limit: f64 },

    #[error("no feasible design point: {detail}")]
    Infeasible { detail: String },
}

impl Error {
    /// True for errors arising from numerics rather than bad inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::RankTooHigh { .. }
                | Error::Lapack { .. }
                | Error::Numeric(_)
                | Error::Unstable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
