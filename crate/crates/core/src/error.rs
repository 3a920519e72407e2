use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SdrError>;

/// Every failure the toolkit can report.
///
/// [`SdrError::code`] gives the stable, machine-readable name used in the
/// `status` column of replicate CSVs and in CLI diagnostics.
#[derive(Debug, Error)]
pub enum SdrError {
    #[error("insufficient rows: need {needed}, got {got}")]
    InsufficientRows { needed: usize, got: usize },
    #[error("too few rows for {slices} slices: need at least {needed}, got {got}")]
    TooFewRows {
        slices: usize,
        needed: usize,
        got: usize,
    },
    #[error("matrix is ill-conditioned (reciprocal condition estimate {rcond:e})")]
    IllConditioned { rcond: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("columns are rank deficient at column {column}")]
    RankDeficient { column: usize },
    #[error("kernel spectrum is degenerate")]
    DegenerateSpectrum,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension {p} too small for model {model} (needs at least {needed})")]
    DimensionTooSmall {
        model: String,
        p: usize,
        needed: usize,
    },
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("invalid distribution: {0}")]
    InvalidSpec(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("invalid dimension k = {k} for p = {p}")]
    InvalidDimension { k: usize, p: usize },
    #[error("unknown identifier `{given}`; expected one of: {expected}")]
    UnknownId { given: String, expected: String },
    #[error("column `{0}` not found")]
    MissingColumn(String),
    #[error("parse error at row {row}, column `{column}`: {message}")]
    ParseError {
        row: usize,
        column: String,
        message: String,
    },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl SdrError {
    pub fn code(&self) -> &'static str {
        match self {
            SdrError::InsufficientRows { .. } => "InsufficientRows",
            SdrError::TooFewRows { .. } => "TooFewRows",
            SdrError::IllConditioned { .. } => "IllConditioned",
            SdrError::NotPositiveDefinite => "NotPositiveDefinite",
            SdrError::NotSymmetric { .. } => "NotSymmetric",
            SdrError::RankDeficient { .. } => "RankDeficient",
            SdrError::DegenerateSpectrum => "DegenerateSpectrum",
            SdrError::ShapeMismatch(_) => "ShapeMismatch",
            SdrError::LengthMismatch { .. } => "LengthMismatch",
            SdrError::DimensionTooSmall { .. } => "DimensionTooSmall",
            SdrError::NonFinite { .. } => "NonFinite",
            SdrError::InvalidSpec(_) => "InvalidSpec",
            SdrError::ConfigInvalid(_) => "ConfigInvalid",
            SdrError::InvalidDimension { .. } => "InvalidDimension",
            SdrError::UnknownId { .. } => "UnknownId",
            SdrError::MissingColumn(_) => "MissingColumn",
            SdrError::ParseError { .. } => "ParseError",
            SdrError::EmptyDataset => "EmptyDataset",
            SdrError::DuplicateColumn(_) => "DuplicateColumn",
            SdrError::ZeroVariance(_) => "ZeroVariance",
            SdrError::Io { .. } => "IoError",
            SdrError::Csv(_) => "IoError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SdrError::Io {
            path: path.into(),
            source,
        }
    }
}
