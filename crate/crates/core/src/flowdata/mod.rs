//! NetFlow CSV ingestion and the preprocessing pipeline: protocol-flag
//! expansion, bias-column removal, null/outlier cleaning, 80/18/2 benign
//! splits, and per-silo min-max rescaling.
//!
//! All operations are pure functions of their inputs; tables are
//! immutable after construction.

mod csvio;
mod preprocess;
mod scaler;
mod schema;
mod split;
mod table;

pub use csvio::{load_csv, read_processed_csv, write_processed_csv};
pub use preprocess::{clean, drop_bias_features, expand_flags, DEFAULT_OUTLIER_K};
pub use scaler::{apply_scaler, fit_scaler, invert_scaler, ScalerParams};
pub use schema::FlowSchema;
pub use split::{split, SplitSet, MIN_BENIGN_ROWS};
pub use table::{FlowTable, Label, Provenance};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("missing file {path}: {source}")]
    MissingFile {
        path: String,
        source: std::io::Error,
    },
    #[error("header mismatch: missing columns {missing:?}, unexpected columns {extra:?}")]
    HeaderMismatch {
        missing: Vec<String>,
        extra: Vec<String>,
    },
    #[error("no parseable rows in {0}")]
    NoRows(String),
    #[error("column {0} not present in table")]
    MissingColumn(String),
    #[error("cleaning removed every row")]
    AllRowsRemoved,
    #[error("need at least {need} benign rows, found {found}")]
    TooFewBenign { need: usize, found: usize },
    #[error("scaler fitted on columns {expected:?} cannot apply to {found:?}")]
    ScalerColumnMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("table construction: {0}")]
    Construction(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
