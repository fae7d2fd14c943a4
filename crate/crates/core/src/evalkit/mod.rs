//! Metrics (ROC-AUC, F1), benign-quantile threshold selection, and the
//! cross-evaluation matrix harness.

mod crosseval;
mod evaluate;
mod metrics;
mod threshold;

pub use crosseval::{cross_evaluate, render_matrix_text, CrossEvalMatrix, FL_MODEL_ID};
pub use evaluate::{calibrate, evaluate, Detector, EvalReport};
pub use metrics::{f1_from_counts, f1_score, roc_auc};
pub use threshold::{interpolated_quantile, select_threshold, ThresholdReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {0} scores vs {1} labels")]
    LengthMismatch(usize, usize),
    #[error("metric undefined: {0}")]
    UndefinedMetric(String),
    #[error("empty validation set")]
    EmptyValidation,
    #[error("quantile must lie in (0,1), got {0}")]
    BadQuantile(f64),
    #[error("no detector available for dataset {0}")]
    MissingDetector(String),
    #[error("schema mismatch for {id}: {detail}")]
    SchemaMismatch { id: String, detail: String },
    #[error(transparent)]
    Ganomaly(#[from] crate::ganomaly::GanomalyError),
    #[error(transparent)]
    Flow(#[from] crate::flowdata::FlowError),
}
