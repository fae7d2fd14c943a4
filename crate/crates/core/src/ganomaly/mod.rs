//! Dense GANomaly anomaly detector: generator encoder–decoder–encoder
//! plus discriminator, composite adversarial/contextual/latent loss,
//! anomaly scoring in `[0,1]`, and synthetic benign-flow generation.

mod arch;
mod audit;
mod generate;
mod model;
mod score;
mod train;

pub use arch::GanomalyArch;
pub use audit::{audit_filter, audit_synthetic, AuditReport, RangeRule};
pub use generate::{fit_latent_prior, generate_synthetic, LatentPrior};
pub use model::{GanomalyModel, LossWeights, ScoreNorm};
pub use score::AnomalyScore;
pub use train::{EpochLosses, GanomalyTrainer, TrainConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GanomalyError {
    #[error("invalid architecture: {0}")]
    InvalidArch(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("training table must be benign-only ({0} ddos rows present)")]
    NotBenignOnly(usize),
    #[error("non-finite {component} loss at batch {batch}")]
    NonFiniteLoss { component: &'static str, batch: usize },
    #[error("score normalization needs at least 2 scores, got {0}")]
    TooFewScores(usize),
    #[error("model is untrained: {0}")]
    Untrained(String),
    #[error("degenerate latent statistics: {0}")]
    DegenerateLatent(String),
    #[error("generation count must be at least 1")]
    EmptyGeneration,
    #[error(transparent)]
    Net(#[from] crate::netcore::NetError),
    #[error(transparent)]
    Flow(#[from] crate::flowdata::FlowError),
}
