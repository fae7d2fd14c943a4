//! Minimal dense-network engine: forward pass, explicit backpropagation,
//! SGD/Adam, Xavier initialization, and a binary weight container.
//!
//! Everything is 64-bit and deterministic for a fixed seed; there is no
//! autodiff graph, just the handful of matrix products backprop needs.

mod activation;
mod matrix;
mod net;
mod optimizer;
mod weights;

pub mod loss;

pub use activation::Activation;
pub use matrix::Matrix;
pub use net::{DenseNet, ForwardCache, Gradients, LayerGrad, NetArch};
pub use optimizer::{Optimizer, OptimizerKind};
pub use weights::{ModelWeights, Tensor};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("invalid architecture: {0}")]
    InvalidArch(String),
    #[error("non-finite gradient in {tensor}")]
    NonFiniteGrad { tensor: String },
    #[error("weights shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("malformed weights container: {0}")]
    BadContainer(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
