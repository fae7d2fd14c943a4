//! Privacy-preserving multi-domain DDoS detection lab.
//!
//! The pipeline has three stages: federated training of dense GANomaly
//! anomaly detectors over per-silo NetFlow data, synthetic benign-flow
//! generation from the trained generator, and distillation of that
//! synthetic data into shareable heterogeneous external models.
//!
//! Modules map one-to-one onto the pipeline:
//!
//! - [`flowdata`] — CSV ingestion, flag expansion, bias-column removal,
//!   cleaning, 80/18/2 benign splits, per-silo min-max scaling.
//! - [`netcore`] — minimal dense-network engine (forward, explicit
//!   backprop, SGD/Adam, Xavier init, binary weight container).
//! - [`ganomaly`] — encoder–decoder–encoder generator plus discriminator,
//!   composite loss, anomaly scoring, synthetic generation, audits.
//! - [`federation`] — FedAvg orchestration, in-process simulation and a
//!   length-prefixed TCP wire mode.
//! - [`evalkit`] — ROC-AUC, F1, benign-quantile thresholds, and the
//!   cross-evaluation matrix harness.
//! - [`extmodels`] — isolation-forest and MLP externals pretrained on
//!   synthetic flows and fine-tuned on local labeled data.
//! - [`toybench`] — the versioned multi-silo Gaussian toy benchmark used
//!   by the test suites and the `maketoy` command.

pub mod evalkit;
pub mod extmodels;
pub mod federation;
pub mod fingerprint;
pub mod flowdata;
pub mod ganomaly;
pub mod netcore;
pub mod toybench;

pub use evalkit::{CrossEvalMatrix, Detector, EvalReport, ThresholdReport};
pub use flowdata::{FlowSchema, FlowTable, Label, ScalerParams, SplitSet};
pub use ganomaly::{AnomalyScore, GanomalyArch, GanomalyModel, LossWeights};
pub use netcore::{Activation, DenseNet, ModelWeights, NetArch, Optimizer, Tensor};
