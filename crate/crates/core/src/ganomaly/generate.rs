//! Synthetic benign-flow generation. The generator is
//! autoencoder-shaped, so latent codes are sampled from a diagonal
//! Gaussian fitted to the encoded training set and pushed through the
//! decoder, then inverse-scaled back to raw feature space.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{GanomalyError, GanomalyModel};
use crate::flowdata::{invert_scaler, FlowTable, Label, Provenance, ScalerParams};
use crate::netcore::Matrix;

/// Diagonal Gaussian over the latent space, fitted on `GE(train)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentPrior {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Fits the latent prior on a scaled benign training table and stores
/// it on the model.
pub fn fit_latent_prior(
    model: &mut GanomalyModel,
    train_scaled: &FlowTable,
) -> Result<LatentPrior, GanomalyError> {
    if train_scaled.num_rows() < 2 {
        return Err(GanomalyError::DegenerateLatent(
            "need at least 2 rows to fit the latent prior".into(),
        ));
    }
    let z = model.ge.forward(train_scaled.features())?;
    let n = z.rows() as f64;
    let dim = z.cols();
    let mut mean = vec![0.0; dim];
    for r in 0..z.rows() {
        for (m, v) in mean.iter_mut().zip(z.row(r)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = vec![0.0; dim];
    for r in 0..z.rows() {
        for ((s, v), m) in var.iter_mut().zip(z.row(r)).zip(&mean) {
            let d = v - m;
            *s += d * d;
        }
    }
    let std: Vec<f64> = var.iter().map(|s| (s / (n - 1.0)).sqrt()).collect();
    if mean.iter().chain(&std).any(|v| !v.is_finite()) {
        return Err(GanomalyError::DegenerateLatent(
            "non-finite latent statistics".into(),
        ));
    }
    let prior = LatentPrior { mean, std };
    model.latent_prior = Some(prior.clone());
    Ok(prior)
}

/// Samples `n` latent codes from the fitted prior, decodes them, and
/// inverse-scales into raw feature space. Rows are labeled benign and
/// provenance marks the synthetic origin.
pub fn generate_synthetic(
    model: &GanomalyModel,
    n: usize,
    rng: &mut ChaCha8Rng,
    scaler: &ScalerParams,
) -> Result<FlowTable, GanomalyError> {
    if n == 0 {
        return Err(GanomalyError::EmptyGeneration);
    }
    let prior = model
        .latent_prior
        .as_ref()
        .ok_or_else(|| GanomalyError::Untrained("latent prior not fitted".into()))?;
    if prior.std.iter().all(|&s| s == 0.0) {
        return Err(GanomalyError::DegenerateLatent(
            "latent prior has zero variance in every dimension".into(),
        ));
    }
    if scaler.columns.len() != model.arch.input_dim {
        return Err(GanomalyError::DimMismatch(format!(
            "scaler covers {} columns, decoder emits {}",
            scaler.columns.len(),
            model.arch.input_dim
        )));
    }

    let dim = prior.mean.len();
    let mut z = Matrix::zeros(n, dim);
    for r in 0..n {
        let row = z.row_mut(r);
        for (j, slot) in row.iter_mut().enumerate() {
            let u: f64 = rng.sample(StandardNormal);
            *slot = prior.mean[j] + prior.std[j] * u;
        }
    }
    let decoded = model.gd.forward(&z)?;

    let mut provenance = Provenance::new("synthetic");
    provenance.steps.push("generate_synthetic".into());
    provenance.bump("synthetic_rows", n as u64);
    let scaled = FlowTable::new(
        scaler.columns.clone(),
        decoded,
        vec![Label::Benign; n],
        provenance,
    )?;
    Ok(invert_scaler(&scaled, scaler)?)
}
