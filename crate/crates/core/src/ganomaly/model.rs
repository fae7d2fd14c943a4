use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GanomalyArch, GanomalyError, LatentPrior};
use crate::flowdata::ScalerParams;
use crate::netcore::{DenseNet, ModelWeights};

/// Weights of the three generator loss components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub adv: f64,
    pub con: f64,
    pub enc: f64,
}

impl Default for LossWeights {
    /// Dominant contextual weight, the usual GANomaly convention.
    fn default() -> Self {
        Self {
            adv: 1.0,
            con: 50.0,
            enc: 1.0,
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<(), GanomalyError> {
        let ws = [self.adv, self.con, self.enc];
        if ws.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(GanomalyError::InvalidArch(
                "loss weights must be non-negative".into(),
            ));
        }
        if ws.iter().all(|w| *w == 0.0) {
            return Err(GanomalyError::InvalidArch(
                "at least one loss weight must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Min/max anomaly-score normalization state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreNorm {
    pub min: f64,
    pub max: f64,
}

/// The four networks plus loss configuration and scoring state.
#[derive(Debug, Clone)]
pub struct GanomalyModel {
    pub arch: GanomalyArch,
    /// Generator encoder.
    pub ge: DenseNet,
    /// Generator decoder.
    pub gd: DenseNet,
    /// Second encoder, re-encoding reconstructions.
    pub e: DenseNet,
    /// Discriminator.
    pub d: DenseNet,
    pub loss_weights: LossWeights,
    pub score_norm: Option<ScoreNorm>,
    pub latent_prior: Option<LatentPrior>,
    pub trained_epochs: u32,
}

impl GanomalyModel {
    /// Xavier-initialized model; the four nets draw from seeds derived
    /// from the given root so they start decorrelated.
    pub fn init(arch: GanomalyArch, seed: u64) -> Result<Self, GanomalyError> {
        arch.validate()?;
        let ge = DenseNet::init(&arch.encoder_arch(), seed.wrapping_add(1))?;
        let gd = DenseNet::init(&arch.decoder_arch(), seed.wrapping_add(2))?;
        let e = DenseNet::init(&arch.encoder_arch(), seed.wrapping_add(3))?;
        let d = DenseNet::init(&arch.disc_arch(), seed.wrapping_add(4))?;
        Ok(Self {
            arch,
            ge,
            gd,
            e,
            d,
            loss_weights: LossWeights::default(),
            score_norm: None,
            latent_prior: None,
            trained_epochs: 0,
        })
    }

    /// Flat weights of all four nets, in GE, GD, E, D order. This is the
    /// only object a federation client sends.
    pub fn to_weights(&self) -> ModelWeights {
        ModelWeights::concat(&[
            ModelWeights::from_net(&self.ge),
            ModelWeights::from_net(&self.gd),
            ModelWeights::from_net(&self.e),
            ModelWeights::from_net(&self.d),
        ])
    }

    /// Replaces all four nets from a flat weight list, shape-checked.
    pub fn load_weights(&mut self, weights: &ModelWeights) -> Result<(), GanomalyError> {
        let counts = [
            self.ge.num_layers() * 2,
            self.gd.num_layers() * 2,
            self.e.num_layers() * 2,
            self.d.num_layers() * 2,
        ];
        let parts = weights.split(&counts)?;
        self.ge = parts[0].to_net(&self.arch.encoder_arch())?;
        self.gd = parts[1].to_net(&self.arch.decoder_arch())?;
        self.e = parts[2].to_net(&self.arch.encoder_arch())?;
        self.d = parts[3].to_net(&self.arch.disc_arch())?;
        Ok(())
    }

    pub fn weights_fingerprint(&self) -> String {
        self.to_weights().fingerprint()
    }
}

/// Everything a silo persists about its trained detector, except the
/// weights themselves (those live in sibling binary files).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleManifest {
    pub arch: GanomalyArch,
    pub loss_weights: LossWeights,
    pub score_norm: Option<ScoreNorm>,
    pub latent_prior: Option<LatentPrior>,
    pub trained_epochs: u32,
    pub scaler: ScalerParams,
    /// Benign-quantile threshold, present once calibrated.
    pub threshold: Option<f64>,
    pub threshold_q: Option<f64>,
    pub weights_fingerprint: String,
}

const NET_FILES: [&str; 4] = ["ge.weights", "gd.weights", "e.weights", "d.weights"];

/// Writes a model bundle directory: four weight files plus a JSON
/// manifest carrying arch, loss weights, scoring state, and the silo's
/// local scaler.
pub fn save_bundle(
    dir: &Path,
    model: &GanomalyModel,
    scaler: &ScalerParams,
    threshold: Option<(f64, f64)>,
) -> Result<(), GanomalyError> {
    std::fs::create_dir_all(dir).map_err(crate::netcore::NetError::from)?;
    let nets = [&model.ge, &model.gd, &model.e, &model.d];
    for (net, file) in nets.iter().zip(NET_FILES) {
        ModelWeights::from_net(net).write_file(&dir.join(file))?;
    }
    let manifest = BundleManifest {
        arch: model.arch.clone(),
        loss_weights: model.loss_weights,
        score_norm: model.score_norm,
        latent_prior: model.latent_prior.clone(),
        trained_epochs: model.trained_epochs,
        scaler: scaler.clone(),
        threshold: threshold.map(|(_, t)| t),
        threshold_q: threshold.map(|(q, _)| q),
        weights_fingerprint: model.weights_fingerprint(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(dir.join("manifest.json"), json).map_err(crate::netcore::NetError::from)?;
    Ok(())
}

/// Loads a bundle directory written by [`save_bundle`].
pub fn load_bundle(dir: &Path) -> Result<(GanomalyModel, BundleManifest), GanomalyError> {
    let manifest_bytes =
        std::fs::read(dir.join("manifest.json")).map_err(crate::netcore::NetError::from)?;
    let manifest: BundleManifest = serde_json::from_slice(&manifest_bytes)
        .map_err(|e| GanomalyError::InvalidArch(format!("bad bundle manifest: {e}")))?;
    let mut model = GanomalyModel::init(manifest.arch.clone(), 0)?;
    let archs = [
        manifest.arch.encoder_arch(),
        manifest.arch.decoder_arch(),
        manifest.arch.encoder_arch(),
        manifest.arch.disc_arch(),
    ];
    let mut nets = Vec::with_capacity(4);
    for (file, arch) in NET_FILES.iter().zip(&archs) {
        let w = ModelWeights::read_file(&dir.join(file))?;
        nets.push(w.to_net(arch)?);
    }
    model.d = nets.pop().unwrap();
    model.e = nets.pop().unwrap();
    model.gd = nets.pop().unwrap();
    model.ge = nets.pop().unwrap();
    model.loss_weights = manifest.loss_weights;
    model.score_norm = manifest.score_norm;
    model.latent_prior = manifest.latent_prior.clone();
    model.trained_epochs = manifest.trained_epochs;
    if model.weights_fingerprint() != manifest.weights_fingerprint {
        return Err(GanomalyError::InvalidArch(
            "bundle weight files do not match manifest fingerprint".into(),
        ));
    }
    Ok((model, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn toy_model() -> GanomalyModel {
        GanomalyModel::init(GanomalyArch::with_hidden(6, 3, vec![8, 5]), 11).unwrap()
    }

    #[test]
    fn weights_round_trip_through_flat_list() {
        let model = toy_model();
        let w = model.to_weights();
        let mut other = GanomalyModel::init(model.arch.clone(), 999).unwrap();
        assert_ne!(other.weights_fingerprint(), model.weights_fingerprint());
        other.load_weights(&w).unwrap();
        assert_eq!(other.weights_fingerprint(), model.weights_fingerprint());
    }

    #[test]
    fn wrong_shape_weight_list_rejected() {
        let model = toy_model();
        let mut big = GanomalyModel::init(GanomalyArch::with_hidden(6, 4, vec![8, 5]), 0).unwrap();
        assert!(big.load_weights(&model.to_weights()).is_err());
    }

    #[test]
    fn bundle_round_trip() {
        let dir = tempdir().unwrap();
        let model = toy_model();
        let scaler = ScalerParams {
            columns: (0..6).map(|i| format!("f{i}")).collect(),
            mins: vec![0.0; 6],
            maxs: vec![1.0; 6],
            fitted_on: "test".into(),
        };
        save_bundle(dir.path(), &model, &scaler, Some((0.95, 0.42))).unwrap();
        let (loaded, manifest) = load_bundle(dir.path()).unwrap();
        assert_eq!(loaded.weights_fingerprint(), model.weights_fingerprint());
        assert_eq!(manifest.threshold, Some(0.42));
        assert_eq!(manifest.threshold_q, Some(0.95));
        assert_eq!(manifest.scaler, scaler);
    }

    #[test]
    fn all_zero_loss_weights_invalid() {
        let lw = LossWeights {
            adv: 0.0,
            con: 0.0,
            enc: 0.0,
        };
        assert!(lw.validate().is_err());
        assert!(LossWeights::default().validate().is_ok());
    }
}
