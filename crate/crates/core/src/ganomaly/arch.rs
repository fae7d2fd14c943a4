use serde::{Deserialize, Serialize};

use super::GanomalyError;
use crate::fingerprint::sha256_hex;
use crate::netcore::{Activation, NetArch};

/// Shapes of the four networks.
///
/// The generator is encoder (GE) → decoder (GD) → second encoder (E),
/// with E mirroring GE exactly; the discriminator (D) ends in one
/// sigmoid unit. Defaults follow the 1024:512:256 encoder and
/// 256:512:1024 decoder stacks; smaller hidden stacks are configurable
/// for desk-scale data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanomalyArch {
    pub input_dim: usize,
    pub latent_dim: usize,
    pub encoder_hidden: Vec<usize>,
    pub decoder_hidden: Vec<usize>,
    pub disc_hidden: Vec<usize>,
}

impl GanomalyArch {
    /// Full-scale stack: encoder 1024:512:256, decoder 256:512:1024,
    /// discriminator 1024:512:256 with a sigmoid output.
    pub fn full_scale(input_dim: usize, latent_dim: usize) -> Self {
        Self {
            input_dim,
            latent_dim,
            encoder_hidden: vec![1024, 512, 256],
            decoder_hidden: vec![256, 512, 1024],
            disc_hidden: vec![1024, 512, 256],
        }
    }

    /// Symmetric stack with custom hidden widths (encoder order).
    pub fn with_hidden(input_dim: usize, latent_dim: usize, encoder_hidden: Vec<usize>) -> Self {
        let decoder_hidden: Vec<usize> = encoder_hidden.iter().rev().copied().collect();
        Self {
            input_dim,
            latent_dim,
            encoder_hidden: encoder_hidden.clone(),
            decoder_hidden,
            disc_hidden: encoder_hidden,
        }
    }

    pub fn validate(&self) -> Result<(), GanomalyError> {
        if self.input_dim == 0 || self.latent_dim == 0 {
            return Err(GanomalyError::InvalidArch(
                "input and latent dimensions must be positive".into(),
            ));
        }
        if self.encoder_hidden.iter().any(|&u| u == 0)
            || self.decoder_hidden.iter().any(|&u| u == 0)
            || self.disc_hidden.iter().any(|&u| u == 0)
        {
            return Err(GanomalyError::InvalidArch("zero-width hidden layer".into()));
        }
        if self.disc_hidden.is_empty() {
            return Err(GanomalyError::InvalidArch(
                "discriminator needs at least one hidden layer for feature matching".into(),
            ));
        }
        Ok(())
    }

    /// Encoder: leaky-relu hidden layers, linear latent output.
    pub fn encoder_arch(&self) -> NetArch {
        let mut layers: Vec<(usize, Activation)> = self
            .encoder_hidden
            .iter()
            .map(|&u| (u, Activation::LeakyRelu(0.2)))
            .collect();
        layers.push((self.latent_dim, Activation::Linear));
        NetArch::new(self.input_dim, layers)
    }

    /// Decoder: relu hidden layers, sigmoid output (features live in [0,1]).
    pub fn decoder_arch(&self) -> NetArch {
        let mut layers: Vec<(usize, Activation)> = self
            .decoder_hidden
            .iter()
            .map(|&u| (u, Activation::Relu))
            .collect();
        layers.push((self.input_dim, Activation::Sigmoid));
        NetArch::new(self.latent_dim, layers)
    }

    /// Discriminator: leaky-relu hidden layers, one sigmoid unit.
    pub fn disc_arch(&self) -> NetArch {
        let mut layers: Vec<(usize, Activation)> = self
            .disc_hidden
            .iter()
            .map(|&u| (u, Activation::LeakyRelu(0.2)))
            .collect();
        layers.push((1, Activation::Sigmoid));
        NetArch::new(self.input_dim, layers)
    }

    /// Index of the discriminator layer used for feature matching: the
    /// last hidden layer before the sigmoid unit.
    pub fn disc_feature_layer(&self) -> usize {
        self.disc_hidden.len() - 1
    }

    /// SHA-256 of the canonical JSON form; used in federation handshakes.
    pub fn fingerprint(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("arch serializes").as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_scale_shapes() {
        let arch = GanomalyArch::full_scale(39, 32);
        let ge = arch.encoder_arch();
        assert_eq!(ge.input_dim, 39);
        assert_eq!(
            ge.layers.iter().map(|l| l.0).collect::<Vec<_>>(),
            vec![1024, 512, 256, 32]
        );
        let gd = arch.decoder_arch();
        assert_eq!(gd.input_dim, 32);
        assert_eq!(
            gd.layers.iter().map(|l| l.0).collect::<Vec<_>>(),
            vec![256, 512, 1024, 39]
        );
        assert_eq!(gd.layers.last().unwrap().1, Activation::Sigmoid);
        let d = arch.disc_arch();
        assert_eq!(d.output_dim(), 1);
        assert_eq!(d.layers.last().unwrap().1, Activation::Sigmoid);
        assert_eq!(arch.disc_feature_layer(), 2);
    }

    #[test]
    fn fingerprint_distinguishes_architectures() {
        let a = GanomalyArch::with_hidden(8, 4, vec![32, 16]);
        let b = GanomalyArch::with_hidden(8, 4, vec![32, 17]);
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
    }

    #[test]
    fn invalid_dims_rejected() {
        assert!(GanomalyArch::with_hidden(0, 4, vec![8]).validate().is_err());
        assert!(GanomalyArch::with_hidden(8, 0, vec![8]).validate().is_err());
        let mut arch = GanomalyArch::with_hidden(8, 4, vec![8]);
        arch.disc_hidden.clear();
        assert!(arch.validate().is_err());
    }
}
