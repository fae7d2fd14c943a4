//! Adversarial training: a generator step minimizing the weighted
//! feature-matching + reconstruction + latent-consistency loss, then a
//! discriminator step on (real, reconstructed) pairs.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GanomalyError, GanomalyModel};
use crate::flowdata::FlowTable;
use crate::netcore::{loss, Gradients, Matrix, Optimizer};

/// Optimization knobs; the architecture lives on the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Adam β1; 0.5 is the usual adversarial setting.
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 256,
            learning_rate: 1e-4,
            beta1: 0.5,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Mean per-component losses over one epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct EpochLosses {
    pub adv: f64,
    pub con: f64,
    pub enc: f64,
    pub disc: f64,
}

impl EpochLosses {
    pub fn generator_total(&self, w: &super::LossWeights) -> f64 {
        w.adv * self.adv + w.con * self.con + w.enc * self.enc
    }
}

/// One generator forward/backward evaluation (no update applied).
pub struct GeneratorPass {
    pub adv: f64,
    pub con: f64,
    pub enc: f64,
    pub ge_grads: Gradients,
    pub gd_grads: Gradients,
    pub e_grads: Gradients,
    pub xhat: Matrix,
}

/// One discriminator forward/backward evaluation (no update applied).
pub struct DiscriminatorPass {
    pub loss: f64,
    pub d_grads: Gradients,
}

/// Computes the composite generator loss and its gradients w.r.t. GE,
/// GD and E parameters.
///
/// With x̂ = GD(GE(x)), the loss is
/// `w_adv·‖f_D(x) − f_D(x̂)‖² + w_con·‖x − x̂‖₁ + w_enc·‖GE(x) − E(x̂)‖²`
/// where `f_D` is the discriminator's last hidden layer and every norm
/// is a mean over elements. The discriminator is frozen here; gradients
/// flow through it into x̂.
pub fn generator_pass(model: &GanomalyModel, x: &Matrix) -> Result<GeneratorPass, GanomalyError> {
    let w = model.loss_weights;
    let feature_layer = model.arch.disc_feature_layer();

    let (z1, ge_cache) = model.ge.forward_cached(x)?;
    let (xhat, gd_cache) = model.gd.forward_cached(&z1)?;
    let (z2, e_cache) = model.e.forward_cached(&xhat)?;
    let (_, d_real_cache) = model.d.forward_cached(x)?;
    let (_, d_fake_cache) = model.d.forward_cached(&xhat)?;

    let f_real = d_real_cache.post_activation(feature_layer);
    let f_fake = d_fake_cache.post_activation(feature_layer);

    let (adv, g_feat) = loss::mse(f_fake, f_real);
    let (con, g_xhat_con) = loss::l1(&xhat, x);
    let (enc, g_z1_direct) = loss::mse(&z1, &z2);

    // Adversarial branch: through the discriminator prefix into x̂.
    let g_feat_w = g_feat.map(|v| v * w.adv);
    let (_, g_xhat_adv) = model.d.backward_from(&d_fake_cache, feature_layer, &g_feat_w)?;

    // Latent branch: d(enc)/dz2 = −d(enc)/dz1, through E into x̂.
    let g_z2 = g_z1_direct.map(|v| -v * w.enc);
    let (e_grads, g_xhat_enc) = model.e.backward(&e_cache, &g_z2)?;

    let mut g_xhat = g_xhat_adv;
    for ((g, &c), &e) in g_xhat
        .data_mut()
        .iter_mut()
        .zip(g_xhat_con.data())
        .zip(g_xhat_enc.data())
    {
        *g += w.con * c + e;
    }

    let (gd_grads, g_z1_chain) = model.gd.backward(&gd_cache, &g_xhat)?;
    let mut g_z1 = g_z1_chain;
    for (g, &d) in g_z1.data_mut().iter_mut().zip(g_z1_direct.data()) {
        *g += w.enc * d;
    }
    let (ge_grads, _) = model.ge.backward(&ge_cache, &g_z1)?;

    Ok(GeneratorPass {
        adv,
        con,
        enc,
        ge_grads,
        gd_grads,
        e_grads,
        xhat,
    })
}

/// Binary cross-entropy discriminator loss on (real → 1, fake → 0),
/// averaged over the two terms, with gradients w.r.t. D only.
pub fn discriminator_pass(
    model: &GanomalyModel,
    x: &Matrix,
    xhat: &Matrix,
) -> Result<DiscriminatorPass, GanomalyError> {
    let (p_real, real_cache) = model.d.forward_cached(x)?;
    let (p_fake, fake_cache) = model.d.forward_cached(xhat)?;
    let ones = Matrix::from_vec(p_real.rows(), 1, vec![1.0; p_real.rows()]);
    let zeros = Matrix::zeros(p_fake.rows(), 1);

    let (l_real, g_real) = loss::bce_with_logits_grad(&p_real, &ones);
    let (l_fake, g_fake) = loss::bce_with_logits_grad(&p_fake, &zeros);

    let half = |m: &Matrix| m.map(|v| 0.5 * v);
    let (mut d_grads, _) = model.d.backward_logits(&real_cache, &half(&g_real))?;
    let (fake_grads, _) = model.d.backward_logits(&fake_cache, &half(&g_fake))?;
    d_grads.add_assign(&fake_grads);

    Ok(DiscriminatorPass {
        loss: 0.5 * (l_real + l_fake),
        d_grads,
    })
}

/// Owns the model and its four Adam states for the duration of a
/// training run.
pub struct GanomalyTrainer {
    pub model: GanomalyModel,
    cfg: TrainConfig,
    opt_ge: Optimizer,
    opt_gd: Optimizer,
    opt_e: Optimizer,
    opt_d: Optimizer,
}

impl GanomalyTrainer {
    pub fn new(model: GanomalyModel, cfg: TrainConfig) -> Self {
        let adam = || Optimizer::adam(cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
        Self {
            model,
            cfg,
            opt_ge: adam(),
            opt_gd: adam(),
            opt_e: adam(),
            opt_d: adam(),
        }
    }

    pub fn config(&self) -> TrainConfig {
        self.cfg
    }

    pub fn into_model(self) -> GanomalyModel {
        self.model
    }

    /// One pass over the shuffled benign training table.
    ///
    /// The table must be scaled to `[0,1]` and contain no attack rows.
    /// Returns mean per-component losses; a non-finite loss aborts the
    /// epoch naming the component.
    pub fn train_epoch(
        &mut self,
        train: &FlowTable,
        rng: &mut ChaCha8Rng,
    ) -> Result<EpochLosses, GanomalyError> {
        let ddos = train.ddos_count();
        if ddos > 0 {
            return Err(GanomalyError::NotBenignOnly(ddos));
        }
        if train.num_cols() != self.model.arch.input_dim {
            return Err(GanomalyError::DimMismatch(format!(
                "table has {} features, model expects {}",
                train.num_cols(),
                self.model.arch.input_dim
            )));
        }
        if train.num_rows() == 0 {
            return Err(GanomalyError::DimMismatch("empty training table".into()));
        }

        let mut order: Vec<usize> = (0..train.num_rows()).collect();
        order.shuffle(rng);

        let mut sums = EpochLosses::default();
        let mut batches = 0usize;
        for (batch_idx, chunk) in order.chunks(self.cfg.batch_size.max(1)).enumerate() {
            let x = train.features().select_rows(chunk);

            let gen = generator_pass(&self.model, &x)?;
            for (name, value) in [("adversarial", gen.adv), ("contextual", gen.con), ("encoder", gen.enc)] {
                if !value.is_finite() {
                    return Err(GanomalyError::NonFiniteLoss {
                        component: match name {
                            "adversarial" => "adversarial",
                            "contextual" => "contextual",
                            _ => "encoder",
                        },
                        batch: batch_idx,
                    });
                }
            }
            self.opt_ge.step(&mut self.model.ge, &gen.ge_grads)?;
            self.opt_gd.step(&mut self.model.gd, &gen.gd_grads)?;
            self.opt_e.step(&mut self.model.e, &gen.e_grads)?;

            let disc = discriminator_pass(&self.model, &x, &gen.xhat)?;
            if !disc.loss.is_finite() {
                return Err(GanomalyError::NonFiniteLoss {
                    component: "discriminator",
                    batch: batch_idx,
                });
            }
            self.opt_d.step(&mut self.model.d, &disc.d_grads)?;

            sums.adv += gen.adv;
            sums.con += gen.con;
            sums.enc += gen.enc;
            sums.disc += disc.loss;
            batches += 1;
        }

        let n = batches.max(1) as f64;
        self.model.trained_epochs += 1;
        Ok(EpochLosses {
            adv: sums.adv / n,
            con: sums.con / n,
            enc: sums.enc / n,
            disc: sums.disc / n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowdata::{Label, Provenance};
    use crate::ganomaly::GanomalyArch;
    use crate::netcore::{Activation, DenseNet, NetArch};
    use rand::{Rng, SeedableRng};

    fn benign_table(rows: &[Vec<f64>]) -> FlowTable {
        FlowTable::new(
            (0..rows[0].len()).map(|i| format!("f{i}")).collect(),
            Matrix::from_rows(rows),
            vec![Label::Benign; rows.len()],
            Provenance::new("t"),
        )
        .unwrap()
    }

    /// GE = E = identity, GD = identity (square linear nets): the
    /// reconstruction is exact so contextual and encoder losses vanish.
    fn perfect_reconstructor(dim: usize) -> GanomalyModel {
        let mut arch = GanomalyArch::with_hidden(dim, dim, vec![dim]);
        arch.decoder_hidden = vec![dim];
        let mut model = GanomalyModel::init(arch, 0).unwrap();
        let ident = |layers: usize, dim: usize| {
            let arch = NetArch::new(dim, vec![(dim, Activation::Linear); layers]);
            let mut net = DenseNet::init(&arch, 0).unwrap();
            for l in 0..layers {
                let w = &mut net.layers[l].weight;
                for r in 0..dim {
                    for c in 0..dim {
                        w.set(r, c, if r == c { 1.0 } else { 0.0 });
                    }
                    net.layers[l].bias[r] = 0.0;
                }
            }
            net
        };
        model.ge = ident(2, dim);
        model.gd = ident(2, dim);
        model.e = ident(2, dim);
        model
    }

    #[test]
    fn perfect_reconstruction_zeroes_contextual_and_encoder_losses() {
        let model = perfect_reconstructor(3);
        let x = Matrix::from_rows(&[vec![0.2, 0.5, 0.9], vec![0.1, 0.4, 0.3]]);
        let pass = generator_pass(&model, &x).unwrap();
        assert_eq!(pass.con, 0.0);
        assert_eq!(pass.enc, 0.0);
        assert_eq!(pass.xhat.data(), x.data());
    }

    #[test]
    fn training_rejects_tables_with_attacks() {
        let mut table = benign_table(&[vec![0.1, 0.2], vec![0.3, 0.4]]);
        let labels = vec![Label::Benign, Label::Ddos];
        table = FlowTable::new(
            table.column_names().to_vec(),
            table.features().clone(),
            labels,
            table.provenance().clone(),
        )
        .unwrap();
        let model = GanomalyModel::init(GanomalyArch::with_hidden(2, 2, vec![4]), 0).unwrap();
        let mut trainer = GanomalyTrainer::new(model, TrainConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            trainer.train_epoch(&table, &mut rng),
            Err(GanomalyError::NotBenignOnly(1))
        ));
    }

    #[test]
    fn frozen_weights_and_rng_give_identical_losses() {
        let model = GanomalyModel::init(GanomalyArch::with_hidden(3, 2, vec![5]), 7).unwrap();
        let x = Matrix::from_rows(&[vec![0.3, 0.1, 0.9], vec![0.2, 0.8, 0.4]]);
        let a = generator_pass(&model, &x).unwrap();
        let b = generator_pass(&model, &x).unwrap();
        assert_eq!(a.adv, b.adv);
        assert_eq!(a.con, b.con);
        assert_eq!(a.enc, b.enc);
        let da = discriminator_pass(&model, &x, &a.xhat).unwrap();
        let db = discriminator_pass(&model, &x, &b.xhat).unwrap();
        assert_eq!(da.loss, db.loss);
    }

    #[test]
    fn pure_autoencoder_mode_reduces_reconstruction_loss() {
        // w_adv = w_enc = 0 turns training into an L1 autoencoder.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let rows: Vec<Vec<f64>> = (0..64)
            .map(|_| {
                let a: f64 = rng.random_range(0.2..0.8);
                vec![a, 1.0 - a]
            })
            .collect();
        let table = benign_table(&rows);
        let mut model = GanomalyModel::init(GanomalyArch::with_hidden(2, 2, vec![8]), 3).unwrap();
        model.loss_weights = crate::ganomaly::LossWeights {
            adv: 0.0,
            con: 1.0,
            enc: 0.0,
        };
        let cfg = TrainConfig {
            batch_size: 16,
            learning_rate: 5e-3,
            ..TrainConfig::default()
        };
        let mut trainer = GanomalyTrainer::new(model, cfg);
        let mut first = 0.0;
        let mut last = 0.0;
        let mut smoothed = Vec::new();
        for epoch in 0..50 {
            let losses = trainer.train_epoch(&table, &mut rng).unwrap();
            if epoch == 0 {
                first = losses.con;
            }
            last = losses.con;
            smoothed.push(losses.con);
        }
        assert!(
            last < first * 0.5,
            "reconstruction loss should halve: first {first}, last {last}"
        );
        // Smoothed trend over first/last quarters is decreasing.
        let quarter = smoothed.len() / 4;
        let head: f64 = smoothed[..quarter].iter().sum::<f64>() / quarter as f64;
        let tail: f64 = smoothed[smoothed.len() - quarter..].iter().sum::<f64>() / quarter as f64;
        assert!(tail < head);
    }
}
