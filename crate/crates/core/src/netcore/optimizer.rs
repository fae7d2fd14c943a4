use serde::{Deserialize, Serialize};

use super::{DenseNet, Gradients, Matrix, NetError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Adam,
}

#[derive(Debug, Clone)]
struct Moments {
    m_weight: Matrix,
    m_bias: Vec<f64>,
    v_weight: Matrix,
    v_bias: Vec<f64>,
}

/// SGD or bias-corrected Adam. Moment shapes mirror the parameters; the
/// step counter only ever increases.
#[derive(Debug, Clone)]
pub struct Optimizer {
    kind: OptimizerKind,
    learning_rate: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    step_count: u64,
    moments: Option<Vec<Moments>>,
}

impl Optimizer {
    pub fn sgd(learning_rate: f64) -> Self {
        Self {
            kind: OptimizerKind::Sgd,
            learning_rate,
            beta1: 0.0,
            beta2: 0.0,
            epsilon: 0.0,
            step_count: 0,
            moments: None,
        }
    }

    pub fn adam(learning_rate: f64, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            kind: OptimizerKind::Adam,
            learning_rate,
            beta1,
            beta2,
            epsilon,
            step_count: 0,
            moments: None,
        }
    }

    /// Adam with the usual (0.9, 0.999, 1e-8) defaults.
    pub fn adam_default(learning_rate: f64) -> Self {
        Self::adam(learning_rate, 0.9, 0.999, 1e-8)
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    /// Applies one update in place. Rejects non-finite gradients, naming
    /// the offending tensor.
    pub fn step(&mut self, net: &mut DenseNet, grads: &Gradients) -> Result<(), NetError> {
        if grads.layers.len() != net.layers.len() {
            return Err(NetError::ShapeMismatch(format!(
                "gradient has {} layers, network has {}",
                grads.layers.len(),
                net.layers.len()
            )));
        }
        for (k, (layer, grad)) in net.layers.iter().zip(&grads.layers).enumerate() {
            if layer.weight.rows() != grad.weight.rows()
                || layer.weight.cols() != grad.weight.cols()
                || layer.bias.len() != grad.bias.len()
            {
                return Err(NetError::ShapeMismatch(format!(
                    "gradient shapes do not match layer {k}"
                )));
            }
            if !grad.weight.is_finite() {
                return Err(NetError::NonFiniteGrad {
                    tensor: DenseNet::tensor_name(k, true),
                });
            }
            if !grad.bias.iter().all(|v| v.is_finite()) {
                return Err(NetError::NonFiniteGrad {
                    tensor: DenseNet::tensor_name(k, false),
                });
            }
        }

        self.step_count += 1;
        match self.kind {
            OptimizerKind::Sgd => {
                for (layer, grad) in net.layers.iter_mut().zip(&grads.layers) {
                    for (w, g) in layer.weight.data_mut().iter_mut().zip(grad.weight.data()) {
                        *w -= self.learning_rate * g;
                    }
                    for (b, g) in layer.bias.iter_mut().zip(&grad.bias) {
                        *b -= self.learning_rate * g;
                    }
                }
            }
            OptimizerKind::Adam => {
                if self.moments.is_none() {
                    self.moments = Some(
                        net.layers
                            .iter()
                            .map(|l| Moments {
                                m_weight: Matrix::zeros(l.weight.rows(), l.weight.cols()),
                                m_bias: vec![0.0; l.bias.len()],
                                v_weight: Matrix::zeros(l.weight.rows(), l.weight.cols()),
                                v_bias: vec![0.0; l.bias.len()],
                            })
                            .collect(),
                    );
                }
                let t = self.step_count as f64;
                let corr1 = 1.0 - self.beta1.powf(t);
                let corr2 = 1.0 - self.beta2.powf(t);
                let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.learning_rate, self.epsilon);
                let moments = self.moments.as_mut().unwrap();
                for ((layer, grad), mom) in
                    net.layers.iter_mut().zip(&grads.layers).zip(moments)
                {
                    for ((w, g), (m, v)) in layer
                        .weight
                        .data_mut()
                        .iter_mut()
                        .zip(grad.weight.data())
                        .zip(mom.m_weight.data_mut().iter_mut().zip(mom.v_weight.data_mut()))
                    {
                        *m = b1 * *m + (1.0 - b1) * g;
                        *v = b2 * *v + (1.0 - b2) * g * g;
                        let m_hat = *m / corr1;
                        let v_hat = *v / corr2;
                        *w -= lr * m_hat / (v_hat.sqrt() + eps);
                    }
                    for ((b, g), (m, v)) in layer
                        .bias
                        .iter_mut()
                        .zip(&grad.bias)
                        .zip(mom.m_bias.iter_mut().zip(mom.v_bias.iter_mut()))
                    {
                        *m = b1 * *m + (1.0 - b1) * g;
                        *v = b2 * *v + (1.0 - b2) * g * g;
                        let m_hat = *m / corr1;
                        let v_hat = *v / corr2;
                        *b -= lr * m_hat / (v_hat.sqrt() + eps);
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::{Activation, NetArch};

    fn scalar_net(w: f64) -> DenseNet {
        let mut net = DenseNet::init(
            &NetArch::new(1, vec![(1, Activation::Linear)]),
            0,
        )
        .unwrap();
        net.layers[0].weight.set(0, 0, w);
        net
    }

    fn scalar_grad(net: &DenseNet, g: f64) -> Gradients {
        let mut grads = Gradients::zeros_like(net);
        grads.layers[0].weight.set(0, 0, g);
        grads
    }

    #[test]
    fn sgd_definition() {
        let mut net = scalar_net(1.0);
        let mut opt = Optimizer::sgd(0.1);
        let grads = scalar_grad(&net, 1.0);
        opt.step(&mut net, &grads).unwrap();
        assert!((net.layers[0].weight.get(0, 0) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn adam_first_step_magnitude_is_learning_rate() {
        // With bias correction, the first update is lr·g/(|g| + ε') which
        // is ≈ lr regardless of the gradient scale.
        for &g in &[1e-6, 1.0, 1e6] {
            let mut net = scalar_net(5.0);
            let mut opt = Optimizer::adam_default(0.01);
            let grads = scalar_grad(&net, g);
            opt.step(&mut net, &grads).unwrap();
            let delta = 5.0 - net.layers[0].weight.get(0, 0);
            assert!(
                (delta - 0.01).abs() < 1e-5,
                "gradient {g} produced step {delta}"
            );
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters_alone() {
        let mut net = scalar_net(2.0);
        let mut opt = Optimizer::sgd(0.5);
        opt.step(&mut net, &scalar_grad(&net, 0.0)).unwrap();
        assert_eq!(net.layers[0].weight.get(0, 0), 2.0);

        let mut net = scalar_net(2.0);
        let mut opt = Optimizer::adam_default(0.5);
        opt.step(&mut net, &scalar_grad(&net, 0.0)).unwrap();
        assert_eq!(net.layers[0].weight.get(0, 0), 2.0);
    }

    #[test]
    fn adam_updates_decay_once_gradients_stop() {
        let mut net = scalar_net(1.0);
        let mut opt = Optimizer::adam_default(0.01);
        opt.step(&mut net, &scalar_grad(&net, 1.0)).unwrap();
        let mut prev = net.layers[0].weight.get(0, 0);
        let mut prev_delta = f64::INFINITY;
        for _ in 0..5 {
            opt.step(&mut net, &scalar_grad(&net, 0.0)).unwrap();
            let now = net.layers[0].weight.get(0, 0);
            let delta = (prev - now).abs();
            assert!(delta < prev_delta + 1e-18, "updates should shrink");
            prev_delta = delta;
            prev = now;
        }
        assert!(prev_delta < 0.01, "residual drift stays below lr scale");
    }

    #[test]
    fn nan_gradient_is_rejected_with_tensor_name() {
        let mut net = scalar_net(1.0);
        let mut opt = Optimizer::sgd(0.1);
        let grads = scalar_grad(&net, f64::NAN);
        match opt.step(&mut net, &grads) {
            Err(NetError::NonFiniteGrad { tensor }) => {
                assert_eq!(tensor, "layer 0 weight");
            }
            other => panic!("expected NonFiniteGrad, got {other:?}"),
        }
    }

    #[test]
    fn step_counter_increases() {
        let mut net = scalar_net(1.0);
        let mut opt = Optimizer::adam_default(0.01);
        assert_eq!(opt.step_count(), 0);
        opt.step(&mut net, &scalar_grad(&net, 1.0)).unwrap();
        opt.step(&mut net, &scalar_grad(&net, 1.0)).unwrap();
        assert_eq!(opt.step_count(), 2);
    }
}
