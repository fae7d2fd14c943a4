use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Activation, Matrix, NetError};

/// Architecture description: input width plus one `(units, activation)`
/// pair per layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetArch {
    pub input_dim: usize,
    pub layers: Vec<(usize, Activation)>,
}

impl NetArch {
    pub fn new(input_dim: usize, layers: Vec<(usize, Activation)>) -> Self {
        Self { input_dim, layers }
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, |l| l.0)
    }

    fn validate(&self) -> Result<(), NetError> {
        if self.input_dim == 0 {
            return Err(NetError::InvalidArch("input dimension must be positive".into()));
        }
        if self.layers.is_empty() {
            return Err(NetError::InvalidArch("at least one layer required".into()));
        }
        if let Some(pos) = self.layers.iter().position(|(n, _)| *n == 0) {
            return Err(NetError::InvalidArch(format!(
                "layer {pos} has zero units"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Layer {
    /// `[out × in]` weight matrix.
    pub weight: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

/// Fully-connected network; layer dimensions chain.
#[derive(Debug, Clone)]
pub struct DenseNet {
    pub(crate) layers: Vec<Layer>,
}

/// Everything `backward` needs from a forward pass: the input to each
/// layer, the pre-activations, and the post-activations.
#[derive(Debug)]
pub struct ForwardCache {
    /// `inputs[k]` feeds layer `k`; `inputs[L]` is the network output.
    pub(crate) inputs: Vec<Matrix>,
    pub(crate) preacts: Vec<Matrix>,
}

impl ForwardCache {
    pub fn output(&self) -> &Matrix {
        self.inputs.last().expect("cache has output")
    }

    /// Post-activation of the given layer (0-based).
    pub fn post_activation(&self, layer: usize) -> &Matrix {
        &self.inputs[layer + 1]
    }

    pub fn batch_size(&self) -> usize {
        self.inputs[0].rows()
    }
}

/// Per-layer parameter gradients mirroring the parameter shapes.
#[derive(Debug, Clone)]
pub struct LayerGrad {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGrad {
                    weight: Matrix::zeros(l.weight.rows(), l.weight.cols()),
                    bias: vec![0.0; l.bias.len()],
                })
                .collect(),
        }
    }

    /// Elementwise accumulate `other`, used to merge gradient branches.
    pub fn add_assign(&mut self, other: &Gradients) {
        assert_eq!(self.layers.len(), other.layers.len(), "gradient layer count");
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.weight.data_mut().iter_mut().zip(b.weight.data()) {
                *x += y;
            }
            for (x, y) in a.bias.iter_mut().zip(&b.bias) {
                *x += y;
            }
        }
    }
}

impl DenseNet {
    /// Xavier-uniform weights, zero biases, deterministic per seed.
    pub fn init(arch: &NetArch, seed: u64) -> Result<Self, NetError> {
        arch.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(arch.layers.len());
        let mut fan_in = arch.input_dim;
        for &(units, activation) in &arch.layers {
            let bound = (6.0 / (fan_in + units) as f64).sqrt();
            let mut weight = Matrix::zeros(units, fan_in);
            for v in weight.data_mut() {
                *v = rng.random_range(-bound..bound);
            }
            layers.push(Layer {
                weight,
                bias: vec![0.0; units],
                activation,
            });
            fan_in = units;
        }
        Ok(Self { layers })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weight.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().weight.rows()
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn arch(&self) -> NetArch {
        NetArch {
            input_dim: self.input_dim(),
            layers: self
                .layers
                .iter()
                .map(|l| (l.weight.rows(), l.activation))
                .collect(),
        }
    }

    pub fn forward(&self, batch: &Matrix) -> Result<Matrix, NetError> {
        Ok(self.forward_cached(batch)?.0)
    }

    pub fn forward_cached(&self, batch: &Matrix) -> Result<(Matrix, ForwardCache), NetError> {
        if batch.cols() != self.input_dim() {
            return Err(NetError::DimMismatch(format!(
                "batch has {} columns, network expects {}",
                batch.cols(),
                self.input_dim()
            )));
        }
        let mut inputs = Vec::with_capacity(self.layers.len() + 1);
        let mut preacts = Vec::with_capacity(self.layers.len());
        inputs.push(batch.clone());
        let mut x = batch.clone();
        for layer in &self.layers {
            let mut z = x.matmul_nt(&layer.weight);
            z.add_row_bias(&layer.bias);
            let a = z.map(|v| layer.activation.apply(v));
            preacts.push(z);
            inputs.push(a.clone());
            x = a;
        }
        let out = inputs.last().unwrap().clone();
        Ok((out, ForwardCache { inputs, preacts }))
    }

    /// Full backward pass from a gradient w.r.t. the network output.
    ///
    /// Returns parameter gradients and the gradient w.r.t. the input batch.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        grad_output: &Matrix,
    ) -> Result<(Gradients, Matrix), NetError> {
        self.backward_from(cache, self.layers.len() - 1, grad_output)
    }

    /// Backward pass starting at the post-activation of `layer`.
    ///
    /// Lets a caller backpropagate from an intermediate feature map (the
    /// discriminator's hidden features, for feature matching). Layers
    /// above `layer` contribute nothing; their gradients are zero.
    pub fn backward_from(
        &self,
        cache: &ForwardCache,
        layer: usize,
        grad_postact: &Matrix,
    ) -> Result<(Gradients, Matrix), NetError> {
        self.check_cache(cache)?;
        let expect = &cache.inputs[layer + 1];
        if grad_postact.rows() != expect.rows() || grad_postact.cols() != expect.cols() {
            return Err(NetError::DimMismatch(format!(
                "gradient at layer {layer} is {}×{}, expected {}×{}",
                grad_postact.rows(),
                grad_postact.cols(),
                expect.rows(),
                expect.cols()
            )));
        }
        // dz = da ⊙ act'(z)
        let mut dz = grad_postact.clone();
        self.apply_activation_grad(cache, layer, &mut dz);
        self.backward_preact(cache, layer, dz)
    }

    /// Backward pass where the caller supplies the gradient w.r.t. the
    /// final layer's *pre-activation*.
    ///
    /// Pairs a sigmoid output with binary cross-entropy without the
    /// intermediate `a(1-a)` division that saturates in 64-bit.
    pub fn backward_logits(
        &self,
        cache: &ForwardCache,
        grad_preact: &Matrix,
    ) -> Result<(Gradients, Matrix), NetError> {
        self.check_cache(cache)?;
        self.backward_preact(cache, self.layers.len() - 1, grad_preact.clone())
    }

    fn backward_preact(
        &self,
        cache: &ForwardCache,
        start: usize,
        mut dz: Matrix,
    ) -> Result<(Gradients, Matrix), NetError> {
        let mut grads = Gradients::zeros_like(self);
        let mut layer = start;
        loop {
            let input = &cache.inputs[layer];
            // dW = dzᵀ·x, db = column sums of dz, dx = dz·W
            grads.layers[layer].weight = dz.matmul_tn(input);
            let db = &mut grads.layers[layer].bias;
            for r in 0..dz.rows() {
                for (acc, v) in db.iter_mut().zip(dz.row(r)) {
                    *acc += v;
                }
            }
            let dx = dz.matmul_nn(&self.layers[layer].weight);
            if layer == 0 {
                return Ok((grads, dx));
            }
            layer -= 1;
            dz = dx;
            self.apply_activation_grad(cache, layer, &mut dz);
        }
    }

    fn apply_activation_grad(&self, cache: &ForwardCache, layer: usize, dz: &mut Matrix) {
        let act = self.layers[layer].activation;
        let z = &cache.preacts[layer];
        let a = &cache.inputs[layer + 1];
        for ((d, &zv), &av) in dz
            .data_mut()
            .iter_mut()
            .zip(z.data())
            .zip(a.data())
        {
            *d *= act.derivative(zv, av);
        }
    }

    fn check_cache(&self, cache: &ForwardCache) -> Result<(), NetError> {
        if cache.preacts.len() != self.layers.len()
            || cache.inputs.len() != self.layers.len() + 1
        {
            return Err(NetError::DimMismatch(
                "cache does not match network depth".into(),
            ));
        }
        for (k, layer) in self.layers.iter().enumerate() {
            if cache.preacts[k].cols() != layer.weight.rows()
                || cache.inputs[k].cols() != layer.weight.cols()
            {
                return Err(NetError::DimMismatch(format!(
                    "cache shapes do not match layer {k}"
                )));
            }
        }
        Ok(())
    }

    /// Named parameter tensors, used for error reporting and moments.
    pub(crate) fn tensor_name(layer: usize, is_weight: bool) -> String {
        if is_weight {
            format!("layer {layer} weight")
        } else {
            format!("layer {layer} bias")
        }
    }
}
