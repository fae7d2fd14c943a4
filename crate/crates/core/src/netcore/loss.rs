//! Scalar losses with their gradients, all reduced by mean over every
//! element so loss weights stay comparable across tensor shapes.

use super::Matrix;

fn check_shapes(a: &Matrix, b: &Matrix) {
    assert_eq!(a.rows(), b.rows(), "loss shapes");
    assert_eq!(a.cols(), b.cols(), "loss shapes");
}

/// Mean squared error and its gradient w.r.t. `pred`.
pub fn mse(pred: &Matrix, target: &Matrix) -> (f64, Matrix) {
    check_shapes(pred, target);
    let n = (pred.rows() * pred.cols()) as f64;
    let mut grad = Matrix::zeros(pred.rows(), pred.cols());
    let mut total = 0.0;
    for ((g, &p), &t) in grad
        .data_mut()
        .iter_mut()
        .zip(pred.data())
        .zip(target.data())
    {
        let d = p - t;
        total += d * d;
        *g = 2.0 * d / n;
    }
    (total / n, grad)
}

/// Mean absolute error and its gradient w.r.t. `pred`.
pub fn l1(pred: &Matrix, target: &Matrix) -> (f64, Matrix) {
    check_shapes(pred, target);
    let n = (pred.rows() * pred.cols()) as f64;
    let mut grad = Matrix::zeros(pred.rows(), pred.cols());
    let mut total = 0.0;
    for ((g, &p), &t) in grad
        .data_mut()
        .iter_mut()
        .zip(pred.data())
        .zip(target.data())
    {
        let d = p - t;
        total += d.abs();
        *g = d.signum() / n;
    }
    (total / n, grad)
}

const BCE_CLAMP: f64 = 1e-12;

/// Binary cross-entropy over probabilities in `[0,1]`.
///
/// Returns the loss and the gradient w.r.t. the probabilities.
/// Probabilities are clamped away from 0 and 1 when evaluating the logs.
pub fn bce(probs: &Matrix, targets: &Matrix) -> (f64, Matrix) {
    check_shapes(probs, targets);
    let n = (probs.rows() * probs.cols()) as f64;
    let mut grad = Matrix::zeros(probs.rows(), probs.cols());
    let mut total = 0.0;
    for ((g, &p), &t) in grad
        .data_mut()
        .iter_mut()
        .zip(probs.data())
        .zip(targets.data())
    {
        let pc = p.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
        total -= t * pc.ln() + (1.0 - t) * (1.0 - pc).ln();
        *g = (pc - t) / (pc * (1.0 - pc) * n);
    }
    (total / n, grad)
}

/// Binary cross-entropy where the final layer is a sigmoid: returns the
/// loss plus the gradient w.r.t. the final *pre-activation*, which is the
/// numerically stable form `(p − t)/n`.
pub fn bce_with_logits_grad(probs: &Matrix, targets: &Matrix) -> (f64, Matrix) {
    check_shapes(probs, targets);
    let n = (probs.rows() * probs.cols()) as f64;
    let mut grad = Matrix::zeros(probs.rows(), probs.cols());
    let mut total = 0.0;
    for ((g, &p), &t) in grad
        .data_mut()
        .iter_mut()
        .zip(probs.data())
        .zip(targets.data())
    {
        let pc = p.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
        total -= t * pc.ln() + (1.0 - t) * (1.0 - pc).ln();
        *g = (p - t) / n;
    }
    (total / n, grad)
}
