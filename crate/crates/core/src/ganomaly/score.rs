//! Anomaly scoring: the latent residual between the first encoding of a
//! sample and the re-encoding of its reconstruction, min-max normalized
//! into `[0,1]`.

use serde::{Deserialize, Serialize};

use super::{GanomalyError, GanomalyModel, ScoreNorm};
use crate::flowdata::FlowTable;
use crate::netcore::Matrix;

/// Raw latent residual plus its normalized form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnomalyScore {
    pub raw: f64,
    pub normalized: f64,
}

impl GanomalyModel {
    /// Mean absolute latent residual `‖GE(x) − E(GD(GE(x)))‖₁ / z` per
    /// row; always non-negative.
    pub fn raw_scores(&self, batch: &Matrix) -> Result<Vec<f64>, GanomalyError> {
        if batch.cols() != self.arch.input_dim {
            return Err(GanomalyError::DimMismatch(format!(
                "batch has {} features, model expects {}",
                batch.cols(),
                self.arch.input_dim
            )));
        }
        let z1 = self.ge.forward(batch)?;
        let xhat = self.gd.forward(&z1)?;
        let z2 = self.e.forward(&xhat)?;
        let z = self.arch.latent_dim as f64;
        let mut scores = Vec::with_capacity(batch.rows());
        for r in 0..batch.rows() {
            let residual: f64 = z1
                .row(r)
                .iter()
                .zip(z2.row(r))
                .map(|(a, b)| (a - b).abs())
                .sum();
            scores.push(residual / z);
        }
        Ok(scores)
    }

    /// Raw scores over a whole (scaled) table.
    pub fn raw_scores_table(&self, table: &FlowTable) -> Result<Vec<f64>, GanomalyError> {
        self.raw_scores(table.features())
    }

    /// Stores min/max normalization state from a fitting population.
    pub fn fit_score_norm(&mut self, scores: &[f64]) -> Result<ScoreNorm, GanomalyError> {
        let norm = fit_score_norm(scores)?;
        self.score_norm = Some(norm);
        Ok(norm)
    }

    /// Normalizes a raw score with the stored state.
    pub fn normalize(&self, raw: f64) -> Result<AnomalyScore, GanomalyError> {
        let norm = self
            .score_norm
            .ok_or_else(|| GanomalyError::Untrained("score normalization not fitted".into()))?;
        Ok(AnomalyScore {
            raw,
            normalized: normalize_with(&norm, raw),
        })
    }
}

/// Fits min/max over at least two scores.
pub fn fit_score_norm(scores: &[f64]) -> Result<ScoreNorm, GanomalyError> {
    if scores.len() < 2 {
        return Err(GanomalyError::TooFewScores(scores.len()));
    }
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ScoreNorm { min, max })
}

/// `clamp((raw − min)/(max − min), 0, 1)`; a degenerate population
/// (min = max) maps everything to 0.
pub fn normalize_with(norm: &ScoreNorm, raw: f64) -> f64 {
    if norm.max > norm.min {
        ((raw - norm.min) / (norm.max - norm.min)).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ganomaly::GanomalyArch;

    #[test]
    fn scores_are_non_negative_and_permutation_equivariant() {
        let model = GanomalyModel::init(GanomalyArch::with_hidden(4, 3, vec![6]), 5).unwrap();
        let rows = vec![
            vec![0.1, 0.9, 0.4, 0.2],
            vec![0.7, 0.3, 0.8, 0.6],
            vec![0.5, 0.5, 0.5, 0.5],
        ];
        let batch = Matrix::from_rows(&rows);
        let scores = model.raw_scores(&batch).unwrap();
        assert!(scores.iter().all(|&s| s >= 0.0));

        let permuted = Matrix::from_rows(&[rows[2].clone(), rows[0].clone(), rows[1].clone()]);
        let permuted_scores = model.raw_scores(&permuted).unwrap();
        assert_eq!(permuted_scores[1], scores[0]);
        assert_eq!(permuted_scores[2], scores[1]);
        assert_eq!(permuted_scores[0], scores[2]);
    }

    #[test]
    fn normalization_midpoint_and_clamp() {
        let norm = fit_score_norm(&[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(normalize_with(&norm, 4.0), 0.5);
        assert_eq!(normalize_with(&norm, 10.0), 1.0);
        assert_eq!(normalize_with(&norm, 0.0), 0.0);
    }

    #[test]
    fn degenerate_population_maps_to_zero() {
        let norm = fit_score_norm(&[3.0, 3.0, 3.0]).unwrap();
        assert_eq!(normalize_with(&norm, 3.0), 0.0);
        assert_eq!(normalize_with(&norm, 100.0), 0.0);
    }

    #[test]
    fn too_few_scores_rejected() {
        assert!(matches!(
            fit_score_norm(&[1.0]),
            Err(GanomalyError::TooFewScores(1))
        ));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let model = GanomalyModel::init(GanomalyArch::with_hidden(4, 2, vec![5]), 0).unwrap();
        let batch = Matrix::from_rows(&[vec![0.0; 5]]);
        assert!(model.raw_scores(&batch).is_err());
    }
}
