//! Per-silo min-max rescaling. Scaler state is computed on the benign
//! train split and never crosses the federation boundary.

use serde::{Deserialize, Serialize};

use super::{FlowError, FlowTable};

/// Per-feature min/max rescaling state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub columns: Vec<String>,
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
    /// Fingerprint of the table this was fitted on.
    pub fitted_on: String,
}

impl ScalerParams {
    fn check_columns(&self, table: &FlowTable) -> Result<(), FlowError> {
        if self.columns != table.column_names() {
            return Err(FlowError::ScalerColumnMismatch {
                expected: self.columns.clone(),
                found: table.column_names().to_vec(),
            });
        }
        Ok(())
    }
}

/// Fits per-feature minima and maxima on a (benign) training table.
pub fn fit_scaler(train: &FlowTable) -> Result<ScalerParams, FlowError> {
    if train.num_rows() == 0 {
        return Err(FlowError::Construction("cannot fit scaler on empty table".into()));
    }
    let mut mins = vec![f64::INFINITY; train.num_cols()];
    let mut maxs = vec![f64::NEG_INFINITY; train.num_cols()];
    for r in 0..train.num_rows() {
        for ((mn, mx), v) in mins.iter_mut().zip(maxs.iter_mut()).zip(train.features().row(r)) {
            *mn = mn.min(*v);
            *mx = mx.max(*v);
        }
    }
    Ok(ScalerParams {
        columns: train.column_names().to_vec(),
        mins,
        maxs,
        fitted_on: train.fingerprint(),
    })
}

/// Maps each feature by `(x − min)/(max − min)`.
///
/// In-range values land in `[0,1]`; out-of-range values are NOT clipped,
/// preserving anomaly magnitude. Degenerate features (min = max) map
/// to 0.
pub fn apply_scaler(table: &FlowTable, params: &ScalerParams) -> Result<FlowTable, FlowError> {
    params.check_columns(table)?;
    transform(table, |c, v| {
        let (mn, mx) = (params.mins[c], params.maxs[c]);
        if mx > mn {
            (v - mn) / (mx - mn)
        } else {
            0.0
        }
    })
}

/// Inverse of [`apply_scaler`]; degenerate features map back to min.
pub fn invert_scaler(table: &FlowTable, params: &ScalerParams) -> Result<FlowTable, FlowError> {
    params.check_columns(table)?;
    transform(table, |c, v| {
        let (mn, mx) = (params.mins[c], params.maxs[c]);
        if mx > mn {
            v * (mx - mn) + mn
        } else {
            mn
        }
    })
}

fn transform(
    table: &FlowTable,
    f: impl Fn(usize, f64) -> f64,
) -> Result<FlowTable, FlowError> {
    let mut out = table.clone();
    let cols = out.num_cols();
    // map each value with its column index
    let data = out.features().data().to_vec();
    let mapped: Vec<f64> = data
        .iter()
        .enumerate()
        .map(|(i, &v)| f(i % cols, v))
        .collect();
    let m = crate::netcore::Matrix::from_vec(table.num_rows(), cols, mapped);
    let mut t = FlowTable::new(
        table.column_names().to_vec(),
        m,
        table.labels().to_vec(),
        table.provenance().clone(),
    )?;
    t.provenance_mut().steps.push("rescale".into());
    *out.provenance_mut() = t.provenance().clone();
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowdata::{Label, Provenance};
    use crate::netcore::Matrix;

    fn table(rows: &[Vec<f64>]) -> FlowTable {
        FlowTable::new(
            (0..rows[0].len()).map(|i| format!("c{i}")).collect(),
            Matrix::from_rows(rows),
            vec![Label::Benign; rows.len()],
            Provenance::new("t"),
        )
        .unwrap()
    }

    #[test]
    fn minmax_definition() {
        let t = table(&[vec![0.0], vec![5.0], vec![10.0]]);
        let p = fit_scaler(&t).unwrap();
        let s = apply_scaler(&t, &p).unwrap();
        assert_eq!(s.features().data(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn degenerate_feature_maps_to_zero() {
        let t = table(&[vec![7.0], vec![7.0]]);
        let p = fit_scaler(&t).unwrap();
        let s = apply_scaler(&t, &p).unwrap();
        assert_eq!(s.features().data(), &[0.0, 0.0]);
        let back = invert_scaler(&s, &p).unwrap();
        assert_eq!(back.features().data(), &[7.0, 7.0]);
    }

    #[test]
    fn out_of_range_values_are_not_clipped() {
        let train = table(&[vec![0.0], vec![10.0]]);
        let p = fit_scaler(&train).unwrap();
        let test = table(&[vec![20.0]]);
        let s = apply_scaler(&test, &p).unwrap();
        assert_eq!(s.features().data(), &[2.0]);
    }

    #[test]
    fn column_mismatch_is_rejected() {
        let t = table(&[vec![1.0, 2.0]]);
        let p = fit_scaler(&t).unwrap();
        let other = FlowTable::new(
            vec!["x".into(), "y".into()],
            Matrix::from_rows(&[vec![1.0, 2.0]]),
            vec![Label::Benign],
            Provenance::new("o"),
        )
        .unwrap();
        assert!(matches!(
            apply_scaler(&other, &p),
            Err(FlowError::ScalerColumnMismatch { .. })
        ));
    }

    #[test]
    fn round_trip_close_to_identity() {
        let t = table(&[vec![1.5, -3.0], vec![9.25, 14.0], vec![4.0, 0.125]]);
        let p = fit_scaler(&t).unwrap();
        let s = apply_scaler(&t, &p).unwrap();
        let back = invert_scaler(&s, &p).unwrap();
        for (a, b) in back.features().data().iter().zip(t.features().data()) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
    }
}
