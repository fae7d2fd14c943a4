//! Flag expansion, bias-column removal, and null/outlier cleaning.

use super::{FlowError, FlowSchema, FlowTable, Label};
use crate::netcore::Matrix;

/// Tukey fence multiplier used when none is configured.
pub const DEFAULT_OUTLIER_K: f64 = 3.0;

/// Replaces every declared flag column by eight binary columns named
/// `<col>_bit0..7` (bit 0 first), in place of the original column.
///
/// Flag cells must be integers in `0..=255`; rows violating that are
/// poisoned with NaN bits so the cleaning step removes them.
pub fn expand_flags(table: &FlowTable, schema: &FlowSchema) -> Result<FlowTable, FlowError> {
    for c in &schema.flag_columns {
        if table.column_index(c).is_none() {
            return Err(FlowError::MissingColumn(c.clone()));
        }
    }
    if schema.flag_columns.is_empty() {
        return Ok(table.clone());
    }

    let is_flag: Vec<bool> = table
        .column_names()
        .iter()
        .map(|c| schema.flag_columns.contains(c))
        .collect();

    let mut new_names = Vec::new();
    for (name, flag) in table.column_names().iter().zip(&is_flag) {
        if *flag {
            for bit in 0..8 {
                new_names.push(format!("{name}_bit{bit}"));
            }
        } else {
            new_names.push(name.clone());
        }
    }

    let mut invalid_rows: u64 = 0;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(table.num_rows());
    for r in 0..table.num_rows() {
        let src = table.features().row(r);
        let mut row = Vec::with_capacity(new_names.len());
        let mut valid = true;
        for (v, flag) in src.iter().zip(&is_flag) {
            if *flag {
                let ok = v.is_finite() && *v >= 0.0 && *v < 256.0 && v.fract() == 0.0;
                if !ok {
                    valid = false;
                }
                let word = if ok { *v as u16 } else { 0 };
                for bit in 0..8 {
                    let b = ((word >> bit) & 1) as f64;
                    row.push(if ok { b } else { f64::NAN });
                }
            } else {
                row.push(*v);
            }
        }
        if !valid {
            invalid_rows += 1;
        }
        rows.push(row);
    }

    let mut out = FlowTable::new(
        new_names,
        Matrix::from_rows(&rows),
        table.labels().to_vec(),
        table.provenance().clone(),
    )?;
    out.provenance_mut().steps.push("expand_flags".into());
    out.provenance_mut().bump("invalid_flag_rows", invalid_rows);
    Ok(out)
}

/// Removes the schema's drop columns (addresses, ports, identifiers).
pub fn drop_bias_features(table: &FlowTable, schema: &FlowSchema) -> Result<FlowTable, FlowError> {
    for c in &schema.drop_columns {
        if table.column_index(c).is_none() {
            return Err(FlowError::MissingColumn(c.clone()));
        }
    }
    if schema.drop_columns.is_empty() {
        return Ok(table.clone());
    }
    let keep: Vec<usize> = table
        .column_names()
        .iter()
        .enumerate()
        .filter(|(_, c)| !schema.drop_columns.contains(c))
        .map(|(i, _)| i)
        .collect();
    let names: Vec<String> = keep
        .iter()
        .map(|&i| table.column_names()[i].clone())
        .collect();
    let mut rows = Vec::with_capacity(table.num_rows());
    for r in 0..table.num_rows() {
        let src = table.features().row(r);
        rows.push(keep.iter().map(|&i| src[i]).collect::<Vec<f64>>());
    }
    let mut out = FlowTable::new(
        names,
        Matrix::from_rows(&rows),
        table.labels().to_vec(),
        table.provenance().clone(),
    )?;
    out.provenance_mut().steps.push("drop_bias_features".into());
    Ok(out)
}

/// Removes rows containing NaN/∞ anywhere, then removes benign outlier
/// rows by per-feature Tukey fences `[Q1 − k·IQR, Q3 + k·IQR]` computed
/// on the surviving benign rows.
///
/// Fences only ever judge benign rows: attack rows are extreme by
/// nature and must survive to the test split. The fence pass repeats
/// until no row moves, so the operation is a projection (applying it
/// twice changes nothing).
pub fn clean(table: &FlowTable, outlier_k: f64) -> Result<FlowTable, FlowError> {
    let mut keep: Vec<usize> = Vec::with_capacity(table.num_rows());
    let mut removed_nan: u64 = 0;
    for r in 0..table.num_rows() {
        if table.features().row(r).iter().all(|v| v.is_finite()) {
            keep.push(r);
        } else {
            removed_nan += 1;
        }
    }

    let mut removed_outliers: u64 = 0;
    loop {
        let benign: Vec<usize> = keep
            .iter()
            .copied()
            .filter(|&r| table.labels()[r] == Label::Benign)
            .collect();
        if benign.is_empty() {
            break;
        }
        let mut fences: Vec<Option<(f64, f64)>> = Vec::with_capacity(table.num_cols());
        for c in 0..table.num_cols() {
            let mut values: Vec<f64> = benign
                .iter()
                .map(|&r| table.features().get(r, c))
                .collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let q1 = interpolated_quantile(&values, 0.25);
            let q3 = interpolated_quantile(&values, 0.75);
            let iqr = q3 - q1;
            // Degenerate spread: fence rule skipped for this feature.
            fences.push(if iqr > 0.0 {
                Some((q1 - outlier_k * iqr, q3 + outlier_k * iqr))
            } else {
                None
            });
        }
        let before = keep.len();
        keep.retain(|&r| {
            if table.labels()[r] != Label::Benign {
                return true;
            }
            let row = table.features().row(r);
            let inside = row.iter().zip(&fences).all(|(v, f)| match f {
                Some((lo, hi)) => v >= lo && v <= hi,
                None => true,
            });
            if !inside {
                removed_outliers += 1;
            }
            inside
        });
        if keep.len() == before {
            break;
        }
    }

    if keep.is_empty() {
        return Err(FlowError::AllRowsRemoved);
    }
    let mut out = table.select_rows(&keep);
    out.provenance_mut().steps.push("clean".into());
    out.provenance_mut().bump("removed_nan", removed_nan);
    out.provenance_mut().bump("removed_outliers", removed_outliers);
    Ok(out)
}

/// Linear interpolation between order statistics over a sorted slice.
pub(crate) fn interpolated_quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    if sorted.len() == 1 {
        return sorted[0];
    }
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}
