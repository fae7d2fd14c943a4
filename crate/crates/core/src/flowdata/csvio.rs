//! CSV ingestion and persistence. Dialect: comma-separated, UTF-8, one
//! header row, `.` decimal separator.

use std::collections::BTreeSet;
use std::path::Path;

use super::{FlowError, FlowSchema, FlowTable, Label, Provenance};
use crate::netcore::Matrix;

/// Loads a raw dataset.
///
/// The header must consist of exactly the schema's features, drop
/// columns, and label column. Rows with unparseable numeric cells are
/// excluded and counted in provenance (`excluded_unparseable`). Column
/// order follows the file header (label removed).
pub fn load_csv(path: &Path, schema: &FlowSchema) -> Result<FlowTable, FlowError> {
    schema.validate()?;
    let file = std::fs::File::open(path).map_err(|source| FlowError::MissingFile {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);

    let header: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let header_set: BTreeSet<String> = header.iter().cloned().collect();
    let expected = schema.expected_columns();
    let missing: Vec<String> = expected.difference(&header_set).cloned().collect();
    let extra: Vec<String> = header_set.difference(&expected).cloned().collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(FlowError::HeaderMismatch { missing, extra });
    }

    let label_idx = header
        .iter()
        .position(|h| *h == schema.label_column)
        .expect("label present after header check");
    let feature_cols: Vec<(usize, String)> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| **h != schema.label_column)
        .map(|(i, h)| (i, h.clone()))
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<Label> = Vec::new();
    let mut excluded: u64 = 0;
    for record in reader.records() {
        let record = record?;
        let mut row = Vec::with_capacity(feature_cols.len());
        let mut ok = true;
        for (i, _) in &feature_cols {
            let cell = record.get(*i).unwrap_or("").trim();
            // Empty cells become NaN (removed later by clean); anything
            // else must parse as a number.
            if cell.is_empty() {
                row.push(f64::NAN);
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) => row.push(v),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            excluded += 1;
            continue;
        }
        let label_cell = record.get(label_idx).unwrap_or("");
        labels.push(if schema.is_benign_label(label_cell) {
            Label::Benign
        } else {
            Label::Ddos
        });
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(FlowError::NoRows(path.display().to_string()));
    }

    let mut provenance = Provenance::new(&path.display().to_string());
    provenance.steps.push("load_csv".into());
    provenance.bump("rows_loaded", rows.len() as u64);
    provenance.bump("excluded_unparseable", excluded);

    let column_names: Vec<String> = feature_cols.into_iter().map(|(_, n)| n).collect();
    FlowTable::new(column_names, Matrix::from_rows(&rows), labels, provenance)
}

/// Writes a processed table: feature columns plus a trailing `label`
/// column holding `benign`/`ddos`.
pub fn write_processed_csv(table: &FlowTable, path: &Path) -> Result<(), FlowError> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = table.column_names().iter().map(String::as_str).collect();
    header.push("label");
    writer.write_record(&header)?;
    for r in 0..table.num_rows() {
        let mut record: Vec<String> = table
            .features()
            .row(r)
            .iter()
            .map(|v| format_value(*v))
            .collect();
        record.push(table.labels()[r].as_str().to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a table previously written by [`write_processed_csv`].
pub fn read_processed_csv(path: &Path) -> Result<FlowTable, FlowError> {
    let file = std::fs::File::open(path).map_err(|source| FlowError::MissingFile {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    if header.last().map(String::as_str) != Some("label") {
        return Err(FlowError::HeaderMismatch {
            missing: vec!["label".into()],
            extra: vec![],
        });
    }
    let column_names: Vec<String> = header[..header.len() - 1].to_vec();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record?;
        let mut row = Vec::with_capacity(column_names.len());
        for i in 0..column_names.len() {
            let cell = record.get(i).unwrap_or("");
            row.push(cell.parse::<f64>().map_err(|_| {
                FlowError::Construction(format!("bad numeric cell {cell:?}"))
            })?);
        }
        let label_cell = record.get(column_names.len()).unwrap_or("");
        let label = Label::parse(label_cell).ok_or_else(|| {
            FlowError::Construction(format!("bad label cell {label_cell:?}"))
        })?;
        rows.push(row);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(FlowError::NoRows(path.display().to_string()));
    }
    let mut provenance = Provenance::new(&path.display().to_string());
    provenance.steps.push("read_processed_csv".into());
    FlowTable::new(column_names, Matrix::from_rows(&rows), labels, provenance)
}

/// Round-trippable decimal formatting (shortest representation that
/// parses back to the same f64).
fn format_value(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}
