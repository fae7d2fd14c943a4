use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use super::FlowError;

/// Declares how a raw NetFlow CSV maps onto features: which columns are
/// numeric features, which hold 8-bit protocol-flag bitmasks, which are
/// identifiers to drop, and where the class label lives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSchema {
    pub feature_names: Vec<String>,
    #[serde(default)]
    pub flag_columns: Vec<String>,
    #[serde(default)]
    pub drop_columns: Vec<String>,
    pub label_column: String,
    /// Cell value marking a benign row; anything else is ddos.
    pub benign_label_value: String,
}

impl FlowSchema {
    pub fn new(
        feature_names: Vec<String>,
        flag_columns: Vec<String>,
        drop_columns: Vec<String>,
        label_column: String,
        benign_label_value: String,
    ) -> Result<Self, FlowError> {
        let schema = Self {
            feature_names,
            flag_columns,
            drop_columns,
            label_column,
            benign_label_value,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if self.feature_names.is_empty() {
            return Err(FlowError::InvalidSchema("no feature columns".into()));
        }
        let features: BTreeSet<&String> = self.feature_names.iter().collect();
        if features.len() != self.feature_names.len() {
            return Err(FlowError::InvalidSchema(
                "duplicate feature names".into(),
            ));
        }
        let drops: BTreeSet<&String> = self.drop_columns.iter().collect();
        if drops.len() != self.drop_columns.len() {
            return Err(FlowError::InvalidSchema("duplicate drop columns".into()));
        }
        for f in &self.flag_columns {
            if !features.contains(f) {
                return Err(FlowError::InvalidSchema(format!(
                    "flag column {f} is not a feature"
                )));
            }
            if drops.contains(f) {
                return Err(FlowError::InvalidSchema(format!(
                    "column {f} is both flag and drop"
                )));
            }
        }
        if features.contains(&self.label_column) || drops.contains(&self.label_column) {
            return Err(FlowError::InvalidSchema(
                "label column listed among features or drops".into(),
            ));
        }
        for d in &self.drop_columns {
            if features.contains(d) {
                return Err(FlowError::InvalidSchema(format!(
                    "column {d} is both feature and drop"
                )));
            }
        }
        Ok(())
    }

    /// Columns the CSV header must contain, exactly.
    pub fn expected_columns(&self) -> BTreeSet<String> {
        let mut cols: BTreeSet<String> = self.feature_names.iter().cloned().collect();
        cols.extend(self.drop_columns.iter().cloned());
        cols.insert(self.label_column.clone());
        cols
    }

    /// True when the label cell marks a benign flow. Falls back to a
    /// numeric comparison so "0" and "0.0" agree.
    pub fn is_benign_label(&self, cell: &str) -> bool {
        let cell = cell.trim();
        if cell == self.benign_label_value {
            return true;
        }
        match (cell.parse::<f64>(), self.benign_label_value.parse::<f64>()) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn overlapping_flag_and_drop_rejected() {
        let err = FlowSchema::new(
            names(&["a", "flags"]),
            names(&["flags"]),
            names(&["flags"]),
            "label".into(),
            "benign".into(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn duplicate_drop_rejected() {
        let err = FlowSchema::new(
            names(&["a"]),
            vec![],
            names(&["ip", "ip"]),
            "label".into(),
            "benign".into(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn numeric_benign_values_compare_numerically() {
        let schema = FlowSchema::new(
            names(&["a"]),
            vec![],
            vec![],
            "label".into(),
            "0".into(),
        )
        .unwrap();
        assert!(schema.is_benign_label("0"));
        assert!(schema.is_benign_label("0.0"));
        assert!(!schema.is_benign_label("1"));
        assert!(!schema.is_benign_label("ddos"));
    }
}
