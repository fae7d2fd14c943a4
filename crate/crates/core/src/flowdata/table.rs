use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::FlowError;
use crate::fingerprint::sha256_hex;
use crate::netcore::Matrix;

/// Per-row class of a flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Benign,
    Ddos,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Benign => "benign",
            Label::Ddos => "ddos",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "benign" => Some(Label::Benign),
            "ddos" => Some(Label::Ddos),
            _ => None,
        }
    }
}

/// Where a table came from and what preprocessing did to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Provenance {
    pub source: String,
    /// Applied operations, in order.
    pub steps: Vec<String>,
    /// Row-accounting counters (excluded_unparseable, removed_nan, ...).
    pub counts: BTreeMap<String, u64>,
}

impl Provenance {
    pub fn new(source: &str) -> Self {
        Self {
            source: source.to_string(),
            ..Self::default()
        }
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn bump(&mut self, key: &str, by: u64) {
        *self.counts.entry(key.to_string()).or_insert(0) += by;
    }
}

/// Rectangular numeric feature matrix with per-row labels; the unit of
/// all training and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTable {
    column_names: Vec<String>,
    features: Matrix,
    labels: Vec<Label>,
    provenance: Provenance,
}

impl FlowTable {
    pub fn new(
        column_names: Vec<String>,
        features: Matrix,
        labels: Vec<Label>,
        provenance: Provenance,
    ) -> Result<Self, FlowError> {
        if features.cols() != column_names.len() {
            return Err(FlowError::Construction(format!(
                "{} columns vs {} names",
                features.cols(),
                column_names.len()
            )));
        }
        if features.rows() != labels.len() {
            return Err(FlowError::Construction(format!(
                "{} rows vs {} labels",
                features.rows(),
                labels.len()
            )));
        }
        Ok(Self {
            column_names,
            features,
            labels,
            provenance,
        })
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn provenance_mut(&mut self) -> &mut Provenance {
        &mut self.provenance
    }

    pub fn num_rows(&self) -> usize {
        self.features.rows()
    }

    pub fn num_cols(&self) -> usize {
        self.features.cols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn benign_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Benign).count()
    }

    pub fn ddos_count(&self) -> usize {
        self.labels.len() - self.benign_count()
    }

    /// New table with the given rows, preserving provenance.
    pub fn select_rows(&self, indices: &[usize]) -> FlowTable {
        FlowTable {
            column_names: self.column_names.clone(),
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Feature matrix restricted to benign rows.
    pub fn benign_features(&self) -> Matrix {
        let idx: Vec<usize> = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == Label::Benign)
            .map(|(i, _)| i)
            .collect();
        self.features.select_rows(&idx)
    }

    pub fn has_both_classes(&self) -> bool {
        let b = self.benign_count();
        b > 0 && b < self.labels.len()
    }

    /// SHA-256 over canonicalized content: column names, label bytes,
    /// and row-major little-endian feature values.
    pub fn fingerprint(&self) -> String {
        let mut bytes = Vec::new();
        for c in &self.column_names {
            bytes.extend_from_slice(c.as_bytes());
            bytes.push(0);
        }
        for l in &self.labels {
            bytes.push(match l {
                Label::Benign => 0,
                Label::Ddos => 1,
            });
        }
        for v in self.features.data() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        sha256_hex(&bytes)
    }

    /// Per-feature mean over all rows.
    pub fn column_means(&self) -> Vec<f64> {
        let n = self.num_rows().max(1) as f64;
        let mut means = vec![0.0; self.num_cols()];
        for r in 0..self.num_rows() {
            for (m, v) in means.iter_mut().zip(self.features.row(r)) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        means
    }

    /// Per-feature sample standard deviation (n−1 denominator).
    pub fn column_stds(&self) -> Vec<f64> {
        let n = self.num_rows();
        let means = self.column_means();
        let mut vars = vec![0.0; self.num_cols()];
        if n < 2 {
            return vars;
        }
        for r in 0..n {
            for ((s, v), m) in vars.iter_mut().zip(self.features.row(r)).zip(&means) {
                let d = v - m;
                *s += d * d;
            }
        }
        for s in &mut vars {
            *s = (*s / (n - 1) as f64).sqrt();
        }
        vars
    }
}
