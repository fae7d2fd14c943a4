//! Validity audit for synthetic tables: per-feature semantic ranges
//! (e.g. a protocol byte must stay in `[0,255]`) plus an informational
//! nearest-neighbor distance histogram against real training rows.

use serde::{Deserialize, Serialize};

use crate::flowdata::FlowTable;

/// Declares the semantically valid range of one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeRule {
    pub column: String,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

impl RangeRule {
    pub fn violates(&self, v: f64) -> bool {
        if let Some(min) = self.min {
            if v < min {
                return true;
            }
        }
        if let Some(max) = self.max {
            if v > max {
                return true;
            }
        }
        !v.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleOutcome {
    pub column: String,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub violations: u64,
}

/// Distance-to-nearest-training-row histogram; information only, not a
/// privacy guarantee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub min: f64,
    pub mean: f64,
    pub sampled_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub rows: usize,
    pub rules: Vec<RuleOutcome>,
    pub violating_rows: u64,
    pub violation_ratio: f64,
    #[serde(default)]
    pub nn_distance: Option<NnHistogram>,
}

/// Checks every declared range over the table. The table is left
/// untouched; rules naming absent columns are reported with zero
/// violations and no matches. An empty rule set yields an empty report.
pub fn audit_synthetic(table: &FlowTable, rules: &[RangeRule]) -> AuditReport {
    let mut outcomes = Vec::with_capacity(rules.len());
    let mut row_flags = vec![false; table.num_rows()];
    for rule in rules {
        let mut violations = 0u64;
        if let Some(col) = table.column_index(&rule.column) {
            for r in 0..table.num_rows() {
                if rule.violates(table.features().get(r, col)) {
                    violations += 1;
                    row_flags[r] = true;
                }
            }
        }
        outcomes.push(RuleOutcome {
            column: rule.column.clone(),
            min: rule.min,
            max: rule.max,
            violations,
        });
    }
    let violating_rows = row_flags.iter().filter(|&&f| f).count() as u64;
    AuditReport {
        rows: table.num_rows(),
        rules: outcomes,
        violating_rows,
        violation_ratio: if table.num_rows() == 0 {
            0.0
        } else {
            violating_rows as f64 / table.num_rows() as f64
        },
        nn_distance: None,
    }
}

/// Copy of the table without rule-violating rows.
pub fn audit_filter(table: &FlowTable, rules: &[RangeRule]) -> FlowTable {
    let keep: Vec<usize> = (0..table.num_rows())
        .filter(|&r| {
            rules.iter().all(|rule| match table.column_index(&rule.column) {
                Some(col) => !rule.violates(table.features().get(r, col)),
                None => true,
            })
        })
        .collect();
    let mut out = table.select_rows(&keep);
    out.provenance_mut().steps.push("audit_filter".into());
    out.provenance_mut()
        .bump("audit_filtered_rows", (table.num_rows() - keep.len()) as u64);
    out
}

const NN_SAMPLE_CAP: usize = 1000;
const NN_BINS: usize = 10;

/// Euclidean distance from (strided samples of) synthetic rows to their
/// nearest reference row, binned into a histogram.
pub fn nn_distance_histogram(synthetic: &FlowTable, reference: &FlowTable) -> Option<NnHistogram> {
    if synthetic.num_rows() == 0
        || reference.num_rows() == 0
        || synthetic.num_cols() != reference.num_cols()
    {
        return None;
    }
    let stride = |n: usize| (n + NN_SAMPLE_CAP - 1) / NN_SAMPLE_CAP;
    let syn_rows: Vec<usize> = (0..synthetic.num_rows())
        .step_by(stride(synthetic.num_rows()))
        .collect();
    let ref_rows: Vec<usize> = (0..reference.num_rows())
        .step_by(stride(reference.num_rows()))
        .collect();

    let mut distances = Vec::with_capacity(syn_rows.len());
    for &s in &syn_rows {
        let srow = synthetic.features().row(s);
        let mut best = f64::INFINITY;
        for &t in &ref_rows {
            let trow = reference.features().row(t);
            let mut d2 = 0.0;
            for (a, b) in srow.iter().zip(trow) {
                let d = a - b;
                d2 += d * d;
                if d2 >= best {
                    break;
                }
            }
            best = best.min(d2);
        }
        distances.push(best.sqrt());
    }
    let max = distances.iter().copied().fold(0.0f64, f64::max);
    let min = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = distances.iter().sum::<f64>() / distances.len() as f64;
    let width = if max > 0.0 { max / NN_BINS as f64 } else { 1.0 };
    let mut counts = vec![0u64; NN_BINS];
    for d in &distances {
        let bin = ((d / width) as usize).min(NN_BINS - 1);
        counts[bin] += 1;
    }
    Some(NnHistogram {
        bin_edges: (0..=NN_BINS).map(|i| i as f64 * width).collect(),
        counts,
        min,
        mean,
        sampled_rows: distances.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowdata::{Label, Provenance};
    use crate::netcore::Matrix;

    fn table(rows: &[Vec<f64>], names: &[&str]) -> FlowTable {
        FlowTable::new(
            names.iter().map(|s| s.to_string()).collect(),
            Matrix::from_rows(rows),
            vec![Label::Benign; rows.len()],
            Provenance::new("t"),
        )
        .unwrap()
    }

    fn proto_rule() -> RangeRule {
        RangeRule {
            column: "proto".into(),
            min: Some(0.0),
            max: Some(255.0),
        }
    }

    #[test]
    fn out_of_range_protocol_is_flagged() {
        // A protocol byte must stay within [0,255]; 4000 is one violation.
        let t = table(&[vec![4000.0], vec![17.0]], &["proto"]);
        let report = audit_synthetic(&t, &[proto_rule()]);
        assert_eq!(report.rules[0].violations, 1);
        assert_eq!(report.violating_rows, 1);
        assert!((report.violation_ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn in_range_table_has_zero_violations() {
        let t = table(&[vec![6.0], vec![17.0]], &["proto"]);
        let report = audit_synthetic(&t, &[proto_rule()]);
        assert_eq!(report.violating_rows, 0);
        assert_eq!(report.violation_ratio, 0.0);
    }

    #[test]
    fn negative_duration_flagged_by_sign_rule() {
        let rule = RangeRule {
            column: "duration".into(),
            min: Some(0.0),
            max: None,
        };
        let t = table(&[vec![-0.5], vec![3.0]], &["duration"]);
        let report = audit_synthetic(&t, &[rule]);
        assert_eq!(report.rules[0].violations, 1);
    }

    #[test]
    fn empty_rule_set_gives_empty_report() {
        let t = table(&[vec![1.0]], &["a"]);
        let report = audit_synthetic(&t, &[]);
        assert!(report.rules.is_empty());
        assert_eq!(report.violating_rows, 0);
    }

    #[test]
    fn filter_removes_violating_rows_only() {
        let t = table(&[vec![4000.0], vec![17.0], vec![6.0]], &["proto"]);
        let filtered = audit_filter(&t, &[proto_rule()]);
        assert_eq!(filtered.num_rows(), 2);
        assert_eq!(filtered.provenance().count("audit_filtered_rows"), 1);
    }

    #[test]
    fn nn_histogram_sees_exact_overlap_as_zero_distance() {
        let t = table(&[vec![1.0, 2.0], vec![5.0, 5.0]], &["a", "b"]);
        let r = table(&[vec![1.0, 2.0], vec![9.0, 9.0]], &["a", "b"]);
        let h = nn_distance_histogram(&t, &r).unwrap();
        assert_eq!(h.min, 0.0);
        assert!(h.mean > 0.0);
        assert_eq!(h.counts.iter().sum::<u64>(), 2);
    }
}
