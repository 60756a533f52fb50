//! Accuracy, macro/micro F1 and Cohen's kappa from a confusion matrix.
//!
//! A per-class F1 whose precision and recall are both undefined (the class
//! never occurs and is never predicted) counts as 0 and still enters the
//! macro mean, which averages over every declared class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts indexed `[true class][predicted class]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    n_classes: usize,
    counts: Vec<u64>,
    n: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub micro_f1: f64,
    pub kappa: f64,
    pub per_class_f1: Vec<f64>,
}

pub fn confusion_matrix(
    preds: &[usize],
    labels: &[usize],
    n_classes: usize,
) -> Result<ConfusionMatrix> {
    if preds.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "predictions",
            expected: labels.len(),
            got: preds.len(),
        });
    }
    let mut counts = vec![0u64; n_classes * n_classes];
    for (&p, &t) in preds.iter().zip(labels) {
        for c in [p, t] {
            if c >= n_classes {
                return Err(Error::IndexOutOfRange {
                    index: c,
                    len: n_classes,
                });
            }
        }
        counts[t * n_classes + p] += 1;
    }
    Ok(ConfusionMatrix {
        n_classes,
        counts,
        n: preds.len() as u64,
    })
}

/// Divides, treating `0/0` as 0.
fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn total(&self) -> u64 {
        self.n
    }

    pub fn get(&self, truth: usize, pred: usize) -> u64 {
        self.counts[truth * self.n_classes + pred]
    }

    /// Rows as nested vectors, `[true][pred]`.
    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.counts
            .chunks(self.n_classes.max(1))
            .map(<[u64]>::to_vec)
            .collect()
    }

    fn row_sum(&self, c: usize) -> u64 {
        (0..self.n_classes).map(|p| self.get(c, p)).sum()
    }

    fn col_sum(&self, c: usize) -> u64 {
        (0..self.n_classes).map(|t| self.get(t, c)).sum()
    }

    /// All four metrics. Errors on an empty matrix; kappa is 0 when chance
    /// agreement is already 1.
    pub fn report(&self) -> Result<MetricsReport> {
        if self.n == 0 {
            return Err(Error::EmptyDataset("confusion matrix"));
        }
        let n = self.n as f64;
        let trace: u64 = (0..self.n_classes).map(|c| self.get(c, c)).sum();

        let mut per_class_f1 = Vec::with_capacity(self.n_classes);
        let (mut tp_all, mut fp_all, mut fn_all) = (0.0, 0.0, 0.0);
        let mut chance = 0.0;
        for c in 0..self.n_classes {
            let tp = self.get(c, c) as f64;
            let (row, col) = (self.row_sum(c) as f64, self.col_sum(c) as f64);
            let (fp, fneg) = (col - tp, row - tp);
            let precision = ratio(tp, tp + fp);
            let recall = ratio(tp, tp + fneg);
            per_class_f1.push(ratio(2.0 * precision * recall, precision + recall));
            tp_all += tp;
            fp_all += fp;
            fn_all += fneg;
            chance += (row / n) * (col / n);
        }

        let accuracy = trace as f64 / n;
        let macro_f1 = if self.n_classes == 0 {
            0.0
        } else {
            per_class_f1.iter().sum::<f64>() / self.n_classes as f64
        };
        // pooled counts; 2tp / (2tp + fp + fn) rather than 2PR / (P + R)
        let micro_f1 = ratio(2.0 * tp_all, 2.0 * tp_all + fp_all + fn_all);
        let kappa = if chance >= 1.0 {
            0.0
        } else {
            (accuracy - chance) / (1.0 - chance)
        };
        Ok(MetricsReport {
            accuracy,
            macro_f1,
            micro_f1,
            kappa,
            per_class_f1,
        })
    }
}

/// Same as [`ConfusionMatrix::report`].
pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    cm.report()
}
