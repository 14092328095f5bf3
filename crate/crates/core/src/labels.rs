//! Label sets, label vectors and the confusion matrix.

use crate::error::{MetricError, Result};
use crate::scalar::Scalar;

/// Declared, ordered set of class identifiers. Never inferred from the
/// order in which labels happen to appear in data.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelSet {
    labels: Vec<u32>,
}

impl LabelSet {
    /// Sorts and deduplicates; requires at least two classes.
    pub fn new(labels: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut labels: Vec<u32> = labels.into_iter().collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() < 2 {
            return Err(MetricError::TooFewClasses(labels.len()));
        }
        Ok(LabelSet { labels })
    }

    /// `{0, 1, ..., k-1}`.
    pub fn range(k: u32) -> Result<Self> {
        Self::new(0..k)
    }

    pub fn binary() -> Self {
        LabelSet { labels: vec![0, 1] }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn index_of(&self, label: u32) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn contains(&self, label: u32) -> bool {
        self.index_of(label).is_some()
    }
}

/// Class labels for `n >= 1` observations, validated against a label set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    values: Vec<u32>,
}

impl LabelVector {
    pub fn new(values: Vec<u32>, labels: &LabelSet) -> Result<Self> {
        if values.is_empty() {
            return Err(MetricError::TooFewSamples { need: 1, got: 0 });
        }
        if let Some(&bad) = values.iter().find(|&&v| !labels.contains(v)) {
            return Err(MetricError::LabelOutsideSet(bad));
        }
        Ok(LabelVector { values })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Real-valued scores, optionally constrained to probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> ScoreVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(MetricError::NonFinite);
        }
        Ok(ScoreVector { values })
    }

    pub fn probabilities(values: Vec<T>) -> Result<Self> {
        let s = Self::new(values)?;
        if s.values.iter().any(|&v| v < T::zero() || v > T::one()) {
            return Err(MetricError::Domain("probability outside [0, 1]".into()));
        }
        Ok(s)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// K×K count table; rows are true classes, columns predicted classes, both
/// indexed in label-set order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    labels: LabelSet,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    /// Tallies `y_true` against `y_pred`.
    pub fn from_labels(y_true: &[u32], y_pred: &[u32], labels: &LabelSet) -> Result<Self> {
        if y_true.len() != y_pred.len() {
            return Err(MetricError::LengthMismatch {
                left: y_true.len(),
                right: y_pred.len(),
            });
        }
        let k = labels.len();
        let mut counts = vec![0u64; k * k];
        for (&t, &p) in y_true.iter().zip(y_pred) {
            let i = labels.index_of(t).ok_or(MetricError::LabelOutsideSet(t))?;
            let j = labels.index_of(p).ok_or(MetricError::LabelOutsideSet(p))?;
            counts[i * k + j] += 1;
        }
        Ok(ConfusionMatrix {
            labels: labels.clone(),
            counts,
        })
    }

    /// Builds directly from a row-major table whose classes are `0..K`.
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let k = rows.len();
        let labels = LabelSet::range(k as u32)?;
        if let Some(bad) = rows.iter().find(|r| r.len() != k) {
            return Err(MetricError::LengthMismatch {
                left: bad.len(),
                right: k,
            });
        }
        Ok(ConfusionMatrix {
            labels,
            counts: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, true_idx: usize, pred_idx: usize) -> u64 {
        self.counts[true_idx * self.n_classes() + pred_idx]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts
            .chunks(self.n_classes())
            .map(<[u64]>::to_vec)
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.get(i, i)).sum()
    }

    /// Number of observations whose true class is index `i` (support).
    pub fn row_sum(&self, i: usize) -> u64 {
        (0..self.n_classes()).map(|j| self.get(i, j)).sum()
    }

    /// Number of observations predicted as index `j`.
    pub fn col_sum(&self, j: usize) -> u64 {
        (0..self.n_classes()).map(|i| self.get(i, j)).sum()
    }

    /// One-vs-rest counts for class index `k`.
    pub fn one_vs_rest(&self, k: usize) -> BinaryCounts {
        let tp = self.get(k, k);
        let fn_ = self.row_sum(k) - tp;
        let fp = self.col_sum(k) - tp;
        let tn = self.total() - tp - fn_ - fp;
        BinaryCounts { tp, fp, fn_, tn }
    }

    /// Applies a class permutation: new index `perm[i]` receives old index `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let k = self.n_classes();
        assert_eq!(perm.len(), k);
        let mut counts = vec![0u64; k * k];
        for i in 0..k {
            for j in 0..k {
                counts[perm[i] * k + perm[j]] = self.get(i, j);
            }
        }
        ConfusionMatrix {
            labels: self.labels.clone(),
            counts,
        }
    }
}

/// TP/FP/FN/TN for one positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}
