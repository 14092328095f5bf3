use super::{overlap_counts, Mask};
use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::value::MetricValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartitionKind {
    /// `1 − F` of pair-counting precision and recall.
    AdaptedRandError,
    AdjustedRandIndex,
    /// `H(P|R) + H(R|P)` in nats.
    VariationOfInformation,
}

fn pairs(n: u64) -> f64 {
    (n as f64) * (n.saturating_sub(1) as f64) / 2.0
}

fn entropy(counts: &[u64], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Compares the foreground/background partitions of two masks.
pub fn partition_metrics<T: Scalar>(pred: &Mask<T>, reference: &Mask<T>, kind: PartitionKind) -> Result<MetricValue<T>> {
    let c = overlap_counts(pred, reference)?;
    let metric = match kind {
        PartitionKind::AdaptedRandError => MetricId::AdaptedRandError,
        PartitionKind::AdjustedRandIndex => MetricId::AdjustedRandIndex,
        PartitionKind::VariationOfInformation => MetricId::VariationOfInformation,
    };
    let desc = ConventionDescriptor::overall(metric, FormulaFamily::Standard);
    // rows: pred fg / bg; columns: reference fg / bg
    let cells = [c.tp, c.fp, c.fn_, c.tn];
    let rows = [c.tp + c.fp, c.fn_ + c.tn];
    let cols = [c.tp + c.fn_, c.fp + c.tn];
    let n = c.total();
    let same_both: f64 = cells.iter().map(|&x| pairs(x)).sum();
    let same_pred: f64 = rows.iter().map(|&x| pairs(x)).sum();
    let same_ref: f64 = cols.iter().map(|&x| pairs(x)).sum();

    let v = match kind {
        PartitionKind::AdaptedRandError => {
            if same_pred == 0.0 || same_ref == 0.0 {
                return Ok(MetricValue::undefined(desc));
            }
            let (p, r) = (same_both / same_pred, same_both / same_ref);
            let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
            1.0 - f
        }
        PartitionKind::AdjustedRandIndex => {
            let expected = same_pred * same_ref / pairs(n).max(1.0);
            let max = (same_pred + same_ref) / 2.0;
            if max == expected {
                // only reachable when both partitions coincide
                1.0
            } else {
                (same_both - expected) / (max - expected)
            }
        }
        PartitionKind::VariationOfInformation => {
            let nf = n as f64;
            (2.0 * entropy(&cells, nf) - entropy(&rows, nf) - entropy(&cols, nf)).max(0.0)
        }
    };
    Ok(MetricValue::scalar(T::lit(v), desc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mask(shape: &[usize], on: &[Vec<usize>]) -> Mask<f64> {
        Mask::from_indices(shape, on).unwrap()
    }

    fn all(p: &Mask<f64>, r: &Mask<f64>) -> [f64; 3] {
        [
            PartitionKind::AdaptedRandError,
            PartitionKind::AdjustedRandIndex,
            PartitionKind::VariationOfInformation,
        ]
        .map(|k| partition_metrics(p, r, k).unwrap().unwrap_scalar())
    }

    #[test]
    fn identical() {
        let m = mask(&[3, 3], &[vec![0, 0], vec![1, 2]]);
        assert_eq!(all(&m, &m), [0.0, 1.0, 0.0]);
        let full = Mask::<f64>::new(&[2, 2], vec![true; 4]).unwrap();
        assert_eq!(all(&full, &full), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn four_voxel_case() {
        let p = Mask::<f64>::new(&[2, 2], vec![true; 4]).unwrap();
        let r = mask(&[2, 2], &[vec![0, 0], vec![0, 1]]);
        let [are, ari, voi] = all(&p, &r);
        // same-segment pairs: both 2, pred 6, reference 2
        assert_relative_eq!(are, 0.5, epsilon = 1e-15);
        // expected = 6·2/6 = 2 = index
        assert_relative_eq!(ari, 0.0, epsilon = 1e-15);
        assert_relative_eq!(voi, 2f64.ln(), epsilon = 1e-15);
    }
}
