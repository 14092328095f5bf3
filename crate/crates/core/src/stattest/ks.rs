use super::SampleGroups;
use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId};
use crate::error::Result;
use crate::numeric::sorted;
use crate::scalar::Scalar;
use crate::special;
use crate::value::TestResult;

/// Largest `n1·n2` for which the exact lattice count is used.
pub const KS_EXACT_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsMethod {
    Asymptotic,
    /// Falls back to the asymptotic series above [`KS_EXACT_LIMIT`]; the
    /// descriptor then names the method actually used.
    Exact,
}

/// Two-sample Kolmogorov–Smirnov test, two-sided.
pub fn ks_2samp<T: Scalar>(s: &SampleGroups<T>, method: KsMethod) -> Result<TestResult<T>> {
    s.require_groups(2)?;
    let x = sorted(s.group(0));
    let y = sorted(s.group(1));
    let (n1, n2) = (x.len(), y.len());
    let d_num = max_gap(&x, &y);
    let d = d_num as f64 / (n1 * n2) as f64;
    let exact = method == KsMethod::Exact && n1 * n2 <= KS_EXACT_LIMIT;
    let (family, p) = if exact {
        (FormulaFamily::Exact, ks_exact_p(n1, n2, d_num))
    } else {
        let en = (n1 * n2) as f64 / (n1 + n2) as f64;
        (FormulaFamily::Asymptotic, special::kolmogorov_sf(en.sqrt() * d))
    };
    let desc = ConventionDescriptor::overall(MetricId::KsTest, family);
    Ok(TestResult::new(T::lit(d), T::lit(p.clamp(0.0, 1.0)), Vec::new(), desc))
}

/// `max |i·n2 − j·n1|` over the pooled ECDF steps (`D·n1·n2` as an integer).
fn max_gap<T: Scalar>(x: &[T], y: &[T]) -> u64 {
    let (n1, n2) = (x.len() as i64, y.len() as i64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0i64;
    while i < x.len() || j < y.len() {
        let v = match (x.get(i), y.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        best = best.max((i as i64 * n2 - j as i64 * n1).abs());
    }
    best as u64
}

/// `P(D >= d_num / (n1·n2))` under the null, by counting monotone lattice
/// paths that stay strictly inside the band `|i·n2 − j·n1| < d_num`.
pub fn ks_exact_p(n1: usize, n2: usize, d_num: u64) -> f64 {
    if d_num == 0 {
        return 1.0;
    }
    let inside = |i: usize, j: usize| ((i * n2) as i64 - (j * n1) as i64).unsigned_abs() < d_num;
    // raw path counts, banded and unrestricted; C(200, 100) fits in f64
    let mut row = vec![0.0f64; n2 + 1];
    let mut all = vec![1.0f64; n2 + 1];
    row[0] = 1.0;
    for j in 1..=n2 {
        row[j] = if inside(0, j) { row[j - 1] } else { 0.0 };
    }
    for i in 1..=n1 {
        row[0] = if inside(i, 0) { row[0] } else { 0.0 };
        for j in 1..=n2 {
            row[j] = if inside(i, j) { row[j] + row[j - 1] } else { 0.0 };
            all[j] += all[j - 1];
        }
    }
    ((all[n2] - row[n2]) / all[n2]).clamp(0.0, 1.0)
}
