//! Small numeric helpers shared across metric modules.

use std::cmp::Ordering;

use crate::scalar::Scalar;

pub fn mean<T: Scalar>(xs: &[T]) -> T {
    crate::scalar::sum(xs.iter().copied()) / T::from_count(xs.len())
}

/// Sum of squared deviations from the mean.
pub fn sum_sq_dev<T: Scalar>(xs: &[T]) -> T {
    let m = mean(xs);
    crate::scalar::sum(xs.iter().map(|&x| (x - m) * (x - m)))
}

/// Variance with divisor `n`.
pub fn population_variance<T: Scalar>(xs: &[T]) -> T {
    sum_sq_dev(xs) / T::from_count(xs.len())
}

/// Variance with divisor `n - 1`.
pub fn sample_variance<T: Scalar>(xs: &[T]) -> T {
    sum_sq_dev(xs) / T::from_count(xs.len() - 1)
}

pub(crate) fn total_cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

pub fn sorted<T: Scalar>(xs: &[T]) -> Vec<T> {
    let mut v = xs.to_vec();
    v.sort_by(total_cmp);
    v
}

/// Median; mean of the two middle values for even `n`.
pub fn median<T: Scalar>(xs: &[T]) -> T {
    let v = sorted(xs);
    median_of_sorted(&v)
}

pub fn median_of_sorted<T: Scalar>(v: &[T]) -> T {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0)
    }
}

/// Linear-interpolation percentile (`q` in [0, 100]) of sorted data.
pub fn percentile_of_sorted<T: Scalar>(v: &[T], q: T) -> T {
    let n = v.len();
    if n == 1 {
        return v[0];
    }
    let pos = q / T::lit(100.0) * T::from_count(n - 1);
    let lo = pos.floor();
    let lo_i = lo.to_usize().unwrap_or(0).min(n - 1);
    let hi_i = (lo_i + 1).min(n - 1);
    let frac = pos - lo;
    v[lo_i] + (v[hi_i] - v[lo_i]) * frac
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks<T: Scalar>(xs: &[T]) -> Vec<T> {
    let n = xs.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| total_cmp(&xs[a], &xs[b]));
    let mut ranks = vec![T::zero(); n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && xs[idx[j]] == xs[idx[i]] {
            j += 1;
        }
        // positions i..j share ranks i+1..=j
        let r = T::from_count(i + 1 + j) / T::lit(2.0);
        for &k in &idx[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

/// Sizes of the groups of tied values.
pub fn tie_groups<T: Scalar>(xs: &[T]) -> Vec<usize> {
    let v = sorted(xs);
    let mut groups = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i + 1;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        groups.push(j - i);
        i = j;
    }
    groups
}

/// Sample Pearson correlation; `None` when either input has zero variance.
pub fn pearson<T: Scalar>(x: &[T], y: &[T]) -> Option<T> {
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return None;
    }
    let r = sxy / (sxx * syy).sqrt();
    Some(r.max(-T::one()).min(T::one()))
}

pub fn all_finite<T: Scalar>(xs: &[T]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

/// Rounds to two decimals with ties to even, on the exact binary value.
pub fn display_2dp(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // std's fixed-precision formatting rounds the exact binary expansion,
    // resolving exact ties to even.
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}
