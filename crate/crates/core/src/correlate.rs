//! Correlation and dependence measures.

use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId, ParamKey};
use crate::error::{MetricError, Result};
use crate::numeric::{self, total_cmp};
use crate::scalar::{sum, Scalar};
use crate::value::MetricValue;

/// Squared Mahalanobis cutoff used by the Shepherd pruning step: the 0.975
/// quantile of χ²(2), which is `-2 ln 0.025`.
pub const SHEPHERD_CUTOFF: f64 = 7.377_758_908_227_871;

/// Two equal-length variables, optionally with covariates (`n` rows × `m`
/// columns) for partial correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct VariablePair<T> {
    x: Vec<T>,
    y: Vec<T>,
    z: Vec<Vec<T>>,
}

impl<T: Scalar> VariablePair<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(MetricError::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        if x.len() < 3 {
            return Err(MetricError::TooFewSamples { need: 3, got: x.len() });
        }
        if !numeric::all_finite(&x) || !numeric::all_finite(&y) {
            return Err(MetricError::NonFinite);
        }
        Ok(VariablePair { x, y, z: Vec::new() })
    }

    /// Attaches covariate rows; requires `n > m + 2`.
    pub fn with_covariates(mut self, z: Vec<Vec<T>>) -> Result<Self> {
        if z.len() != self.x.len() {
            return Err(MetricError::LengthMismatch {
                left: z.len(),
                right: self.x.len(),
            });
        }
        let m = z.first().map_or(0, Vec::len);
        if z.iter().any(|r| r.len() != m) {
            return Err(MetricError::ShapeMismatch(vec![z.len()], vec![m]));
        }
        if z.iter().flatten().any(|v| !v.is_finite()) {
            return Err(MetricError::NonFinite);
        }
        if self.x.len() <= m + 2 {
            return Err(MetricError::TooFewSamples {
                need: m + 3,
                got: self.x.len(),
            });
        }
        self.z = z;
        Ok(self)
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn n_covariates(&self) -> usize {
        self.z.first().map_or(0, Vec::len)
    }
}

fn unit_bounded<T: Scalar>(v: Option<T>, desc: ConventionDescriptor) -> MetricValue<T> {
    match v {
        Some(v) => MetricValue::bounded(v, -T::one(), T::one(), desc),
        None => MetricValue::undefined(desc),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankLinearKind {
    Pearson,
    Spearman,
    KendallTauA,
    KendallTauB,
}

pub fn rank_linear_corr<T: Scalar>(v: &VariablePair<T>, kind: RankLinearKind) -> MetricValue<T> {
    match kind {
        RankLinearKind::Pearson => unit_bounded(
            numeric::pearson(&v.x, &v.y),
            ConventionDescriptor::overall(MetricId::Pearson, FormulaFamily::Standard),
        ),
        RankLinearKind::Spearman => unit_bounded(
            spearman(&v.x, &v.y),
            ConventionDescriptor::overall(MetricId::Spearman, FormulaFamily::AverageRanks),
        ),
        RankLinearKind::KendallTauA | RankLinearKind::KendallTauB => {
            let c = kendall_counts(&v.x, &v.y);
            let s = c.pairs as f64 - c.ties_x as f64 - c.ties_y as f64 + c.ties_xy as f64
                - 2.0 * c.swaps as f64;
            let (family, tau) = if kind == RankLinearKind::KendallTauA {
                (FormulaFamily::TauA, Some(s / c.pairs as f64))
            } else {
                let den = ((c.pairs - c.ties_x) as f64 * (c.pairs - c.ties_y) as f64).sqrt();
                (FormulaFamily::TauB, (den > 0.0).then(|| s / den))
            };
            unit_bounded(
                tau.map(|t| T::lit(t.clamp(-1.0, 1.0))),
                ConventionDescriptor::overall(MetricId::KendallTau, family),
            )
        }
    }
}

fn spearman<T: Scalar>(x: &[T], y: &[T]) -> Option<T> {
    numeric::pearson(&numeric::average_ranks(x), &numeric::average_ranks(y))
}

/// Pair counts behind Kendall's tau.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KendallCounts {
    /// `n(n-1)/2`.
    pub pairs: u64,
    /// Pairs tied in x.
    pub ties_x: u64,
    /// Pairs tied in y.
    pub ties_y: u64,
    /// Pairs tied in both.
    pub ties_xy: u64,
    /// Discordant pairs among those untied in x.
    pub swaps: u64,
}

fn tied_pairs(run: u64) -> u64 {
    run * run.saturating_sub(1) / 2
}

/// Knight's O(n log n) pair count: sort by (x, y), then count inversions of
/// y with a merge sort.
pub fn kendall_counts<T: Scalar>(x: &[T], y: &[T]) -> KendallCounts {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| total_cmp(&x[a], &x[b]).then(total_cmp(&y[a], &y[b])));

    let mut ties_x = 0;
    let mut ties_xy = 0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && x[idx[j]] == x[idx[i]] {
            j += 1;
        }
        ties_x += tied_pairs((j - i) as u64);
        let mut a = i;
        while a < j {
            let mut b = a + 1;
            while b < j && y[idx[b]] == y[idx[a]] {
                b += 1;
            }
            ties_xy += tied_pairs((b - a) as u64);
            a = b;
        }
        i = j;
    }

    let mut ys: Vec<T> = idx.iter().map(|&k| y[k]).collect();
    let mut buf = ys.clone();
    let swaps = merge_count(&mut ys, &mut buf);

    let ties_y = numeric::tie_groups(y).into_iter().map(|g| tied_pairs(g as u64)).sum();
    KendallCounts {
        pairs: tied_pairs(n as u64),
        ties_x,
        ties_y,
        ties_xy,
        swaps,
    }
}

/// Sorts `v` ascending and returns the number of strict inversions.
fn merge_count<T: Scalar>(v: &mut [T], buf: &mut [T]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (lo, hi) = v.split_at_mut(mid);
    let (blo, bhi) = buf.split_at_mut(mid);
    let mut swaps = merge_count(lo, blo) + merge_count(hi, bhi);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < lo.len() && j < hi.len() {
        if hi[j] < lo[i] {
            swaps += (lo.len() - i) as u64;
            buf[k] = hi[j];
            j += 1;
        } else {
            buf[k] = lo[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + lo.len() - i].copy_from_slice(&lo[i..]);
    k += lo.len() - i;
    buf[k..k + hi.len() - j].copy_from_slice(&hi[j..]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BiweightCenter {
    /// Median centering, unscaled MAD.
    MedianMad,
    /// Mean centering, sample standard deviation.
    MeanSd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RobustKind<T> {
    Biweight { c: T, center: BiweightCenter },
    PercentageBend(T),
    /// Spearman after dropping rank-space Mahalanobis outliers.
    Shepherd,
}

impl<T: Scalar> RobustKind<T> {
    pub fn biweight(c: T) -> Self {
        RobustKind::Biweight {
            c,
            center: BiweightCenter::MedianMad,
        }
    }
}

pub fn robust_corr<T: Scalar>(v: &VariablePair<T>, kind: RobustKind<T>) -> Result<MetricValue<T>> {
    if v.n() < 5 {
        return Err(MetricError::TooFewSamples { need: 5, got: v.n() });
    }
    Ok(match kind {
        RobustKind::Biweight { c, center } => {
            if !(c > T::zero()) {
                return Err(MetricError::InvalidParameter("biweight c must be positive".into()));
            }
            let family = match center {
                BiweightCenter::MedianMad => FormulaFamily::MedianMad,
                BiweightCenter::MeanSd => FormulaFamily::MeanSd,
            };
            let desc = ConventionDescriptor::overall(MetricId::BiweightMidcorrelation, family)
                .with(ParamKey::BiweightC, c.to_f64_lossy());
            let r = biweight_weighted(&v.x, c, center)
                .zip(biweight_weighted(&v.y, c, center))
                .and_then(|(a, b)| cosine(&a, &b));
            unit_bounded(r, desc)
        }
        RobustKind::PercentageBend(beta) => {
            if !(beta > T::zero() && beta < T::one()) {
                return Err(MetricError::InvalidParameter("bend constant must lie in (0, 1)".into()));
            }
            let desc = ConventionDescriptor::overall(MetricId::PercentageBend, FormulaFamily::WilcoxBend)
                .with(ParamKey::Bend, beta.to_f64_lossy());
            let r = bend_scores(&v.x, beta)
                .zip(bend_scores(&v.y, beta))
                .and_then(|(a, b)| cosine(&a, &b));
            unit_bounded(r, desc)
        }
        RobustKind::Shepherd => {
            let desc = ConventionDescriptor::overall(MetricId::Shepherd, FormulaFamily::MahalanobisPruned);
            let (rx, ry) = (numeric::average_ranks(&v.x), numeric::average_ranks(&v.y));
            let keep = mahalanobis_keep(&rx, &ry, T::lit(SHEPHERD_CUTOFF));
            let xs: Vec<T> = keep.iter().map(|&i| v.x[i]).collect();
            let ys: Vec<T> = keep.iter().map(|&i| v.y[i]).collect();
            let r = if xs.len() >= 3 { spearman(&xs, &ys) } else { None };
            unit_bounded(r, desc)
        }
    })
}

/// `Σab / √(Σa² Σb²)`.
fn cosine<T: Scalar>(a: &[T], b: &[T]) -> Option<T> {
    let ab = sum(a.iter().zip(b).map(|(&p, &q)| p * q));
    let aa = sum(a.iter().map(|&p| p * p));
    let bb = sum(b.iter().map(|&q| q * q));
    (aa > T::zero() && bb > T::zero()).then(|| (ab / (aa * bb).sqrt()).max(-T::one()).min(T::one()))
}

/// Centered values times biweight weights `(1 - u²)²·1[|u| < 1]`.
fn biweight_weighted<T: Scalar>(x: &[T], c: T, center: BiweightCenter) -> Option<Vec<T>> {
    let (loc, scale) = match center {
        BiweightCenter::MedianMad => {
            let med = numeric::median(x);
            let dev: Vec<T> = x.iter().map(|&v| (v - med).abs()).collect();
            (med, numeric::median(&dev))
        }
        BiweightCenter::MeanSd => (numeric::mean(x), numeric::sample_variance(x).sqrt()),
    };
    if !(scale > T::zero()) {
        return None;
    }
    Some(
        x.iter()
            .map(|&v| {
                let d = v - loc;
                let u = d / (c * scale);
                if u.abs() < T::one() {
                    let w = T::one() - u * u;
                    d * w * w
                } else {
                    T::zero()
                }
            })
            .collect(),
    )
}

/// Wilcox's percentage-bend scores, clipped to [-1, 1].
fn bend_scores<T: Scalar>(x: &[T], beta: T) -> Option<Vec<T>> {
    let n = x.len();
    let med = numeric::median(x);
    let w = numeric::sorted(&x.iter().map(|&v| (v - med).abs()).collect::<Vec<_>>());
    let m = ((T::one() - beta) * T::from_count(n)).floor().to_usize()?;
    if m == 0 {
        return None;
    }
    let omega = w[m - 1];
    if !(omega > T::zero()) {
        return None;
    }
    let mut lower = 0usize;
    let mut upper = 0usize;
    let mut inner = T::zero();
    for &v in x {
        let psi = (v - med) / omega;
        if psi < -T::one() {
            lower += 1;
        } else if psi > T::one() {
            upper += 1;
        } else {
            inner = inner + v;
        }
    }
    let kept = n - lower - upper;
    if kept == 0 {
        return None;
    }
    let shift = omega * (T::from_count(upper) - T::from_count(lower));
    let pbos = (inner + shift) / T::from_count(kept);
    Some(
        x.iter()
            .map(|&v| ((v - pbos) / omega).max(-T::one()).min(T::one()))
            .collect(),
    )
}

/// Indices whose squared Mahalanobis distance under the classical mean and
/// covariance does not exceed `cutoff`. A degenerate covariance direction is
/// ignored (pseudo-inverse).
fn mahalanobis_keep<T: Scalar>(x: &[T], y: &[T], cutoff: T) -> Vec<usize> {
    let n = x.len();
    let mx = numeric::mean(x);
    let my = numeric::mean(y);
    let den = T::from_count(n - 1);
    let sxx = numeric::sum_sq_dev(x) / den;
    let syy = numeric::sum_sq_dev(y) / den;
    let sxy = sum(x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my))) / den;
    // eigen-decomposition of [[sxx, sxy], [sxy, syy]]
    let half = T::lit(0.5);
    let tr = sxx + syy;
    let disc = ((sxx - syy) * (sxx - syy) * T::lit(0.25) + sxy * sxy).sqrt();
    let l1 = tr * half + disc;
    let l2 = tr * half - disc;
    let (v1, v2) = if sxy.abs() > T::zero() {
        let a = [l1 - syy, sxy];
        let na = (a[0] * a[0] + a[1] * a[1]).sqrt();
        let u = [a[0] / na, a[1] / na];
        (u, [-u[1], u[0]])
    } else if sxx >= syy {
        ([T::one(), T::zero()], [T::zero(), T::one()])
    } else {
        ([T::zero(), T::one()], [T::one(), T::zero()])
    };
    let tiny = T::lit(1e-12) * l1.max(T::min_positive_value());
    let comps: Vec<([T; 2], T)> = [(v1, l1), (v2, l2)]
        .into_iter()
        .filter(|&(_, l)| l > tiny)
        .collect();
    (0..n)
        .filter(|&i| {
            let d = [x[i] - mx, y[i] - my];
            let d2 = sum(comps.iter().map(|(v, l)| {
                let p = v[0] * d[0] + v[1] * d[1];
                p * p / *l
            }));
            d2 <= cutoff
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DependenceKind {
    /// Equal-width 2-D histogram; `None` selects `⌈√n⌉` bins.
    MutualInformation(Option<usize>),
    DistanceCorrelation,
}

pub fn dependence<T: Scalar>(v: &VariablePair<T>, kind: DependenceKind) -> Result<MetricValue<T>> {
    match kind {
        DependenceKind::MutualInformation(bins) => mutual_information(v, bins),
        DependenceKind::DistanceCorrelation => Ok(distance_correlation(v)),
    }
}

/// Default MI bin count `⌈√n⌉`.
pub fn default_bins(n: usize) -> usize {
    let mut b = (n as f64).sqrt().ceil() as usize;
    while b * b < n {
        b += 1;
    }
    while b > 1 && (b - 1) * (b - 1) >= n {
        b -= 1;
    }
    b
}

fn bin_index<T: Scalar>(v: T, lo: T, width: T, bins: usize) -> usize {
    if width <= T::zero() {
        return 0;
    }
    ((v - lo) / width).floor().to_usize().unwrap_or(0).min(bins - 1)
}

fn mutual_information<T: Scalar>(v: &VariablePair<T>, bins: Option<usize>) -> Result<MetricValue<T>> {
    let mut desc = ConventionDescriptor::overall(MetricId::MutualInformation, FormulaFamily::EqualWidthHistogram);
    if let Some(b) = bins {
        desc = desc.with(ParamKey::Bins, b);
    }
    let b = bins.unwrap_or_else(|| default_bins(v.n()));
    if b < 2 {
        return Err(MetricError::InvalidParameter("mutual information needs at least 2 bins".into()));
    }
    let edges = |xs: &[T]| {
        let lo = xs.iter().copied().fold(T::infinity(), T::min);
        let hi = xs.iter().copied().fold(T::neg_infinity(), T::max);
        (lo, (hi - lo) / T::from_count(b))
    };
    let (xl, xw) = edges(&v.x);
    let (yl, yw) = edges(&v.y);
    let mut joint = vec![0usize; b * b];
    for (&a, &c) in v.x.iter().zip(&v.y) {
        joint[bin_index(a, xl, xw, b) * b + bin_index(c, yl, yw, b)] += 1;
    }
    if joint.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(MetricError::Domain("degenerate histogram: a single occupied bin".into()));
    }
    let mut px = vec![0usize; b];
    let mut py = vec![0usize; b];
    for i in 0..b {
        for j in 0..b {
            px[i] += joint[i * b + j];
            py[j] += joint[i * b + j];
        }
    }
    let n = T::from_count(v.n());
    let mut mi = T::zero();
    for i in 0..b {
        for j in 0..b {
            let c = joint[i * b + j];
            if c > 0 {
                let pij = T::from_count(c) / n;
                let ratio = T::from_count(c) * n / (T::from_count(px[i]) * T::from_count(py[j]));
                mi = mi + pij * ratio.ln();
            }
        }
    }
    Ok(MetricValue::bounded(mi.max(T::zero()), T::zero(), T::infinity(), desc))
}

/// Double-centred distance sums via `ΣA·B = Σab − 2nΣā_i b̄_i + n² ā b̄`,
/// which gives `n²·dCov²` without materialising the centred matrices.
fn dcov_sum<T: Scalar>(x: &[T], y: &[T]) -> T {
    let n = x.len();
    let mut row_a = vec![T::zero(); n];
    let mut row_b = vec![T::zero(); n];
    let mut ab = T::zero();
    for i in 0..n {
        for j in 0..n {
            let a = (x[i] - x[j]).abs();
            let b = (y[i] - y[j]).abs();
            row_a[i] = row_a[i] + a;
            row_b[i] = row_b[i] + b;
            ab = ab + a * b;
        }
    }
    let nn = T::from_count(n);
    let ga = sum(row_a.iter().copied()) / (nn * nn);
    let gb = sum(row_b.iter().copied()) / (nn * nn);
    let cross = sum(row_a.iter().zip(&row_b).map(|(&a, &b)| (a / nn) * (b / nn)));
    ab - T::lit(2.0) * nn * cross + nn * nn * ga * gb
}

fn distance_correlation<T: Scalar>(v: &VariablePair<T>) -> MetricValue<T> {
    let desc = ConventionDescriptor::overall(MetricId::DistanceCorrelation, FormulaFamily::DoubleCentered);
    let vxy = dcov_sum(&v.x, &v.y).max(T::zero());
    let vxx = dcov_sum(&v.x, &v.x);
    let vyy = dcov_sum(&v.y, &v.y);
    let den = (vxx * vyy).sqrt();
    if !(den > T::zero()) {
        return MetricValue::undefined(desc);
    }
    let r = (vxy / den).sqrt().min(T::one());
    MetricValue::bounded(r, T::zero(), T::one(), desc)
}

/// Pearson correlation of the least-squares residuals of x and y on the
/// covariates (with intercept).
pub fn partial_corr<T: Scalar>(v: &VariablePair<T>) -> Result<MetricValue<T>> {
    let desc = ConventionDescriptor::overall(MetricId::PartialCorrelation, FormulaFamily::ResidualPearson);
    let n = v.n();
    let mut basis: Vec<Vec<T>> = Vec::new();
    let columns = std::iter::once(vec![T::one(); n])
        .chain((0..v.n_covariates()).map(|j| v.z.iter().map(|r| r[j]).collect()));
    for mut col in columns {
        let norm0 = sum(col.iter().map(|&c| c * c)).sqrt();
        for q in &basis {
            project_out(&mut col, q);
        }
        let norm = sum(col.iter().map(|&c| c * c)).sqrt();
        if !(norm > T::lit(1e-10) * norm0) {
            return Err(MetricError::Singular("covariate matrix is rank deficient".into()));
        }
        col.iter_mut().for_each(|c| *c = *c / norm);
        basis.push(col);
    }
    let resid = |src: &[T]| {
        let mut r = src.to_vec();
        for q in &basis {
            project_out(&mut r, q);
        }
        r
    };
    let rx = resid(&v.x);
    let ry = resid(&v.y);
    Ok(unit_bounded(cosine(&rx, &ry), desc))
}

fn project_out<T: Scalar>(v: &mut [T], unit: &[T]) {
    let dot = sum(v.iter().zip(unit).map(|(&a, &b)| a * b));
    for (a, &b) in v.iter_mut().zip(unit) {
        *a = *a - dot * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vp(x: &[f64], y: &[f64]) -> VariablePair<f64> {
        VariablePair::new(x.to_vec(), y.to_vec()).unwrap()
    }

    const KINDS: [RankLinearKind; 4] = [
        RankLinearKind::Pearson,
        RankLinearKind::Spearman,
        RankLinearKind::KendallTauA,
        RankLinearKind::KendallTauB,
    ];

    #[test]
    fn identity_and_reversal() {
        let x: Vec<f64> = (1..=8).map(|v| (v as f64).powi(2)).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        for k in KINDS {
            assert_relative_eq!(rank_linear_corr(&vp(&x, &x), k).unwrap_scalar(), 1.0, epsilon = 1e-14);
            assert_relative_eq!(rank_linear_corr(&vp(&x, &neg), k).unwrap_scalar(), -1.0, epsilon = 1e-14);
        }
        for k in [RobustKind::biweight(9.0), RobustKind::PercentageBend(0.2), RobustKind::Shepherd] {
            assert_relative_eq!(robust_corr(&vp(&x, &x), k).unwrap().unwrap_scalar(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(robust_corr(&vp(&x, &neg), k).unwrap().unwrap_scalar(), -1.0, epsilon = 1e-12);
        }
        let v = vp(&x, &x);
        assert_relative_eq!(dependence(&v, DependenceKind::DistanceCorrelation).unwrap().unwrap_scalar(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kendall_tie_variants() {
        let v = vp(&[1.0, 2.0, 3.0, 4.0], &[1.0, 1.0, 2.0, 2.0]);
        assert_relative_eq!(rank_linear_corr(&v, RankLinearKind::KendallTauA).unwrap_scalar(), 4.0 / 6.0, epsilon = 1e-15);
        assert_relative_eq!(rank_linear_corr(&v, RankLinearKind::KendallTauB).unwrap_scalar(), 4.0 / 24f64.sqrt(), epsilon = 1e-15);
        let c = kendall_counts(&[1.0, 1.0, 2.0, 2.0, 3.0], &[1.0, 1.0, 1.0, 3.0, 2.0]);
        assert_eq!(c.pairs, 10);
        assert_eq!(c.ties_x, 2);
        assert_eq!(c.ties_y, 3);
        assert_eq!(c.ties_xy, 1);
    }

    #[test]
    fn constant_inputs() {
        let v = vp(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]);
        assert!(rank_linear_corr(&v, RankLinearKind::Pearson).as_scalar().is_none());
        assert!(rank_linear_corr(&v, RankLinearKind::Spearman).as_scalar().is_none());
        assert!(rank_linear_corr(&v, RankLinearKind::KendallTauB).as_scalar().is_none());
        assert_eq!(rank_linear_corr(&v, RankLinearKind::KendallTauA).unwrap_scalar(), 0.0);
        let v5 = vp(&[1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 1.0, 1.0, 1.0, 9.0]);
        assert!(robust_corr(&v5, RobustKind::biweight(9.0)).unwrap().as_scalar().is_none());
        assert!(robust_corr(&vp(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]), RobustKind::Shepherd).is_err());
    }

    #[test]
    fn outlier_resistance() {
        let x: Vec<f64> = (1..=20).map(f64::from).collect();
        let mut y = x.clone();
        y[19] = -100.0;
        let v = vp(&x, &y);
        let pearson = rank_linear_corr(&v, RankLinearKind::Pearson).unwrap_scalar();
        for k in [RobustKind::biweight(9.0), RobustKind::PercentageBend(0.2), RobustKind::Shepherd] {
            let r = robust_corr(&v, k).unwrap().unwrap_scalar();
            assert!((r - 1.0).abs() < (pearson - 1.0).abs(), "{k:?}: {r} vs {pearson}");
        }
        // the outlier is pruned, so the remaining points are perfectly monotone
        assert_relative_eq!(robust_corr(&v, RobustKind::Shepherd).unwrap().unwrap_scalar(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mutual_information_cases() {
        // product-form joint histogram over a 2x2 grid
        let x = [0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0];
        let y = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        let v = vp(&x, &y);
        assert_relative_eq!(
            dependence(&v, DependenceKind::MutualInformation(Some(2))).unwrap().unwrap_scalar(),
            0.0,
            epsilon = 1e-15
        );
        // perfectly dependent two-level variable: MI = ln 2
        let v = vp(&x, &x);
        assert_relative_eq!(
            dependence(&v, DependenceKind::MutualInformation(Some(2))).unwrap().unwrap_scalar(),
            2f64.ln(),
            epsilon = 1e-15
        );
        let c = vp(&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0]);
        assert!(dependence(&c, DependenceKind::MutualInformation(None)).is_err());
        assert!(dependence(&v, DependenceKind::MutualInformation(Some(1))).is_err());
        assert_eq!(default_bins(10), 4);
        assert_eq!(default_bins(16), 4);
        assert_eq!(default_bins(17), 5);
    }

    #[test]
    fn partial_correlation_identities() {
        let x = [1.0, 3.0, 2.0, 5.0, 4.0, 7.0];
        let y = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0];
        let z = [1.0, 2.0, 2.0, 4.0, 3.0, 6.0];
        let v = vp(&x, &y);
        let p0 = partial_corr(&v).unwrap().unwrap_scalar();
        assert_relative_eq!(p0, numeric::pearson(&x, &y).unwrap(), epsilon = 1e-14);

        let vz = v.clone().with_covariates(z.iter().map(|&c| vec![c]).collect()).unwrap();
        let rxy = numeric::pearson(&x, &y).unwrap();
        let rxz = numeric::pearson(&x, &z).unwrap();
        let ryz = numeric::pearson(&y, &z).unwrap();
        let closed = (rxy - rxz * ryz) / ((1.0 - rxz * rxz) * (1.0 - ryz * ryz)).sqrt();
        assert_relative_eq!(partial_corr(&vz).unwrap().unwrap_scalar(), closed, epsilon = 1e-12);

        let dup = v.clone().with_covariates(x.iter().map(|&c| vec![c, 2.0 * c]).collect()).unwrap();
        assert!(matches!(partial_corr(&dup), Err(MetricError::Singular(_))));
        assert!(v.with_covariates(vec![vec![1.0, 2.0, 3.0, 4.0]; 6]).is_err());
    }

    #[test]
    fn partial_with_orthogonal_covariate() {
        // x, y have r = 0.5 and are both uncorrelated with z
        let x = [1.0, -1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0];
        let y = [1.0, -1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0];
        let z = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0];
        let v = vp(&x, &y);
        assert_relative_eq!(numeric::pearson(&x, &y).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(numeric::pearson(&x, &z).unwrap(), 0.0, epsilon = 1e-15);
        let vz = v.with_covariates(z.iter().map(|&c| vec![c]).collect()).unwrap();
        assert_relative_eq!(partial_corr(&vz).unwrap().unwrap_scalar(), 0.5, epsilon = 1e-14);
    }
}
