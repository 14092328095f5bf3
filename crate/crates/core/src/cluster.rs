//! Internal clustering validity indices.

use rayon::prelude::*;

use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId};
use crate::error::{MetricError, Result};
use crate::scalar::{sum, Scalar};
use crate::value::MetricValue;

/// Feature rows, cluster assignments and optional reference centers.
///
/// Clusters are indexed in ascending label order; `centers`, when given,
/// must follow the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredData<T> {
    x: Vec<Vec<T>>,
    assign: Vec<usize>,
    cluster_labels: Vec<u32>,
    centers: Option<Vec<Vec<T>>>,
}

impl<T: Scalar> ClusteredData<T> {
    pub fn new(x: Vec<Vec<T>>, labels: &[u32], centers: Option<Vec<Vec<T>>>) -> Result<Self> {
        if x.len() != labels.len() {
            return Err(MetricError::LengthMismatch {
                left: x.len(),
                right: labels.len(),
            });
        }
        if x.is_empty() {
            return Err(MetricError::TooFewSamples { need: 1, got: 0 });
        }
        let d = x[0].len();
        if d == 0 {
            return Err(MetricError::InvalidParameter("feature dimension must be >= 1".into()));
        }
        if let Some(row) = x.iter().find(|r| r.len() != d) {
            return Err(MetricError::ShapeMismatch(vec![row.len()], vec![d]));
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(MetricError::NonFinite);
        }
        let mut cluster_labels = labels.to_vec();
        cluster_labels.sort_unstable();
        cluster_labels.dedup();
        let assign = labels
            .iter()
            .map(|l| cluster_labels.binary_search(l).expect("label present"))
            .collect();
        if let Some(c) = &centers {
            if c.len() != cluster_labels.len() || c.iter().any(|r| r.len() != d) {
                return Err(MetricError::ShapeMismatch(
                    vec![c.len(), c.first().map_or(0, Vec::len)],
                    vec![cluster_labels.len(), d],
                ));
            }
            if c.iter().flatten().any(|v| !v.is_finite()) {
                return Err(MetricError::NonFinite);
            }
        }
        Ok(ClusteredData {
            x,
            assign,
            cluster_labels,
            centers,
        })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn k(&self) -> usize {
        self.cluster_labels.len()
    }

    pub fn cluster_labels(&self) -> &[u32] {
        &self.cluster_labels
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.x
    }

    pub fn centers(&self) -> Option<&[Vec<T>]> {
        self.centers.as_deref()
    }

    fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k()];
        for &a in &self.assign {
            s[a] += 1;
        }
        s
    }

    /// Per-cluster arithmetic means.
    pub fn centroids(&self) -> Vec<Vec<T>> {
        let d = self.dim();
        let mut c = vec![vec![T::zero(); d]; self.k()];
        for (row, &a) in self.x.iter().zip(&self.assign) {
            for (acc, &v) in c[a].iter_mut().zip(row) {
                *acc = *acc + v;
            }
        }
        for (ci, &sz) in c.iter_mut().zip(&self.sizes()) {
            let n = T::from_count(sz);
            for v in ci.iter_mut() {
                *v = *v / n;
            }
        }
        c
    }

    fn require_multi(&self) -> Result<()> {
        if self.k() < 2 {
            return Err(MetricError::TooFewClasses(self.k()));
        }
        if self.n() <= self.k() {
            return Err(MetricError::TooFewSamples {
                need: self.k() + 1,
                got: self.n(),
            });
        }
        Ok(())
    }
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    sum(a.iter().zip(b).map(|(&p, &q)| (p - q) * (p - q)))
}

fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    sq_dist(a, b).sqrt()
}

fn standard(metric: MetricId) -> ConventionDescriptor {
    ConventionDescriptor::overall(metric, FormulaFamily::Standard)
}

/// Mean silhouette width with Euclidean distance; points in singleton
/// clusters contribute 0.
pub fn silhouette<T: Scalar>(c: &ClusteredData<T>) -> Result<MetricValue<T>> {
    c.require_multi()?;
    let k = c.k();
    let sizes = c.sizes();
    let s: Vec<T> = (0..c.n())
        .into_par_iter()
        .map(|i| {
            let own = c.assign[i];
            if sizes[own] == 1 {
                return T::zero();
            }
            let mut totals = vec![T::zero(); k];
            for (j, row) in c.x.iter().enumerate() {
                if j != i {
                    totals[c.assign[j]] = totals[c.assign[j]] + dist(&c.x[i], row);
                }
            }
            let a = totals[own] / T::from_count(sizes[own] - 1);
            let b = (0..k)
                .filter(|&l| l != own)
                .map(|l| totals[l] / T::from_count(sizes[l]))
                .fold(T::infinity(), T::min);
            let m = a.max(b);
            if m > T::zero() {
                (b - a) / m
            } else {
                T::zero()
            }
        })
        .collect();
    let v = sum(s) / T::from_count(c.n());
    Ok(MetricValue::bounded(v, -T::one(), T::one(), standard(MetricId::Silhouette)))
}

pub fn davies_bouldin<T: Scalar>(c: &ClusteredData<T>) -> Result<MetricValue<T>> {
    c.require_multi()?;
    let desc = standard(MetricId::DaviesBouldin);
    let cent = c.centroids();
    let sizes = c.sizes();
    let mut scatter = vec![T::zero(); c.k()];
    for (row, &a) in c.x.iter().zip(&c.assign) {
        scatter[a] = scatter[a] + dist(row, &cent[a]);
    }
    for (s, &n) in scatter.iter_mut().zip(&sizes) {
        *s = *s / T::from_count(n);
    }
    let mut total = T::zero();
    for i in 0..c.k() {
        let mut worst = T::neg_infinity();
        for j in (0..c.k()).filter(|&j| j != i) {
            let sep = dist(&cent[i], &cent[j]);
            if sep <= T::zero() {
                return Ok(MetricValue::undefined(desc));
            }
            worst = worst.max((scatter[i] + scatter[j]) / sep);
        }
        total = total + worst;
    }
    Ok(MetricValue::scalar(total / T::from_count(c.k()), desc))
}

/// Variance-ratio index; Undefined when the within-cluster dispersion is 0.
pub fn calinski_harabasz<T: Scalar>(c: &ClusteredData<T>) -> Result<MetricValue<T>> {
    c.require_multi()?;
    let desc = standard(MetricId::CalinskiHarabasz);
    let cent = c.centroids();
    let sizes = c.sizes();
    let d = c.dim();
    let overall: Vec<T> = (0..d)
        .map(|j| sum(c.x.iter().map(|r| r[j])) / T::from_count(c.n()))
        .collect();
    let bgss = sum(
        cent.iter()
            .zip(&sizes)
            .map(|(ci, &n)| T::from_count(n) * sq_dist(ci, &overall)),
    );
    let wgss = sum(c.x.iter().zip(&c.assign).map(|(r, &a)| sq_dist(r, &cent[a])));
    if wgss <= T::zero() {
        return Ok(MetricValue::undefined(desc));
    }
    let v = (bgss / T::from_count(c.k() - 1)) / (wgss / T::from_count(c.n() - c.k()));
    Ok(MetricValue::scalar(v, desc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WcssVariant {
    RecomputedMeans,
    ProvidedCenters,
}

/// Within-cluster sum of squared Euclidean distances to the chosen centers.
pub fn wcss<T: Scalar>(c: &ClusteredData<T>, variant: WcssVariant) -> Result<MetricValue<T>> {
    let (centers, family) = match variant {
        WcssVariant::RecomputedMeans => (c.centroids(), FormulaFamily::RecomputedMeans),
        WcssVariant::ProvidedCenters => (
            c.centers
                .clone()
                .ok_or_else(|| MetricError::InvalidParameter("ProvidedCenters requires centers".into()))?,
            FormulaFamily::ProvidedCenters,
        ),
    };
    let v = sum(c.x.iter().zip(&c.assign).map(|(r, &a)| sq_dist(r, &centers[a])));
    Ok(MetricValue::scalar(v, ConventionDescriptor::overall(MetricId::Wcss, family)))
}
