use std::cmp::Ordering;
use std::fmt;

use convmetrics::{ConventionDescriptor, FormulaFamily, MetricId, MetricValue, ParamKey, ParamValue, Validity};

use crate::config::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiscrepancyClass {
    /// An output outside its mathematical domain.
    Bug,
    /// Different formula or formula parameter.
    Id,
    /// Same formula, different reporting.
    Rd,
    None,
}

impl DiscrepancyClass {
    pub fn name(self) -> &'static str {
        match self {
            DiscrepancyClass::Bug => "BUG",
            DiscrepancyClass::Id => "ID",
            DiscrepancyClass::Rd => "RD",
            DiscrepancyClass::None => "NONE",
        }
    }
}

impl fmt::Display for DiscrepancyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyRecord {
    pub metric_id: MetricId,
    pub descriptor_a: ConventionDescriptor,
    pub descriptor_b: ConventionDescriptor,
    pub value_a: Option<f64>,
    pub value_b: Option<f64>,
    pub validity_a: Validity,
    pub validity_b: Validity,
    /// `None` when only one side has a value.
    pub abs_delta: Option<f64>,
    pub classification: DiscrepancyClass,
}

/// Families that only choose how a p-value is obtained.
fn p_method_family(f: FormulaFamily) -> bool {
    use FormulaFamily::*;
    matches!(f, Exact | NormalApprox | Asymptotic | ExactEnumeration | MonteCarlo)
}

fn p_method_param(k: ParamKey) -> bool {
    use ParamKey::*;
    matches!(k, Continuity | PMethod | Resamples | Seed)
}

/// RD or ID from the descriptors alone: a change of formula family or of
/// any non-reporting parameter is implementational. For test statistics the
/// p-value machinery (exact vs approximate, continuity, resampling) is
/// ignored, since it cannot change the statistic.
pub fn structural_class(a: &ConventionDescriptor, b: &ConventionDescriptor) -> DiscrepancyClass {
    let statistic = a.output() == Some("statistic") && b.output() == Some("statistic");
    let formula = |d: &ConventionDescriptor| -> Vec<(ParamKey, ParamValue)> {
        d.formula_params()
            .filter(|(k, _)| !(statistic && p_method_param(**k)))
            .map(|(k, v)| (*k, v.clone()))
            .collect()
    };
    let same_family = a.family == b.family || (statistic && p_method_family(a.family) && p_method_family(b.family));
    if !same_family || formula(a) != formula(b) || a == b {
        DiscrepancyClass::Id
    } else {
        DiscrepancyClass::Rd
    }
}

fn delta(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) if x == y => Some(0.0),
        (Some(x), Some(y)) if x.is_nan() || y.is_nan() => Some(f64::INFINITY),
        (Some(x), Some(y)) => Some((x - y).abs()),
        _ => None,
    }
}

pub fn classify_pair(a: &MetricValue<f64>, b: &MetricValue<f64>, tol: &Tolerances) -> DiscrepancyRecord {
    // canonical side order keeps the record independent of argument order
    let (a, b) = if a.descriptor.label() <= b.descriptor.label() { (a, b) } else { (b, a) };
    let (va, vb) = (a.as_scalar(), b.as_scalar());
    let d = delta(va, vb);
    let class = if a.validity == Validity::OutOfDomain || b.validity == Validity::OutOfDomain {
        DiscrepancyClass::Bug
    } else {
        match d {
            None if va.is_none() && vb.is_none() => DiscrepancyClass::None,
            Some(x) if x <= tol.for_pair(&a.descriptor, &b.descriptor) => DiscrepancyClass::None,
            _ => structural_class(&a.descriptor, &b.descriptor),
        }
    };
    DiscrepancyRecord {
        metric_id: a.descriptor.metric,
        descriptor_a: a.descriptor.clone(),
        descriptor_b: b.descriptor.clone(),
        value_a: va,
        value_b: vb,
        validity_a: a.validity,
        validity_b: b.validity,
        abs_delta: d,
        classification: class,
    }
}

/// Every unordered pair of values of the same metric and output quantity.
/// Statistic and p-value of a test are never paired with each other.
pub fn classify_discrepancies(values: &[MetricValue<f64>], tolerance: impl Into<Tolerances>) -> Vec<DiscrepancyRecord> {
    let tol = tolerance.into();
    let mut out = Vec::new();
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            if a.descriptor.metric == b.descriptor.metric && a.descriptor.output() == b.descriptor.output() {
                out.push(classify_pair(a, b, &tol));
            }
        }
    }
    sort_records(&mut out);
    out
}

/// Report order: classification group, metric, |Δ| descending (missing
/// deltas first), then variant labels.
pub fn sort_records(records: &mut [DiscrepancyRecord]) {
    let key = |r: &DiscrepancyRecord| r.abs_delta.unwrap_or(f64::INFINITY);
    records.sort_by(|x, y| {
        x.classification
            .cmp(&y.classification)
            .then_with(|| x.metric_id.name().cmp(y.metric_id.name()))
            .then_with(|| key(y).partial_cmp(&key(x)).unwrap_or(Ordering::Equal))
            .then_with(|| x.descriptor_a.label().cmp(&y.descriptor_a.label()))
            .then_with(|| x.descriptor_b.label().cmp(&y.descriptor_b.label()))
    });
}
