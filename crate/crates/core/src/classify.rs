//! Binary and multi-class classification metrics.
//!
//! Every ratio metric is computed per class from one-vs-rest counts and then
//! reported under an explicit [`ReportingMode`]; nothing silently picks a
//! positive class or an averaging scheme. [`prf_report`] returns the full
//! table of per-class values and all three aggregates.

use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId, ParamKey, ReportingMode};
use crate::error::{MetricError, Result};
use crate::labels::{BinaryCounts, ConfusionMatrix, LabelSet};
use crate::scalar::Scalar;
use crate::value::{MetricValue, ZeroDivision};

fn ratio<T: Scalar>(num: u64, den: u64) -> Option<T> {
    if den == 0 {
        None
    } else {
        Some(T::lit(num as f64) / T::lit(den as f64))
    }
}

/// Per-class precision, recall, F-beta and Jaccard (`None` = 0/0).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores<T> {
    pub label: u32,
    pub support: u64,
    pub precision: Option<T>,
    pub recall: Option<T>,
    pub f_beta: Option<T>,
    pub jaccard: Option<T>,
}

impl<T: Scalar> ClassScores<T> {
    fn from_counts(label: u32, c: BinaryCounts, beta: T) -> Self {
        let b2 = beta * beta;
        let tp = T::lit(c.tp as f64);
        let f_den = (T::one() + b2) * tp + b2 * T::lit(c.fn_ as f64) + T::lit(c.fp as f64);
        ClassScores {
            label,
            support: c.tp + c.fn_,
            precision: ratio(c.tp, c.tp + c.fp),
            recall: ratio(c.tp, c.tp + c.fn_),
            // count form of (1+β²)PR/(β²P+R); defined whenever any of TP/FP/FN is
            f_beta: (f_den > T::zero()).then(|| (T::one() + b2) * tp / f_den),
            jaccard: ratio(c.tp, c.tp + c.fp + c.fn_),
        }
    }
}

/// Aggregated precision, recall, F-beta and Jaccard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate<T> {
    pub precision: Option<T>,
    pub recall: Option<T>,
    pub f_beta: Option<T>,
    pub jaccard: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrfReport<T> {
    pub beta: T,
    pub fill: ZeroDivision,
    pub per_class: Vec<ClassScores<T>>,
    pub micro: Aggregate<T>,
    pub macro_avg: Aggregate<T>,
    pub weighted: Aggregate<T>,
}

/// Which quantity of a [`PrfReport`] to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrfQuantity {
    Precision,
    Recall,
    FBeta,
    Jaccard,
}

impl PrfQuantity {
    fn of_class<T: Scalar>(self, c: &ClassScores<T>) -> Option<T> {
        match self {
            PrfQuantity::Precision => c.precision,
            PrfQuantity::Recall => c.recall,
            PrfQuantity::FBeta => c.f_beta,
            PrfQuantity::Jaccard => c.jaccard,
        }
    }

    fn of_aggregate<T: Scalar>(self, a: &Aggregate<T>) -> Option<T> {
        match self {
            PrfQuantity::Precision => a.precision,
            PrfQuantity::Recall => a.recall,
            PrfQuantity::FBeta => a.f_beta,
            PrfQuantity::Jaccard => a.jaccard,
        }
    }

    fn metric(self, beta_is_one: bool) -> MetricId {
        match self {
            PrfQuantity::Precision => MetricId::Precision,
            PrfQuantity::Recall => MetricId::Recall,
            PrfQuantity::FBeta if beta_is_one => MetricId::F1,
            PrfQuantity::FBeta => MetricId::FBeta,
            PrfQuantity::Jaccard => MetricId::Jaccard,
        }
    }
}

/// Unweighted mean; `None` if any entry is undefined and the policy is not `Drop`.
fn macro_mean<T: Scalar>(values: &[Option<T>], fill: ZeroDivision) -> Option<T> {
    let mut acc = T::zero();
    let mut n = 0usize;
    for v in values {
        match fill.fill(*v) {
            Some(v) => {
                acc = acc + v;
                n += 1;
            }
            None if fill == ZeroDivision::Drop => {}
            None => return None,
        }
    }
    (n > 0).then(|| acc / T::from_count(n))
}

/// Support-weighted mean; zero-support classes carry no weight.
fn weighted_mean<T: Scalar>(values: &[Option<T>], support: &[u64], fill: ZeroDivision) -> Option<T> {
    let mut acc = T::zero();
    let mut w = 0u64;
    for (v, &s) in values.iter().zip(support) {
        if s == 0 {
            continue;
        }
        match fill.fill(*v) {
            Some(v) => {
                acc = acc + v * T::lit(s as f64);
                w += s;
            }
            None if fill == ZeroDivision::Drop => {}
            None => return None,
        }
    }
    (w > 0).then(|| acc / T::lit(w as f64))
}

/// Full precision/recall/F-beta/Jaccard table with the default
/// (`Undefined`) zero-denominator policy.
pub fn prf_report<T: Scalar>(cm: &ConfusionMatrix, beta: T) -> Result<PrfReport<T>> {
    prf_report_with(cm, beta, ZeroDivision::Undefined)
}

pub fn prf_report_with<T: Scalar>(
    cm: &ConfusionMatrix,
    beta: T,
    fill: ZeroDivision,
) -> Result<PrfReport<T>> {
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(MetricError::InvalidParameter("beta must be positive".into()));
    }
    let per_class: Vec<ClassScores<T>> = cm
        .labels()
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &l)| ClassScores::from_counts(l, cm.one_vs_rest(i), beta))
        .collect();

    let trace = cm.trace();
    let total = cm.total();
    let micro_counts = BinaryCounts {
        tp: trace,
        fp: total - trace,
        fn_: total - trace,
        tn: 0,
    };
    let m = ClassScores::<T>::from_counts(0, micro_counts, beta);
    let micro = Aggregate {
        precision: fill.fill(m.precision),
        recall: fill.fill(m.recall),
        f_beta: fill.fill(m.f_beta),
        jaccard: fill.fill(m.jaccard),
    };

    let support: Vec<u64> = per_class.iter().map(|c| c.support).collect();
    let column = |q: PrfQuantity| -> Vec<Option<T>> { per_class.iter().map(|c| q.of_class(c)).collect() };
    let agg = |f: &dyn Fn(&[Option<T>]) -> Option<T>| Aggregate {
        precision: f(&column(PrfQuantity::Precision)),
        recall: f(&column(PrfQuantity::Recall)),
        f_beta: f(&column(PrfQuantity::FBeta)),
        jaccard: f(&column(PrfQuantity::Jaccard)),
    };
    let macro_avg = agg(&|v| macro_mean(v, fill));
    let weighted = agg(&|v| weighted_mean(v, &support, fill));

    Ok(PrfReport {
        beta,
        fill,
        per_class,
        micro,
        macro_avg,
        weighted,
    })
}

impl<T: Scalar> PrfReport<T> {
    fn class(&self, label: u32) -> Result<&ClassScores<T>> {
        self.per_class
            .iter()
            .find(|c| c.label == label)
            .ok_or(MetricError::LabelOutsideSet(label))
    }

    /// Extracts one quantity under one reporting mode.
    pub fn select(&self, quantity: PrfQuantity, mode: ReportingMode) -> Result<MetricValue<T>> {
        let beta_is_one = self.beta == T::one();
        let metric = quantity.metric(beta_is_one);
        let mut desc = ConventionDescriptor::new(metric, FormulaFamily::Standard, mode);
        if metric == MetricId::FBeta {
            desc = desc.with(ParamKey::Beta, self.beta.to_f64_lossy());
        }
        if self.fill != ZeroDivision::Undefined {
            desc = desc.with(ParamKey::ZeroDivision, self.fill.name());
        }
        let v = match mode {
            ReportingMode::Micro => quantity.of_aggregate(&self.micro),
            ReportingMode::Macro => quantity.of_aggregate(&self.macro_avg),
            ReportingMode::Weighted => quantity.of_aggregate(&self.weighted),
            ReportingMode::PerClass(l) | ReportingMode::BinaryPositive(l) => {
                self.fill.fill(quantity.of_class(self.class(l)?))
            }
            ReportingMode::Overall => {
                return Err(MetricError::InvalidParameter(
                    "precision-family metrics need an explicit reporting mode".into(),
                ))
            }
        };
        Ok(MetricValue::from_option(v, desc))
    }

    /// All per-class values of one quantity as a vector result.
    pub fn per_class_vector(&self, quantity: PrfQuantity) -> MetricValue<T> {
        let metric = quantity.metric(self.beta == T::one());
        let desc = ConventionDescriptor::new(metric, FormulaFamily::Standard, ReportingMode::Macro);
        let vals: Option<Vec<T>> = self.per_class.iter().map(|c| self.fill.fill(quantity.of_class(c))).collect();
        match vals {
            Some(v) => MetricValue::per_class(v, desc),
            None => MetricValue::undefined(desc),
        }
    }
}

/// trace / total.
pub fn accuracy<T: Scalar>(cm: &ConfusionMatrix) -> MetricValue<T> {
    let desc = ConventionDescriptor::overall(MetricId::Accuracy, FormulaFamily::Standard);
    MetricValue::from_option(ratio(cm.trace(), cm.total()), desc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalancedAccuracyVariant {
    MacroRecall,
    /// Support-weighted recall; algebraically equal to accuracy.
    WeightedRecall,
    /// `(MacroRecall - 1/K) / (1 - 1/K)`.
    ChanceCorrected,
}

fn recalls<T: Scalar>(cm: &ConfusionMatrix) -> Vec<Option<T>> {
    (0..cm.n_classes())
        .map(|i| ratio(cm.get(i, i), cm.row_sum(i)))
        .collect()
}

pub fn balanced_accuracy<T: Scalar>(
    cm: &ConfusionMatrix,
    variant: BalancedAccuracyVariant,
    fill: ZeroDivision,
) -> MetricValue<T> {
    use BalancedAccuracyVariant::*;
    let (family, mode) = match variant {
        MacroRecall => (FormulaFamily::MeanRecall, ReportingMode::Macro),
        WeightedRecall => (FormulaFamily::MeanRecall, ReportingMode::Weighted),
        ChanceCorrected => (FormulaFamily::ChanceCorrected, ReportingMode::Macro),
    };
    let mut desc = ConventionDescriptor::new(MetricId::BalancedAccuracy, family, mode);
    if fill != ZeroDivision::Undefined {
        desc = desc.with(ParamKey::ZeroDivision, fill.name());
    }
    let r = recalls::<T>(cm);
    let support: Vec<u64> = (0..cm.n_classes()).map(|i| cm.row_sum(i)).collect();
    let v = match variant {
        MacroRecall => macro_mean(&r, fill),
        WeightedRecall => weighted_mean(&r, &support, fill),
        ChanceCorrected => macro_mean(&r, fill).map(|m| {
            let chance = T::one() / T::from_count(cm.n_classes());
            (m - chance) / (T::one() - chance)
        }),
    };
    MetricValue::from_option(v, desc)
}

/// Cohen's kappa `(po - pe) / (1 - pe)`; undefined when `pe = 1`.
pub fn cohen_kappa<T: Scalar>(cm: &ConfusionMatrix) -> MetricValue<T> {
    let desc = ConventionDescriptor::overall(MetricId::CohenKappa, FormulaFamily::Standard);
    let n = cm.total();
    if n == 0 {
        return MetricValue::undefined(desc);
    }
    let nf = T::lit(n as f64);
    let po = T::lit(cm.trace() as f64) / nf;
    let pe = crate::scalar::sum(
        (0..cm.n_classes()).map(|i| T::lit(cm.row_sum(i) as f64) * T::lit(cm.col_sum(i) as f64)),
    ) / (nf * nf);
    if pe >= T::one() {
        return MetricValue::undefined(desc);
    }
    MetricValue::scalar((po - pe) / (T::one() - pe), desc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MccVariant {
    /// Binary (one-vs-rest) MCC with the given positive label.
    BinaryPositive(u32),
    /// Gorodkin's K-class covariance form.
    Generalized,
    /// Unweighted mean of the per-class one-vs-rest MCCs.
    PerClassOneVsRestMacro,
}

fn binary_mcc<T: Scalar>(c: BinaryCounts) -> Option<T> {
    let f = |x: u64| T::lit(x as f64);
    let num = f(c.tp) * f(c.tn) - f(c.fp) * f(c.fn_);
    let den = (f(c.tp + c.fp) * f(c.tp + c.fn_) * f(c.tn + c.fp) * f(c.tn + c.fn_)).sqrt();
    (den > T::zero()).then(|| num / den)
}

/// Matthews correlation coefficient. A zero denominator is resolved by
/// `fill`; the conventional choice is `ZeroDivision::Zero`.
pub fn mcc<T: Scalar>(cm: &ConfusionMatrix, variant: MccVariant, fill: ZeroDivision) -> Result<MetricValue<T>> {
    let (family, mode) = match variant {
        MccVariant::BinaryPositive(k) => (FormulaFamily::OneVsRest, ReportingMode::BinaryPositive(k)),
        MccVariant::Generalized => (FormulaFamily::Generalized, ReportingMode::Overall),
        MccVariant::PerClassOneVsRestMacro => (FormulaFamily::OneVsRest, ReportingMode::Macro),
    };
    let mut desc = ConventionDescriptor::new(MetricId::Mcc, family, mode);
    if fill != ZeroDivision::Undefined {
        desc = desc.with(ParamKey::ZeroDivision, fill.name());
    }
    let v = match variant {
        MccVariant::BinaryPositive(label) => {
            let i = cm.labels().index_of(label).ok_or(MetricError::LabelOutsideSet(label))?;
            fill.fill(binary_mcc(cm.one_vs_rest(i)))
        }
        MccVariant::Generalized => {
            let f = |x: u64| T::lit(x as f64);
            let k = cm.n_classes();
            let s = f(cm.total());
            let c = f(cm.trace());
            let mut pt = T::zero();
            let mut pp = T::zero();
            let mut tt = T::zero();
            for i in 0..k {
                let p = f(cm.col_sum(i));
                let t = f(cm.row_sum(i));
                pt = pt + p * t;
                pp = pp + p * p;
                tt = tt + t * t;
            }
            let den = ((s * s - pp) * (s * s - tt)).sqrt();
            fill.fill((den > T::zero()).then(|| (c * s - pt) / den))
        }
        MccVariant::PerClassOneVsRestMacro => {
            let per: Vec<Option<T>> = (0..cm.n_classes()).map(|i| binary_mcc(cm.one_vs_rest(i))).collect();
            macro_mean(&per, fill)
        }
    };
    Ok(MetricValue::from_option(v, desc))
}

/// Mean negative log-likelihood of the true class. Each probability row is
/// clipped to `[eps, 1 - eps]` and then renormalised.
pub fn log_loss<T: Scalar>(
    y_true: &[u32],
    labels: &LabelSet,
    probs: &[Vec<T>],
    eps: T,
) -> Result<MetricValue<T>> {
    if !(eps > T::zero() && eps < T::lit(0.5)) {
        return Err(MetricError::InvalidParameter("eps must lie in (0, 0.5)".into()));
    }
    if y_true.len() != probs.len() {
        return Err(MetricError::LengthMismatch {
            left: y_true.len(),
            right: probs.len(),
        });
    }
    if y_true.is_empty() {
        return Err(MetricError::TooFewSamples { need: 1, got: 0 });
    }
    let k = labels.len();
    let mut total = T::zero();
    for (&y, row) in y_true.iter().zip(probs) {
        if row.len() != k {
            return Err(MetricError::LengthMismatch { left: row.len(), right: k });
        }
        if row.iter().any(|&p| !(p >= T::zero()) || !p.is_finite()) {
            return Err(MetricError::Domain("negative or non-finite probability".into()));
        }
        let i = labels.index_of(y).ok_or(MetricError::LabelOutsideSet(y))?;
        let clipped: Vec<T> = row.iter().map(|&p| p.max(eps).min(T::one() - eps)).collect();
        let norm = crate::scalar::sum(clipped.iter().copied());
        total = total - (clipped[i] / norm).ln();
    }
    let desc = ConventionDescriptor::overall(MetricId::LogLoss, FormulaFamily::Standard)
        .with(ParamKey::Epsilon, eps.to_f64_lossy());
    Ok(MetricValue::scalar(total / T::from_count(y_true.len()), desc))
}

/// Binary log loss from `P(class 1)`.
pub fn log_loss_binary<T: Scalar>(y_true: &[u32], p_positive: &[T], eps: T) -> Result<MetricValue<T>> {
    let rows: Vec<Vec<T>> = p_positive.iter().map(|&p| vec![T::one() - p, p]).collect();
    log_loss(y_true, &LabelSet::binary(), &rows, eps)
}

/// How tied positive/negative scores are credited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    #[default]
    HalfCredit,
}

/// Rank-based ROC AUC: `(R+ - n+(n+ + 1)/2) / (n+ n-)` with average ranks.
pub fn roc_auc<T: Scalar>(y_true: &[u32], scores: &[T], positive: u32, _ties: TiePolicy) -> Result<MetricValue<T>> {
    if y_true.len() != scores.len() {
        return Err(MetricError::LengthMismatch {
            left: y_true.len(),
            right: scores.len(),
        });
    }
    if !crate::numeric::all_finite(scores) {
        return Err(MetricError::NonFinite);
    }
    let desc = ConventionDescriptor::new(
        MetricId::RocAuc,
        FormulaFamily::RankHalfCredit,
        ReportingMode::BinaryPositive(positive),
    );
    let n_pos = y_true.iter().filter(|&&y| y == positive).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Ok(MetricValue::undefined(desc));
    }
    let ranks = crate::numeric::average_ranks(scores);
    let r_pos = crate::scalar::sum(
        ranks
            .iter()
            .zip(y_true)
            .filter(|(_, &y)| y == positive)
            .map(|(&r, _)| r),
    );
    let np = T::from_count(n_pos);
    let u = r_pos - np * (np + T::one()) / T::lit(2.0);
    Ok(MetricValue::scalar(u / (np * T::from_count(n_neg)), desc))
}

/// Geometric mean of per-class recalls; undefined if a class has no support.
pub fn g_mean<T: Scalar>(cm: &ConfusionMatrix) -> MetricValue<T> {
    let desc = ConventionDescriptor::overall(MetricId::GMean, FormulaFamily::Standard);
    let r: Option<Vec<T>> = recalls(cm).into_iter().collect();
    let Some(r) = r else {
        return MetricValue::undefined(desc);
    };
    if r.iter().any(|&x| x == T::zero()) {
        return MetricValue::scalar(T::zero(), desc);
    }
    let log_mean = crate::scalar::sum(r.iter().map(|x| x.ln())) / T::from_count(r.len());
    MetricValue::scalar(log_mean.exp(), desc)
}
