use super::Mask;
use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId, ParamKey, ReportingMode};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::value::MetricValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverlapVariant {
    /// Foreground is the positive class.
    ForegroundOnly,
    /// Mean of the foreground and background scores.
    ClassAveraged,
    /// Counts pooled over both classes.
    Micro,
}

impl OverlapVariant {
    fn reporting(self) -> ReportingMode {
        match self {
            OverlapVariant::ForegroundOnly => ReportingMode::BinaryPositive(1),
            OverlapVariant::ClassAveraged => ReportingMode::Macro,
            OverlapVariant::Micro => ReportingMode::Micro,
        }
    }
}

/// Value assigned to a `0 / 0` ratio, e.g. Dice of two empty masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EmptyPolicy {
    One,
    Zero,
    #[default]
    Undefined,
}

impl EmptyPolicy {
    pub fn name(self) -> &'static str {
        match self {
            EmptyPolicy::One => "one",
            EmptyPolicy::Zero => "zero",
            EmptyPolicy::Undefined => "undefined",
        }
    }

    fn ratio(self, num: u64, den: u64) -> Option<f64> {
        if den > 0 {
            return Some(num as f64 / den as f64);
        }
        match self {
            EmptyPolicy::One => Some(1.0),
            EmptyPolicy::Zero => Some(0.0),
            EmptyPolicy::Undefined => None,
        }
    }
}

/// Voxelwise confusion counts with foreground as positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OverlapCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl OverlapCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Background as the positive class.
    fn swapped(self) -> Self {
        OverlapCounts {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

pub fn overlap_counts<T: Scalar>(pred: &Mask<T>, reference: &Mask<T>) -> Result<OverlapCounts> {
    pred.require_same_shape(reference)?;
    let mut c = OverlapCounts::default();
    for (&p, &r) in pred.data().iter().zip(reference.data()) {
        match (p, r) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMetrics<T> {
    pub accuracy: MetricValue<T>,
    pub precision: MetricValue<T>,
    pub recall: MetricValue<T>,
    pub f1: MetricValue<T>,
    pub dice: MetricValue<T>,
    pub iou: MetricValue<T>,
    /// Mean of foreground and background IoU, independent of `variant`.
    pub mean_iou: MetricValue<T>,
}

#[derive(Clone, Copy)]
struct Scores {
    precision: Option<f64>,
    recall: Option<f64>,
    dice: Option<f64>,
    iou: Option<f64>,
}

fn scores(c: OverlapCounts, empty: EmptyPolicy) -> Scores {
    Scores {
        precision: empty.ratio(c.tp, c.tp + c.fp),
        recall: empty.ratio(c.tp, c.tp + c.fn_),
        dice: empty.ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_),
        iou: empty.ratio(c.tp, c.tp + c.fp + c.fn_),
    }
}

fn mean2(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some((a? + b?) / 2.0)
}

/// Accuracy, precision, recall, F1, Dice, IoU and mean IoU of `pred`
/// against `reference`. F1 and Dice coincide on binary masks.
pub fn overlap_metrics<T: Scalar>(
    pred: &Mask<T>,
    reference: &Mask<T>,
    variant: OverlapVariant,
    empty: EmptyPolicy,
) -> Result<OverlapMetrics<T>> {
    let c = overlap_counts(pred, reference)?;
    let fg = scores(c, empty);
    let bg = scores(c.swapped(), empty);
    let s = match variant {
        OverlapVariant::ForegroundOnly => fg,
        OverlapVariant::ClassAveraged => Scores {
            precision: mean2(fg.precision, bg.precision),
            recall: mean2(fg.recall, bg.recall),
            dice: mean2(fg.dice, bg.dice),
            iou: mean2(fg.iou, bg.iou),
        },
        OverlapVariant::Micro => {
            let pooled = OverlapCounts {
                tp: c.tp + c.tn,
                fp: c.fp + c.fn_,
                fn_: c.fp + c.fn_,
                tn: 0,
            };
            scores(pooled, empty)
        }
    };

    let value = |metric: MetricId, reporting: ReportingMode, v: Option<f64>| {
        let desc = ConventionDescriptor::new(metric, FormulaFamily::Standard, reporting)
            .with(ParamKey::EmptyPolicy, empty.name());
        match v {
            Some(v) => MetricValue::bounded(T::lit(v), T::zero(), T::one(), desc),
            None => MetricValue::undefined(desc),
        }
    };
    let r = variant.reporting();
    let accuracy = MetricValue::bounded(
        T::lit((c.tp + c.tn) as f64 / c.total() as f64),
        T::zero(),
        T::one(),
        ConventionDescriptor::overall(MetricId::SegAccuracy, FormulaFamily::Standard),
    );
    Ok(OverlapMetrics {
        accuracy,
        precision: value(MetricId::SegPrecision, r, s.precision),
        recall: value(MetricId::SegRecall, r, s.recall),
        f1: value(MetricId::SegF1, r, s.dice),
        dice: value(MetricId::Dice, r, s.dice),
        iou: value(MetricId::Iou, r, s.iou),
        mean_iou: value(MetricId::MeanIou, ReportingMode::Macro, mean2(fg.iou, bg.iou)),
    })
}
