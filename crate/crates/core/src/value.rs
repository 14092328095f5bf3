use crate::convention::ConventionDescriptor;
use crate::scalar::Scalar;

/// Whether a computed number may be trusted as a value of the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Validity {
    Ok,
    /// A number was produced but lies outside the metric's mathematical
    /// range (e.g. a p-value above 1).
    OutOfDomain,
    /// No number exists (0/0, empty input class, ...).
    Undefined,
}

/// Scalar or per-class result.
#[derive(Debug, Clone, PartialEq)]
pub enum Value<T> {
    Scalar(T),
    PerClass(Vec<T>),
}

/// A metric result together with the convention that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue<T> {
    value: Option<Value<T>>,
    pub descriptor: ConventionDescriptor,
    pub validity: Validity,
}

impl<T: Scalar> MetricValue<T> {
    /// A real-valued result. NaN is demoted to `Undefined`.
    pub fn scalar(v: T, descriptor: ConventionDescriptor) -> Self {
        if v.is_nan() {
            return Self::undefined(descriptor);
        }
        MetricValue {
            value: Some(Value::Scalar(v)),
            descriptor,
            validity: Validity::Ok,
        }
    }

    /// A value with a known closed range; anything outside it is flagged
    /// `OutOfDomain` rather than clamped.
    pub fn bounded(v: T, lo: T, hi: T, descriptor: ConventionDescriptor) -> Self {
        if v.is_nan() {
            return MetricValue {
                value: Some(Value::Scalar(v)),
                descriptor,
                validity: Validity::OutOfDomain,
            };
        }
        let validity = if v < lo || v > hi {
            Validity::OutOfDomain
        } else {
            Validity::Ok
        };
        MetricValue {
            value: Some(Value::Scalar(v)),
            descriptor,
            validity,
        }
    }

    /// A p-value; must lie in [0, 1] to be `Ok`.
    pub fn p_value(p: T, descriptor: ConventionDescriptor) -> Self {
        Self::bounded(p, T::zero(), T::one(), descriptor)
    }

    pub fn per_class(values: Vec<T>, descriptor: ConventionDescriptor) -> Self {
        MetricValue {
            value: Some(Value::PerClass(values)),
            descriptor,
            validity: Validity::Ok,
        }
    }

    pub fn undefined(descriptor: ConventionDescriptor) -> Self {
        MetricValue {
            value: None,
            descriptor,
            validity: Validity::Undefined,
        }
    }

    /// Wraps an optional scalar: `None` becomes `Undefined`.
    pub fn from_option(v: Option<T>, descriptor: ConventionDescriptor) -> Self {
        match v {
            Some(v) => Self::scalar(v, descriptor),
            None => Self::undefined(descriptor),
        }
    }

    pub fn value(&self) -> Option<&Value<T>> {
        self.value.as_ref()
    }

    /// The scalar value, if this is a defined scalar result.
    pub fn as_scalar(&self) -> Option<T> {
        match self.value {
            Some(Value::Scalar(v)) => Some(v),
            _ => None,
        }
    }

    pub fn as_per_class(&self) -> Option<&[T]> {
        match &self.value {
            Some(Value::PerClass(v)) => Some(v),
            _ => None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.validity == Validity::Ok
    }

    /// Scalar accessor that panics on anything but a defined scalar.
    /// Intended for tests and examples.
    pub fn unwrap_scalar(&self) -> T {
        self.as_scalar()
            .unwrap_or_else(|| panic!("{} is not a defined scalar", self.descriptor))
    }

    pub fn with_descriptor(mut self, descriptor: ConventionDescriptor) -> Self {
        self.descriptor = descriptor;
        self
    }

    /// Converts to another scalar type (used by the f64 harness).
    pub fn cast<U: Scalar>(&self) -> MetricValue<U> {
        let conv = |x: T| U::from_f64(x.to_f64_lossy()).unwrap_or_else(U::nan);
        MetricValue {
            value: self.value.as_ref().map(|v| match v {
                Value::Scalar(x) => Value::Scalar(conv(*x)),
                Value::PerClass(xs) => Value::PerClass(xs.iter().copied().map(conv).collect()),
            }),
            descriptor: self.descriptor.clone(),
            validity: self.validity,
        }
    }
}

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult<T> {
    pub statistic: T,
    pub p_value: T,
    /// Degrees of freedom, when the reference distribution has any
    /// (one entry for t/χ², two for F).
    pub df: Vec<T>,
    pub descriptor: ConventionDescriptor,
    pub validity: Validity,
}

impl<T: Scalar> TestResult<T> {
    /// Builds a result and derives validity from the p-value.
    pub fn new(statistic: T, p_value: T, df: Vec<T>, descriptor: ConventionDescriptor) -> Self {
        let validity = if statistic.is_nan() {
            Validity::Undefined
        } else if p_value.is_nan() || p_value < T::zero() || p_value > T::one() {
            Validity::OutOfDomain
        } else {
            Validity::Ok
        };
        TestResult {
            statistic,
            p_value,
            df,
            descriptor,
            validity,
        }
    }

    pub fn undefined(descriptor: ConventionDescriptor) -> Self {
        TestResult {
            statistic: T::nan(),
            p_value: T::nan(),
            df: Vec::new(),
            descriptor,
            validity: Validity::Undefined,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.validity == Validity::Ok
    }

    /// The statistic as a metric value (descriptor tagged `output=statistic`).
    pub fn statistic_value(&self) -> MetricValue<T> {
        let d = self
            .descriptor
            .clone()
            .with(crate::convention::ParamKey::Output, "statistic");
        match self.validity {
            Validity::Undefined => MetricValue::undefined(d),
            _ => MetricValue::scalar(self.statistic, d),
        }
    }

    /// The p-value as a metric value (descriptor tagged `output=p_value`).
    pub fn p_value_value(&self) -> MetricValue<T> {
        let d = self
            .descriptor
            .clone()
            .with(crate::convention::ParamKey::Output, "p_value");
        match self.validity {
            Validity::Undefined => MetricValue::undefined(d),
            _ => MetricValue::p_value(self.p_value, d),
        }
    }
}

/// What to report when a ratio metric has a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum ZeroDivision {
    #[default]
    Undefined,
    Zero,
    One,
    /// Leave the class out of averages; the per-class value stays undefined.
    Drop,
}

impl ZeroDivision {
    pub fn name(self) -> &'static str {
        match self {
            ZeroDivision::Undefined => "undefined",
            ZeroDivision::Zero => "zero",
            ZeroDivision::One => "one",
            ZeroDivision::Drop => "drop",
        }
    }

    /// Resolves a possibly-undefined ratio.
    pub fn fill<T: Scalar>(self, v: Option<T>) -> Option<T> {
        match (v, self) {
            (Some(v), _) => Some(v),
            (None, ZeroDivision::Zero) => Some(T::zero()),
            (None, ZeroDivision::One) => Some(T::one()),
            (None, _) => None,
        }
    }
}
