//! Regression error and goodness-of-fit metrics.

use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId, ParamKey};
use crate::error::{MetricError, Result};
use crate::numeric;
use crate::scalar::{sum, Scalar};
use crate::value::MetricValue;

/// Truth and prediction of equal length `n >= 2`, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSeries<T> {
    y: Vec<T>,
    y_hat: Vec<T>,
}

impl<T: Scalar> PairedSeries<T> {
    pub fn new(y: Vec<T>, y_hat: Vec<T>) -> Result<Self> {
        if y.len() != y_hat.len() {
            return Err(MetricError::LengthMismatch {
                left: y.len(),
                right: y_hat.len(),
            });
        }
        if y.len() < 2 {
            return Err(MetricError::TooFewSamples { need: 2, got: y.len() });
        }
        if !numeric::all_finite(&y) || !numeric::all_finite(&y_hat) {
            return Err(MetricError::NonFinite);
        }
        Ok(PairedSeries { y, y_hat })
    }

    pub fn truth(&self) -> &[T] {
        &self.y
    }

    pub fn prediction(&self) -> &[T] {
        &self.y_hat
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    fn residuals(&self) -> impl Iterator<Item = T> + '_ {
        self.y.iter().zip(&self.y_hat).map(|(&a, &b)| a - b)
    }

    fn n(&self) -> T {
        T::from_count(self.len())
    }
}

fn overall(metric: MetricId) -> ConventionDescriptor {
    ConventionDescriptor::overall(metric, FormulaFamily::Standard)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasicErrors<T> {
    pub mae: MetricValue<T>,
    pub mse: MetricValue<T>,
    pub rmse: MetricValue<T>,
    pub median_ae: MetricValue<T>,
}

pub fn basic_errors<T: Scalar>(s: &PairedSeries<T>) -> BasicErrors<T> {
    let abs: Vec<T> = s.residuals().map(|e| e.abs()).collect();
    let mae = sum(abs.iter().copied()) / s.n();
    let mse = sum(s.residuals().map(|e| e * e)) / s.n();
    BasicErrors {
        mae: MetricValue::scalar(mae, overall(MetricId::Mae)),
        mse: MetricValue::scalar(mse, overall(MetricId::Mse)),
        rmse: MetricValue::scalar(mse.sqrt(), overall(MetricId::Rmse)),
        median_ae: MetricValue::scalar(numeric::median(&abs), overall(MetricId::MedianAe)),
    }
}

/// Treatment of `y = 0` in MAPE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapeZeroPolicy<T> {
    Error,
    /// Denominator `max(|y|, eps)`.
    Epsilon(T),
    /// Skip observations with `y = 0`.
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MapeUnits {
    #[default]
    Fraction,
    Percent,
}

pub fn mape<T: Scalar>(s: &PairedSeries<T>, zero_policy: MapeZeroPolicy<T>, units: MapeUnits) -> Result<MetricValue<T>> {
    let mut desc = overall(MetricId::Mape).with(
        ParamKey::Units,
        match units {
            MapeUnits::Fraction => "fraction",
            MapeUnits::Percent => "percent",
        },
    );
    desc = match zero_policy {
        MapeZeroPolicy::Error => desc.with(ParamKey::ZeroPolicy, "error"),
        MapeZeroPolicy::Epsilon(e) => desc
            .with(ParamKey::ZeroPolicy, "epsilon")
            .with(ParamKey::Epsilon, e.to_f64_lossy()),
        MapeZeroPolicy::Drop => desc.with(ParamKey::ZeroPolicy, "drop"),
    };
    let mut acc = T::zero();
    let mut n = 0usize;
    for (&y, &p) in s.y.iter().zip(&s.y_hat) {
        let den = match zero_policy {
            _ if y != T::zero() => y.abs(),
            MapeZeroPolicy::Error => {
                return Err(MetricError::Domain("MAPE undefined for y = 0".into()))
            }
            MapeZeroPolicy::Epsilon(e) => e,
            MapeZeroPolicy::Drop => continue,
        };
        acc = acc + (y - p).abs() / den;
        n += 1;
    }
    if n == 0 {
        return Ok(MetricValue::undefined(desc));
    }
    let mut v = acc / T::from_count(n);
    if units == MapeUnits::Percent {
        v = v * T::lit(100.0);
    }
    Ok(MetricValue::scalar(v, desc))
}

/// Mean squared error of `ln(1 + ·)`; requires non-negative inputs.
pub fn msle<T: Scalar>(s: &PairedSeries<T>) -> Result<MetricValue<T>> {
    if s.y.iter().chain(&s.y_hat).any(|&v| v < T::zero()) {
        return Err(MetricError::Domain("MSLE requires non-negative values".into()));
    }
    let v = sum(
        s.y.iter()
            .zip(&s.y_hat)
            .map(|(&a, &b)| {
                let d = a.ln_1p() - b.ln_1p();
                d * d
            }),
    ) / s.n();
    Ok(MetricValue::scalar(v, overall(MetricId::Msle)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelativeErrors<T> {
    pub mape: MetricValue<T>,
    pub msle: MetricValue<T>,
}

pub fn relative_errors<T: Scalar>(
    s: &PairedSeries<T>,
    zero_policy: MapeZeroPolicy<T>,
    units: MapeUnits,
) -> Result<RelativeErrors<T>> {
    Ok(RelativeErrors {
        mape: mape(s, zero_policy, units)?,
        msle: msle(s)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum R2Variant {
    /// `1 - SSres/SStot` at the identity calibration.
    CoefficientOfDetermination,
    /// `corr(y, ŷ)²`: the coefficient of determination of the best affine
    /// recalibration of ŷ.
    SquaredPearson,
    /// Textbook adjusted R² with `p` predictors.
    Adjusted(usize),
}

pub fn r_squared<T: Scalar>(s: &PairedSeries<T>, variant: R2Variant) -> Result<MetricValue<T>> {
    r_squared_as(s, variant, MetricId::RSquared)
}

pub(crate) fn r_squared_as<T: Scalar>(
    s: &PairedSeries<T>,
    variant: R2Variant,
    metric: MetricId,
) -> Result<MetricValue<T>> {
    let cod = || {
        let ss_tot = numeric::sum_sq_dev(&s.y);
        let ss_res = sum(s.residuals().map(|e| e * e));
        (ss_tot > T::zero()).then(|| T::one() - ss_res / ss_tot)
    };
    Ok(match variant {
        R2Variant::CoefficientOfDetermination => MetricValue::from_option(
            cod(),
            ConventionDescriptor::overall(metric, FormulaFamily::CoefficientOfDetermination),
        ),
        R2Variant::SquaredPearson => MetricValue::from_option(
            numeric::pearson(&s.y, &s.y_hat).map(|r| r * r),
            ConventionDescriptor::overall(metric, FormulaFamily::SquaredPearson),
        ),
        R2Variant::Adjusted(p) => {
            let n = s.len();
            if n < 3 || n <= p + 1 {
                return Err(MetricError::TooFewSamples { need: p + 2, got: n });
            }
            let desc = ConventionDescriptor::overall(metric, FormulaFamily::Adjusted)
                .with(ParamKey::Predictors, p);
            let adj = cod().map(|r2| {
                T::one() - (T::one() - r2) * T::from_count(n - 1) / T::from_count(n - p - 1)
            });
            MetricValue::from_option(adj, desc)
        }
    })
}

/// `1 - Var(y - ŷ)/Var(y)` with population variances.
pub fn explained_variance<T: Scalar>(s: &PairedSeries<T>) -> MetricValue<T> {
    let var_y = numeric::population_variance(&s.y);
    let e: Vec<T> = s.residuals().collect();
    let var_e = numeric::population_variance(&e);
    MetricValue::from_option(
        (var_y > T::zero()).then(|| T::one() - var_e / var_y),
        overall(MetricId::ExplainedVariance),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceExplained<T> {
    pub r_squared: MetricValue<T>,
    pub explained_variance: MetricValue<T>,
}

pub fn variance_explained<T: Scalar>(s: &PairedSeries<T>, variant: R2Variant) -> Result<VarianceExplained<T>> {
    Ok(VarianceExplained {
        r_squared: r_squared(s, variant)?,
        explained_variance: explained_variance(s),
    })
}

/// Mean Tweedie deviance. Powers in `(0, 1)` have no distribution and are
/// rejected.
pub fn tweedie_deviance<T: Scalar>(s: &PairedSeries<T>, power: T) -> Result<MetricValue<T>> {
    let desc = overall(MetricId::TweedieDeviance).with(ParamKey::Power, power.to_f64_lossy());
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    if power > zero && power < one {
        return Err(MetricError::InvalidParameter("Tweedie power in (0, 1) is invalid".into()));
    }
    let pairs = s.y.iter().copied().zip(s.y_hat.iter().copied());
    let check = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(MetricError::Domain(format!("Tweedie power {}: {what}", power)))
        }
    };
    if power < zero {
        check(s.y_hat.iter().all(|&p| p > zero), "requires y_pred > 0")?;
    } else if power >= one && power < two {
        check(s.y.iter().all(|&y| y >= zero), "requires y >= 0")?;
        check(s.y_hat.iter().all(|&p| p > zero), "requires y_pred > 0")?;
    } else if power >= two {
        check(s.y.iter().all(|&y| y > zero), "requires y > 0")?;
        check(s.y_hat.iter().all(|&p| p > zero), "requires y_pred > 0")?;
    }
    let dev: T = if power == zero {
        sum(pairs.map(|(y, p)| (y - p) * (y - p)))
    } else if power == one {
        sum(pairs.map(|(y, p)| {
            let ylog = if y == zero { zero } else { y * (y / p).ln() };
            two * (ylog - (y - p))
        }))
    } else if power == two {
        sum(pairs.map(|(y, p)| two * ((p / y).ln() + y / p - one)))
    } else {
        let a = (one - power) * (two - power);
        sum(pairs.map(|(y, p)| {
            let yp = y.max(zero).powf(two - power) / a;
            two * (yp - y * p.powf(one - power) / (one - power) + p.powf(two - power) / (two - power))
        }))
    };
    Ok(MetricValue::scalar(dev / s.n(), desc))
}

/// Mean Huber loss with threshold `delta`.
pub fn huber<T: Scalar>(s: &PairedSeries<T>, delta: T) -> Result<MetricValue<T>> {
    if !(delta > T::zero()) {
        return Err(MetricError::InvalidParameter("Huber delta must be positive".into()));
    }
    let half = T::lit(0.5);
    let v = sum(s.residuals().map(|e| {
        let a = e.abs();
        if a <= delta {
            half * e * e
        } else {
            delta * a - half * delta * delta
        }
    })) / s.n();
    Ok(MetricValue::scalar(v, overall(MetricId::Huber).with(ParamKey::Delta, delta.to_f64_lossy())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustLosses<T> {
    pub tweedie_deviance: MetricValue<T>,
    pub huber: MetricValue<T>,
}

pub fn robust_losses<T: Scalar>(s: &PairedSeries<T>, tweedie_power: T, huber_delta: T) -> Result<RobustLosses<T>> {
    Ok(RobustLosses {
        tweedie_deviance: tweedie_deviance(s, tweedie_power)?,
        huber: huber(s, huber_delta)?,
    })
}
