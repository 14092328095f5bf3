use super::{SampleGroups, Tail};
use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId, ParamKey};
use crate::error::{MetricError, Result};
use crate::numeric;
use crate::scalar::Scalar;
use crate::special;
use crate::value::TestResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TKind<T> {
    IndependentPooled,
    Welch,
    Paired,
    /// z statistic with a known common σ; one group tests mean 0.
    ZKnownSigma(T),
}

pub fn t_tests<T: Scalar>(s: &SampleGroups<T>, kind: TKind<T>, tail: Tail) -> Result<TestResult<T>> {
    let (metric, family) = match kind {
        TKind::IndependentPooled => (MetricId::TTestIndependent, FormulaFamily::Pooled),
        TKind::Welch => (MetricId::TTestWelch, FormulaFamily::Welch),
        TKind::Paired => (MetricId::TTestPaired, FormulaFamily::Paired),
        TKind::ZKnownSigma(_) => (MetricId::ZTest, FormulaFamily::KnownSigma),
    };
    let mut desc = ConventionDescriptor::overall(metric, family).with(ParamKey::Tail, tail.name());

    let (stat, df) = match kind {
        TKind::IndependentPooled | TKind::Welch => {
            s.require_groups(2)?;
            let (x, y) = (s.group(0), s.group(1));
            let (n1, n2) = (T::from_count(x.len()), T::from_count(y.len()));
            let (v1, v2) = (numeric::sample_variance(x), numeric::sample_variance(y));
            let diff = numeric::mean(x) - numeric::mean(y);
            if kind == TKind::IndependentPooled {
                let df = n1 + n2 - T::lit(2.0);
                let se2 = if x.len() == y.len() {
                    // algebraically equal to the pooled form when n1 = n2
                    v1 / n1 + v2 / n2
                } else {
                    let sp2 = ((n1 - T::one()) * v1 + (n2 - T::one()) * v2) / df;
                    sp2 * (T::one() / n1 + T::one() / n2)
                };
                let se = se2.sqrt();
                (ratio(diff, se), df)
            } else {
                let (a, b) = (v1 / n1, v2 / n2);
                let se = (a + b).sqrt();
                let df = (a + b) * (a + b) / (a * a / (n1 - T::one()) + b * b / (n2 - T::one()));
                (ratio(diff, se), df)
            }
        }
        TKind::Paired => {
            let d = s.differences()?;
            let n = T::from_count(d.len());
            let se = (numeric::sample_variance(&d) / n).sqrt();
            (ratio(numeric::mean(&d), se), n - T::one())
        }
        TKind::ZKnownSigma(sigma) => {
            if !(sigma > T::zero()) || !sigma.is_finite() {
                return Err(MetricError::InvalidParameter("z-test sigma must be positive".into()));
            }
            desc = desc.with(ParamKey::Sigma, sigma.to_f64_lossy());
            let z = match s.n_groups() {
                1 => {
                    let x = s.group(0);
                    numeric::mean(x) / (sigma / T::from_count(x.len()).sqrt())
                }
                2 => {
                    let (x, y) = (s.group(0), s.group(1));
                    let inv = T::one() / T::from_count(x.len()) + T::one() / T::from_count(y.len());
                    (numeric::mean(x) - numeric::mean(y)) / (sigma * inv.sqrt())
                }
                g => {
                    return Err(MetricError::InvalidParameter(format!("z-test takes 1 or 2 groups, got {g}")));
                }
            };
            let zf = z.to_f64_lossy();
            let p = tail.p_value(special::normal_cdf(zf), special::normal_sf(zf));
            return Ok(TestResult::new(z, T::lit(p), Vec::new(), desc));
        }
    };
    let Some(t) = stat else {
        return Ok(TestResult::undefined(desc));
    };
    let (tf, dff) = (t.to_f64_lossy(), df.to_f64_lossy());
    let p = tail.p_value(special::t_cdf(tf, dff), special::t_sf(tf, dff));
    Ok(TestResult::new(t, T::lit(p), vec![df], desc))
}

/// `num / se`, Undefined for a zero standard error.
fn ratio<T: Scalar>(num: T, se: T) -> Option<T> {
    (se > T::zero()).then(|| num / se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identical_samples() {
        let s = SampleGroups::<f64>::new(vec![vec![1.0, 2.0, 4.0], vec![1.0, 2.0, 4.0]]).unwrap();
        for kind in [TKind::IndependentPooled, TKind::Welch] {
            let r = t_tests(&s, kind, Tail::TwoSided).unwrap();
            assert_eq!(r.statistic, 0.0);
            assert_eq!(r.p_value, 1.0);
        }
        // paired differences with zero variance
        let r = t_tests(&s, TKind::Paired, Tail::TwoSided).unwrap();
        assert!(!r.is_ok() && r.statistic.is_nan());
    }

    #[test]
    fn pooled_example() {
        let s = SampleGroups::new(vec![vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![2.0, 3.0, 4.0, 5.0, 6.0]]).unwrap();
        let r = t_tests(&s, TKind::IndependentPooled, Tail::TwoSided).unwrap();
        assert_eq!(r.statistic, -1.0);
        assert_eq!(r.df, vec![8.0]);
        assert_relative_eq!(r.p_value, 0.346_593_507_087_334_16, epsilon = 1e-12);
        let w = t_tests(&s, TKind::Welch, Tail::TwoSided).unwrap();
        assert_eq!(w.statistic, r.statistic);
        assert_relative_eq!(w.p_value, r.p_value, epsilon = 1e-12);
        let g = t_tests(&s, TKind::IndependentPooled, Tail::Greater).unwrap();
        let l = t_tests(&s, TKind::IndependentPooled, Tail::Less).unwrap();
        assert_relative_eq!(g.p_value + l.p_value, 1.0, epsilon = 1e-15);
        assert_relative_eq!(l.p_value, r.p_value / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn paired_example() {
        let s = SampleGroups::paired(vec![1.0, 0.0, -1.0, 2.0], vec![0.0; 4]).unwrap();
        let r = t_tests(&s, TKind::Paired, Tail::TwoSided).unwrap();
        assert_relative_eq!(r.statistic, 0.5 / (5.0f64 / 3.0 / 4.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(r.statistic, 0.7746, epsilon = 1e-4);
        assert_eq!(r.df, vec![3.0]);
    }

    #[test]
    fn z_test() {
        let s = SampleGroups::new(vec![vec![1.0, 3.0]]).unwrap();
        let r = t_tests(&s, TKind::ZKnownSigma(2.0f64.sqrt()), Tail::TwoSided).unwrap();
        assert_relative_eq!(r.statistic, 2.0, epsilon = 1e-15);
        assert_relative_eq!(r.p_value, 0.045_500_263_896_358_39, epsilon = 1e-14);
        assert!(t_tests(&s, TKind::ZKnownSigma(0.0), Tail::TwoSided).is_err());
        assert!(t_tests(&s, TKind::Welch, Tail::TwoSided).is_err());
    }
}
