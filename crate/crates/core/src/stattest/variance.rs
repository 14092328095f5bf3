use super::distribution::one_way;
use super::{SampleGroups, Tail};
use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId, ParamKey};
use crate::error::{MetricError, Result};
use crate::numeric;
use crate::scalar::Scalar;
use crate::special;
use crate::value::TestResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LeveneCenter<T> {
    Mean,
    /// Brown–Forsythe.
    Median,
    /// Mean after cutting `floor(α·n)` points from each end.
    Trimmed(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceTest<T> {
    FTest(Tail),
    Bartlett,
    Levene(LeveneCenter<T>),
}

pub fn variance_tests<T: Scalar>(s: &SampleGroups<T>, kind: VarianceTest<T>) -> Result<TestResult<T>> {
    match kind {
        VarianceTest::FTest(tail) => f_test(s, tail),
        VarianceTest::Bartlett => bartlett(s),
        VarianceTest::Levene(c) => levene(s, c),
    }
}

fn variances<T: Scalar>(s: &SampleGroups<T>) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .groups()
        .iter()
        .map(|g| numeric::sample_variance(g).to_f64_lossy())
        .collect();
    if v.iter().any(|&x| !(x > 0.0)) {
        return Err(MetricError::Domain("a group has zero variance".into()));
    }
    Ok(v)
}

/// Variance ratio `s1² / s2²` on F(n1−1, n2−1).
pub fn f_test<T: Scalar>(s: &SampleGroups<T>, tail: Tail) -> Result<TestResult<T>> {
    s.require_groups(2)?;
    let desc = ConventionDescriptor::overall(MetricId::FTest, FormulaFamily::VarianceRatio)
        .with(ParamKey::Tail, tail.name());
    let v = variances(s)?;
    let f = v[0] / v[1];
    let d1 = (s.group(0).len() - 1) as f64;
    let d2 = (s.group(1).len() - 1) as f64;
    let p = tail.p_value(special::f_cdf(f, d1, d2), special::f_sf(f, d1, d2));
    Ok(TestResult::new(T::lit(f), T::lit(p), vec![T::lit(d1), T::lit(d2)], desc))
}

pub fn bartlett<T: Scalar>(s: &SampleGroups<T>) -> Result<TestResult<T>> {
    s.require_at_least(2)?;
    let desc = ConventionDescriptor::overall(MetricId::Bartlett, FormulaFamily::Standard);
    let v = variances(s)?;
    let k = s.n_groups() as f64;
    let dfs: Vec<f64> = s.groups().iter().map(|g| (g.len() - 1) as f64).collect();
    let n_minus_k: f64 = dfs.iter().sum();
    let sp2 = dfs.iter().zip(&v).map(|(d, v)| d * v).sum::<f64>() / n_minus_k;
    let num = n_minus_k * sp2.ln() - dfs.iter().zip(&v).map(|(d, v)| d * v.ln()).sum::<f64>();
    let den = 1.0 + (dfs.iter().map(|d| 1.0 / d).sum::<f64>() - 1.0 / n_minus_k) / (3.0 * (k - 1.0));
    let t = (num / den).max(0.0);
    Ok(TestResult::new(
        T::lit(t),
        T::lit(special::chi2_sf(t, k - 1.0)),
        vec![T::lit(k - 1.0)],
        desc,
    ))
}

fn trimmed_mean(g: &[f64], alpha: f64) -> f64 {
    let v = numeric::sorted(g);
    let cut = (alpha * v.len() as f64).floor() as usize;
    numeric::mean(&v[cut..v.len() - cut])
}

/// One-way ANOVA on absolute deviations from each group's center.
pub fn levene<T: Scalar>(s: &SampleGroups<T>, center: LeveneCenter<T>) -> Result<TestResult<T>> {
    s.require_at_least(2)?;
    let family = match center {
        LeveneCenter::Mean => FormulaFamily::MeanCentered,
        LeveneCenter::Median => FormulaFamily::MedianCentered,
        LeveneCenter::Trimmed(_) => FormulaFamily::TrimmedCentered,
    };
    let mut desc = ConventionDescriptor::overall(MetricId::Levene, family);
    if let LeveneCenter::Trimmed(a) = center {
        let a = a.to_f64_lossy();
        if !(0.0..0.5).contains(&a) {
            return Err(MetricError::InvalidParameter("trim fraction must lie in [0, 0.5)".into()));
        }
        desc = desc.with(ParamKey::TrimFraction, a);
    }
    let deviations: Vec<Vec<f64>> = s
        .groups()
        .iter()
        .map(|g| {
            let g: Vec<f64> = g.iter().map(|v| v.to_f64_lossy()).collect();
            let c = match center {
                LeveneCenter::Mean => numeric::mean(&g),
                LeveneCenter::Median => numeric::median(&g),
                LeveneCenter::Trimmed(a) => trimmed_mean(&g, a.to_f64_lossy()),
            };
            g.iter().map(|v| (v - c).abs()).collect()
        })
        .collect();
    Ok(match one_way(&deviations) {
        Some((f, d1, d2)) => TestResult::new(
            T::lit(f),
            T::lit(special::f_sf(f, d1, d2)),
            vec![T::lit(d1), T::lit(d2)],
            desc,
        ),
        None => TestResult::undefined(desc),
    })
}
