use std::f64::consts::PI;

use super::SampleGroups;
use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId};
use crate::error::{MetricError, Result};
use crate::numeric;
use crate::scalar::Scalar;
use crate::special;
use crate::value::TestResult;

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionTest<'a, T> {
    /// Normality of group 0.
    ShapiroWilk,
    /// Group 0 holds the observed counts.
    ChiSquareGof { expected: &'a [T] },
    ChiSquareIndependence(&'a [Vec<T>]),
    Anova,
}

pub fn distribution_tests<T: Scalar>(s: &SampleGroups<T>, kind: DistributionTest<'_, T>) -> Result<TestResult<T>> {
    match kind {
        DistributionTest::ShapiroWilk => shapiro_wilk(s.group(0)),
        DistributionTest::ChiSquareGof { expected } => chi_square_gof(s.group(0), expected),
        DistributionTest::ChiSquareIndependence(table) => chi_square_independence(table),
        DistributionTest::Anova => anova(s),
    }
}

/// `(F, g − 1, n − g)`; `None` when the within-group sum of squares is 0.
pub(super) fn one_way(groups: &[Vec<f64>]) -> Option<(f64, f64, f64)> {
    let n: usize = groups.iter().map(Vec::len).sum();
    let g = groups.len();
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for grp in groups {
        let m = numeric::mean(grp);
        ssb += grp.len() as f64 * (m - grand) * (m - grand);
        ssw += numeric::sum_sq_dev(grp);
    }
    let (d1, d2) = ((g - 1) as f64, (n - g) as f64);
    (ssw > 0.0 && d2 > 0.0).then(|| ((ssb / d1) / (ssw / d2), d1, d2))
}

/// One-way ANOVA `F = MSB / MSW` on `(g − 1, n − g)` degrees of freedom.
pub fn anova<T: Scalar>(s: &SampleGroups<T>) -> Result<TestResult<T>> {
    s.require_at_least(2)?;
    let desc = ConventionDescriptor::overall(MetricId::Anova, FormulaFamily::OneWay);
    let groups: Vec<Vec<f64>> = s
        .groups()
        .iter()
        .map(|g| g.iter().map(|v| v.to_f64_lossy()).collect())
        .collect();
    Ok(match one_way(&groups) {
        Some((f, d1, d2)) => TestResult::new(
            T::lit(f),
            T::lit(special::f_sf(f, d1, d2)),
            vec![T::lit(d1), T::lit(d2)],
            desc,
        ),
        None => TestResult::undefined(desc),
    })
}

fn chi_square_sum(observed: &[f64], expected: &[f64]) -> Result<f64> {
    if expected.iter().any(|&e| !(e > 0.0)) {
        return Err(MetricError::Domain("expected counts must be positive".into()));
    }
    if observed.iter().any(|&o| o < 0.0 || !o.is_finite()) {
        return Err(MetricError::Domain("observed counts must be non-negative".into()));
    }
    Ok(observed
        .iter()
        .zip(expected)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum())
}

/// Pearson goodness of fit with `cells − 1` degrees of freedom.
pub fn chi_square_gof<T: Scalar>(observed: &[T], expected: &[T]) -> Result<TestResult<T>> {
    if observed.len() != expected.len() {
        return Err(MetricError::LengthMismatch {
            left: observed.len(),
            right: expected.len(),
        });
    }
    if observed.len() < 2 {
        return Err(MetricError::TooFewSamples { need: 2, got: observed.len() });
    }
    let desc = ConventionDescriptor::overall(MetricId::ChiSquare, FormulaFamily::GoodnessOfFit);
    let o: Vec<f64> = observed.iter().map(|v| v.to_f64_lossy()).collect();
    let e: Vec<f64> = expected.iter().map(|v| v.to_f64_lossy()).collect();
    let x2 = chi_square_sum(&o, &e)?;
    let df = (o.len() - 1) as f64;
    Ok(TestResult::new(T::lit(x2), T::lit(special::chi2_sf(x2, df)), vec![T::lit(df)], desc))
}

/// Pearson independence test on an `r × c` table, without continuity
/// correction.
pub fn chi_square_independence<T: Scalar>(table: &[Vec<T>]) -> Result<TestResult<T>> {
    let r = table.len();
    let c = table.first().map_or(0, Vec::len);
    if r < 2 || c < 2 || table.iter().any(|row| row.len() != c) {
        return Err(MetricError::ShapeMismatch(vec![r, c], vec![2, 2]));
    }
    let desc = ConventionDescriptor::overall(MetricId::ChiSquare, FormulaFamily::Independence);
    let t: Vec<Vec<f64>> = table
        .iter()
        .map(|row| row.iter().map(|v| v.to_f64_lossy()).collect())
        .collect();
    let rows: Vec<f64> = t.iter().map(|row| row.iter().sum()).collect();
    let cols: Vec<f64> = (0..c).map(|j| t.iter().map(|row| row[j]).sum()).collect();
    let total: f64 = rows.iter().sum();
    let mut o = Vec::with_capacity(r * c);
    let mut e = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            o.push(t[i][j]);
            e.push(rows[i] * cols[j] / total);
        }
    }
    let x2 = chi_square_sum(&o, &e)?;
    let df = ((r - 1) * (c - 1)) as f64;
    Ok(TestResult::new(T::lit(x2), T::lit(special::chi2_sf(x2, df)), vec![T::lit(df)], desc))
}

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Shapiro–Wilk W with Royston's approximation for coefficients and
/// p-value; `3 <= n <= 5000`.
pub fn shapiro_wilk<T: Scalar>(x: &[T]) -> Result<TestResult<T>> {
    let n = x.len();
    if !(3..=5000).contains(&n) {
        return Err(MetricError::InvalidParameter(format!(
            "Shapiro-Wilk requires 3 <= n <= 5000, got {n}"
        )));
    }
    let desc = ConventionDescriptor::overall(MetricId::ShapiroWilk, FormulaFamily::RoystonApprox);
    let xs = numeric::sorted(&x.iter().map(|v| v.to_f64_lossy()).collect::<Vec<_>>());
    let range = xs[n - 1] - xs[0];
    if !(range > 0.0) {
        return Ok(TestResult::undefined(desc));
    }
    let a = shapiro_coefficients(n);
    let num: f64 = a
        .iter()
        .enumerate()
        .map(|(i, &ai)| ai * (xs[n - 1 - i] - xs[i]))
        .sum();
    let w = (num * num / numeric::sum_sq_dev(&xs)).min(1.0);
    Ok(TestResult::new(T::lit(w), T::lit(shapiro_p(w, n)), Vec::new(), desc))
}

/// Antisymmetric weights `a_1..a_{n/2}` for the upper minus lower order
/// statistics.
fn shapiro_coefficients(n: usize) -> Vec<f64> {
    const C1: [f64; 6] = [0.0, 0.221_157, -0.147_981, -2.071_19, 4.434_685, -2.706_056];
    const C2: [f64; 6] = [0.0, 0.042_981, -0.293_762, -1.752_461, 5.682_633, -3.582_633];
    let half = n / 2;
    if n == 3 {
        return vec![std::f64::consts::FRAC_1_SQRT_2];
    }
    let an25 = n as f64 + 0.25;
    let m: Vec<f64> = (1..=half)
        .map(|i| special::normal_quantile((i as f64 - 0.375) / an25))
        .collect();
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / (n as f64).sqrt();
    let a1 = poly(&C1, rsn) - m[0] / ssumm2;
    let mut a = vec![0.0; half];
    a[0] = a1;
    let (start, fac) = if n > 5 {
        let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2)).sqrt();
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    for i in start..half {
        a[i] = -m[i] / fac;
    }
    a
}

fn shapiro_p(w: f64, n: usize) -> f64 {
    const C3: [f64; 4] = [0.544, -0.399_78, 0.025_054, -6.714e-4];
    const C4: [f64; 4] = [1.382_2, -0.778_57, 0.062_767, -0.002_032_2];
    const C5: [f64; 4] = [-1.586_1, -0.310_82, -0.083_751, 0.003_891_5];
    const C6: [f64; 3] = [-0.480_3, -0.082_676, 0.003_030_2];
    const G: [f64; 2] = [-2.273, 0.459];
    if n == 3 {
        let p = 6.0 / PI * (w.sqrt().asin() - (0.75f64).sqrt().asin());
        return p.clamp(0.0, 1.0);
    }
    let an = n as f64;
    let mut y = (1.0 - w).ln();
    let (m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99;
        }
        y = -(gamma - y).ln();
        (poly(&C3, an), poly(&C4, an).exp())
    } else {
        let xx = an.ln();
        (poly(&C5, xx), poly(&C6, xx).exp())
    };
    special::normal_sf((y - m) / s).clamp(0.0, 1.0)
}
