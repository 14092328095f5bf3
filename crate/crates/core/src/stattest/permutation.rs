use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{SampleGroups, Tail};
use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId, ParamKey};
use crate::error::{MetricError, Result};
use crate::numeric;
use crate::scalar::Scalar;
use crate::special;
use crate::value::TestResult;

/// Largest `C(n1 + n2, n1)` accepted by exact enumeration.
pub const EXACT_SPLIT_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PermStatistic {
    MeanDiff,
    MedianDiff,
}

impl PermStatistic {
    pub fn name(self) -> &'static str {
        match self {
            PermStatistic::MeanDiff => "mean_diff",
            PermStatistic::MedianDiff => "median_diff",
        }
    }

    fn eval(self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            PermStatistic::MeanDiff => numeric::mean(x) - numeric::mean(y),
            PermStatistic::MedianDiff => numeric::median(x) - numeric::median(y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermMethod {
    ExactEnumeration,
    /// Resample `i` draws from its own ChaCha stream `i` under `seed`, so
    /// the result does not depend on scheduling.
    MonteCarlo { n_resamples: usize, seed: u64 },
}

/// Two-sample permutation test of `statistic(x) − statistic(y)`.
///
/// Two-sided counts `|T*| >= |T_obs|`. Monte Carlo uses the add-one
/// estimate `(hits + 1) / (N + 1)`.
pub fn permutation_test<T: Scalar>(
    s: &SampleGroups<T>,
    statistic: PermStatistic,
    method: PermMethod,
    tail: Tail,
) -> Result<TestResult<T>> {
    s.require_groups(2)?;
    let x: Vec<f64> = s.group(0).iter().map(|v| v.to_f64_lossy()).collect();
    let y: Vec<f64> = s.group(1).iter().map(|v| v.to_f64_lossy()).collect();
    let n1 = x.len();
    let pooled: Vec<f64> = x.iter().chain(&y).copied().collect();
    let observed = statistic.eval(&x, &y);
    let hit = Hit::new(observed, tail);

    let family = match method {
        PermMethod::ExactEnumeration => FormulaFamily::ExactEnumeration,
        PermMethod::MonteCarlo { .. } => FormulaFamily::MonteCarlo,
    };
    let mut desc = ConventionDescriptor::overall(MetricId::PermutationTest, family)
        .with(ParamKey::PermStatistic, statistic.name())
        .with(ParamKey::Tail, tail.name());

    let p = match method {
        PermMethod::ExactEnumeration => {
            let splits = special::ln_binomial(pooled.len() as u64, n1 as u64).exp().round();
            if splits > EXACT_SPLIT_LIMIT as f64 {
                return Err(MetricError::InvalidParameter(format!(
                    "exact enumeration needs {splits} splits, limit is {EXACT_SPLIT_LIMIT}"
                )));
            }
            let (hits, total) = enumerate(&pooled, n1, statistic, &hit);
            hits as f64 / total as f64
        }
        PermMethod::MonteCarlo { n_resamples, seed } => {
            if n_resamples == 0 {
                return Err(MetricError::InvalidParameter("n_resamples must be positive".into()));
            }
            desc = desc
                .with(ParamKey::Resamples, n_resamples)
                .with(ParamKey::Seed, seed as i64);
            let hits: u64 = (0..n_resamples as u64)
                .into_par_iter()
                .map_init(
                    || (pooled.clone(), Vec::with_capacity(n1), Vec::with_capacity(pooled.len() - n1)),
                    |(buf, a, b), i| {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(i);
                        buf.copy_from_slice(&pooled);
                        // partial Fisher–Yates: the first n1 slots become group x
                        for k in 0..n1 {
                            let j = rng.gen_range(k..buf.len());
                            buf.swap(k, j);
                        }
                        a.clear();
                        a.extend_from_slice(&buf[..n1]);
                        b.clear();
                        b.extend_from_slice(&buf[n1..]);
                        u64::from(hit.test(statistic.eval(a, b)))
                    },
                )
                .sum();
            (hits + 1) as f64 / (n_resamples + 1) as f64
        }
    };
    Ok(TestResult::new(T::lit(observed), T::lit(p.clamp(0.0, 1.0)), Vec::new(), desc))
}

struct Hit {
    observed: f64,
    tail: Tail,
    tol: f64,
}

impl Hit {
    fn new(observed: f64, tail: Tail) -> Self {
        let tol = 1e-12 * observed.abs().max(1.0);
        Hit { observed, tail, tol }
    }

    fn test(&self, t: f64) -> bool {
        match self.tail {
            Tail::TwoSided => t.abs() >= self.observed.abs() - self.tol,
            Tail::Greater => t >= self.observed - self.tol,
            Tail::Less => t <= self.observed + self.tol,
        }
    }
}

/// Visits every size-`k` subset of `pooled` as the first group.
fn enumerate(pooled: &[f64], k: usize, statistic: PermStatistic, hit: &Hit) -> (u64, u64) {
    let n = pooled.len();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut a = Vec::with_capacity(k);
    let mut b = Vec::with_capacity(n - k);
    let mut chosen = vec![false; n];
    let (mut hits, mut total) = (0u64, 0u64);
    loop {
        chosen.iter_mut().for_each(|c| *c = false);
        a.clear();
        for &i in &idx {
            chosen[i] = true;
            a.push(pooled[i]);
        }
        b.clear();
        b.extend((0..n).filter(|&i| !chosen[i]).map(|i| pooled[i]));
        total += 1;
        hits += u64::from(hit.test(statistic.eval(&a, &b)));

        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            break;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
    (hits, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn groups(x: &[f64], y: &[f64]) -> SampleGroups<f64> {
        SampleGroups::new(vec![x.to_vec(), y.to_vec()]).unwrap()
    }

    #[test]
    fn exact_small_case() {
        let s = groups(&[1.0, 2.0], &[3.0, 4.0]);
        let r = permutation_test(&s, PermStatistic::MeanDiff, PermMethod::ExactEnumeration, Tail::TwoSided).unwrap();
        assert_eq!(r.statistic, -2.0);
        assert_relative_eq!(r.p_value, 1.0 / 3.0, epsilon = 1e-15);
        let l = permutation_test(&s, PermStatistic::MeanDiff, PermMethod::ExactEnumeration, Tail::Less).unwrap();
        assert_relative_eq!(l.p_value, 1.0 / 6.0, epsilon = 1e-15);
        let same = groups(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        for stat in [PermStatistic::MeanDiff, PermStatistic::MedianDiff] {
            let r = permutation_test(&same, stat, PermMethod::ExactEnumeration, Tail::TwoSided).unwrap();
            assert_eq!(r.p_value, 1.0);
        }
    }

    #[test]
    fn monte_carlo_near_exact_and_reproducible() {
        let s = groups(&[1.0, 2.0], &[3.0, 4.0]);
        let mc = PermMethod::MonteCarlo { n_resamples: 10_000, seed: 42 };
        let a = permutation_test(&s, PermStatistic::MeanDiff, mc, Tail::TwoSided).unwrap();
        let b = permutation_test(&s, PermStatistic::MeanDiff, mc, Tail::TwoSided).unwrap();
        assert_eq!(a.p_value.to_bits(), b.p_value.to_bits());
        let sigma = (1.0f64 / 3.0 * 2.0 / 3.0 / 10_000.0).sqrt();
        assert!((a.p_value - 1.0 / 3.0).abs() < 3.0 * sigma);
        assert_eq!(a.descriptor.family, FormulaFamily::MonteCarlo);
    }

    #[test]
    fn exact_budget() {
        let x: Vec<f64> = (0..15).map(f64::from).collect();
        let y: Vec<f64> = (0..15).map(|v| f64::from(v) + 0.5).collect();
        assert!(permutation_test(&groups(&x, &y), PermStatistic::MeanDiff, PermMethod::ExactEnumeration, Tail::TwoSided).is_err());
    }
}
