use super::{SampleGroups, Tail};
use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId, ParamKey};
use crate::error::{MetricError, Result};
use crate::numeric::{average_ranks, tie_groups};
use crate::scalar::Scalar;
use crate::special;
use crate::value::TestResult;

/// Work bound for exact rank-sum dynamic programmes.
const EXACT_WORK_LIMIT: usize = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UStatistic {
    U1,
    U2,
    /// Rank sum of the first sample, `U1 + n1(n1+1)/2`.
    RankSumW,
}

impl UStatistic {
    pub fn name(self) -> &'static str {
        match self {
            UStatistic::U1 => "u1",
            UStatistic::U2 => "u2",
            UStatistic::RankSumW => "rank_sum_w",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PMethod {
    Normal,
    Exact,
}

impl PMethod {
    pub fn name(self) -> &'static str {
        match self {
            PMethod::Normal => "normal",
            PMethod::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MannWhitneyOptions {
    pub statistic: UStatistic,
    /// Continuity correction of the normal approximation.
    pub continuity: bool,
    pub method: PMethod,
    pub tail: Tail,
}

impl Default for MannWhitneyOptions {
    fn default() -> Self {
        MannWhitneyOptions {
            statistic: UStatistic::U1,
            continuity: true,
            method: PMethod::Normal,
            tail: Tail::TwoSided,
        }
    }
}

/// Treatment of zero differences in the signed-rank test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZeroPolicy {
    /// Discard zeros before ranking.
    Wilcoxon,
    /// Rank with zeros, then drop their ranks.
    Pratt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WStatistic {
    WPlus,
    WMin,
}

impl WStatistic {
    pub fn name(self) -> &'static str {
        match self {
            WStatistic::WPlus => "w_plus",
            WStatistic::WMin => "w_min",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WilcoxonOptions {
    pub zero_policy: ZeroPolicy,
    pub statistic: WStatistic,
    pub method: PMethod,
    pub tail: Tail,
}

impl Default for WilcoxonOptions {
    fn default() -> Self {
        WilcoxonOptions {
            zero_policy: ZeroPolicy::Wilcoxon,
            statistic: WStatistic::WPlus,
            method: PMethod::Normal,
            tail: Tail::TwoSided,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankTest {
    MannWhitney(MannWhitneyOptions),
    KruskalWallis,
    WilcoxonSignedRank(WilcoxonOptions),
}

pub fn rank_tests<T: Scalar>(s: &SampleGroups<T>, kind: RankTest) -> Result<TestResult<T>> {
    match kind {
        RankTest::MannWhitney(o) => mann_whitney(s, o),
        RankTest::KruskalWallis => kruskal_wallis(s),
        RankTest::WilcoxonSignedRank(o) => wilcoxon_signed_rank(s, o),
    }
}

fn pooled_ranks<T: Scalar>(s: &SampleGroups<T>) -> Vec<f64> {
    let pooled: Vec<f64> = s.groups().iter().flatten().map(|v| v.to_f64_lossy()).collect();
    average_ranks(&pooled)
}

/// `Σ (t³ − t)` over tie groups.
fn tie_sum(values: &[f64]) -> f64 {
    tie_groups(values)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum()
}

/// Mann–Whitney U test on groups 0 (x) and 1 (y). `U1` counts pairs with
/// `x > y` plus half the ties; the p-value does not depend on which
/// equivalent statistic is reported.
pub fn mann_whitney<T: Scalar>(s: &SampleGroups<T>, o: MannWhitneyOptions) -> Result<TestResult<T>> {
    s.require_groups(2)?;
    let family = match o.method {
        PMethod::Normal => FormulaFamily::NormalApprox,
        PMethod::Exact => FormulaFamily::Exact,
    };
    let mut desc = ConventionDescriptor::overall(MetricId::MannWhitneyU, family)
        .with(ParamKey::Statistic, o.statistic.name())
        .with(ParamKey::Tail, o.tail.name());
    if o.method == PMethod::Normal {
        desc = desc.with(ParamKey::Continuity, o.continuity);
    }
    let (n1, n2) = (s.group(0).len(), s.group(1).len());
    let ranks = pooled_ranks(s);
    let r1: f64 = ranks[..n1].iter().sum();
    let u1 = r1 - (n1 * (n1 + 1)) as f64 / 2.0;
    let prod = (n1 * n2) as f64;
    let reported = match o.statistic {
        UStatistic::U1 => u1,
        UStatistic::U2 => prod - u1,
        UStatistic::RankSumW => r1,
    };

    let (lower, upper) = match o.method {
        PMethod::Normal => {
            let n = (n1 + n2) as f64;
            let mu = prod / 2.0;
            let var = prod / 12.0 * ((n + 1.0) - tie_sum(&ranks) / (n * (n - 1.0)));
            if !(var > 0.0) {
                return Ok(TestResult::undefined(desc));
            }
            let sd = var.sqrt();
            let cc = if o.continuity { 0.5 } else { 0.0 };
            (
                special::normal_cdf((u1 - mu + cc) / sd),
                special::normal_sf((u1 - mu - cc) / sd),
            )
        }
        PMethod::Exact => {
            let doubled: Vec<u64> = ranks.iter().map(|&r| (2.0 * r).round() as u64).collect();
            // enumerate the smaller group's rank sum
            let (m, obs_idx) = if n1 <= n2 { (n1, 0..n1) } else { (n2, n1..n1 + n2) };
            let dist = subset_sum_distribution(&doubled, m)?;
            let obs: u64 = doubled[obs_idx].iter().sum();
            let (le, ge) = tails(&dist, obs);
            if n1 <= n2 {
                (le, ge)
            } else {
                // a large rank sum for y is a small U1
                (ge, le)
            }
        }
    };
    let p = o.tail.p_value(lower, upper);
    Ok(TestResult::new(T::lit(reported), T::lit(p), Vec::new(), desc))
}

/// `(P(S <= obs), P(S >= obs))` for a probability table indexed by `S`.
fn tails(dist: &[f64], obs: u64) -> (f64, f64) {
    let obs = obs as usize;
    let le: f64 = dist[..=obs.min(dist.len() - 1)].iter().sum();
    let ge: f64 = if obs < dist.len() { dist[obs..].iter().sum() } else { 0.0 };
    (le.min(1.0), ge.min(1.0))
}

/// Null distribution of the sum of `m` items drawn without replacement from
/// `values`, as probabilities indexed by the sum.
fn subset_sum_distribution(values: &[u64], m: usize) -> Result<Vec<f64>> {
    let counts = subset_sum_counts(values, m)?;
    let total: f64 = counts.iter().sum();
    Ok(counts.into_iter().map(|c| c / total).collect())
}

/// Number of `m`-subsets of `values` with each sum.
fn subset_sum_counts(values: &[u64], m: usize) -> Result<Vec<f64>> {
    let top: u64 = {
        let mut v = values.to_vec();
        v.sort_unstable();
        v.iter().rev().take(m).sum()
    };
    let width = top as usize + 1;
    let work = values.len().saturating_mul(m).saturating_mul(width);
    if work > EXACT_WORK_LIMIT {
        return Err(MetricError::GuardExceeded(format!(
            "exact rank-sum distribution needs {work} steps"
        )));
    }
    // dp[k][s]: number of k-subsets of the items seen so far with sum s
    let mut dp = vec![vec![0.0f64; width]; m + 1];
    dp[0][0] = 1.0;
    for (seen, &v) in values.iter().enumerate() {
        let v = v as usize;
        for k in (1..=m.min(seen + 1)).rev() {
            let (lo, hi) = dp.split_at_mut(k);
            let (prev, cur) = (&lo[k - 1], &mut hi[0]);
            for s in (v..width).rev() {
                cur[s] += prev[s - v];
            }
        }
    }
    Ok(dp.swap_remove(m))
}

/// Number of `(x, y)` orderings giving each `U` from 0 to `n1·n2` with no
/// ties, via the rank-sum dynamic programme.
pub fn mwu_exact_table(n1: usize, n2: usize) -> Result<Vec<f64>> {
    let doubled: Vec<u64> = (1..=(n1 + n2) as u64).map(|r| 2 * r).collect();
    let counts = subset_sum_counts(&doubled, n1)?;
    let offset = n1 * (n1 + 1);
    Ok((0..=n1 * n2).map(|u| counts[2 * u + offset]).collect())
}

/// Kruskal–Wallis H with the tie correction and a χ²(g−1) p-value.
pub fn kruskal_wallis<T: Scalar>(s: &SampleGroups<T>) -> Result<TestResult<T>> {
    s.require_at_least(2)?;
    let desc = ConventionDescriptor::overall(MetricId::KruskalWallis, FormulaFamily::TieCorrected);
    let ranks = pooled_ranks(s);
    let n = ranks.len() as f64;
    let mut offset = 0;
    let mut acc = 0.0;
    for g in s.groups() {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        acc += r * r / g.len() as f64;
        offset += g.len();
    }
    let h = 12.0 / (n * (n + 1.0)) * acc - 3.0 * (n + 1.0);
    let c = 1.0 - tie_sum(&ranks) / (n * n * n - n);
    if !(c > 0.0) {
        return Ok(TestResult::undefined(desc));
    }
    let h = (h / c).max(0.0);
    let df = (s.n_groups() - 1) as f64;
    Ok(TestResult::new(T::lit(h), T::lit(special::chi2_sf(h, df)), vec![T::lit(df)], desc))
}

/// Signed-rank test on one group of differences, or on `x − y` for two
/// equal-length groups.
pub fn wilcoxon_signed_rank<T: Scalar>(s: &SampleGroups<T>, o: WilcoxonOptions) -> Result<TestResult<T>> {
    let d: Vec<f64> = match s.n_groups() {
        1 => s.group(0).iter().map(|v| v.to_f64_lossy()).collect(),
        _ => s.differences()?.iter().map(|v| v.to_f64_lossy()).collect(),
    };
    let family = match o.zero_policy {
        ZeroPolicy::Wilcoxon => FormulaFamily::WilcoxonZeros,
        ZeroPolicy::Pratt => FormulaFamily::PrattZeros,
    };
    let desc = ConventionDescriptor::overall(MetricId::WilcoxonSignedRank, family)
        .with(ParamKey::PMethod, o.method.name())
        .with(ParamKey::Statistic, o.statistic.name())
        .with(ParamKey::Tail, o.tail.name());

    let n_zero = d.iter().filter(|&&v| v == 0.0).count();
    if n_zero == d.len() && o.zero_policy == ZeroPolicy::Wilcoxon {
        return Err(MetricError::Domain("all differences are zero".into()));
    }
    let ranked: Vec<f64> = match o.zero_policy {
        ZeroPolicy::Wilcoxon => d.iter().copied().filter(|&v| v != 0.0).collect(),
        ZeroPolicy::Pratt => d.clone(),
    };
    let abs: Vec<f64> = ranked.iter().map(|v| v.abs()).collect();
    let ranks = average_ranks(&abs);
    // signed ranks of the nonzero differences
    let nonzero: Vec<(f64, f64)> = ranked
        .iter()
        .zip(&ranks)
        .filter(|(&v, _)| v != 0.0)
        .map(|(&v, &r)| (v, r))
        .collect();
    let w_plus: f64 = nonzero.iter().filter(|(v, _)| *v > 0.0).map(|(_, r)| r).sum();
    let w_minus: f64 = nonzero.iter().filter(|(v, _)| *v < 0.0).map(|(_, r)| r).sum();
    let reported = match o.statistic {
        WStatistic::WPlus => w_plus,
        WStatistic::WMin => w_plus.min(w_minus),
    };
    if nonzero.is_empty() {
        return Ok(TestResult::undefined(desc));
    }

    let (lower, upper) = match o.method {
        PMethod::Normal => {
            let count = ranked.len() as f64;
            let mut mn = count * (count + 1.0) * 0.25;
            let mut se = count * (count + 1.0) * (2.0 * count + 1.0);
            if o.zero_policy == ZeroPolicy::Pratt {
                let z = n_zero as f64;
                mn -= z * (z + 1.0) * 0.25;
                se -= z * (z + 1.0) * (2.0 * z + 1.0);
            }
            let nz_ranks: Vec<f64> = nonzero.iter().map(|(_, r)| *r).collect();
            se -= 0.5 * tie_sum(&nz_ranks);
            if !(se > 0.0) {
                return Ok(TestResult::undefined(desc));
            }
            let z = (w_plus - mn) / (se / 24.0).sqrt();
            (special::normal_cdf(z), special::normal_sf(z))
        }
        PMethod::Exact => {
            let doubled: Vec<u64> = nonzero.iter().map(|(_, r)| (2.0 * r).round() as u64).collect();
            let dist = signed_rank_distribution(&doubled)?;
            tails(&dist, (2.0 * w_plus).round() as u64)
        }
    };
    let p = o.tail.p_value(lower, upper);
    Ok(TestResult::new(T::lit(reported), T::lit(p), Vec::new(), desc))
}

/// Distribution of the sum of a random subset (each item in or out with
/// probability ½) of `values`, as probabilities indexed by the sum.
fn signed_rank_distribution(values: &[u64]) -> Result<Vec<f64>> {
    let width = values.iter().sum::<u64>() as usize + 1;
    if values.len() > 1000 || values.len().saturating_mul(width) > EXACT_WORK_LIMIT {
        return Err(MetricError::GuardExceeded(format!(
            "exact signed-rank distribution for n = {}",
            values.len()
        )));
    }
    let mut dist = vec![0.0f64; width];
    dist[0] = 1.0;
    for &v in values {
        let v = v as usize;
        for s in (v..width).rev() {
            dist[s] = 0.5 * (dist[s] + dist[s - v]);
        }
        for p in dist[..v].iter_mut() {
            *p *= 0.5;
        }
    }
    Ok(dist)
}
