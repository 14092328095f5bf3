//! Hypothesis tests with explicit statistic, tail, centering and exactness
//! conventions. Every p-value is formed from complementary tail
//! probabilities and lies in [0, 1] by construction.

mod distribution;
mod ks;
mod permutation;
mod rank;
mod t_tests;
mod variance;

use std::fmt;
use std::str::FromStr;

pub use distribution::{anova, chi_square_gof, chi_square_independence, distribution_tests, shapiro_wilk, DistributionTest};
pub use ks::{ks_2samp, ks_exact_p, KsMethod, KS_EXACT_LIMIT};
pub use permutation::{permutation_test, PermMethod, PermStatistic, EXACT_SPLIT_LIMIT};
pub use rank::{
    kruskal_wallis, mann_whitney, mwu_exact_table, rank_tests, wilcoxon_signed_rank, MannWhitneyOptions, PMethod,
    RankTest, UStatistic, WStatistic, WilcoxonOptions, ZeroPolicy,
};
pub use t_tests::{t_tests, TKind};
pub use variance::{bartlett, f_test, levene, variance_tests, LeveneCenter, VarianceTest};

use crate::error::{MetricError, Result};
use crate::numeric;
use crate::scalar::Scalar;

/// One, two or `g` samples. Paired data is two equal-length groups.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGroups<T> {
    groups: Vec<Vec<T>>,
    paired: bool,
}

impl<T: Scalar> SampleGroups<T> {
    /// Independent groups, each with at least two finite values.
    pub fn new(groups: Vec<Vec<T>>) -> Result<Self> {
        if groups.is_empty() {
            return Err(MetricError::TooFewSamples { need: 1, got: 0 });
        }
        for g in &groups {
            if g.len() < 2 {
                return Err(MetricError::TooFewSamples { need: 2, got: g.len() });
            }
            if !numeric::all_finite(g) {
                return Err(MetricError::NonFinite);
            }
        }
        Ok(SampleGroups { groups, paired: false })
    }

    /// Two matched samples of equal length.
    pub fn paired(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(MetricError::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let mut s = Self::new(vec![x, y])?;
        s.paired = true;
        Ok(s)
    }

    pub fn groups(&self) -> &[Vec<T>] {
        &self.groups
    }

    pub fn group(&self, i: usize) -> &[T] {
        &self.groups[i]
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn is_paired(&self) -> bool {
        self.paired
    }

    pub fn total_len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub(crate) fn require_groups(&self, need: usize) -> Result<()> {
        if self.n_groups() != need {
            return Err(MetricError::InvalidParameter(format!(
                "expected {need} groups, got {}",
                self.n_groups()
            )));
        }
        Ok(())
    }

    pub(crate) fn require_at_least(&self, need: usize) -> Result<()> {
        if self.n_groups() < need {
            return Err(MetricError::InvalidParameter(format!(
                "expected at least {need} groups, got {}",
                self.n_groups()
            )));
        }
        Ok(())
    }

    /// `x - y` for two equal-length groups.
    pub(crate) fn differences(&self) -> Result<Vec<T>> {
        self.require_groups(2)?;
        let (x, y) = (self.group(0), self.group(1));
        if x.len() != y.len() {
            return Err(MetricError::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        Ok(x.iter().zip(y).map(|(&a, &b)| a - b).collect())
    }
}

/// Alternative hypothesis. `Greater` means the first sample (or the
/// statistic) tends to be larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Tail {
    #[default]
    TwoSided,
    Greater,
    Less,
}

impl Tail {
    pub fn name(self) -> &'static str {
        match self {
            Tail::TwoSided => "two_sided",
            Tail::Greater => "greater",
            Tail::Less => "less",
        }
    }

    /// Combines lower and upper tail probabilities of the observed
    /// statistic; two-sided is `min(1, 2·min(lower, upper))`.
    pub fn p_value(self, lower: f64, upper: f64) -> f64 {
        let p = match self {
            Tail::TwoSided => 2.0 * lower.min(upper),
            Tail::Greater => upper,
            Tail::Less => lower,
        };
        p.clamp(0.0, 1.0)
    }
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tail {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_sided" => Ok(Tail::TwoSided),
            "greater" => Ok(Tail::Greater),
            "less" => Ok(Tail::Less),
            other => Err(MetricError::InvalidParameter(format!("unknown tail {other:?}"))),
        }
    }
}
