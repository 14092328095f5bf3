//! Convention descriptors: the explicit answer to "which variant of this
//! metric was computed".
//!
//! A [`ConventionDescriptor`] is the triple (formula family, reporting mode,
//! parameter bag) attached to a [`MetricId`]. Two values of the same metric
//! that differ only in reporting mode or reporting parameters are the same
//! formula presented differently; values that differ in formula family or in
//! a formula parameter are different computations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{MetricError, Result};

/// Coarse grouping of the catalog, one per input shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    Classification,
    Regression,
    Clustering,
    Correlation,
    StatTest,
    Segmentation,
    Image,
}

macro_rules! metric_ids {
    ($( $variant:ident => $name:literal, $domain:ident ;)*) => {
        /// Every metric in the catalog.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum MetricId {
            $( $variant, )*
        }

        impl MetricId {
            pub const ALL: &'static [MetricId] = &[ $( MetricId::$variant, )* ];

            pub fn name(self) -> &'static str {
                match self { $( MetricId::$variant => $name, )* }
            }

            pub fn domain(self) -> Domain {
                match self { $( MetricId::$variant => Domain::$domain, )* }
            }
        }

        impl FromStr for MetricId {
            type Err = MetricError;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $( $name => Ok(MetricId::$variant), )*
                    other => Err(MetricError::UnknownMetric(other.to_string())),
                }
            }
        }
    };
}

metric_ids! {
    Accuracy => "accuracy", Classification;
    BalancedAccuracy => "balanced_accuracy", Classification;
    Precision => "precision", Classification;
    Recall => "recall", Classification;
    F1 => "f1", Classification;
    FBeta => "f_beta", Classification;
    Jaccard => "jaccard", Classification;
    CohenKappa => "cohen_kappa", Classification;
    Mcc => "mcc", Classification;
    LogLoss => "log_loss", Classification;
    RocAuc => "roc_auc", Classification;
    GMean => "g_mean", Classification;

    Mae => "mae", Regression;
    Mse => "mse", Regression;
    Rmse => "rmse", Regression;
    MedianAe => "median_ae", Regression;
    Mape => "mape", Regression;
    Msle => "msle", Regression;
    RSquared => "r_squared", Regression;
    ExplainedVariance => "explained_variance", Regression;
    TweedieDeviance => "tweedie_deviance", Regression;
    Huber => "huber", Regression;

    Silhouette => "silhouette", Clustering;
    DaviesBouldin => "davies_bouldin", Clustering;
    CalinskiHarabasz => "calinski_harabasz", Clustering;
    Wcss => "wcss", Clustering;

    Pearson => "pearson", Correlation;
    Spearman => "spearman", Correlation;
    KendallTau => "kendall_tau", Correlation;
    MutualInformation => "mutual_information", Correlation;
    DistanceCorrelation => "distance_correlation", Correlation;
    BiweightMidcorrelation => "biweight_midcorrelation", Correlation;
    PercentageBend => "percentage_bend", Correlation;
    Shepherd => "shepherd", Correlation;
    PartialCorrelation => "partial_correlation", Correlation;

    TTestIndependent => "t_test_independent", StatTest;
    TTestPaired => "t_test_paired", StatTest;
    TTestWelch => "t_test_welch", StatTest;
    ZTest => "z_test", StatTest;
    KsTest => "ks_test", StatTest;
    Anova => "anova", StatTest;
    KruskalWallis => "kruskal_wallis", StatTest;
    MannWhitneyU => "mann_whitney_u", StatTest;
    ShapiroWilk => "shapiro_wilk", StatTest;
    FTest => "f_test", StatTest;
    Bartlett => "bartlett", StatTest;
    Levene => "levene", StatTest;
    ChiSquare => "chi_square", StatTest;
    WilcoxonSignedRank => "wilcoxon_signed_rank", StatTest;
    PermutationTest => "permutation_test", StatTest;

    SegAccuracy => "seg_accuracy", Segmentation;
    SegPrecision => "seg_precision", Segmentation;
    SegRecall => "seg_recall", Segmentation;
    SegF1 => "seg_f1", Segmentation;
    Dice => "dice", Segmentation;
    Iou => "iou", Segmentation;
    MeanIou => "mean_iou", Segmentation;
    BoundaryF1 => "boundary_f1", Segmentation;
    Hausdorff => "hausdorff", Segmentation;
    AdaptedRandError => "adapted_rand_error", Segmentation;
    AdjustedRandIndex => "adjusted_rand_index", Segmentation;
    VariationOfInformation => "variation_of_information", Segmentation;

    ImgMae => "img_mae", Image;
    ImgMse => "img_mse", Image;
    ImgRmse => "img_rmse", Image;
    ImgRSquared => "img_r_squared", Image;
    Psnr => "psnr", Image;
    Ssim => "ssim", Image;
}

impl MetricId {
    /// Parameter keys a descriptor for this metric may carry.
    pub fn param_schema(self) -> &'static [ParamKey] {
        use MetricId::*;
        use ParamKey as K;
        match self {
            Accuracy | CohenKappa | GMean => &[K::ZeroDivision],
            BalancedAccuracy | Precision | Recall | F1 | Jaccard | Mcc => &[K::ZeroDivision],
            FBeta => &[K::Beta, K::ZeroDivision],
            LogLoss => &[K::Epsilon],
            RocAuc => &[],
            Mae | Mse | Rmse | MedianAe | Msle | ExplainedVariance => &[],
            Mape => &[K::Units, K::ZeroPolicy, K::Epsilon],
            RSquared | ImgRSquared => &[K::Predictors],
            TweedieDeviance => &[K::Power],
            Huber => &[K::Delta],
            Silhouette | DaviesBouldin | CalinskiHarabasz | Wcss => &[],
            Pearson | Spearman | KendallTau | DistanceCorrelation | Shepherd
            | PartialCorrelation => &[],
            MutualInformation => &[K::Bins],
            BiweightMidcorrelation => &[K::BiweightC],
            PercentageBend => &[K::Bend],
            TTestIndependent | TTestPaired | TTestWelch | FTest => &[K::Output, K::Tail],
            ZTest => &[K::Output, K::Tail, K::Sigma],
            KsTest | Anova | KruskalWallis | ShapiroWilk | Bartlett | ChiSquare => &[K::Output],
            Levene => &[K::Output, K::TrimFraction],
            MannWhitneyU => &[K::Output, K::Statistic, K::Continuity, K::Tail],
            WilcoxonSignedRank => &[K::Output, K::Statistic, K::PMethod, K::Tail],
            PermutationTest => &[
                K::Output,
                K::Tail,
                K::PermStatistic,
                K::Resamples,
                K::Seed,
            ],
            SegAccuracy | SegPrecision | SegRecall | SegF1 | Dice | Iou | MeanIou => {
                &[K::EmptyPolicy]
            }
            BoundaryF1 => &[K::Theta, K::Connectivity],
            Hausdorff => &[K::PointSet, K::Quantile, K::Connectivity],
            AdaptedRandError | AdjustedRandIndex | VariationOfInformation => &[],
            ImgMae | ImgMse | ImgRmse => &[],
            Psnr => &[K::DataRange],
            Ssim => &[K::DataRange, K::Window, K::GaussianSigma, K::K1, K::K2],
        }
    }

    /// Formula families registered for this metric, in registry order.
    pub fn families(self) -> &'static [FormulaFamily] {
        use FormulaFamily as F;
        use MetricId::*;
        match self {
            BalancedAccuracy => &[F::MeanRecall, F::ChanceCorrected],
            Mcc => &[F::OneVsRest, F::Generalized],
            RocAuc => &[F::RankHalfCredit],
            RSquared | ImgRSquared => &[
                F::CoefficientOfDetermination,
                F::SquaredPearson,
                F::Adjusted,
            ],
            Wcss => &[F::RecomputedMeans, F::ProvidedCenters],
            Spearman => &[F::AverageRanks],
            KendallTau => &[F::TauA, F::TauB],
            MutualInformation => &[F::EqualWidthHistogram],
            DistanceCorrelation => &[F::DoubleCentered],
            BiweightMidcorrelation => &[F::MedianMad, F::MeanSd],
            PercentageBend => &[F::WilcoxBend],
            Shepherd => &[F::MahalanobisPruned],
            PartialCorrelation => &[F::ResidualPearson],
            TTestIndependent => &[F::Pooled],
            TTestPaired => &[F::Paired],
            TTestWelch => &[F::Welch],
            ZTest => &[F::KnownSigma],
            KsTest => &[F::Asymptotic, F::Exact],
            Anova => &[F::OneWay],
            KruskalWallis => &[F::TieCorrected],
            MannWhitneyU => &[F::NormalApprox, F::Exact],
            ShapiroWilk => &[F::RoystonApprox],
            FTest => &[F::VarianceRatio],
            Bartlett => &[F::Standard],
            Levene => &[F::MeanCentered, F::MedianCentered, F::TrimmedCentered],
            ChiSquare => &[F::GoodnessOfFit, F::Independence],
            WilcoxonSignedRank => &[F::WilcoxonZeros, F::PrattZeros],
            PermutationTest => &[F::ExactEnumeration, F::MonteCarlo],
            Hausdorff => &[F::SymmetricMax, F::DirectedAB, F::DirectedBA, F::Percentile],
            Ssim => &[F::GaussianWindow, F::UniformWindow],
            _ => &[F::Standard],
        }
    }

    /// True for metrics whose primary output is a test statistic / p-value pair.
    pub fn is_test(self) -> bool {
        self.domain() == Domain::StatTest
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

macro_rules! simple_enum {
    ($(#[$meta:meta])* $ty:ident { $( $variant:ident => $name:literal, )* }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $ty { $( $variant, )* }

        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $( $ty::$variant => $name, )* }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = MetricError;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $( $name => Ok($ty::$variant), )*
                    other => Err(MetricError::InvalidParameter(
                        format!("unknown {} `{}`", stringify!($ty), other))),
                }
            }
        }
    };
}

simple_enum! {
    /// Which formula is evaluated. Differences here are implementational.
    FormulaFamily {
        Standard => "standard",
        MeanRecall => "mean_recall",
        ChanceCorrected => "chance_corrected",
        OneVsRest => "one_vs_rest",
        Generalized => "generalized",
        RankHalfCredit => "rank_half_credit",
        CoefficientOfDetermination => "coefficient_of_determination",
        SquaredPearson => "squared_pearson",
        Adjusted => "adjusted",
        RecomputedMeans => "recomputed_means",
        ProvidedCenters => "provided_centers",
        AverageRanks => "average_ranks",
        TauA => "tau_a",
        TauB => "tau_b",
        EqualWidthHistogram => "equal_width_histogram",
        DoubleCentered => "double_centered",
        MedianMad => "median_mad",
        MeanSd => "mean_sd",
        WilcoxBend => "wilcox_bend",
        MahalanobisPruned => "mahalanobis_pruned",
        ResidualPearson => "residual_pearson",
        Pooled => "pooled",
        Welch => "welch",
        Paired => "paired",
        KnownSigma => "known_sigma",
        Asymptotic => "asymptotic",
        Exact => "exact",
        NormalApprox => "normal_approx",
        TieCorrected => "tie_corrected",
        WilcoxonZeros => "wilcoxon_zeros",
        PrattZeros => "pratt_zeros",
        VarianceRatio => "variance_ratio",
        MeanCentered => "mean_centered",
        MedianCentered => "median_centered",
        TrimmedCentered => "trimmed_centered",
        RoystonApprox => "royston_approx",
        GoodnessOfFit => "goodness_of_fit",
        Independence => "independence",
        OneWay => "one_way",
        ExactEnumeration => "exact_enumeration",
        MonteCarlo => "monte_carlo",
        DirectedAB => "directed_ab",
        DirectedBA => "directed_ba",
        SymmetricMax => "symmetric_max",
        Percentile => "percentile",
        GaussianWindow => "gaussian_window",
        UniformWindow => "uniform_window",
    }
}

simple_enum! {
    /// Keys of the typed parameter bag.
    ParamKey {
        Beta => "beta",
        Epsilon => "epsilon",
        ZeroDivision => "zero_division",
        Predictors => "predictors",
        Power => "power",
        Delta => "delta",
        Units => "units",
        ZeroPolicy => "zero_policy",
        Bins => "bins",
        BiweightC => "c",
        Bend => "bend",
        Sigma => "sigma",
        Tail => "tail",
        Output => "output",
        Statistic => "statistic",
        Continuity => "continuity",
        PMethod => "p_method",
        TrimFraction => "trim",
        PermStatistic => "perm_statistic",
        Resamples => "n_resamples",
        Seed => "seed",
        Quantile => "q",
        PointSet => "point_set",
        Theta => "theta",
        Connectivity => "connectivity",
        EmptyPolicy => "empty_policy",
        DataRange => "data_range",
        Window => "window",
        GaussianSigma => "gaussian_sigma",
        K1 => "k1",
        K2 => "k2",
    }
}

impl ParamKey {
    /// Reporting parameters change how a result is presented, not what is
    /// computed: units, tail, statistic variant, output quantity, data range.
    pub fn is_reporting(self) -> bool {
        matches!(
            self,
            ParamKey::Units
                | ParamKey::Tail
                | ParamKey::Output
                | ParamKey::Statistic
                | ParamKey::DataRange
        )
    }
}

/// How a multi-valued result is collapsed to the reported number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReportingMode {
    /// Single-valued metric with nothing to aggregate.
    Overall,
    PerClass(u32),
    Micro,
    Macro,
    Weighted,
    BinaryPositive(u32),
}

impl fmt::Display for ReportingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportingMode::Overall => f.write_str("overall"),
            ReportingMode::PerClass(k) => write!(f, "per_class({k})"),
            ReportingMode::Micro => f.write_str("micro"),
            ReportingMode::Macro => f.write_str("macro"),
            ReportingMode::Weighted => f.write_str("weighted"),
            ReportingMode::BinaryPositive(k) => write!(f, "binary_positive({k})"),
        }
    }
}

impl FromStr for ReportingMode {
    type Err = MetricError;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || MetricError::InvalidParameter(format!("unknown reporting mode `{s}`"));
        let class_arg = |prefix: &str| -> Option<u32> {
            s.strip_prefix(prefix)?.strip_suffix(')')?.parse().ok()
        };
        match s {
            "overall" => Ok(ReportingMode::Overall),
            "micro" => Ok(ReportingMode::Micro),
            "macro" => Ok(ReportingMode::Macro),
            "weighted" => Ok(ReportingMode::Weighted),
            _ => {
                if let Some(k) = class_arg("per_class(") {
                    Ok(ReportingMode::PerClass(k))
                } else if let Some(k) = class_arg("binary_positive(") {
                    Ok(ReportingMode::BinaryPositive(k))
                } else {
                    Err(bad())
                }
            }
        }
    }
}

/// A typed parameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl ParamValue {
    pub fn as_real(&self) -> Option<f64> {
        match *self {
            ParamValue::Real(x) => Some(x),
            ParamValue::Int(i) => Some(i as f64),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match *self {
            ParamValue::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            ParamValue::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            ParamValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Real(x) => write!(f, "{x}"),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for ParamValue {
    fn from(x: f64) -> Self {
        ParamValue::Real(x)
    }
}
impl From<i64> for ParamValue {
    fn from(x: i64) -> Self {
        ParamValue::Int(x)
    }
}
impl From<usize> for ParamValue {
    fn from(x: usize) -> Self {
        ParamValue::Int(x as i64)
    }
}
impl From<bool> for ParamValue {
    fn from(x: bool) -> Self {
        ParamValue::Bool(x)
    }
}
impl From<&str> for ParamValue {
    fn from(x: &str) -> Self {
        ParamValue::Text(x.to_string())
    }
}

pub type Params = BTreeMap<ParamKey, ParamValue>;

/// Full identification of one way to compute a named metric.
#[derive(Debug, Clone, PartialEq)]
pub struct ConventionDescriptor {
    pub metric: MetricId,
    pub family: FormulaFamily,
    pub reporting: ReportingMode,
    pub params: Params,
}

impl ConventionDescriptor {
    /// Validated constructor: the family must be registered for the metric
    /// and every parameter key must appear in the metric's schema.
    pub fn try_new(
        metric: MetricId,
        family: FormulaFamily,
        reporting: ReportingMode,
        params: Params,
    ) -> Result<Self> {
        if !metric.families().contains(&family) {
            return Err(MetricError::UnknownFamily {
                metric: metric.name().into(),
                family: family.name().into(),
            });
        }
        let schema = metric.param_schema();
        if let Some(key) = params.keys().find(|k| !schema.contains(k)) {
            return Err(MetricError::UnknownParam {
                metric: metric.name().into(),
                key: key.name().into(),
            });
        }
        Ok(ConventionDescriptor {
            metric,
            family,
            reporting,
            params,
        })
    }

    pub(crate) fn new(metric: MetricId, family: FormulaFamily, reporting: ReportingMode) -> Self {
        debug_assert!(metric.families().contains(&family), "{metric}/{family}");
        ConventionDescriptor {
            metric,
            family,
            reporting,
            params: Params::new(),
        }
    }

    pub(crate) fn overall(metric: MetricId, family: FormulaFamily) -> Self {
        Self::new(metric, family, ReportingMode::Overall)
    }

    /// Builder-style parameter insertion. Panics in debug builds on keys
    /// outside the schema; use [`ConventionDescriptor::try_new`] for
    /// untrusted input.
    pub fn with(mut self, key: ParamKey, value: impl Into<ParamValue>) -> Self {
        debug_assert!(
            self.metric.param_schema().contains(&key),
            "{} not in schema of {}",
            key,
            self.metric
        );
        self.params.insert(key, value.into());
        self
    }

    pub fn param(&self, key: ParamKey) -> Option<&ParamValue> {
        self.params.get(&key)
    }

    /// Parameters that change the computation (everything non-reporting).
    pub fn formula_params(&self) -> impl Iterator<Item = (&ParamKey, &ParamValue)> {
        self.params.iter().filter(|(k, _)| !k.is_reporting())
    }

    /// Output quantity selected for test metrics (`statistic` or `p_value`).
    pub fn output(&self) -> Option<&str> {
        self.param(ParamKey::Output).and_then(ParamValue::as_text)
    }

    /// Compact deterministic label, e.g. `standard[macro]{beta=1}`.
    pub fn label(&self) -> String {
        let mut s = format!("{}[{}]", self.family, self.reporting);
        if !self.params.is_empty() {
            let parts: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            s.push('{');
            s.push_str(&parts.join(","));
            s.push('}');
        }
        s
    }
}

impl fmt::Display for ConventionDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.metric, self.label())
    }
}
