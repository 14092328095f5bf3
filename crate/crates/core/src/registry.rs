//! The built-in variant space swept by the harness.

use crate::convention::{ConventionDescriptor, FormulaFamily as F, MetricId, ParamKey as K, ReportingMode as R};
use crate::labels::LabelSet;

/// Default Monte Carlo budget for permutation tests.
pub const DEFAULT_RESAMPLES: usize = 9_999;

/// Variants for `metric`, assuming a binary `{0, 1}` label set where class
/// labels matter.
pub fn register_variants(metric: MetricId) -> Vec<ConventionDescriptor> {
    register_variants_for(metric, &LabelSet::binary())
}

/// Every built-in formula family × reporting mode combination for
/// `metric`, in a fixed order, with class-indexed modes expanded over
/// `labels`.
pub fn register_variants_for(metric: MetricId, labels: &LabelSet) -> Vec<ConventionDescriptor> {
    use MetricId::*;
    let d = |family, reporting| ConventionDescriptor::new(metric, family, reporting);
    let o = |family| ConventionDescriptor::overall(metric, family);
    let binary = labels.len() == 2;
    let positive = *labels.labels().last().expect("non-empty label set");

    let averaged = |family: F| {
        let mut v = vec![d(family, R::Micro), d(family, R::Macro), d(family, R::Weighted)];
        v.extend(labels.labels().iter().map(|&l| d(family, R::PerClass(l))));
        if binary {
            v.push(d(family, R::BinaryPositive(positive)));
        }
        v
    };
    let with_outputs = |descs: Vec<ConventionDescriptor>| -> Vec<ConventionDescriptor> {
        descs
            .into_iter()
            .flat_map(|d| {
                [
                    d.clone().with(K::Output, "statistic"),
                    d.with(K::Output, "p_value"),
                ]
            })
            .collect()
    };

    match metric {
        Accuracy | CohenKappa | GMean => vec![o(F::Standard)],
        BalancedAccuracy => vec![
            d(F::MeanRecall, R::Macro),
            d(F::MeanRecall, R::Weighted),
            d(F::ChanceCorrected, R::Macro),
        ],
        Precision | Recall | F1 | Jaccard => averaged(F::Standard),
        FBeta => averaged(F::Standard)
            .into_iter()
            .map(|d| d.with(K::Beta, 2.0))
            .collect(),
        Mcc => {
            let mut v = Vec::new();
            if binary {
                v.push(d(F::OneVsRest, R::BinaryPositive(positive)));
            }
            v.extend(labels.labels().iter().map(|&l| d(F::OneVsRest, R::PerClass(l))));
            v.push(d(F::OneVsRest, R::Macro));
            v.push(o(F::Generalized));
            v
        }
        LogLoss => vec![o(F::Standard).with(K::Epsilon, 1e-15)],
        RocAuc => vec![d(F::RankHalfCredit, R::BinaryPositive(positive))],

        Mae | Mse | Rmse | MedianAe | Msle | ExplainedVariance => vec![o(F::Standard)],
        Mape => vec![
            o(F::Standard).with(K::Units, "fraction").with(K::ZeroPolicy, "error"),
            o(F::Standard).with(K::Units, "percent").with(K::ZeroPolicy, "error"),
            o(F::Standard)
                .with(K::Units, "fraction")
                .with(K::ZeroPolicy, "epsilon")
                .with(K::Epsilon, f64::EPSILON),
            o(F::Standard).with(K::Units, "fraction").with(K::ZeroPolicy, "drop"),
        ],
        RSquared => vec![
            o(F::CoefficientOfDetermination),
            o(F::SquaredPearson),
            o(F::Adjusted).with(K::Predictors, 1usize),
        ],
        TweedieDeviance => vec![o(F::Standard).with(K::Power, 0.0)],
        Huber => vec![o(F::Standard).with(K::Delta, 1.0)],

        Silhouette | DaviesBouldin | CalinskiHarabasz => vec![o(F::Standard)],
        Wcss => vec![o(F::RecomputedMeans), o(F::ProvidedCenters)],

        Pearson => vec![o(F::Standard)],
        Spearman => vec![o(F::AverageRanks)],
        KendallTau => vec![o(F::TauA), o(F::TauB)],
        MutualInformation => vec![
            o(F::EqualWidthHistogram),
            o(F::EqualWidthHistogram).with(K::Bins, 5usize),
            o(F::EqualWidthHistogram).with(K::Bins, 10usize),
        ],
        DistanceCorrelation => vec![o(F::DoubleCentered)],
        BiweightMidcorrelation => vec![
            o(F::MedianMad).with(K::BiweightC, 9.0),
            o(F::MeanSd).with(K::BiweightC, 9.0),
        ],
        PercentageBend => vec![o(F::WilcoxBend).with(K::Bend, 0.2)],
        Shepherd => vec![o(F::MahalanobisPruned)],
        PartialCorrelation => vec![o(F::ResidualPearson)],

        TTestIndependent => with_outputs(vec![o(F::Pooled).with(K::Tail, "two_sided")]),
        TTestPaired => with_outputs(vec![o(F::Paired).with(K::Tail, "two_sided")]),
        TTestWelch => with_outputs(vec![o(F::Welch).with(K::Tail, "two_sided")]),
        ZTest => with_outputs(vec![o(F::KnownSigma).with(K::Tail, "two_sided")]),
        KsTest => with_outputs(vec![o(F::Asymptotic), o(F::Exact)]),
        Anova => with_outputs(vec![o(F::OneWay)]),
        KruskalWallis => with_outputs(vec![o(F::TieCorrected)]),
        ShapiroWilk => with_outputs(vec![o(F::RoystonApprox)]),
        Bartlett => with_outputs(vec![o(F::Standard)]),
        Levene => with_outputs(vec![
            o(F::MeanCentered),
            o(F::MedianCentered),
            o(F::TrimmedCentered).with(K::TrimFraction, 0.1),
        ]),
        ChiSquare => with_outputs(vec![o(F::GoodnessOfFit), o(F::Independence)]),
        FTest => with_outputs(
            ["two_sided", "greater", "less"]
                .into_iter()
                .map(|t| o(F::VarianceRatio).with(K::Tail, t))
                .collect(),
        ),
        MannWhitneyU => {
            let mut v = Vec::new();
            for (family, continuity) in [
                (F::NormalApprox, Some(true)),
                (F::NormalApprox, Some(false)),
                (F::Exact, None),
            ] {
                for stat in ["u1", "u2", "rank_sum_w"] {
                    let mut desc = o(family).with(K::Statistic, stat).with(K::Tail, "two_sided");
                    if let Some(c) = continuity {
                        desc = desc.with(K::Continuity, c);
                    }
                    v.push(desc);
                }
            }
            with_outputs(v)
        }
        WilcoxonSignedRank => {
            let mut v = Vec::new();
            for family in [F::WilcoxonZeros, F::PrattZeros] {
                for method in ["normal", "exact"] {
                    for stat in ["w_plus", "w_min"] {
                        v.push(
                            o(family)
                                .with(K::PMethod, method)
                                .with(K::Statistic, stat)
                                .with(K::Tail, "two_sided"),
                        );
                    }
                }
            }
            with_outputs(v)
        }
        PermutationTest => with_outputs(vec![
            o(F::ExactEnumeration)
                .with(K::PermStatistic, "mean_diff")
                .with(K::Tail, "two_sided"),
            o(F::MonteCarlo)
                .with(K::PermStatistic, "mean_diff")
                .with(K::Tail, "two_sided")
                .with(K::Resamples, DEFAULT_RESAMPLES)
                .with(K::Seed, 0i64),
        ]),

        SegAccuracy => vec![o(F::Standard)],
        SegPrecision | SegRecall | SegF1 | Dice | Iou => [R::BinaryPositive(1), R::Macro, R::Micro]
            .into_iter()
            .map(|r| d(F::Standard, r).with(K::EmptyPolicy, "undefined"))
            .collect(),
        MeanIou => vec![d(F::Standard, R::Macro).with(K::EmptyPolicy, "undefined")],
        BoundaryF1 => ["face", "corner"]
            .into_iter()
            .map(|c| o(F::Standard).with(K::Theta, 2.0).with(K::Connectivity, c))
            .collect(),
        Hausdorff => {
            let mut v = Vec::new();
            for (point_set, conn) in [("boundary", Some("face")), ("boundary", Some("corner")), ("all_foreground", None)] {
                for family in [F::SymmetricMax, F::DirectedAB, F::DirectedBA, F::Percentile] {
                    let mut desc = o(family).with(K::PointSet, point_set);
                    if let Some(c) = conn {
                        desc = desc.with(K::Connectivity, c);
                    }
                    if family == F::Percentile {
                        desc = desc.with(K::Quantile, 95.0);
                    }
                    v.push(desc);
                }
            }
            v
        }
        AdaptedRandError | AdjustedRandIndex | VariationOfInformation => vec![o(F::Standard)],

        ImgMae | ImgMse | ImgRmse => vec![o(F::Standard)],
        ImgRSquared => vec![o(F::CoefficientOfDetermination), o(F::SquaredPearson)],
        Psnr => ["declared", "observed", "unit"]
            .into_iter()
            .map(|r| o(F::Standard).with(K::DataRange, r))
            .collect(),
        Ssim => {
            let mut v = Vec::new();
            for range in ["declared", "observed", "unit"] {
                v.push(
                    o(F::GaussianWindow)
                        .with(K::DataRange, range)
                        .with(K::Window, 11usize)
                        .with(K::GaussianSigma, 1.5)
                        .with(K::K1, 0.01)
                        .with(K::K2, 0.03),
                );
                v.push(
                    o(F::UniformWindow)
                        .with(K::DataRange, range)
                        .with(K::Window, 7usize)
                        .with(K::K1, 0.01)
                        .with(K::K2, 0.03),
                );
            }
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convention::Domain;

    #[test]
    fn precision_variants() {
        let got: Vec<R> = register_variants(MetricId::Precision)
            .iter()
            .map(|d| d.reporting)
            .collect();
        assert_eq!(
            got,
            vec![
                R::Micro,
                R::Macro,
                R::Weighted,
                R::PerClass(0),
                R::PerClass(1),
                R::BinaryPositive(1)
            ]
        );
    }

    #[test]
    fn r_squared_variants() {
        let got: Vec<F> = register_variants(MetricId::RSquared)
            .iter()
            .map(|d| d.family)
            .collect();
        assert_eq!(got, vec![F::CoefficientOfDetermination, F::SquaredPearson, F::Adjusted]);
    }

    #[test]
    fn levene_variants() {
        let mut got: Vec<F> = register_variants(MetricId::Levene)
            .iter()
            .map(|d| d.family)
            .collect();
        got.dedup();
        assert_eq!(got, vec![F::MeanCentered, F::MedianCentered, F::TrimmedCentered]);
    }

    #[test]
    fn stable_and_duplicate_free() {
        let labels = LabelSet::range(3).unwrap();
        for &m in MetricId::ALL {
            let a = register_variants_for(m, &labels);
            let b = register_variants_for(m, &labels);
            assert_eq!(a, b);
            assert!(!a.is_empty(), "{m}");
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    assert_ne!(a[i], a[j], "duplicate descriptor for {m}");
                }
            }
            for d in &a {
                // every registered descriptor passes validation
                ConventionDescriptor::try_new(d.metric, d.family, d.reporting, d.params.clone())
                    .unwrap();
                if m.domain() == Domain::StatTest {
                    assert!(d.output().is_some());
                }
            }
        }
    }
}
