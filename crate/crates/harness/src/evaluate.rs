//! Dispatch from a convention descriptor to the core computation.

use convmetrics::classify::{self, BalancedAccuracyVariant, MccVariant, PrfQuantity, TiePolicy};
use convmetrics::cluster::{self, WcssVariant};
use convmetrics::correlate::{self, BiweightCenter, DependenceKind, RankLinearKind, RobustKind};
use convmetrics::imgqual::{self, DataRange, SsimWindow};
use convmetrics::regress::{self, MapeUnits, MapeZeroPolicy, R2Variant};
use convmetrics::segment::{self, Connectivity, EmptyPolicy, HausdorffVariant, OverlapVariant, PartitionKind, PointSet};
use convmetrics::stattest::{self as st, SampleGroups, Tail};
use convmetrics::{
    ConventionDescriptor, FormulaFamily as F, MetricError, MetricId as M, MetricValue, ParamKey as K, ParamValue,
    ReportingMode as R, TestResult, ZeroDivision,
};

use crate::dataset::{ClassificationData, Dataset, ImageData};

type Mr<T> = convmetrics::Result<T>;

fn bad(msg: impl Into<String>) -> MetricError {
    MetricError::InvalidParameter(msg.into())
}

fn real(d: &ConventionDescriptor, k: K) -> Option<f64> {
    d.param(k).and_then(ParamValue::as_real)
}

fn text(d: &ConventionDescriptor, k: K) -> Option<&str> {
    d.param(k).and_then(ParamValue::as_text)
}

fn choose<V: Copy>(d: &ConventionDescriptor, k: K, options: &[(&str, V)], default: V) -> Mr<V> {
    match text(d, k) {
        None => Ok(default),
        Some(s) => options
            .iter()
            .find(|(n, _)| *n == s)
            .map(|&(_, v)| v)
            .ok_or_else(|| bad(format!("unknown {k} `{s}`"))),
    }
}

fn tail(d: &ConventionDescriptor) -> Mr<Tail> {
    text(d, K::Tail).map_or(Ok(Tail::TwoSided), str::parse)
}

fn zero_division(d: &ConventionDescriptor, default: ZeroDivision) -> Mr<ZeroDivision> {
    use ZeroDivision::*;
    choose(d, K::ZeroDivision, &[("undefined", Undefined), ("zero", Zero), ("one", One), ("drop", Drop)], default)
}

fn mismatch(d: &ConventionDescriptor, data: &str) -> MetricError {
    bad(format!("{} cannot be computed from {data} data", d.metric))
}

/// Computes one variant. The returned value carries `desc`, with the family
/// replaced if the computation fell back to a different one.
pub fn evaluate(data: &Dataset, desc: &ConventionDescriptor) -> Mr<MetricValue<f64>> {
    let v = match (data, desc.metric.domain()) {
        (Dataset::Classification(c), convmetrics::Domain::Classification) => classification(c, desc)?,
        (Dataset::Regression(s), convmetrics::Domain::Regression) => regression(s, desc)?,
        (Dataset::Clustering(c), convmetrics::Domain::Clustering) => clustering(c, desc)?,
        (Dataset::Correlation(v), convmetrics::Domain::Correlation) => correlation(v, desc)?,
        (Dataset::StatTest(g), convmetrics::Domain::StatTest) => stattest(g, desc)?,
        (Dataset::Segmentation { reference, prediction }, convmetrics::Domain::Segmentation) => {
            segmentation(reference, prediction, desc)?
        }
        (Dataset::Image(img), convmetrics::Domain::Image) => image(img, desc)?,
        (other, _) => {
            let name = match other {
                Dataset::Classification(_) => "classification",
                Dataset::Regression(_) => "regression",
                Dataset::Clustering(_) => "clustering",
                Dataset::Correlation(_) => "correlation",
                Dataset::StatTest(_) => "stattest",
                Dataset::Segmentation { .. } => "segmentation",
                Dataset::Image(_) => "image",
            };
            return Err(mismatch(desc, name));
        }
    };
    let mut out = desc.clone();
    if v.descriptor.family != desc.family {
        out.family = v.descriptor.family;
    }
    Ok(v.with_descriptor(out))
}

fn classification(c: &ClassificationData, d: &ConventionDescriptor) -> Mr<MetricValue<f64>> {
    let cm = || c.confusion().map_err(|e| bad(e.to_string()));
    let prf = |q: PrfQuantity| -> Mr<MetricValue<f64>> {
        let beta = real(d, K::Beta).unwrap_or(1.0);
        classify::prf_report_with(&cm()?, beta, zero_division(d, ZeroDivision::Undefined)?)?.select(q, d.reporting)
    };
    let scores = || c.scores.as_deref().ok_or_else(|| bad(format!("{} needs a `score` column", d.metric)));
    match d.metric {
        M::Accuracy => Ok(classify::accuracy(&cm()?)),
        M::Precision => prf(PrfQuantity::Precision),
        M::Recall => prf(PrfQuantity::Recall),
        M::F1 | M::FBeta => prf(PrfQuantity::FBeta),
        M::Jaccard => prf(PrfQuantity::Jaccard),
        M::BalancedAccuracy => {
            let v = match (d.family, d.reporting) {
                (F::MeanRecall, R::Weighted) => BalancedAccuracyVariant::WeightedRecall,
                (F::MeanRecall, _) => BalancedAccuracyVariant::MacroRecall,
                _ => BalancedAccuracyVariant::ChanceCorrected,
            };
            Ok(classify::balanced_accuracy(&cm()?, v, zero_division(d, ZeroDivision::Undefined)?))
        }
        M::CohenKappa => Ok(classify::cohen_kappa(&cm()?)),
        M::GMean => Ok(classify::g_mean(&cm()?)),
        M::Mcc => {
            let v = match (d.family, d.reporting) {
                (F::Generalized, _) => MccVariant::Generalized,
                (_, R::BinaryPositive(k) | R::PerClass(k)) => MccVariant::BinaryPositive(k),
                _ => MccVariant::PerClassOneVsRestMacro,
            };
            classify::mcc(&cm()?, v, zero_division(d, ZeroDivision::Zero)?)
        }
        M::LogLoss => {
            if c.labels.labels() != [0, 1] {
                return Err(bad("log loss from a single score column needs labels {0, 1}"));
            }
            classify::log_loss_binary(&c.y_true, scores()?, real(d, K::Epsilon).unwrap_or(1e-15))
        }
        M::RocAuc => {
            let positive = match d.reporting {
                R::BinaryPositive(k) | R::PerClass(k) => k,
                _ => *c.labels.labels().last().unwrap(),
            };
            classify::roc_auc(&c.y_true, scores()?, positive, TiePolicy::HalfCredit)
        }
        _ => Err(mismatch(d, "classification")),
    }
}

fn regression(s: &regress::PairedSeries<f64>, d: &ConventionDescriptor) -> Mr<MetricValue<f64>> {
    let b = || regress::basic_errors(s);
    match d.metric {
        M::Mae => Ok(b().mae),
        M::Mse => Ok(b().mse),
        M::Rmse => Ok(b().rmse),
        M::MedianAe => Ok(b().median_ae),
        M::Msle => regress::msle(s),
        M::ExplainedVariance => Ok(regress::explained_variance(s)),
        M::Mape => {
            let units = choose(d, K::Units, &[("fraction", MapeUnits::Fraction), ("percent", MapeUnits::Percent)], MapeUnits::Fraction)?;
            let eps = real(d, K::Epsilon).unwrap_or(f64::EPSILON);
            let zp = choose(
                d,
                K::ZeroPolicy,
                &[("error", MapeZeroPolicy::Error), ("epsilon", MapeZeroPolicy::Epsilon(eps)), ("drop", MapeZeroPolicy::Drop)],
                MapeZeroPolicy::Error,
            )?;
            regress::mape(s, zp, units)
        }
        M::RSquared => regress::r_squared(s, r2_variant(d)?),
        M::TweedieDeviance => regress::tweedie_deviance(s, real(d, K::Power).unwrap_or(0.0)),
        M::Huber => regress::huber(s, real(d, K::Delta).unwrap_or(1.0)),
        _ => Err(mismatch(d, "regression")),
    }
}

fn r2_variant(d: &ConventionDescriptor) -> Mr<R2Variant> {
    match d.family {
        F::CoefficientOfDetermination => Ok(R2Variant::CoefficientOfDetermination),
        F::SquaredPearson => Ok(R2Variant::SquaredPearson),
        F::Adjusted => {
            let p = d.param(K::Predictors).and_then(ParamValue::as_int).unwrap_or(1);
            Ok(R2Variant::Adjusted(usize::try_from(p).map_err(|_| bad("predictors must be >= 0"))?))
        }
        f => Err(bad(format!("no R² variant for family {f}"))),
    }
}

fn clustering(c: &cluster::ClusteredData<f64>, d: &ConventionDescriptor) -> Mr<MetricValue<f64>> {
    match d.metric {
        M::Silhouette => cluster::silhouette(c),
        M::DaviesBouldin => cluster::davies_bouldin(c),
        M::CalinskiHarabasz => cluster::calinski_harabasz(c),
        M::Wcss => match d.family {
            F::ProvidedCenters => cluster::wcss(c, WcssVariant::ProvidedCenters),
            _ => cluster::wcss(c, WcssVariant::RecomputedMeans),
        },
        _ => Err(mismatch(d, "clustering")),
    }
}

fn correlation(v: &correlate::VariablePair<f64>, d: &ConventionDescriptor) -> Mr<MetricValue<f64>> {
    match d.metric {
        M::Pearson => Ok(correlate::rank_linear_corr(v, RankLinearKind::Pearson)),
        M::Spearman => Ok(correlate::rank_linear_corr(v, RankLinearKind::Spearman)),
        M::KendallTau => Ok(correlate::rank_linear_corr(
            v,
            if d.family == F::TauA { RankLinearKind::KendallTauA } else { RankLinearKind::KendallTauB },
        )),
        M::MutualInformation => {
            let bins = d.param(K::Bins).and_then(ParamValue::as_int).map(|b| b.max(0) as usize);
            correlate::dependence(v, DependenceKind::MutualInformation(bins))
        }
        M::DistanceCorrelation => correlate::dependence(v, DependenceKind::DistanceCorrelation),
        M::BiweightMidcorrelation => {
            let center = if d.family == F::MeanSd { BiweightCenter::MeanSd } else { BiweightCenter::MedianMad };
            let c = real(d, K::BiweightC).unwrap_or(9.0);
            correlate::robust_corr(v, RobustKind::Biweight { c, center })
        }
        M::PercentageBend => correlate::robust_corr(v, RobustKind::PercentageBend(real(d, K::Bend).unwrap_or(0.2))),
        M::Shepherd => correlate::robust_corr(v, RobustKind::Shepherd),
        M::PartialCorrelation => correlate::partial_corr(v),
        _ => Err(mismatch(d, "correlation")),
    }
}

fn two(groups: &[Vec<f64>]) -> Mr<SampleGroups<f64>> {
    if groups.len() != 2 {
        return Err(bad(format!("expected 2 groups, got {}", groups.len())));
    }
    SampleGroups::new(groups.to_vec())
}

fn paired(groups: &[Vec<f64>]) -> Mr<SampleGroups<f64>> {
    match groups {
        [x, y] => SampleGroups::paired(x.clone(), y.clone()),
        _ => Err(bad(format!("paired test needs 2 groups, got {}", groups.len()))),
    }
}

/// Pooled sample standard deviation, the plug-in σ when none is declared.
fn pooled_sd(groups: &[Vec<f64>]) -> f64 {
    let (mut ss, mut df) = (0.0, 0usize);
    for g in groups {
        let m = g.iter().sum::<f64>() / g.len() as f64;
        ss += g.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
        df += g.len().saturating_sub(1);
    }
    (ss / df.max(1) as f64).sqrt()
}

fn run_test(groups: &[Vec<f64>], d: &ConventionDescriptor) -> Mr<TestResult<f64>> {
    let all = || SampleGroups::new(groups.to_vec());
    let first = || groups.first().cloned().ok_or_else(|| bad("no samples"));
    let pm = || {
        choose(d, K::PMethod, &[("normal", st::PMethod::Normal), ("exact", st::PMethod::Exact)], st::PMethod::Normal)
    };
    match d.metric {
        M::TTestIndependent => st::t_tests(&two(groups)?, st::TKind::IndependentPooled, tail(d)?),
        M::TTestWelch => st::t_tests(&two(groups)?, st::TKind::Welch, tail(d)?),
        M::TTestPaired => st::t_tests(&paired(groups)?, st::TKind::Paired, tail(d)?),
        M::ZTest => {
            let sigma = real(d, K::Sigma).unwrap_or_else(|| pooled_sd(groups));
            st::t_tests(&all()?, st::TKind::ZKnownSigma(sigma), tail(d)?)
        }
        M::KsTest => st::ks_2samp(
            &two(groups)?,
            if d.family == F::Exact { st::KsMethod::Exact } else { st::KsMethod::Asymptotic },
        ),
        M::Anova => st::anova(&all()?),
        M::KruskalWallis => st::kruskal_wallis(&all()?),
        M::Bartlett => st::bartlett(&all()?),
        M::Levene => {
            let center = match d.family {
                F::MeanCentered => st::LeveneCenter::Mean,
                F::MedianCentered => st::LeveneCenter::Median,
                _ => st::LeveneCenter::Trimmed(real(d, K::TrimFraction).unwrap_or(0.1)),
            };
            st::levene(&all()?, center)
        }
        M::FTest => st::f_test(&two(groups)?, tail(d)?),
        M::ShapiroWilk => st::shapiro_wilk(&first()?),
        M::ChiSquare => match d.family {
            F::Independence => st::chi_square_independence(groups),
            _ => {
                let obs = first()?;
                let e = obs.iter().sum::<f64>() / obs.len() as f64;
                st::chi_square_gof(&obs, &vec![e; obs.len()])
            }
        },
        M::MannWhitneyU => {
            use st::UStatistic::*;
            let statistic = choose(d, K::Statistic, &[("u1", U1), ("u2", U2), ("rank_sum_w", RankSumW)], U1)?;
            let o = st::MannWhitneyOptions {
                statistic,
                continuity: d.param(K::Continuity).and_then(ParamValue::as_bool).unwrap_or(true),
                method: if d.family == F::Exact { st::PMethod::Exact } else { st::PMethod::Normal },
                tail: tail(d)?,
            };
            st::mann_whitney(&two(groups)?, o)
        }
        M::WilcoxonSignedRank => {
            let s = if groups.len() == 1 { all()? } else { paired(groups)? };
            use st::WStatistic::*;
            let o = st::WilcoxonOptions {
                zero_policy: if d.family == F::PrattZeros { st::ZeroPolicy::Pratt } else { st::ZeroPolicy::Wilcoxon },
                statistic: choose(d, K::Statistic, &[("w_plus", WPlus), ("w_min", WMin)], WPlus)?,
                method: pm()?,
                tail: tail(d)?,
            };
            st::wilcoxon_signed_rank(&s, o)
        }
        M::PermutationTest => {
            use st::PermStatistic::*;
            let stat = choose(d, K::PermStatistic, &[("mean_diff", MeanDiff), ("median_diff", MedianDiff)], MeanDiff)?;
            let method = match d.family {
                F::MonteCarlo => st::PermMethod::MonteCarlo {
                    n_resamples: d
                        .param(K::Resamples)
                        .and_then(ParamValue::as_int)
                        .map_or(convmetrics::registry::DEFAULT_RESAMPLES, |n| n.max(1) as usize),
                    seed: d.param(K::Seed).and_then(ParamValue::as_int).unwrap_or(0) as u64,
                },
                _ => st::PermMethod::ExactEnumeration,
            };
            st::permutation_test(&two(groups)?, stat, method, tail(d)?)
        }
        _ => Err(mismatch(d, "stattest")),
    }
}

fn stattest(groups: &[Vec<f64>], d: &ConventionDescriptor) -> Mr<MetricValue<f64>> {
    let r = run_test(groups, d)?;
    Ok(match d.output() {
        Some("p_value") => r.p_value_value(),
        _ => r.statistic_value(),
    })
}

fn connectivity(d: &ConventionDescriptor) -> Mr<Connectivity> {
    choose(d, K::Connectivity, &[("face", Connectivity::Face), ("corner", Connectivity::Corner)], Connectivity::Face)
}

fn segmentation(
    reference: &segment::Mask<f64>,
    prediction: &segment::Mask<f64>,
    d: &ConventionDescriptor,
) -> Mr<MetricValue<f64>> {
    let overlap = || -> Mr<segment::OverlapMetrics<f64>> {
        let variant = match d.reporting {
            R::Macro => OverlapVariant::ClassAveraged,
            R::Micro => OverlapVariant::Micro,
            _ => OverlapVariant::ForegroundOnly,
        };
        let empty = choose(
            d,
            K::EmptyPolicy,
            &[("one", EmptyPolicy::One), ("zero", EmptyPolicy::Zero), ("undefined", EmptyPolicy::Undefined)],
            EmptyPolicy::Undefined,
        )?;
        segment::overlap_metrics(prediction, reference, variant, empty)
    };
    let partition = |k| segment::partition_metrics(prediction, reference, k);
    match d.metric {
        M::SegAccuracy => Ok(overlap()?.accuracy),
        M::SegPrecision => Ok(overlap()?.precision),
        M::SegRecall => Ok(overlap()?.recall),
        M::SegF1 => Ok(overlap()?.f1),
        M::Dice => Ok(overlap()?.dice),
        M::Iou => Ok(overlap()?.iou),
        M::MeanIou => Ok(overlap()?.mean_iou),
        M::BoundaryF1 => segment::boundary_f1(prediction, reference, real(d, K::Theta).unwrap_or(2.0), connectivity(d)?),
        M::Hausdorff => {
            let variant = match d.family {
                F::DirectedAB => HausdorffVariant::DirectedAB,
                F::DirectedBA => HausdorffVariant::DirectedBA,
                F::Percentile => HausdorffVariant::Percentile(real(d, K::Quantile).unwrap_or(95.0)),
                _ => HausdorffVariant::SymmetricMax,
            };
            let ps = match text(d, K::PointSet) {
                Some("all_foreground") => PointSet::AllForeground,
                _ => PointSet::Boundary(connectivity(d)?),
            };
            // A = prediction, B = reference
            segment::hausdorff(prediction, reference, variant, ps)
        }
        M::AdaptedRandError => partition(PartitionKind::AdaptedRandError),
        M::AdjustedRandIndex => partition(PartitionKind::AdjustedRandIndex),
        M::VariationOfInformation => partition(PartitionKind::VariationOfInformation),
        _ => Err(mismatch(d, "segmentation")),
    }
}

fn image(img: &ImageData, d: &ConventionDescriptor) -> Mr<MetricValue<f64>> {
    let pair = match text(d, K::DataRange) {
        None => img.pair.clone(),
        Some(name) => {
            let range = match name {
                "declared" => DataRange::DeclaredMax(img.declared_range.ok_or_else(|| bad("no data_range declared in the input"))?),
                "observed" => DataRange::ObservedRefRange,
                "unit" => DataRange::UnitInterval,
                other => return Err(bad(format!("unknown data range `{other}`"))),
            };
            img.pair.clone().with_range(range)?
        }
    };
    match d.metric {
        M::ImgMae => Ok(imgqual::raster_errors(&pair)?.mae),
        M::ImgMse => Ok(imgqual::raster_errors(&pair)?.mse),
        M::ImgRmse => Ok(imgqual::raster_errors(&pair)?.rmse),
        M::ImgRSquared => {
            let e = imgqual::raster_errors(&pair)?;
            Ok(if d.family == F::SquaredPearson { e.r2_squared_pearson } else { e.r2_determination })
        }
        M::Psnr => imgqual::psnr(&pair),
        M::Ssim => {
            let w = d.param(K::Window).and_then(ParamValue::as_int).unwrap_or(7).max(0) as usize;
            let window = match d.family {
                F::GaussianWindow => SsimWindow::Gaussian(w, real(d, K::GaussianSigma).unwrap_or(1.5)),
                _ => SsimWindow::Uniform(w),
            };
            imgqual::ssim(&pair, window, real(d, K::K1).unwrap_or(0.01), real(d, K::K2).unwrap_or(0.03))
        }
        _ => Err(mismatch(d, "image")),
    }
}
