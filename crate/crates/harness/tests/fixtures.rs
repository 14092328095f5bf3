use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

use convmetrics::{FormulaFamily, MetricId, MetricValue, ReportingMode};
use convmetrics_harness::{
    classify_discrepancies, diff_dataset, emit_report, load_dataset, run_variants, ClassificationData, Dataset,
    DiscrepancyClass, DiscrepancyRecord, ReportFormat, RunConfig, TaskFamily, ALL_CONSISTENT,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn diff(name: &str, task: TaskFamily, metrics: &[MetricId]) -> Vec<DiscrepancyRecord> {
    let data = load_dataset(&fixture(name), task).unwrap();
    let mut config = RunConfig::new(task);
    config.metrics = Some(metrics.to_vec());
    diff_dataset(&data, &config).unwrap()
}

fn classes(records: &[DiscrepancyRecord]) -> BTreeSet<DiscrepancyClass> {
    records.iter().map(|r| r.classification).collect()
}

fn between<'a>(
    records: &'a [DiscrepancyRecord],
    a: impl Fn(&convmetrics::ConventionDescriptor) -> bool + 'a,
    b: impl Fn(&convmetrics::ConventionDescriptor) -> bool + 'a,
) -> impl Iterator<Item = &'a DiscrepancyRecord> + 'a {
    records
        .iter()
        .filter(move |r| (a(&r.descriptor_a) && b(&r.descriptor_b)) || (b(&r.descriptor_a) && a(&r.descriptor_b)))
}

#[test]
fn imbalanced_precision_is_reporting_only() {
    let r = diff("imbalanced_cm.csv", TaskFamily::Classification, &[MetricId::Precision]);
    assert!(!r.is_empty());
    assert!(classes(&r).iter().all(|c| matches!(c, DiscrepancyClass::Rd | DiscrepancyClass::None)));
}

#[test]
fn affine_r2_is_implementational() {
    let r = diff("affine_r2.csv", TaskFamily::Regression, &[MetricId::RSquared]);
    let rec: Vec<_> = between(
        &r,
        |d| d.family == FormulaFamily::SquaredPearson,
        |d| d.family == FormulaFamily::CoefficientOfDetermination,
    )
    .collect();
    assert_eq!(rec.len(), 1);
    assert_eq!(rec[0].classification, DiscrepancyClass::Id);
    assert_eq!(rec[0].abs_delta, Some(7.0));
}

#[test]
fn levene_centering_is_implementational() {
    let r = diff("skewed_levene.csv", TaskFamily::StatTest, &[MetricId::Levene]);
    let stat = |f: FormulaFamily| move |d: &convmetrics::ConventionDescriptor| d.family == f && d.output() == Some("statistic");
    let rec: Vec<_> = between(&r, stat(FormulaFamily::MeanCentered), stat(FormulaFamily::MedianCentered)).collect();
    assert_eq!(rec.len(), 1);
    assert_eq!(rec[0].classification, DiscrepancyClass::Id);
    assert!(rec[0].abs_delta.unwrap() > 0.01);
}

#[test]
fn u_statistic_conventions_are_reporting() {
    let r = diff("u_convention.csv", TaskFamily::StatTest, &[MetricId::MannWhitneyU]);
    let stat_is = |s: &'static str| {
        move |d: &convmetrics::ConventionDescriptor| {
            d.output() == Some("statistic") && d.param(convmetrics::ParamKey::Statistic).and_then(|p| p.as_text()) == Some(s)
        }
    };
    let rec: Vec<_> = between(&r, stat_is("u1"), stat_is("rank_sum_w")).collect();
    assert!(!rec.is_empty());
    assert!(rec.iter().all(|r| r.classification == DiscrepancyClass::Rd));
    // U1 = 17 and W = U1 + 15 for n1 = 5
    assert!(rec.iter().all(|r| r.abs_delta == Some(15.0)));
}

#[test]
fn ssim_window_is_implementational_and_range_reporting() {
    let r = diff("ssim_constant.txt", TaskFamily::Image2d, &[MetricId::Ssim]);
    let fam = |f: FormulaFamily, range: &'static str| {
        move |d: &convmetrics::ConventionDescriptor| {
            d.family == f && d.param(convmetrics::ParamKey::DataRange).and_then(|p| p.as_text()) == Some(range)
        }
    };
    let window: Vec<_> = between(&r, fam(FormulaFamily::GaussianWindow, "declared"), fam(FormulaFamily::UniformWindow, "declared"))
        .collect();
    assert_eq!(window.len(), 1);
    assert_eq!(window[0].classification, DiscrepancyClass::Id);
    // a constant reference has no observed range
    assert!(r
        .iter()
        .filter(|x| fam(FormulaFamily::GaussianWindow, "observed")(&x.descriptor_a))
        .all(|x| x.value_a.is_none()));
}

#[test]
fn psnr_range_is_reporting() {
    let r = diff("range_psnr.txt", TaskFamily::Image2d, &[MetricId::Psnr]);
    assert!(!r.is_empty());
    assert!(r.iter().all(|x| matches!(x.classification, DiscrepancyClass::Rd | DiscrepancyClass::None)));
    let declared_vs_unit = r
        .iter()
        .find(|x| x.classification == DiscrepancyClass::Rd)
        .and_then(|x| x.abs_delta)
        .unwrap();
    assert!((declared_vs_unit - 20.0 * 255f64.log10()).abs() < 1e-9);
}

#[test]
fn class_averaged_iou_is_reporting() {
    let r = diff("class_averaged_iou.txt", TaskFamily::Segmentation2d, &[MetricId::Iou]);
    assert_eq!(classes(&r), BTreeSet::from([DiscrepancyClass::Rd]));
    let mode = |m: ReportingMode| move |d: &convmetrics::ConventionDescriptor| d.reporting == m;
    let rec: Vec<_> = between(&r, mode(ReportingMode::BinaryPositive(1)), mode(ReportingMode::Macro)).collect();
    assert_eq!(rec.len(), 1);
    assert!(rec[0].abs_delta.unwrap() > 0.3);
}

fn scalars(values: &[MetricValue<f64>]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().filter_map(|v| v.as_scalar()).collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}

#[test]
fn balanced_matrix_has_no_discrepancies() {
    let data = Dataset::Classification(ClassificationData::from_confusion_rows(&[vec![5, 0], vec![0, 5]]).unwrap());
    let config = RunConfig::new(TaskFamily::Classification);
    let values = run_variants(&data, MetricId::Precision, &config);
    assert_eq!(scalars(&values), vec![1.0]);
    let records = classify_discrepancies(&values, config.tolerances);
    assert!(records.iter().all(|r| r.classification == DiscrepancyClass::None));
    let shown: Vec<_> = records.into_iter().filter(|r| r.classification != DiscrepancyClass::None).collect();
    assert!(emit_report(&shown, ReportFormat::MarkdownTable).contains(ALL_CONSISTENT));
}

#[test]
fn imbalanced_matrix_precision_values() {
    let data = Dataset::Classification(ClassificationData::from_confusion_rows(&[vec![90, 0], vec![9, 1]]).unwrap());
    let values = run_variants(&data, MetricId::Precision, &RunConfig::new(TaskFamily::Classification));
    let v = scalars(&values);
    assert!(v.len() >= 3, "{v:?}");
    for want in [0.91, (90.0 / 99.0 + 1.0) / 2.0, 1.0] {
        assert!(v.iter().any(|x| (x - want).abs() < 1e-12), "{want} missing from {v:?}");
    }
}

#[test]
fn affine_regression_values() {
    let data = load_dataset(&fixture("affine_r2.csv"), TaskFamily::Regression).unwrap();
    let values = run_variants(&data, MetricId::RSquared, &RunConfig::new(TaskFamily::Regression));
    let get = |f| values.iter().find(|v| v.descriptor.family == f).unwrap().unwrap_scalar();
    assert_eq!(get(FormulaFamily::CoefficientOfDetermination), -6.0);
    assert_eq!(get(FormulaFamily::SquaredPearson), 1.0);
}

#[test]
fn reports_are_deterministic_and_order_free() {
    let data = load_dataset(&fixture("u_convention.csv"), TaskFamily::StatTest).unwrap();
    let config = RunConfig::new(TaskFamily::StatTest);
    let a = diff_dataset(&data, &config).unwrap();
    let b = diff_dataset(&data, &config).unwrap();
    for f in [ReportFormat::StructuredData, ReportFormat::MarkdownTable] {
        assert_eq!(emit_report(&a, f), emit_report(&b, f));
    }
    let mut values = run_variants(&data, MetricId::MannWhitneyU, &config);
    let forward = classify_discrepancies(&values, config.tolerances);
    values.reverse();
    let backward = classify_discrepancies(&values, config.tolerances);
    assert_eq!(
        emit_report(&forward, ReportFormat::StructuredData),
        emit_report(&backward, ReportFormat::StructuredData)
    );
}

fn cli(args: &[&str], input: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_convmetrics")).args(args).arg("--input").arg(input).output().unwrap()
}

#[test]
fn cli_exit_codes() {
    let rd = cli(&["diff", "--task", "classification", "--metrics", "precision"], &fixture("imbalanced_cm.csv"));
    assert_eq!(rd.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&rd.stdout).contains("\"rd\": 14"));
    let id = cli(&["diff", "--task", "regression", "--metrics", "r_squared", "--format", "md"], &fixture("affine_r2.csv"));
    assert_eq!(id.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&id.stdout).contains("## ID"));
    let bad = cli(&["diff", "--task", "regression"], &fixture("missing.csv"));
    assert_eq!(bad.status.code(), Some(1));
    let wrong = cli(&["diff", "--task", "regression", "--metrics", "ssim"], &fixture("affine_r2.csv"));
    assert_eq!(wrong.status.code(), Some(1));
}

#[test]
fn cli_compute_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("values.json");
    let res = cli(
        &["compute", "--task", "regression", "--metrics", "r_squared", "--out", out.to_str().unwrap()],
        &fixture("affine_r2.csv"),
    );
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["task"], "regression");
    assert_eq!(doc["results"].as_array().unwrap().len(), 3);

    let report = dir.path().join("report.md");
    let res = cli(
        &["diff", "--task", "segmentation2d", "--format", "md", "--out", report.to_str().unwrap()],
        &fixture("class_averaged_iou.txt"),
    );
    assert_eq!(res.status.code(), Some(0));
    assert!(std::fs::read_to_string(&report).unwrap().starts_with("# Discrepancy report"));
}

#[test]
fn cli_lists_metrics() {
    let out = Command::new(env!("CARGO_BIN_EXE_convmetrics")).args(["list-metrics", "--task", "stattest"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().filter(|l| !l.trim().is_empty()).count() >= 15, "{text}");
    assert!(text.contains("mann_whitney_u"));
}
