use convmetrics::classify::{self, MccVariant, PrfQuantity, TiePolicy};
use convmetrics::stattest::{mann_whitney, MannWhitneyOptions, SampleGroups};
use convmetrics::{ConfusionMatrix, LabelSet, ReportingMode, ZeroDivision};
use convmetrics_oracles as oracles;
use proptest::prelude::*;

fn labelled(k: u32, n: usize) -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
    (prop::collection::vec(0..k, n), prop::collection::vec(0..k, n))
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() < 1e-12,
        (None, None) => true,
        _ => false,
    }
}

proptest! {
    #[test]
    fn confusion_sums_match_direct_tally((t, p) in labelled(4, 40)) {
        let labels = LabelSet::range(4).unwrap();
        let cm = ConfusionMatrix::from_labels(&t, &p, &labels).unwrap();
        let direct = oracles::label_confusion(&t, &p, 4);
        prop_assert_eq!(cm.rows(), direct.clone());
        for k in 0..4 {
            prop_assert_eq!(cm.row_sum(k), t.iter().filter(|&&v| v == k as u32).count() as u64);
            prop_assert_eq!(cm.col_sum(k), p.iter().filter(|&&v| v == k as u32).count() as u64);
        }
    }

    #[test]
    fn per_class_prf_matches_counting((t, p) in labelled(3, 30)) {
        let labels = LabelSet::range(3).unwrap();
        let cm = ConfusionMatrix::from_labels(&t, &p, &labels).unwrap();
        let r = classify::prf_report::<f64>(&cm, 1.0).unwrap();
        for c in 0..3u32 {
            let (op, or, of) = oracles::class_prf(&t, &p, c);
            let s = &r.per_class[c as usize];
            prop_assert!(close(s.precision, op));
            prop_assert!(close(s.recall, or));
            // F1 from counts is defined whenever TP + FP + FN > 0
            prop_assert!(close(s.f_beta, of));
        }
    }

    #[test]
    fn micro_equals_accuracy((t, p) in labelled(3, 25)) {
        let labels = LabelSet::range(3).unwrap();
        let cm = ConfusionMatrix::from_labels(&t, &p, &labels).unwrap();
        let r = classify::prf_report::<f64>(&cm, 1.0).unwrap();
        let acc = classify::accuracy::<f64>(&cm).unwrap_scalar();
        for q in [PrfQuantity::Precision, PrfQuantity::Recall, PrfQuantity::FBeta] {
            let v = r.select(q, ReportingMode::Micro).unwrap().unwrap_scalar();
            prop_assert!((v - acc).abs() < 1e-12);
        }
    }

    #[test]
    fn jaccard_from_f1((t, p) in labelled(4, 30)) {
        let labels = LabelSet::range(4).unwrap();
        let cm = ConfusionMatrix::from_labels(&t, &p, &labels).unwrap();
        let r = classify::prf_report::<f64>(&cm, 1.0).unwrap();
        for c in &r.per_class {
            if let (Some(f1), Some(j)) = (c.f_beta, c.jaccard) {
                prop_assert!((j - f1 / (2.0 - f1)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn generalized_mcc_binary((t, p) in labelled(2, 30)) {
        let labels = LabelSet::binary();
        let cm = ConfusionMatrix::from_labels(&t, &p, &labels).unwrap();
        let g = classify::mcc::<f64>(&cm, MccVariant::Generalized, ZeroDivision::Zero).unwrap();
        let b = classify::mcc::<f64>(&cm, MccVariant::BinaryPositive(1), ZeroDivision::Zero).unwrap();
        prop_assert!((g.unwrap_scalar() - b.unwrap_scalar()).abs() < 1e-12);
    }

    #[test]
    fn relabel_invariance((t, p) in labelled(3, 30), perm in Just(vec![2usize, 0, 1])) {
        let labels = LabelSet::range(3).unwrap();
        let cm = ConfusionMatrix::from_labels(&t, &p, &labels).unwrap();
        let q = cm.permuted(&perm);
        let eq = |a: convmetrics::MetricValue<f64>, b: convmetrics::MetricValue<f64>| {
            match (a.as_scalar(), b.as_scalar()) {
                (Some(x), Some(y)) => (x - y).abs() < 1e-12,
                (None, None) => true,
                _ => false,
            }
        };
        prop_assert!(eq(classify::accuracy(&cm), classify::accuracy(&q)));
        prop_assert!(eq(classify::cohen_kappa(&cm), classify::cohen_kappa(&q)));
        prop_assert!(eq(classify::g_mean(&cm), classify::g_mean(&q)));
        prop_assert!(eq(
            classify::mcc(&cm, MccVariant::Generalized, ZeroDivision::Zero).unwrap(),
            classify::mcc(&q, MccVariant::Generalized, ZeroDivision::Zero).unwrap()
        ));
        let (ra, rb) = (
            classify::prf_report::<f64>(&cm, 1.0).unwrap(),
            classify::prf_report::<f64>(&q, 1.0).unwrap(),
        );
        for quantity in [PrfQuantity::Precision, PrfQuantity::Recall, PrfQuantity::FBeta, PrfQuantity::Jaccard] {
            prop_assert!(eq(
                ra.select(quantity, ReportingMode::Macro).unwrap(),
                rb.select(quantity, ReportingMode::Macro).unwrap()
            ));
        }
    }

    #[test]
    fn auc_matches_pairs_and_u(
        y in prop::collection::vec(any::<bool>(), 6..30),
        raw in prop::collection::vec(0u8..8, 30),
    ) {
        prop_assume!(y.iter().any(|&b| b) && y.iter().any(|&b| !b));
        prop_assume!(y.iter().filter(|&&b| b).count() >= 2 && y.iter().filter(|&&b| !b).count() >= 2);
        let scores: Vec<f64> = raw[..y.len()].iter().map(|&s| f64::from(s) / 8.0).collect();
        let labels: Vec<u32> = y.iter().map(|&b| u32::from(b)).collect();
        let auc = classify::roc_auc(&labels, &scores, 1, TiePolicy::HalfCredit).unwrap().unwrap_scalar();
        prop_assert!((auc - oracles::pairwise_auc(&y, &scores).unwrap()).abs() < 1e-12);

        let pos: Vec<f64> = scores.iter().zip(&y).filter(|(_, &b)| b).map(|(s, _)| *s).collect();
        let neg: Vec<f64> = scores.iter().zip(&y).filter(|(_, &b)| !b).map(|(s, _)| *s).collect();
        let (np, nn) = (pos.len() as f64, neg.len() as f64);
        let u = mann_whitney(&SampleGroups::new(vec![pos, neg]).unwrap(), MannWhitneyOptions::default())
            .unwrap()
            .statistic;
        prop_assert!((auc - u / (np * nn)).abs() < 1e-12);
    }
}

#[test]
fn imbalanced_matrix_macro_differs_from_micro() {
    let cm = ConfusionMatrix::from_rows(&[vec![90, 0], vec![9, 1]]).unwrap();
    let r = classify::prf_report::<f64>(&cm, 1.0).unwrap();
    let micro = r.select(PrfQuantity::Precision, ReportingMode::Micro).unwrap().unwrap_scalar();
    let macro_ = r.select(PrfQuantity::Precision, ReportingMode::Macro).unwrap().unwrap_scalar();
    assert!((micro - 0.91).abs() < 1e-12);
    assert!((macro_ - micro).abs() > 0.01);
}

#[test]
fn auc_four_point_example() {
    let auc = classify::roc_auc(&[0, 1, 0, 1], &[0.5, 0.2, 0.3, 0.9], 1, TiePolicy::HalfCredit)
        .unwrap()
        .unwrap_scalar();
    assert_eq!(auc, oracles::pairwise_auc(&[false, true, false, true], &[0.5, 0.2, 0.3, 0.9]).unwrap());
}
