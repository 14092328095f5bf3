use convmetrics::special;
use convmetrics::stattest::*;
use convmetrics_oracles::{self as oracles, Dist, SplitStatistic};
use proptest::prelude::*;

fn two_groups(n: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (n.clone(), n).prop_flat_map(|(a, b)| {
        (
            prop::collection::vec((0u8..12).prop_map(|v| f64::from(v) / 2.0), a),
            prop::collection::vec((0u8..12).prop_map(|v| f64::from(v) / 2.0), b),
        )
    })
}

fn all_results(x: &[f64], y: &[f64]) -> Vec<convmetrics::TestResult<f64>> {
    let s = SampleGroups::new(vec![x.to_vec(), y.to_vec()]).unwrap();
    let mut out = Vec::new();
    for tail in [Tail::TwoSided, Tail::Greater, Tail::Less] {
        for kind in [TKind::IndependentPooled, TKind::Welch, TKind::ZKnownSigma(1.5)] {
            out.extend(t_tests(&s, kind, tail));
        }
        out.extend(f_test(&s, tail));
        for method in [PMethod::Normal, PMethod::Exact] {
            for statistic in [UStatistic::U1, UStatistic::U2, UStatistic::RankSumW] {
                out.extend(mann_whitney(
                    &s,
                    MannWhitneyOptions {
                        statistic,
                        continuity: true,
                        method,
                        tail,
                    },
                ));
            }
        }
        out.extend(permutation_test(&s, PermStatistic::MeanDiff, PermMethod::MonteCarlo { n_resamples: 200, seed: 3 }, tail));
    }
    out.extend(ks_2samp(&s, KsMethod::Asymptotic));
    out.extend(ks_2samp(&s, KsMethod::Exact));
    out.extend(kruskal_wallis(&s));
    out.extend(anova(&s));
    out.extend(bartlett(&s));
    for c in [LeveneCenter::Mean, LeveneCenter::Median, LeveneCenter::Trimmed(0.1)] {
        out.extend(levene(&s, c));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn p_values_in_unit_interval((x, y) in two_groups(2..12)) {
        for r in all_results(&x, &y) {
            if r.is_ok() {
                prop_assert!((0.0..=1.0).contains(&r.p_value), "{} gave {}", r.descriptor, r.p_value);
            }
            prop_assert!(r.validity != convmetrics::Validity::OutOfDomain);
        }
        if x.len() == y.len() {
            let s = SampleGroups::paired(x.clone(), y.clone()).unwrap();
            for method in [PMethod::Normal, PMethod::Exact] {
                for zero_policy in [ZeroPolicy::Wilcoxon, ZeroPolicy::Pratt] {
                    let o = WilcoxonOptions { zero_policy, statistic: WStatistic::WPlus, method, tail: Tail::TwoSided };
                    if let Ok(r) = wilcoxon_signed_rank(&s, o) {
                        if r.is_ok() {
                            prop_assert!((0.0..=1.0).contains(&r.p_value));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn u_statistic_identities((x, y) in two_groups(2..15)) {
        let s = SampleGroups::new(vec![x.clone(), y.clone()]).unwrap();
        let get = |statistic| {
            mann_whitney(&s, MannWhitneyOptions { statistic, ..Default::default() }).unwrap().statistic
        };
        let (n1, n2) = (x.len() as f64, y.len() as f64);
        let (u1, u2, w) = (get(UStatistic::U1), get(UStatistic::U2), get(UStatistic::RankSumW));
        prop_assert_eq!(u1 + u2, n1 * n2);
        prop_assert_eq!(w, u1 + n1 * (n1 + 1.0) / 2.0);
        // U1 counts x > y pairs with half credit for ties
        let direct: f64 = x
            .iter()
            .flat_map(|a| y.iter().map(move |b| if a > b { 1.0 } else if a == b { 0.5 } else { 0.0 }))
            .sum();
        prop_assert_eq!(u1, direct);
    }

    #[test]
    fn welch_equals_pooled_for_equal_variances(x in prop::collection::vec(-10.0f64..10.0, 3..20), shift in -3.0f64..3.0) {
        // reflected copy: identical size and variance
        let y: Vec<f64> = x.iter().map(|v| shift - v).collect();
        let s = SampleGroups::new(vec![x, y]).unwrap();
        let p = t_tests(&s, TKind::IndependentPooled, Tail::TwoSided).unwrap();
        let w = t_tests(&s, TKind::Welch, Tail::TwoSided).unwrap();
        if p.is_ok() {
            prop_assert_eq!(p.statistic, w.statistic);
            prop_assert!((p.p_value - w.p_value).abs() < 1e-12);
        }
    }

    #[test]
    fn anova_two_groups_is_t_squared((x, y) in two_groups(2..15)) {
        let s = SampleGroups::new(vec![x, y]).unwrap();
        let a = anova(&s).unwrap();
        let t = t_tests(&s, TKind::IndependentPooled, Tail::TwoSided).unwrap();
        if a.is_ok() && t.is_ok() {
            prop_assert!((a.statistic - t.statistic * t.statistic).abs() <= 1e-9 * a.statistic.max(1.0));
            prop_assert!((a.p_value - t.p_value).abs() < 1e-10);
        }
    }

    #[test]
    fn f_test_tail_relation((x, y) in two_groups(3..12)) {
        let s = SampleGroups::new(vec![x, y]).unwrap();
        if let (Ok(two), Ok(g), Ok(l)) = (f_test(&s, Tail::TwoSided), f_test(&s, Tail::Greater), f_test(&s, Tail::Less)) {
            prop_assert!(two.p_value <= 2.0 * g.p_value + 1e-15);
            prop_assert!(two.p_value <= 2.0 * l.p_value + 1e-15);
            let smaller = g.p_value.min(l.p_value);
            prop_assert!((two.p_value - (2.0 * smaller).min(1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_permutation_matches_oracle((x, y) in two_groups(2..7)) {
        let s = SampleGroups::new(vec![x.clone(), y.clone()]).unwrap();
        for (stat, oracle) in [(PermStatistic::MeanDiff, SplitStatistic::MeanDiff), (PermStatistic::MedianDiff, SplitStatistic::MedianDiff)] {
            let fast = permutation_test(&s, stat, PermMethod::ExactEnumeration, Tail::TwoSided).unwrap().p_value;
            let slow = oracles::exhaustive_permutation(&x, &y, oracle).unwrap();
            prop_assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
        }
    }

    #[test]
    fn ks_exact_matches_split_enumeration(x in prop::collection::vec(-5.0f64..5.0, 2..7), y in prop::collection::vec(-5.0f64..5.0, 2..7)) {
        let s = SampleGroups::new(vec![x.clone(), y.clone()]).unwrap();
        let fast = ks_2samp(&s, KsMethod::Exact).unwrap();
        let slow = oracles::exhaustive_permutation(&x, &y, SplitStatistic::KsD).unwrap();
        prop_assert!((fast.p_value - slow).abs() < 1e-12, "{} vs {slow}", fast.p_value);
    }

    #[test]
    fn wilcoxon_exact_matches_sign_enumeration(d in prop::collection::vec((-6i8..7).prop_map(f64::from), 2..14)) {
        prop_assume!(d.iter().any(|&v| v != 0.0));
        let s = SampleGroups::new(vec![d.clone()]).unwrap();
        let o = WilcoxonOptions { method: PMethod::Exact, ..Default::default() };
        let r = wilcoxon_signed_rank(&s, o).unwrap();
        let (w, p) = oracles::exhaustive_wilcoxon(&d).unwrap();
        prop_assert_eq!(r.statistic, w);
        prop_assert!((r.p_value - p).abs() < 1e-12, "{} vs {p}", r.p_value);
    }
}

#[test]
fn mwu_table_matches_recurrence() {
    for n1 in 1..8 {
        for n2 in 1..8 {
            let fast = mwu_exact_table(n1, n2).unwrap();
            let slow: Vec<f64> = oracles::exact_mwu_distribution(n1, n2).into_iter().map(|c| c as f64).collect();
            assert_eq!(fast, slow, "n1={n1} n2={n2}");
        }
    }
}

#[test]
fn wilcoxon_three_differences() {
    let s = SampleGroups::new(vec![vec![1.0, -2.0, 3.0]]).unwrap();
    let exact = |statistic| {
        wilcoxon_signed_rank(&s, WilcoxonOptions { statistic, method: PMethod::Exact, ..Default::default() }).unwrap()
    };
    assert_eq!(exact(WStatistic::WPlus).statistic, 4.0);
    assert_eq!(exact(WStatistic::WMin).statistic, 2.0);
    let (_, p) = oracles::exhaustive_wilcoxon(&[1.0, -2.0, 3.0]).unwrap();
    assert!((exact(WStatistic::WPlus).p_value - p).abs() < 1e-15);
}

#[test]
fn rank_example_hand_counts() {
    let s = SampleGroups::new(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
    let get = |statistic| mann_whitney(&s, MannWhitneyOptions { statistic, ..Default::default() }).unwrap().statistic;
    assert_eq!((get(UStatistic::U1), get(UStatistic::U2), get(UStatistic::RankSumW)), (0.0, 4.0, 3.0));
    let same = SampleGroups::new(vec![vec![1.0, 2.0, 3.0]; 3]).unwrap();
    let kw = kruskal_wallis(&same).unwrap();
    assert_eq!(kw.statistic, 0.0);
    assert_eq!(kw.p_value, 1.0);
}

#[test]
fn cdfs_match_quadrature() {
    for &x in &[-3.0, -1.2, 0.0, 0.4, 1.96, 4.5] {
        assert!((special::normal_cdf(x) - oracles::numeric_cdf(Dist::Normal, x)).abs() < 1e-10);
        for df in [1.0, 2.5, 7.0, 30.0] {
            let want = oracles::numeric_cdf(Dist::StudentT(df), x);
            assert!((special::t_cdf(x, df) - want).abs() < 1e-10, "t({df}) at {x}");
        }
    }
    for &x in &[0.05, 0.5, 1.0, 3.0, 10.0, 25.0] {
        for k in [1.0, 2.0, 3.0, 9.5] {
            let want = oracles::numeric_cdf(Dist::ChiSquare(k), x);
            assert!((special::chi2_cdf(x, k) - want).abs() < 1e-10, "chi2({k}) at {x}");
        }
        for (d1, d2) in [(1.0, 1.0), (2.0, 6.0), (5.0, 12.0), (9.0, 3.5)] {
            let want = oracles::numeric_cdf(Dist::F(d1, d2), x);
            assert!((special::f_cdf(x, d1, d2) - want).abs() < 1e-10, "F({d1},{d2}) at {x}");
        }
    }
    let tail = 1.0 - oracles::numeric_cdf(Dist::ChiSquare(2.0), 10.0);
    assert!((tail - 0.006_737_946_999_085_467).abs() < 1e-12);
}

#[test]
fn exact_and_asymptotic_agreement_by_size() {
    let smooth = |n: usize, shift: f64| -> Vec<f64> {
        (0..n).map(|i| special::normal_quantile((i as f64 + 0.5) / n as f64) + shift).collect()
    };
    for n in [50, 70, 100] {
        let s = SampleGroups::new(vec![smooth(n, 0.0), smooth(n, 0.3)]).unwrap();
        let e = ks_2samp(&s, KsMethod::Exact).unwrap();
        let a = ks_2samp(&s, KsMethod::Asymptotic).unwrap();
        assert_eq!(e.descriptor.family, convmetrics::FormulaFamily::Exact);
        assert!((e.p_value - a.p_value).abs() < 0.01, "n={n}: {} vs {}", e.p_value, a.p_value);
        let mw = |method| {
            mann_whitney(&s, MannWhitneyOptions { method, ..Default::default() }).unwrap().p_value
        };
        if n <= 70 {
            assert!((mw(PMethod::Exact) - mw(PMethod::Normal)).abs() < 0.01);
        } else {
            assert!(mann_whitney(&s, MannWhitneyOptions { method: PMethod::Exact, ..Default::default() }).is_err());
        }
    }
    // small samples: the two KS p-methods split visibly
    let s = SampleGroups::new(vec![vec![0.1, 0.2, 0.3, 0.7, 1.1], vec![0.4, 0.8, 0.9, 1.0, 1.2]]).unwrap();
    let e: f64 = ks_2samp(&s, KsMethod::Exact).unwrap().p_value;
    let a = ks_2samp(&s, KsMethod::Asymptotic).unwrap().p_value;
    assert!((e - a).abs() > 0.01, "{e} vs {a}");
}

#[test]
fn monte_carlo_independent_of_thread_count() {
    let s = SampleGroups::new(vec![vec![1.2, 3.4, 2.2, 5.0, 0.3, 2.8], vec![2.5, 4.1, 3.9, 6.2, 1.7, 4.4]]).unwrap();
    let method = PermMethod::MonteCarlo { n_resamples: 5_000, seed: 1234 };
    let run = |threads| -> f64 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| permutation_test(&s, PermStatistic::MeanDiff, method, Tail::TwoSided).unwrap().p_value)
    };
    let one: f64 = run(1);
    assert_eq!(one.to_bits(), run(4).to_bits());
    assert_eq!(one.to_bits(), run(7).to_bits());
}
