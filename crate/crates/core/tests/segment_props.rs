use convmetrics::segment::*;
use convmetrics_oracles as oracles;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn mask_pair(max_side: usize) -> impl Strategy<Value = (usize, usize, Vec<bool>, Vec<bool>)> {
    (2..=max_side, 2..=max_side).prop_flat_map(|(r, c)| {
        (
            Just(r),
            Just(c),
            prop::collection::vec(prop::bool::weighted(0.4), r * c),
            prop::collection::vec(prop::bool::weighted(0.4), r * c),
        )
    })
}

fn coords(m: &Mask<f64>, flags: &[bool]) -> Vec<Vec<f64>> {
    let (shape, sp) = (m.shape(), m.spacing().to_vec());
    flags
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .map(|(i, _)| {
            let mut rest = i;
            let mut idx = vec![0; shape.len()];
            for ax in (0..shape.len()).rev() {
                idx[ax] = rest % shape[ax];
                rest /= shape[ax];
            }
            idx.iter().zip(&sp).map(|(&k, &s)| k as f64 * s).collect()
        })
        .collect()
}

fn hd(a: &Mask<f64>, b: &Mask<f64>, v: HausdorffVariant<f64>, ps: PointSet) -> Option<f64> {
    hausdorff(a, b, v, ps).unwrap().as_scalar()
}

const SETS: [PointSet; 3] = [
    PointSet::Boundary(Connectivity::Face),
    PointSet::Boundary(Connectivity::Corner),
    PointSet::AllForeground,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dice_iou_relation((r, c, a, b) in mask_pair(8)) {
        let p = Mask::<f64>::new(&[r, c], a).unwrap();
        let q = Mask::<f64>::new(&[r, c], b).unwrap();
        for v in [OverlapVariant::ForegroundOnly, OverlapVariant::ClassAveraged, OverlapVariant::Micro] {
            let m = overlap_metrics(&p, &q, v, EmptyPolicy::Undefined).unwrap();
            if v != OverlapVariant::ClassAveraged {
                if let (Some(d), Some(j)) = (m.dice.as_scalar(), m.iou.as_scalar()) {
                    prop_assert!((d - 2.0 * j / (1.0 + j)).abs() < 1e-12);
                }
            }
            prop_assert_eq!(m.f1.as_scalar(), m.dice.as_scalar());
        }
    }

    #[test]
    fn hausdorff_matches_brute_force((r, c, a, b) in mask_pair(9), sy in 0.3f64..3.0, sx in 0.3f64..3.0) {
        let p = Mask::<f64>::new(&[r, c], a).unwrap().with_spacing(&[sy, sx]).unwrap();
        let q = Mask::<f64>::new(&[r, c], b).unwrap().with_spacing(&[sy, sx]).unwrap();
        for ps in SETS {
            let (fa, fb) = match ps {
                PointSet::Boundary(conn) => (boundary_extract_with(&p, conn), boundary_extract_with(&q, conn)),
                PointSet::AllForeground => (boundary_mask_all(&p), boundary_mask_all(&q)),
            };
            let want = oracles::naive_hausdorff(&fa, &fb);
            let got = (
                hd(&p, &q, HausdorffVariant::DirectedAB, ps),
                hd(&p, &q, HausdorffVariant::DirectedBA, ps),
                hd(&p, &q, HausdorffVariant::SymmetricMax, ps),
            );
            match want {
                None => prop_assert!(got.0.is_none() && got.1.is_none() && got.2.is_none()),
                Some((ab, ba, mx)) => {
                    prop_assert!((got.0.unwrap() - ab).abs() < 1e-9);
                    prop_assert!((got.1.unwrap() - ba).abs() < 1e-9);
                    prop_assert!((got.2.unwrap() - mx).abs() < 1e-9);
                    let p100 = hd(&p, &q, HausdorffVariant::Percentile(100.0), ps).unwrap();
                    prop_assert!((p100 - mx).abs() < 1e-9);
                    let p95 = hd(&p, &q, HausdorffVariant::Percentile(95.0), ps).unwrap();
                    prop_assert!(p95 <= mx + 1e-12);
                }
            }
        }
    }

    #[test]
    fn spacing_scales_distances((r, c, a, b) in mask_pair(8), k in 0.1f64..10.0) {
        let p = Mask::<f64>::new(&[r, c], a.clone()).unwrap();
        let q = Mask::<f64>::new(&[r, c], b.clone()).unwrap();
        let ps = Mask::<f64>::new(&[r, c], a).unwrap().with_spacing(&[k, k]).unwrap();
        let qs = Mask::<f64>::new(&[r, c], b).unwrap().with_spacing(&[k, k]).unwrap();
        for set in SETS {
            if let (Some(h), Some(hs)) = (hd(&p, &q, HausdorffVariant::SymmetricMax, set), hd(&ps, &qs, HausdorffVariant::SymmetricMax, set)) {
                prop_assert!((hs - k * h).abs() <= 1e-9 * (k * h).max(1.0));
            }
        }
        // overlap ignores spacing
        let m1 = overlap_metrics(&p, &q, OverlapVariant::ForegroundOnly, EmptyPolicy::One).unwrap();
        let m2 = overlap_metrics(&ps, &qs, OverlapVariant::ForegroundOnly, EmptyPolicy::One).unwrap();
        prop_assert_eq!(m1.dice.as_scalar(), m2.dice.as_scalar());
    }

    #[test]
    fn flip_invariance((r, c, a, b) in mask_pair(8)) {
        let flip = |v: &[bool]| -> Vec<bool> {
            (0..r * c).map(|i| v[(r - 1 - i / c) * c + (c - 1 - i % c)]).collect()
        };
        let transpose = |v: &[bool]| -> Vec<bool> {
            (0..r * c).map(|i| v[(i % r) * c + i / r]).collect()
        };
        let p = Mask::<f64>::new(&[r, c], a.clone()).unwrap();
        let q = Mask::<f64>::new(&[r, c], b.clone()).unwrap();
        let pf = Mask::<f64>::new(&[r, c], flip(&a)).unwrap();
        let qf = Mask::<f64>::new(&[r, c], flip(&b)).unwrap();
        let pt = Mask::<f64>::new(&[c, r], transpose(&a)).unwrap();
        let qt = Mask::<f64>::new(&[c, r], transpose(&b)).unwrap();
        for set in SETS {
            let h = hd(&p, &q, HausdorffVariant::SymmetricMax, set);
            for (x, y) in [(&pf, &qf), (&pt, &qt)] {
                match (h, hd(x, y, HausdorffVariant::SymmetricMax, set)) {
                    (Some(u), Some(v)) => prop_assert!((u - v).abs() < 1e-12),
                    (u, v) => prop_assert_eq!(u.is_some(), v.is_some()),
                }
            }
        }
        for conn in [Connectivity::Face, Connectivity::Corner] {
            let f = boundary_f1(&p, &q, 1.5, conn).unwrap().as_scalar();
            prop_assert_eq!(f, boundary_f1(&pt, &qt, 1.5, conn).unwrap().as_scalar());
        }
        let d = overlap_metrics(&p, &q, OverlapVariant::Micro, EmptyPolicy::Zero).unwrap();
        let dt = overlap_metrics(&pt, &qt, OverlapVariant::Micro, EmptyPolicy::Zero).unwrap();
        prop_assert_eq!(d, dt);
    }

    #[test]
    fn depth_one_lift_is_consistent((r, c, a, b) in mask_pair(7)) {
        let p = Mask::<f64>::new(&[r, c], a).unwrap();
        let q = Mask::<f64>::new(&[r, c], b).unwrap();
        let (p3, q3) = (p.lift_3d(), q.lift_3d());
        prop_assert_eq!(p3.ndim(), 3);
        for set in SETS {
            prop_assert_eq!(
                hd(&p, &q, HausdorffVariant::SymmetricMax, set),
                hd(&p3, &q3, HausdorffVariant::SymmetricMax, set)
            );
        }
        for conn in [Connectivity::Face, Connectivity::Corner] {
            prop_assert_eq!(boundary_extract_with(&p, conn).len(), boundary_extract_with(&p3, conn).len());
            prop_assert_eq!(
                boundary_f1(&p, &q, 1.0, conn).unwrap().as_scalar(),
                boundary_f1(&p3, &q3, 1.0, conn).unwrap().as_scalar()
            );
        }
        for kind in [PartitionKind::AdaptedRandError, PartitionKind::AdjustedRandIndex, PartitionKind::VariationOfInformation] {
            prop_assert_eq!(
                partition_metrics(&p, &q, kind).unwrap().as_scalar(),
                partition_metrics(&p3, &q3, kind).unwrap().as_scalar()
            );
        }
    }

    #[test]
    fn partitions_match_pair_counting((r, c, a, b) in mask_pair(8)) {
        let p = Mask::<f64>::new(&[r, c], a.clone()).unwrap();
        let q = Mask::<f64>::new(&[r, c], b.clone()).unwrap();
        let lab = |v: &[bool]| v.iter().map(|&x| u32::from(x)).collect::<Vec<_>>();
        let get = |k| partition_metrics(&p, &q, k).unwrap().as_scalar();
        let ari = get(PartitionKind::AdjustedRandIndex);
        let are = get(PartitionKind::AdaptedRandError);
        let voi = get(PartitionKind::VariationOfInformation).unwrap();
        let (want_ari, want_are, want_voi) = oracles::pair_counting_rand(&lab(&a), &lab(&b)).unwrap();
        if let Some(x) = ari {
            prop_assert!((x - want_ari).abs() < 1e-12);
        }
        if let Some(x) = are {
            prop_assert!((x - want_are).abs() < 1e-12);
        }
        prop_assert!((voi - want_voi).abs() < 1e-12);
        prop_assert!(voi >= -1e-15);
    }
}

fn boundary_mask_all(m: &Mask<f64>) -> Vec<Vec<f64>> {
    coords(m, m.data())
}

fn boundary_extract_with(m: &Mask<f64>, conn: Connectivity) -> Vec<Vec<f64>> {
    convmetrics::segment::boundary_extract_with(m, conn).coordinates()
}

#[test]
fn ari_near_zero_for_independent_labels() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let n = 10_000;
    let a: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let b: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
    let p = Mask::<f64>::new(&[100, 100], a).unwrap();
    let q = Mask::<f64>::new(&[100, 100], b).unwrap();
    let ari = partition_metrics(&p, &q, PartitionKind::AdjustedRandIndex).unwrap().unwrap_scalar();
    assert!(ari.abs() < 0.01, "ARI = {ari}");
}

#[test]
fn class_averaging_hides_small_foreground_miss() {
    // 1 reference voxel in 100, prediction misses it but is otherwise empty
    let mut r = vec![false; 100];
    r[42] = true;
    let mut p = vec![false; 100];
    p[43] = true;
    let (p, r) = (Mask::<f64>::new(&[10, 10], p).unwrap(), Mask::<f64>::new(&[10, 10], r).unwrap());
    let fg = overlap_metrics(&p, &r, OverlapVariant::ForegroundOnly, EmptyPolicy::Undefined).unwrap();
    let avg = overlap_metrics(&p, &r, OverlapVariant::ClassAveraged, EmptyPolicy::Undefined).unwrap();
    assert_eq!(fg.iou.unwrap_scalar(), 0.0);
    let bg = 98.0 / 100.0;
    assert!((avg.iou.unwrap_scalar() - bg / 2.0).abs() < 1e-15);
    assert_eq!(avg.mean_iou, fg.mean_iou);
    assert!(avg.iou.unwrap_scalar() - fg.iou.unwrap_scalar() > 0.4);
}

#[test]
fn anisotropic_hausdorff_example() {
    let a = Mask::<f64>::from_indices(&[3, 5], &[vec![1, 0]]).unwrap().with_spacing(&[2.0, 0.5]).unwrap();
    let b = Mask::<f64>::from_indices(&[3, 5], &[vec![0, 4]]).unwrap().with_spacing(&[2.0, 0.5]).unwrap();
    let h = hd(&a, &b, HausdorffVariant::SymmetricMax, PointSet::AllForeground).unwrap();
    assert!((h - (4.0f64 + 4.0).sqrt()).abs() < 1e-12);
    let empty = Mask::<f64>::new(&[3, 5], vec![false; 15]).unwrap().with_spacing(&[2.0, 0.5]).unwrap();
    assert!(hd(&a, &empty, HausdorffVariant::SymmetricMax, PointSet::AllForeground).is_none());
    let other = Mask::<f64>::new(&[3, 5], vec![false; 15]).unwrap();
    assert!(hausdorff(&a, &other, HausdorffVariant::SymmetricMax, PointSet::AllForeground).is_err());
}
