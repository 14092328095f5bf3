use convmetrics::imgqual::*;
use convmetrics::regress::{self, PairedSeries, R2Variant};
use proptest::prelude::*;

fn rasters(min: usize, max: usize) -> impl Strategy<Value = (usize, usize, Vec<f64>, Vec<f64>)> {
    (min..=max, min..=max).prop_flat_map(|(r, c)| {
        (
            Just(r),
            Just(c),
            prop::collection::vec(0.0f64..1.0, r * c),
            prop::collection::vec(0.0f64..1.0, r * c),
        )
    })
}

fn pair(r: usize, c: usize, a: &[f64], b: &[f64], range: DataRange<f64>) -> RasterPair<f64> {
    RasterPair::new(a.to_vec(), b.to_vec(), &[r, c], range).unwrap()
}

const WINDOWS: [SsimWindow<f64>; 3] = [SsimWindow::Uniform(7), SsimWindow::Uniform(3), SsimWindow::Gaussian(7, 1.5)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ssim_identity_symmetry_and_range((r, c, a, b) in rasters(7, 14)) {
        for w in WINDOWS {
            let same = pair(r, c, &a, &a, DataRange::UnitInterval);
            prop_assert_eq!(ssim(&same, w, 0.01, 0.03).unwrap().unwrap_scalar(), 1.0);
            let ab = ssim(&pair(r, c, &a, &b, DataRange::UnitInterval), w, 0.01, 0.03).unwrap().unwrap_scalar();
            let ba = ssim(&pair(r, c, &b, &a, DataRange::UnitInterval), w, 0.01, 0.03).unwrap().unwrap_scalar();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&ab));
        }
    }

    #[test]
    fn psnr_range_shift_is_exact((r, c, a, b) in rasters(2, 10), big in 1.5f64..300.0) {
        prop_assume!(a != b);
        let unit = psnr(&pair(r, c, &a, &b, DataRange::UnitInterval)).unwrap().unwrap_scalar();
        let decl = psnr(&pair(r, c, &a, &b, DataRange::DeclaredMax(big))).unwrap().unwrap_scalar();
        prop_assert!((decl - unit - 20.0 * big.log10()).abs() < 1e-9);
    }

    #[test]
    fn psnr_decreases_with_error((r, c, a, _b) in rasters(2, 10), e1 in 0.01f64..0.1, k in 1.1f64..5.0) {
        let noisy = |e: f64| a.iter().enumerate().map(|(i, v)| v + if i % 2 == 0 { e } else { -e }).collect::<Vec<_>>();
        let p1 = psnr(&pair(r, c, &a, &noisy(e1), DataRange::DeclaredMax(1.0))).unwrap().unwrap_scalar();
        let p2 = psnr(&pair(r, c, &a, &noisy(e1 * k), DataRange::DeclaredMax(1.0))).unwrap().unwrap_scalar();
        prop_assert!(p2 < p1);
        let same = psnr(&pair(r, c, &a, &a, DataRange::DeclaredMax(1.0))).unwrap();
        prop_assert_eq!(same.unwrap_scalar(), f64::INFINITY);
        prop_assert!(same.is_ok());
    }

    #[test]
    fn raster_errors_agree_with_regression((r, c, a, b) in rasters(2, 10)) {
        let e = raster_errors(&pair(r, c, &a, &b, DataRange::UnitInterval)).unwrap();
        let s = PairedSeries::new(a.clone(), b.clone()).unwrap();
        let base = regress::basic_errors(&s);
        prop_assert_eq!(e.mae.as_scalar().map(f64::to_bits), base.mae.as_scalar().map(f64::to_bits));
        prop_assert_eq!(e.mse.as_scalar().map(f64::to_bits), base.mse.as_scalar().map(f64::to_bits));
        prop_assert_eq!(e.rmse.as_scalar().map(f64::to_bits), base.rmse.as_scalar().map(f64::to_bits));
        let cod = regress::r_squared(&s, R2Variant::CoefficientOfDetermination).unwrap();
        let sp = regress::r_squared(&s, R2Variant::SquaredPearson).unwrap();
        prop_assert_eq!(e.r2_determination.as_scalar().map(f64::to_bits), cod.as_scalar().map(f64::to_bits));
        prop_assert_eq!(e.r2_squared_pearson.as_scalar().map(f64::to_bits), sp.as_scalar().map(f64::to_bits));
    }

    #[test]
    fn depth_one_lift_is_consistent((r, c, a, b) in rasters(7, 12)) {
        let p = pair(r, c, &a, &b, DataRange::ObservedRefRange);
        let p3 = p.lift_3d();
        prop_assert_eq!(psnr(&p).unwrap().as_scalar(), psnr(&p3).unwrap().as_scalar());
        for w in WINDOWS {
            prop_assert_eq!(
                ssim(&p, w, 0.01, 0.03).unwrap().as_scalar(),
                ssim(&p3, w, 0.01, 0.03).unwrap().as_scalar()
            );
        }
    }
}

#[test]
fn constant_images_closed_form() {
    let p = pair(12, 12, &[0.0; 144], &[1.0; 144], DataRange::DeclaredMax(1.0));
    for w in WINDOWS {
        let v = ssim(&p, w, 0.01, 0.03).unwrap().unwrap_scalar();
        assert!((v - 1e-4 / (1.0 + 1e-4)).abs() < 1e-9, "{v}");
    }
}

#[test]
fn window_choice_changes_ssim() {
    let (r, c) = (16, 16);
    let x: Vec<f64> = (0..r * c).map(|i| ((i * 37 % 11) as f64) / 10.0).collect();
    let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| (v + 0.3 * ((i as f64) * 0.7).sin()).clamp(0.0, 1.0)).collect();
    let p = pair(r, c, &x, &y, DataRange::UnitInterval);
    let g = ssim(&p, SsimWindow::Gaussian(11, 1.5), 0.01, 0.03).unwrap().unwrap_scalar();
    let u = ssim(&p, SsimWindow::Uniform(7), 0.01, 0.03).unwrap().unwrap_scalar();
    assert!((g - u).abs() > 1e-3, "{g} vs {u}");
    assert!(ssim(&p, SsimWindow::Uniform(17), 0.01, 0.03).is_err());
    assert!(ssim(&p, SsimWindow::Uniform(4), 0.01, 0.03).is_err());
}

#[test]
fn observed_range_needs_spread() {
    assert!(RasterPair::new(vec![1.0; 4], vec![0.0; 4], &[2, 2], DataRange::ObservedRefRange).is_err());
    let p = RasterPair::new(vec![0.0, 2.0, 4.0, 1.0], vec![0.0; 4], &[2, 2], DataRange::ObservedRefRange).unwrap();
    assert_eq!(p.data_range(), 4.0);
}
