//! Image-to-image quality: pixel errors, PSNR and SSIM with an explicit
//! data range.

use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId, ParamKey};
use crate::error::{MetricError, Result};
use crate::numeric;
use crate::regress::{self, PairedSeries, R2Variant};
use crate::scalar::{sum, Scalar};
use crate::value::MetricValue;

/// Dynamic range `L` used by PSNR and the SSIM stabilisers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataRange<T> {
    DeclaredMax(T),
    /// `max(ref) − min(ref)`.
    ObservedRefRange,
    UnitInterval,
}

impl<T: Scalar> DataRange<T> {
    pub fn name(self) -> &'static str {
        match self {
            DataRange::DeclaredMax(_) => "declared",
            DataRange::ObservedRefRange => "observed",
            DataRange::UnitInterval => "unit",
        }
    }
}

/// Reference and test rasters of one 2D or 3D shape, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterPair<T> {
    ndim: usize,
    /// Always `[depth, rows, cols]`.
    dims: [usize; 3],
    reference: Vec<T>,
    test: Vec<T>,
    range: DataRange<T>,
    l: T,
}

impl<T: Scalar> RasterPair<T> {
    pub fn new(reference: Vec<T>, test: Vec<T>, shape: &[usize], range: DataRange<T>) -> Result<Self> {
        let dims = match *shape {
            [r, c] => [1, r, c],
            [d, r, c] => [d, r, c],
            _ => {
                return Err(MetricError::InvalidParameter(format!(
                    "rasters are 2D or 3D, got {} axes",
                    shape.len()
                )))
            }
        };
        let len: usize = dims.iter().product();
        for v in [&reference, &test] {
            if v.len() != len {
                return Err(MetricError::LengthMismatch { left: len, right: v.len() });
            }
        }
        if len == 0 {
            return Err(MetricError::InvalidParameter("raster axes must be non-empty".into()));
        }
        if !numeric::all_finite(&reference) || !numeric::all_finite(&test) {
            return Err(MetricError::NonFinite);
        }
        let l = match range {
            DataRange::DeclaredMax(l) => l,
            DataRange::UnitInterval => T::one(),
            DataRange::ObservedRefRange => {
                let lo = reference.iter().copied().fold(T::infinity(), T::min);
                let hi = reference.iter().copied().fold(T::neg_infinity(), T::max);
                hi - lo
            }
        };
        if !(l > T::zero()) || !l.is_finite() {
            return Err(MetricError::InvalidParameter(format!(
                "resolved data range must be positive, got {}",
                l.to_f64_lossy()
            )));
        }
        Ok(RasterPair {
            ndim: shape.len(),
            dims,
            reference,
            test,
            range,
            l,
        })
    }

    /// Same pair with another data-range policy.
    pub fn with_range(self, range: DataRange<T>) -> Result<Self> {
        let shape = self.shape();
        Self::new(self.reference, self.test, &shape, range)
    }

    /// The same rasters viewed as depth-1 volumes.
    pub fn lift_3d(&self) -> Self {
        let mut p = self.clone();
        p.ndim = 3;
        p
    }

    pub fn shape(&self) -> Vec<usize> {
        self.dims[3 - self.ndim..].to_vec()
    }

    pub fn reference(&self) -> &[T] {
        &self.reference
    }

    pub fn test(&self) -> &[T] {
        &self.test
    }

    pub fn range(&self) -> DataRange<T> {
        self.range
    }

    /// Resolved `L`.
    pub fn data_range(&self) -> T {
        self.l
    }

    fn series(&self) -> Result<PairedSeries<T>> {
        PairedSeries::new(self.reference.clone(), self.test.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RasterErrors<T> {
    pub mae: MetricValue<T>,
    pub mse: MetricValue<T>,
    pub rmse: MetricValue<T>,
    pub r2_determination: MetricValue<T>,
    pub r2_squared_pearson: MetricValue<T>,
}

fn relabel<T: Scalar>(v: MetricValue<T>, metric: MetricId) -> MetricValue<T> {
    let mut d = v.descriptor.clone();
    d.metric = metric;
    v.with_descriptor(d)
}

/// Flattened pixel errors with the reference as truth.
pub fn raster_errors<T: Scalar>(p: &RasterPair<T>) -> Result<RasterErrors<T>> {
    let s = p.series()?;
    let b = regress::basic_errors(&s);
    Ok(RasterErrors {
        mae: relabel(b.mae, MetricId::ImgMae),
        mse: relabel(b.mse, MetricId::ImgMse),
        rmse: relabel(b.rmse, MetricId::ImgRmse),
        r2_determination: regress::r_squared_as(&s, R2Variant::CoefficientOfDetermination, MetricId::ImgRSquared)?,
        r2_squared_pearson: regress::r_squared_as(&s, R2Variant::SquaredPearson, MetricId::ImgRSquared)?,
    })
}

/// `10·log10(L² / MSE)`; identical rasters give `+∞`.
pub fn psnr<T: Scalar>(p: &RasterPair<T>) -> Result<MetricValue<T>> {
    let desc = ConventionDescriptor::overall(MetricId::Psnr, FormulaFamily::Standard)
        .with(ParamKey::DataRange, p.range.name());
    let n = T::from_count(p.reference.len());
    let mse = sum(p.reference.iter().zip(&p.test).map(|(&a, &b)| (a - b) * (a - b))) / n;
    let v = if mse > T::zero() {
        T::lit(10.0) * (p.l * p.l / mse).log10()
    } else {
        T::infinity()
    };
    Ok(MetricValue::scalar(v, desc))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SsimWindow<T> {
    Uniform(usize),
    /// Width and standard deviation in pixels.
    Gaussian(usize, T),
}

impl<T: Scalar> SsimWindow<T> {
    fn width(self) -> usize {
        match self {
            SsimWindow::Uniform(w) | SsimWindow::Gaussian(w, _) => w,
        }
    }

    fn weights(self) -> Vec<T> {
        match self {
            SsimWindow::Uniform(w) => vec![T::one() / T::from_count(w); w],
            SsimWindow::Gaussian(w, sigma) => {
                let r = T::from_count(w / 2);
                let g: Vec<T> = (0..w)
                    .map(|i| {
                        let d = T::from_count(i) - r;
                        (-(d * d) / (T::lit(2.0) * sigma * sigma)).exp()
                    })
                    .collect();
                let total = sum(g.iter().copied());
                g.into_iter().map(|v| v / total).collect()
            }
        }
    }
}

/// Mean SSIM over every valid window position (no padding). Cubic windows
/// in 3D; axes of extent 1 are not windowed.
pub fn ssim<T: Scalar>(p: &RasterPair<T>, window: SsimWindow<T>, k1: T, k2: T) -> Result<MetricValue<T>> {
    let w = window.width();
    if w == 0 || w.is_multiple_of(2) {
        return Err(MetricError::InvalidParameter(format!("window width must be odd, got {w}")));
    }
    if !(k1 > T::zero()) || !(k2 > T::zero()) {
        return Err(MetricError::InvalidParameter("K1 and K2 must be positive".into()));
    }
    let (family, sigma) = match window {
        SsimWindow::Uniform(_) => (FormulaFamily::UniformWindow, None),
        SsimWindow::Gaussian(_, sigma) => {
            if !(sigma > T::zero()) || !sigma.is_finite() {
                return Err(MetricError::InvalidParameter("gaussian sigma must be positive".into()));
            }
            (FormulaFamily::GaussianWindow, Some(sigma.to_f64_lossy()))
        }
    };
    let mut d = ConventionDescriptor::overall(MetricId::Ssim, family)
        .with(ParamKey::DataRange, p.range.name())
        .with(ParamKey::Window, w)
        .with(ParamKey::K1, k1.to_f64_lossy())
        .with(ParamKey::K2, k2.to_f64_lossy());
    if let Some(s) = sigma {
        d = d.with(ParamKey::GaussianSigma, s);
    }
    for (a, &n) in p.dims.iter().enumerate() {
        if n > 1 && n < w {
            return Err(MetricError::InvalidParameter(format!(
                "window {w} exceeds image extent {n} on axis {a}"
            )));
        }
    }

    let weights = window.weights();
    let x = &p.reference;
    let y = &p.test;
    let maps: Vec<Vec<T>> = [
        x.clone(),
        y.clone(),
        x.iter().map(|&v| v * v).collect(),
        y.iter().map(|&v| v * v).collect(),
        x.iter().zip(y).map(|(&a, &b)| a * b).collect(),
    ]
    .into_iter()
    .map(|m| filter_valid(m, p.dims, &weights).0)
    .collect();
    let c1 = (k1 * p.l) * (k1 * p.l);
    let c2 = (k2 * p.l) * (k2 * p.l);
    let two = T::lit(2.0);
    let n = maps[0].len();
    let total = sum((0..n).map(|i| {
        let (mx, my) = (maps[0][i], maps[1][i]);
        let vx = maps[2][i] - mx * mx;
        let vy = maps[3][i] - my * my;
        let cxy = maps[4][i] - mx * my;
        ((two * mx * my + c1) * (two * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
    }));
    Ok(MetricValue::bounded(total / T::from_count(n), -T::one(), T::one(), d))
}

/// Separable weighted correlation keeping only positions where the window
/// fits; returns the filtered data and its `[d, r, c]` extent.
fn filter_valid<T: Scalar>(mut data: Vec<T>, mut dims: [usize; 3], w: &[T]) -> (Vec<T>, [usize; 3]) {
    let k = w.len();
    for axis in 0..3 {
        if dims[axis] == 1 {
            continue;
        }
        let mut out_dims = dims;
        out_dims[axis] = dims[axis] - k + 1;
        let strides = [dims[1] * dims[2], dims[2], 1];
        let out_strides = [out_dims[1] * out_dims[2], out_dims[2], 1];
        let mut out = vec![T::zero(); out_dims.iter().product()];
        for z in 0..out_dims[0] {
            for yy in 0..out_dims[1] {
                for xx in 0..out_dims[2] {
                    let base = z * strides[0] + yy * strides[1] + xx * strides[2];
                    let acc = sum((0..k).map(|t| w[t] * data[base + t * strides[axis]]));
                    out[z * out_strides[0] + yy * out_strides[1] + xx] = acc;
                }
            }
        }
        data = out;
        dims = out_dims;
    }
    (data, dims)
}
