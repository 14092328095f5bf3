use super::Mask;
use crate::convention::{ConventionDescriptor, FormulaFamily, MetricId, ParamKey};
use crate::error::{MetricError, Result};
use crate::numeric;
use crate::scalar::Scalar;
use crate::value::MetricValue;

/// Neighbourhood used to decide whether a foreground voxel touches
/// background.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Connectivity {
    /// 4 neighbours in 2D, 6 in 3D.
    #[default]
    Face,
    /// 8 neighbours in 2D, 26 in 3D.
    Corner,
}

impl Connectivity {
    pub fn name(self) -> &'static str {
        match self {
            Connectivity::Face => "face",
            Connectivity::Corner => "corner",
        }
    }

    fn offsets(self, dims: [usize; 3]) -> Vec<[isize; 3]> {
        let span = |axis: usize| if dims[axis] > 1 { -1isize..=1 } else { 0..=0 };
        let mut out = Vec::new();
        for dz in span(0) {
            for dy in span(1) {
                for dx in span(2) {
                    let nz = [dz, dy, dx].iter().filter(|&&d| d != 0).count();
                    let keep = match self {
                        Connectivity::Face => nz == 1,
                        Connectivity::Corner => nz >= 1,
                    };
                    if keep {
                        out.push([dz, dy, dx]);
                    }
                }
            }
        }
        out
    }
}

/// Boundary voxels of a mask, kept as grid indices together with the
/// spacing that maps them to physical coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPointSet<T> {
    ndim: usize,
    indices: Vec<[usize; 3]>,
    spacing: [T; 3],
}

impl<T: Scalar> BoundaryPointSet<T> {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Grid indices, one entry per mask axis.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        self.indices.iter().map(|i| i[3 - self.ndim..].to_vec()).collect()
    }

    /// Physical coordinates `index × spacing`.
    pub fn coordinates(&self) -> Vec<Vec<T>> {
        self.indices
            .iter()
            .map(|i| {
                (3 - self.ndim..3)
                    .map(|a| T::from_count(i[a]) * self.spacing[a])
                    .collect()
            })
            .collect()
    }
}

/// Foreground voxels with a face-adjacent background or out-of-grid
/// neighbour.
pub fn boundary_extract<T: Scalar>(m: &Mask<T>) -> BoundaryPointSet<T> {
    boundary_extract_with(m, Connectivity::Face)
}

pub fn boundary_extract_with<T: Scalar>(m: &Mask<T>, conn: Connectivity) -> BoundaryPointSet<T> {
    let flags = boundary_flags(m, conn);
    BoundaryPointSet {
        ndim: m.ndim(),
        indices: (0..m.len()).filter(|&i| flags[i]).map(|i| m.unflat(i)).collect(),
        spacing: m.spacing3(),
    }
}

fn boundary_flags<T: Scalar>(m: &Mask<T>, conn: Connectivity) -> Vec<bool> {
    let dims = m.dims();
    let offsets = conn.offsets(dims);
    let data = m.data();
    (0..m.len())
        .map(|i| {
            if !data[i] {
                return false;
            }
            let p = m.unflat(i);
            offsets.iter().any(|o| {
                let mut q = [0usize; 3];
                for a in 0..3 {
                    let v = p[a] as isize + o[a];
                    if v < 0 || v >= dims[a] as isize {
                        return true;
                    }
                    q[a] = v as usize;
                }
                !data[m.flat_index(&q)]
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HausdorffVariant<T> {
    DirectedAB,
    DirectedBA,
    SymmetricMax,
    /// `q`-th percentile (0..=100) of the pooled nearest distances in both
    /// directions.
    Percentile(T),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointSet {
    Boundary(Connectivity),
    AllForeground,
}

impl PointSet {
    fn flags<T: Scalar>(self, m: &Mask<T>) -> Vec<bool> {
        match self {
            PointSet::Boundary(c) => boundary_flags(m, c),
            PointSet::AllForeground => m.data().to_vec(),
        }
    }
}

/// Euclidean Hausdorff distance in physical units. Either point set empty
/// gives Undefined.
pub fn hausdorff<T: Scalar>(
    a: &Mask<T>,
    b: &Mask<T>,
    variant: HausdorffVariant<T>,
    point_set: PointSet,
) -> Result<MetricValue<T>> {
    a.require_same_grid(b)?;
    let family = match variant {
        HausdorffVariant::DirectedAB => FormulaFamily::DirectedAB,
        HausdorffVariant::DirectedBA => FormulaFamily::DirectedBA,
        HausdorffVariant::SymmetricMax => FormulaFamily::SymmetricMax,
        HausdorffVariant::Percentile(_) => FormulaFamily::Percentile,
    };
    let mut desc = ConventionDescriptor::overall(MetricId::Hausdorff, family);
    desc = match point_set {
        PointSet::Boundary(c) => desc
            .with(ParamKey::PointSet, "boundary")
            .with(ParamKey::Connectivity, c.name()),
        PointSet::AllForeground => desc.with(ParamKey::PointSet, "all_foreground"),
    };
    if let HausdorffVariant::Percentile(q) = variant {
        let q = q.to_f64_lossy();
        if !(0.0..=100.0).contains(&q) {
            return Err(MetricError::InvalidParameter("percentile must lie in [0, 100]".into()));
        }
        desc = desc.with(ParamKey::Quantile, q);
    }
    let (fa, fb) = (point_set.flags(a), point_set.flags(b));
    if !fa.contains(&true) || !fb.contains(&true) {
        return Ok(MetricValue::undefined(desc));
    }
    let ab = nearest_distances(a, &fa, &fb);
    let ba = nearest_distances(a, &fb, &fa);
    let max = |d: &[f64]| d.iter().copied().fold(0.0, f64::max);
    let h = match variant {
        HausdorffVariant::DirectedAB => max(&ab),
        HausdorffVariant::DirectedBA => max(&ba),
        HausdorffVariant::SymmetricMax => max(&ab).max(max(&ba)),
        HausdorffVariant::Percentile(q) => {
            let mut all = ab;
            all.extend(ba);
            numeric::percentile_of_sorted(&numeric::sorted(&all), q.to_f64_lossy())
        }
    };
    Ok(MetricValue::scalar(T::lit(h), desc))
}

/// Boundary F1: harmonic mean of the fraction of each boundary lying
/// within `theta` of the other. Either boundary empty gives Undefined.
pub fn boundary_f1<T: Scalar>(
    pred: &Mask<T>,
    reference: &Mask<T>,
    theta: T,
    conn: Connectivity,
) -> Result<MetricValue<T>> {
    pred.require_same_grid(reference)?;
    if !(theta >= T::zero()) || !theta.is_finite() {
        return Err(MetricError::InvalidParameter("theta must be finite and non-negative".into()));
    }
    let desc = ConventionDescriptor::overall(MetricId::BoundaryF1, FormulaFamily::Standard)
        .with(ParamKey::Theta, theta.to_f64_lossy())
        .with(ParamKey::Connectivity, conn.name());
    let (fp, fr) = (boundary_flags(pred, conn), boundary_flags(reference, conn));
    if !fp.contains(&true) || !fr.contains(&true) {
        return Ok(MetricValue::undefined(desc));
    }
    let th = theta.to_f64_lossy();
    let within = |d: Vec<f64>| d.iter().filter(|&&x| x <= th).count() as f64 / d.len() as f64;
    let precision = within(nearest_distances(pred, &fp, &fr));
    let recall = within(nearest_distances(pred, &fr, &fp));
    let bf = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(MetricValue::bounded(T::lit(bf), T::zero(), T::one(), desc))
}

/// For every voxel flagged in `from`, the distance to the nearest voxel
/// flagged in `to`, in grid order.
fn nearest_distances<T: Scalar>(grid: &Mask<T>, from: &[bool], to: &[bool]) -> Vec<f64> {
    let sq = squared_edt(grid.dims(), grid.spacing3().map(|s| s.to_f64_lossy()), to);
    from.iter()
        .zip(&sq)
        .filter(|(&f, _)| f)
        .map(|(_, &d)| d.sqrt())
        .collect()
}

/// Exact squared Euclidean distance transform to the `true` voxels with
/// anisotropic spacing, one separable lower-envelope pass per axis.
fn squared_edt(dims: [usize; 3], spacing: [f64; 3], sites: &[bool]) -> Vec<f64> {
    let mut f: Vec<f64> = sites.iter().map(|&s| if s { 0.0 } else { f64::INFINITY }).collect();
    let strides = [dims[1] * dims[2], dims[2], 1];
    let mut line = Vec::new();
    let mut out = Vec::new();
    for axis in 0..3 {
        let n = dims[axis];
        if n == 1 {
            continue;
        }
        let others: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
        for i in 0..dims[others[0]] {
            for j in 0..dims[others[1]] {
                let base = i * strides[others[0]] + j * strides[others[1]];
                line.clear();
                line.extend((0..n).map(|k| f[base + k * strides[axis]]));
                lower_envelope(&line, spacing[axis], &mut out);
                for k in 0..n {
                    f[base + k * strides[axis]] = out[k];
                }
            }
        }
    }
    f
}

/// `out[q] = min_p (q − p)²·h² + f[p]` (Felzenszwalb–Huttenlocher).
fn lower_envelope(f: &[f64], h: f64, out: &mut Vec<f64>) {
    let n = f.len();
    out.clear();
    out.resize(n, f64::INFINITY);
    let x = |i: usize| i as f64 * h;
    let mut v: Vec<usize> = Vec::with_capacity(n);
    let mut z: Vec<f64> = Vec::with_capacity(n + 1);
    for q in (0..n).filter(|&q| f[q].is_finite()) {
        while let Some(&p) = v.last() {
            let s = ((f[q] + x(q) * x(q)) - (f[p] + x(p) * x(p))) / (2.0 * (x(q) - x(p)));
            if s <= *z.last().expect("z tracks v") {
                v.pop();
                z.pop();
            } else {
                v.push(q);
                z.push(s);
                break;
            }
        }
        if v.is_empty() {
            v.push(q);
            z.push(f64::NEG_INFINITY);
        }
    }
    if v.is_empty() {
        return;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while k + 1 < v.len() && z[k + 1] < x(q) {
            k += 1;
        }
        let d = x(q) - x(v[k]);
        *o = d * d + f[v[k]];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mask(shape: &[usize], on: &[Vec<usize>]) -> Mask<f64> {
        Mask::from_indices(shape, on).unwrap()
    }

    #[test]
    fn boundary_examples() {
        let line = mask(&[5, 5], &[vec![2, 0], vec![2, 1], vec![2, 2], vec![2, 3]]);
        assert_eq!(boundary_extract(&line).len(), 4);
        let square: Vec<Vec<usize>> = (1..4).flat_map(|y| (1..4).map(move |x| vec![y, x])).collect();
        let b = boundary_extract(&mask(&[5, 5], &square));
        assert_eq!(b.len(), 8);
        assert!(!b.indices().contains(&vec![2, 2]));
        assert!(boundary_extract(&mask(&[3, 3], &[])).is_empty());
        let sp = mask(&[2, 2], &[vec![1, 1]]).with_spacing(&[2.0, 0.5]).unwrap();
        assert_eq!(boundary_extract(&sp).coordinates(), vec![vec![2.0, 0.5]]);
    }

    #[test]
    fn envelope_brute_force() {
        let f = [f64::INFINITY, 3.0, f64::INFINITY, 0.5, f64::INFINITY, f64::INFINITY, 7.0];
        let mut out = Vec::new();
        lower_envelope(&f, 1.5, &mut out);
        for (q, got) in out.iter().enumerate() {
            let want = (0..f.len())
                .map(|p| (q as f64 - p as f64).powi(2) * 2.25 + f[p])
                .fold(f64::INFINITY, f64::min);
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn hausdorff_examples() {
        let a = mask(&[11, 11], &[vec![0, 0]]);
        let b = mask(&[11, 11], &[vec![3, 4]]);
        for v in [
            HausdorffVariant::DirectedAB,
            HausdorffVariant::DirectedBA,
            HausdorffVariant::SymmetricMax,
            HausdorffVariant::Percentile(95.0),
        ] {
            assert_eq!(hausdorff(&a, &b, v, PointSet::AllForeground).unwrap().unwrap_scalar(), 5.0);
        }
        let b = mask(&[11, 11], &[vec![0, 0], vec![0, 10]]);
        let h = |v| hausdorff(&a, &b, v, PointSet::Boundary(Connectivity::Face)).unwrap().unwrap_scalar();
        assert_eq!(h(HausdorffVariant::DirectedAB), 0.0);
        assert_eq!(h(HausdorffVariant::DirectedBA), 10.0);
        assert_eq!(h(HausdorffVariant::SymmetricMax), 10.0);
        assert_eq!(h(HausdorffVariant::Percentile(100.0)), 10.0);
        assert_eq!(hausdorff(&b, &b, HausdorffVariant::SymmetricMax, PointSet::AllForeground).unwrap().unwrap_scalar(), 0.0);
        let e = mask(&[11, 11], &[]);
        assert!(!hausdorff(&a, &e, HausdorffVariant::SymmetricMax, PointSet::AllForeground).unwrap().is_ok());
    }

    #[test]
    fn anisotropic_spacing() {
        let a = mask(&[4, 4], &[vec![0, 0]]).with_spacing(&[2.0, 3.0]).unwrap();
        let b = mask(&[4, 4], &[vec![3, 2]]).with_spacing(&[2.0, 3.0]).unwrap();
        let h = hausdorff(&a, &b, HausdorffVariant::SymmetricMax, PointSet::AllForeground).unwrap();
        assert_relative_eq!(h.unwrap_scalar(), (36.0f64 + 36.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn boundary_f1_examples() {
        let row = |y: usize| mask(&[4, 6], &(0..6).map(|x| vec![y, x]).collect::<Vec<_>>());
        let (p, r) = (row(1), row(2));
        let bf = |t: f64| boundary_f1(&p, &r, t, Connectivity::Face).unwrap().unwrap_scalar();
        assert_eq!(bf(1.0), 1.0);
        assert_eq!(bf(0.5), 0.0);
        assert_eq!(boundary_f1(&p, &p, 0.0, Connectivity::Face).unwrap().unwrap_scalar(), 1.0);
    }
}
