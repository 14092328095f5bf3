//! Binary-mask segmentation metrics on 2D and 3D grids: voxel overlap,
//! boundary distances and two-segment partition comparison.

mod distance;
mod overlap;
mod partition;

pub use distance::{
    boundary_extract, boundary_extract_with, boundary_f1, hausdorff, BoundaryPointSet, Connectivity,
    HausdorffVariant, PointSet,
};
pub use overlap::{overlap_counts, overlap_metrics, EmptyPolicy, OverlapCounts, OverlapMetrics, OverlapVariant};
pub use partition::{partition_metrics, PartitionKind};

use crate::error::{MetricError, Result};
use crate::scalar::Scalar;

/// A boolean grid in row-major order with per-axis physical spacing.
///
/// 2D masks are stored as a single `1 × rows × cols` slab, so both code
/// paths share one implementation; axes of extent 1 never contribute
/// neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask<T> {
    ndim: usize,
    /// Always `[depth, rows, cols]`.
    dims: [usize; 3],
    spacing: [T; 3],
    data: Vec<bool>,
}

impl<T: Scalar> Mask<T> {
    /// `shape` has two or three axes, each at least 1; spacing defaults
    /// to 1.
    pub fn new(shape: &[usize], data: Vec<bool>) -> Result<Self> {
        let dims = match *shape {
            [r, c] => [1, r, c],
            [d, r, c] => [d, r, c],
            _ => {
                return Err(MetricError::InvalidParameter(format!(
                    "masks are 2D or 3D, got {} axes",
                    shape.len()
                )))
            }
        };
        if dims.contains(&0) {
            return Err(MetricError::InvalidParameter("mask axes must be non-empty".into()));
        }
        let len: usize = dims.iter().product();
        if len != data.len() {
            return Err(MetricError::LengthMismatch {
                left: len,
                right: data.len(),
            });
        }
        Ok(Mask {
            ndim: shape.len(),
            dims,
            spacing: [T::one(); 3],
            data,
        })
    }

    /// 2D mask from equal-length rows.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != c) {
            return Err(MetricError::LengthMismatch { left: c, right: bad.len() });
        }
        Self::new(&[rows.len(), c], rows.concat())
    }

    /// Mask with the listed voxels set.
    pub fn from_indices(shape: &[usize], on: &[Vec<usize>]) -> Result<Self> {
        let mut m = Self::new(shape, vec![false; shape.iter().product()])?;
        let shape_v = m.shape();
        for idx in on {
            if idx.len() != shape_v.len() || idx.iter().zip(&shape_v).any(|(i, n)| i >= n) {
                return Err(MetricError::InvalidParameter(format!("index {idx:?} outside {shape_v:?}")));
            }
            let flat = m.flat_index(&m.to_full(idx));
            m.data[flat] = true;
        }
        Ok(m)
    }

    /// Per-axis spacing, one entry per axis, finite and positive.
    pub fn with_spacing(mut self, spacing: &[T]) -> Result<Self> {
        if spacing.len() != self.ndim {
            return Err(MetricError::LengthMismatch {
                left: self.ndim,
                right: spacing.len(),
            });
        }
        if spacing.iter().any(|&s| !(s > T::zero()) || !s.is_finite()) {
            return Err(MetricError::InvalidParameter("spacing must be finite and positive".into()));
        }
        let off = 3 - self.ndim;
        self.spacing[off..].copy_from_slice(spacing);
        Ok(self)
    }

    /// The same grid viewed as a depth-1 3D volume.
    pub fn lift_3d(&self) -> Self {
        let mut m = self.clone();
        m.ndim = 3;
        m
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn shape(&self) -> Vec<usize> {
        self.dims[3 - self.ndim..].to_vec()
    }

    pub fn spacing(&self) -> &[T] {
        &self.spacing[3 - self.ndim..]
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub(crate) fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub(crate) fn spacing3(&self) -> [T; 3] {
        self.spacing
    }

    fn to_full(&self, idx: &[usize]) -> [usize; 3] {
        let mut full = [0; 3];
        full[3 - idx.len()..].copy_from_slice(idx);
        full
    }

    pub(crate) fn flat_index(&self, [z, y, x]: &[usize; 3]) -> usize {
        (z * self.dims[1] + y) * self.dims[2] + x
    }

    pub(crate) fn unflat(&self, i: usize) -> [usize; 3] {
        let x = i % self.dims[2];
        let y = (i / self.dims[2]) % self.dims[1];
        [i / (self.dims[1] * self.dims[2]), y, x]
    }

    pub(crate) fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.ndim != other.ndim || self.dims != other.dims {
            return Err(MetricError::ShapeMismatch(self.shape(), other.shape()));
        }
        Ok(())
    }

    pub(crate) fn require_same_grid(&self, other: &Self) -> Result<()> {
        self.require_same_shape(other)?;
        if self.spacing != other.spacing {
            return Err(MetricError::InvalidParameter("masks have different spacing".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        let m = Mask::<f64>::from_indices(&[2, 3], &[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(m.data(), &[false, true, false, false, false, true]);
        assert_eq!(m.count(), 2);
        assert_eq!(m.shape(), vec![2, 3]);
        assert!(Mask::<f64>::new(&[2, 0], vec![]).is_err());
        assert!(Mask::<f64>::new(&[2, 2], vec![true; 3]).is_err());
        assert!(m.clone().with_spacing(&[1.0, 0.0]).is_err());
        let l = m.lift_3d();
        assert_eq!(l.shape(), vec![1, 2, 3]);
        assert_eq!(l.spacing(), &[1.0, 1.0, 1.0]);
    }
}
