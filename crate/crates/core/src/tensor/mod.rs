//! Dense strided tensors of `f64`.
//!
//! A [`DenseTensor`] is an immutable view onto a shared flat buffer. The
//! position of element `(i_0, .., i_{n-1})` in the buffer is
//! `offset + sum_k strides[k] * i_k`. Tensors built by the constructors are
//! row-major contiguous; permuted or sliced views share the buffer until
//! [`DenseTensor::to_contiguous`] materializes them.

mod layout;

pub use layout::{permute_to_layout, LayoutSpec, LAYOUT_LETTERS};

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct DenseTensor {
    shape: Vec<usize>,
    strides: Vec<usize>,
    offset: usize,
    data: Arc<Vec<f64>>,
}

/// Row-major strides for `shape`.
pub fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![0; shape.len()];
    let mut acc = 1;
    for k in (0..shape.len()).rev() {
        strides[k] = acc;
        acc *= shape[k];
    }
    strides
}

impl DenseTensor {
    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::Shape(format!(
                "shape {:?} needs {} items, got {}",
                shape,
                n,
                data.len()
            )));
        }
        Ok(DenseTensor {
            shape: shape.to_vec(),
            strides: row_major_strides(shape),
            offset: 0,
            data: Arc::new(data),
        })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self::from_vec(shape, vec![0.0; n]).expect("consistent size")
    }

    pub fn scalar(value: f64) -> Self {
        Self::from_vec(&[], vec![value]).expect("consistent size")
    }

    /// Builds a contiguous tensor by evaluating `f` at every multi-index in
    /// row-major order.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let n: usize = shape.iter().product();
        let mut data = Vec::with_capacity(n);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..n {
            data.push(f(&idx));
            increment(&mut idx, shape);
        }
        Self::from_vec(shape, data).expect("consistent size")
    }

    /// Wraps an existing buffer with explicit strides and offset.
    pub fn from_strided(shape: &[usize], strides: &[usize], offset: usize, data: Arc<Vec<f64>>) -> Result<Self> {
        if shape.len() != strides.len() {
            return Err(Error::Shape(format!(
                "{} strides given for {} axes",
                strides.len(),
                shape.len()
            )));
        }
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::Shape(format!("zero extent in shape {shape:?}")));
        }
        let last = offset + shape.iter().zip(strides).map(|(&d, &s)| (d - 1) * s).sum::<usize>();
        if last >= data.len() {
            return Err(Error::Shape(format!(
                "strided view {shape:?}/{strides:?}+{offset} exceeds buffer of {} items",
                data.len()
            )));
        }
        Ok(DenseTensor {
            shape: shape.to_vec(),
            strides: strides.to_vec(),
            offset,
            data,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    /// Number of logical elements.
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The whole backing buffer, including items outside this view.
    pub fn buffer(&self) -> &Arc<Vec<f64>> {
        &self.data
    }

    pub fn is_contiguous(&self) -> bool {
        let mut expected = 1;
        for k in (0..self.shape.len()).rev() {
            if self.shape[k] != 1 && self.strides[k] != expected {
                return false;
            }
            expected *= self.shape[k];
        }
        true
    }

    /// The elements in row-major order, if the view is contiguous.
    pub fn as_slice(&self) -> Option<&[f64]> {
        if self.is_contiguous() {
            Some(&self.data[self.offset..self.offset + self.len()])
        } else {
            None
        }
    }

    pub fn item_offset(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.shape.len() || idx.iter().zip(&self.shape).any(|(&i, &d)| i >= d) {
            return Err(Error::IndexOutOfRange {
                index: idx.to_vec(),
                shape: self.shape.clone(),
            });
        }
        Ok(self.offset + idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum::<usize>())
    }

    pub fn get(&self, idx: &[usize]) -> Result<f64> {
        self.item_offset(idx).map(|o| self.data[o])
    }

    /// Element access without the range check beyond slice bounds.
    #[inline]
    pub fn at(&self, idx: &[usize]) -> f64 {
        let o = self.offset + idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum::<usize>();
        self.data[o]
    }

    /// Copies the elements into a fresh row-major vector.
    pub fn to_vec(&self) -> Vec<f64> {
        if let Some(s) = self.as_slice() {
            return s.to_vec();
        }
        let mut out = Vec::with_capacity(self.len());
        strided_copy(&self.data, self.offset, &self.shape, &self.strides, &mut out);
        out
    }

    /// Returns a row-major contiguous tensor; shares the buffer when the
    /// view already is contiguous and starts at the buffer's beginning.
    pub fn to_contiguous(&self) -> DenseTensor {
        if self.is_contiguous() && self.offset == 0 && self.data.len() == self.len() {
            return self.clone();
        }
        DenseTensor::from_vec(&self.shape, self.to_vec()).expect("consistent size")
    }

    /// A view with axes reordered: axis `k` of the result is axis `perm[k]`
    /// of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<DenseTensor> {
        check_permutation(perm, self.ndim())?;
        Ok(DenseTensor {
            shape: perm.iter().map(|&p| self.shape[p]).collect(),
            strides: perm.iter().map(|&p| self.strides[p]).collect(),
            offset: self.offset,
            data: Arc::clone(&self.data),
        })
    }

    /// View with `axis` fixed at `index`; the axis is removed.
    pub fn index_axis(&self, axis: usize, index: usize) -> Result<DenseTensor> {
        if axis >= self.ndim() || index >= self.shape[axis] {
            return Err(Error::IndexOutOfRange {
                index: vec![axis, index],
                shape: self.shape.clone(),
            });
        }
        let mut shape = self.shape.clone();
        let mut strides = self.strides.clone();
        let offset = self.offset + index * strides[axis];
        shape.remove(axis);
        strides.remove(axis);
        Ok(DenseTensor {
            shape,
            strides,
            offset,
            data: Arc::clone(&self.data),
        })
    }

    /// View restricted to `range` along `axis`.
    pub fn slice_axis(&self, axis: usize, range: Range<usize>) -> Result<DenseTensor> {
        if axis >= self.ndim() || range.start >= range.end || range.end > self.shape[axis] {
            return Err(Error::Shape(format!(
                "cannot slice axis {axis} of {:?} with {range:?}",
                self.shape
            )));
        }
        let mut shape = self.shape.clone();
        shape[axis] = range.len();
        Ok(DenseTensor {
            shape,
            strides: self.strides.clone(),
            offset: self.offset + range.start * self.strides[axis],
            data: Arc::clone(&self.data),
        })
    }

    /// Merges groups of adjacent axes into single axes without copying.
    ///
    /// `groups` must partition the axes into consecutive runs, in order.
    pub fn merge_axes(&self, groups: &[Vec<usize>]) -> Result<DenseTensor> {
        let mut next = 0;
        for g in groups {
            if g.is_empty() || g.iter().enumerate().any(|(k, &a)| a != next + k) {
                return Err(Error::Shape(format!(
                    "axis groups {groups:?} do not cover adjacent axes in order"
                )));
            }
            next += g.len();
        }
        if next != self.ndim() {
            return Err(Error::Shape(format!(
                "axis groups {groups:?} do not cover all {} axes",
                self.ndim()
            )));
        }
        if !self.is_contiguous() {
            return Err(Error::RequiresCopy);
        }
        let shape: Vec<usize> = groups
            .iter()
            .map(|g| g.iter().map(|&a| self.shape[a]).product())
            .collect();
        Ok(DenseTensor {
            strides: row_major_strides(&shape),
            shape,
            offset: self.offset,
            data: Arc::clone(&self.data),
        })
    }

    /// Reinterprets a contiguous tensor with a new shape of equal size.
    pub fn reshape(&self, shape: &[usize]) -> Result<DenseTensor> {
        if shape.iter().product::<usize>() != self.len() {
            return Err(Error::Shape(format!(
                "cannot reshape {:?} into {:?}",
                self.shape, shape
            )));
        }
        if !self.is_contiguous() {
            return Err(Error::RequiresCopy);
        }
        Ok(DenseTensor {
            shape: shape.to_vec(),
            strides: row_major_strides(shape),
            offset: self.offset,
            data: Arc::clone(&self.data),
        })
    }

    pub fn sum(&self) -> f64 {
        match self.as_slice() {
            Some(s) => s.iter().sum(),
            None => self.to_vec().iter().sum(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.to_vec().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute elementwise difference, or `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &DenseTensor) -> Option<f64> {
        if self.shape != other.shape {
            return None;
        }
        let a = self.to_vec();
        let b = other.to_vec();
        Some(a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
    }

    /// Max-norm relative difference `max|a - b| / max|b|`; `b` is `other`.
    pub fn rel_diff(&self, other: &DenseTensor) -> Option<f64> {
        let diff = self.max_abs_diff(other)?;
        let scale = other.max_abs();
        Some(if scale == 0.0 { diff } else { diff / scale })
    }
}

impl PartialEq for DenseTensor {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.to_vec() == other.to_vec()
    }
}

impl fmt::Debug for DenseTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.len();
        let mut s = f.debug_struct("DenseTensor");
        s.field("shape", &self.shape).field("strides", &self.strides);
        if n <= 32 {
            s.field("data", &self.to_vec());
        }
        s.finish()
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::Layout(format!("{perm:?} is not a permutation of {n} axes")));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::Layout(format!("{perm:?} is not a permutation of {n} axes")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Row-major odometer increment; returns false after wrapping around.
#[inline]
pub(crate) fn increment(idx: &mut [usize], shape: &[usize]) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

fn strided_copy(data: &[f64], offset: usize, shape: &[usize], strides: &[usize], out: &mut Vec<f64>) {
    let nd = shape.len();
    if nd == 0 {
        out.push(data[offset]);
        return;
    }
    if shape.iter().any(|&d| d == 0) {
        return;
    }
    let inner = shape[nd - 1];
    let inner_stride = strides[nd - 1];
    let outer_shape = &shape[..nd - 1];
    let mut idx = vec![0usize; nd - 1];
    loop {
        let base = offset + idx.iter().zip(strides).map(|(i, s)| i * s).sum::<usize>();
        if inner_stride == 1 {
            out.extend_from_slice(&data[base..base + inner]);
        } else {
            out.extend((0..inner).map(|j| data[base + j * inner_stride]));
        }
        if !increment(&mut idx, outer_shape) {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iota(shape: &[usize]) -> DenseTensor {
        let n = shape.iter().product::<usize>();
        DenseTensor::from_vec(shape, (0..n).map(|v| v as f64).collect()).unwrap()
    }

    #[test]
    fn item_offset_row_major() {
        let t = iota(&[2, 3]);
        assert_eq!(t.item_offset(&[1, 2]).unwrap(), 5);
        assert_eq!(t.get(&[1, 2]).unwrap(), 5.0);
    }

    #[test]
    fn item_offset_column_major() {
        let t = DenseTensor::from_strided(&[2, 3], &[1, 2], 0, Arc::new(vec![0.0; 6])).unwrap();
        assert_eq!(t.item_offset(&[1, 2]).unwrap(), 5);
        assert!(!t.is_contiguous());
    }

    #[test]
    fn item_offset_zero_index() {
        let t = iota(&[4]);
        assert_eq!(t.item_offset(&[0]).unwrap(), 0);
    }

    #[test]
    fn item_offset_out_of_range() {
        let t = iota(&[2, 3]);
        assert!(matches!(t.item_offset(&[2, 0]), Err(Error::IndexOutOfRange { .. })));
        assert!(t.item_offset(&[0]).is_err());
    }

    #[test]
    fn strides_of_new_tensor_are_row_major() {
        let t = DenseTensor::zeros(&[2, 3, 4]);
        assert_eq!(t.strides(), &[12, 4, 1]);
        assert!(t.is_contiguous());
    }

    #[test]
    fn bad_strided_view_rejected() {
        let buf = Arc::new(vec![0.0; 5]);
        assert!(DenseTensor::from_strided(&[2, 3], &[3, 1], 0, buf).is_err());
    }

    #[test]
    fn merge_axes_is_copy_free() {
        let t = iota(&[4, 3, 8, 3, 8]);
        let m = t.merge_axes(&[vec![0], vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(m.shape(), &[4, 24, 24]);
        assert!(Arc::ptr_eq(m.buffer(), t.buffer()));
        assert_eq!(m.get(&[1, 2, 3]).unwrap(), t.get(&[1, 0, 2, 0, 3]).unwrap());
    }

    #[test]
    fn merge_axes_single_groups_and_flatten() {
        let t = iota(&[2, 3]);
        let m = t.merge_axes(&[vec![0], vec![1]]).unwrap();
        assert_eq!(m.shape(), &[2, 3]);
        let f = t.merge_axes(&[vec![0, 1]]).unwrap();
        assert_eq!(f.shape(), &[6]);
        assert_eq!(f.to_vec(), vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn merge_axes_needs_contiguous_input() {
        let t = iota(&[2, 3]).permuted(&[1, 0]).unwrap();
        assert_eq!(t.merge_axes(&[vec![0, 1]]), Err(Error::RequiresCopy));
        assert!(iota(&[2, 3]).merge_axes(&[vec![1], vec![0]]).is_err());
    }

    #[test]
    fn permuted_view_and_copy() {
        let t = iota(&[2, 3]);
        let p = t.permuted(&[1, 0]).unwrap();
        assert_eq!(p.shape(), &[3, 2]);
        assert_eq!(p.to_vec(), vec![0.0, 3.0, 1.0, 4.0, 2.0, 5.0]);
        assert!(p.to_contiguous().is_contiguous());
    }

    #[test]
    fn index_and_slice_axis() {
        let t = iota(&[3, 2, 2]);
        let s = t.index_axis(0, 2).unwrap();
        assert_eq!(s.to_vec(), vec![8.0, 9.0, 10.0, 11.0]);
        let m = t.index_axis(1, 1).unwrap();
        assert_eq!(m.to_vec(), vec![2.0, 3.0, 6.0, 7.0, 10.0, 11.0]);
        let r = t.slice_axis(0, 1..3).unwrap();
        assert_eq!(r.shape(), &[2, 2, 2]);
        assert_eq!(r.get(&[0, 0, 0]).unwrap(), 4.0);
    }
}
