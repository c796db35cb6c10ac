//! Lattice-sampled scalar fields and inclusive boxes.
//!
//! Values are stored flat in row-major order with the last axis fastest.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Largest supported number of axes.
pub const MAX_NDIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("unsupported ndim {0} (expected 1..=4)")]
    UnsupportedNdim(usize),
    #[error("extent of axis {axis} is zero")]
    ZeroExtent { axis: usize },
    #[error("value count mismatch: extents need {expected}, got {found}")]
    ValueCountMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected} axes, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("lo exceeds hi on axis {axis} ({lo} > {hi})")]
    LoExceedsHi { axis: usize, lo: usize, hi: usize },
    #[error("index {index} out of bounds on axis {axis} (extent {extent})")]
    OutOfBounds {
        axis: usize,
        index: usize,
        extent: usize,
    },
    #[error("signed 64-bit overflow in exact-integer arithmetic")]
    Overflow,
}

/// Scalar types a field can hold.
///
/// `i64` is the exact mode: sums are accumulated in `i128` and narrowed back,
/// so every overflow is reported instead of wrapping. `f64` is the float mode.
pub trait Scalar:
    Copy + PartialEq + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Accumulator used for alternating sums.
    type Wide: Copy
        + PartialEq
        + fmt::Debug
        + Add<Output = Self::Wide>
        + Sub<Output = Self::Wide>
        + Neg<Output = Self::Wide>
        + Mul<Output = Self::Wide>;

    const ZERO: Self;
    const EXACT: bool;

    fn checked_add(self, rhs: Self) -> Option<Self>;
    fn widen(self) -> Self::Wide;
    fn narrow(w: Self::Wide) -> Option<Self>;
    fn wide_int(k: i32) -> Self::Wide;
    /// `-1`, `0` or `1`; `None` for NaN.
    fn wide_signum(w: Self::Wide) -> Option<i8>;
    /// `w / 2`, `None` when an exact value is odd.
    fn halve(w: Self::Wide) -> Option<Self>;
    fn to_f64(self) -> f64;
}

impl Scalar for i64 {
    type Wide = i128;
    const ZERO: Self = 0;
    const EXACT: bool = true;

    fn checked_add(self, rhs: Self) -> Option<Self> {
        i64::checked_add(self, rhs)
    }
    fn widen(self) -> i128 {
        self as i128
    }
    fn narrow(w: i128) -> Option<Self> {
        i64::try_from(w).ok()
    }
    fn wide_int(k: i32) -> i128 {
        k as i128
    }
    fn wide_signum(w: i128) -> Option<i8> {
        Some(w.signum() as i8)
    }
    fn halve(w: i128) -> Option<Self> {
        if w % 2 == 0 {
            Self::narrow(w / 2)
        } else {
            None
        }
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    type Wide = f64;
    const ZERO: Self = 0.0;
    const EXACT: bool = false;

    fn checked_add(self, rhs: Self) -> Option<Self> {
        Some(self + rhs)
    }
    fn widen(self) -> f64 {
        self
    }
    fn narrow(w: f64) -> Option<Self> {
        Some(w)
    }
    fn wide_int(k: i32) -> f64 {
        k as f64
    }
    fn wide_signum(w: f64) -> Option<i8> {
        if w.is_nan() {
            None
        } else if w > 0.0 {
            Some(1)
        } else if w < 0.0 {
            Some(-1)
        } else {
            Some(0)
        }
    }
    fn halve(w: f64) -> Option<Self> {
        Some(w / 2.0)
    }
    fn to_f64(self) -> f64 {
        self
    }
}

pub(crate) fn check_extents(extents: &[usize]) -> Result<usize, GridError> {
    if extents.is_empty() || extents.len() > MAX_NDIM {
        return Err(GridError::UnsupportedNdim(extents.len()));
    }
    let mut n = 1usize;
    for (axis, &e) in extents.iter().enumerate() {
        if e == 0 {
            return Err(GridError::ZeroExtent { axis });
        }
        n = n.checked_mul(e).ok_or(GridError::Overflow)?;
    }
    Ok(n)
}

/// Row-major strides, last axis fastest.
pub(crate) fn strides(extents: &[usize]) -> [usize; MAX_NDIM] {
    let mut s = [0usize; MAX_NDIM];
    let mut acc = 1;
    for k in (0..extents.len()).rev() {
        s[k] = acc;
        acc *= extents[k];
    }
    s
}

/// Calls `f` on every index of the inclusive box `lo..=hi`, last axis fastest.
pub fn for_each_index(lo: &[usize], hi: &[usize], mut f: impl FnMut(&[usize])) {
    let n = lo.len();
    if n == 0 || lo.iter().zip(hi).any(|(a, b)| a > b) {
        return;
    }
    let mut idx = [0usize; MAX_NDIM];
    idx[..n].copy_from_slice(lo);
    loop {
        f(&idx[..n]);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if idx[k] < hi[k] {
                idx[k] += 1;
                break;
            }
            idx[k] = lo[k];
        }
    }
}

/// An n-dimensional field sampled on the integer lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    extents: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> GridField<T> {
    pub fn new(extents: Vec<usize>, values: Vec<T>) -> Result<Self, GridError> {
        let expected = check_extents(&extents)?;
        if values.len() != expected {
            return Err(GridError::ValueCountMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(Self { extents, values })
    }

    pub fn filled(extents: Vec<usize>, value: T) -> Result<Self, GridError> {
        let n = check_extents(&extents)?;
        Ok(Self {
            extents,
            values: vec![value; n],
        })
    }

    /// Builds a field by evaluating `f` at every lattice index.
    pub fn from_fn(
        extents: Vec<usize>,
        mut f: impl FnMut(&[usize]) -> T,
    ) -> Result<Self, GridError> {
        let n = check_extents(&extents)?;
        let mut values = Vec::with_capacity(n);
        let hi: Vec<usize> = extents.iter().map(|e| e - 1).collect();
        for_each_index(&vec![0; extents.len()], &hi, |idx| values.push(f(idx)));
        Ok(Self { extents, values })
    }

    pub fn ndim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn flat_index(&self, idx: &[usize]) -> Result<usize, GridError> {
        if idx.len() != self.ndim() {
            return Err(GridError::DimensionMismatch {
                expected: self.ndim(),
                found: idx.len(),
            });
        }
        let s = strides(&self.extents);
        let mut flat = 0;
        for (axis, (&i, &e)) in idx.iter().zip(&self.extents).enumerate() {
            if i >= e {
                return Err(GridError::OutOfBounds {
                    axis,
                    index: i,
                    extent: e,
                });
            }
            flat += i * s[axis];
        }
        Ok(flat)
    }

    pub fn get(&self, idx: &[usize]) -> Result<T, GridError> {
        Ok(self.values[self.flat_index(idx)?])
    }

    /// Applies `f` to every sample, keeping the shape.
    pub fn map<U: Scalar>(&self, f: impl FnMut(T) -> U) -> GridField<U> {
        GridField {
            extents: self.extents.clone(),
            values: self.values.iter().copied().map(f).collect(),
        }
    }

    pub fn full_box(&self) -> LatticeBox {
        LatticeBox {
            lo: vec![0; self.ndim()],
            hi: self.extents.iter().map(|e| e - 1).collect(),
        }
    }

    pub(crate) fn check_box(&self, b: &LatticeBox) -> Result<(), GridError> {
        if b.ndim() != self.ndim() {
            return Err(GridError::DimensionMismatch {
                expected: self.ndim(),
                found: b.ndim(),
            });
        }
        for (axis, (&h, &e)) in b.hi.iter().zip(&self.extents).enumerate() {
            if h >= e {
                return Err(GridError::OutOfBounds {
                    axis,
                    index: h,
                    extent: e,
                });
            }
        }
        Ok(())
    }
}

/// Inclusive lattice box `lo ..= hi` on every axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeBox {
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl LatticeBox {
    pub fn new(lo: Vec<usize>, hi: Vec<usize>) -> Result<Self, GridError> {
        if lo.len() != hi.len() {
            return Err(GridError::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() || lo.len() > MAX_NDIM {
            return Err(GridError::UnsupportedNdim(lo.len()));
        }
        for (axis, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if l > h {
                return Err(GridError::LoExceedsHi { axis, lo: l, hi: h });
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> &[usize] {
        &self.lo
    }

    pub fn hi(&self) -> &[usize] {
        &self.hi
    }

    pub fn ndim(&self) -> usize {
        self.lo.len()
    }

    /// Number of lattice points in the box.
    pub fn volume(&self) -> usize {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| h - l + 1)
            .product()
    }
}

/// Brute-force Σ f(x') over `lo ≤ x' ≤ hi`.
pub fn naive_box_sum<T: Scalar>(field: &GridField<T>, b: &LatticeBox) -> Result<T, GridError> {
    field.check_box(b)?;
    let s = strides(field.extents());
    let n = field.ndim();
    let last = n - 1;
    let mut acc = T::ZERO.widen();
    // walk rows along the last axis directly; the odometer only covers the outer axes
    let mut outer_hi = b.hi.clone();
    outer_hi[last] = b.lo[last];
    for_each_index(&b.lo, &outer_hi, |idx| {
        let start: usize = (0..n).map(|k| idx[k] * s[k]).sum();
        let len = b.hi[last] - b.lo[last] + 1;
        for &v in &field.values()[start..start + len] {
            acc = acc + v.widen();
        }
    });
    T::narrow(acc).ok_or(GridError::Overflow)
}

/// Σ f over the samples for which `member` returns true.
pub fn cell_sum<T: Scalar>(
    field: &GridField<T>,
    mut member: impl FnMut(&[usize]) -> bool,
) -> Result<T, GridError> {
    let mut acc = T::ZERO.widen();
    let hi: Vec<usize> = field.extents().iter().map(|e| e - 1).collect();
    let mut flat = 0;
    let values = field.values();
    for_each_index(&vec![0; field.ndim()], &hi, |idx| {
        if member(idx) {
            acc = acc + values[flat].widen();
        }
        flat += 1;
    });
    T::narrow(acc).ok_or(GridError::Overflow)
}
