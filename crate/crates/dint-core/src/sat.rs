//! Summed-area tables anchored at an origin `p`, and 2ⁿ-corner box queries.

use alloc::vec::Vec;

use thiserror::Error;

use crate::detach::{Sign, SignPair};
use crate::grid::{strides, GridError, GridField, LatticeBox, Scalar, MAX_NDIM};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("origin coordinate {index} out of bounds on axis {axis} (extent {extent})")]
    OriginOutOfBounds {
        axis: usize,
        index: usize,
        extent: usize,
    },
    #[error("box starts below the origin on axis {axis} ({lo} < {origin})")]
    BelowOrigin {
        axis: usize,
        lo: usize,
        origin: usize,
    },
    #[error("index {index} is not interior (extent {extent})")]
    Boundary { index: usize, extent: usize },
    #[error("expected a 1-D field, got {0} axes")]
    NotOneDimensional(usize),
    #[error("NaN encountered")]
    NaN,
}

/// One inclusion-exclusion term of a box query.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerTerm<T> {
    /// `+1` or `-1`.
    pub sign: i8,
    /// Corner coordinates; `lo[k] - 1` may be negative.
    pub corner: Vec<isize>,
    /// True when some coordinate lies below the origin and the read is 0.
    pub clamped: bool,
    pub value: T,
}

/// Cumulative sums `cum(x) = Σ f(x')` over `origin ≤ x' ≤ x`.
///
/// Entries with any coordinate below the origin hold 0, which is exactly the
/// clamp the box query needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SummedAreaTable<T> {
    extents: Vec<usize>,
    origin: Vec<usize>,
    cum: Vec<T>,
}

impl<T: Scalar> SummedAreaTable<T> {
    pub fn build(field: &GridField<T>, origin: &[usize]) -> Result<Self, SatError> {
        let extents = field.extents().to_vec();
        check_origin(&extents, origin)?;
        let n = extents.len();
        let s = strides(&extents);
        let mut cum = field.values().to_vec();

        let below = |flat: usize| (0..n).any(|k| (flat / s[k]) % extents[k] < origin[k]);
        if origin.iter().any(|&o| o > 0) {
            for (flat, v) in cum.iter_mut().enumerate() {
                if below(flat) {
                    *v = T::ZERO;
                }
            }
        }
        for axis in 0..n {
            let step = s[axis];
            for flat in 0..cum.len() {
                if (flat / step) % extents[axis] > origin[axis] {
                    let prev = cum[flat - step];
                    cum[flat] = cum[flat].checked_add(prev).ok_or(GridError::Overflow)?;
                }
            }
        }
        Ok(Self {
            extents,
            origin: origin.to_vec(),
            cum,
        })
    }

    /// Wraps an existing cumulative table, e.g. one read from disk.
    pub fn from_cumulative(
        extents: Vec<usize>,
        origin: Vec<usize>,
        cum: Vec<T>,
    ) -> Result<Self, SatError> {
        let sample = GridField::new(extents, cum)?;
        check_origin(sample.extents(), &origin)?;
        let extents = sample.extents().to_vec();
        Ok(Self {
            extents,
            origin,
            cum: sample.values().to_vec(),
        })
    }

    pub fn ndim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    pub fn cumulative(&self) -> &[T] {
        &self.cum
    }

    /// `F_p` at a lattice index; 0 when any coordinate is below the origin.
    pub fn antiderivative(&self, at: &[isize]) -> Result<T, SatError> {
        if at.len() != self.ndim() {
            return Err(GridError::DimensionMismatch {
                expected: self.ndim(),
                found: at.len(),
            }
            .into());
        }
        let s = strides(&self.extents);
        let mut flat = 0;
        for (axis, &c) in at.iter().enumerate() {
            if c < self.origin[axis] as isize {
                return Ok(T::ZERO);
            }
            if c as usize >= self.extents[axis] {
                let e = GridError::OutOfBounds {
                    axis,
                    index: c as usize,
                    extent: self.extents[axis],
                };
                return Err(e.into());
            }
            flat += c as usize * s[axis];
        }
        Ok(self.cum[flat])
    }

    fn check_query(&self, b: &LatticeBox) -> Result<(), SatError> {
        if b.ndim() != self.ndim() {
            return Err(GridError::DimensionMismatch {
                expected: self.ndim(),
                found: b.ndim(),
            }
            .into());
        }
        for axis in 0..self.ndim() {
            if b.hi()[axis] >= self.extents[axis] {
                let e = GridError::OutOfBounds {
                    axis,
                    index: b.hi()[axis],
                    extent: self.extents[axis],
                };
                return Err(e.into());
            }
            if b.lo()[axis] < self.origin[axis] {
                return Err(SatError::BelowOrigin {
                    axis,
                    lo: b.lo()[axis],
                    origin: self.origin[axis],
                });
            }
        }
        Ok(())
    }

    /// Visits the 2ⁿ corners: `s_k = 0` picks `hi[k]`, `s_k = 1` picks `lo[k] - 1`.
    /// `flat` is `None` for corners clamped below the origin.
    fn visit_corners(&self, b: &LatticeBox, mut visit: impl FnMut(i8, &[isize], Option<usize>)) {
        let n = self.ndim();
        let s = strides(&self.extents);
        let mut corner = [0isize; MAX_NDIM];
        for mask in 0u32..(1 << n) {
            let mut flat = Some(0usize);
            for k in 0..n {
                let c = if mask & (1 << k) == 0 {
                    b.hi()[k] as isize
                } else {
                    b.lo()[k] as isize - 1
                };
                corner[k] = c;
                if c < self.origin[k] as isize {
                    flat = None;
                } else if let Some(f) = flat.as_mut() {
                    *f += c as usize * s[k];
                }
            }
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            visit(sign, &corner[..n], flat);
        }
    }

    /// Σ_{s∈{0,1}ⁿ} (−1)^{Σs} cum(corner(s)). Exactly 2ⁿ reads whatever the volume.
    pub fn box_query(&self, b: &LatticeBox) -> Result<T, SatError> {
        self.check_query(b)?;
        let mut acc = T::ZERO.widen();
        self.visit_corners(b, |sign, _, flat| {
            if let Some(f) = flat {
                let v = self.cum[f].widen();
                acc = if sign > 0 { acc + v } else { acc - v };
            }
        });
        T::narrow(acc).ok_or_else(|| GridError::Overflow.into())
    }

    /// The individual terms `box_query` adds up, in mask order.
    pub fn corner_terms(&self, b: &LatticeBox) -> Result<Vec<CornerTerm<T>>, SatError> {
        self.check_query(b)?;
        let mut out = Vec::with_capacity(1 << self.ndim());
        self.visit_corners(b, |sign, corner, flat| {
            out.push(CornerTerm {
                sign,
                corner: corner.to_vec(),
                clamped: flat.is_none(),
                value: flat.map_or(T::ZERO, |f| self.cum[f]),
            });
        });
        Ok(out)
    }
}

fn check_origin(extents: &[usize], origin: &[usize]) -> Result<(), SatError> {
    if origin.len() != extents.len() {
        return Err(GridError::DimensionMismatch {
            expected: extents.len(),
            found: origin.len(),
        }
        .into());
    }
    for (axis, (&o, &e)) in origin.iter().zip(extents).enumerate() {
        if o >= e {
            return Err(SatError::OriginOutOfBounds {
                axis,
                index: o,
                extent: e,
            });
        }
    }
    Ok(())
}

/// One-sided detachments of the running prefix sum `F` of a 1-D field at `index`.
///
/// Left is `sgn(F(i−1) − F(i)) = −sgn f(i)`, right is `sgn(F(i+1) − F(i)) = sgn f(i+1)`;
/// both are read off the prefix sums, not the samples.
pub fn detach_of_antiderivative<T: Scalar>(
    field: &GridField<T>,
    index: usize,
) -> Result<SignPair, SatError> {
    if field.ndim() != 1 {
        return Err(SatError::NotOneDimensional(field.ndim()));
    }
    let extent = field.extents()[0];
    if index == 0 || index + 1 >= extent {
        return Err(SatError::Boundary { index, extent });
    }
    let sat = SummedAreaTable::build(field, &[0])?;
    let at = |i: usize| sat.cumulative()[i].widen();
    let here = at(index);
    let left = wide_sign::<T>(at(index - 1) - here)?;
    let right = wide_sign::<T>(at(index + 1) - here)?;
    Ok(SignPair { left, right })
}

fn wide_sign<T: Scalar>(w: T::Wide) -> Result<Sign, SatError> {
    T::wide_signum(w).map(Sign::from_i8).ok_or(SatError::NaN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_by_two() {
        let f = GridField::new(vec![2, 2], vec![1i64, 2, 3, 4]).unwrap();
        let sat = SummedAreaTable::build(&f, &[0, 0]).unwrap();
        assert_eq!(sat.cumulative(), &[1, 3, 4, 10]);
        assert_eq!(sat.box_query(&f.full_box()).unwrap(), 10);
        let terms = sat.corner_terms(&f.full_box()).unwrap();
        assert_eq!(terms.iter().filter(|t| t.clamped).count(), 3);
    }

    #[test]
    fn ones() {
        let f = GridField::filled(vec![3, 3], 1i64).unwrap();
        let sat = SummedAreaTable::build(&f, &[0, 0]).unwrap();
        assert_eq!(sat.antiderivative(&[2, 2]).unwrap(), 9);
        assert_eq!(sat.antiderivative(&[1, 0]).unwrap(), 2);
        assert_eq!(sat.antiderivative(&[-1, 2]).unwrap(), 0);
    }

    #[test]
    fn one_dimensional_is_a_difference() {
        let f = GridField::new(vec![5], vec![3i64, -1, 4, 1, 5]).unwrap();
        let sat = SummedAreaTable::build(&f, &[0]).unwrap();
        let b = LatticeBox::new(vec![1], vec![3]).unwrap();
        let direct = sat.antiderivative(&[3]).unwrap() - sat.antiderivative(&[0]).unwrap();
        assert_eq!(sat.box_query(&b).unwrap(), direct);
        assert_eq!(direct, 4);
    }

    #[test]
    fn shifted_origin() {
        let f = GridField::filled(vec![4, 4], 2i64).unwrap();
        let sat = SummedAreaTable::build(&f, &[1, 2]).unwrap();
        assert_eq!(sat.antiderivative(&[3, 3]).unwrap(), 12);
        assert_eq!(sat.antiderivative(&[0, 3]).unwrap(), 0);
        let below = LatticeBox::new(vec![0, 2], vec![3, 3]).unwrap();
        assert!(matches!(
            sat.box_query(&below),
            Err(SatError::BelowOrigin { axis: 0, .. })
        ));
        let b = LatticeBox::new(vec![1, 2], vec![2, 2]).unwrap();
        assert_eq!(sat.box_query(&b).unwrap(), 4);
    }

    #[test]
    fn construction_overflow_fails() {
        let f = GridField::new(vec![3], vec![i64::MAX, 1, -5]).unwrap();
        assert_eq!(
            SummedAreaTable::build(&f, &[0]),
            Err(SatError::Grid(GridError::Overflow))
        );
    }

    #[test]
    fn origin_must_be_inside() {
        let f = GridField::filled(vec![2, 2], 1i64).unwrap();
        assert!(matches!(
            SummedAreaTable::build(&f, &[0, 2]),
            Err(SatError::OriginOutOfBounds { axis: 1, .. })
        ));
    }

    #[test]
    fn antiderivative_detachments() {
        let ones = GridField::filled(vec![6], 1i64).unwrap();
        for i in 1..5 {
            let p = detach_of_antiderivative(&ones, i).unwrap();
            assert_eq!((p.left, p.right), (Sign::Neg, Sign::Pos));
        }
        let zeros = GridField::filled(vec![6], 0.0f64).unwrap();
        let p = detach_of_antiderivative(&zeros, 2).unwrap();
        assert_eq!((p.left, p.right), (Sign::Zero, Sign::Zero));
        assert!(matches!(
            detach_of_antiderivative(&ones, 0),
            Err(SatError::Boundary { .. })
        ));
        assert!(matches!(
            detach_of_antiderivative(&ones, 5),
            Err(SatError::Boundary { .. })
        ));
    }
}
