//! Rectilinear domains on the cell grid and the corner-sum integral.
//!
//! Cell `(i, j)` spans vertices `(i, j)` to `(i+1, j+1)`. A vertex `v`
//! touches the four cells `v − (1,1)`, `v − (1,0)`, `v − (0,1)` and `v`;
//! its coefficient is the mixed difference of their occupancy, and
//! `∫_D f = Σ_v α(v) · F(v − 1)` with `F` read from a summed-area table.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::grid::{GridError, LatticeBox, Scalar};
use crate::sat::{SatError, SummedAreaTable};

/// Vertex of the lattice, `(axis 0, axis 1)`.
pub type Vertex = [usize; 2];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GreenError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error("domains are 2-D, got {0} axes")]
    NotPlanar(usize),
    #[error("domain grid {domain:?} differs from table grid {table:?}")]
    GridMismatch {
        domain: [usize; 2],
        table: [usize; 2],
    },
    #[error("member cell {cell:?} lies below the table origin")]
    BelowOrigin { cell: [usize; 2] },
}

/// Occupancy bits around a vertex: bit 0 is the `(−,−)` cell, bit 1
/// `(−,+)`, bit 2 `(+,−)`, bit 3 `(+,+)`.
pub type Pattern = u8;

/// `m(−,−) + m(+,+) − m(+,−) − m(−,+)`.
pub fn alpha_of_pattern(p: Pattern) -> i8 {
    let m = |bit: u8| i8::from(p >> bit & 1 == 1);
    m(0) + m(3) - m(2) - m(1)
}

/// The ten occupancy patterns with nonzero coefficient.
pub fn corner_patterns() -> impl Iterator<Item = Pattern> {
    (0u8..16).filter(|&p| alpha_of_pattern(p) != 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    pub vertex: Vertex,
    pub alpha: i8,
    pub pattern: Pattern,
}

/// Corners of a domain together with the cell grid they live on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerMap {
    extents: [usize; 2],
    entries: Vec<Corner>,
}

impl CornerMap {
    /// Wraps arbitrary entries; nothing ties them to a domain.
    pub fn from_entries(extents: [usize; 2], entries: Vec<Corner>) -> Self {
        Self { extents, entries }
    }

    pub fn extents(&self) -> [usize; 2] {
        self.extents
    }

    pub fn entries(&self) -> &[Corner] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A union of cells on an `H × W` cell grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectilinearDomain {
    extents: [usize; 2],
    cells: Vec<bool>,
    corners: CornerMap,
}

fn planar(extents: &[usize]) -> Result<[usize; 2], GreenError> {
    match *extents {
        [h, w] if h > 0 && w > 0 => Ok([h, w]),
        [h, _] => Err(GridError::ZeroExtent {
            axis: usize::from(h > 0),
        }
        .into()),
        _ => Err(GreenError::NotPlanar(extents.len())),
    }
}

impl RectilinearDomain {
    /// Domain from a row-major membership bitmap.
    pub fn from_cells(extents: [usize; 2], cells: Vec<bool>) -> Result<Self, GreenError> {
        planar(&extents)?;
        if cells.len() != extents[0] * extents[1] {
            return Err(GridError::ValueCountMismatch {
                expected: extents[0] * extents[1],
                found: cells.len(),
            }
            .into());
        }
        let mut d = Self {
            extents,
            cells,
            corners: CornerMap::from_entries(extents, Vec::new()),
        };
        d.corners = d.scan_corners();
        Ok(d)
    }

    /// Union of inclusive cell boxes.
    pub fn from_boxes(extents: [usize; 2], boxes: &[LatticeBox]) -> Result<Self, GreenError> {
        planar(&extents)?;
        let mut cells = vec![false; extents[0] * extents[1]];
        for b in boxes {
            if b.ndim() != 2 {
                return Err(GridError::DimensionMismatch {
                    expected: 2,
                    found: b.ndim(),
                }
                .into());
            }
            for (axis, &extent) in extents.iter().enumerate() {
                if b.hi()[axis] >= extent {
                    return Err(GridError::OutOfBounds {
                        axis,
                        index: b.hi()[axis],
                        extent,
                    }
                    .into());
                }
            }
            for i in b.lo()[0]..=b.hi()[0] {
                cells[i * extents[1] + b.lo()[1]..=i * extents[1] + b.hi()[1]].fill(true);
            }
        }
        Self::from_cells(extents, cells)
    }

    pub fn extents(&self) -> [usize; 2] {
        self.extents
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    /// Membership; cells outside the grid are never members.
    pub fn contains(&self, i: isize, j: isize) -> bool {
        let [h, w] = self.extents;
        i >= 0
            && j >= 0
            && (i as usize) < h
            && (j as usize) < w
            && self.cells[i as usize * w + j as usize]
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    /// Occupancy pattern around a vertex.
    pub fn pattern_at(&self, v: Vertex) -> Pattern {
        let (a, b) = (v[0] as isize, v[1] as isize);
        let bit = |i, j, k: u8| u8::from(self.contains(i, j)) << k;
        bit(a - 1, b - 1, 0) | bit(a - 1, b, 1) | bit(a, b - 1, 2) | bit(a, b, 3)
    }

    fn scan_corners(&self) -> CornerMap {
        let [h, w] = self.extents;
        let mut entries = Vec::new();
        for a in 0..=h {
            for b in 0..=w {
                let pattern = self.pattern_at([a, b]);
                let alpha = alpha_of_pattern(pattern);
                if alpha != 0 {
                    entries.push(Corner {
                        vertex: [a, b],
                        alpha,
                        pattern,
                    });
                }
            }
        }
        CornerMap::from_entries(self.extents, entries)
    }

    pub fn corners(&self) -> &CornerMap {
        &self.corners
    }

    /// Count of corners per occupancy pattern.
    pub fn alpha_census(&self) -> [usize; 16] {
        let mut hist = [0; 16];
        for c in &self.corners.entries {
            hist[c.pattern as usize] += 1;
        }
        hist
    }

    /// Smallest member cell coordinate per axis, if any cell is a member.
    pub fn min_cell(&self) -> Option<[usize; 2]> {
        let w = self.extents[1];
        let mut lo: Option<[usize; 2]> = None;
        for (k, _) in self.cells.iter().enumerate().filter(|(_, &c)| c) {
            let (i, j) = (k / w, k % w);
            lo = Some(lo.map_or([i, j], |m| [m[0].min(i), m[1].min(j)]));
        }
        lo
    }

    /// `∫_D f` over the domain.
    pub fn integrate<T: Scalar>(&self, sat: &SummedAreaTable<T>) -> Result<T, GreenError> {
        check_grid(self.extents, sat)?;
        if let Some(cell) = self.min_cell() {
            if (0..2).any(|k| cell[k] < sat.origin().get(k).copied().unwrap_or(0)) {
                return Err(GreenError::BelowOrigin { cell });
            }
        }
        integrate_corners(&self.corners, sat)
    }
}

fn check_grid<T: Scalar>(domain: [usize; 2], sat: &SummedAreaTable<T>) -> Result<(), GreenError> {
    let table = planar(sat.extents())?;
    if table != domain {
        return Err(GreenError::GridMismatch { domain, table });
    }
    Ok(())
}

/// `Σ α(v) · F(v − 1)` over a corner map.
pub fn integrate_corners<T: Scalar>(
    corners: &CornerMap,
    sat: &SummedAreaTable<T>,
) -> Result<T, GreenError> {
    check_grid(corners.extents, sat)?;
    let mut acc = T::ZERO.widen();
    for c in &corners.entries {
        let at = [c.vertex[0] as isize - 1, c.vertex[1] as isize - 1];
        acc = acc + T::wide_int(c.alpha.into()) * sat.antiderivative(&at)?.widen();
    }
    T::narrow(acc).ok_or(GreenError::Grid(GridError::Overflow))
}
