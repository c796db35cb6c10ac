//! Lattice curves, their tendency, and the slanted line integral.
//!
//! Coordinates are `(axis 0, axis 1)`, read as `(x, y)`; counter-clockwise
//! means the enclosed cells lie to the left of travel. Slanted integrals are
//! carried doubled so the half-weighted endpoint terms stay exact.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::detach::Sign;
use crate::green::{GreenError, RectilinearDomain, Vertex};
use crate::grid::{GridError, Scalar};
use crate::sat::SummedAreaTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlantError {
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error("curve is empty")]
    Empty,
    #[error("step {0} is not a unit lattice step")]
    NotUnitStep(usize),
    #[error("curve backtracks at vertex {0}")]
    Backtrack(usize),
    #[error("curve revisits vertex {0:?}")]
    SelfIntersecting(Vertex),
    #[error("closed curve must end where it starts and have at least 4 vertices")]
    NotClosed,
    #[error("curve is not closed")]
    OpenCurve,
    #[error("orientation must be +1 or -1")]
    BadOrientation,
    #[error("isolated vertex")]
    Isolated,
    #[error("vertex index {index} out of range for {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("tendency changes inside the segment at vertex {0}")]
    NotUniform(usize),
    #[error("vertex {0:?} lies outside the grid")]
    OutsideGrid(Vertex),
    #[error("region winds more than once around cell {0:?}")]
    Winding([usize; 2]),
}

impl From<GridError> for SlantError {
    fn from(e: GridError) -> Self {
        SlantError::Green(e.into())
    }
}

fn unit_step(a: Vertex, b: Vertex) -> Option<[i8; 2]> {
    let dx = b[0] as isize - a[0] as isize;
    let dy = b[1] as isize - a[1] as isize;
    (dx.abs() + dy.abs() == 1).then_some([dx as i8, dy as i8])
}

fn check_steps(vs: &[Vertex], cyclic: bool) -> Result<(), SlantError> {
    for (k, w) in vs.windows(2).enumerate() {
        unit_step(w[0], w[1]).ok_or(SlantError::NotUnitStep(k))?;
    }
    let n = vs.len();
    for k in 0..n.saturating_sub(2) {
        if vs[k + 2] == vs[k] {
            return Err(SlantError::Backtrack(k + 1));
        }
    }
    if cyclic && n >= 3 && vs[1] == vs[n - 2] {
        return Err(SlantError::Backtrack(0));
    }
    let mut seen: Vec<Vertex> = vs.to_vec();
    if cyclic {
        seen.pop();
    }
    seen.sort_unstable();
    if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
        return Err(SlantError::SelfIntersecting(w[0]));
    }
    Ok(())
}

fn orientation(s: i8) -> Result<Sign, SlantError> {
    match s {
        1 => Ok(Sign::Pos),
        -1 => Ok(Sign::Neg),
        _ => Err(SlantError::BadOrientation),
    }
}

/// A simple 4-connected path of lattice vertices with an orientation `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeCurve {
    vertices: Vec<Vertex>,
    orientation: Sign,
    closed: bool,
}

impl LatticeCurve {
    pub fn open(vertices: Vec<Vertex>, orientation: i8) -> Result<Self, SlantError> {
        let orientation = self::orientation(orientation)?;
        if vertices.is_empty() {
            return Err(SlantError::Empty);
        }
        check_steps(&vertices, false)?;
        Ok(Self {
            vertices,
            orientation,
            closed: false,
        })
    }

    /// A loop given with its first vertex repeated at the end.
    pub fn closed(vertices: Vec<Vertex>, orientation: i8) -> Result<Self, SlantError> {
        let orientation = self::orientation(orientation)?;
        if vertices.len() < 5 || vertices.first() != vertices.last() {
            return Err(SlantError::NotClosed);
        }
        check_steps(&vertices, true)?;
        Ok(Self {
            vertices,
            orientation,
            closed: true,
        })
    }

    /// Vertices; a closed curve repeats its first vertex last.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn orientation(&self) -> Sign {
        self.orientation
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Number of distinct vertices.
    pub fn len(&self) -> usize {
        self.vertices.len() - usize::from(self.closed)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self { vertices, ..*self }
    }

    fn neighbours(&self, index: usize) -> Result<(Option<Vertex>, Option<Vertex>), SlantError> {
        let n = self.len();
        if index >= n {
            return Err(SlantError::IndexOutOfRange { index, len: n });
        }
        let v = &self.vertices;
        if self.closed {
            return Ok((Some(v[(index + n - 1) % n]), Some(v[(index + 1) % n])));
        }
        Ok((
            index.checked_sub(1).map(|i| v[i]),
            v.get(index + 1).copied(),
        ))
    }

    /// Signed area test: `+1` counter-clockwise, `−1` clockwise.
    pub fn winding_sign(&self) -> Result<Sign, SlantError> {
        if !self.closed {
            return Err(SlantError::OpenCurve);
        }
        let twice: i64 = self
            .vertices
            .windows(2)
            .map(|w| w[0][0] as i64 * w[1][1] as i64 - w[1][0] as i64 * w[0][1] as i64)
            .sum();
        Ok(Sign::from_i8(twice.signum() as i8))
    }
}

/// `(x₊, x₋, y₊, y₋)` at a vertex.
///
/// An interior vertex takes its one-sided entries from the chord between
/// its neighbours; an endpoint has its absent side set to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveTendencyVector {
    pub x_plus: Sign,
    pub x_minus: Sign,
    pub y_plus: Sign,
    pub y_minus: Sign,
}

impl CurveTendencyVector {
    pub fn tendency(&self) -> Sign {
        let [s1, s2, s3, s4] =
            [self.x_plus, self.x_minus, self.y_plus, self.y_minus].map(Sign::as_i8);
        if s1 * s4 != 0 && s2 == s3 {
            Sign::Pos
        } else if s2 * s3 != 0 && s1 == -s4 {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }
}

fn sgn_diff(a: usize, b: usize) -> Sign {
    Sign::from_i8((b as isize - a as isize).signum() as i8)
}

pub fn tendency_vector(
    curve: &LatticeCurve,
    index: usize,
) -> Result<CurveTendencyVector, SlantError> {
    let v = curve.vertices[index.min(curve.vertices.len() - 1)];
    Ok(match curve.neighbours(index)? {
        (Some(p), Some(q)) => {
            let (x, y) = (sgn_diff(p[0], q[0]), sgn_diff(p[1], q[1]));
            CurveTendencyVector {
                x_plus: x,
                x_minus: x.flip(),
                y_plus: y,
                y_minus: y.flip(),
            }
        }
        (None, Some(q)) => CurveTendencyVector {
            x_plus: sgn_diff(v[0], q[0]),
            x_minus: Sign::Zero,
            y_plus: sgn_diff(v[1], q[1]),
            y_minus: Sign::Zero,
        },
        (Some(p), None) => CurveTendencyVector {
            x_plus: Sign::Zero,
            x_minus: sgn_diff(v[0], p[0]),
            y_plus: Sign::Zero,
            y_minus: sgn_diff(v[1], p[1]),
        },
        (None, None) => return Err(SlantError::Isolated),
    })
}

/// `τ_C` at a vertex.
pub fn curve_tendency(curve: &LatticeCurve, index: usize) -> Result<Sign, SlantError> {
    Ok(tendency_vector(curve, index)?.tendency())
}

/// A sub-path whose interior vertices share the tendency `beta`. The
/// endpoint tendencies entering the integral are taken equal to `beta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TendedSegment {
    vertices: Vec<Vertex>,
    beta: Sign,
    orientation: Sign,
}

fn chord_tendency(p: Vertex, q: Vertex) -> Sign {
    let (x, y) = (sgn_diff(p[0], q[0]).as_i8(), sgn_diff(p[1], q[1]).as_i8());
    Sign::from_i8(-(x * y))
}

impl TendedSegment {
    pub fn new(vertices: Vec<Vertex>, orientation: i8) -> Result<Self, SlantError> {
        let curve = LatticeCurve::open(vertices, orientation)?;
        let vs = curve.vertices;
        let mut beta = None;
        for k in 1..vs.len().saturating_sub(1) {
            let t = chord_tendency(vs[k - 1], vs[k + 1]);
            match beta {
                None => beta = Some(t),
                Some(b) if b != t => return Err(SlantError::NotUniform(k)),
                _ => {}
            }
        }
        Ok(Self {
            vertices: vs,
            beta: beta.unwrap_or(Sign::Zero),
            orientation: curve.orientation,
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn beta(&self) -> Sign {
        self.beta
    }

    pub fn orientation(&self) -> Sign {
        self.orientation
    }

    pub fn start(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn end(&self) -> Vertex {
        self.vertices[self.vertices.len() - 1]
    }

    /// Same vertices walked backwards; tendency and orientation unchanged.
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self { vertices, ..*self }
    }

    /// Corner of the straight path on `side`: `(x₁, y₀)` for `+`, `(x₀, y₁)` for `−`.
    pub fn corner(&self, side: Sign) -> Vertex {
        let (p0, p1) = (self.start(), self.end());
        if side == Sign::Neg {
            [p0[0], p1[1]]
        } else {
            [p1[0], p0[1]]
        }
    }

    /// Side whose path bounds `D⁺`: `s·β`, or `+` for a straight segment.
    pub fn selected_side(&self) -> Sign {
        match self.beta {
            Sign::Zero => Sign::Pos,
            b => b.times(self.orientation),
        }
    }
}

/// Cyclic minimal cover of `0..n` by arcs with uniform interior tendency,
/// starting at `start`. Cost is (arcs, straight junctions, bare edges);
/// returns it with the junction offsets.
fn cover(taus: &[Sign], start: usize, cyclic: bool) -> Option<(Cost, Vec<usize>)> {
    let n = taus.len();
    let len = if cyclic { n } else { n - 1 };
    let at = |k: usize| taus[(start + k) % n];
    let straight = |k: usize| usize::from(at(k) == Sign::Zero);
    let mut best: Vec<Option<(Cost, usize)>> = vec![None; len + 1];
    best[0] = Some(((0, 0, 0), 0));
    for j in 1..=len {
        let mut inner: Option<Sign> = None;
        for a in (0..j).rev() {
            if a + 1 < j {
                let t = at(a + 1);
                if inner.is_some_and(|s| s != t) {
                    break;
                }
                inner = Some(t);
            }
            if cyclic && a == 0 && j == len {
                continue;
            }
            let Some(((c, s, b), _)) = best[a] else {
                continue;
            };
            let cost = (
                c + 1,
                s + if a > 0 { straight(a) } else { 0 },
                b + usize::from(j - a == 1),
            );
            if best[j].is_none_or(|(old, _)| cost < old) {
                best[j] = Some((cost, a));
            }
        }
    }
    let ((c, s, b), _) = best[len]?;
    let mut cuts = vec![len];
    let mut j = len;
    while j > 0 {
        j = best[j]?.1;
        cuts.push(j);
    }
    cuts.reverse();
    let s = s + if cyclic { straight(0) } else { 0 };
    Some(((c, s, b), cuts))
}

type Cost = (usize, usize, usize);

/// Splits a curve into the fewest uniformly tended segments, preferring
/// junctions at turns. Closed curves yield at least two segments.
pub fn decompose(curve: &LatticeCurve) -> Result<Vec<TendedSegment>, SlantError> {
    let n = curve.len();
    let vs = &curve.vertices;
    let s = curve.orientation.as_i8();
    if n == 1 {
        return Ok(vec![TendedSegment::new(vs.clone(), s)?]);
    }
    let taus: Vec<Sign> = (0..n)
        .map(|i| curve_tendency(curve, i))
        .collect::<Result<_, _>>()?;
    let (start, cuts) = if curve.closed {
        let change = (0..n).find(|&i| taus[i] != taus[(i + 1) % n]);
        let starts: Vec<usize> = match change {
            Some(i) => vec![i, (i + 1) % n],
            None => (0..n).collect(),
        };
        starts
            .into_iter()
            .filter_map(|st| cover(&taus, st, true).map(|(cost, cuts)| (cost, st, cuts)))
            .min_by_key(|(cost, st, _)| (*cost, *st))
            .map(|(_, st, cuts)| (st, cuts))
            .ok_or(SlantError::NotClosed)?
    } else {
        let (_, cuts) = cover(&taus, 0, false).ok_or(SlantError::Empty)?;
        (0, cuts)
    };
    cuts.windows(2)
        .map(|w| {
            let part = (w[0]..=w[1]).map(|k| vs[(start + k) % n]).collect();
            TendedSegment::new(part, s)
        })
        .collect()
}

fn walk(from: Vertex, to: Vertex, out: &mut Vec<Vertex>) {
    let mut v = from;
    while v != to {
        let axis = usize::from(v[0] == to[0]);
        v[axis] = if to[axis] > v[axis] {
            v[axis] + 1
        } else {
            v[axis] - 1
        };
        out.push(v);
    }
}

/// The two L-shaped paths between the segment's endpoints, through
/// `(x₁, y₀)` and through `(x₀, y₁)`. Empty for a closed-up segment.
pub fn straight_paths(segment: &TendedSegment) -> (Vec<Vertex>, Vec<Vertex>) {
    let (p0, p1) = (segment.start(), segment.end());
    if p0 == p1 {
        return (Vec::new(), Vec::new());
    }
    let path = |k: Vertex| {
        let mut out = vec![p0];
        walk(p0, k, &mut out);
        walk(k, p1, &mut out);
        out
    };
    (
        path(segment.corner(Sign::Pos)),
        path(segment.corner(Sign::Neg)),
    )
}

/// Winding number at every cell center of a closed vertex loop; positive
/// for counter-clockwise travel.
pub fn winding_numbers(lp: &[Vertex], extents: [usize; 2]) -> Result<Vec<i32>, SlantError> {
    let [h, w] = extents;
    if let Some(&v) = lp.iter().find(|v| v[0] > h || v[1] > w) {
        return Err(SlantError::OutsideGrid(v));
    }
    let mut acc = vec![0i32; h * w];
    for e in lp.windows(2) {
        let (a, b) = (e[0], e[1]);
        if a[1] != b[1] || a[1] == 0 {
            continue;
        }
        let col = a[0].min(b[0]);
        acc[col * w + a[1] - 1] += if b[0] > a[0] { -1 } else { 1 };
    }
    for col in 0..h {
        for j in (0..w.saturating_sub(1)).rev() {
            acc[col * w + j] += acc[col * w + j + 1];
        }
    }
    Ok(acc)
}

fn region(lp: &[Vertex], extents: [usize; 2]) -> Result<RectilinearDomain, SlantError> {
    let wind = winding_numbers(lp, extents)?;
    if let Some(k) = wind.iter().position(|x| x.abs() > 1) {
        return Err(SlantError::Winding([k / extents[1], k % extents[1]]));
    }
    Ok(RectilinearDomain::from_cells(
        extents,
        wind.iter().map(|&x| x != 0).collect(),
    )?)
}

/// Cells enclosed by the segment and its straight path on `side`.
pub fn partial_domain(
    segment: &TendedSegment,
    side: Sign,
    extents: [usize; 2],
) -> Result<RectilinearDomain, SlantError> {
    let mut lp = segment.vertices.clone();
    let (p0, p1) = (segment.start(), segment.end());
    let k = segment.corner(side);
    walk(p1, k, &mut lp);
    walk(k, p0, &mut lp);
    region(&lp, extents)
}

/// Cells enclosed by a closed curve.
pub fn interior(
    curve: &LatticeCurve,
    extents: [usize; 2],
) -> Result<RectilinearDomain, SlantError> {
    if !curve.closed {
        return Err(SlantError::OpenCurve);
    }
    region(&curve.vertices, extents)
}

fn table_extents<T: Scalar>(sat: &SummedAreaTable<T>) -> Result<[usize; 2], SlantError> {
    match *sat.extents() {
        [h, w] => Ok([h, w]),
        ref e => Err(GreenError::NotPlanar(e.len()).into()),
    }
}

fn antiderivative<T: Scalar>(sat: &SummedAreaTable<T>, v: Vertex) -> Result<T::Wide, SlantError> {
    let at = [v[0] as isize - 1, v[1] as isize - 1];
    Ok(sat.antiderivative(&at).map_err(GreenError::from)?.widen())
}

fn narrow<T: Scalar>(w: T::Wide) -> Result<T, SlantError> {
    T::narrow(w).ok_or(SlantError::from(GridError::Overflow))
}

/// Twice the slanted integral of `F` over a segment:
/// `2·m_f(D⁺) − 2β·F(K) + β·(F(P₀) + F(P₁))`, with `K` the corner of the
/// path on side `s·β`.
pub fn slanted_integral_doubled<T: Scalar>(
    segment: &TendedSegment,
    sat: &SummedAreaTable<T>,
) -> Result<T, SlantError> {
    let extents = table_extents(sat)?;
    let side = segment.selected_side();
    let d = partial_domain(segment, side, extents)?;
    let two = T::wide_int(2);
    let beta = T::wide_int(segment.beta.as_i8().into());
    let f = |v| antiderivative(sat, v);
    let acc = two * d.integrate(sat)?.widen() - two * beta * f(segment.corner(side))?
        + beta * (f(segment.start())? + f(segment.end())?);
    narrow(acc)
}

/// The slanted integral as a float; exact callers use the doubled form.
pub fn slanted_integral<T: Scalar>(
    segment: &TendedSegment,
    sat: &SummedAreaTable<T>,
) -> Result<f64, SlantError> {
    Ok(slanted_integral_doubled(segment, sat)?.to_f64() / 2.0)
}

/// Corner-ledger weight of a junction, doubled.
fn junction_weight(din: [i8; 2], dout: [i8; 2], beta_in: Sign, beta_out: Sign) -> i32 {
    let (bi, bo) = (
        i32::from(beta_in.as_i8().abs()),
        i32::from(beta_out.as_i8().abs()),
    );
    if din == dout {
        let eps = if din[1] == 0 { 1 } else { -1 };
        return eps * (bi - bo);
    }
    // occupancy left of travel: the inner quadrant on a left turn, the
    // other three cells on a right turn
    let cross = i32::from(din[0] * dout[1] - din[1] * dout[0]);
    let q = [i32::from(dout[0] - din[0]), i32::from(dout[1] - din[1])];
    cross * q[0] * q[1] * (2 - bi - bo)
}

/// `∮ F` over a closed curve from its decomposition: the doubled segment
/// integrals plus a corner ledger at each junction, halved. Equals `s·w`
/// times the enclosed cell sum, where `w = +1` for counter-clockwise travel.
pub fn closed_curve_integral<T: Scalar>(
    curve: &LatticeCurve,
    sat: &SummedAreaTable<T>,
) -> Result<T, SlantError> {
    if !curve.closed {
        return Err(SlantError::OpenCurve);
    }
    let segs = decompose(curve)?;
    let s = T::wide_int(curve.orientation.as_i8().into());
    let mut acc = T::ZERO.widen();
    for (k, seg) in segs.iter().enumerate() {
        acc = acc + slanted_integral_doubled(seg, sat)?.widen();
        let prev = &segs[(k + segs.len() - 1) % segs.len()];
        let pv = prev.vertices();
        let v = seg.start();
        let din = unit_step(pv[pv.len() - 2], v).ok_or(SlantError::NotUnitStep(k))?;
        let dout = unit_step(v, seg.vertices()[1]).ok_or(SlantError::NotUnitStep(k))?;
        let weight = junction_weight(din, dout, prev.beta(), seg.beta());
        if weight != 0 {
            acc = acc + s * T::wide_int(weight) * antiderivative(sat, v)?;
        }
    }
    T::halve(acc).ok_or(SlantError::from(GridError::Overflow))
}
