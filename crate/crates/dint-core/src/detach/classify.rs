//! One-sided sign limits and everything derived from them.

use alloc::vec::Vec;

use super::limits::{approx_partial_limits, sign, windowed_limit, Sign, Window};
use super::probe::{Family, ProbeFunction, SampledFunction, Tail};
use super::{DetachConfig, DetachError, Side, SignHistogram, SignPair};

/// Stabilized values of one family's sequence.
fn stabilize(seq: &[f64], tail: Tail, window: &Window) -> Result<Vec<f64>, DetachError> {
    match tail {
        Tail::Nearest => Ok(seq.last().into_iter().copied().collect()),
        Tail::Half => {
            let rest = &seq[seq.len() / 2..];
            if rest.len() <= window.k_min {
                return Ok(Vec::new());
            }
            let sub = Window {
                k_max: rest.len(),
                seed: None,
                ..*window
            };
            approx_partial_limits(rest.iter().copied(), &sub)
        }
    }
}

fn families<P: ProbeFunction + ?Sized>(
    f: &P,
    x: f64,
    side: Side,
    cfg: &DetachConfig,
) -> Result<Vec<Family>, DetachError> {
    let fams = f.probe_families(x, side, cfg.window.k_max)?;
    if fams.is_empty() {
        return Err(DetachError::NoProbes(side));
    }
    for fam in &fams {
        fam.check(side)?;
    }
    Ok(fams)
}

/// `limsup` and `liminf` of `sgn(f(x+h) − f(x))` from one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignLimits {
    pub sup: Sign,
    pub inf: Sign,
    /// Which of `+1, 0, −1` occur as stabilized values, in that order.
    pub occurs: [bool; 3],
}

impl SignLimits {
    /// The one-sided detachment, when the limit exists.
    pub fn detachment(&self) -> Option<Sign> {
        (self.sup == self.inf).then_some(self.sup)
    }
}

const ORDER: [Sign; 3] = [Sign::Pos, Sign::Zero, Sign::Neg];

fn slot(s: Sign) -> usize {
    (1 - s.as_i8()) as usize
}

/// Sign limits over the union of the stabilized family values.
pub fn one_sided_sign_limits<P: ProbeFunction + ?Sized>(
    f: &P,
    x: f64,
    side: Side,
    cfg: &DetachConfig,
) -> Result<SignLimits, DetachError> {
    let fams = families(f, x, side, cfg)?;
    let fx = f.eval(x)?;
    let mut occurs = [false; 3];
    let mut histogram = SignHistogram::default();
    for fam in &fams {
        let signs = fam
            .values
            .iter()
            .map(|v| {
                let s = sign(v - fx, cfg.zero_band)?;
                histogram.record(s);
                Ok(s.as_f64())
            })
            .collect::<Result<Vec<_>, DetachError>>()?;
        for v in stabilize(&signs, f.tail(), &cfg.window)? {
            occurs[slot(Sign::from_i8(v as i8))] = true;
        }
    }
    let sup = ORDER.iter().zip(occurs).find(|(_, o)| *o).map(|(s, _)| *s);
    let inf = ORDER
        .iter()
        .zip(occurs)
        .rev()
        .find(|(_, o)| *o)
        .map(|(s, _)| *s);
    match (sup, inf) {
        (Some(sup), Some(inf)) => Ok(SignLimits { sup, inf, occurs }),
        _ => Err(DetachError::Unstable { side, histogram }),
    }
}

/// The six flags `s₁..s₆`: left `+1, 0, −1` then right `+1, 0, −1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TendencyVector(pub [bool; 6]);

impl TendencyVector {
    pub fn from_limits(left: &SignLimits, right: &SignLimits) -> Self {
        let mut s = [false; 6];
        s[..3].copy_from_slice(&left.occurs);
        s[3..].copy_from_slice(&right.occurs);
        Self(s)
    }

    pub fn from_bits(bits: [u8; 6]) -> Self {
        Self(bits.map(|b| b != 0))
    }

    pub fn bits(&self) -> [u8; 6] {
        self.0.map(u8::from)
    }

    /// At least one flag set per side.
    pub fn is_admissible(&self) -> bool {
        self.0[..3].iter().any(|&b| b) && self.0[3..].iter().any(|&b| b)
    }

    /// All 49 admissible vectors.
    pub fn admissible() -> impl Iterator<Item = TendencyVector> {
        (0u8..64)
            .map(|m| TendencyVector(core::array::from_fn(|i| m >> (5 - i) & 1 == 1)))
            .filter(TendencyVector::is_admissible)
    }

    fn side(&self, side: Side) -> &[bool] {
        match side {
            Side::Left => &self.0[..3],
            Side::Right => &self.0[3..],
        }
    }

    /// `(sup, inf)` of one side: the first and last set flag.
    pub fn sup_inf(&self, side: Side) -> Option<(Sign, Sign)> {
        let flags = self.side(side);
        let first = flags.iter().position(|&b| b)?;
        let last = flags.iter().rposition(|&b| b)?;
        Some((ORDER[first], ORDER[last]))
    }
}

/// Disdetachment types of the four sign limits, ascending.
pub fn types_of(sup_plus: Sign, inf_plus: Sign, sup_minus: Sign, inf_minus: Sign) -> Vec<u8> {
    [
        (1, sup_plus != sup_minus.flip()),
        (2, inf_plus != inf_minus.flip()),
        (3, sup_plus != sup_minus),
        (4, inf_plus != inf_minus),
        (5, sup_plus != inf_plus),
        (6, sup_minus != inf_minus),
    ]
    .into_iter()
    .filter_map(|(t, hit)| hit.then_some(t))
    .collect()
}

/// Monotony indicator of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Monotony {
    /// `{0}`: an extremum.
    Extremum,
    /// `{+1}`
    Increasing,
    /// `{−1}`
    Decreasing,
    /// `∅`
    Neither,
}

impl Monotony {
    pub fn as_set(self) -> &'static [i8] {
        match self {
            Monotony::Extremum => &[0],
            Monotony::Increasing => &[1],
            Monotony::Decreasing => &[-1],
            Monotony::Neither => &[],
        }
    }
}

pub fn monotony_of(v: &TendencyVector) -> Monotony {
    match v.bits() {
        [1, 0, 0, 1, 0, 0] | [0, 0, 1, 0, 0, 1] | [0, 0, 0, 0, 0, 0] => Monotony::Extremum,
        [0, 0, 1, 1, 0, 0] => Monotony::Increasing,
        [1, 0, 0, 0, 0, 1] => Monotony::Decreasing,
        _ => Monotony::Neither,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetachmentReport {
    pub x: f64,
    pub sup_plus: Sign,
    pub inf_plus: Sign,
    pub sup_minus: Sign,
    pub inf_minus: Sign,
    pub vector: TendencyVector,
    pub detachment: Option<Sign>,
    pub signposted: Option<Sign>,
    pub types: Vec<u8>,
    pub tendency: Option<Sign>,
    pub monotony: Monotony,
    /// Tendable, yet neither detachable nor signposted.
    pub null_disdetachment: bool,
}

impl DetachmentReport {
    /// Builds the report from an admissible tendency vector.
    pub fn from_vector(x: f64, vector: TendencyVector) -> Result<Self, DetachError> {
        let (sup_minus, inf_minus) = vector
            .sup_inf(Side::Left)
            .ok_or(DetachError::Inadmissible)?;
        let (sup_plus, inf_plus) = vector
            .sup_inf(Side::Right)
            .ok_or(DetachError::Inadmissible)?;
        let types = types_of(sup_plus, inf_plus, sup_minus, inf_minus);
        let has = |t: &[u8]| types.iter().any(|x| t.contains(x));
        let detachment = (!has(&[3, 4, 5, 6])).then_some(sup_plus);
        let signposted = (!has(&[1, 2, 5, 6])).then_some(sup_plus);
        let tendable = !has(&[5, 6]);
        let tendency = tendable.then(|| {
            SignPair {
                left: sup_minus,
                right: sup_plus,
            }
            .tendency()
        });
        Ok(Self {
            x,
            sup_plus,
            inf_plus,
            sup_minus,
            inf_minus,
            vector,
            detachment,
            signposted,
            tendency,
            monotony: monotony_of(&vector),
            null_disdetachment: tendable && detachment.is_none() && signposted.is_none(),
            types,
        })
    }

    pub fn is_tendable(&self) -> bool {
        self.tendency.is_some()
    }
}

/// Full two-sided classification of `x`.
pub fn classify<P: ProbeFunction + ?Sized>(
    f: &P,
    x: f64,
    cfg: &DetachConfig,
) -> Result<DetachmentReport, DetachError> {
    let left = one_sided_sign_limits(f, x, Side::Left, cfg)?;
    let right = one_sided_sign_limits(f, x, Side::Right, cfg)?;
    DetachmentReport::from_vector(x, TendencyVector::from_limits(&left, &right))
}

/// Tendency `τ_f(x)`. At the right end of the support it is the left
/// signposted detachment `−f₋(x)`.
pub fn tendency<P: ProbeFunction + ?Sized>(
    f: &P,
    x: f64,
    cfg: &DetachConfig,
) -> Result<Sign, DetachError> {
    let left = one_sided_sign_limits(f, x, Side::Left, cfg)?.detachment();
    if f.is_right_end(x)? {
        return left.map(Sign::flip).ok_or(DetachError::NotTendable("left"));
    }
    let right = one_sided_sign_limits(f, x, Side::Right, cfg)?.detachment();
    match (left, right) {
        (Some(l), Some(r)) => Ok(SignPair { left: l, right: r }.tendency()),
        (None, Some(_)) => Err(DetachError::NotTendable("left")),
        (Some(_), None) => Err(DetachError::NotTendable("right")),
        (None, None) => Err(DetachError::NotTendable("each")),
    }
}

/// Tendency from the one-sided detachments by summing vertex signs of the
/// intervals `I^s = [x, x − ð^s h]`, where `ð⁺ = f₊` and `ð⁻ = −f₋`.
/// Only sides whose detachment equals `f₊` contribute.
pub fn interval_vertex_tendency(x: f64, right: Sign, left: Sign) -> Sign {
    let h = x.abs().max(1.0);
    let vertex = |d: Sign| {
        let other = x - d.as_f64() * h;
        if other < x {
            1
        } else if other > x {
            -1
        } else {
            0
        }
    };
    let mut sum = vertex(right);
    if left == right {
        sum += vertex(left.flip());
    }
    Sign::from_i8(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Min,
    Max,
    Plateau,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub index: usize,
    pub x: f64,
    pub kind: ExtremumKind,
}

/// Interior samples whose monotony indicator is `{0}`.
pub fn find_extrema(f: &SampledFunction, cfg: &DetachConfig) -> Vec<Extremum> {
    let xs = f.xs();
    (1..xs.len().saturating_sub(1))
        .filter_map(|i| {
            let r = classify(f, xs[i], cfg).ok()?;
            let kind = match r.vector.bits() {
                [1, 0, 0, 1, 0, 0] => ExtremumKind::Min,
                [0, 0, 1, 0, 0, 1] => ExtremumKind::Max,
                [0, 0, 0, 0, 0, 0] => ExtremumKind::Plateau,
                _ => return None,
            };
            Some(Extremum {
                index: i,
                x: xs[i],
                kind,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointType {
    None,
    First,
    Second,
    Third,
}

/// Derivative at `x0` of the parabola through three samples.
fn slope3(x0: f64, y0: f64, x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    y0 * (2.0 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (x0 - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (x0 - x1) / ((x2 - x0) * (x2 - x1))
}

/// Joint type of an interior sample. One-sided slopes use second-order
/// stencils where two neighbours exist; agreeing slopes mean no joint.
pub fn classify_joint(
    f: &SampledFunction,
    x: f64,
    cfg: &DetachConfig,
) -> Result<JointType, DetachError> {
    let (xs, ys) = (f.xs(), f.ys());
    let i = f.index_of(x)?;
    if i == 0 || i + 1 == xs.len() {
        return Err(DetachError::Boundary(i));
    }
    let left = if i >= 2 {
        slope3(xs[i], ys[i], xs[i - 1], ys[i - 1], xs[i - 2], ys[i - 2])
    } else {
        (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])
    };
    let right = if i + 2 < xs.len() {
        slope3(xs[i], ys[i], xs[i + 1], ys[i + 1], xs[i + 2], ys[i + 2])
    } else {
        (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
    };
    if (left - right).abs() <= cfg.slope_tol * left.abs().max(right.abs()).max(1.0) {
        return Ok(JointType::None);
    }
    let r = classify(f, xs[i], cfg)?;
    let (fp, fm) = (r.sup_plus, r.sup_minus);
    Ok(if fp == fm {
        JointType::First
    } else if fp.times(fm) != Sign::Zero {
        JointType::Second
    } else {
        JointType::Third
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoContinuity {
    pub left: bool,
    pub right: bool,
    pub left_limit: Option<f64>,
    pub right_limit: Option<f64>,
}

fn side_limit<P: ProbeFunction + ?Sized>(
    f: &P,
    x: f64,
    side: Side,
    cfg: &DetachConfig,
) -> Option<f64> {
    let fams = families(f, x, side, cfg).ok()?;
    let run = match f.tail() {
        Tail::Half => cfg.window.k_min,
        Tail::Nearest => 1,
    };
    let limits: Vec<f64> = fams
        .iter()
        .map(|fam| windowed_limit(&fam.values, run, &cfg.window))
        .collect::<Option<_>>()?;
    let first = limits[0];
    let tol = 1.0 / cfg.window.m_max as f64;
    limits
        .iter()
        .all(|l| (l - first).abs() < tol)
        .then_some(first)
}

/// Whether `lim f(x+h)` exists from each side, every family agreeing.
pub fn is_pseudo_continuous<P: ProbeFunction + ?Sized>(
    f: &P,
    x: f64,
    cfg: &DetachConfig,
) -> PseudoContinuity {
    let left_limit = side_limit(f, x, Side::Left, cfg);
    let right_limit = side_limit(f, x, Side::Right, cfg);
    PseudoContinuity {
        left: left_limit.is_some(),
        right: right_limit.is_some(),
        left_limit,
        right_limit,
    }
}

/// Endpoint of an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Unbounded,
    Open(f64),
    Closed(f64),
}

impl Bound {
    fn value(self, unbounded: f64) -> f64 {
        match self {
            Bound::Unbounded => unbounded,
            Bound::Open(v) | Bound::Closed(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        let above = match self.lo {
            Bound::Unbounded => true,
            Bound::Open(a) => v > a,
            Bound::Closed(a) => v >= a,
        };
        let below = match self.hi {
            Bound::Unbounded => true,
            Bound::Open(b) => v < b,
            Bound::Closed(b) => v <= b,
        };
        above && below
    }

    fn is_empty(&self) -> bool {
        let (a, b) = (
            self.lo.value(f64::NEG_INFINITY),
            self.hi.value(f64::INFINITY),
        );
        a > b || (a == b && !matches!((self.lo, self.hi), (Bound::Closed(_), Bound::Closed(_))))
    }
}

/// Disjoint intervals covering the real line, each carrying a scalar `r_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    parts: Vec<(Interval, f64)>,
}

impl Partition {
    pub fn new(mut parts: Vec<(Interval, f64)>) -> Result<Self, DetachError> {
        if parts.is_empty() {
            return Err(DetachError::NonCovering);
        }
        if parts.iter().any(|(i, _)| i.is_empty()) {
            return Err(DetachError::NonCovering);
        }
        let key = |i: &Interval| {
            (
                i.lo.value(f64::NEG_INFINITY),
                matches!(i.lo, Bound::Open(_)),
            )
        };
        parts.sort_by(|a, b| {
            let (ka, kb) = (key(&a.0), key(&b.0));
            ka.0.total_cmp(&kb.0).then(ka.1.cmp(&kb.1))
        });
        if parts[0].0.lo != Bound::Unbounded || parts[parts.len() - 1].0.hi != Bound::Unbounded {
            return Err(DetachError::NonCovering);
        }
        for w in parts.windows(2) {
            let (prev, next) = (w[0].0.hi, w[1].0.lo);
            match (prev, next) {
                (Bound::Unbounded, _) | (_, Bound::Unbounded) => {
                    return Err(DetachError::Overlapping)
                }
                _ => {}
            }
            let (a, b) = (prev.value(0.0), next.value(0.0));
            if b < a {
                return Err(DetachError::Overlapping);
            }
            if b > a {
                return Err(DetachError::NonCovering);
            }
            match (prev, next) {
                (Bound::Closed(_), Bound::Closed(_)) => return Err(DetachError::Overlapping),
                (Bound::Open(_), Bound::Open(_)) => return Err(DetachError::NonCovering),
                _ => {}
            }
        }
        Ok(Self { parts })
    }

    /// `(−∞,0) ↦ −1`, `{0} ↦ 0`, `(0,∞) ↦ +1`: recovers the plain detachment.
    pub fn standard() -> Self {
        Self::band(0.0, [-1.0, 0.0, 1.0]).expect("valid partition")
    }

    /// `(−∞,−ε)`, `[−ε,ε]`, `(ε,∞)` with the given scalars.
    pub fn band(eps: f64, r: [f64; 3]) -> Result<Self, DetachError> {
        Self::new(alloc::vec![
            (
                Interval {
                    lo: Bound::Unbounded,
                    hi: Bound::Open(-eps)
                },
                r[0]
            ),
            (
                Interval {
                    lo: Bound::Closed(-eps),
                    hi: Bound::Closed(eps)
                },
                r[1]
            ),
            (
                Interval {
                    lo: Bound::Open(eps),
                    hi: Bound::Unbounded
                },
                r[2]
            ),
        ])
    }

    pub fn parts(&self) -> &[(Interval, f64)] {
        &self.parts
    }

    pub fn value_of(&self, v: f64) -> Result<f64, DetachError> {
        if v.is_nan() {
            return Err(DetachError::NaN);
        }
        Ok(self
            .parts
            .iter()
            .find(|(i, _)| i.contains(v))
            .map(|(_, r)| *r)
            .expect("partition covers ℝ"))
    }
}

/// Stabilized `χ_A[f(x+h) − f(x)]` from one side; every family must settle
/// on the same scalar.
pub fn generalized_detachment<P: ProbeFunction + ?Sized>(
    f: &P,
    x: f64,
    partition: &Partition,
    side: Side,
    cfg: &DetachConfig,
) -> Result<f64, DetachError> {
    let fams = families(f, x, side, cfg)?;
    let fx = f.eval(x)?;
    let mut histogram = SignHistogram::default();
    let mut found: Option<f64> = None;
    let mut stable = true;
    for fam in &fams {
        let seq = fam
            .values
            .iter()
            .map(|v| {
                histogram.record(sign(v - fx, cfg.zero_band)?);
                partition.value_of(v - fx)
            })
            .collect::<Result<Vec<_>, _>>()?;
        match stabilize(&seq, f.tail(), &cfg.window)?.as_slice() {
            [r] if found.is_none_or(|p| p == *r) => found = Some(*r),
            _ => stable = false,
        }
    }
    match found {
        Some(r) if stable => Ok(r),
        _ => Err(DetachError::Unstable { side, histogram }),
    }
}
