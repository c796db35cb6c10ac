//! Reference functions, including ones defined on dense subdomains.
//!
//! A dense subdomain such as the rationals cannot be sampled, so these
//! fixtures carry one tagged family per subdomain: approaching `x` through
//! that subdomain means evaluating its piece along the family's offsets.

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::probe::{geometric_offsets, Family, FnProbe, ProbeFunction};
use super::{DetachError, Side, TendencyVector};

type PieceFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function glued from pieces on disjoint, tagged subdomains.
pub struct Elaborated {
    pieces: Vec<PieceFn>,
    base: usize,
    left: Vec<(usize, &'static str)>,
    right: Vec<(usize, &'static str)>,
}

impl Elaborated {
    /// `base` is the piece whose subdomain holds the query point; `left` and
    /// `right` list the subdomains accumulating at it, as `(piece, tag)`.
    pub fn new(
        pieces: Vec<PieceFn>,
        base: usize,
        left: Vec<(usize, &'static str)>,
        right: Vec<(usize, &'static str)>,
    ) -> Self {
        Self {
            pieces,
            base,
            left,
            right,
        }
    }
}

impl ProbeFunction for Elaborated {
    fn eval(&self, x: f64) -> Result<f64, DetachError> {
        Ok((self.pieces[self.base])(x))
    }

    fn probe_families(&self, x: f64, side: Side, terms: usize) -> Result<Vec<Family>, DetachError> {
        let doms = match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        Ok(doms
            .iter()
            .map(|&(p, tag)| {
                Family::sample(tag, x, geometric_offsets(x, side, terms), &self.pieces[p])
            })
            .collect())
    }
}

/// Number class of a query point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Integer,
    /// Rational, and for three-class fixtures not an integer.
    Rational,
    Irrational,
}

fn dense_pair(base: Class, on_q: PieceFn, off_q: PieceFn) -> Elaborated {
    let doms = alloc::vec![(0, "rational"), (1, "irrational")];
    let base = usize::from(base == Class::Irrational);
    Elaborated::new(alloc::vec![on_q, off_q], base, doms.clone(), doms)
}

/// `1` on the rationals, `0` elsewhere.
pub fn dirichlet(base: Class) -> Elaborated {
    dense_pair(base, Box::new(|_| 1.0), Box::new(|_| 0.0))
}

/// `1/x` on the rationals, `−1/x` elsewhere.
pub fn reciprocal(base: Class) -> Elaborated {
    dense_pair(base, Box::new(|x| 1.0 / x), Box::new(|x| -1.0 / x))
}

/// `−ε/3` on the integers, `0` on the other rationals, `ε/3` on the
/// irrationals. Every increment stays inside `[−ε, ε]`.
pub fn three_level(eps: f64, base: Class) -> Elaborated {
    let pieces: Vec<PieceFn> = alloc::vec![
        Box::new(move |_| -eps / 3.0),
        Box::new(|_| 0.0),
        Box::new(move |_| eps / 3.0),
    ];
    let base = match base {
        Class::Integer => 0,
        Class::Rational => 1,
        Class::Irrational => 2,
    };
    let doms = alloc::vec![(1, "rational"), (2, "irrational")];
    Elaborated::new(pieces, base, doms.clone(), doms)
}

/// Subdomain tags for `count` active pieces on one side.
fn vane_tags(side: Side, count: usize) -> &'static [&'static str] {
    match (side, count) {
        (Side::Left, 1) => &["R-"],
        (Side::Left, 2) => &["sqrt2*Q-", "R- minus sqrt2*Q"],
        (Side::Left, _) => &["sqrt2*Q-", "sqrt3*Q-", "R- minus (sqrt2*Q, sqrt3*Q)"],
        (Side::Right, 1) => &["R+"],
        (Side::Right, 2) => &["sqrt2*Q+", "R+ minus sqrt2*Q"],
        (Side::Right, _) => &["sqrt2*Q+", "sqrt3*Q+", "R+ minus (sqrt2*Q, sqrt3*Q)"],
    }
}

/// Weather vane function for the tendency vector `v`.
///
/// Pieces are `−x, 0, +x` on the left and `+x, 0, −x` on the right. Each
/// active piece gets its own subdomain, so the probes at 0 reproduce `v`.
pub fn weather_vane(v: TendencyVector) -> Result<Elaborated, DetachError> {
    if !v.is_admissible() {
        return Err(DetachError::Inadmissible);
    }
    let pieces: Vec<PieceFn> = alloc::vec![
        Box::new(|x| -x),
        Box::new(|_| 0.0),
        Box::new(|x| x),
        Box::new(|x| x),
        Box::new(|_| 0.0),
        Box::new(|x| -x),
    ];
    let assign = |side: Side, range: core::ops::Range<usize>| {
        let active: Vec<usize> = range.filter(|&i| v.0[i]).collect();
        let tags = vane_tags(side, active.len());
        active
            .into_iter()
            .zip(tags.iter().copied())
            .collect::<Vec<_>>()
    };
    let left = assign(Side::Left, 0..3);
    let right = assign(Side::Right, 3..6);
    // every piece vanishes at 0, so any active one serves as the base
    let base = left[0].0;
    Ok(Elaborated::new(pieces, base, left, right))
}

/// Riemann's function `1/q` at `p/q`, `0` off the rationals, probed at a
/// rational point. The rational family walks `p/q ± 1/(q·m)` for
/// `m = 1, 2, …`, reducing each fraction exactly.
pub struct Riemann {
    p: i64,
    q: i64,
}

impl Riemann {
    /// Largest denominator the rational family may produce.
    pub const MAX_DENOMINATOR: u64 = 10_000;

    pub fn new(p: i64, q: i64) -> Result<Self, DetachError> {
        if q <= 0 {
            return Err(DetachError::InvalidSamples("denominator must be positive"));
        }
        let g = gcd(p.unsigned_abs(), q as u64) as i64;
        Ok(Self { p: p / g, q: q / g })
    }

    pub fn at(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl ProbeFunction for Riemann {
    fn eval(&self, x: f64) -> Result<f64, DetachError> {
        if (x - self.at()).abs() > 1e-12 * x.abs().max(1.0) {
            return Err(DetachError::NotASample(x));
        }
        Ok(1.0 / self.q as f64)
    }

    fn probe_families(&self, x: f64, side: Side, terms: usize) -> Result<Vec<Family>, DetachError> {
        self.eval(x)?;
        let q = self.q as u64;
        let top = q * terms as u64;
        if top > Self::MAX_DENOMINATOR {
            return Err(DetachError::DenominatorBound(Self::MAX_DENOMINATOR));
        }
        let s: i64 = if side == Side::Left { -1 } else { 1 };
        let ms = 1..=terms as i64;
        let offsets: Vec<f64> = ms.clone().map(|m| s as f64 / (self.q * m) as f64).collect();
        let values = ms
            .map(|m| {
                let den = (self.q * m) as u64;
                let num = (self.p * m + s).unsigned_abs();
                1.0 / (den / gcd(num, den)) as f64
            })
            .collect();
        let irrational = offsets.iter().map(|_| 0.0).collect();
        Ok(alloc::vec![
            Family {
                tag: "rational",
                offsets: offsets.clone(),
                values
            },
            Family {
                tag: "irrational",
                offsets,
                values: irrational
            },
        ])
    }
}

/// `1` on `[0, 1)`, `2` on `[1, 2]`.
pub fn step() -> FnProbe<fn(f64) -> f64> {
    FnProbe::new(|x| if x < 1.0 { 1.0 } else { 2.0 })
}

/// `x² sin(1/x)`, `0` at the origin.
pub fn oscillating() -> FnProbe<fn(f64) -> f64> {
    FnProbe::new(|x| {
        if x == 0.0 {
            0.0
        } else {
            x * x * libm::sin(1.0 / x)
        }
    })
}

/// `|sin(1/x)|`, `0` at the origin.
pub fn abs_sin_recip() -> FnProbe<fn(f64) -> f64> {
    FnProbe::new(|x| {
        if x == 0.0 {
            0.0
        } else {
            libm::fabs(libm::sin(1.0 / x))
        }
    })
}
