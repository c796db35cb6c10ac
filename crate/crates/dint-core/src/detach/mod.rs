//! Detachment calculus: sign limits of increments, disdetachment types,
//! tendency and monotony indicators.
//!
//! Limits are never symbolic. Every operator observes `f(x + h_k) − f(x)`
//! along the probe families of a [`ProbeFunction`] and stabilizes the signs
//! with [`approx_partial_limits`].

mod classify;
pub mod fixtures;
mod limits;
mod probe;

use core::fmt;

use thiserror::Error;

pub use classify::{
    classify, classify_joint, find_extrema, generalized_detachment, interval_vertex_tendency,
    is_pseudo_continuous, monotony_of, one_sided_sign_limits, tendency, types_of, Bound,
    DetachmentReport, Extremum, ExtremumKind, Interval, JointType, Monotony, Partition,
    PseudoContinuity, SignLimits, TendencyVector,
};
pub use limits::{approx_partial_limits, sign, windowed_limit, Sign, Window};
pub use probe::{
    geometric_offsets, Family, FnProbe, Incremented, ProbeFunction, Product, SampledFunction,
    Scaled, Tail,
};

/// Approach side of a one-sided limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `h → 0⁻`
    Left,
    /// `h → 0⁺`
    Right,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Left and right sign values at one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignPair {
    pub left: Sign,
    pub right: Sign,
}

impl SignPair {
    /// `0` when both sides agree, otherwise the right value.
    pub fn tendency(&self) -> Sign {
        if self.left == self.right {
            Sign::Zero
        } else {
            self.right
        }
    }
}

/// Counts of raw signs seen before stabilization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SignHistogram {
    pub neg: usize,
    pub zero: usize,
    pub pos: usize,
}

impl SignHistogram {
    pub fn record(&mut self, s: Sign) {
        match s {
            Sign::Neg => self.neg += 1,
            Sign::Zero => self.zero += 1,
            Sign::Pos => self.pos += 1,
        }
    }
}

impl fmt::Display for SignHistogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-1:{} 0:{} +1:{}", self.neg, self.zero, self.pos)
    }
}

/// Tunables shared by the operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetachConfig {
    pub window: Window,
    /// `|r| ≤ zero_band` counts as a zero increment.
    pub zero_band: f64,
    /// Relative slope tolerance of [`classify_joint`].
    pub slope_tol: f64,
}

impl Default for DetachConfig {
    fn default() -> Self {
        Self {
            window: Window::default(),
            zero_band: 0.0,
            slope_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetachError {
    #[error("NaN in sign input")]
    NaN,
    #[error("invalid window: {0}")]
    InvalidWindow(&'static str),
    #[error("empty generator")]
    EmptySequence,
    #[error("generator yielded {got} terms, window needs {needed}")]
    TooFewTerms { needed: usize, got: usize },
    #[error("no probe families on the {0} side")]
    NoProbes(Side),
    #[error("offsets of family {0} are not strictly monotone toward 0")]
    BadFamily(&'static str),
    #[error("unstable probe on the {side} side (signs {histogram})")]
    Unstable {
        side: Side,
        histogram: SignHistogram,
    },
    #[error("not tendable: {0} side has no detachment")]
    NotTendable(&'static str),
    #[error("{0} is not a sample abscissa")]
    NotASample(f64),
    #[error("sample {0} is on the boundary")]
    Boundary(usize),
    #[error("invalid samples: {0}")]
    InvalidSamples(&'static str),
    #[error("inadmissible tendency vector")]
    Inadmissible,
    #[error("non-covering partition")]
    NonCovering,
    #[error("overlapping partition")]
    Overlapping,
    #[error("rational probe denominator exceeds {0}")]
    DenominatorBound(u64),
}
