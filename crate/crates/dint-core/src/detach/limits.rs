//! Signs and windowed partial limits.

use alloc::vec::Vec;
use core::fmt;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::DetachError;

/// Value of the sign operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(i8)]
pub enum Sign {
    Neg = -1,
    Zero = 0,
    Pos = 1,
}

impl Sign {
    /// Maps any negative to `Neg` and any positive to `Pos`.
    pub fn from_i8(v: i8) -> Self {
        match v {
            0 => Sign::Zero,
            v if v > 0 => Sign::Pos,
            _ => Sign::Neg,
        }
    }

    pub fn as_i8(self) -> i8 {
        self as i8
    }

    pub fn as_f64(self) -> f64 {
        self as i8 as f64
    }

    pub fn flip(self) -> Self {
        Sign::from_i8(-self.as_i8())
    }

    pub fn times(self, other: Sign) -> Sign {
        Sign::from_i8(self.as_i8() * other.as_i8())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

/// sgn with a symmetric zero band: `|r| ≤ zero_band` maps to 0.
pub fn sign(r: f64, zero_band: f64) -> Result<Sign, DetachError> {
    if r.is_nan() {
        return Err(DetachError::NaN);
    }
    Ok(if r.abs() <= zero_band {
        Sign::Zero
    } else if r > 0.0 {
        Sign::Pos
    } else {
        Sign::Neg
    })
}

/// Window `(M_min, M_max, K_min, K_max)` of the approximated partial limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub m_min: u32,
    pub m_max: u32,
    pub k_min: usize,
    pub k_max: usize,
    /// When set, the window is a seeded random sub-sequence of a longer prefix.
    pub seed: Option<u64>,
}

impl Default for Window {
    fn default() -> Self {
        Self {
            m_min: 4,
            m_max: 64,
            k_min: 8,
            k_max: 128,
            seed: None,
        }
    }
}

impl Window {
    pub fn validate(&self) -> Result<(), DetachError> {
        if self.m_min >= self.m_max {
            return Err(DetachError::InvalidWindow("M_min must be below M_max"));
        }
        if self.k_min >= self.k_max {
            return Err(DetachError::InvalidWindow("K_min must be below K_max"));
        }
        if self.m_min == 0 {
            return Err(DetachError::InvalidWindow("M_min must be positive"));
        }
        Ok(())
    }

    /// Tightest tolerance `1/m` over `M_min < m < M_max`.
    fn tightest(&self) -> f64 {
        1.0 / (self.m_max - 1).max(self.m_min + 1) as f64
    }

    /// Prefix length consumed when sampling a sub-sequence.
    const SPAN: usize = 4;
}

/// Approximated partial limits of a sequence.
///
/// The observed window is the first `K_max` terms, or with a seed a random
/// order-preserving choice of `K_max` terms out of the first `4·K_max`.
/// Candidates are the observed values merged at resolution `1/M_max`; a
/// candidate `P` is kept when, for every integer `M_min < m < M_max`, more than
/// `K_min` window terms lie within `1/m` of it. Returned in ascending order.
pub fn approx_partial_limits(
    terms: impl IntoIterator<Item = f64>,
    window: &Window,
) -> Result<Vec<f64>, DetachError> {
    window.validate()?;
    let want = match window.seed {
        Some(_) => window.k_max * Window::SPAN,
        None => window.k_max,
    };
    let mut seen: Vec<f64> = terms.into_iter().take(want).collect();
    if seen.is_empty() {
        return Err(DetachError::EmptySequence);
    }
    if seen.len() < window.k_max {
        return Err(DetachError::TooFewTerms {
            needed: window.k_max,
            got: seen.len(),
        });
    }
    if seen.iter().any(|v| v.is_nan()) {
        return Err(DetachError::NaN);
    }
    if let Some(seed) = window.seed {
        if seen.len() > window.k_max {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picks = index::sample(&mut rng, seen.len(), window.k_max).into_vec();
            picks.sort_unstable();
            seen = picks.into_iter().map(|i| seen[i]).collect();
        }
    }

    let mut sorted = seen.clone();
    sorted.sort_by(f64::total_cmp);
    let resolution = 1.0 / window.m_max as f64;
    let mut candidates = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] - sorted[start] < resolution {
            end += 1;
        }
        candidates.push(sorted[start + (end - start - 1) / 2]);
        start = end;
    }

    let qualifies = |p: f64| {
        (window.m_min + 1..window.m_max).all(|m| {
            let tol = 1.0 / m as f64;
            seen.iter().filter(|a| (*a - p).abs() < tol).count() > window.k_min
        })
    };
    Ok(candidates.into_iter().filter(|&p| qualifies(p)).collect())
}

/// A windowed limit: the last `run` terms all within the tightest tolerance
/// `1/(M_max − 1)` of the final term. Returns that term.
pub fn windowed_limit(terms: &[f64], run: usize, window: &Window) -> Option<f64> {
    let run = run.max(1);
    if terms.len() < run || terms.iter().any(|v| v.is_nan()) {
        return None;
    }
    let last = *terms.last()?;
    let tol = window.tightest();
    terms[terms.len() - run..]
        .iter()
        .all(|a| (a - last).abs() < tol)
        .then_some(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn sign_basics() {
        assert_eq!(sign(3.7, 0.0).unwrap(), Sign::Pos);
        assert_eq!(sign(0.0, 0.0).unwrap(), Sign::Zero);
        assert_eq!(sign(-1e-12, 1e-9).unwrap(), Sign::Zero);
        assert_eq!(sign(-1e-12, 0.0).unwrap(), Sign::Neg);
        assert!(matches!(sign(f64::NAN, 0.0), Err(DetachError::NaN)));
    }

    #[test]
    fn alternating_sequence() {
        let w = Window::default();
        let p =
            approx_partial_limits((0..).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }), &w).unwrap();
        assert_eq!(p, vec![-1.0, 1.0]);
    }

    #[test]
    fn constant_sequence() {
        let p = approx_partial_limits(core::iter::repeat(2.5), &Window::default()).unwrap();
        assert_eq!(p, vec![2.5]);
    }

    #[test]
    fn straddling_window() {
        let n0 = 40;
        let seq = (0..).map(|n: usize| {
            if n < n0 {
                17.0
            } else if n.is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        });
        let p = approx_partial_limits(seq, &Window::default()).unwrap();
        assert_eq!(p, vec![-1.0, 1.0, 17.0]);
        // once the window is past N₀ the 17 drops out
        let late = (0..)
            .map(|n: usize| {
                if n < n0 {
                    17.0
                } else if n.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            })
            .skip(n0);
        assert_eq!(
            approx_partial_limits(late, &Window::default()).unwrap(),
            vec![-1.0, 1.0]
        );
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let w = Window {
            seed: Some(42),
            ..Window::default()
        };
        let seq = || (0..).map(|n| if n % 3 == 0 { 0.5 } else { -0.25 });
        let a = approx_partial_limits(seq(), &w).unwrap();
        let b = approx_partial_limits(seq(), &w).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, vec![-0.25, 0.5]);
    }

    #[test]
    fn errors() {
        let w = Window::default();
        assert!(matches!(
            approx_partial_limits(core::iter::empty(), &w),
            Err(DetachError::EmptySequence)
        ));
        assert!(matches!(
            approx_partial_limits(vec![1.0; 10], &w),
            Err(DetachError::TooFewTerms {
                needed: 128,
                got: 10
            })
        ));
        let bad = Window {
            m_min: 64,
            m_max: 4,
            ..w
        };
        assert!(matches!(
            approx_partial_limits(vec![1.0; 200], &bad),
            Err(DetachError::InvalidWindow(_))
        ));
    }

    #[test]
    fn limit_runs() {
        let w = Window::default();
        let conv: Vec<f64> = (1..=128).map(|k| 1.0 + 1.0 / (k * k) as f64).collect();
        assert!(windowed_limit(&conv, 8, &w).is_some());
        let osc: Vec<f64> = (0..128)
            .map(|k| if k % 2 == 0 { 0.0 } else { 1.0 })
            .collect();
        assert!(windowed_limit(&osc, 8, &w).is_none());
    }
}
