//! Probe functions and the offset families they expose.

use alloc::vec::Vec;

use super::{DetachError, Side};

/// Largest probe offset, relative to `max(1, |x|)`.
const H_MAX: f64 = 1.0 / 64.0;
/// Smallest probe offset, relative to `max(1, |x|)`.
const H_MIN: f64 = 1.0 / 1_048_576.0;

/// One offset sequence `h_k → 0` and the values `f(x + h_k)` along it.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub tag: &'static str,
    pub offsets: Vec<f64>,
    pub values: Vec<f64>,
}

impl Family {
    pub fn sample(tag: &'static str, x: f64, offsets: Vec<f64>, f: impl Fn(f64) -> f64) -> Self {
        let values = offsets.iter().map(|h| f(x + h)).collect();
        Self {
            tag,
            offsets,
            values,
        }
    }

    /// Offsets strictly monotone toward 0 from the given side.
    pub fn check(&self, side: Side) -> Result<(), DetachError> {
        let ok = self.offsets.len() == self.values.len()
            && self.offsets.iter().all(|h| h * side.sign() > 0.0)
            && self.offsets.windows(2).all(|w| w[1].abs() < w[0].abs());
        if ok {
            Ok(())
        } else {
            Err(DetachError::BadFamily(self.tag))
        }
    }
}

/// How much of a family's sign sequence decides its stabilized value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// Partial limits of the second half of the sequence.
    Half,
    /// The term nearest to `x` alone. Used when probes are finite samples.
    Nearest,
}

/// A function observed through tagged offset families.
pub trait ProbeFunction {
    fn eval(&self, x: f64) -> Result<f64, DetachError>;

    /// Families approaching `x` from `side`; `terms` is the preferred length.
    fn probe_families(&self, x: f64, side: Side, terms: usize) -> Result<Vec<Family>, DetachError>;

    fn tail(&self) -> Tail {
        Tail::Half
    }

    /// `x` is the right end of the support, so only left probes exist.
    fn is_right_end(&self, _x: f64) -> Result<bool, DetachError> {
        Ok(false)
    }
}

impl<P: ProbeFunction + ?Sized> ProbeFunction for &P {
    fn eval(&self, x: f64) -> Result<f64, DetachError> {
        (**self).eval(x)
    }
    fn probe_families(&self, x: f64, side: Side, terms: usize) -> Result<Vec<Family>, DetachError> {
        (**self).probe_families(x, side, terms)
    }
    fn tail(&self) -> Tail {
        (**self).tail()
    }
    fn is_right_end(&self, x: f64) -> Result<bool, DetachError> {
        (**self).is_right_end(x)
    }
}

/// Geometric offsets from `2^-6` down to `2^-20` (times `max(1, |x|)`),
/// signed by `side` and ordered toward 0.
pub fn geometric_offsets(x: f64, side: Side, n: usize) -> Vec<f64> {
    let scale = side.sign() * x.abs().max(1.0) * H_MAX;
    if n <= 1 {
        return (0..n).map(|_| scale).collect();
    }
    let step = libm::log(H_MIN / H_MAX) / (n - 1) as f64;
    (0..n).map(|k| scale * libm::exp(step * k as f64)).collect()
}

/// A plain closure probed along one geometric family.
pub struct FnProbe<F> {
    f: F,
}

impl<F: Fn(f64) -> f64> FnProbe<F> {
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<F: Fn(f64) -> f64> ProbeFunction for FnProbe<F> {
    fn eval(&self, x: f64) -> Result<f64, DetachError> {
        Ok((self.f)(x))
    }

    fn probe_families(&self, x: f64, side: Side, terms: usize) -> Result<Vec<Family>, DetachError> {
        Ok(alloc::vec![Family::sample(
            "uniform",
            x,
            geometric_offsets(x, side, terms),
            &self.f
        )])
    }
}

/// `c · f`.
pub struct Scaled<P> {
    pub inner: P,
    pub c: f64,
}

impl<P: ProbeFunction> ProbeFunction for Scaled<P> {
    fn eval(&self, x: f64) -> Result<f64, DetachError> {
        Ok(self.c * self.inner.eval(x)?)
    }

    fn probe_families(&self, x: f64, side: Side, terms: usize) -> Result<Vec<Family>, DetachError> {
        let mut fams = self.inner.probe_families(x, side, terms)?;
        for fam in &mut fams {
            fam.values.iter_mut().for_each(|v| *v *= self.c);
        }
        Ok(fams)
    }

    fn tail(&self) -> Tail {
        self.inner.tail()
    }

    fn is_right_end(&self, x: f64) -> Result<bool, DetachError> {
        self.inner.is_right_end(x)
    }
}

/// `f · g`. Both factors must expose the same offsets family by family.
pub struct Product<P, Q> {
    pub f: P,
    pub g: Q,
}

impl<P: ProbeFunction, Q: ProbeFunction> ProbeFunction for Product<P, Q> {
    fn eval(&self, x: f64) -> Result<f64, DetachError> {
        Ok(self.f.eval(x)? * self.g.eval(x)?)
    }

    fn probe_families(&self, x: f64, side: Side, terms: usize) -> Result<Vec<Family>, DetachError> {
        let fs = self.f.probe_families(x, side, terms)?;
        let gs = self.g.probe_families(x, side, terms)?;
        if fs.len() != gs.len() {
            return Err(DetachError::BadFamily("product"));
        }
        fs.into_iter()
            .zip(gs)
            .map(|(mut a, b)| {
                if a.offsets != b.offsets {
                    return Err(DetachError::BadFamily(a.tag));
                }
                a.values
                    .iter_mut()
                    .zip(&b.values)
                    .for_each(|(u, v)| *u *= v);
                Ok(a)
            })
            .collect()
    }

    fn tail(&self) -> Tail {
        self.f.tail()
    }
}

/// The `a`-incremented function `t ↦ f(t) + f(a)`.
pub struct Incremented<P> {
    pub inner: P,
    pub at: f64,
}

impl<P: ProbeFunction> ProbeFunction for Incremented<P> {
    fn eval(&self, x: f64) -> Result<f64, DetachError> {
        Ok(self.inner.eval(x)? + self.inner.eval(self.at)?)
    }

    fn probe_families(&self, x: f64, side: Side, terms: usize) -> Result<Vec<Family>, DetachError> {
        let shift = self.inner.eval(self.at)?;
        let mut fams = self.inner.probe_families(x, side, terms)?;
        for fam in &mut fams {
            fam.values.iter_mut().for_each(|v| *v += shift);
        }
        Ok(fams)
    }

    fn tail(&self) -> Tail {
        self.inner.tail()
    }
}

/// Samples `(x_i, y_i)` with strictly increasing abscissae.
///
/// Probes at a sample use its `k` nearest neighbours on each side as one
/// family, ordered toward the sample. Only the nearest neighbour decides the
/// sign, so resolution is limited by the sampling step.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    xs: Vec<f64>,
    ys: Vec<f64>,
    neighbors: usize,
}

impl SampledFunction {
    pub const DEFAULT_NEIGHBORS: usize = 16;

    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, DetachError> {
        if xs.len() != ys.len() {
            return Err(DetachError::InvalidSamples("xs and ys differ in length"));
        }
        if xs.len() < 2 {
            return Err(DetachError::InvalidSamples("need at least 2 samples"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(DetachError::InvalidSamples("non-finite sample"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DetachError::InvalidSamples("xs not strictly increasing"));
        }
        Ok(Self {
            xs,
            ys,
            neighbors: Self::DEFAULT_NEIGHBORS,
        })
    }

    pub fn from_fn(xs: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self, DetachError> {
        let ys = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, ys)
    }

    pub fn with_neighbors(mut self, k: usize) -> Self {
        self.neighbors = k.max(1);
        self
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Index of the sample at `x`, within `1e-9 · max(1, |x|)`.
    pub fn index_of(&self, x: f64) -> Result<usize, DetachError> {
        let i = self.xs.partition_point(|&v| v < x);
        let tol = 1e-9 * x.abs().max(1.0);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < self.xs.len() && (self.xs[j] - x).abs() <= tol)
            .min_by(|&a, &b| (self.xs[a] - x).abs().total_cmp(&(self.xs[b] - x).abs()))
            .ok_or(DetachError::NotASample(x))
    }
}

impl ProbeFunction for SampledFunction {
    fn eval(&self, x: f64) -> Result<f64, DetachError> {
        Ok(self.ys[self.index_of(x)?])
    }

    fn probe_families(
        &self,
        x: f64,
        side: Side,
        _terms: usize,
    ) -> Result<Vec<Family>, DetachError> {
        let i = self.index_of(x)?;
        let x0 = self.xs[i];
        let idx: Vec<usize> = match side {
            Side::Left => (i.saturating_sub(self.neighbors)..i).collect(),
            Side::Right => (i + 1..(i + 1 + self.neighbors).min(self.len()))
                .rev()
                .collect(),
        };
        if idx.is_empty() {
            return Ok(Vec::new());
        }
        Ok(alloc::vec![Family {
            tag: "nearest",
            offsets: idx.iter().map(|&j| self.xs[j] - x0).collect(),
            values: idx.iter().map(|&j| self.ys[j]).collect(),
        }])
    }

    fn tail(&self) -> Tail {
        Tail::Nearest
    }

    fn is_right_end(&self, x: f64) -> Result<bool, DetachError> {
        Ok(self.index_of(x)? + 1 == self.len())
    }
}
