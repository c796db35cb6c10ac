//! Seeded generators for oracle runs.

use std::collections::{BTreeMap, BTreeSet};

use dint_core::detach::SampledFunction;
use dint_core::green::Vertex;
use dint_core::grid::{GridField, LatticeBox};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Cells = BTreeSet<[usize; 2]>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int_field(rng: &mut ChaCha8Rng, extents: &[usize], lo: i64, hi: i64) -> GridField<i64> {
    GridField::from_fn(extents.to_vec(), |_| rng.random_range(lo..=hi)).expect("valid extents")
}

/// A box whose lower corner is not below `origin`.
pub fn box_above(rng: &mut ChaCha8Rng, extents: &[usize], origin: &[usize]) -> LatticeBox {
    let (lo, hi) = extents
        .iter()
        .zip(origin)
        .map(|(&e, &o)| {
            let a = rng.random_range(o..e);
            let b = rng.random_range(o..e);
            (a.min(b), a.max(b))
        })
        .unzip();
    LatticeBox::new(lo, hi).expect("ordered corners")
}

/// Up to `max` random planar boxes inside `extents`.
pub fn planar_boxes(rng: &mut ChaCha8Rng, extents: [usize; 2], max: usize) -> Vec<LatticeBox> {
    (0..rng.random_range(0..=max))
        .map(|_| {
            let lo = [
                rng.random_range(0..extents[0]),
                rng.random_range(0..extents[1]),
            ];
            let hi = [
                rng.random_range(lo[0]..extents[0]),
                rng.random_range(lo[1]..extents[1]),
            ];
            LatticeBox::new(lo.to_vec(), hi.to_vec()).expect("ordered corners")
        })
        .collect()
}

/// Cells of `count` random boxes whose lower corners are at least `margin`.
pub fn random_cells(
    rng: &mut ChaCha8Rng,
    extents: [usize; 2],
    count: usize,
    margin: usize,
    span: usize,
) -> Cells {
    let mut cells = BTreeSet::new();
    for _ in 0..count {
        let a = rng.random_range(margin..extents[0]);
        let b = rng.random_range(margin..extents[1]);
        let c = (a + rng.random_range(0..span)).min(extents[0] - 1);
        let d = (b + rng.random_range(0..span)).min(extents[1] - 1);
        for i in a..=c {
            for j in b..=d {
                cells.insert([i, j]);
            }
        }
    }
    cells
}

/// Counter-clockwise boundary of a cell set when it is a single simple loop.
pub fn trace(cells: &Cells) -> Option<Vec<Vertex>> {
    let has = |i: isize, j: isize| i >= 0 && j >= 0 && cells.contains(&[i as usize, j as usize]);
    let mut next: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for &[i, j] in cells {
        let (si, sj) = (i as isize, j as isize);
        let edges = [
            ([i, j], [i + 1, j], has(si, sj - 1)),
            ([i + 1, j], [i + 1, j + 1], has(si + 1, sj)),
            ([i + 1, j + 1], [i, j + 1], has(si, sj + 1)),
            ([i, j + 1], [i, j], has(si - 1, sj)),
        ];
        for (a, b, shared) in edges {
            if !shared && next.insert(a, b).is_some() {
                return None;
            }
        }
    }
    let start = *next.keys().next()?;
    let mut lp = vec![start];
    let mut v = next[&start];
    while v != start {
        lp.push(v);
        v = *next.get(&v)?;
        if lp.len() > next.len() {
            return None;
        }
    }
    if lp.len() != next.len() {
        return None;
    }
    lp.push(start);
    Some(lp)
}

/// A random simple loop and the cells it encloses. A set bounded by one
/// loop has no holes, so the cells are exactly the interior.
pub fn random_loop(
    rng: &mut ChaCha8Rng,
    extents: [usize; 2],
    margin: usize,
) -> (Cells, Vec<Vertex>) {
    loop {
        let count = rng.random_range(1..=6);
        let cells = random_cells(rng, extents, count, margin, 10);
        if let Some(lp) = trace(&cells) {
            return (cells, lp);
        }
    }
}

/// Quarter turn on an `h`-row grid: vertex `(i, j) → (j, h − i)`.
pub fn rotate_vertex(v: Vertex, h: usize) -> Vertex {
    [v[1], h - v[0]]
}

/// Quarter turn of a cell: `(i, j) → (j, h − 1 − i)`.
pub fn rotate_cells(cells: &Cells, h: usize) -> Cells {
    cells.iter().map(|c| [c[1], h - 1 - c[0]]).collect()
}

pub fn rotate_field(f: &GridField<i64>) -> GridField<i64> {
    let [h, w] = [f.extents()[0], f.extents()[1]];
    GridField::from_fn(vec![w, h], |idx| f.get(&[h - 1 - idx[1], idx[0]]).unwrap()).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Walk,
    Smooth,
    Stairs,
    Slides,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::Walk, Shape::Smooth, Shape::Stairs, Shape::Slides];

    pub fn of_seed(seed: u64) -> Self {
        Self::ALL[(seed % 4) as usize]
    }

    /// No plateaus and no jumps.
    pub fn is_continuous(self) -> bool {
        matches!(self, Shape::Walk | Shape::Smooth)
    }
}

pub fn walk(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut y = 0.0;
    (0..n)
        .map(|_| {
            y += rng.random_range(-1.0..1.0);
            y
        })
        .collect()
}

/// `Σ a_k sin(k t + φ_k)` for `k ≤ 4`, sampled densely over one period.
pub fn smooth(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let terms: Vec<(f64, f64)> = (1..=4)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.0..6.3)))
        .collect();
    let m = n.max(400);
    (0..n)
        .map(|i| {
            let t = i as f64 / m as f64 * std::f64::consts::TAU;
            terms
                .iter()
                .enumerate()
                .map(|(k, (a, p))| a * ((k + 1) as f64 * t + p).sin())
                .sum()
        })
        .collect()
}

fn stairs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut y = 0.0;
    (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                y += f64::from(rng.random_range(-3i32..=3));
            }
            y
        })
        .collect()
}

fn slides(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let (mut y, mut slope) = (0.0, 1.0);
    (0..n)
        .map(|_| {
            if rng.random_bool(0.1) {
                slope = rng.random_range(-2.0..2.0);
                y += rng.random_range(-1.0..1.0);
            }
            y += slope * 0.1;
            y
        })
        .collect()
}

/// 20 to 199 samples on `0, 0.1, 0.2, …`.
pub fn sampled(shape: Shape, seed: u64) -> SampledFunction {
    let mut rng = rng(seed);
    let n = rng.random_range(20..200);
    let xs = (0..n).map(|k| k as f64 * 0.1).collect();
    let ys = match shape {
        Shape::Walk => walk(&mut rng, n),
        Shape::Smooth => smooth(&mut rng, n),
        Shape::Stairs => stairs(&mut rng, n),
        Shape::Slides => slides(&mut rng, n),
    };
    SampledFunction::new(xs, ys).expect("increasing abscissae")
}

/// A random walk of `n` points on `0, 1, 2, …`.
pub fn walk_samples(seed: u64, n: usize) -> SampledFunction {
    let ys = walk(&mut rng(seed), n);
    SampledFunction::new((0..n).map(|k| k as f64).collect(), ys).expect("increasing abscissae")
}
