#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dint_core::green::Vertex;
use dint_core::grid::{GridField, LatticeBox};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_field(rng: &mut ChaCha8Rng, extents: &[usize], lo: i64, hi: i64) -> GridField<i64> {
    GridField::from_fn(extents.to_vec(), |_| rng.random_range(lo..=hi)).unwrap()
}

pub fn random_box(rng: &mut ChaCha8Rng, extents: &[usize], origin: &[usize]) -> LatticeBox {
    let (lo, hi): (Vec<_>, Vec<_>) = extents
        .iter()
        .zip(origin)
        .map(|(&e, &o)| {
            let a = rng.random_range(o..e);
            let b = rng.random_range(o..e);
            (a.min(b), a.max(b))
        })
        .unzip();
    LatticeBox::new(lo, hi).unwrap()
}

/// Cells of `count` random boxes with lower corners at least `margin`.
pub fn random_cells(
    rng: &mut ChaCha8Rng,
    extents: [usize; 2],
    count: usize,
    margin: usize,
    span: usize,
) -> BTreeSet<[usize; 2]> {
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

/// Counter-clockwise boundary of a cell set, when it is one simple loop.
pub fn trace(cells: &BTreeSet<[usize; 2]>) -> Option<Vec<Vertex>> {
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

/// A random simple loop and the cells it encloses.
pub fn random_loop(
    rng: &mut ChaCha8Rng,
    extents: [usize; 2],
    margin: usize,
) -> (BTreeSet<[usize; 2]>, Vec<Vertex>) {
    loop {
        let count = rng.random_range(1..=6);
        let cells = random_cells(rng, extents, count, margin, 10);
        if let Some(lp) = trace(&cells) {
            return (cells, lp);
        }
    }
}

/// Quarter turn: vertex `(i, j)` goes to `(j, h − i)`, cell `(i, j)` to `(j, h − 1 − i)`.
pub fn rotate_vertex(v: Vertex, h: usize) -> Vertex {
    [v[1], h - v[0]]
}

pub fn rotate_field(f: &GridField<i64>) -> GridField<i64> {
    let [h, w] = [f.extents()[0], f.extents()[1]];
    GridField::from_fn(vec![w, h], |idx| f.get(&[h - 1 - idx[1], idx[0]]).unwrap()).unwrap()
}

pub fn rotate_cells(cells: &BTreeSet<[usize; 2]>, h: usize) -> BTreeSet<[usize; 2]> {
    cells.iter().map(|c| [c[1], h - 1 - c[0]]).collect()
}
