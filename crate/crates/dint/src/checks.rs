//! Oracle runs shared by the acceptance suite and `dint selftest`.
//!
//! Each check returns `Ok(detail)` or `Err(first failure)`. Details never
//! contain timings, so seeded runs print identical text.

use std::collections::{BTreeMap, BTreeSet};

use dint_core::detach::fixtures::{dirichlet, oscillating, step, weather_vane, Class};
use dint_core::detach::{
    classify, find_extrema, one_sided_sign_limits, tendency, DetachConfig, ExtremumKind, FnProbe,
    ProbeFunction, SampledFunction, Scaled, Side, Sign, TendencyVector,
};
use dint_core::green::{
    alpha_of_pattern, corner_patterns, integrate_corners, Corner, CornerMap, RectilinearDomain,
};
use dint_core::grid::{cell_sum, naive_box_sum, GridField, LatticeBox};
use dint_core::sat::{detach_of_antiderivative, SummedAreaTable};
use dint_core::slant::{closed_curve_integral, decompose, slanted_integral_doubled, LatticeCurve};
use rand::Rng;

use crate::bench::{self, CostReport};
use crate::gen::{self, Shape};
use crate::io::{self, Field, Table};

pub type Verdict = Result<String, String>;

/// Case counts per check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    pub sat_cases: usize,
    pub green_cases: usize,
    pub loops: usize,
    pub functions: usize,
    pub repetitions: usize,
}

impl Scale {
    pub const FULL: Scale = Scale {
        sat_cases: 200,
        green_cases: 300,
        loops: 200,
        functions: 1000,
        repetitions: 200,
    };
    pub const REDUCED: Scale = Scale {
        sat_cases: 25,
        green_cases: 40,
        loops: 20,
        functions: 40,
        repetitions: 100,
    };
}

/// Deliberate defects for exercising the checks themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Zeroes the coefficient of every convex corner with only the
    /// `(−,−)` cell occupied.
    CorruptAlpha,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn sat_oracle(cases: usize, seed: u64) -> Verdict {
    for ndim in 1..=4 {
        let mut rng = gen::rng(seed.wrapping_mul(31).wrapping_add(ndim as u64));
        for case in 0..cases {
            let extents: Vec<usize> = (0..ndim).map(|_| rng.random_range(1..=8)).collect();
            let field = gen::int_field(&mut rng, &extents, -1_000_000, 1_000_000);
            let origin: Vec<usize> = extents.iter().map(|&e| rng.random_range(0..e)).collect();
            let b = gen::box_above(&mut rng, &extents, &origin);
            let sat = SummedAreaTable::build(&field, &origin).map_err(fail)?;
            let got = sat.box_query(&b).map_err(fail)?;
            let want = naive_box_sum(&field, &b).map_err(fail)?;
            ensure(got == want, || {
                format!("ndim {ndim} case {case}: table {got}, naive {want}")
            })?;
        }
    }
    Ok(format!(
        "{} queries over ndim 1..=4, 0 mismatches",
        4 * cases
    ))
}

/// Coefficient of each cumulative cell in a query, read off one-hot tables.
fn coefficients(extents: &[usize], b: &LatticeBox) -> Result<BTreeMap<Vec<usize>, i64>, String> {
    let len: usize = extents.iter().product();
    let mut out = BTreeMap::new();
    for k in 0..len {
        let mut cum = vec![0i64; len];
        cum[k] = 1;
        let sat = SummedAreaTable::from_cumulative(extents.to_vec(), vec![0; extents.len()], cum)
            .map_err(fail)?;
        let c = sat.box_query(b).map_err(fail)?;
        if c != 0 {
            let mut idx = vec![0; extents.len()];
            let mut rest = k;
            for axis in (0..extents.len()).rev() {
                idx[axis] = rest % extents[axis];
                rest /= extents[axis];
            }
            out.insert(idx, c);
        }
    }
    Ok(out)
}

/// Same terms as captured by `corner_terms` on a table of ones.
fn captured(extents: &[usize], b: &LatticeBox) -> Result<BTreeMap<Vec<usize>, i64>, String> {
    let ones = GridField::filled(extents.to_vec(), 1i64).map_err(fail)?;
    let sat = SummedAreaTable::build(&ones, &vec![0; extents.len()]).map_err(fail)?;
    sat.corner_terms(b)
        .map_err(fail)?
        .into_iter()
        .map(|t| {
            ensure(!t.clamped, || format!("corner {:?} clamped", t.corner))?;
            Ok((
                t.corner.iter().map(|&c| c as usize).collect(),
                i64::from(t.sign),
            ))
        })
        .collect()
}

pub fn formula_shape() -> Verdict {
    // box (a, b] × (c, d]
    let (a, b, c, d) = (1, 4, 2, 6);
    let planar = LatticeBox::new(vec![a + 1, c + 1], vec![b, d]).map_err(fail)?;
    let want: BTreeMap<_, _> = [
        (vec![b, d], 1),
        (vec![a, c], 1),
        (vec![a, d], -1),
        (vec![b, c], -1),
    ]
    .into_iter()
    .collect();
    let got = coefficients(&[6, 8], &planar)?;
    ensure(got == want, || format!("2-D terms {got:?}"))?;
    ensure(captured(&[6, 8], &planar)? == want, || {
        "2-D captured terms differ".into()
    })?;

    let (a, b, c, d, e, f) = (0, 3, 1, 2, 2, 4);
    let solid = LatticeBox::new(vec![a + 1, c + 1, e + 1], vec![b, d, f]).map_err(fail)?;
    let want: BTreeMap<_, _> = [
        (vec![b, d, f], 1),
        (vec![b, d, e], -1),
        (vec![b, c, f], -1),
        (vec![b, c, e], 1),
        (vec![a, d, f], -1),
        (vec![a, c, f], 1),
        (vec![a, d, e], 1),
        (vec![a, c, e], -1),
    ]
    .into_iter()
    .collect();
    let got = coefficients(&[5, 4, 6], &solid)?;
    ensure(got == want, || format!("3-D terms {got:?}"))?;
    ensure(captured(&[5, 4, 6], &solid)? == want, || {
        "3-D captured terms differ".into()
    })?;
    Ok("2-D: 4 terms, 3-D: 8 terms, signs match".into())
}

fn corner_map(d: &RectilinearDomain, fault: Fault) -> CornerMap {
    match fault {
        Fault::None => d.corners().clone(),
        Fault::CorruptAlpha => {
            let entries = d
                .corners()
                .entries()
                .iter()
                .map(|&c| {
                    if c.pattern == 0b0001 {
                        Corner { alpha: 0, ..c }
                    } else {
                        c
                    }
                })
                .collect();
            CornerMap::from_entries(d.extents(), entries)
        }
    }
}

pub fn green_unions(cases: usize, seed: u64, fault: Fault) -> Verdict {
    const N: usize = 32;
    let classes: BTreeSet<u8> = corner_patterns().collect();
    ensure(classes.len() == 10, || {
        format!("{} nonzero classes", classes.len())
    })?;
    ensure(
        (0u8..16).all(|p| (-2..=2).contains(&alpha_of_pattern(p))),
        || "alpha outside -2..=2".into(),
    )?;
    ensure(classes.iter().all(|&p| alpha_of_pattern(p) != 0), || {
        "listed class with zero alpha".into()
    })?;
    let mut rng = gen::rng(seed);
    let mut seen = BTreeSet::new();
    for case in 0..cases {
        let field = gen::int_field(&mut rng, &[N, N], -1000, 1000);
        let boxes = gen::planar_boxes(&mut rng, [N, N], 6);
        let d = RectilinearDomain::from_boxes([N, N], &boxes).map_err(fail)?;
        let sat = SummedAreaTable::build(&field, &[0, 0]).map_err(fail)?;
        let got = integrate_corners(&corner_map(&d, fault), &sat).map_err(fail)?;
        let want = cell_sum(&field, |i| d.contains(i[0] as isize, i[1] as isize)).map_err(fail)?;
        ensure(got == want, || {
            format!("union {case}: corners {got}, cells {want}")
        })?;
        for c in d.corners().entries() {
            ensure(classes.contains(&c.pattern), || {
                format!(
                    "corner {:?} has unlisted pattern {:04b}",
                    c.vertex, c.pattern
                )
            })?;
            seen.insert(c.pattern);
        }
    }
    Ok(format!(
        "{cases} unions exact; 10 classes, {} observed",
        seen.len()
    ))
}

pub fn slant_loops(loops: usize, seed: u64) -> Verdict {
    const N: usize = 24;
    let origins = [[0, 0], [2, 1], [1, 2]];
    let mut rng = gen::rng(seed);
    let mut segments = 0;
    for case in 0..loops {
        // a margin of 2 on every side survives each quarter turn
        let (mut cells, mut lp) = gen::random_loop(&mut rng, [N - 2, N - 2], 2);
        let mut field = gen::int_field(&mut rng, &[N, N], -500, 500);
        for turn in 0..4 {
            let want = cell_sum(&field, |i| cells.contains(&[i[0], i[1]])).map_err(fail)?;
            let tables = origins
                .iter()
                .map(|o| SummedAreaTable::build(&field, o))
                .collect::<Result<Vec<_>, _>>()
                .map_err(fail)?;
            for s in [1i8, -1] {
                let ccw = LatticeCurve::closed(lp.clone(), s).map_err(fail)?;
                let cw = ccw.reversed();
                for (sat, o) in tables.iter().zip(&origins) {
                    let got = closed_curve_integral(&ccw, sat).map_err(fail)?;
                    let back = closed_curve_integral(&cw, sat).map_err(fail)?;
                    let w = i64::from(s) * want;
                    ensure(got == w && back == -w, || {
                        format!(
                            "loop {case} turn {turn} s={s} origin {o:?}: {got}/{back}, want ±{w}"
                        )
                    })?;
                }
                for seg in decompose(&ccw).map_err(fail)? {
                    let v: i64 = slanted_integral_doubled(&seg, &tables[0]).map_err(fail)?;
                    let r: i64 =
                        slanted_integral_doubled(&seg.reversed(), &tables[0]).map_err(fail)?;
                    ensure(r == -v, || {
                        format!(
                            "loop {case}: segment at {:?} not antisymmetric",
                            seg.start()
                        )
                    })?;
                    ensure(seg.beta() != Sign::Zero || v == 0, || {
                        format!("loop {case}: flat segment integrates to {v}")
                    })?;
                    segments += 1;
                }
            }
            lp = lp.iter().map(|&v| gen::rotate_vertex(v, N)).collect();
            cells = gen::rotate_cells(&cells, N);
            field = gen::rotate_field(&field);
        }
    }
    Ok(format!(
        "{loops} loops x 4 turns x 3 origins exact; {segments} segments checked"
    ))
}

fn cfg() -> DetachConfig {
    DetachConfig::default()
}

fn detachments<P: ProbeFunction + ?Sized>(
    f: &P,
    x: f64,
) -> Result<(Option<Sign>, Option<Sign>), String> {
    let side = |s| {
        one_sided_sign_limits(f, x, s, &cfg())
            .map(|l| l.detachment())
            .map_err(fail)
    };
    Ok((side(Side::Left)?, side(Side::Right)?))
}

/// Every weather-vane fixture reproduces its tendency vector at 0.
pub fn weather_vane_round_trip() -> Verdict {
    let mut count = 0;
    for v in TendencyVector::admissible() {
        let r = classify(&weather_vane(v).map_err(fail)?, 0.0, &cfg()).map_err(fail)?;
        ensure(r.vector == v, || {
            format!("vector {:?} came back as {:?}", v.bits(), r.vector.bits())
        })?;
        count += 1;
    }
    ensure(count == 49, || format!("{count} admissible vectors"))?;
    Ok("49 of 49 vectors recovered".into())
}

pub fn detach_examples() -> Verdict {
    let cfg = cfg();
    let mut checked = 0;
    // x² + x: the increment is h(2x + 1) + h², so where 2x + 1 vanishes the
    // square decides
    let f = FnProbe::new(|x: f64| x * x + x);
    for k in -10..=10 {
        let x = f64::from(k) / 10.0;
        let want = if x < -0.5 { Sign::Neg } else { Sign::Pos };
        let r = one_sided_sign_limits(&f, x, Side::Right, &cfg).map_err(fail)?;
        ensure(r.detachment() == Some(want), || {
            format!("x^2+x at {x}: {:?}", r.detachment())
        })?;
        checked += 1;
    }
    let r = classify(&FnProbe::new(f64::abs), 0.0, &cfg).map_err(fail)?;
    ensure(
        r.detachment == Some(Sign::Pos) && r.tendency == Some(Sign::Zero),
        || format!("|x| at 0: {r:?}"),
    )?;
    let r = classify(&step(), 1.0, &cfg).map_err(fail)?;
    ensure(r.types == [1, 2, 3, 4], || {
        format!("step types {:?}", r.types)
    })?;
    let r = classify(&oscillating(), 0.0, &cfg).map_err(fail)?;
    ensure(r.types == [1, 2, 5, 6], || {
        format!("oscillation types {:?}", r.types)
    })?;
    checked += 3;
    for side in [Side::Left, Side::Right] {
        let q =
            one_sided_sign_limits(&dirichlet(Class::Rational), 0.75, side, &cfg).map_err(fail)?;
        ensure((q.sup, q.inf) == (Sign::Zero, Sign::Neg), || {
            format!("dirichlet at a rational: {q:?}")
        })?;
        let r = one_sided_sign_limits(
            &dirichlet(Class::Irrational),
            std::f64::consts::SQRT_2,
            side,
            &cfg,
        )
        .map_err(fail)?;
        ensure((r.sup, r.inf) == (Sign::Pos, Sign::Zero), || {
            format!("dirichlet at an irrational: {r:?}")
        })?;
        checked += 2;
    }
    weather_vane_round_trip()?;
    checked += 49;
    Ok(format!("{checked} examples, 0 mismatches"))
}

fn strict_extrema(ys: &[f64]) -> Vec<(usize, ExtremumKind)> {
    (1..ys.len() - 1)
        .filter_map(|i| {
            let (a, b, c) = (ys[i - 1], ys[i], ys[i + 1]);
            if b < a && b < c {
                Some((i, ExtremumKind::Min))
            } else if b > a && b > c {
                Some((i, ExtremumKind::Max))
            } else {
                None
            }
        })
        .collect()
}

fn fermat(f: &SampledFunction) -> Result<(), String> {
    let got: Vec<_> = find_extrema(f, &cfg())
        .into_iter()
        .map(|e| (e.index, e.kind))
        .collect();
    ensure(got == strict_extrema(f.ys()), || format!("extrema {got:?}"))?;
    for (i, _) in got {
        let t = tendency(f, f.xs()[i], &cfg()).map_err(fail)?;
        ensure(t == Sign::Zero, || format!("tendency {t} at extremum {i}"))?;
    }
    Ok(())
}

/// Detrended so both ends agree; skipped when that creates ties.
fn rolle(f: &SampledFunction) -> Result<(), String> {
    let mut ys = f.ys().to_vec();
    let n = ys.len();
    let drift = (ys[n - 1] - ys[0]) / (n - 1) as f64;
    for (i, y) in ys.iter_mut().enumerate() {
        *y -= drift * i as f64;
    }
    ys[n - 1] = ys[0];
    if ys.windows(2).any(|w| w[0] == w[1]) {
        return Ok(());
    }
    let g = SampledFunction::new(f.xs().to_vec(), ys).map_err(fail)?;
    let ext = find_extrema(&g, &cfg());
    ensure(!ext.is_empty(), || "no extremum between equal ends".into())?;
    for e in ext {
        ensure(
            tendency(&g, e.x, &cfg()).map_err(fail)? == Sign::Zero,
            || format!("nonzero tendency at {}", e.index),
        )?;
    }
    Ok(())
}

/// Between the neighbouring extrema of an isolated maximum all three
/// tendencies occur.
fn darboux(f: &SampledFunction) -> Result<(), String> {
    let n = f.len();
    let ext = find_extrema(f, &cfg());
    let marked: Vec<bool> = (0..n).map(|i| ext.iter().any(|e| e.index == i)).collect();
    for e in ext.iter().filter(|e| e.kind == ExtremumKind::Max) {
        let i = e.index;
        if i < 2 || i + 2 >= n || marked[i - 1] || marked[i + 1] {
            continue;
        }
        let lo = (1..i).rev().find(|&j| marked[j]).unwrap_or(0) + 1;
        let hi = (i + 1..n - 1).find(|&j| marked[j]).unwrap_or(n - 1) - 1;
        let mut seen = [false; 3];
        for j in lo..=hi {
            if let Ok(t) = tendency(f, f.xs()[j], &cfg()) {
                seen[(t.as_i8() + 1) as usize] = true;
            }
        }
        ensure(seen == [true; 3], || {
            format!("max at {i} sees tendencies {seen:?}")
        })?;
    }
    Ok(())
}

/// Every level strictly between the ends is crossed at a rising sample.
fn lagrange(seed: u64) -> Result<(), String> {
    let n = 400;
    let mut ys = gen::smooth(&mut gen::rng(seed), n);
    if ys[n - 1] < ys[0] {
        ys.iter_mut().for_each(|y| *y = -*y);
    }
    if ys[n - 1] <= ys[0] {
        return Ok(());
    }
    let f = SampledFunction::new((0..n).map(|k| k as f64 * 0.01).collect(), ys.clone())
        .map_err(fail)?;
    for q in 1..=5 {
        let v = ys[0] + (ys[n - 1] - ys[0]) * f64::from(q) / 6.0;
        let mut hit = false;
        for i in (0..n - 1).filter(|&i| ys[i] < v && v <= ys[i + 1]) {
            for j in [i, i + 1].into_iter().filter(|&j| j > 0 && j + 1 < n) {
                hit |= tendency(&f, f.xs()[j], &cfg()).map_err(fail)? == Sign::Pos;
            }
        }
        ensure(hit, || format!("level {v} never crossed rising"))?;
    }
    Ok(())
}

/// Right detachment at −x mirrors left detachment at x.
fn even_and_odd(seed: u64) -> Result<(), String> {
    let mut rng = gen::rng(seed);
    let odd = rng.random_bool(0.5);
    let m = rng.random_range(3..60usize);
    let half: Vec<f64> = (0..=m)
        .map(|_| f64::from(rng.random_range(-5i32..=5)) * 0.5)
        .collect();
    let ks = -(m as i64)..=m as i64;
    let xs: Vec<f64> = ks.clone().map(|k| k as f64 * 0.25).collect();
    let ys = ks
        .map(|k| {
            let v = half[k.unsigned_abs() as usize];
            match (odd, k) {
                (true, 0) => 0.0,
                (true, k) if k < 0 => -v,
                _ => v,
            }
        })
        .collect();
    let f = SampledFunction::new(xs.clone(), ys).map_err(fail)?;
    for k in 1..m {
        let (left_at_x, _) = detachments(&f, xs[m + k])?;
        let (_, right_at_mx) = detachments(&f, xs[m - k])?;
        let want = if odd {
            left_at_x.map(Sign::flip)
        } else {
            left_at_x
        };
        ensure(right_at_mx == want, || {
            format!("odd={odd} at ±{}", xs[m + k])
        })?;
    }
    Ok(())
}

fn scalar_rule<P: ProbeFunction + ?Sized>(f: &P, xs: &[f64], c: f64) -> Result<(), String> {
    let s = Sign::from_i8(if c > 0.0 {
        1
    } else if c < 0.0 {
        -1
    } else {
        0
    });
    let g = Scaled { inner: f, c };
    for &x in xs {
        let (l, r) = detachments(f, x)?;
        let got = detachments(&g, x)?;
        ensure(
            got == (l.map(|d| d.times(s)), r.map(|d| d.times(s))),
            || format!("c={c} at {x}: {got:?}"),
        )?;
    }
    Ok(())
}

/// The detachments of a running sum are the signs of its neighbouring
/// summands.
fn antiderivative(seed: u64) -> Result<(), String> {
    let mut rng = gen::rng(seed);
    let n = rng.random_range(3..60usize);
    let values: Vec<i64> = (0..n).map(|_| rng.random_range(-9..=9)).collect();
    let field = GridField::new(vec![n], values.clone()).map_err(fail)?;
    let sat = SummedAreaTable::build(&field, &[0]).map_err(fail)?;
    let cum = SampledFunction::new(
        (0..n).map(|k| k as f64).collect(),
        sat.cumulative().iter().map(|&v| v as f64).collect(),
    )
    .map_err(fail)?;
    for i in 1..n - 1 {
        let pair = detach_of_antiderivative(&field, i).map_err(fail)?;
        let want = (
            Sign::from_i8(-values[i].signum() as i8),
            Sign::from_i8(values[i + 1].signum() as i8),
        );
        ensure((pair.left, pair.right) == want, || {
            format!("increments at {i}: {pair:?}")
        })?;
        ensure(
            detachments(&cum, i as f64)? == (Some(want.0), Some(want.1)),
            || format!("sampled sum at {i}"),
        )?;
    }
    Ok(())
}

fn fixture_theorems() -> Result<(), String> {
    let cfg = cfg();
    for c in [-2.0, 0.5, 3.0] {
        let s = Sign::from_i8(if c > 0.0 { 1 } else { -1 });
        for v in TendencyVector::admissible() {
            let f = weather_vane(v).map_err(fail)?;
            let r = classify(&f, 0.0, &cfg).map_err(fail)?;
            let g = classify(&Scaled { inner: &f, c }, 0.0, &cfg).map_err(fail)?;
            ensure(g.detachment == r.detachment.map(|d| d.times(s)), || {
                format!("scaled vane {:?}", v.bits())
            })?;
        }
        scalar_rule(
            &FnProbe::new(|x: f64| x * x * x - x),
            &[-1.0, 0.0, 0.3, 2.0],
            c,
        )?;
    }
    let minima: [fn(f64) -> f64; 2] = [|x| x * x, f64::abs];
    for f in minima.map(FnProbe::new) {
        ensure(tendency(&f, 0.0, &cfg).map_err(fail)? == Sign::Zero, || {
            "fixture minimum has nonzero tendency".into()
        })?;
    }
    let odd = FnProbe::new(|x: f64| x * x * x - x);
    let even = FnProbe::new(|x: f64| x * x - x.cos());
    for x in [0.25, 0.5, 1.0, 2.0] {
        ensure(
            detachments(&odd, -x)?.1 == detachments(&odd, x)?.0.map(Sign::flip),
            || format!("odd fixture at {x}"),
        )?;
        ensure(
            detachments(&even, -x)?.1 == detachments(&even, x)?.0,
            || format!("even fixture at {x}"),
        )?;
    }
    let sine = SampledFunction::from_fn(
        (0..=100)
            .map(|k| f64::from(k) * std::f64::consts::PI / 100.0)
            .collect(),
        f64::sin,
    )
    .map_err(fail)?;
    rolle(&sine)?;
    fermat(&sine)?;
    Ok(())
}

/// Fermat, Rolle, Darboux, Lagrange, even/odd, scalar rule and the
/// antiderivative analogue on the fixtures and `functions` random samples.
pub fn theorem_suites(functions: usize, seed: u64) -> Verdict {
    fixture_theorems()?;
    let mut rng = gen::rng(seed);
    for k in 0..functions {
        let s = rng.random::<u64>();
        let shape = Shape::ALL[k % 4];
        let f = gen::sampled(shape, s);
        let at = |what: &str, e: String| format!("{what} on {shape:?} #{k}: {e}");
        fermat(&f).map_err(|e| at("fermat", e))?;
        rolle(&f).map_err(|e| at("rolle", e))?;
        if shape.is_continuous() {
            darboux(&f).map_err(|e| at("darboux", e))?;
        }
        lagrange(s).map_err(|e| at("lagrange", e))?;
        even_and_odd(s).map_err(|e| at("even/odd", e))?;
        let c = if k % 5 == 0 {
            0.0
        } else {
            rng.random_range(-5.0..5.0)
        };
        scalar_rule(&f, &f.xs()[1..f.len() - 1], c).map_err(|e| at("scalar rule", e))?;
        antiderivative(s).map_err(|e| at("antiderivative", e))?;
    }
    Ok(format!(
        "fixtures and {functions} random functions, 0 violations"
    ))
}

/// Outcome of the timing criterion plus every report it produced.
pub struct Performance {
    pub verdict: Verdict,
    pub reports: Vec<CostReport>,
}

pub const MIN_SPEEDUP: f64 = 10.0;

pub fn performance(repetitions: usize, stream: usize, seed: u64) -> Performance {
    let mut reports = Vec::new();
    let verdict = (|| {
        let main = bench::bench_box_sum(
            &[vec![256, 256]],
            &[vec![64, 64], vec![1, 1]],
            repetitions,
            seed,
        )
        .map_err(fail)?;
        let ratio = main[1].ratio.unwrap_or(0.0);
        reports.extend(main);
        reports.extend(
            bench::bench_box_sum(&[vec![64, 64, 64]], &[vec![16, 16, 16]], repetitions, seed)
                .map_err(fail)?,
        );
        let volumes = [vec![1, 1], vec![8, 8], vec![64, 64], vec![128, 128]];
        let flat =
            bench::sat_latency_by_volume(&[256, 256], &volumes, repetitions, seed).map_err(fail)?;
        let overlap = bench::ranges_overlap(&flat);
        reports.extend(flat);
        reports.extend(bench::bench_sign_vs_quotient(stream, repetitions, seed).map_err(fail)?);
        ensure(ratio >= MIN_SPEEDUP, || {
            format!("speedup {ratio:.1} below {MIN_SPEEDUP}")
        })?;
        ensure(overlap, || {
            "table latency p10-p90 ranges do not overlap across volumes".into()
        })?;
        Ok(format!(
            "speedup {ratio:.1} on 256x256 with 64x64 boxes; latency flat across volumes"
        ))
    })();
    Performance { verdict, reports }
}

/// Encode-decode identity for fields and tables of both element types.
pub fn round_trip(cases: usize, seed: u64) -> Verdict {
    let mut rng = gen::rng(seed);
    for case in 0..cases {
        let ndim = 1 + case % 4;
        let extents: Vec<usize> = (0..ndim).map(|_| rng.random_range(1..=6)).collect();
        let ints = gen::int_field(&mut rng, &extents, i64::MIN / 4096, i64::MAX / 4096);
        let floats =
            GridField::from_fn(extents.clone(), |_| rng.random_range(-1e12..1e12)).map_err(fail)?;
        let origin: Vec<usize> = extents.iter().map(|&e| rng.random_range(0..e)).collect();
        let bytes = io::encode_field(&ints).map_err(fail)?;
        ensure(
            io::decode_field(&bytes).map_err(fail)? == Field::Int(ints.clone()),
            || format!("i64 field {case}"),
        )?;
        ensure(io::encode_field(&floats).map_err(fail)? != bytes, || {
            "dtype not encoded".into()
        })?;
        let back = io::decode_field(&io::encode_field(&floats).map_err(fail)?).map_err(fail)?;
        ensure(back == Field::Float(floats.clone()), || {
            format!("f64 field {case}")
        })?;
        let small = ints.map(|v| v >> 20);
        let st = SummedAreaTable::build(&small, &origin).map_err(fail)?;
        let bytes = io::encode_table(&st).map_err(fail)?;
        ensure(
            io::decode_table(&bytes).map_err(fail)? == Table::Int(st.clone()),
            || format!("i64 table {case}"),
        )?;
        let ft = SummedAreaTable::build(&floats, &origin).map_err(fail)?;
        let bytes = io::encode_table(&ft).map_err(fail)?;
        ensure(
            io::decode_table(&bytes).map_err(fail)? == Table::Float(ft.clone()),
            || format!("f64 table {case}"),
        )?;
    }
    Ok(format!(
        "{cases} fields and {cases} tables per element type round-trip"
    ))
}

/// Result of one in-process CLI invocation.
pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

pub fn run_cli(args: &[&str]) -> Run {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let code = crate::cli::run(
        std::iter::once("dint").chain(args.iter().copied()),
        &mut stdout,
        &mut stderr,
    );
    Run {
        code,
        stdout,
        stderr,
    }
}

/// Every deterministic verb prints the same bytes twice on the same inputs.
pub fn cli_determinism(seed: u64) -> Verdict {
    let dir = std::env::temp_dir().join(format!("dint-determinism-{}-{seed}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(fail)?;
    let result = (|| {
        let path = |name: &str| dir.join(name).display().to_string();
        let mut rng = gen::rng(seed);
        let field = gen::int_field(&mut rng, &[16, 16], -99, 99);
        io::write_bytes(
            dir.join("f.grdf").as_path(),
            &io::encode_field(&field).map_err(fail)?,
        )
        .map_err(fail)?;
        let floats = field.map(|v| v as f64 / 7.0);
        io::write_bytes(
            dir.join("g.grdf").as_path(),
            &io::encode_field(&floats).map_err(fail)?,
        )
        .map_err(fail)?;
        std::fs::write(
            dir.join("d.json"),
            r#"{"boxes":[{"lo":[1,2],"hi":[6,9]},{"lo":[4,4],"hi":[12,5]}]}"#,
        )
        .map_err(fail)?;
        let (_, lp) = gen::random_loop(&mut rng, [14, 14], 1);
        let curve = io::CurveSpec {
            orientation: 1,
            closed: true,
            vertices: lp,
        };
        std::fs::write(
            dir.join("c.json"),
            serde_json::to_string(&curve).map_err(fail)?,
        )
        .map_err(fail)?;
        let walk = gen::walk_samples(seed, 200);
        let csv: String = walk
            .xs()
            .iter()
            .zip(walk.ys())
            .map(|(x, y)| format!("{x:?},{y:?}\n"))
            .collect();
        std::fs::write(dir.join("w.csv"), csv).map_err(fail)?;
        let (f, g, s) = (path("f.grdf"), path("g.grdf"), path("f.grds"));
        let (d, c, w) = (path("d.json"), path("c.json"), path("w.csv"));
        let seed_arg = seed.to_string();
        let commands: Vec<Vec<&str>> = vec![
            vec!["sat-build", "--field", &f, "--out", &s],
            vec![
                "sat-query",
                "--sat",
                &s,
                "--box",
                "0:3,2:5",
                "--box",
                "4:15,0:15",
            ],
            vec!["sat-query", "--field", &g, "--box", "1:9,3:3"],
            vec!["green", "--field", &f, "--domain", &d],
            vec!["slant", "--field", &g, "--curve", &c],
            vec!["detach", "--samples", &w, "--at", "all"],
            vec!["extrema", "--samples", &w],
            vec!["selftest", "--seed", &seed_arg],
        ];
        for cmd in &commands {
            let a = run_cli(cmd);
            let b = run_cli(cmd);
            let name = cmd[0];
            ensure(a.code == 0, || {
                format!(
                    "{name} exited {}: {}",
                    a.code,
                    String::from_utf8_lossy(&a.stderr)
                )
            })?;
            ensure(!a.stdout.is_empty(), || format!("{name} printed nothing"))?;
            ensure(a.stdout == b.stdout && a.code == b.code, || {
                format!("{name} output differs between runs")
            })?;
        }
        Ok(format!(
            "{} verbs byte-identical across runs",
            commands.len()
        ))
    })();
    let _ = std::fs::remove_dir_all(&dir);
    result
}
