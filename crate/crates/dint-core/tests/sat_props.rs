mod common;

use std::collections::BTreeMap;

use dint_core::detach::{Sign, SignPair};
use dint_core::grid::{naive_box_sum, GridField, LatticeBox};
use dint_core::sat::{detach_of_antiderivative, SatError, SummedAreaTable};
use proptest::prelude::*;
use rand::Rng;

fn case(seed: u64, ndim: usize) -> (GridField<i64>, Vec<usize>, LatticeBox) {
    let mut rng = common::rng(seed);
    let extents: Vec<usize> = (0..ndim).map(|_| rng.random_range(1..=7)).collect();
    let field = common::random_field(&mut rng, &extents, -1_000_000, 1_000_000);
    let origin: Vec<usize> = extents.iter().map(|&e| rng.random_range(0..e)).collect();
    let b = common::random_box(&mut rng, &extents, &origin);
    (field, origin, b)
}

proptest! {
    #[test]
    fn exact_query_matches_naive(seed in any::<u64>(), ndim in 1usize..=4) {
        let (field, origin, b) = case(seed, ndim);
        let sat = SummedAreaTable::build(&field, &origin).unwrap();
        prop_assert_eq!(sat.box_query(&b).unwrap(), naive_box_sum(&field, &b).unwrap());
    }

    #[test]
    fn float_query_within_tolerance(seed in any::<u64>(), ndim in 1usize..=4) {
        let (field, origin, b) = case(seed, ndim);
        let field = field.map(|v| v as f64 / 997.0);
        let sat = SummedAreaTable::build(&field, &origin).unwrap();
        let got = sat.box_query(&b).unwrap();
        let want = naive_box_sum(&field, &b).unwrap();
        let scale: f64 = field.values().iter().map(|v| v.abs()).sum();
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + scale), "{got} vs {want}");
    }

    #[test]
    fn split_along_last_axis_adds(seed in any::<u64>(), ndim in 1usize..=4) {
        let (field, origin, b) = case(seed, ndim);
        let sat = SummedAreaTable::build(&field, &origin).unwrap();
        let last = ndim - 1;
        prop_assume!(b.hi()[last] > b.lo()[last]);
        let mid = (b.lo()[last] + b.hi()[last]) / 2;
        let mut hi1 = b.hi().to_vec();
        hi1[last] = mid;
        let mut lo2 = b.lo().to_vec();
        lo2[last] = mid + 1;
        let p = LatticeBox::new(b.lo().to_vec(), hi1).unwrap();
        let q = LatticeBox::new(lo2, b.hi().to_vec()).unwrap();
        prop_assert_eq!(sat.box_query(&b).unwrap(), sat.box_query(&p).unwrap() + sat.box_query(&q).unwrap());
    }

    /// Grouping the 2ⁿ corner terms by the last coordinate yields two
    /// (n−1)-axis queries: one up to `hi`, one up to `lo − 1`.
    #[test]
    fn corner_terms_regroup_by_last_axis(seed in any::<u64>(), ndim in 1usize..=4) {
        let (field, origin, b) = case(seed, ndim);
        let sat = SummedAreaTable::build(&field, &origin).unwrap();
        let last = ndim - 1;
        let terms = sat.corner_terms(&b).unwrap();
        prop_assert_eq!(terms.len(), 1 << ndim);
        let upper: i64 = terms.iter().filter(|t| t.corner[last] == b.hi()[last] as isize).map(|t| t.sign as i64 * t.value).sum();
        let lower: i64 = terms.iter().filter(|t| t.corner[last] != b.hi()[last] as isize).map(|t| t.sign as i64 * t.value).sum();
        let mut lo = b.lo().to_vec();
        lo[last] = origin[last];
        let up_box = LatticeBox::new(lo.clone(), b.hi().to_vec()).unwrap();
        prop_assert_eq!(upper, sat.box_query(&up_box).unwrap());
        if b.lo()[last] > origin[last] {
            let mut hi = b.hi().to_vec();
            hi[last] = b.lo()[last] - 1;
            let low_box = LatticeBox::new(lo, hi).unwrap();
            prop_assert_eq!(lower, -sat.box_query(&low_box).unwrap());
        } else {
            prop_assert_eq!(lower, 0);
            prop_assert!(terms.iter().filter(|t| t.corner[last] != b.hi()[last] as isize).all(|t| t.clamped));
        }
        prop_assert_eq!(upper + lower, sat.box_query(&b).unwrap());
    }

    #[test]
    fn antiderivative_increments_give_the_integrand(values in prop::collection::vec(-50i64..50, 3..40)) {
        let n = values.len();
        let field = GridField::new(vec![n], values.clone()).unwrap();
        for i in 1..n - 1 {
            let got = detach_of_antiderivative(&field, i).unwrap();
            let want = SignPair { left: Sign::from_i8(-values[i].signum() as i8), right: Sign::from_i8(values[i + 1].signum() as i8) };
            prop_assert_eq!(got, want);
        }
    }
}

/// Coefficient of every cumulative cell in a query, read off one-hot tables.
fn coefficients(extents: &[usize], b: &LatticeBox) -> BTreeMap<Vec<usize>, i64> {
    let len: usize = extents.iter().product();
    let mut out = BTreeMap::new();
    for k in 0..len {
        let mut cum = vec![0i64; len];
        cum[k] = 1;
        let sat = SummedAreaTable::from_cumulative(extents.to_vec(), vec![0; extents.len()], cum)
            .unwrap();
        let c = sat.box_query(b).unwrap();
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
    out
}

#[test]
fn planar_query_has_four_terms() {
    // box (a, b] × (c, d] with a = 1, b = 4, c = 2, d = 6
    let (a, b, c, d) = (1, 4, 2, 6);
    let bx = LatticeBox::new(vec![a + 1, c + 1], vec![b, d]).unwrap();
    let got = coefficients(&[6, 8], &bx);
    let want: BTreeMap<_, _> = [
        (vec![b, d], 1),
        (vec![a, c], 1),
        (vec![a, d], -1),
        (vec![b, c], -1),
    ]
    .into_iter()
    .collect();
    assert_eq!(got, want);
}

#[test]
fn solid_query_has_eight_terms() {
    let (a, b, c, d, e, f) = (0, 3, 1, 2, 2, 4);
    let bx = LatticeBox::new(vec![a + 1, c + 1, e + 1], vec![b, d, f]).unwrap();
    let got = coefficients(&[5, 4, 6], &bx);
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
    assert_eq!(got, want);
}

#[test]
fn corners_on_the_origin_are_clamped() {
    let f = GridField::filled(vec![4, 4], 1i64).unwrap();
    let sat = SummedAreaTable::build(&f, &[0, 0]).unwrap();
    let b = LatticeBox::new(vec![0, 1], vec![2, 3]).unwrap();
    let terms = sat.corner_terms(&b).unwrap();
    assert_eq!(terms.iter().filter(|t| t.clamped).count(), 2);
    assert_eq!(sat.box_query(&b).unwrap(), 9);
}

#[test]
fn build_examples() {
    let f = GridField::new(vec![2, 2], vec![1i64, 2, 3, 4]).unwrap();
    let sat = SummedAreaTable::build(&f, &[0, 0]).unwrap();
    assert_eq!(sat.cumulative(), &[1, 3, 4, 10]);
    let shifted = SummedAreaTable::build(&f, &[1, 0]).unwrap();
    assert_eq!(shifted.cumulative(), &[0, 0, 3, 7]);
    let line = GridField::new(vec![5], vec![1i64, -2, 3, -4, 5]).unwrap();
    let sat = SummedAreaTable::build(&line, &[0]).unwrap();
    assert_eq!(sat.cumulative(), &[1, -1, 2, -2, 3]);
}

#[test]
fn query_errors() {
    let f = GridField::filled(vec![4, 4], 1i64).unwrap();
    let sat = SummedAreaTable::build(&f, &[1, 1]).unwrap();
    let below = LatticeBox::new(vec![0, 1], vec![2, 2]).unwrap();
    assert!(matches!(
        sat.box_query(&below),
        Err(SatError::BelowOrigin { axis: 0, .. })
    ));
    let outside = LatticeBox::new(vec![1, 1], vec![2, 4]).unwrap();
    assert!(sat.box_query(&outside).is_err());
    assert!(SummedAreaTable::build(&f, &[4, 0]).is_err());
}

#[test]
fn overflow_is_reported() {
    let f = GridField::filled(vec![4], i64::MAX / 2).unwrap();
    assert!(SummedAreaTable::build(&f, &[0]).is_err());
}
