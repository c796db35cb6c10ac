mod common;

use dint_core::green::{
    alpha_of_pattern, corner_patterns, integrate_corners, Corner, CornerMap, RectilinearDomain,
};
use dint_core::grid::{cell_sum, GridField, LatticeBox};
use dint_core::sat::SummedAreaTable;
use proptest::prelude::*;
use rand::Rng;

fn boxed(lo: [usize; 2], hi: [usize; 2]) -> LatticeBox {
    LatticeBox::new(lo.to_vec(), hi.to_vec()).unwrap()
}

fn random_boxes(rng: &mut impl Rng, n: usize, extents: [usize; 2]) -> Vec<LatticeBox> {
    (0..rng.random_range(0..=6))
        .map(|_| {
            let e = [extents[0].min(n), extents[1].min(n)];
            let lo = [rng.random_range(0..e[0]), rng.random_range(0..e[1])];
            let hi = [rng.random_range(lo[0]..e[0]), rng.random_range(lo[1]..e[1])];
            boxed(lo, hi)
        })
        .collect()
}

#[test]
fn random_unions_match_cell_sum() {
    let mut rng = common::rng(7);
    for _ in 0..300 {
        let field = common::random_field(&mut rng, &[32, 32], -1000, 1000);
        let boxes = random_boxes(&mut rng, 32, [32, 32]);
        let d = RectilinearDomain::from_boxes([32, 32], &boxes).unwrap();
        let sat = SummedAreaTable::build(&field, &[0, 0]).unwrap();
        let want = cell_sum(&field, |i| d.contains(i[0] as isize, i[1] as isize)).unwrap();
        assert_eq!(d.integrate(&sat).unwrap(), want);
        assert!(d
            .corners()
            .entries()
            .iter()
            .all(|c| (-2..=2).contains(&c.alpha) && c.alpha != 0));
    }
}

#[test]
fn exactly_ten_corner_classes() {
    let classes: Vec<_> = corner_patterns().collect();
    assert_eq!(classes.len(), 10);
    let mut alphas: Vec<i8> = (0u8..16).map(alpha_of_pattern).collect();
    alphas.sort_unstable();
    alphas.dedup();
    assert_eq!(alphas, vec![-2, -1, 0, 1, 2]);
}

#[test]
fn rectangle_census() {
    let d = RectilinearDomain::from_boxes([6, 6], &[boxed([1, 2], [3, 4])]).unwrap();
    let census = d.alpha_census();
    assert_eq!(census.iter().filter(|&&c| c > 0).count(), 4);
    assert!(census.iter().all(|&c| c <= 1));
}

#[test]
fn cross_has_all_concave_classes() {
    let d = RectilinearDomain::from_boxes([5, 5], &[boxed([1, 0], [3, 4]), boxed([0, 1], [4, 3])])
        .unwrap();
    let census = d.alpha_census();
    for p in [0b0111, 0b1011, 0b1101, 0b1110] {
        assert_eq!(census[p], 1, "pattern {p:04b}");
    }
}

#[test]
fn checkerboard_interior_is_double() {
    let n = 6;
    let cells = (0..n * n).map(|k| (k / n + k % n) % 2 == 0).collect();
    let d = RectilinearDomain::from_cells([n, n], cells).unwrap();
    for c in d.corners().entries() {
        let interior = (1..n).contains(&c.vertex[0]) && (1..n).contains(&c.vertex[1]);
        if interior {
            assert_eq!(c.alpha.abs(), 2, "{c:?}");
        } else {
            assert_eq!(c.alpha.abs(), 1, "{c:?}");
        }
    }
    let ones = GridField::filled(vec![n, n], 1i64).unwrap();
    let sat = SummedAreaTable::build(&ones, &[0, 0]).unwrap();
    assert_eq!(d.integrate(&sat).unwrap(), 18);
}

#[test]
fn two_overlapping_boxes() {
    let d = RectilinearDomain::from_boxes([4, 4], &[boxed([0, 0], [1, 2]), boxed([1, 1], [3, 1])])
        .unwrap();
    assert_eq!(d.cell_count(), 8);
    let twice =
        RectilinearDomain::from_boxes([4, 4], &[boxed([0, 0], [1, 2]), boxed([0, 0], [1, 2])])
            .unwrap();
    assert_eq!(twice.cell_count(), 6);
}

#[test]
fn corrupted_coefficient_is_detected() {
    let ones = GridField::filled(vec![5, 5], 1i64).unwrap();
    let sat = SummedAreaTable::build(&ones, &[0, 0]).unwrap();
    let d = RectilinearDomain::from_boxes([5, 5], &[boxed([1, 1], [2, 3])]).unwrap();
    let mut entries = d.corners().entries().to_vec();
    entries[0] = Corner {
        alpha: -entries[0].alpha,
        ..entries[0]
    };
    let bad = CornerMap::from_entries([5, 5], entries);
    assert_ne!(integrate_corners(&bad, &sat).unwrap(), 6);
    assert_eq!(integrate_corners(d.corners(), &sat).unwrap(), 6);
}

proptest! {
    #[test]
    fn area_of_ones_is_cell_count(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let boxes = random_boxes(&mut rng, 12, [12, 12]);
        let d = RectilinearDomain::from_boxes([12, 12], &boxes).unwrap();
        let ones = GridField::filled(vec![12, 12], 1i64).unwrap();
        let sat = SummedAreaTable::build(&ones, &[0, 0]).unwrap();
        prop_assert_eq!(d.integrate(&sat).unwrap(), d.cell_count() as i64);
    }

    #[test]
    fn translation_leaves_integral_unchanged(seed in any::<u64>(), di in 0usize..4, dj in 0usize..4) {
        let mut rng = common::rng(seed);
        let field = common::random_field(&mut rng, &[16, 16], -99, 99);
        let boxes = random_boxes(&mut rng, 12, [12, 12]);
        let shifted: Vec<_> = boxes.iter().map(|b| boxed([b.lo()[0] + di, b.lo()[1] + dj], [b.hi()[0] + di, b.hi()[1] + dj])).collect();
        let moved = GridField::from_fn(vec![16, 16], |i| {
            if i[0] >= di && i[1] >= dj { field.get(&[i[0] - di, i[1] - dj]).unwrap() } else { 0 }
        }).unwrap();
        let d = RectilinearDomain::from_boxes([16, 16], &boxes).unwrap();
        let e = RectilinearDomain::from_boxes([16, 16], &shifted).unwrap();
        let a = d.integrate(&SummedAreaTable::build(&field, &[0, 0]).unwrap()).unwrap();
        let b = e.integrate(&SummedAreaTable::build(&moved, &[0, 0]).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn complement_in_frame(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let field = common::random_field(&mut rng, &[14, 14], -99, 99);
        let sat = SummedAreaTable::build(&field, &[0, 0]).unwrap();
        let frame = boxed([2, 1], [11, 12]);
        let inner: Vec<_> = random_boxes(&mut rng, 14, [14, 14])
            .into_iter()
            .filter_map(|b| {
                let lo = [b.lo()[0].max(2), b.lo()[1].max(1)];
                let hi = [b.hi()[0].min(11), b.hi()[1].min(12)];
                (lo[0] <= hi[0] && lo[1] <= hi[1]).then(|| boxed(lo, hi))
            })
            .collect();
        let d = RectilinearDomain::from_boxes([14, 14], &inner).unwrap();
        let whole = RectilinearDomain::from_boxes([14, 14], std::slice::from_ref(&frame)).unwrap();
        let rest: Vec<bool> = (0..14 * 14).map(|k| whole.cells()[k] && !d.cells()[k]).collect();
        let rest = RectilinearDomain::from_cells([14, 14], rest).unwrap();
        prop_assert_eq!(
            d.integrate(&sat).unwrap() + rest.integrate(&sat).unwrap(),
            sat.box_query(&frame).unwrap()
        );
    }

    #[test]
    fn origin_below_domain_is_irrelevant(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let field = common::random_field(&mut rng, &[12, 12], -99, 99);
        let cells = common::random_cells(&mut rng, [12, 12], 3, 3, 6);
        let bits = (0..144).map(|k| cells.contains(&[k / 12, k % 12])).collect();
        let d = RectilinearDomain::from_cells([12, 12], bits).unwrap();
        let want = cell_sum(&field, |i| cells.contains(&[i[0], i[1]])).unwrap();
        for origin in [[0, 0], [3, 0], [2, 3]] {
            let sat = SummedAreaTable::build(&field, &origin).unwrap();
            prop_assert_eq!(d.integrate(&sat).unwrap(), want);
        }
    }
}
