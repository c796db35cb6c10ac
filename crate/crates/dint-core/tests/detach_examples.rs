use dint_core::detach::fixtures::{
    abs_sin_recip, dirichlet, oscillating, reciprocal, step, three_level, weather_vane, Class,
    Riemann,
};
use dint_core::detach::{
    classify, classify_joint, find_extrema, generalized_detachment, is_pseudo_continuous,
    one_sided_sign_limits, tendency, DetachConfig, DetachError, ExtremumKind, FnProbe, JointType,
    Monotony, Partition, SampledFunction, Side, Sign, TendencyVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> DetachConfig {
    DetachConfig::default()
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

#[test]
fn parabola_plus_line_right_detachment() {
    let f = FnProbe::new(|x: f64| x * x + x);
    for k in -10..=10 {
        let x = k as f64 / 10.0;
        let want = if x < -0.5 { Sign::Neg } else { Sign::Pos };
        let r = one_sided_sign_limits(&f, x, Side::Right, &cfg()).unwrap();
        assert_eq!((r.sup, r.inf), (want, want), "x = {x}");
    }
}

#[test]
fn abs_at_zero() {
    let f = FnProbe::new(f64::abs);
    let r = classify(&f, 0.0, &cfg()).unwrap();
    assert_eq!(r.detachment, Some(Sign::Pos));
    assert_eq!(r.tendency, Some(Sign::Zero));
    assert_eq!(r.signposted, None);
    assert_eq!(r.monotony, Monotony::Extremum);
    // sup₊ = +1 while −sup₋ = −1, so the first two checks fire
    assert_eq!(r.types, vec![1, 2]);
    for x in [-2.0, 0.5, 3.0] {
        let r = classify(&f, x, &cfg()).unwrap();
        assert_eq!(
            r.signposted,
            Some(Sign::from_i8(if x > 0.0 { 1 } else { -1 }))
        );
        assert_eq!(r.detachment, None);
    }
}

#[test]
fn step_and_oscillation_types() {
    let r = classify(&step(), 1.0, &cfg()).unwrap();
    assert_eq!(r.types, vec![1, 2, 3, 4]);
    assert!(r.null_disdetachment);
    let r = classify(&oscillating(), 0.0, &cfg()).unwrap();
    assert_eq!(r.types, vec![1, 2, 5, 6]);
    assert!(!r.is_tendable());
    let r = classify(
        &FnProbe::new(|x: f64| if x == 0.0 { 0.0 } else { x * (1.0 / x).sin() }),
        0.0,
        &cfg(),
    )
    .unwrap();
    assert_eq!((r.detachment, r.signposted), (None, None));
}

#[test]
fn dirichlet_table() {
    for side in [Side::Left, Side::Right] {
        let q = one_sided_sign_limits(&dirichlet(Class::Rational), 0.75, side, &cfg()).unwrap();
        assert_eq!((q.sup, q.inf), (Sign::Zero, Sign::Neg));
        let r = one_sided_sign_limits(
            &dirichlet(Class::Irrational),
            std::f64::consts::SQRT_2,
            side,
            &cfg(),
        )
        .unwrap();
        assert_eq!((r.sup, r.inf), (Sign::Pos, Sign::Zero));
    }
    let r = classify(&dirichlet(Class::Irrational), 1.5, &cfg()).unwrap();
    assert_eq!(r.detachment, None);
    let p = is_pseudo_continuous(&dirichlet(Class::Rational), 0.5, &cfg());
    assert_eq!((p.left, p.right), (false, false));
}

#[test]
fn weather_vane_round_trip() {
    let mut count = 0;
    for v in TendencyVector::admissible() {
        let f = weather_vane(v).unwrap();
        let r = classify(&f, 0.0, &cfg()).unwrap();
        assert_eq!(r.vector, v, "{:?}", v.bits());
        count += 1;
    }
    assert_eq!(count, 49);
    let zero = classify(
        &weather_vane(TendencyVector::from_bits([0, 1, 0, 0, 1, 0])).unwrap(),
        0.0,
        &cfg(),
    )
    .unwrap();
    assert_eq!(
        (zero.detachment, zero.signposted),
        (Some(Sign::Zero), Some(Sign::Zero))
    );
    for bits in [[1, 0, 0, 1, 0, 0], [0, 0, 1, 0, 0, 1]] {
        let r = classify(
            &weather_vane(TendencyVector::from_bits(bits)).unwrap(),
            0.0,
            &cfg(),
        )
        .unwrap();
        assert!(r.detachment.is_some() && r.signposted.is_none(), "{bits:?}");
    }
    assert!(matches!(
        weather_vane(TendencyVector::from_bits([0, 0, 0, 1, 1, 1])),
        Err(DetachError::Inadmissible)
    ));
}

#[test]
fn riemann_on_the_rationals() {
    for (p, q) in [(1, 2), (3, 4), (-2, 5), (0, 1)] {
        let f = Riemann::new(p, q).unwrap();
        let r = classify(&f, f.at(), &cfg()).unwrap();
        assert_eq!(r.detachment, Some(Sign::Neg), "{p}/{q}");
        assert_eq!(r.signposted, None);
    }
}

#[test]
fn reciprocal_sign_flip() {
    let cfg = cfg();
    let at = |c, x, side| {
        one_sided_sign_limits(&reciprocal(c), x, side, &cfg)
            .unwrap()
            .detachment()
    };
    assert_eq!(at(Class::Rational, 2.0, Side::Right), Some(Sign::Neg));
    assert_eq!(at(Class::Irrational, 2.0, Side::Right), Some(Sign::Pos));
    assert_eq!(at(Class::Rational, 2.0, Side::Left), None);
    assert_eq!(at(Class::Rational, -2.0, Side::Left), Some(Sign::Pos));
    assert_eq!(at(Class::Rational, -2.0, Side::Right), None);
    let p = is_pseudo_continuous(&reciprocal(Class::Rational), 2.0, &cfg);
    assert_eq!((p.left, p.right), (false, false));
}

#[test]
fn integer_indicator() {
    let f = FnProbe::new(|x: f64| if x.fract() == 0.0 { 1.0 } else { 0.0 });
    let r = classify(&f, 3.0, &cfg()).unwrap();
    assert_eq!((r.detachment, r.signposted), (Some(Sign::Neg), None));
    let r = classify(&f, 2.5, &cfg()).unwrap();
    assert_eq!(
        (r.detachment, r.signposted),
        (Some(Sign::Zero), Some(Sign::Zero))
    );
}

#[test]
fn tangent_is_signposted_only() {
    let f = FnProbe::new(|x: f64| {
        if x == std::f64::consts::FRAC_PI_2 {
            0.0
        } else {
            x.tan()
        }
    });
    for x in [0.3, std::f64::consts::FRAC_PI_2] {
        let r = classify(&f, x, &cfg()).unwrap();
        assert_eq!(r.detachment, None);
        assert!(r.signposted.is_some());
    }
}

#[test]
fn detachment_without_limit_of_detachments() {
    let jump = FnProbe::new(|x: f64| if x == 0.0 { 1.0 } else { 0.0 });
    assert_eq!(
        one_sided_sign_limits(&jump, 0.0, Side::Right, &cfg())
            .unwrap()
            .detachment(),
        Some(Sign::Neg)
    );
    let spike = FnProbe::new(|x: f64| if x == 0.0 { 17.0 } else { (1.0 / x).sin() });
    assert_eq!(
        one_sided_sign_limits(&spike, 0.0, Side::Right, &cfg())
            .unwrap()
            .detachment(),
        Some(Sign::Neg)
    );
}

#[test]
fn pseudo_continuity() {
    let p = is_pseudo_continuous(&abs_sin_recip(), 0.0, &cfg());
    assert_eq!((p.left, p.right), (false, false));
    let ramp = SampledFunction::from_fn(grid(0.0, 1.0, 101), |x| 2.0 * x + 1.0).unwrap();
    let p = is_pseudo_continuous(&ramp, 0.5, &cfg());
    assert_eq!((p.left, p.right), (true, true));
    let p = is_pseudo_continuous(&FnProbe::new(|x: f64| x.sin()), 0.2, &cfg());
    assert!(p.left && p.right);
    assert!((p.right_limit.unwrap() - 0.2f64.sin()).abs() < 1e-3);
}

#[test]
fn generalized_detachment_examples() {
    let cfg = cfg();
    let f = FnProbe::new(|x: f64| x * x + x);
    for x in [-1.0, -0.25, 0.7] {
        for side in [Side::Left, Side::Right] {
            let g = generalized_detachment(&f, x, &Partition::standard(), side, &cfg).unwrap();
            let d = one_sided_sign_limits(&f, x, side, &cfg)
                .unwrap()
                .detachment()
                .unwrap();
            assert_eq!(g, d.as_f64());
        }
    }
    let eps = 0.3;
    let band = Partition::band(eps, [-1.0, 0.0, 1.0]).unwrap();
    for (c, x) in [
        (Class::Integer, 2.0),
        (Class::Rational, 0.5),
        (Class::Irrational, std::f64::consts::E),
    ] {
        for side in [Side::Left, Side::Right] {
            assert_eq!(
                generalized_detachment(&three_level(eps, c), x, &band, side, &cfg).unwrap(),
                0.0
            );
        }
    }
    let constant = FnProbe::new(|_| 4.0);
    let p = Partition::band(0.1, [5.0, 7.0, 9.0]).unwrap();
    assert_eq!(
        generalized_detachment(&constant, 1.0, &p, Side::Right, &cfg).unwrap(),
        7.0
    );
}

#[test]
fn joint_types() {
    let cfg = cfg();
    let xs = grid(-1.0, 1.0, 41);
    let abs = SampledFunction::from_fn(xs.clone(), f64::abs).unwrap();
    assert_eq!(classify_joint(&abs, 0.0, &cfg).unwrap(), JointType::First);
    let xs2 = grid(0.0, 2.0, 41);
    let kink = SampledFunction::from_fn(xs2.clone(), |x| if x <= 1.0 { x } else { 2.0 * x - 1.0 })
        .unwrap();
    assert_eq!(classify_joint(&kink, 1.0, &cfg).unwrap(), JointType::Second);
    let vee = SampledFunction::from_fn(xs2.clone(), |x| if x <= 1.0 { x } else { 3.0 - 2.0 * x })
        .unwrap();
    assert_eq!(classify_joint(&vee, 1.0, &cfg).unwrap(), JointType::First);
    let flat = SampledFunction::from_fn(xs2.clone(), |x| if x <= 1.0 { 1.0 } else { x }).unwrap();
    assert_eq!(classify_joint(&flat, 1.0, &cfg).unwrap(), JointType::Third);
    let smooth = SampledFunction::from_fn(xs2, |x| x * x).unwrap();
    assert_eq!(classify_joint(&smooth, 1.0, &cfg).unwrap(), JointType::None);
    assert!(matches!(
        classify_joint(&abs, -1.0, &cfg),
        Err(DetachError::Boundary(0))
    ));
}

#[test]
fn extrema_examples() {
    let cfg = cfg();
    let sq = SampledFunction::from_fn(grid(-2.0, 2.0, 41), |x| x * x).unwrap();
    let ext = find_extrema(&sq, &cfg);
    assert_eq!(ext.len(), 1);
    assert_eq!((ext[0].index, ext[0].kind), (20, ExtremumKind::Min));
    assert!(ext[0].x.abs() < 1e-12);
    let ramp = SampledFunction::from_fn(grid(0.0, 1.0, 50), |x| 3.0 * x).unwrap();
    assert!(find_extrema(&ramp, &cfg).is_empty());

    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut y = 0.0;
    let ys: Vec<f64> = (0..1000)
        .map(|_| {
            y += rng.random_range(-1.0..1.0);
            y
        })
        .collect();
    let walk = SampledFunction::new((0..1000).map(f64::from).collect(), ys.clone()).unwrap();
    let got: Vec<_> = find_extrema(&walk, &cfg)
        .into_iter()
        .map(|e| (e.index, e.kind))
        .collect();
    let want: Vec<_> = (1..999)
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
        .collect();
    assert_eq!(got, want);
}

#[test]
fn tendency_examples() {
    let cfg = cfg();
    let sq = FnProbe::new(|x: f64| x * x);
    assert_eq!(tendency(&sq, 0.0, &cfg).unwrap(), Sign::Zero);
    assert_eq!(tendency(&sq, 1.0, &cfg).unwrap(), Sign::Pos);
    assert_eq!(tendency(&sq, -1.0, &cfg).unwrap(), Sign::Neg);
    let ramp = SampledFunction::from_fn(grid(0.0, 1.0, 11), |x| x).unwrap();
    assert_eq!(tendency(&ramp, 0.5, &cfg).unwrap(), Sign::Pos);
    assert_eq!(tendency(&ramp, 1.0, &cfg).unwrap(), Sign::Pos);
    assert!(matches!(
        tendency(&oscillating(), 0.0, &cfg),
        Err(DetachError::NotTendable("each"))
    ));
    let stair =
        SampledFunction::new(grid(0.0, 1.0, 6), vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
    assert_eq!(tendency(&stair, 0.4, &cfg).unwrap(), Sign::Pos);
    assert_eq!(tendency(&stair, 0.6, &cfg).unwrap(), Sign::Zero);
    assert_eq!(tendency(&stair, 0.2, &cfg).unwrap(), Sign::Zero);
}
