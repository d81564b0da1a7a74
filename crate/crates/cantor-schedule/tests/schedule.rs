use cantor_schedule::intervals::{interior_grid_count, sample_times};
use cantor_schedule::*;
use proptest::prelude::*;
use rug::{Integer, Rational};
use scalar_jet::{Prec, Scalar};

fn p() -> Prec {
    Prec::new(512).unwrap()
}

fn quiet(_: &Scalar) -> Result<Scalar, ScheduleError> {
    Ok(Scalar::zero(p()))
}

/// Smallest odd q above `prev` with two interior grid points per component, avoiding `r`.
fn next_q(prev: u64, set: &IntervalSet, r: &Rational) -> u64 {
    let mut q = prev + 1 + prev % 2;
    loop {
        let avoid = *r.denom() == 1 || !Integer::from(q).is_divisible(r.denom());
        if avoid && set.exact_bounds().iter().all(|(a, b)| interior_grid_count(a, b, q) >= 2) {
            return q;
        }
        q += 2;
    }
}

fn close(x: &Scalar, a: i64, b: i64) -> bool {
    Scalar::rel_diff(x, &Scalar::ratio(a, b, p())).log2_abs() < -500.0
}

fn schedule(depth: usize) -> (Vec<IntervalSet>, Vec<Rational>) {
    let mut sets = vec![IntervalSet::unit(0, p())];
    let mut rs = vec![];
    let mut q = 1;
    for (k, r) in (1..=depth).zip(RationalEnumeration::new()) {
        let parent = sets.last().unwrap().clone();
        q = next_q(q, &parent, &r);
        let tk = select_tk(&parent, q).unwrap();
        let next = refine_ik(&tk, &parent, &r, k, q, 9, p(), quiet).unwrap();
        sets.push(next);
        rs.push(r);
    }
    (sets, rs)
}

#[test]
fn first_stage() {
    let unit = IntervalSet::unit(0, p());
    let tk = select_tk(&unit, 3).unwrap();
    assert_eq!(tk.len(), 2);
    assert_eq!(tk[0].time, Rational::from((1, 3)));
    assert_eq!(tk[1].time, Rational::from((2, 3)));
    let i1 = refine_ik(&tk, &unit, &Rational::from(0), 1, 3, 9, p(), quiet).unwrap();
    // half-width min(1/12, (1/3)/4)
    let want = [(1, 4), (5, 12), (7, 12), (3, 4)];
    let got: Vec<Scalar> = i1.components.iter().flat_map(|c| [c.lo.clone(), c.hi.clone()]).collect();
    for (g, (a, b)) in got.iter().zip(want) {
        assert!(g == &Scalar::ratio(a, b, p()));
    }
}

#[test]
fn grid_times_are_interior_and_two_per_component() {
    let (sets, rs) = schedule(4);
    let mut q = 1;
    for (k, (w, r)) in sets.windows(2).zip(&rs).enumerate() {
        q = next_q(q, &w[0], r);
        let tk = select_tk(&w[0], q).unwrap();
        assert_eq!(tk.len(), 2 << k);
        for g in &tk {
            let c = &w[0].components[g.component];
            assert!(c.lo.cmp_rational(&g.time).is_lt() && c.hi.cmp_rational(&g.time).is_gt());
        }
    }
}

#[test]
fn far_rational_keeps_first_candidate() {
    let unit = IntervalSet::unit(0, p());
    let tk = select_tk(&unit, 5).unwrap();
    let set = refine_ik(&tk, &unit, &Rational::from((9, 10)), 1, 5, 9, p(), quiet).unwrap();
    // 1/5 and 2/5 with half-width min(1/20, (1/5)/4)
    assert!(close(&set.components[0].width(), 1, 10));
    assert!(close(&set.components[1].width(), 1, 10));
}

#[test]
fn nearby_rational_forces_shrinking() {
    let unit = IntervalSet::unit(0, p());
    let tk = select_tk(&unit, 3).unwrap();
    let r = Rational::from((17, 50));
    let set = refine_ik(&tk, &unit, &r, 1, 3, 9, p(), quiet).unwrap();
    assert!(!set.components[0].contains(&r));
    assert!(set.components[0].width() < Scalar::ratio(1, 6, p()));
    assert!(close(&set.components[1].width(), 1, 6));
}

#[test]
fn rational_on_a_grid_point_underflows() {
    let unit = IntervalSet::unit(0, p());
    let tk = select_tk(&unit, 3).unwrap();
    let err = refine_ik(&tk, &unit, &Rational::from((1, 3)), 1, 3, 9, p(), quiet).unwrap_err();
    assert!(matches!(err, ScheduleError::WidthUnderflow { .. }));
}

#[test]
fn bound_drives_the_width() {
    let unit = IntervalSet::unit(0, p());
    let tk = select_tk(&unit, 3).unwrap();
    // distance to the grid time, scaled: acceptable once the interval is narrower than 2^-6
    let centers = [Scalar::ratio(1, 3, p()), Scalar::ratio(2, 3, p())];
    let bound = |t: &Scalar| Ok(centers.iter().map(|c| (t - c).abs()).reduce(|a, b| a.min(&b)).unwrap().mul_pow2(6));
    let set = refine_ik(&tk, &unit, &Rational::from(0), 1, 3, 9, p(), bound).unwrap();
    for c in &set.components {
        assert!(c.width().mul_pow2(-1).mul_pow2(6) <= Scalar::pow2(-1, p()));
    }
    let high = |_: &Scalar| Ok(Scalar::one(p()));
    assert!(matches!(refine_ik(&tk, &unit, &Rational::from(0), 1, 3, 9, p(), high), Err(ScheduleError::Precondition(_))));
}

#[test]
fn nine_sample_times() {
    let c = Component { lo: Scalar::zero(p()), hi: Scalar::one(p()), parent: None };
    let t = sample_times(&c, 9);
    assert_eq!(t.len(), 9);
    assert!(t[4] == Scalar::ratio(1, 2, p()) && t[8] == Scalar::one(p()));
}

#[test]
fn depth_three_structure() {
    let (sets, rs) = schedule(3);
    assert_eq!(sets[3].len(), 8);
    for (k, w) in sets.windows(2).enumerate() {
        w[1].validate(&w[0], &rs[..=k]).unwrap();
    }
    for r in &rs {
        assert!(sets[3].components.iter().all(|c| !c.contains(r)));
    }
    let widths: Vec<Scalar> = sets.iter().map(IntervalSet::max_width).collect();
    assert!(widths.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn addresses() {
    let (sets, rs) = schedule(3);
    let stages = &sets[1..];
    let (lo, hi) = cantor_point(&"".parse().unwrap(), stages, p()).unwrap();
    assert!(lo.is_zero() && hi == Scalar::one(p()));
    let mut prev = Scalar::one(p());
    for len in 1..=3 {
        let a: CantorAddress = "0".repeat(len).parse().unwrap();
        let (lo, hi) = cantor_point(&a, stages, p()).unwrap();
        assert!(&hi - &lo < prev);
        prev = &hi - &lo;
    }
    for bits in 0..8u32 {
        let a: CantorAddress = format!("{:03b}", bits).parse().unwrap();
        let (lo, hi) = cantor_point(&a, stages, p()).unwrap();
        let c = Component { lo, hi, parent: None };
        assert!(rs.iter().all(|r| !c.contains(r)));
    }
    assert!(matches!(cantor_point(&"0000".parse().unwrap(), stages, p()), Err(ScheduleError::AddressTooLong { .. })));
    assert!(matches!("012".parse::<CantorAddress>(), Err(ScheduleError::BadAddress(_))));
    assert_eq!("0110".parse::<CantorAddress>().unwrap().to_string(), "0110");
}

#[test]
fn record_round_trip() {
    let (sets, rs) = schedule(2);
    let rec = sets[2].to_record(&rs);
    let json = serde_json::to_string(&rec).unwrap();
    assert!(json.contains("\"excluded_rationals\":[\"0/1\",\"1/1\"]"));
    let back: IntervalSetRecord = serde_json::from_str(&json).unwrap();
    let (set, ex) = IntervalSet::from_record(&back, p()).unwrap();
    assert_eq!(set, sets[2]);
    assert_eq!(ex, rs);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refinement_avoids_any_rational(num in 1u32..200, den in 201u32..400) {
        let r = Rational::from((num, den));
        let unit = IntervalSet::unit(0, p());
        let q = next_q(1, &unit, &r);
        let tk = select_tk(&unit, q).unwrap();
        prop_assume!(tk.iter().all(|g| g.time != r));
        let set = refine_ik(&tk, &unit, &r, 1, q, 9, p(), quiet).unwrap();
        set.validate(&unit, &[r.clone()]).unwrap();
        prop_assert!(set.components.iter().all(|c| !c.contains(&r)));
    }
}
