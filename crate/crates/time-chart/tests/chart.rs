use std::sync::OnceLock;

use base_field::{oscillation_statistic, BaseFieldOracle, LinearField, SergeraertField};
use proptest::prelude::*;
use rug::Integer;
use scalar_jet::{Prec, Scalar};
use time_chart::*;

fn small() -> &'static TravelTable {
    static T: OnceLock<TravelTable> = OnceLock::new();
    T.get_or_init(|| TravelTable::build(SergeraertField::default(), Prec::new(1024).unwrap(), 5).unwrap())
}

fn full() -> &'static SergeraertChart {
    static C: OnceLock<SergeraertChart> = OnceLock::new();
    C.get_or_init(|| {
        let t = TravelTable::build(SergeraertField::default(), Prec::new(4096).unwrap(), 7).unwrap();
        SergeraertChart::new(t).unwrap()
    })
}

fn at(table: &TravelTable, k: &Integer) -> Scalar {
    table.psi_point(&Scalar::from_integer(k, table.prec())).unwrap()
}

#[test]
fn unit_speed_region() {
    let t = small();
    let p = t.prec();
    assert!(t.travel_time(&Scalar::one(p)).unwrap().is_zero());
    let d = Scalar::ratio(1, 8, p);
    assert!(t.travel_time(&(Scalar::one(p) - &d)).unwrap() == d);
    assert!(t.psi_point(&Scalar::zero(p)).unwrap() == Scalar::one(p));
}

#[test]
fn block_starts_map_to_dyadics() {
    let t = small();
    let p = t.prec();
    for n in 0..=t.n_max() {
        let x = t.psi_point(&t.cumulative(n).unwrap()).unwrap();
        let want = Scalar::pow2(-(n as i64), p);
        assert!(Scalar::rel_diff(&x, &want).log2_abs() < -512.0, "n = {n}");
    }
}

#[test]
fn table_invariants() {
    let t = small();
    let p = t.prec();
    for b in t.blocks() {
        assert!(b.duration().is_positive());
        let next = t.cumulative(b.n + 1).unwrap();
        assert!(&next - &(b.start() + &b.duration()) == Scalar::zero(p));
        // h = 2^{-n-1}/6 and the speeds are powers of two
        let len = Scalar::pow2(-(b.n as i64) - 1, p);
        assert!(b.durations[0] == len.div_i(6).mul_pow2((b.n as i32).pow(4)));
        assert!(b.durations[2] == len.div_i(3).mul_pow2((b.n as i32).pow(2)));
        assert!(b.durations[4] == len.div_i(6).mul_pow2(((b.n + 1) as i32).pow(4)));
        assert!(b.durations.iter().all(Scalar::is_positive));
    }
}

#[test]
fn below_horizon_is_exhausted() {
    let t = small();
    let x = Scalar::pow2(-8, t.prec());
    assert_eq!(t.travel_time(&x), Err(ChartError::TableExhausted));
    let end = t.cumulative(t.n_max() + 1).unwrap().mul_i(2);
    assert_eq!(t.psi_point(&end), Err(ChartError::TableExhausted));
}

#[test]
fn indices_need_n_at_least_four() {
    assert!(matches!(find_indices(small(), 3), Err(ChartError::Precondition(_))));
    assert!(matches!(find_indices(small(), 6), Err(ChartError::Precondition(_))));
}

#[test]
fn indices_at_four_satisfy_windows() {
    let t = small();
    let p = t.prec();
    let o = find_indices(t, 4).unwrap();
    assert!(o.margins.iter().all(Scalar::is_positive));
    let top = Scalar::pow2(-4, p);
    let half = Scalar::pow2(-5, p);
    let i = &o.i;
    let j = &o.j;
    assert!(at(t, &(i.clone() + 2u32)) >= &top - &half.div_i(6));
    assert!(at(t, &(i.clone() + 2u32)) < at(t, &(i.clone() - 1u32)));
    assert!(at(t, &(i.clone() - 1u32)) <= &top + &top.div_i(6));
    assert!(at(t, &(j.clone() + 2u32)) >= &half + &half.div_i(3));
    assert!(at(t, &(j.clone() + 2u32)) < at(t, &(j.clone() - 1u32)));
    assert!(at(t, &(j.clone() - 1u32)) <= &top - &half.div_i(3));
    assert!(j.clone() - i >= 2u32);
}

#[test]
fn one_step_across_the_v_plateau() {
    let t = small();
    let p = t.prec();
    let o = find_indices(t, 4).unwrap();
    let a0 = at(t, &o.j);
    let a1 = at(t, &(o.j.clone() + 1u32));
    let gap = &t.travel_time(&a1).unwrap() - &t.travel_time(&a0).unwrap();
    assert!((gap.add_i(-1)).log2_abs() < -512.0);
    let v4 = Scalar::pow2(-16, p);
    assert!(Scalar::rel_diff(&(&a0 - &a1), &v4).log2_abs() < -512.0);
}

#[test]
fn plateau_translation() {
    let t = small();
    let p = t.prec();
    let o = find_indices(t, 4).unwrap();
    let s = Scalar::from_integer(&o.j, p);
    let base = t.psi_point(&s).unwrap();
    let v4 = Scalar::pow2(-16, p);
    for (a, b) in [(0, 1), (1, 3), (1, 2), (1, 1)] {
        let tau = Scalar::ratio(a, b, p);
        let x = t.psi_point(&(&s + &tau)).unwrap();
        let want = &base - &(&tau * &v4);
        assert!(Scalar::rel_diff(&x, &want).log2_abs() < -512.0);
    }
}

#[test]
fn psi_jet_is_affine_on_u_plateau() {
    let t = small();
    let o = find_indices(t, 4).unwrap();
    let j = t.psi_jet(&Scalar::from_integer(&o.i, t.prec()), 6).unwrap();
    assert!(j.d(1) == &-t.field().u(4, t.prec()));
    assert!((2..=6).all(|k| j.d(k).is_zero()));
}

#[test]
fn psi_jet_matches_differences_on_a_transition() {
    let t = small();
    let p = t.prec();
    // middle of the B transition of block 1
    let b = t.block(1).unwrap();
    let s = (&b.times[3] + &b.times[4]).mul_pow2(-1);
    let jet = t.psi_jet(&s, 3).unwrap();
    assert!(Scalar::rel_diff(jet.d(1), &t.field().xi0(&t.psi_point(&s).unwrap()).unwrap()).log2_abs() < -300.0);
    let e = Scalar::pow2(-40, p);
    let f = |k: i64| t.psi_point(&(&s + &e.mul_i(k))).unwrap();
    let (m2, m1, z, p1, p2) = (f(-2), f(-1), f(0), f(1), f(2));
    let d1 = (&p1 - &m1) / e.mul_i(2);
    let d2 = (&(&p1 + &m1) - &z.mul_i(2)) / e.square();
    let d3 = (&(&(&p2 - &m2) - &p1.mul_i(2)) + &m1.mul_i(2)) / (&e.square() * &e).mul_i(2);
    for (k, fd) in [(1, d1), (2, d2), (3, d3)] {
        let err = Scalar::rel_diff(jet.d(k), &fd).to_f64();
        assert!(err < 1e-6, "order {k}: {err}");
    }
}

#[test]
fn orderings_of_indices() {
    let t = full().table();
    let mut prev: Option<OrbitIndex> = None;
    for n in 4..=7 {
        let o = find_indices(t, n).unwrap();
        assert!(o.margins.iter().all(Scalar::is_positive), "n = {n}");
        assert!(o.i < o.j);
        if let Some(q) = prev {
            assert!(q.j < o.i);
        }
        prev = Some(o);
    }
}

#[test]
fn search_recovers_the_square_trend() {
    let pairs = search_orbit_indices_general(full(), 6).unwrap();
    let ratios: Vec<f64> = pairs.iter().map(|q| q.ratio).collect();
    assert!(ratios.windows(2).all(|w| w[0] < w[1]));
    for want in [16.0, 25.0, 36.0] {
        assert!(ratios.iter().any(|r| (r - want).abs() < 1e-9), "{ratios:?}");
    }
    for q in &pairs {
        assert!(q.i < q.j);
    }
}

#[test]
fn search_fails_without_oscillation() {
    let f = LinearField { prec: Prec::new(128).unwrap(), horizon_log2: -64 };
    assert!(matches!(search_orbit_indices_general(&f, 3), Err(ChartError::Budget(_))));
    assert!(search_orbit_indices_general(&f, 0).unwrap().is_empty());
}

#[test]
fn oscillation_statistic_grows_like_n_squared() {
    let c = full();
    for n in 4..=6u32 {
        // centre of the u_n plateau at the top of block n
        let x = Scalar::ratio(23, 12, c.prec()).mul_pow2(-(n as i32) - 1);
        let s = oscillation_statistic(c, &x).unwrap().to_f64();
        assert!((s - (n * n) as f64).abs() < 1e-6, "n = {n}: {s}");
    }
}

#[test]
fn plan_json_shape() {
    let t = small();
    let plan = Plan::from_table(t).unwrap();
    let v: serde_json::Value = serde_json::to_value(&plan).unwrap();
    assert_eq!(v["blocks"].as_array().unwrap().len(), 6);
    assert!(v["blocks"][2]["C_hex"].as_str().unwrap().starts_with("+0x1."));
    let ix = &v["indices"][0];
    assert_eq!(ix["n"], 4);
    let i: Integer = ix["i"].as_str().unwrap().parse().unwrap();
    assert_eq!(i, find_indices(t, 4).unwrap().i);
    let back: Plan = serde_json::from_value(v).unwrap();
    assert_eq!(back, plan);
}

fn time_in(t: &TravelTable, frac: f64, blocks: u32) -> Scalar {
    let end = t.cumulative(blocks).unwrap();
    &end * &Scalar::from_f64(frac, t.prec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip(frac in 0.0f64..1.0) {
        let t = small();
        let s = time_in(t, frac, 3);
        let back = t.travel_time(&t.psi_point(&s).unwrap()).unwrap();
        let scale = s.abs().max(&Scalar::one(t.prec()));
        prop_assert!((&(&back - &s).abs() / &scale).log2_abs() <= -256.0);
    }

    #[test]
    fn travel_time_decreases(a in 0.02f64..0.999, b in 0.02f64..0.999) {
        prop_assume!(a != b);
        let t = small();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let p = t.prec();
        prop_assert!(t.travel_time(&Scalar::from_f64(lo, p)).unwrap() > t.travel_time(&Scalar::from_f64(hi, p)).unwrap());
    }
}
