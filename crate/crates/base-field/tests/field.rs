use base_field::{
    block_derivative_sup, bump_jet, gamma_norms, xi0_c1_norm, Bump, FieldError, SergeraertField,
};
use proptest::prelude::*;
use scalar_jet::{Prec, Scalar};

fn p() -> Prec {
    Prec::new(512).unwrap()
}

fn field() -> SergeraertField {
    SergeraertField::default()
}

fn all_zero(c: &[Scalar]) -> bool {
    c.iter().all(Scalar::is_zero)
}

#[test]
fn unit_speed_beyond_one() {
    let j = field().xi0_jet(&Scalar::from_i64(2, p()), 6).unwrap();
    assert!(j.value() == &Scalar::from_i64(-1, p()));
    assert!(all_zero(&j.coeffs()[1..]));
}

#[test]
fn u3_plateau_center() {
    let j = field().xi0_jet(&Scalar::pow2(-3, p()), 6).unwrap();
    assert!(j.value() == &-Scalar::pow2(-81, p()));
    assert!(all_zero(&j.coeffs()[1..]));
}

#[test]
fn block_one_point() {
    let j = field().xi0_jet(&Scalar::from_f64(0.4375, p()), 6).unwrap();
    assert!(j.value() == &-Scalar::pow2(-1, p()));
    assert!(all_zero(&j.coeffs()[1..]));
}

#[test]
fn v_plateaus_are_exact() {
    for n in 1..=7u32 {
        // center of [2^{-n-1}, 2^{-n}]
        let x = Scalar::ratio(3, 4, p()).mul_pow2(-(n as i32));
        let j = field().xi0_jet(&x, 4).unwrap();
        assert!(j.value() == &-field().v(n, p()));
        assert!(all_zero(&j.coeffs()[1..]));
    }
}

#[test]
fn origin_is_rejected() {
    assert_eq!(field().xi0_jet(&Scalar::zero(p()), 2), Err(FieldError::Origin));
    assert_eq!(field().xi0_jet(&Scalar::from_i64(-1, p()), 2), Err(FieldError::Origin));
    assert_eq!(field().xi0_jet(&Scalar::one(p()), 13), Err(FieldError::OrderTooLarge(13)));
    assert!(base_field::origin_jet(3, p()).coeffs().iter().all(Scalar::is_zero));
}

#[test]
fn alpha_below_window() {
    let j = bump_jet(Bump::Alpha, &Scalar::from_f64(0.1, p()), 5);
    assert!(all_zero(j.coeffs()));
}

#[test]
fn gamma_near_zero() {
    let t = Scalar::from_f64(0.01, p());
    let j = bump_jet(Bump::Gamma, &t, 5);
    assert!((j.value().to_f64() - 5e-5).abs() < 1e-18);
    assert!(j.d(1) == &t);
    assert!(j.d(2) == &Scalar::one(p()));
    assert!(all_zero(&j.coeffs()[3..]));
}

fn central_difference(f: impl Fn(&Scalar) -> Scalar, x: &Scalar, k: usize, h: &Scalar) -> Scalar {
    let mut acc = Scalar::zero(x.prec());
    let mut binom = 1i64;
    for i in 0..=k {
        let off = Scalar::ratio(k as i64 - 2 * i as i64, 2, x.prec()) * h;
        let term = f(&(x + &off)).mul_i(binom);
        acc = if i % 2 == 0 { acc + term } else { acc - term };
        binom = binom * (k as i64 - i as i64) / (i as i64 + 1);
    }
    acc / h.powi(k as i32)
}

#[test]
fn beta_matches_finite_differences() {
    let x = Scalar::ratio(1, 4, p());
    let j = bump_jet(Bump::Beta, &x, 2);
    let h = Scalar::pow2(-40, p());
    let f = |t: &Scalar| bump_jet(Bump::Beta, t, 0).value().clone();
    for k in 1..=2 {
        let fd = central_difference(f, &x, k, &h);
        // D²β(1/4) = 0 by the symmetry of s about 1/2, so scale by max(1, |D^k β|)
        let scale = j.d(k).abs().max(&Scalar::one(p()));
        assert!(((&fd - j.d(k)) / scale).abs().to_f64() < 1e-6, "order {k}");
    }
}

#[test]
fn xi0_transition_matches_finite_differences() {
    let f = field();
    // inside B_2 and A_3
    for x in [Scalar::ratio(5, 48, p()), Scalar::ratio(29, 384, p())] {
        let j = f.xi0_jet(&x, 3).unwrap();
        let h = Scalar::pow2(-48, p());
        for k in 1..=3 {
            let fd = central_difference(|t| f.xi0(t).unwrap(), &x, k, &h);
            assert!(Scalar::rel_diff(&fd, j.d(k)).to_f64() < 1e-6, "order {k}");
        }
    }
}

#[test]
fn continuity_at_block_boundaries() {
    let f = field();
    for n in 0..=7 {
        let b = Scalar::pow2(-n, p());
        let eps = Scalar::pow2(-400, p());
        let l = f.xi0(&(&b - &eps)).unwrap();
        let r = f.xi0(&(&b + &eps)).unwrap();
        assert!(l == r, "boundary 2^-{n}");
    }
}

#[test]
fn c1_norm_is_finite_and_above_one() {
    let sp = Prec::new(256).unwrap();
    let sup0 = block_derivative_sup(&field(), 0, 1).unwrap();
    assert!(sup0[0] == Scalar::one(sp));
    let norm = xi0_c1_norm(&field(), 7, p()).unwrap();
    let v = norm.to_f64();
    assert!(v > 1.0 && v.is_finite());
    // the steepest transition is the lower one of block 1
    let b1 = block_derivative_sup(&field(), 1, 1).unwrap();
    assert!((norm.to_f64() - 2.0 * b1[1].to_f64()).abs() < 1e-9);
}

#[test]
fn derivatives_decay_towards_origin() {
    let mut prev = f64::INFINITY;
    for n in 3..=7 {
        let sup = block_derivative_sup(&field(), n, 4).unwrap();
        let m = sup.iter().map(|s| s.to_f64()).fold(0.0, f64::max);
        assert!(m < prev, "block {n}: {m} vs {prev}");
        prev = m;
    }
}

#[test]
fn gamma_norm_table() {
    let ns = gamma_norms(3, p());
    // |γ| ≤ 1/32 so the sup of the value is tiny, D²γ(0) = 1
    assert!(ns[0].to_f64() < 0.07);
    assert!(ns[2].to_f64() >= 2.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn xi0_is_negative(m in 1u64..u64::MAX, e in 0i32..9) {
        let x = Scalar::from_f64(m as f64 / u64::MAX as f64, p()).mul_pow2(-e);
        prop_assume!(x.is_positive());
        prop_assert!(field().xi0(&x).unwrap().is_sign_negative());
    }

    #[test]
    fn bumps_stay_in_unit_interval(num in -400i64..400) {
        let x = Scalar::ratio(num, 300, p());
        for b in [Bump::Alpha, Bump::Beta, Bump::Gamma] {
            let v = bump_jet(b, &x, 0).value().to_f64();
            prop_assert!((0.0..=1.0).contains(&v));
        }
        if num.abs() >= 75 {
            prop_assert!(bump_jet(Bump::Gamma, &x, 3).coeffs().iter().all(Scalar::is_zero));
        }
    }
}
