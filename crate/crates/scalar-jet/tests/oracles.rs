//! Jet engine against exact rational oracles and finite differences.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};
use scalar_jet::{jet_L, jet_compose, jet_invert, Jet, Prec, Scalar, Series};

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn to_scalar(r: &Q, p: Prec) -> Scalar {
    let num: Integer = r.numer().to_string().parse().unwrap();
    let den: Integer = r.denom().to_string().parse().unwrap();
    Scalar::from_rational(&Rational::from((num, den)), p)
}

fn fact(k: usize) -> Q {
    (1..=k).fold(Q::one(), |a, i| a * q(i as i64, 1))
}

// ---- exact polynomial helpers -------------------------------------------------

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

fn poly_compose(outer: &[Q], inner: &[Q]) -> Vec<Q> {
    let mut acc = vec![outer[outer.len() - 1].clone()];
    for c in outer.iter().rev().skip(1) {
        acc = poly_mul(&acc, inner);
        acc[0] += c;
    }
    acc
}

fn poly_eval(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |a, c| a * x + c)
}

/// Raw derivatives at `x` of the polynomial with coefficients `p`, up to `m`.
fn poly_jet(p: &[Q], x: &Q, m: usize) -> Vec<Q> {
    let shifted = poly_compose(p, &[x.clone(), Q::one()]);
    (0..=m).map(|k| shifted.get(k).cloned().unwrap_or_else(Q::zero) * fact(k)).collect()
}

fn jet_from(base: &Q, d: &[Q], p: Prec) -> Jet {
    Jet::new(to_scalar(base, p), d.iter().map(|c| to_scalar(c, p)).collect()).unwrap()
}

fn rel_err(a: &Scalar, b: &Q) -> f64 {
    let p = a.prec();
    let bs = to_scalar(b, p.plus(64));
    if b.is_zero() {
        return a.log2_abs();
    }
    Scalar::rel_diff(&a.with_prec(p.plus(64)), &bs).log2_abs()
}

struct Draw(ChaCha8Rng);
impl Draw {
    fn new(seed: u64) -> Self {
        Draw(ChaCha8Rng::seed_from_u64(seed))
    }
    fn next(&mut self) -> i64 {
        self.0.gen_range(1..=9)
    }
}

// ---- composition --------------------------------------------------------------

#[test]
fn faa_di_bruno_matches_symbolic_expansion() {
    let p = Prec::new(1024).unwrap();
    let x = q(3, 10);
    let mut rng = Draw::new(17);
    for _ in 0..8 {
        let h: Vec<Q> = (0..5).map(|_| q(rng.next(), rng.next())).collect();
        let g: Vec<Q> = (0..5).map(|_| q(rng.next(), rng.next())).collect();
        let gx = poly_eval(&g, &x);
        let jg = jet_from(&x, &poly_jet(&g, &x, 4), p);
        let jh = jet_from(&gx, &poly_jet(&h, &gx, 4), p);
        let got = jet_compose(&jh, &jg).unwrap();
        let want = poly_jet(&poly_compose(&h, &g), &x, 4);
        for k in 0..=4 {
            let e = rel_err(got.d(k), &want[k]);
            assert!(e <= -(p.bits() as f64) + 8.0, "order {k}: log2 rel err {e}");
        }
    }
}

// ---- inversion ----------------------------------------------------------------

#[test]
fn inverse_of_cubic_matches_lagrange_series() {
    let p = Prec::new(1024).unwrap();
    let x0 = q(1, 5);
    let g = [Q::zero(), Q::one(), Q::zero(), Q::one()];
    let jg = jet_from(&x0, &poly_jet(&g, &x0, 4), p);
    let inv = jet_invert(&jg).unwrap();
    // frozen reversion coefficients of x + x³ at x = 1/5
    let want = [q(1, 5), q(25, 28), q(-9375, 10976), q(-5859375, 4302592), q(41748046875, 1686616064)];
    assert!(rel_err(inv.base(), &q(26, 125)) < -1000.0);
    for (k, w) in want.iter().enumerate() {
        let e = rel_err(inv.d(k), w);
        assert!(e < -(p.bits() as f64) / 2.0, "order {k}: {e}");
    }
}

#[test]
fn lagrange_oracle_reproduces_frozen_values() {
    // independent check of the frozen constants above
    let a1 = q(28, 25);
    let a2 = q(3, 5);
    let a3 = Q::one();
    let n = 5;
    let mut inv = vec![Q::zero(); n];
    inv[0] = a1.recip();
    for k in 1..n {
        let mut s = Q::zero();
        if k >= 1 {
            s += &a2 * &inv[k - 1];
        }
        if k >= 2 {
            s += &a3 * &inv[k - 2];
        }
        inv[k] = -s / &a1;
    }
    let mut pw = vec![Q::one()];
    let mut out = vec![];
    for m in 1..n {
        pw = poly_mul(&pw, &inv);
        pw.truncate(n);
        out.push(pw[m - 1].clone() / q(m as i64, 1) * fact(m));
    }
    assert_eq!(out, vec![q(25, 28), q(-9375, 10976), q(-5859375, 4302592), q(41748046875, 1686616064)]);
}

#[test]
fn invert_round_trip_is_identity() {
    let p = Prec::new(768).unwrap();
    let mut rng = Draw::new(5);
    for _ in 0..6 {
        let d: Vec<Q> = (0..6).map(|_| q(rng.next() - 5, rng.next())).collect();
        let mut d = d;
        d[1] = q(rng.next(), 3);
        let j = jet_from(&q(1, 7), &d, p);
        let back = jet_compose(&jet_invert(&j).unwrap(), &j).unwrap();
        assert!(Scalar::rel_diff(back.value(), j.base()).log2_abs() < -(p.bits() as f64) / 2.0);
        assert!((back.d(1) - Scalar::one(p)).log2_abs() < -(p.bits() as f64) / 2.0);
        for k in 2..=5 {
            assert!(back.d(k).log2_abs() < -(p.bits() as f64) / 2.0, "order {k}");
        }
    }
}

// ---- operator L -------------------------------------------------------------------

#[test]
fn chain_rule_for_l() {
    let p = Prec::new(512).unwrap();
    let mut rng = Draw::new(99);
    for _ in 0..10 {
        let g = jet_from(&q(1, 3), &[q(rng.next(), 2), q(rng.next(), 1), q(rng.next() - 5, 3), q(rng.next(), 7)], p);
        let h = Jet::new(
            g.value().clone(),
            vec![q(rng.next(), 4), q(rng.next(), 1), q(5 - rng.next(), 2), q(rng.next(), 5)]
                .iter()
                .map(|c| to_scalar(c, p))
                .collect(),
        )
        .unwrap();
        let direct = jet_L(&jet_compose(&h, &g).unwrap()).unwrap();
        let rule = jet_L(&h).unwrap() * g.d(1) + jet_L(&g).unwrap();
        assert!((direct - rule).log2_abs() < -(p.bits() as f64) / 2.0);
    }
}

#[test]
fn l_of_half_square() {
    let p = Prec::new(512).unwrap();
    let j = jet_from(&Q::zero(), &[Q::zero(), Q::one(), Q::one()], p);
    assert!(jet_L(&j).unwrap() == Scalar::one(p));
}

// ---- finite differences ---------------------------------------------------------

fn gauss_series(x: &Scalar, n: usize) -> Series {
    // exp(t²) around x
    let v = Series::variable(x.clone(), n);
    v.mul(&v).exp()
}

#[test]
fn derivatives_match_central_differences() {
    let p = Prec::new(512).unwrap();
    let x = Scalar::ratio(2, 5, p);
    let jet = Jet::from_series(x.clone(), &gauss_series(&x, 5));
    let h = Scalar::pow2(-40, p);
    let f = |t: &Scalar| gauss_series(t, 1).0[0].clone();
    for k in 1..=4usize {
        let mut acc = Scalar::zero(p);
        let mut binom = 1i64;
        for i in 0..=k {
            let off = Scalar::ratio(k as i64 - 2 * i as i64, 2, p) * &h;
            let term = f(&(&x + &off)).mul_i(binom);
            acc = if i % 2 == 0 { acc + term } else { acc - term };
            binom = binom * (k as i64 - i as i64) / (i as i64 + 1);
        }
        let fd = acc / h.powi(k as i32);
        let rel = Scalar::rel_diff(&fd, jet.d(k)).to_f64();
        assert!(rel < 1e-6, "order {k}: {rel}");
    }
}
