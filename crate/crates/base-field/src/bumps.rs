//! Smooth step and bump functions with exact plateaus.
//!
//! `e(x) = exp(-1/x)` for `x > 0`, `s(x) = e(x) / (e(x) + e(1 - x))`.
//! Outside the open transition windows every function returns an exact
//! constant jet, so plateau derivatives are exactly zero.

use rug::Rational;
use scalar_jet::{Jet, Scalar, Series};

/// Which bump to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bump {
    Alpha,
    Beta,
    Gamma,
}

/// Taylor series of the step `s` at `z`, `len` terms.
pub fn step_series(z: &Scalar, len: usize) -> Series {
    let p = z.prec();
    if !z.is_positive() {
        return Series::zeros(len, p);
    }
    if z >= &Scalar::one(p) {
        return Series::constant(Scalar::one(p), len);
    }
    // s = 1 / (1 + e^λ) with λ = 1/z - 1/(1-z)
    let v = Series::variable(z.clone(), len);
    let w = v.neg().add_constant(&Scalar::one(p));
    let lam = v.recip().sub(&w.recip());
    if lam.coeff(0).is_sign_negative() {
        let e = lam.exp();
        e.add_constant(&Scalar::one(p)).recip()
    } else {
        let e = lam.neg().exp();
        e.div(&e.add_constant(&Scalar::one(p)))
    }
}

/// Jet of `x ↦ s(c0 + c1·x)` at `x`.
fn step_affine(x: &Scalar, c0: &Scalar, c1: i64, len: usize) -> Series {
    let z = &x.mul_i(c1) + c0;
    step_series(&z, len).rescale(&Scalar::from_i64(c1, x.prec()))
}

/// Value of `s` at `z`.
pub fn step(z: &Scalar) -> Scalar {
    step_series(z, 1).coeff(0).clone()
}

/// Jet of the step itself.
pub fn step_jet(z: &Scalar, order: usize) -> Jet {
    Jet::from_series(z.clone(), &step_series(z, order + 1))
}

fn cutoff_series(t: &Scalar, len: usize) -> Series {
    let p = t.prec();
    let a = t.abs();
    if a.cmp_rational(&Rational::from((1, 20))).is_le() {
        return Series::constant(Scalar::one(p), len);
    }
    if a.cmp_rational(&Rational::from((1, 4))).is_ge() {
        return Series::zeros(len, p);
    }
    let sign = if t.is_sign_negative() { 1 } else { -1 };
    step_affine(t, &Scalar::ratio(5, 4, p), 5 * sign, len)
}

fn bump_series(which: Bump, x: &Scalar, len: usize) -> Series {
    let p = x.prec();
    match which {
        Bump::Alpha => step_affine(x, &Scalar::from_i64(-1, p), 6, len),
        Bump::Beta => {
            let up = step_affine(x, &Scalar::from_i64(-1, p), 6, len);
            let down = step_affine(x, &Scalar::from_i64(5, p), -6, len);
            up.mul(&down)
        }
        Bump::Gamma => {
            let chi = cutoff_series(x, len);
            if chi.coeff(0).is_zero() && chi.is_constant() {
                return chi;
            }
            let mut sq = Series::zeros(len, p);
            sq.0[0] = x.square().mul_pow2(-1);
            if len > 1 {
                sq.0[1] = x.clone();
            }
            if len > 2 {
                sq.0[2] = Scalar::one(p).mul_pow2(-1);
            }
            if chi.is_constant() && chi.coeff(0) == &Scalar::one(p) {
                sq
            } else {
                sq.mul(&chi)
            }
        }
    }
}

/// Jet of a bump at `x`; total on the real line.
pub fn bump_jet(which: Bump, x: &Scalar, order: usize) -> Jet {
    Jet::from_series(x.clone(), &bump_series(which, x, order + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use scalar_jet::Prec;

    fn p() -> Prec {
        Prec::new(512).unwrap()
    }

    #[test]
    fn step_symmetry() {
        let z = Scalar::ratio(3, 10, p());
        let w = Scalar::ratio(7, 10, p());
        let sum = step(&z) + step(&w);
        assert!((sum - Scalar::one(p())).log2_abs() < -500.0);
        assert!(step(&Scalar::ratio(1, 2, p())) == Scalar::ratio(1, 2, p()));
    }

    #[test]
    fn exact_plateaus() {
        let j = bump_jet(Bump::Alpha, &Scalar::ratio(1, 10, p()), 6);
        assert!(j.coeffs().iter().all(Scalar::is_zero));
        let j = bump_jet(Bump::Beta, &Scalar::ratio(1, 2, p()), 6);
        assert!(j.value() == &Scalar::one(p()));
        assert!(j.coeffs()[1..].iter().all(Scalar::is_zero));
        let j = bump_jet(Bump::Gamma, &Scalar::ratio(3, 10, p()), 4);
        assert!(j.coeffs().iter().all(Scalar::is_zero));
    }

    #[test]
    fn gamma_value_does_not_depend_on_order() {
        let t = Scalar::ratio(-3, 20, p());
        let v0 = bump_jet(Bump::Gamma, &t, 0).value().clone();
        let v3 = bump_jet(Bump::Gamma, &t, 3).value().clone();
        assert!(v0 == v3);
        // χ(3/20) = s(1/2) = 1/2
        assert!((v0 - t.square().mul_pow2(-2)).abs().log2_abs() < -500.0);
    }

    #[test]
    fn gamma_is_half_square_near_zero() {
        let t = Scalar::ratio(1, 100, p());
        let j = bump_jet(Bump::Gamma, &t, 4);
        assert!(j.value() == &t.square().mul_pow2(-1));
        assert!(j.d(1) == &t);
        assert!(j.d(2) == &Scalar::one(p()));
        assert!(j.d(3).is_zero() && j.d(4).is_zero());
    }

    #[test]
    fn tiny_argument_underflows_to_zero() {
        let z = Scalar::pow2(-40, p());
        let s = step_series(&z, 4);
        assert!(s.0.iter().all(|c| c.is_finite()));
        assert!(s.coeff(0).log2_abs() < -1e12);
    }

    #[test]
    fn near_one_is_finite() {
        let z = Scalar::one(p()) - Scalar::pow2(-40, p());
        let s = step_series(&z, 4);
        assert!(s.0.iter().all(|c| c.is_finite()));
        assert!((s.coeff(0) - Scalar::one(p())).log2_abs() < -1e12);
    }
}
