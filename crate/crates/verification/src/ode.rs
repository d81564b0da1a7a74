//! Independent flow oracle: Taylor integration of `dx/ds = ξ_k(x)`.
//!
//! At each step the local solution is found by reverting the series of
//! `S(δ) = ∫_0^δ dy / ξ_k(x + y)`, so `x(s) = x + S⁻¹(s)`. No chart, no
//! conjugation: the only input is the Taylor series of the field at the current point.

use base_field::BaseFieldOracle;
use deformation_engine::Deformed;
use scalar_jet::{Prec, Scalar, Series};

use crate::VerifyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaylorConfig {
    /// Number of Taylor terms of the local solution.
    pub order: usize,
    /// Local error per step below `2^{-tol_bits}·|x|`.
    pub tol_bits: u32,
    pub max_steps: usize,
}

impl TaylorConfig {
    pub fn for_precision(bits: u32) -> Self {
        TaylorConfig { order: 32, tol_bits: bits / 4, max_steps: 4096 }
    }

    /// Working precision of the series reversion.
    pub fn working(&self) -> Result<Prec, VerifyError> {
        Prec::new(self.tol_bits + 64).map_err(|e| VerifyError::Config(e.to_string()))
    }
}

fn with_prec(s: &Series, p: Prec) -> Series {
    Series(s.0.iter().map(|c| c.with_prec(p)).collect())
}

/// Series of `δ(s)` with `x(s) = x + δ(s)` from the series `a` of the field at `x`.
pub fn local_solution(a: &Series) -> Series {
    let n = a.len();
    let p = a.prec();
    let s = a.recip().integrate(Scalar::zero(p)).truncate(n);
    let mut ident = Series::zeros(n, p);
    if n > 1 {
        ident.0[1] = Scalar::one(p);
    }
    let mut delta = ident.scale(&a.0[0]);
    let mut good = 2;
    // Newton on series: δ ← δ - (S∘δ - s)·(ξ∘δ); each pass doubles the exact terms
    while good < n {
        let r = s.compose(&delta).sub(&ident);
        delta = delta.sub(&r.mul(&a.compose(&delta)));
        good *= 2;
    }
    let r = s.compose(&delta).sub(&ident);
    delta.sub(&r.mul(&a.compose(&delta)))
}

/// Step length with `|c_m h^m| ≤ tol` for the two highest terms.
fn step_length(delta: &Series, tol: &Scalar, remaining: &Scalar) -> Scalar {
    let n = delta.len();
    let mut h = remaining.abs();
    for m in [n - 1, n - 2] {
        let c = delta.coeff(m).abs();
        if c.is_zero() {
            continue;
        }
        let r = (tol / &c).ln().div_i(m as i64).exp();
        h = h.min(&r);
    }
    h
}

/// `f_k^t(x)` by Taylor integration.
pub fn ode_oracle_flow<O: BaseFieldOracle + ?Sized>(
    d: &Deformed<'_, O>,
    k: usize,
    t: &Scalar,
    x: &Scalar,
    cfg: &TaylorConfig,
) -> Result<Scalar, VerifyError> {
    let p = d.stack.prec();
    let wp = cfg.working()?;
    let mut x = x.with_prec(p);
    let mut left = t.with_prec(p);
    let backward = left.is_sign_negative();
    for _ in 0..cfg.max_steps {
        if left.is_zero() {
            return Ok(x);
        }
        if !x.is_positive() {
            return Err(VerifyError::StepUnderflow(x.to_f64()));
        }
        let a = with_prec(&d.xi_k_series(k, &x, cfg.order)?, wp);
        let delta = local_solution(&a);
        let tol = Scalar::pow2(-(cfg.tol_bits as i64), wp) * x.abs().with_prec(wp);
        let mut h = step_length(&delta, &tol, &left.with_prec(wp)).with_prec(p);
        if h >= left.abs() {
            h = left.abs();
        } else if h.is_zero() || (&h / &left.abs()).log2_abs() < -(cfg.tol_bits as f64) {
            return Err(VerifyError::StepUnderflow(x.to_f64()));
        }
        let h = if backward { -h } else { h };
        x = &x + &delta.eval(&h.with_prec(wp)).with_prec(p);
        left = &left - &h;
        // the last step is taken exactly to the end
        if left.abs() <= Scalar::pow2(-(p.bits() as i64), p) * t.abs() {
            left = Scalar::zero(p);
        }
    }
    Err(VerifyError::StepBudget(cfg.max_steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_field_reverts_to_the_exponential() {
        // ξ(x) = -x at x = 1: δ(s) = e^{-s} - 1
        let p = Prec::new(256).unwrap();
        let mut a = Series::zeros(12, p);
        a.0[0] = Scalar::from_i64(-1, p);
        a.0[1] = Scalar::from_i64(-1, p);
        let d = local_solution(&a);
        let mut f = Scalar::one(p);
        for m in 1..12 {
            f = f.mul_i(m as i64);
            let want = Scalar::from_i64(if m % 2 == 0 { 1 } else { -1 }, p) / &f;
            assert!((d.coeff(m) - &want).abs().log2_abs() < -240.0, "m = {m}");
        }
    }

    #[test]
    fn constant_field_is_one_exact_step() {
        let p = Prec::new(256).unwrap();
        let a = Series::constant(Scalar::ratio(-1, 8, p), 8);
        let d = local_solution(&a);
        assert!(d.coeff(1) == &Scalar::ratio(-1, 8, p));
        assert!(d.0[2..].iter().all(Scalar::is_zero));
        let h = step_length(&d, &Scalar::pow2(-200, p), &Scalar::from_i64(5, p));
        assert!(h == Scalar::from_i64(5, p));
    }
}
