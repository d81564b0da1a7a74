//! Sampled `C^m` norms of the bump and of the base field.

use scalar_jet::{Prec, Scalar};

use crate::bumps::{bump_jet, Bump};
use crate::sergeraert::SergeraertField;
use crate::FieldError;

/// Points per support interval.
pub const GRID: usize = 1 << 12;

/// Precision of the sampling sweeps.
pub const SAMPLE_BITS: u32 = 256;

/// Safety factor applied to sampled suprema.
pub const SAFETY: i64 = 2;

fn sample_prec() -> Prec {
    Prec::new(SAMPLE_BITS).expect("sample precision")
}

fn grid(lo: &Scalar, hi: &Scalar, n: usize) -> Vec<Scalar> {
    let step = (hi - lo).div_i(n as i64 - 1);
    (0..n).map(|i| lo + &step.mul_i(i as i64)).collect()
}

/// `[‖γ‖_0, …, ‖γ‖_max_order]`, sampled and scaled by the safety factor.
pub fn gamma_norms(max_order: usize, p: Prec) -> Vec<Scalar> {
    let sp = sample_prec();
    let lo = Scalar::ratio(-1, 4, sp);
    let hi = Scalar::ratio(1, 4, sp);
    let mut sup = vec![Scalar::zero(sp); max_order + 1];
    for t in grid(&lo, &hi, GRID) {
        let j = bump_jet(Bump::Gamma, &t, max_order);
        for (s, c) in sup.iter_mut().zip(j.coeffs()) {
            *s = s.max(&c.abs());
        }
    }
    let mut acc = Scalar::zero(sp);
    sup.iter()
        .map(|s| {
            acc = acc.max(s);
            acc.mul_i(SAFETY).with_prec(p)
        })
        .collect()
}

/// Sampled `sup |D^m ξ₀|` for `m ≤ order` on block `n`.
pub fn block_derivative_sup(field: &SergeraertField, n: u32, order: usize) -> Result<Vec<Scalar>, FieldError> {
    let sp = sample_prec();
    let lo = Scalar::pow2(-(n as i64) - 1, sp);
    let hi = Scalar::pow2(-(n as i64), sp);
    let mut sup = vec![Scalar::zero(sp); order + 1];
    for x in grid(&lo, &hi, GRID) {
        let j = field.xi0_jet(&x, order)?;
        for (s, c) in sup.iter_mut().zip(j.coeffs()) {
            *s = s.max(&c.abs());
        }
    }
    Ok(sup)
}

/// `‖ξ₀‖₁` over `[2^{-n_max-1}, ∞)`, sampled and scaled by the safety factor.
pub fn xi0_c1_norm(field: &SergeraertField, n_max: u32, p: Prec) -> Result<Scalar, FieldError> {
    // ξ₀ = -1 on [1, ∞)
    let mut best = Scalar::one(sample_prec());
    for n in 0..=n_max {
        for s in block_derivative_sup(field, n, 1)? {
            best = best.max(&s);
        }
    }
    Ok(best.mul_i(SAFETY).with_prec(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_norms_are_monotone() {
        let ns = gamma_norms(4, Prec::new(128).unwrap());
        for w in ns.windows(2) {
            assert!(w[0] <= w[1]);
        }
        // D²γ(0) = 1
        assert!(ns[2] >= Scalar::from_i64(2, Prec::new(128).unwrap()));
    }
}
