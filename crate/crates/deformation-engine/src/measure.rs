//! Sampled norms used by the stage estimates.

use base_field::BaseFieldOracle;
use scalar_jet::{Jet, Scalar};

use crate::stack::{ConjugationStack, Deformed};
use crate::DeformError;

fn sup_range(j: &Jet, lo: usize, hi: usize, acc: &mut Scalar) {
    *acc = acc.max(&j.max_abs(lo, hi));
}

/// `max_{1 ≤ m ≤ order} sup |D^m Φ_k|` over `times`.
pub fn dphi_norm(stack: &ConjugationStack, k: usize, order: usize, times: &[Scalar]) -> Result<Scalar, DeformError> {
    let mut sup = Scalar::zero(stack.prec());
    for t in times {
        sup_range(&stack.stack_jet(k, t, order)?, 1, order, &mut sup);
    }
    Ok(sup)
}

/// Sampled `‖Φ_k - id‖_2` restricted to the derivative part, `max(|DΦ_k - 1|, |D²Φ_k|)`.
pub fn dphi_deviation(stack: &ConjugationStack, k: usize, times: &[Scalar]) -> Result<Scalar, DeformError> {
    let p = stack.prec();
    let mut sup = Scalar::zero(p);
    for t in times {
        let j = stack.stack_jet(k, t, 2)?;
        sup = sup.max(&j.d(1).add_i(-1).abs()).max(&j.d(2).abs());
    }
    Ok(sup)
}

/// Sampled `‖Φ_k - Φ_{k-1}‖_{k+1}`.
pub fn phi_step_norm(stack: &ConjugationStack, k: usize, times: &[Scalar]) -> Result<Scalar, DeformError> {
    let mut sup = Scalar::zero(stack.prec());
    for t in times {
        let a = stack.stack_jet(k, t, k + 1)?;
        let b = stack.stack_jet(k - 1, t, k + 1)?;
        sup_range(&a.sub(&b)?, 0, k + 1, &mut sup);
    }
    Ok(sup)
}

/// Sampled `‖ξ_k - ξ_{k-1}‖_1`.
pub fn xi_step_norm<O: BaseFieldOracle + ?Sized>(d: &Deformed<'_, O>, k: usize, xs: &[Scalar]) -> Result<Scalar, DeformError> {
    let mut sup = Scalar::zero(d.stack.prec());
    for x in xs {
        let a = d.xi_k_jet(k, x, 1)?;
        let b = d.xi_k_jet(k - 1, x, 1)?;
        sup_range(&a.sub(&b)?, 0, 1, &mut sup);
    }
    Ok(sup)
}

/// Sampled `‖f_k^t - f_{k-1}^t‖_k`.
pub fn flow_step_norm<O: BaseFieldOracle + ?Sized>(d: &Deformed<'_, O>, k: usize, t: &Scalar, xs: &[Scalar]) -> Result<Scalar, DeformError> {
    let mut sup = Scalar::zero(d.stack.prec());
    for x in xs {
        let a = d.flow_jet(k, t, x, k)?;
        let b = d.flow_jet(k - 1, t, x, k)?;
        sup_range(&a.sub(&b)?, 0, k, &mut sup);
    }
    Ok(sup)
}
