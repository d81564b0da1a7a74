//! Structured sample sets.
//!
//! Away from the bump supports of the `φ_l` (and their periodic translates) every
//! map of the construction is a translation, so norms are sampled on those supports,
//! on the middle of each `M_l`, on one far-left cell `[-1, 0]` where the stack commutes
//! with integer translations, and on `M_k` itself.

use base_field::{geometric_grid, BaseFieldOracle};
use rug::Rational;
use scalar_jet::Scalar;

use crate::stack::ConjugationStack;
use crate::DeformError;

/// Points on each bump support.
pub const SUPPORT_POINTS: usize = 33;
/// Number of bump translates sampled in the far-left cell, per stage.
pub const CELL_TRANSLATES: u64 = 12;
/// Points on each sampled translate in the far-left cell.
pub const TRANSLATE_POINTS: usize = 17;
/// Uniform points across the far-left cell.
pub const CELL_POINTS: usize = 129;
/// Uniform points across `M_k`.
pub const M_POINTS: usize = 65;
/// Points per octave of the position grid.
pub const GRID_PER_OCTAVE: u32 = 8;

pub fn uniform(lo: &Scalar, hi: &Scalar, count: usize) -> Vec<Scalar> {
    if count == 1 {
        return vec![(lo + hi).mul_pow2(-1)];
    }
    let step = (hi - lo).div_i(count as i64 - 1);
    (0..count).map(|i| lo + &step.mul_i(i as i64)).collect()
}

fn support(center: &Scalar, q: u64, count: usize) -> Vec<Scalar> {
    let h = Scalar::from_rational(&Rational::from((1, 4 * q)), center.prec());
    uniform(&(center - &h), &(center + &h), count)
}

/// Structured times for the first `k` stages of `stack`.
pub fn structured_times(stack: &ConjugationStack, k: usize) -> Result<Vec<Scalar>, DeformError> {
    let p = stack.prec();
    let mut out = uniform(&Scalar::from_i64(-1, p), &Scalar::zero(p), CELL_POINTS);
    for l in 1..=k {
        let plan = stack.plan(l)?;
        let j = Scalar::from_integer(&plan.j, p);
        let mut raw = support(&j, plan.q, SUPPORT_POINTS);
        let mid = &j - &Scalar::from_rational(&Rational::from(((plan.q - 1) / 2, plan.q)), p);
        raw.extend(support(&mid, plan.q, SUPPORT_POINTS));
        let count = CELL_TRANSLATES.min(plan.q);
        for s in 0..count {
            let i = s * plan.q / count;
            let c = Scalar::from_rational(&Rational::from((-(i as i64), plan.q)), p);
            raw.extend(support(&c, plan.q, TRANSLATE_POINTS));
        }
        // the bumps of φ_l sit at Φ_{l-1} of these times
        for y in raw {
            out.push(stack.stack_inverse_point(l - 1, &y)?);
        }
        if l == k {
            let (lo, hi) = plan.M();
            out.extend(uniform(&lo, &hi, M_POINTS));
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out.dedup();
    Ok(out)
}

/// Positions `ψ(t)` over the structured times, plus a geometric grid down to the horizon.
pub fn structured_positions<O: BaseFieldOracle + ?Sized>(oracle: &O, stack: &ConjugationStack, k: usize) -> Result<Vec<Scalar>, DeformError> {
    let p = stack.prec();
    let mut out = Vec::new();
    for t in structured_times(stack, k)? {
        out.push(oracle.psi_point(&t)?);
    }
    out.extend(geometric_grid(&Scalar::from_i64(2, p), &oracle.horizon(), GRID_PER_OCTAVE));
    out.sort_by(|a, b| a.total_cmp(b));
    out.dedup();
    Ok(out)
}

/// `count` positions `ψ(t)` with `t` uniform in `M_k`.
pub fn m_positions<O: BaseFieldOracle + ?Sized>(oracle: &O, stack: &ConjugationStack, k: usize, count: usize) -> Result<Vec<Scalar>, DeformError> {
    let (lo, hi) = stack.plan(k)?.M();
    uniform(&lo, &hi, count).iter().map(|t| Ok(oracle.psi_point(t)?)).collect()
}

