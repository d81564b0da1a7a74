//! Exact properties of the stack on integers and half-integers.

use base_field::BaseFieldOracle;
use deformation_engine::samples::structured_times;
use deformation_engine::WavePlan;
use rug::Integer;
use scalar_jet::{jet_L, Jet, Scalar};

use crate::config::Suite;
use crate::report::CheckReport;
use crate::VerifyError;

/// Integers on each side of `j(n_k)` and in one far-left cell.
pub const SIDE_INTEGERS: i32 = 5;

/// `j - 5..=j + 5` and the far-left integers `-1, 0`.
pub fn integer_samples(plan: &WavePlan) -> Vec<Integer> {
    let mut v: Vec<Integer> = (-SIDE_INTEGERS..=SIDE_INTEGERS).map(|d| plan.j.clone() + d).collect();
    v.extend([Integer::from(-1), Integer::from(0)]);
    v
}

/// Worst errors of the jump of `L` across stage `idx`: relative where `l ≤ j`, absolute where `l > j`.
pub fn lphi_jump_errors<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, idx: usize) -> Result<(Scalar, Scalar), VerifyError> {
    let st = &s.built.stack;
    let p = s.prec();
    let plan = st.plan(idx)?;
    let wq2 = &plan.w * &Scalar::from_integer(&Integer::from(plan.q * plan.q), p);
    let (mut left, mut right) = (Scalar::zero(p), Scalar::zero(p));
    for l in integer_samples(plan) {
        let t = Scalar::from_integer(&l, p);
        let jump = jet_L(&st.stack_jet(idx, &t, 2)?)? - jet_L(&st.stack_jet(idx - 1, &t, 2)?)?;
        if l <= plan.j {
            left = left.max(&Scalar::rel_diff(&jump, &wq2));
        } else {
            right = right.max(&jump.abs());
        }
    }
    Ok((left, right))
}

pub fn check_lphi_jump<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, bits: i64) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("stack-l-jump", "L(Φ_k)(l) - L(Φ_{k-1})(l) = w_{n_k} q_k² for integers l ≤ j(n_k), 0 for l > j(n_k)");
    for idx in 1..=s.depth() {
        let (left, right) = lphi_jump_errors(s, idx)?;
        r.compare(&left, &s.pow2(-bits));
        r.compare(&right, &s.pow2(-bits));
    }
    Ok(r.exact(format!("per stage: j(n_k)-{SIDE_INTEGERS}..=j(n_k)+{SIDE_INTEGERS} and -1, 0; relative left of j, absolute right")))
}

/// `max(|Φ_k(l) - l|, |DΦ_k(l) - 1|)` over the integer samples of stage `idx`.
pub fn tangency_error<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, idx: usize) -> Result<Scalar, VerifyError> {
    let st = &s.built.stack;
    let p = s.prec();
    let mut worst = Scalar::zero(p);
    for l in integer_samples(st.plan(idx)?) {
        let t = Scalar::from_integer(&l, p);
        let jet = st.stack_jet(idx, &t, 1)?;
        worst = worst.max(&(jet.value() - &t).abs()).max(&jet.d(1).add_i(-1).abs());
    }
    Ok(worst)
}

pub fn check_tangency<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, bits: i64) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("stack-tangency", "Φ_k is tangent to the identity on ℤ");
    for idx in 1..=s.depth() {
        r.compare(&tangency_error(s, idx)?, &s.pow2(-bits));
    }
    Ok(r.exact(format!("per stage: j(n_k)-{SIDE_INTEGERS}..=j(n_k)+{SIDE_INTEGERS} and -1, 0")))
}

pub fn check_half_integers<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("stack-half-integers", "Φ_k is the identity near ℤ + 1/2");
    let st = &s.built.stack;
    let p = s.prec();
    let offsets = [Scalar::zero(p), Scalar::ratio(1, 1000, p), Scalar::ratio(-1, 1000, p)];
    let mut count = 0;
    for idx in 1..=s.depth() {
        for l in integer_samples(st.plan(idx)?) {
            for off in &offsets {
                let t = Scalar::from_integer(&l, p) + Scalar::ratio(1, 2, p) + off;
                let ok = st.stack_jet(idx, &t, 4)? == Jet::identity(t.clone(), 4);
                r.require(ok, format!("stage {idx} at l = {l} + 1/2 {:+e}", off.to_f64()));
                count += 1;
            }
        }
    }
    Ok(r.exact(format!("{count} points l + 1/2 + {{0, ±1/1000}}, jets to order 4 compared exactly")))
}

pub fn check_positivity<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("phi-positivity", "Dφ_k > 0");
    let st = &s.built.stack;
    let times = structured_times(st, s.depth())?;
    let mut low = None::<Scalar>;
    for idx in 1..=s.depth() {
        let plan = st.plan(idx)?;
        for t in &times {
            let d = plan.phi_jet(&st.stack_point(idx - 1, t)?, 1).d(1).clone();
            r.require(d.is_positive(), format!("stage {idx} at t ≈ {:e}", t.to_f64()));
            low = Some(low.map_or(d.clone(), |m| m.min(&d)));
        }
    }
    if let Some(m) = low {
        r.measured.push(m.to_hex_rounded(crate::report::REPORT_BITS));
    }
    Ok(r.sampled(format!("{} structured times, images under Φ_{{k-1}}", times.len())))
}
