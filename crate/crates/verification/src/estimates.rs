//! The stage estimates (i_k), (ii_k), (iii_k) and the smooth-time decay chain.

use base_field::BaseFieldOracle;
use cantor_schedule::intervals::sample_times;
use cantor_schedule::cantor_point;
use deformation_engine::measure::{flow_step_norm, phi_step_norm, xi_step_norm};
use deformation_engine::samples::{m_positions, structured_positions, structured_times};
use rayon::prelude::*;
use rug::Rational;
use scalar_jet::Scalar;

use crate::config::Suite;
use crate::report::CheckReport;
use crate::VerifyError;

/// Sampled `‖Φ_k - Φ_{k-1}‖_{k+1}`.
pub fn estimate_i<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, idx: usize) -> Result<(Scalar, usize), VerifyError> {
    let st = &s.built.stack;
    let times = structured_times(st, idx)?;
    let parts: Vec<Scalar> = times
        .par_chunks(16)
        .map(|c| phi_step_norm(st, idx, c))
        .collect::<Result<_, _>>()?;
    Ok((sup(s, parts), times.len()))
}

/// Sampled `‖ξ_k - ξ_{k-1}‖_1`.
pub fn estimate_ii<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, idx: usize) -> Result<(Scalar, usize), VerifyError> {
    let d = s.deformed();
    let xs = structured_positions(s.oracle, &s.built.stack, idx)?;
    let parts: Vec<Scalar> = xs
        .par_chunks(16)
        .map(|c| xi_step_norm(&d, idx, c))
        .collect::<Result<_, _>>()?;
    Ok((sup(s, parts), xs.len()))
}

fn sup<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, parts: Vec<Scalar>) -> Scalar {
    parts.iter().fold(Scalar::zero(s.prec()), |a, b| a.max(b))
}

/// Times of the `(iii_k)` sweep: `p/q_k` for `0 ≤ p ≤ q_k` and sample times of every component of `I_k`.
pub fn sweep_times<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, idx: usize) -> Result<Vec<Scalar>, VerifyError> {
    let p = s.prec();
    let q = s.built.stack.plan(idx)?.q;
    let mut out: Vec<Scalar> = (0..=q).map(|i| Scalar::from_rational(&Rational::from((i, q)), p)).collect();
    for c in &s.built.intervals[idx].components {
        out.extend(sample_times(c, s.config.samples));
    }
    Ok(out)
}

/// Largest `‖f_k^t - f_{k-1}^t‖_k` over `times`, sampled on `ψ(M_k)`.
pub fn flow_sweep<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, idx: usize, times: &[Scalar]) -> Result<Scalar, VerifyError> {
    let d = s.deformed();
    let xs = m_positions(s.oracle, &s.built.stack, idx, s.config.sweep)?;
    let parts: Vec<Scalar> = times
        .par_iter()
        .map(|t| flow_step_norm(&d, idx, t, &xs))
        .collect::<Result<_, _>>()?;
    Ok(sup(s, parts))
}

pub fn check_estimate_i<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("estimate-i", "‖Φ_k - Φ_{k-1}‖_{k+1} ≤ 2^{-k-1}");
    let mut counts = vec![];
    for idx in 1..=s.depth() {
        let (m, n) = estimate_i(s, idx)?;
        r.compare(&m, &s.pow2(-(s.label(idx) as i64) - 1));
        counts.push(n.to_string());
    }
    Ok(r.sampled(format!("structured times per stage: {}", counts.join(", "))))
}

pub fn check_estimate_ii<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("estimate-ii", "‖ξ_k - ξ_{k-1}‖_1 ≤ 2^{-k}");
    let mut counts = vec![];
    for idx in 1..=s.depth() {
        let (m, n) = estimate_ii(s, idx)?;
        r.compare(&m, &s.pow2(-(s.label(idx) as i64)));
        counts.push(n.to_string());
    }
    Ok(r.sampled(format!("structured positions per stage: {}", counts.join(", "))))
}

pub fn check_estimate_iii<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("estimate-iii", "‖f_k^t - f_{k-1}^t‖_k ≤ 2^{-k} for t ∈ I_k and t = p/q_k");
    let mut counts = vec![];
    for idx in 1..=s.depth() {
        let times = sweep_times(s, idx)?;
        r.compare(&flow_sweep(s, idx, &times)?, &s.pow2(-(s.label(idx) as i64)));
        counts.push(times.len().to_string());
    }
    Ok(r.sampled(format!(
        "times per stage: {}; {} positions uniform in ψ(M_k) per time",
        counts.join(", "),
        s.config.sweep
    )))
}

pub fn check_estimate_iii_grid<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("estimate-iii-grid", "‖f_k^t - f_{k-1}^t‖_k ≤ 2^{-k-4} at the grid times T_k");
    let p = s.prec();
    for idx in 1..=s.depth() {
        let times: Vec<Scalar> = s.built.grid_times[idx - 1].iter().map(|g| Scalar::from_rational(&g.time, p)).collect();
        r.compare(&flow_sweep(s, idx, &times)?, &s.pow2(-(s.label(idx) as i64) - 4));
    }
    Ok(r.sampled(format!("all of T_k; {} positions uniform in ψ(M_k) per time", s.config.sweep)))
}

/// Midpoint of the addressed component of the deepest interval set.
pub fn address_time<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>) -> Result<Scalar, VerifyError> {
    let (lo, hi) = cantor_point(&s.config.address, &s.built.intervals[1..], s.prec())?;
    Ok((&lo + &hi).mul_pow2(-1))
}

/// `‖f_k^t - f_{k-1}^t‖_k` for `k = 1..=K`, on `ψ(M_k)` and, when `wide`, on the structured positions too.
pub fn decay_chain<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, t: &Scalar, wide: bool) -> Result<Vec<Scalar>, VerifyError> {
    let d = s.deformed();
    (1..=s.depth())
        .map(|idx| {
            let mut xs = m_positions(s.oracle, &s.built.stack, idx, s.config.sweep)?;
            if wide {
                xs.extend(structured_positions(s.oracle, &s.built.stack, idx)?);
            }
            let parts: Vec<Scalar> = xs
                .par_chunks(8)
                .map(|c| flow_step_norm(&d, idx, t, c))
                .collect::<Result<_, _>>()?;
            Ok(sup(s, parts))
        })
        .collect()
}

pub fn check_smooth_times<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("smooth-times", "‖f_k^t - f_{k-1}^t‖_k ≤ 2^{-k} for t ∈ K ∪ {1}");
    let p = s.prec();
    let tau = address_time(s)?;
    for (i, m) in decay_chain(s, &tau, false)?.iter().enumerate() {
        r.compare(m, &s.pow2(-(s.label(i + 1) as i64)));
    }
    for (i, m) in decay_chain(s, &Scalar::one(p), true)?.iter().enumerate() {
        r.compare(m, &s.pow2(-(s.label(i + 1) as i64)));
    }
    let half = Rational::from((1, 2));
    if s.built.intervals.last().map_or(false, |set| set.components.iter().any(|c| c.contains(&half))) {
        r.require(false, "t = 1/2 lies in I_K");
    } else {
        r.note("t = 1/2 skipped: it is not in I_K");
    }
    Ok(r.sampled(format!(
        "t = midpoint of component {} (≈ {:.12}) on ψ(M_k); t = 1 on ψ(M_k) and the structured positions",
        s.config.address,
        tau.to_f64()
    )))
}
