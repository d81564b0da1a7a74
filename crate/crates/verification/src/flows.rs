//! Checks on the deformed flows `f_k^t`.

use base_field::BaseFieldOracle;
use deformation_engine::samples::{structured_positions, uniform};
use deformation_engine::{ConjugationStack, Deformed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Integer, Rational};
use scalar_jet::{jet_L, jet_compose, Jet, Scalar};

use crate::config::Suite;
use crate::report::CheckReport;
use crate::VerifyError;

/// `Lf_K^{1/2}(a_{i(n_l)})` and its closed form `-(1/u_{n_l}) Σ_{k=l}^{K} w_{n_k} q_k²`.
pub fn blowup_values<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, l: usize) -> Result<(Scalar, Scalar), VerifyError> {
    let st = &s.built.stack;
    let p = s.prec();
    let plan = st.plan(l)?;
    let x = s.oracle.psi_point(&Scalar::from_integer(&plan.i, p))?;
    let half = Scalar::ratio(1, 2, p);
    let measured = jet_L(&s.deformed().flow_jet(s.depth(), &half, &x, 2)?)?;
    let mut sum = Scalar::zero(p);
    for k in l..=s.depth() {
        let pk = st.plan(k)?;
        sum += &pk.w * &Scalar::from_integer(&Integer::from(pk.q * pk.q), p);
    }
    Ok((measured, -(sum / &plan.u)))
}

/// `Lf_0^{1/2}(a_{i(n_l)})`, zero since the base flow translates the highland.
pub fn base_blowup<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, l: usize) -> Result<Scalar, VerifyError> {
    let p = s.prec();
    let x = s.oracle.psi_point(&Scalar::from_integer(&s.built.stack.plan(l)?.i, p))?;
    Ok(jet_L(&s.deformed().flow_jet(0, &Scalar::ratio(1, 2, p), &x, 2)?)?)
}

pub fn check_blowup<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, bits: i64) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new(
        "blowup",
        "Lf^{1/2}(a_{i(n_l)}) = -(1/u_{n_l}) Σ_{k≥l} w_{n_k} q_k² < -w_{n_l}/u_{n_l}",
    );
    let tol = s.pow2(-bits);
    let mut values = vec![];
    for l in 1..=s.depth() {
        let plan = s.built.stack.plan(l)?;
        let (m, closed) = blowup_values(s, l)?;
        r.compare(&Scalar::rel_diff(&m, &closed), &tol);
        let floor = &plan.w / &plan.u;
        r.compare(&floor, &m.abs());
        r.require(m.is_sign_negative(), format!("Lf at l = {l} is negative"));
        r.require(base_blowup(s, l)?.is_zero(), format!("Lf_0 vanishes on the highland of stage {l}"));
        values.push(m);
    }
    r.require(values.windows(2).all(|w| w[1] < w[0]), "Lf^{1/2}(a_{i(n_l)}) decreases with l");
    r.note("finite-stage sum Σ_{k=l}^{K}; the infinite tail is out of reach");
    Ok(r.exact(format!("l = 1..={}; per l: relative error, then w/u ≤ |Lf|", s.depth())))
}

/// Exterior times of stage `idx`: the far-left cell, both sides of `M_k`, and a geometric
/// spread of positions between the first stage and `M_k`.
pub fn exterior_times<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, idx: usize) -> Result<Vec<Scalar>, VerifyError> {
    let p = s.prec();
    let (lo, hi) = s.built.stack.plan(idx)?.M();
    let n = s.config.exterior.max(4) / 4;
    let eps = s.pow2(-20);
    let mut out = uniform(&Scalar::from_i64(-1, p), &Scalar::zero(p), n + 1);
    out.pop();
    out.extend(uniform(&lo.add_i(-2), &(&lo - &eps), n));
    out.extend(uniform(&(&hi + &eps), &hi.add_i(2), n));
    // times spread evenly in log₂ between 1 and lo - 2
    let top = lo.add_i(-2).log2_abs();
    for i in 1..=n {
        let e = (top * i as f64 / (n + 1) as f64).floor() as i64;
        out.push(s.pow2(e) + Scalar::ratio(1, 3, p));
    }
    Ok(out)
}

/// Jet of `Φ_k⁻¹∘(+t)∘Φ_k` at `tau`.
pub fn time_flow_jet(st: &ConjugationStack, k: usize, t: &Scalar, tau: &Scalar, order: usize) -> Result<Jet, VerifyError> {
    let fwd = st.stack_jet(k, tau, order)?.add_value(t);
    Ok(jet_compose(&st.stack_inverse_jet(k, fwd.value(), order)?, &fwd)?)
}

/// Worst `|f_k^{p/q_k} - f_{k-1}^{p/q_k}|` on the exterior of `ψ(M_k)`, and the worst
/// `|D^m(σ_k - σ_{k-1})|`, `m ≤ 2`, for the same maps in time coordinates.
pub fn locality_error<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, idx: usize) -> Result<(Scalar, Scalar, usize), VerifyError> {
    let d = s.deformed();
    let st = &s.built.stack;
    let q = st.plan(idx)?.q;
    let times = exterior_times(s, idx)?;
    let parts: Vec<(Scalar, Scalar)> = times
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let p = s.prec();
            // p ≤ q - 1 keeps the image of the left side left of J_k
            let shift = 1 + i as u64 % (q - 1);
            let tt = Scalar::from_rational(&Rational::from((shift, q)), p);
            let x = s.oracle.psi_point(t)?;
            let a = d.flow_point(idx, &tt, &x)?;
            let b = d.flow_point(idx - 1, &tt, &x)?;
            let ja = time_flow_jet(st, idx, &tt, t, 2)?;
            let jb = time_flow_jet(st, idx - 1, &tt, t, 2)?;
            Ok(((a - b).abs(), ja.sub(&jb)?.max_abs(0, 2)))
        })
        .collect::<Result<_, VerifyError>>()?;
    let zero = Scalar::zero(s.prec());
    let x_worst = parts.iter().fold(zero.clone(), |a, b| a.max(&b.0));
    let t_worst = parts.iter().fold(zero, |a, b| a.max(&b.1));
    Ok((x_worst, t_worst, times.len()))
}

pub fn check_locality<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, bits: i64) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("locality", "f_k^{p/q_k} = f_{k-1}^{p/q_k} outside ψ(M_k)");
    let mut count = 0;
    for idx in 1..=s.depth() {
        let (x, t, n) = locality_error(s, idx)?;
        r.compare(&x, &s.pow2(-bits));
        r.compare(&t, &s.pow2(-bits));
        count = n;
    }
    r.note("per stage: |f_k - f_{k-1}| at x, then jets to order 2 of Φ_k⁻¹∘(+p/q_k)∘Φ_k in time coordinates");
    Ok(r.exact(format!("{count} exterior points per stage, 1 ≤ p ≤ q_k - 1")))
}

/// Time coordinates on `M_k` inside bump supports, for the scaling identity.
pub fn scaling_times<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, idx: usize) -> Result<Vec<Scalar>, VerifyError> {
    let p = s.prec();
    let plan = s.built.stack.plan(idx)?;
    let n = s.config.samples.max(2);
    let q = plan.q as i64;
    Ok((0..n)
        .map(|m| {
            let i = (m as i64 * 7) % q;
            // local coordinate in [-1/4, 1/4]
            let loc = Scalar::ratio(2 * m as i64 - (n as i64 - 1), 4 * (n as i64 - 1), p);
            let c = Scalar::from_integer(&plan.j, p) - Scalar::ratio(i, q, p);
            &c + &(&loc / &Scalar::from_i64(q, p))
        })
        .collect())
}

/// Normwise relative error of `D^m f_k^{p/q_k} = (-1)^{m+1} v^{1-m} D^m σ_k^{p/q_k}∘ψ⁻¹`, per order `m = 1..=3`.
pub fn scaling_errors<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, idx: usize) -> Result<Vec<Scalar>, VerifyError> {
    let st = &s.built.stack;
    let pr = s.prec();
    let plan = st.plan(idx)?;
    let d = s.deformed();
    let q = plan.q;
    let shifts = [1, (q + 1) / 2, q];
    let times = scaling_times(s, idx)?;
    let jobs: Vec<(u64, &Scalar)> = shifts.iter().flat_map(|&p| times.iter().map(move |t| (p, t))).collect();
    let rows: Vec<Vec<(Scalar, Scalar)>> = jobs
        .par_iter()
        .map(|(p, tau)| {
            let x = s.oracle.psi_point(tau)?;
            let tt = Scalar::from_rational(&Rational::from((*p, q)), pr);
            let f = d.flow_jet(idx, &tt, &x, 3)?;
            let sigma = st.sigma_jet(idx, *p, tau, 3)?;
            Ok((1..=3)
                .map(|m| {
                    let sign = if m % 2 == 0 { 1 } else { -1 };
                    let want = sigma.d(m) * &plan.v.powi(1 - m as i32).mul_i(-sign);
                    ((f.d(m) - &want).abs(), want.abs())
                })
                .collect())
        })
        .collect::<Result<_, VerifyError>>()?;
    Ok((0..3)
        .map(|m| {
            let err = rows.iter().fold(Scalar::zero(pr), |a, r| a.max(&r[m].0));
            let size = rows.iter().fold(Scalar::zero(pr), |a, r| a.max(&r[m].1));
            if size.is_zero() {
                err
            } else {
                err / size
            }
        })
        .collect())
}

pub fn check_scaling<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, bits: i64) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("scaling", "D^m f_k^{p/q_k} = (-1)^{m+1} v_{n_k}^{1-m} D^m σ_k^{p/q_k}∘ψ⁻¹ on ψ(M_k)");
    for idx in 1..=s.depth() {
        for e in scaling_errors(s, idx)? {
            r.compare(&e, &s.pow2(-bits));
        }
    }
    r.note("per stage and order m = 1, 2, 3: max |error| / max |D^m f| over the samples");
    Ok(r.exact(format!("{} times on bump supports in M_k, p ∈ {{1, (q_k+1)/2, q_k}}", s.config.samples)))
}

/// Relative error of `f_k^{s+t} = f_k^s∘f_k^t` at seeded random points of `ψ(M_k)`.
pub fn group_law_error<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, count: usize) -> Result<Scalar, VerifyError> {
    let p = s.prec();
    let d = s.deformed();
    let mut rng = ChaCha8Rng::seed_from_u64(s.config.seed ^ 0x6c61_77);
    let mut jobs = vec![];
    for idx in 1..=s.depth() {
        let (lo, hi) = s.built.stack.plan(idx)?.M();
        for _ in 0..count {
            let c = Scalar::from_f64(rng.gen_range(0.0..1.0), p);
            let a = Scalar::from_f64(rng.gen_range(0.0..0.5), p);
            let b = Scalar::from_f64(rng.gen_range(0.0..0.5), p);
            jobs.push((idx, &lo + &(&(&hi - &lo) * &c), a, b));
        }
    }
    let errs: Vec<Scalar> = jobs
        .par_iter()
        .map(|(idx, st, a, b)| {
            let x = s.oracle.psi_point(st)?;
            let direct = d.flow_point(*idx, &(a + b), &x)?;
            let composed = d.flow_point(*idx, a, &d.flow_point(*idx, b, &x)?)?;
            Ok(Scalar::rel_diff(&direct, &composed))
        })
        .collect::<Result<_, VerifyError>>()?;
    Ok(errs.iter().fold(Scalar::zero(p), |a, b| a.max(b)))
}

pub fn check_group_law<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("group-law", "f_k^{s+t} = f_k^s∘f_k^t");
    let count = 4;
    let e = group_law_error(s, count)?;
    r.compare(&e, &s.pow2(-(s.prec().bits() as i64) / 4));
    Ok(r.sampled(format!("{count} seeded (s, t, x) per stage, s, t ∈ [0, 1/2], x ∈ ψ(M_k)")))
}

/// Number of sampled positions violating the weighted inequality, and the worst finite ratio
/// `|D^m(f - f₀)| / |D^m(f₀ - id)|`.
pub fn closeness<O: BaseFieldOracle + Sync + ?Sized>(d: &Deformed<'_, O>, xs: &[Scalar], k_cut: usize, eps: &Scalar) -> Result<(usize, Scalar), VerifyError> {
    let p = d.stack.prec();
    let k = d.stack.depth();
    let one = Scalar::one(p);
    let rows: Vec<(bool, Scalar)> = xs
        .par_iter()
        .map(|x| {
            let f = d.flow_jet(k, &one, x, k_cut)?;
            let f0 = d.flow_jet(0, &one, x, k_cut)?;
            let diff = f.sub(&f0)?;
            let mut ok = true;
            let mut worst = Scalar::zero(p);
            for m in 0..=k_cut {
                let base = match m {
                    0 => f0.value() - x,
                    1 => f0.d(1).add_i(-1),
                    _ => f0.d(m).clone(),
                }
                .abs();
                let lhs = diff.d(m).abs();
                ok &= lhs <= eps * &base;
                if !base.is_zero() {
                    worst = worst.max(&(&lhs / &base));
                }
            }
            Ok((ok, worst))
        })
        .collect::<Result<_, VerifyError>>()?;
    let bad = rows.iter().filter(|r| !r.0).count();
    Ok((bad, rows.iter().fold(Scalar::zero(p), |a, r| a.max(&r.1))))
}

pub fn check_closeness<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>) -> Result<CheckReport, VerifyError> {
    let (k_cut, eps_log2) = s.config.closeness;
    let k0 = s.built.start as i64 - 1;
    let eps_log2 = eps_log2.unwrap_or(-k0 - 1);
    if eps_log2 < -k0 - 1 {
        return Err(VerifyError::Precondition(format!("ε = 2^{eps_log2} is below 2^-(k₀+1) for k₀ = {k0}")));
    }
    let mut r = CheckReport::new("closeness", "|D^m(f - f₀)(x)| ≤ ε |D^m(f₀ - id)(x)|");
    let eps = s.pow2(eps_log2);
    let xs = structured_positions(s.oracle, &s.built.stack, s.depth())?;
    let (bad, worst) = closeness(&s.deformed(), &xs, k_cut, &eps)?;
    r.require(bad == 0, format!("weighted inequality fails at {bad} of {} positions", xs.len()));
    r.compare(&worst, &eps);
    Ok(r.sampled(format!("{} structured positions, m ≤ {k_cut}, ε = 2^{eps_log2}, k₀ = {k0}", xs.len())))
}
