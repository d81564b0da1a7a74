//! Random `(k, t, x)` triples comparing the Taylor oracle with the conjugated flow.
//!
//! Triples are drawn where the field is analytic along the whole trajectory, so
//! that Taylor steps never straddle a plateau edge: for `k ≥ 1` on the bump
//! translates inside `M_k` (the polynomial core `|τ| ≤ 1/40` with `|t| ≤ 1/(50 q_k)`,
//! or the cutoff transition `|τ| ∈ [1/10, 1/5]` with `|t| ≤ 2^{-40}/q_k`), and for
//! `k = 0` inside one piece of one of the blocks `n ≤ 6`.

use base_field::{BaseFieldOracle, Piece};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use scalar_jet::{Prec, Scalar};

use crate::config::Suite;
use crate::ode::ode_oracle_flow;
use crate::report::CheckReport;
use crate::VerifyError;

#[derive(Clone, Debug, PartialEq)]
pub struct Triple {
    pub k: usize,
    pub t: Scalar,
    pub x: Scalar,
    /// Where the point was drawn.
    pub region: &'static str,
}

/// Relative errors of one triple: oracle vs conjugated flow, and for `k = 0` oracle vs the chart.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleErrors {
    pub flow: Scalar,
    pub chart: Option<Scalar>,
}

fn piece_range(piece: Piece) -> (f64, f64) {
    match piece {
        Piece::ULow => (0.0, 1.0 / 6.0),
        Piece::B => (1.0 / 6.0, 1.0 / 3.0),
        Piece::V => (1.0 / 3.0, 2.0 / 3.0),
        Piece::A => (2.0 / 3.0, 5.0 / 6.0),
        _ => (5.0 / 6.0, 1.0),
    }
}

fn base_triple<O: BaseFieldOracle + ?Sized>(oracle: &O, rng: &mut ChaCha8Rng, p: Prec) -> Result<Triple, VerifyError> {
    // blocks [2^{-n-1}, 2^{-n}] down to the horizon
    let last = (-oracle.horizon().log2_abs().round() as i32 - 1).clamp(1, 6);
    let n: i32 = rng.gen_range(1..=last);
    let pieces = [Piece::UHigh, Piece::A, Piece::V, Piece::B, Piece::ULow];
    let piece = pieces[rng.gen_range(0..pieces.len())];
    let (a, b) = piece_range(piece);
    let w = b - a;
    let y = a + w * rng.gen_range(0.25..0.75);
    let x = Scalar::from_f64(1.0 + y, p).mul_pow2(-n - 1);
    // room left on either side, as a displacement in x
    let room = Scalar::from_f64(w / 4.0, p).mul_pow2(-n - 1);
    let speed = oracle.field_jet(&x, 0)?.value().abs();
    let transition = matches!(piece, Piece::A | Piece::B);
    let t_max = if transition {
        (&room / &speed).mul_pow2(-40)
    } else {
        (&room / &speed).min(&Scalar::one(p))
    };
    let t = &t_max * &Scalar::from_f64(rng.gen_range(-1.0..1.0), p);
    Ok(Triple { k: 0, t, x, region: if transition { "base transition" } else { "base plateau" } })
}

fn stage_triple<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, idx: usize, rng: &mut ChaCha8Rng) -> Result<Triple, VerifyError> {
    let p = s.prec();
    let plan = s.built.stack.plan(idx)?;
    let q = plan.q as i64;
    let shift = rng.gen_range(0..q);
    let core = rng.gen_bool(0.5);
    let loc = if core {
        rng.gen_range(-1.0 / 40.0..1.0 / 40.0)
    } else {
        let m: f64 = rng.gen_range(0.1..0.2);
        if rng.gen_bool(0.5) {
            m
        } else {
            -m
        }
    };
    let st = Scalar::from_integer(&plan.j, p) + (Scalar::from_f64(loc, p) - Scalar::from_i64(shift, p)) / Scalar::from_i64(q, p);
    let x = s.oracle.psi_point(&st)?;
    let mut t_max = Scalar::ratio(1, 50 * q, p);
    if !core {
        t_max = t_max.mul_i(50).mul_pow2(-40);
    }
    let t = &t_max * &Scalar::from_f64(rng.gen_range(-1.0..1.0), p);
    Ok(Triple { k: idx, t, x, region: if core { "bump core" } else { "bump cutoff" } })
}

/// Seeded triples; `k` cycles through `0..=K`.
pub fn draw_triples<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, count: usize) -> Result<Vec<Triple>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.config.seed);
    (0..count)
        .map(|i| {
            let k = i % (s.depth() + 1);
            if k == 0 {
                base_triple(s.oracle, &mut rng, s.prec())
            } else {
                stage_triple(s, k, &mut rng)
            }
        })
        .collect()
}

pub fn triple_errors<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, tr: &Triple) -> Result<TripleErrors, VerifyError> {
    let d = s.deformed();
    let ode = ode_oracle_flow(&d, tr.k, &tr.t, &tr.x, &s.config.taylor)?;
    let flow = d.flow_point(tr.k, &tr.t, &tr.x)?;
    let chart = if tr.k == 0 {
        let closed = s.oracle.psi_point(&(s.oracle.travel_time(&tr.x)? + &tr.t))?;
        Some(Scalar::rel_diff(&ode, &closed))
    } else {
        None
    };
    Ok(TripleErrors { flow: Scalar::rel_diff(&ode, &flow), chart })
}

pub fn check_oracle<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, bits: i64) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("ode-oracle", "Taylor integration of ξ_k agrees with the conjugated flow f_k^t");
    let triples = draw_triples(s, s.config.triples)?;
    let errs: Vec<TripleErrors> = triples
        .par_iter()
        .map(|tr| triple_errors(s, tr))
        .collect::<Result<_, VerifyError>>()?;
    let p = s.prec();
    let worst = errs.iter().fold(Scalar::zero(p), |a, e| a.max(&e.flow));
    let chart = errs.iter().filter_map(|e| e.chart.clone()).fold(Scalar::zero(p), |a, e| a.max(&e));
    r.compare(&worst, &s.pow2(-bits));
    r.compare(&chart, &s.pow2(-bits));
    Ok(r.exact(format!(
        "{} seeded triples (seed {}), Taylor order {}, local tolerance 2^-{}; second bound: k = 0 against the travel-time chart",
        triples.len(),
        s.config.seed,
        s.config.taylor.order,
        s.config.taylor.tol_bits
    )))
}
