//! Propagation of the wave `ν_k` along the base flow.
//!
//! The tile `S_k = ψ(J_k)` sits on the lowland of level `n_k`; its translates
//! `S_k^p = ψ(J_k - p/q_k)` with `p/q_k` near `j(n_k) - i(n_k)` sit on the highland.
//! There `ν_k = (f₀^{p/q_k})^* ν_k`, and since `f₀^{p/q_k}` is affine with slope
//! `v/u` between the two plateaus, `D²ν_k` is larger by exactly `v/u`.

use base_field::BaseFieldOracle;
use rayon::prelude::*;
use rug::Integer;
use scalar_jet::{jet_compose, Scalar};

use crate::config::Suite;
use crate::report::CheckReport;
use crate::VerifyError;

/// Offsets `r` of the sampled highland tiles, `p = q_k (j - i) + r`.
pub fn tile_offsets(q: u64) -> [i64; 3] {
    let q = q as i64;
    [-q, 0, (q - 1) / 2]
}

#[derive(Clone, Debug, PartialEq)]
pub struct TileMeasure {
    pub p: Integer,
    /// Largest relative residual of the pullback identity, per order `m = 0, 1, 2`.
    pub residual: Scalar,
    /// `max |D²ν_k|` on the highland tile over the same on `S_k`.
    pub amplification: Scalar,
    /// Sampled `(x, ν, Dν, D²ν)` on the highland tile.
    pub rows: Vec<[Scalar; 4]>,
}

/// Local coordinates `τ ∈ [-1/4, 1/4]` of the sample points of a tile.
fn tile_coords(n: usize, p: scalar_jet::Prec) -> Vec<Scalar> {
    let n = n.max(2) as i64;
    (0..n).map(|m| Scalar::ratio(2 * m - (n - 1), 4 * (n - 1), p)).collect()
}

/// Sample points of `S_k^p = ψ(J_k - p/q_k)` on the bump support.
pub fn tile_points<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, idx: usize, p: &Integer) -> Result<Vec<Scalar>, VerifyError> {
    let pr = s.prec();
    let plan = s.built.stack.plan(idx)?;
    let qs = Scalar::from_i64(plan.q as i64, pr);
    let centre = Scalar::from_integer(&plan.j, pr) - &(Scalar::from_integer(p, pr) / &qs);
    tile_coords(s.config.samples, pr)
        .iter()
        .map(|loc| Ok(s.oracle.psi_point(&(&centre + &(loc / &qs)))?))
        .collect()
}

/// `(x, ν_k, Dν_k, D²ν_k)` on the sample points of `S_k^p`.
pub fn tile_rows<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, idx: usize, p: &Integer) -> Result<Vec<[Scalar; 4]>, VerifyError> {
    let d = s.deformed();
    tile_points(s, idx, p)?
        .into_par_iter()
        .map(|x| {
            let nu = d.wave_jet(idx, &x, 2)?;
            Ok([x, nu.d(0).clone(), nu.d(1).clone(), nu.d(2).clone()])
        })
        .collect()
}

/// `p` of the highland tile with offset `r`.
pub fn highland_tile<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, idx: usize, r: i64) -> Result<Integer, VerifyError> {
    let plan = s.built.stack.plan(idx)?;
    Ok(Integer::from(&plan.j - &plan.i) * plan.q + r)
}

pub fn measure_tile<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, idx: usize, r: i64) -> Result<TileMeasure, VerifyError> {
    let pr = s.prec();
    let d = s.deformed();
    let q = s.built.stack.plan(idx)?.q as i64;
    let p = highland_tile(s, idx, r)?;
    let t = Scalar::from_integer(&p, pr) / Scalar::from_i64(q, pr);
    let rows: Vec<(Scalar, Scalar, Scalar, [Scalar; 4])> = tile_points(s, idx, &p)?
        .into_par_iter()
        .map(|x| {
            let nu = d.wave_jet(idx, &x, 2)?;
            let f = d.flow_jet(0, &t, &x, 3)?;
            let low = d.wave_jet(idx, f.value(), 2)?;
            let pulled = jet_compose(&low, &f.truncate(2))?.div(&f.derivative()?)?;
            let mut err = Scalar::zero(pr);
            for m in 0..=2 {
                err = err.max(&(nu.d(m) - pulled.d(m)).abs());
            }
            let row = [x, nu.d(0).clone(), nu.d(1).clone(), nu.d(2).clone()];
            Ok((err, nu.max_abs(0, 2), low.d(2).abs(), row))
        })
        .collect::<Result<_, VerifyError>>()?;
    let err = rows.iter().fold(Scalar::zero(pr), |a, r| a.max(&r.0));
    let size = rows.iter().fold(Scalar::zero(pr), |a, r| a.max(&r.1));
    let high = rows.iter().fold(Scalar::zero(pr), |a, r| a.max(&r.3[3].abs()));
    let low = rows.iter().fold(Scalar::zero(pr), |a, r| a.max(&r.2));
    Ok(TileMeasure {
        p,
        residual: if size.is_zero() { err } else { err / size },
        amplification: if low.is_zero() { Scalar::zero(pr) } else { high / low },
        rows: rows.into_iter().map(|r| r.3).collect(),
    })
}

pub fn check_wave<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, bits: i64) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new(
        "wave-propagation",
        "ν_k on S_k^p is the pullback of ν_k on S_k by f₀^{p/q_k}; D² grows by v_{n_k}/u_{n_k} on the highland",
    );
    let mut tiles = 0;
    for idx in 1..=s.depth() {
        let plan = s.built.stack.plan(idx)?;
        let ratio = &plan.v / &plan.u;
        for off in tile_offsets(plan.q) {
            let m = measure_tile(s, idx, off)?;
            r.compare(&m.residual, &s.pow2(-bits));
            // within a factor 2 of v/u
            r.compare(&m.amplification, &ratio.mul_i(2));
            r.compare(&ratio, &m.amplification.mul_i(2));
            tiles += 1;
        }
    }
    Ok(r.exact(format!("{tiles} highland tiles, {} points each on the bump support", s.config.samples.max(2))))
}
