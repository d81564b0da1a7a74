//! Choice of the period `q_k` and of the level `n_k` of each stage.

use base_field::{geometric_grid, BaseFieldOracle};
use cantor_schedule::intervals::interior_grid_count;
use cantor_schedule::IntervalSet;
use rug::{Integer, Rational};
use scalar_jet::{bell_number, Scalar};
use time_chart::{find_indices, orbit_pairs, psi_inverse_series_of, TravelTable};

use crate::stack::Mode;
use crate::DeformError;

/// Smallest odd `q > prev_q` whose grid `(1/q)ℤ` has two points inside every component
/// and misses `r` (the last rule is void for `r ∈ {0, 1}`).
pub fn choose_qk(prev_q: u64, parent: &IntervalSet, r: &Rational) -> u64 {
    let bounds = parent.exact_bounds();
    let mut q = prev_q + 1;
    if q % 2 == 0 {
        q += 1;
    }
    let trivial = *r.denom() == 1;
    loop {
        let avoids = trivial || !Integer::from(q).is_divisible(r.denom());
        if avoids && bounds.iter().all(|(lo, hi)| interior_grid_count(lo, hi, q) >= 2) {
            return q;
        }
        q += 2;
    }
}

/// A candidate level: orbit indices and plateau speeds of one highland/lowland pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub n: u32,
    pub i: Integer,
    pub j: Integer,
    pub u: Scalar,
    pub v: Scalar,
    pub w: Scalar,
}

/// Levels `n = 4..=n_max` of the tabulated Sergeraert field.
pub fn sergeraert_levels(table: &TravelTable) -> Result<Vec<Level>, DeformError> {
    let f = table.field();
    let p = table.prec();
    (4..=table.n_max())
        .map(|n| {
            let o = find_indices(table, n)?;
            Ok(Level { n, i: o.i, j: o.j, u: f.u(n, p), v: f.v(n, p), w: f.w(n, p) })
        })
        .collect()
}

/// Levels found by the orbit search, numbered in order, with `w = √u`.
pub fn general_levels<O: BaseFieldOracle + ?Sized>(oracle: &O) -> Result<Vec<Level>, DeformError> {
    let pairs = orbit_pairs(oracle)?;
    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(n, q)| Level { n: n as u32, i: q.i, j: q.j, w: q.u.sqrt(), u: q.u, v: q.v })
        .collect())
}

/// Both sides of the level inequality of stage `k`: `‖γ_k‖_{k+1}` and its allowed size.
pub fn nk_sides(mode: Mode, k: usize, q: u64, level: &Level, gamma: &Scalar, dphi: &Scalar, c1: &Scalar) -> Result<(Scalar, Scalar), DeformError> {
    let p = level.w.prec();
    let ki = k as i64;
    let qs = Scalar::from_integer(&Integer::from(q), p);
    let lhs = &(&level.w * &qs.powi(ki as i32 + 1)) * gamma;
    let bell = Scalar::from_integer(&Integer::from(bell_number(k as u32 + 1)?), p);
    let denom = &(&bell * &dphi.powi(ki as i32 + 1)) * c1;
    let rhs = match mode {
        Mode::Sergeraert => &(Scalar::pow2(-ki - 4, p) * level.v.powi(ki as i32 - 1)) / &denom,
        Mode::General => &(Scalar::pow2(-ki * ki - 4, p) * level.v.powi(2 * ki as i32)) / &(&denom * &bell),
    };
    Ok((lhs, rhs))
}

/// Points per octave of the sweep for `‖Dψ‖_{k-1}` beyond `j(n) - 1`.
pub const PSI_SWEEP_PER_OCTAVE: u32 = 16;

/// Sampled `C^{k-1}` norm of `Dψ` on `[j(n) - 1, ∞)`, taken over positions `x ≤ ψ(j - 1)`.
pub fn psi_tail_norm<O: BaseFieldOracle + ?Sized>(oracle: &O, level: &Level, k: usize) -> Result<Scalar, DeformError> {
    let p = oracle.prec();
    let start = oracle.psi_point(&Scalar::from_integer(&(level.j.clone() - 1u32), p))?;
    let mut sup = Scalar::zero(p);
    for x in geometric_grid(&start, &oracle.horizon(), PSI_SWEEP_PER_OCTAVE) {
        let s = time_chart::flow_series_of(oracle, &x, k)?;
        let mut f = Scalar::one(p);
        for m in 1..=k {
            f = f.mul_i(m as i64);
            sup = sup.max(&(s.coeff(m).abs() * &f));
        }
    }
    Ok(sup)
}

/// Positions sampled on `[a_{j+1}, a_{j-1}]`.
pub const PSI_INVERSE_SAMPLES: usize = 33;

/// Checks `|D^m ψ⁻¹| < v^{-m-1}` for `1 ≤ m ≤ k` on `[a_{j+1}, a_{j-1}]`.
pub fn psi_inverse_ok<O: BaseFieldOracle + ?Sized>(oracle: &O, level: &Level, k: usize) -> Result<bool, DeformError> {
    let p = oracle.prec();
    let lo = oracle.psi_point(&Scalar::from_integer(&(level.j.clone() + 1u32), p))?;
    let hi = oracle.psi_point(&Scalar::from_integer(&(level.j.clone() - 1u32), p))?;
    let step = (&hi - &lo).div_i(PSI_INVERSE_SAMPLES as i64 - 1);
    for i in 0..PSI_INVERSE_SAMPLES {
        let x = &lo + &step.mul_i(i as i64);
        let s = psi_inverse_series_of(oracle, &x, k + 1)?;
        let mut f = Scalar::one(p);
        for m in 1..=k {
            f = f.mul_i(m as i64);
            if s.coeff(m).abs() * &f >= level.v.powi(-(m as i32) - 1) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// First level with `n > prev_n` accepted by `admissible`.
pub fn choose_nk<F>(levels: &[Level], prev_n: Option<u32>, k: usize, mut admissible: F) -> Result<usize, DeformError>
where
    F: FnMut(&Level) -> Result<bool, DeformError>,
{
    for (idx, level) in levels.iter().enumerate() {
        if prev_n.map_or(false, |n| level.n <= n) {
            continue;
        }
        if admissible(level)? {
            return Ok(idx);
        }
    }
    Err(DeformError::Horizon { k, detail: format!("no admissible level among {} tabulated ones", levels.len()) })
}

