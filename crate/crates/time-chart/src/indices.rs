//! Orbit indices `i(n)`, `j(n)` and the generalized highland/lowland search.

use base_field::BaseFieldOracle;
use rug::Integer;
use scalar_jet::Scalar;

use crate::table::TravelTable;
use crate::ChartError;

/// Integer times at which the orbit of 1 sits well inside the `u_n` and `v_n` plateaus.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitIndex {
    pub n: u32,
    pub i: Integer,
    pub j: Integer,
    /// `[ψ(i+2) - lo_u, hi_u - ψ(i-1), ψ(j+2) - lo_v, hi_v - ψ(j-1)]`, all positive.
    pub margins: [Scalar; 4],
}

fn psi_at(table: &TravelTable, k: &Integer) -> Result<Scalar, ChartError> {
    table.psi_point(&Scalar::from_integer(k, table.prec()))
}

/// `i(n)` and `j(n)` for `4 ≤ n ≤ n_max`, with certified window margins.
pub fn find_indices(table: &TravelTable, n: u32) -> Result<OrbitIndex, ChartError> {
    if n < 4 || n > table.n_max() {
        return Err(ChartError::Precondition(format!("orbit indices need 4 ≤ n ≤ {}, got {n}", table.n_max())));
    }
    let p = table.prec();
    let top = Scalar::pow2(-(n as i64), p);
    let half = Scalar::pow2(-(n as i64) - 1, p);
    let u_hi = &top + &top.div_i(6);
    let u_lo = &top - &half.div_i(6);
    let v_hi = &top - &half.div_i(3);
    let v_lo = &half + &half.div_i(3);
    let i = table.travel_time(&u_hi)?.ceil_integer() + 1u32;
    let j = table.travel_time(&v_hi)?.ceil_integer() + 1u32;
    let margins = [
        psi_at(table, &(i.clone() + 2u32))? - &u_lo,
        &u_hi - &psi_at(table, &(i.clone() - 1u32))?,
        psi_at(table, &(j.clone() + 2u32))? - &v_lo,
        &v_hi - &psi_at(table, &(j.clone() - 1u32))?,
    ];
    if let Some(k) = margins.iter().position(|m| m.is_sign_negative()) {
        return Err(ChartError::Margin(format!("orbit window {k} violated for n = {n}")));
    }
    Ok(OrbitIndex { n, i, j, margins })
}

/// One highland/lowland pair found by [`search_orbit_indices_general`].
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitPair {
    pub i: Integer,
    pub j: Integer,
    /// `sup |ξ|` on `V_i`.
    pub u: Scalar,
    /// `inf |ξ|` on `V_j`.
    pub v: Scalar,
    /// `log u / log v`.
    pub ratio: f64,
}

#[derive(Clone, Debug)]
struct Candidate {
    l: Integer,
    lo: Scalar,
    hi: Scalar,
    sup: Scalar,
    inf: Scalar,
}

/// Grid points per octave of the search.
pub const SEARCH_PER_OCTAVE: u32 = 8;

/// Samples of `|ξ|` per window `V_l`.
const WINDOW_SAMPLES: i64 = 9;

fn candidate<O: BaseFieldOracle + ?Sized>(oracle: &O, x: &Scalar) -> Result<Candidate, ChartError> {
    let p = oracle.prec();
    let l = oracle.travel_time(x)?.ceil_integer();
    let hi = oracle.psi_point(&Scalar::from_integer(&(l.clone() - 2u32), p))?;
    let lo = oracle.psi_point(&Scalar::from_integer(&(l.clone() + 2u32), p))?;
    let mut sup = Scalar::zero(p);
    let mut inf: Option<Scalar> = None;
    for k in 0..WINDOW_SAMPLES {
        let y = &lo + &(&(&hi - &lo) * &Scalar::ratio(k, WINDOW_SAMPLES - 1, p));
        let s = oracle.field_jet(&y, 0)?.value().abs();
        sup = sup.max(&s);
        inf = Some(inf.map_or(s.clone(), |i| i.min(&s)));
    }
    Ok(Candidate { l, lo, hi, sup, inf: inf.unwrap() })
}

fn log_ratio(u: &Scalar, v: &Scalar) -> Option<f64> {
    let one = Scalar::one(u.prec());
    if u >= &one || v >= &one || !u.is_positive() || !v.is_positive() {
        return None;
    }
    Some(u.ln().to_f64() / v.ln().to_f64())
}

/// Alternating highland/lowland orbit indices with strictly increasing `log u / log v`.
pub fn search_orbit_indices_general<O: BaseFieldOracle + ?Sized>(
    oracle: &O,
    count: usize,
) -> Result<Vec<OrbitPair>, ChartError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut out = scan(oracle, count)?;
    if out.len() < count {
        return Err(ChartError::Budget(format!("found {} of {count} orbit pairs before the horizon", out.len())));
    }
    out.truncate(count);
    Ok(out)
}

/// Every orbit pair the scan certifies before the horizon.
pub fn orbit_pairs<O: BaseFieldOracle + ?Sized>(oracle: &O) -> Result<Vec<OrbitPair>, ChartError> {
    scan(oracle, usize::MAX)
}

fn scan<O: BaseFieldOracle + ?Sized>(oracle: &O, count: usize) -> Result<Vec<OrbitPair>, ChartError> {
    let mut out = Vec::new();
    let p = oracle.prec();
    let grid = base_field::geometric_grid(&Scalar::one(p), &oracle.horizon(), SEARCH_PER_OCTAVE);
    let mut high: Option<Candidate> = None;
    let mut low: Option<Candidate> = None;
    let mut last = 1.0f64;
    let mut seen: Option<Integer> = None;
    for x in &grid {
        let c = candidate(oracle, x)?;
        if seen.as_ref() == Some(&c.l) {
            continue;
        }
        seen = Some(c.l.clone());
        let Some(h) = high.as_ref() else {
            high = Some(c);
            continue;
        };
        if c.sup < h.sup {
            if let Some(lw) = low.take() {
                if let Some(r) = log_ratio(&h.sup, &lw.inf) {
                    if r > last {
                        last = r;
                        out.push(OrbitPair { i: h.l.clone(), j: lw.l.clone(), u: h.sup.clone(), v: lw.inf.clone(), ratio: r });
                        if out.len() == count {
                            return Ok(out);
                        }
                    }
                }
            }
            high = Some(c);
        } else if c.hi < h.lo && low.as_ref().map_or(true, |lw| c.inf > lw.inf) {
            low = Some(c);
        }
    }
    Ok(out)
}
