//! One deformation stage: the bump train `φ_{q,n}(t) = t + Σ_{p≥0} γ_{q,n}(t + p/q)`.

use base_field::{bump_jet, Bump};
use rug::Integer;
use scalar_jet::{Jet, Prec, Scalar, Series};
use serde::{Deserialize, Serialize};

use crate::DeformError;

/// Maximal number of Newton steps when inverting `φ`.
pub const NEWTON_STEPS: usize = 64;

/// Parameters of stage `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct WavePlan {
    pub k: usize,
    /// Odd period denominator.
    pub q: u64,
    pub n: u32,
    /// Highland orbit index `i(n)`.
    pub i: Integer,
    /// Lowland orbit index `j(n)`.
    pub j: Integer,
    pub w: Scalar,
    /// Plateau speeds `u_n` on the highland and `v_n` on the lowland.
    pub u: Scalar,
    pub v: Scalar,
}

/// Serialized form of a plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WavePlanRecord {
    pub k: usize,
    pub q: u64,
    pub n: u32,
    pub i_decimal: String,
    pub j_decimal: String,
    pub w_hex: String,
    pub u_hex: String,
    pub v_hex: String,
}

impl WavePlan {
    pub fn prec(&self) -> Prec {
        self.w.prec()
    }

    fn q_scalar(&self) -> Scalar {
        Scalar::from_integer(&Integer::from(self.q), self.prec())
    }

    fn j_scalar(&self) -> Scalar {
        Scalar::from_integer(&self.j, self.prec())
    }

    /// `J_k = [j - 1/(2q), j + 1/(2q)]`.
    #[allow(non_snake_case)]
    pub fn J(&self) -> (Scalar, Scalar) {
        let h = self.q_scalar().mul_i(2).recip();
        let j = self.j_scalar();
        (&j - &h, &j + &h)
    }

    /// `M_k = [j - 1 + 1/(2q), j + 1/(2q)]`.
    #[allow(non_snake_case)]
    pub fn M(&self) -> (Scalar, Scalar) {
        let h = self.q_scalar().mul_i(2).recip();
        let j = self.j_scalar();
        (&j.add_i(-1) + &h, &j + &h)
    }

    /// `‖γ_k‖_m = w·q^m·‖γ‖_m`, given `‖γ‖_m`.
    pub fn gamma_k_norm(&self, m: usize, gamma_m: &Scalar) -> Scalar {
        &(&self.w * &self.q_scalar().powi(m as i32)) * gamma_m
    }

    /// Local coordinate of the one translate that can meet `t`: `τ = q(t - j) + p`
    /// with `p ≥ 0` and `τ ∈ (-1/2, 1/2]`, or `None` right of `J_k`.
    pub fn translate(&self, t: &Scalar) -> Option<(Integer, Scalar)> {
        let p = self.prec();
        let u = t.with_prec(p).sub_integer(&self.j).mul_integer(&Integer::from(self.q));
        let half = Scalar::ratio(1, 2, p);
        if u > half {
            return None;
        }
        let shift = (&half - &u).floor_integer();
        let tau = u.add_integer(&shift);
        Some((shift, tau))
    }

    /// Taylor coefficients of `φ_k` at `t`, `len` terms.
    pub fn phi_series(&self, t: &Scalar, len: usize) -> Series {
        let t = t.with_prec(self.prec());
        let mut s = Series::variable(t.clone(), len);
        if let Some((_, tau)) = self.translate(&t) {
            if tau.abs() < Scalar::ratio(1, 4, self.prec()) {
                let g = bump_jet(Bump::Gamma, &tau, len.saturating_sub(1)).to_series();
                s = s.add(&g.rescale(&self.q_scalar()).scale(&self.w));
            }
        }
        s
    }

    /// Jet of `φ_k` at `t`; orders up to 12 are the supported range.
    pub fn phi_jet(&self, t: &Scalar, order: usize) -> Jet {
        let t = t.with_prec(self.prec());
        Jet::from_series(t.clone(), &self.phi_series(&t, order + 1))
    }

    pub fn phi_point(&self, t: &Scalar) -> Scalar {
        self.phi_series(t, 1).0.swap_remove(0)
    }

    /// `φ_k⁻¹(y)` by Newton iteration from `y`.
    pub fn phi_inverse_point(&self, y: &Scalar) -> Result<Scalar, DeformError> {
        let p = self.prec();
        let y = y.with_prec(p);
        let tol = Scalar::pow2(-(p.bits() as i64) + 64, p) * y.abs().max(&Scalar::one(p));
        let mut t = y.clone();
        for _ in 0..NEWTON_STEPS {
            let s = self.phi_series(&t, 2);
            let step = &(&s.0[0] - &y) / &s.0[1];
            t = &t - &step;
            if step.abs() <= tol {
                return Ok(t);
            }
        }
        Err(DeformError::Newton { k: self.k, t: y.to_f64() })
    }

    pub fn to_record(&self) -> WavePlanRecord {
        WavePlanRecord {
            k: self.k,
            q: self.q,
            n: self.n,
            i_decimal: self.i.to_string(),
            j_decimal: self.j.to_string(),
            w_hex: self.w.to_hex(),
            u_hex: self.u.to_hex(),
            v_hex: self.v.to_hex(),
        }
    }

    pub fn from_record(r: &WavePlanRecord, p: Prec) -> Result<Self, DeformError> {
        let int = |s: &str| s.parse::<Integer>().map_err(|e| DeformError::Invalid(format!("{s}: {e}")));
        let hex = |s: &str| Scalar::from_hex(s, p).map_err(|e| DeformError::Invalid(e.to_string()));
        Ok(WavePlan {
            k: r.k,
            q: r.q,
            n: r.n,
            i: int(&r.i_decimal)?,
            j: int(&r.j_decimal)?,
            w: hex(&r.w_hex)?,
            u: hex(&r.u_hex)?,
            v: hex(&r.v_hex)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan() -> WavePlan {
        let p = Prec::new(512).unwrap();
        WavePlan {
            k: 1,
            q: 3,
            n: 4,
            i: Integer::from(1000),
            j: Integer::from(1u32) << 80,
            w: Scalar::pow2(-64, p),
            u: Scalar::pow2(-256, p),
            v: Scalar::pow2(-16, p),
        }
    }

    #[test]
    fn second_derivative_at_j() {
        let pl = plan();
        let t = Scalar::from_integer(&pl.j, pl.prec());
        let jet = pl.phi_jet(&t, 3);
        assert!(jet.value() == &t);
        assert!(jet.d(1) == &Scalar::one(pl.prec()));
        assert!(jet.d(2) == &pl.w.mul_i(9));
        assert!(jet.d(3).is_zero());
    }

    #[test]
    fn right_of_j_is_identity() {
        let pl = plan();
        let (_, hi) = pl.J();
        let t = &hi + &Scalar::ratio(1, 10, pl.prec());
        assert_eq!(pl.phi_jet(&t, 4), Jet::identity(t, 4));
    }

    #[test]
    fn translate_lands_in_half_cell() {
        let pl = plan();
        let p = pl.prec();
        let t = Scalar::from_integer(&pl.j, p).add_i(-7) + Scalar::ratio(1, 5, p);
        let (shift, tau) = pl.translate(&t).unwrap();
        // q(t - j) = -20.4
        assert_eq!(shift, 20);
        assert!((&tau - &Scalar::ratio(-2, 5, p)).abs().log2_abs() < -400.0);
    }

    #[test]
    fn inverse_round_trip() {
        let pl = plan();
        let p = pl.prec();
        let t = Scalar::from_integer(&pl.j, p) - Scalar::ratio(1, 20, p);
        let y = pl.phi_point(&t);
        assert!(y != t);
        let back = pl.phi_inverse_point(&y).unwrap();
        let e = Scalar::rel_diff(&back, &t).log2_abs();
        assert!(e < -430.0, "{e}");
    }
}
