//! The Sergeraert field: a C¹-bounded contracting field with alternating speed plateaus.

use rug::Rational;
use scalar_jet::{Jet, Prec, Scalar, Series};

use crate::bumps::step_series;
use crate::FieldError;

/// Largest jet order accepted by the field evaluators.
pub const MAX_ORDER: usize = 12;

/// How the wave amplitudes `w_n` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WaveSizes {
    /// `w_n = 2^{-n³}`.
    #[default]
    Cubic,
    /// `w_n = √u_n`.
    SqrtU,
}

/// Speed profile on one block `[2^{-n-1}, 2^{-n}]`, listed along the flow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Piece {
    /// `x ≥ 1`, unit speed.
    Unit,
    /// `y ∈ [5/6, 1]`, speed `u_n`.
    UHigh,
    /// `y ∈ (2/3, 5/6)`, from `u_n` to `v_n`.
    A,
    /// `y ∈ [1/3, 2/3]`, speed `v_n`.
    V,
    /// `y ∈ (1/6, 1/3)`, from `v_n` to `u_{n+1}`.
    B,
    /// `y ∈ [0, 1/6]`, speed `u_{n+1}`.
    ULow,
}

/// Where a position sits in the block landscape.
#[derive(Clone, Debug, PartialEq)]
pub struct Location {
    pub n: u32,
    pub piece: Piece,
    /// `y = 2^{n+1} x - 1`.
    pub y: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SergeraertField {
    pub waves: WaveSizes,
}

impl Default for SergeraertField {
    fn default() -> Self {
        SergeraertField { waves: WaveSizes::Cubic }
    }
}

fn pow2_neg(e: u64, p: Prec) -> Scalar {
    Scalar::pow2(-(e as i64), p)
}

impl SergeraertField {
    pub fn new(waves: WaveSizes) -> Self {
        SergeraertField { waves }
    }

    /// `u_n = 2^{-n⁴}`.
    pub fn u(&self, n: u32, p: Prec) -> Scalar {
        pow2_neg((n as u64).pow(4), p)
    }

    /// `v_n = 2^{-n²}`.
    pub fn v(&self, n: u32, p: Prec) -> Scalar {
        pow2_neg((n as u64).pow(2), p)
    }

    pub fn w(&self, n: u32, p: Prec) -> Scalar {
        match self.waves {
            WaveSizes::Cubic => pow2_neg((n as u64).pow(3), p),
            WaveSizes::SqrtU => self.u(n, p).sqrt(),
        }
    }

    /// Block and sub-block containing `x > 0`.
    pub fn locate(&self, x: &Scalar) -> Result<Location, FieldError> {
        let p = x.prec();
        if !x.is_positive() {
            return Err(FieldError::Origin);
        }
        if x >= &Scalar::one(p) {
            return Ok(Location { n: 0, piece: Piece::Unit, y: Scalar::one(p) });
        }
        // x = m·2^e with m ∈ [1/2, 1), so x ∈ [2^{-n-1}, 2^{-n}) for n = -e
        let e = x.exponent().ok_or(FieldError::Origin)?;
        let n = (-e) as u32;
        let y = x.mul_pow2(n as i32 + 1).add_i(-1);
        let cmp = |a: i32, b: i32| y.cmp_rational(&Rational::from((a, b)));
        let piece = if cmp(1, 6).is_le() {
            Piece::ULow
        } else if cmp(1, 3).is_lt() {
            Piece::B
        } else if cmp(2, 3).is_le() {
            Piece::V
        } else if cmp(5, 6).is_lt() {
            Piece::A
        } else {
            Piece::UHigh
        };
        Ok(Location { n, piece, y })
    }

    /// Speed `|ξ₀|` on a plateau piece of block `n`.
    pub fn plateau_speed(&self, n: u32, piece: Piece, p: Prec) -> Option<Scalar> {
        match piece {
            Piece::Unit => Some(Scalar::one(p)),
            Piece::UHigh => Some(self.u(n, p)),
            Piece::V => Some(self.v(n, p)),
            Piece::ULow => Some(self.u(n + 1, p)),
            Piece::A | Piece::B => None,
        }
    }

    /// Transition speed `a + b·s(z)`: returns `(a, b)`.
    ///
    /// On `A` the variable is `z = 5 - 6y`, on `B` it is `z = 6y - 1`; `z = 1` is the fast end.
    pub fn transition_coeffs(&self, n: u32, piece: Piece, p: Prec) -> Option<(Scalar, Scalar)> {
        let v = self.v(n, p);
        match piece {
            Piece::A => {
                let a = self.u(n, p);
                let b = &v - &a;
                Some((a, b))
            }
            Piece::B => {
                let a = self.u(n + 1, p);
                let b = &v - &a;
                Some((a, b))
            }
            _ => None,
        }
    }

    /// Jet of ξ₀ at `x`.
    pub fn xi0_jet(&self, x: &Scalar, order: usize) -> Result<Jet, FieldError> {
        if order > MAX_ORDER {
            return Err(FieldError::OrderTooLarge(order));
        }
        Ok(Jet::from_series(x.clone(), &self.xi0_series(x, order + 1)?))
    }

    /// Taylor coefficients of ξ₀ at `x`, `len` terms and no order cap.
    pub fn xi0_series(&self, x: &Scalar, len: usize) -> Result<Series, FieldError> {
        let p = x.prec();
        let loc = self.locate(x)?;
        if let Some(speed) = self.plateau_speed(loc.n, loc.piece, p) {
            return Ok(Series::constant(-speed, len));
        }
        let (a, b) = self.transition_coeffs(loc.n, loc.piece, p).expect("transition piece");
        // dz/dx = ±6·2^{n+1}
        let slope = Scalar::from_i64(3, p).mul_pow2(loc.n as i32 + 2);
        let (z, slope) = match loc.piece {
            Piece::A => (Scalar::from_i64(5, p) - loc.y.mul_i(6), -slope),
            _ => (loc.y.mul_i(6).add_i(-1), slope),
        };
        let s = step_series(&z, len).rescale(&slope);
        Ok(s.scale(&b).add_constant(&a).neg())
    }

    /// Value of ξ₀ at `x > 0`.
    pub fn xi0(&self, x: &Scalar) -> Result<Scalar, FieldError> {
        Ok(self.xi0_jet(x, 0)?.value().clone())
    }
}

/// The zero jet the field takes at the origin by flatness.
pub fn origin_jet(order: usize, p: Prec) -> Jet {
    Jet::constant(Scalar::zero(p), Scalar::zero(p), order)
}
