//! Extended-precision real numbers.
//!
//! `Scalar` wraps an MPFR float. Binary operations round to nearest at the
//! larger of the two operand precisions.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use thiserror::Error;

/// Smallest precision accepted by [`Prec::new`].
pub const MIN_PRECISION_BITS: u32 = 32;

/// Errors raised by scalar construction and parsing.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("precision {0} bits is below the minimum of {MIN_PRECISION_BITS}")]
    PrecisionTooSmall(u32),
    #[error("malformed hex scalar {0:?}")]
    Parse(String),
    #[error("value is not finite")]
    NotFinite,
}

/// Working precision in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prec(u32);

impl Prec {
    pub const DEFAULT: Prec = Prec(4096);

    pub fn new(bits: u32) -> Result<Self, ScalarError> {
        if bits < MIN_PRECISION_BITS {
            return Err(ScalarError::PrecisionTooSmall(bits));
        }
        Ok(Prec(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// `bits / d`, clamped to the minimum.
    pub fn fraction(self, d: u32) -> Prec {
        Prec((self.0 / d).max(MIN_PRECISION_BITS))
    }

    pub fn plus(self, extra: u32) -> Prec {
        Prec(self.0 + extra)
    }
}

impl Default for Prec {
    fn default() -> Self {
        Prec::DEFAULT
    }
}

/// An extended-precision real number.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Scalar(Float);

impl Scalar {
    pub fn from_float(f: Float) -> Self {
        Scalar(f)
    }

    pub fn zero(p: Prec) -> Self {
        Scalar(Float::new(p.0))
    }

    pub fn one(p: Prec) -> Self {
        Scalar(Float::with_val(p.0, 1))
    }

    pub fn from_i64(v: i64, p: Prec) -> Self {
        Scalar(Float::with_val(p.0, v))
    }

    pub fn from_f64(v: f64, p: Prec) -> Self {
        Scalar(Float::with_val(p.0, v))
    }

    pub fn from_integer(v: &Integer, p: Prec) -> Self {
        Scalar(Float::with_val(p.0, v))
    }

    /// Nearest scalar to `num / den`.
    pub fn ratio(num: i64, den: i64, p: Prec) -> Self {
        Scalar(Float::with_val(p.0, Rational::from((num, den))))
    }

    pub fn from_rational(r: &Rational, p: Prec) -> Self {
        Scalar(Float::with_val(p.0, r))
    }

    /// Exact power of two `2^e`.
    pub fn pow2(e: i64, p: Prec) -> Self {
        let e = i32::try_from(e).expect("binary exponent out of range");
        Scalar(Float::with_val(p.0, 1) << e)
    }

    pub fn float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn prec(&self) -> Prec {
        Prec(self.0.prec())
    }

    /// Re-rounds to `p` bits.
    pub fn with_prec(&self, p: Prec) -> Self {
        Scalar(Float::with_val(p.0, &self.0))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.0.is_zero() && self.0.is_sign_positive()
    }

    /// -1, 0 or 1.
    pub fn signum_i(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.clone().abs())
    }

    pub fn recip(&self) -> Self {
        Scalar(self.0.clone().recip())
    }

    pub fn sqrt(&self) -> Self {
        Scalar(self.0.clone().sqrt())
    }

    pub fn exp(&self) -> Self {
        Scalar(self.0.clone().exp())
    }

    pub fn ln(&self) -> Self {
        Scalar(self.0.clone().ln())
    }

    pub fn square(&self) -> Self {
        Scalar(self.0.clone().square())
    }

    pub fn powi(&self, n: i32) -> Self {
        Scalar(self.0.clone().pow(n))
    }

    /// Multiplies by `2^e` exactly.
    pub fn mul_pow2(&self, e: i32) -> Self {
        Scalar(self.0.clone() << e)
    }

    pub fn mul_i(&self, k: i64) -> Self {
        Scalar(self.0.clone() * k)
    }

    pub fn div_i(&self, k: i64) -> Self {
        Scalar(self.0.clone() / k)
    }

    pub fn add_i(&self, k: i64) -> Self {
        Scalar(self.0.clone() + k)
    }

    pub fn mul_integer(&self, k: &Integer) -> Self {
        Scalar(Float::with_val(self.0.prec(), &self.0 * k))
    }

    pub fn add_integer(&self, k: &Integer) -> Self {
        Scalar(Float::with_val(self.0.prec(), &self.0 + k))
    }

    pub fn sub_integer(&self, k: &Integer) -> Self {
        Scalar(Float::with_val(self.0.prec(), &self.0 - k))
    }

    pub fn max(&self, other: &Self) -> Self {
        if other.0 > self.0 {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(&self, other: &Self) -> Self {
        if other.0 < self.0 {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// `log2 |x|` as a double; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = self.0.to_f64_exp();
        m.abs().log2() + e as f64
    }

    /// Binary exponent `e` with `2^(e-1) <= |x| < 2^e`.
    pub fn exponent(&self) -> Option<i32> {
        self.0.get_exp()
    }

    pub fn floor_integer(&self) -> Integer {
        self.0.clone().floor().to_integer().expect("finite")
    }

    pub fn ceil_integer(&self) -> Integer {
        self.0.clone().ceil().to_integer().expect("finite")
    }

    pub fn round_integer(&self) -> Integer {
        self.0.clone().round().to_integer().expect("finite")
    }

    /// Exact rational value.
    pub fn to_rational(&self) -> Option<Rational> {
        self.0.to_rational()
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        self.0.partial_cmp(r).expect("finite")
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).expect("comparison with NaN")
    }

    /// `|a - b| / max(|a|, |b|)`, zero when both vanish.
    pub fn rel_diff(a: &Self, b: &Self) -> Self {
        let den = a.abs().max(&b.abs());
        if den.is_zero() {
            return Scalar::zero(a.prec());
        }
        (a - b).abs() / den
    }

    /// Lowercase hex form `±0x1.hhhp±e` (binary exponent in decimal).
    pub fn to_hex(&self) -> String {
        let sign = if self.0.is_sign_negative() { '-' } else { '+' };
        if self.0.is_zero() {
            return format!("{sign}0x0p+0");
        }
        let (mant, exp) = self.0.to_integer_exp().expect("finite scalar");
        let mut mant = mant.abs();
        let tz = mant.find_one(0).unwrap_or(0);
        mant >>= tz;
        let exp = i64::from(exp) + i64::from(tz);
        let bits = mant.significant_bits();
        let e = exp + i64::from(bits) - 1;
        let frac_bits = bits - 1;
        if frac_bits == 0 {
            return format!("{sign}0x1p{e:+}");
        }
        let digits = (frac_bits + 3) / 4;
        let frac = (mant - (Integer::from(1) << frac_bits)) << (digits * 4 - frac_bits);
        let mut hex = frac.to_string_radix(16);
        while hex.len() < digits as usize {
            hex.insert(0, '0');
        }
        let hex = hex.trim_end_matches('0');
        format!("{sign}0x1.{hex}p{e:+}")
    }

    /// Parses the form written by [`Scalar::to_hex`], rounding to `p`.
    pub fn from_hex(s: &str, p: Prec) -> Result<Self, ScalarError> {
        let err = || ScalarError::Parse(s.to_string());
        let (neg, rest) = match s.as_bytes().first() {
            Some(b'+') => (false, &s[1..]),
            Some(b'-') => (true, &s[1..]),
            _ => (false, s),
        };
        let rest = rest.strip_prefix("0x").ok_or_else(err)?;
        let (mant_str, exp_str) = rest.split_once('p').ok_or_else(err)?;
        let exp: i64 = exp_str.parse().map_err(|_| err())?;
        let (int_part, frac_part) = match mant_str.split_once('.') {
            Some((a, b)) => (a, b),
            None => (mant_str, ""),
        };
        if int_part.is_empty() || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_hexdigit()) {
            return Err(err());
        }
        let all = format!("{int_part}{frac_part}");
        let mant = Integer::from_str_radix(&all, 16).map_err(|_| err())?;
        let shift = exp - 4 * frac_part.len() as i64;
        let shift = i32::try_from(shift).map_err(|_| err())?;
        let need = mant.significant_bits().max(1);
        let exact = Float::with_val(need, &mant) << shift;
        let mut v = Float::with_val(p.0, &exact);
        if neg {
            v = -v;
        }
        Ok(Scalar(v))
    }

    /// Hex string rounded to `bits` significant bits, for compact output.
    pub fn to_hex_rounded(&self, bits: u32) -> String {
        Scalar(Float::with_val(bits.max(MIN_PRECISION_BITS), &self.0)).to_hex()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.20e}", self.0.to_f64())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn wider(a: &Float, b: &Float) -> u32 {
    a.prec().max(b.prec())
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                Scalar(Float::with_val(wider(&self.0, &rhs.0), &self.0 $op &rhs.0))
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self $op &rhs
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                &self $op rhs
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                &self $op &rhs
            }
        }
        impl $atr<&Scalar> for Scalar {
            fn $am(&mut self, rhs: &Scalar) {
                *self = &*self $op rhs;
            }
        }
        impl $atr<Scalar> for Scalar {
            fn $am(&mut self, rhs: Scalar) {
                *self = &*self $op &rhs;
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, +);
binop!(Sub, sub, SubAssign, sub_assign, -);
binop!(Mul, mul, MulAssign, mul_assign, *);
binop!(Div, div, DivAssign, div_assign, /);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Prec {
        Prec::new(512).unwrap()
    }

    #[test]
    fn hex_simple_values() {
        assert_eq!(Scalar::from_i64(1, p()).to_hex(), "+0x1p+0");
        assert_eq!(Scalar::from_i64(3, p()).to_hex(), "+0x1.8p+1");
        assert_eq!(Scalar::from_f64(-0.375, p()).to_hex(), "-0x1.8p-2");
        assert_eq!(Scalar::zero(p()).to_hex(), "+0x0p+0");
        assert_eq!(Scalar::from_i64(10, p()).to_hex(), "+0x1.4p+3");
    }

    #[test]
    fn hex_round_trip_thirds() {
        let x = Scalar::ratio(1, 3, p());
        let s = x.to_hex();
        let y = Scalar::from_hex(&s, p()).unwrap();
        assert!(x == y);
        assert_eq!(y.to_hex(), s);
    }

    #[test]
    fn tiny_dyadics_round_trip() {
        for n in 1..=8i64 {
            let u = Scalar::pow2(-n.pow(4), p());
            let s = u.to_hex();
            assert_eq!(s, format!("+0x1p-{}", n.pow(4)));
            assert!(Scalar::from_hex(&s, p()).unwrap() == u);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(Scalar::from_hex("0x1.zz", p()).is_err());
        assert!(Scalar::from_hex("1.0p3", p()).is_err());
        assert!(Prec::new(8).is_err());
    }

    #[test]
    fn mixed_precision_takes_wider() {
        let a = Scalar::one(Prec::new(64).unwrap());
        let b = Scalar::one(p());
        assert_eq!((&a + &b).prec().bits(), 512);
    }
}
