//! Truncated jets `[D⁰g, D¹g, …, D^m g]` of one-dimensional maps at a point.

use thiserror::Error;

use crate::scalar::{Prec, Scalar};
use crate::series::{factorial, Series};

/// Jet calculus failures.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("singular jet: first derivative vanishes")]
    Singular,
}

/// Raw derivatives of a map at `base` (not divided by factorials).
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    base: Scalar,
    coeffs: Vec<Scalar>,
}

impl Jet {
    pub fn new(base: Scalar, coeffs: Vec<Scalar>) -> Result<Self, JetError> {
        if coeffs.is_empty() {
            return Err(JetError::Contract("a jet needs at least its value".into()));
        }
        Ok(Jet { base, coeffs })
    }

    /// Jet of `t ↦ t` at `base`.
    pub fn identity(base: Scalar, order: usize) -> Self {
        Jet::affine(base.clone(), base.clone(), Scalar::one(base.prec()), order)
    }

    pub fn constant(base: Scalar, value: Scalar, order: usize) -> Self {
        Jet::affine(base, value.clone(), Scalar::zero(value.prec()), order)
    }

    /// Jet of an affine map with the given value and slope at `base`.
    pub fn affine(base: Scalar, value: Scalar, slope: Scalar, order: usize) -> Self {
        let p = value.prec();
        let mut coeffs = vec![Scalar::zero(p); order + 1];
        coeffs[0] = value;
        if order >= 1 {
            coeffs[1] = slope;
        }
        Jet { base, coeffs }
    }

    pub fn base(&self) -> &Scalar {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> &Scalar {
        &self.coeffs[0]
    }

    /// `D^k g(base)`.
    pub fn d(&self, k: usize) -> &Scalar {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn prec(&self) -> Prec {
        self.coeffs[0].prec()
    }

    pub fn to_series(&self) -> Series {
        let p = self.prec();
        Series(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k < 2 || c.is_zero() { c.clone() } else { c / factorial(k, p) })
                .collect(),
        )
    }

    pub fn from_series(base: Scalar, s: &Series) -> Self {
        let p = s.prec();
        let coeffs = s
            .0
            .iter()
            .enumerate()
            .map(|(k, c)| if k < 2 || c.is_zero() { c.clone() } else { c * factorial(k, p) })
            .collect();
        Jet { base, coeffs }
    }

    /// Keeps derivatives up to `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        Jet { base: self.base.clone(), coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    /// Jet of `Dg` at the same base, one order lower.
    pub fn derivative(&self) -> Result<Jet, JetError> {
        if self.order() == 0 {
            return Err(JetError::Contract("cannot differentiate an order-0 jet".into()));
        }
        Ok(Jet { base: self.base.clone(), coeffs: self.coeffs[1..].to_vec() })
    }

    /// Jet of `g + c`.
    pub fn add_value(&self, c: &Scalar) -> Jet {
        let mut j = self.clone();
        j.coeffs[0] = &j.coeffs[0] + c;
        j
    }

    /// Jet of `c·g`.
    pub fn scale(&self, c: &Scalar) -> Jet {
        Jet { base: self.base.clone(), coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Jet of `g - h` at the same base.
    pub fn sub(&self, o: &Jet) -> Result<Jet, JetError> {
        same_order(self, o)?;
        Ok(Jet { base: self.base.clone(), coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() })
    }

    /// Jet of `g + h` at the same base.
    pub fn add(&self, o: &Jet) -> Result<Jet, JetError> {
        same_order(self, o)?;
        Ok(Jet { base: self.base.clone(), coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() })
    }

    /// Jet of `g·h` (Leibniz rule).
    pub fn mul(&self, o: &Jet) -> Result<Jet, JetError> {
        same_order(self, o)?;
        Ok(Jet::from_series(self.base.clone(), &self.to_series().mul(&o.to_series())))
    }

    /// Jet of `g/h`.
    pub fn div(&self, o: &Jet) -> Result<Jet, JetError> {
        same_order(self, o)?;
        if o.value().is_zero() {
            return Err(JetError::Contract("division by a jet with zero value".into()));
        }
        Ok(Jet::from_series(self.base.clone(), &self.to_series().div(&o.to_series())))
    }

    /// Same derivatives viewed at another base point (used after a translation of the argument).
    pub fn rebased(&self, base: Scalar) -> Jet {
        Jet { base, coeffs: self.coeffs.clone() }
    }

    /// Largest `|D^k|` over `lo..=hi`.
    pub fn max_abs(&self, lo: usize, hi: usize) -> Scalar {
        let mut m = Scalar::zero(self.prec());
        for c in &self.coeffs[lo..=hi.min(self.order())] {
            m = m.max(&c.abs());
        }
        m
    }
}

fn same_order(a: &Jet, b: &Jet) -> Result<(), JetError> {
    if a.order() != b.order() {
        return Err(JetError::Contract(format!("order mismatch: {} vs {}", a.order(), b.order())));
    }
    Ok(())
}

/// Jet of `outer ∘ inner` at `inner.base`; `outer` is taken at `inner`'s value.
pub fn jet_compose(outer: &Jet, inner: &Jet) -> Result<Jet, JetError> {
    same_order(outer, inner)?;
    let s = outer.to_series().compose(&inner.to_series());
    Ok(Jet::from_series(inner.base.clone(), &s))
}

/// Composes a chain given innermost first.
pub fn jet_compose_chain(chain: &[Jet]) -> Result<Jet, JetError> {
    let mut it = chain.iter();
    let mut acc = it.next().ok_or_else(|| JetError::Contract("empty chain".into()))?.clone();
    for j in it {
        acc = jet_compose(j, &acc)?;
    }
    Ok(acc)
}

/// Jet of `g⁻¹` at `g(x)` by Newton iteration on truncated series.
pub fn jet_invert(j: &Jet) -> Result<Jet, JetError> {
    let m = j.order();
    if m == 0 || j.d(1).is_zero() {
        return Err(JetError::Singular);
    }
    let p = j.prec();
    let n = m + 1;
    let mut d = j.to_series();
    d.0[0] = Scalar::zero(p);
    // D'(ε) padded to full length; the top term only ever meets a zero residual coefficient.
    let mut dd = d.derivative();
    dd.0.push(Scalar::zero(p));
    let mut s = Series::zeros(n, p);
    s.0[1] = Scalar::one(p);
    let mut y = s.scale(&d.0[1].recip());
    let steps = if m == 1 { 0 } else { usize::BITS - (m - 1).leading_zeros() + 1 };
    for _ in 0..steps {
        let resid = d.compose(&y).sub(&s);
        y = y.sub(&resid.div(&dd.compose(&y)));
    }
    y.0[0] = j.base().clone();
    Ok(Jet::from_series(j.value().clone(), &y))
}

/// `Lg = D²g / Dg` at the base point.
#[allow(non_snake_case)]
pub fn jet_L(j: &Jet) -> Result<Scalar, JetError> {
    if j.order() < 2 {
        return Err(JetError::Contract("L needs a jet of order at least 2".into()));
    }
    if j.d(1).is_zero() {
        return Err(JetError::Singular);
    }
    Ok(j.d(2) / j.d(1))
}

/// Number of set partitions of `{1..m}` for `1 ≤ m ≤ 12`.
pub fn bell_number(m: u32) -> Result<u64, JetError> {
    if !(1..=12).contains(&m) {
        return Err(JetError::Contract(format!("bell_number defined for 1..=12, got {m}")));
    }
    let mut row = vec![1u64];
    for _ in 1..m {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for v in &row {
            let prev = *next.last().unwrap();
            next.push(prev + v);
        }
        row = next;
    }
    Ok(*row.last().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Prec {
        Prec::new(512).unwrap()
    }

    fn jet(base: i64, v: &[i64]) -> Jet {
        Jet::new(Scalar::from_i64(base, p()), v.iter().map(|&x| Scalar::from_i64(x, p())).collect()).unwrap()
    }

    #[test]
    fn square_after_shift() {
        let h = jet(1, &[1, 2, 2]);
        let g = jet(0, &[1, 1, 0]);
        assert_eq!(jet_compose(&h, &g).unwrap(), jet(0, &[1, 2, 2]));
    }

    #[test]
    fn identity_outer_is_neutral() {
        let g = jet(2, &[5, 3, -7, 11]);
        let id = Jet::identity(Scalar::from_i64(5, p()), 3);
        assert_eq!(jet_compose(&id, &g).unwrap(), g);
    }

    #[test]
    fn order_mismatch_is_rejected() {
        assert!(matches!(jet_compose(&jet(0, &[1, 1]), &jet(0, &[0, 1, 0])), Err(JetError::Contract(_))));
    }

    #[test]
    fn affine_inverse() {
        let inv = jet_invert(&jet(0, &[3, 2, 0])).unwrap();
        assert!(inv.base() == &Scalar::from_i64(3, p()));
        assert!(inv.value().is_zero());
        assert!(inv.d(1) == &Scalar::ratio(1, 2, p()));
        assert!(inv.d(2).is_zero());
    }

    #[test]
    fn identity_inverse() {
        let id = Jet::identity(Scalar::from_i64(4, p()), 5);
        assert_eq!(jet_invert(&id).unwrap(), id);
    }

    #[test]
    fn singular_inverse() {
        assert_eq!(jet_invert(&jet(0, &[1, 0, 2])), Err(JetError::Singular));
    }

    #[test]
    fn l_operator_values() {
        assert!(jet_L(&jet(0, &[4, 3, 0])).unwrap().is_zero());
        assert!(jet_L(&jet(0, &[0, 1, 1])).unwrap() == Scalar::one(p()));
        assert!(matches!(jet_L(&jet(0, &[0, 1])), Err(JetError::Contract(_))));
    }

    #[test]
    fn bell_values() {
        let got: Vec<u64> = (1..=12).map(|m| bell_number(m).unwrap()).collect();
        assert_eq!(&got[..5], &[1, 2, 5, 15, 52]);
        assert_eq!(got[11], 4_213_597);
        assert!(bell_number(0).is_err());
        assert!(bell_number(13).is_err());
    }
}
