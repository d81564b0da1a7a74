//! Truncated Taylor series `Σ c_k ε^k` with scalar coefficients.

use rug::Integer;

use crate::scalar::{Prec, Scalar};

/// Taylor coefficients `c_0..=c_m` (already divided by factorials).
#[derive(Clone, Debug, PartialEq)]
pub struct Series(pub Vec<Scalar>);

impl Series {
    pub fn zeros(len: usize, p: Prec) -> Self {
        Series(vec![Scalar::zero(p); len])
    }

    pub fn constant(c: Scalar, len: usize) -> Self {
        let p = c.prec();
        let mut v = vec![Scalar::zero(p); len];
        v[0] = c;
        Series(v)
    }

    /// `c + ε`, truncated to `len` terms.
    pub fn variable(c: Scalar, len: usize) -> Self {
        let p = c.prec();
        let mut s = Series::constant(c, len);
        if len > 1 {
            s.0[1] = Scalar::one(p);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, k: usize) -> &Scalar {
        &self.0[k]
    }

    pub fn prec(&self) -> Prec {
        self.0[0].prec()
    }

    /// True when every coefficient of positive degree is exactly zero.
    pub fn is_constant(&self) -> bool {
        self.0.iter().skip(1).all(Scalar::is_zero)
    }

    pub fn add(&self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Series {
        Series(self.0.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Series {
        Series(self.0.iter().map(|a| -a).collect())
    }

    pub fn add_constant(&self, c: &Scalar) -> Series {
        let mut s = self.clone();
        s.0[0] = &s.0[0] + c;
        s
    }

    pub fn mul(&self, o: &Series) -> Series {
        let n = self.len().min(o.len());
        let p = self.prec().max(o.prec());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = Scalar::zero(p);
            for i in 0..=k {
                let (a, b) = (&self.0[i], &o.0[k - i]);
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            out.push(acc);
        }
        Series(out)
    }

    /// `self / o`; `o` must have a nonzero constant term.
    pub fn div(&self, o: &Series) -> Series {
        let n = self.len().min(o.len());
        let mut q: Vec<Scalar> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.0[k].clone();
            for i in 1..=k {
                if !o.0[i].is_zero() && !q[k - i].is_zero() {
                    acc -= &o.0[i] * &q[k - i];
                }
            }
            q.push(acc / &o.0[0]);
        }
        Series(q)
    }

    pub fn recip(&self) -> Series {
        Series::constant(Scalar::one(self.prec()), self.len()).div(self)
    }

    pub fn exp(&self) -> Series {
        let n = self.len();
        let mut e: Vec<Scalar> = Vec::with_capacity(n);
        e.push(self.0[0].exp());
        for k in 1..n {
            let mut acc = Scalar::zero(self.prec());
            for i in 1..=k {
                if !self.0[i].is_zero() && !e[k - i].is_zero() {
                    acc += (&self.0[i] * &e[k - i]).mul_i(i as i64);
                }
            }
            e.push(acc.div_i(k as i64));
        }
        Series(e)
    }

    /// Formal derivative, one term shorter.
    pub fn derivative(&self) -> Series {
        Series(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.mul_i(k as i64))
                .collect(),
        )
    }

    /// Formal antiderivative with constant term `c0`, one term longer.
    pub fn integrate(&self, c0: Scalar) -> Series {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(c0);
        for (k, c) in self.0.iter().enumerate() {
            v.push(c.div_i(k as i64 + 1));
        }
        Series(v)
    }

    pub fn truncate(&self, len: usize) -> Series {
        Series(self.0[..len.min(self.len())].to_vec())
    }

    /// `self(inner(ε))` where `self` is expanded around `inner_0`.
    ///
    /// Only the non-constant part of `inner` is substituted.
    pub fn compose(&self, inner: &Series) -> Series {
        let n = self.len().min(inner.len());
        let p = self.prec().max(inner.prec());
        if inner.0[2.min(n)..n].iter().all(Scalar::is_zero) {
            let slope = if n > 1 { inner.0[1].clone() } else { Scalar::zero(p) };
            return self.truncate(n).rescale(&slope);
        }
        let mut eps = inner.truncate(n);
        eps.0[0] = Scalar::zero(p);
        let mut acc = Series::constant(self.0[n - 1].clone(), n);
        for k in (0..n - 1).rev() {
            acc = acc.mul(&eps);
            acc.0[0] = &acc.0[0] + &self.0[k];
        }
        acc
    }

    /// Evaluates the polynomial at `h`.
    pub fn eval(&self, h: &Scalar) -> Scalar {
        let mut acc = self.0[self.len() - 1].clone();
        for k in (0..self.len() - 1).rev() {
            acc = &acc * h + &self.0[k];
        }
        acc
    }

    /// Series of `c·ε` rescaled: coefficient k multiplied by `c^k`.
    pub fn rescale(&self, c: &Scalar) -> Series {
        let mut f = Scalar::one(c.prec());
        let mut out = Vec::with_capacity(self.len());
        for a in &self.0 {
            out.push(a * &f);
            f = &f * c;
        }
        Series(out)
    }
}

/// `k!` as a scalar.
pub fn factorial(k: usize, p: Prec) -> Scalar {
    Scalar::from_integer(&Integer::from(Integer::factorial(k as u32)), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Prec {
        Prec::new(256).unwrap()
    }

    fn s(v: &[i64]) -> Series {
        Series(v.iter().map(|&x| Scalar::from_i64(x, p())).collect())
    }

    #[test]
    fn product_of_binomials() {
        let a = s(&[1, 1, 0, 0]);
        let b = a.mul(&a).mul(&a);
        assert_eq!(b, s(&[1, 3, 3, 1]));
    }

    #[test]
    fn division_inverts_product() {
        let a = s(&[2, 1, 5, -3]);
        let b = s(&[1, -4, 2, 7]);
        let q = a.mul(&b).div(&b);
        for k in 0..4 {
            assert!(Scalar::rel_diff(&q.0[k], &a.0[k]).log2_abs() < -240.0);
        }
    }

    #[test]
    fn exp_of_linear() {
        let e = s(&[0, 1, 0, 0, 0]).exp();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (c, w) in e.0.iter().zip(want) {
            assert!((c.to_f64() - w).abs() < 1e-15);
        }
    }

    #[test]
    fn composition_of_polynomials() {
        // (1 + e)^2 with e = 2x + x^2  ->  1 + 4x + 6x^2 + 4x^3
        let outer = s(&[1, 2, 1, 0]);
        let inner = s(&[0, 2, 1, 0]);
        assert_eq!(outer.compose(&inner), s(&[1, 4, 6, 4]));
    }
}
