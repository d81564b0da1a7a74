//! Travel time across one transition sub-block.
//!
//! With speed `a + b·s(ζ)` on `ζ ∈ [0, 1]` (fast end at `ζ = 1`), this tabulates
//! `F(z) = ∫_z^1 dζ / (a + b·s(ζ))`. The integral is taken in the variable
//! `λ = 1/ζ - 1/(1-ζ)`, where `s = 1/(1 + e^λ)` and the integrand is analytic in a
//! strip; panels are graded by the distance to the complex singularities.

use scalar_jet::{Prec, Scalar};

use crate::gauss::GaussLegendre;
use crate::ChartError;

/// Panel half-width is at most `distance / (KAPPA + 1)`.
const KAPPA: f64 = 2.0;

/// Maximal number of adaptive bisections of a panel.
const MAX_DEPTH: u32 = 24;

/// `ζ(λ)`, the root in `(0, 1)` of `1/ζ - 1/(1-ζ) = λ`; `1 - ζ(λ) = ζ(-λ)`.
pub fn zeta_of_lambda(l: &Scalar) -> Scalar {
    let p = l.prec();
    let two = Scalar::from_i64(2, p);
    let root = (l.square() + Scalar::from_i64(4, p)).sqrt();
    // each form is free of cancellation on its own side of λ = -1
    if l < &Scalar::from_i64(-1, p) {
        (&l.add_i(2) - &root) / l.mul_i(2)
    } else {
        two / (l.add_i(2) + root)
    }
}

/// `λ(ζ)` from `ζ` and `1 - ζ`, both given to full relative accuracy.
pub fn lambda_of(z: &Scalar, zc: &Scalar) -> Scalar {
    z.recip() - zc.recip()
}

#[derive(Clone, Debug)]
struct Panel {
    lo: Scalar,
    hi: Scalar,
    /// Integral over all earlier panels.
    before: Scalar,
    value: Scalar,
}

/// Tabulated `F` for one transition.
#[derive(Clone, Debug)]
pub struct TransitionTable {
    a: Scalar,
    b: Scalar,
    wp: Prec,
    target_bits: u32,
    /// `b = 0`: constant speed `a`.
    flat: bool,
    lam_min: Scalar,
    lam_max: Scalar,
    /// `∫` over `ζ ∈ [ζ(λ_min), 1]`, closed form.
    tail_fast: Scalar,
    core: Scalar,
    /// `ζ(λ_max)`.
    zeta_max: Scalar,
    panels: Vec<Panel>,
}

/// Integrand in `λ`: `(1/speed)·dζ/dλ` with sign removed.
fn integrand(a: &Scalar, b: &Scalar, l: &Scalar) -> Scalar {
    let e = l.exp();
    let one_e = e.add_i(1);
    let z = zeta_of_lambda(l);
    let zc = zeta_of_lambda(&-l);
    let z2 = z.square();
    let zc2 = zc.square();
    let jac = &z2 * &zc2 / (&z2 + &zc2);
    &one_e / &(a * &one_e + b) * jac
}

impl TransitionTable {
    /// Builds the table with working precision `wp` and relative target `2^{-target_bits}`.
    pub fn build(a: &Scalar, b: &Scalar, wp: Prec, target_bits: u32, rule: &GaussLegendre) -> Result<Self, ChartError> {
        let a = a.with_prec(wp);
        let b = b.with_prec(wp);
        let zero = Scalar::zero(wp);
        if b.is_zero() {
            return Ok(TransitionTable {
                a,
                b,
                wp,
                target_bits,
                flat: true,
                lam_min: zero.clone(),
                lam_max: zero.clone(),
                tail_fast: zero.clone(),
                core: zero.clone(),
                zeta_max: zero,
                panels: vec![],
            });
        }
        let ln2 = std::f64::consts::LN_2;
        let guard = (target_bits + 16) as f64 * ln2;
        // pole of 1/speed at λ₀ ± iπ
        let lam0 = ((&a + &b) / &a).ln().to_f64();
        let ba = (&b / &a).ln().to_f64();
        let lam_min = -guard.ceil();
        let lam_max = (ba + guard).ceil();
        let dist = |l: f64| -> f64 {
            let d1 = (l * l + 4.0).sqrt();
            let d2 = ((l - lam0).powi(2) + std::f64::consts::PI.powi(2)).sqrt();
            d1.min(d2)
        };
        let mut edges = vec![lam_min];
        let mut l = lam_min;
        while l < lam_max {
            let w = 2.0 * dist(l) / (KAPPA + 1.0);
            // dyadic endpoints keep the table exactly reproducible
            let next = ((l + w) * 1024.0).floor() / 1024.0;
            l = if next <= l { l + w } else { next }.min(lam_max);
            edges.push(l);
        }
        let tol = Scalar::pow2(-(target_bits as i64), wp);
        let mut panels = Vec::new();
        let mut total = Scalar::zero(wp);
        for e in edges.windows(2) {
            let lo = Scalar::from_f64(e[0], wp);
            let hi = Scalar::from_f64(e[1], wp);
            for (plo, phi, v) in adaptive(&a, &b, rule, &lo, &hi, &tol, 0)? {
                panels.push(Panel { lo: plo, hi: phi, before: total.clone(), value: v.clone() });
                total += v;
            }
        }
        let lmin = Scalar::from_f64(lam_min, wp);
        let lmax = Scalar::from_f64(lam_max, wp);
        let tail_fast = zeta_of_lambda(&-&lmin) / (&a + &b);
        let zeta_max = zeta_of_lambda(&lmax);
        Ok(TransitionTable {
            a,
            b,
            wp,
            target_bits,
            flat: false,
            lam_min: lmin,
            lam_max: lmax,
            tail_fast,
            core: total,
            zeta_max,
            panels,
        })
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// `F(0)`, the full crossing time per unit length.
    pub fn total(&self) -> Scalar {
        if self.flat {
            return self.a.recip();
        }
        &(&self.tail_fast + &self.core) + &(&self.zeta_max / &self.a)
    }

    /// `F(z)`, given `z` and `1 - z`.
    pub fn f_of(&self, z: &Scalar, zc: &Scalar, rule: &GaussLegendre) -> Scalar {
        let z = z.with_prec(self.wp);
        let zc = zc.with_prec(self.wp);
        if self.flat {
            return &zc / &self.a;
        }
        if !z.is_positive() {
            return self.total();
        }
        if !zc.is_positive() {
            return Scalar::zero(self.wp);
        }
        let l = lambda_of(&z, &zc);
        if l <= self.lam_min {
            return &zc / &(&self.a + &self.b);
        }
        if l >= self.lam_max {
            return &(&self.tail_fast + &self.core) + &((&self.zeta_max - &z) / &self.a);
        }
        let i = self.panels.partition_point(|pl| pl.hi <= l).min(self.panels.len() - 1);
        let pl = &self.panels[i];
        let part = rule.integrate(&pl.lo, &l, |x| integrand(&self.a, &self.b, x));
        &(&self.tail_fast + &pl.before) + &part
    }

    /// Inverse of `F`: returns `(z, 1 - z)` with `F(z) = phi`.
    pub fn z_of(&self, phi: &Scalar, rule: &GaussLegendre) -> Result<(Scalar, Scalar), ChartError> {
        let phi = phi.with_prec(self.wp);
        let one = Scalar::one(self.wp);
        if self.flat {
            let zc = &phi * &self.a;
            return Ok((&one - &zc, zc));
        }
        if !phi.is_positive() {
            return Ok((one, Scalar::zero(self.wp)));
        }
        if phi <= self.tail_fast {
            let zc = &phi * &(&self.a + &self.b);
            return Ok((&one - &zc, zc));
        }
        let rem = &phi - &self.tail_fast;
        if rem >= self.core {
            let z = &self.zeta_max - &(&(&rem - &self.core) * &self.a);
            if z.is_sign_negative() {
                return Err(ChartError::OutOfRange(format!("transition time {} beyond crossing", phi.to_f64())));
            }
            return Ok((z.clone(), &one - &z));
        }
        let i = self.panels.partition_point(|pl| pl.before <= rem).saturating_sub(1);
        let pl = &self.panels[i];
        let want = &rem - &pl.before;
        let g = |x: &Scalar| integrand(&self.a, &self.b, x);
        // Newton in λ, safeguarded by the panel bracket
        let (mut lo, mut hi) = (pl.lo.clone(), pl.hi.clone());
        let mut l = &lo + &(&(&hi - &lo) * &(&want / &pl.value));
        let stop = -((self.target_bits + 8) as f64);
        for _ in 0..80 {
            let val = rule.integrate(&pl.lo, &l, g) - &want;
            if val.is_positive() {
                hi = l.clone();
            } else {
                lo = l.clone();
            }
            let step = &val / &g(&l);
            let raw = (&step).abs() / l.abs().max(&one);
            if raw.is_zero() || raw.log2_abs() < stop {
                let l = &l - &step;
                return Ok((zeta_of_lambda(&l), zeta_of_lambda(&-&l)));
            }
            let mut next = &l - &step;
            // a Newton step past the bracket lands on the bound unless the bound is the current point
            if next >= hi {
                next = if hi != l { hi.clone() } else { (&lo + &hi).mul_pow2(-1) };
            } else if next <= lo {
                next = if lo != l { lo.clone() } else { (&lo + &hi).mul_pow2(-1) };
            }
            let moved = (&next - &l).abs() / l.abs().max(&one);
            l = next;
            if moved.is_zero() || moved.log2_abs() < stop {
                return Ok((zeta_of_lambda(&l), zeta_of_lambda(&-&l)));
            }
        }
        Err(ChartError::Convergence("transition inverse did not converge".into()))
    }
}

fn adaptive(
    a: &Scalar,
    b: &Scalar,
    rule: &GaussLegendre,
    lo: &Scalar,
    hi: &Scalar,
    tol: &Scalar,
    depth: u32,
) -> Result<Vec<(Scalar, Scalar, Scalar)>, ChartError> {
    let g = |x: &Scalar| integrand(a, b, x);
    let mid = (lo + hi).mul_pow2(-1);
    let whole = rule.integrate(lo, hi, g);
    let left = rule.integrate(lo, &mid, g);
    let right = rule.integrate(&mid, hi, g);
    let halves = &left + &right;
    if (&whole - &halves).abs() <= tol * &halves.abs() {
        return Ok(vec![(lo.clone(), mid.clone(), left), (mid, hi.clone(), right)]);
    }
    if depth >= MAX_DEPTH {
        return Err(ChartError::Convergence("quadrature panel failed to converge".into()));
    }
    let mut out = adaptive(a, b, rule, lo, &mid, tol, depth + 1)?;
    out.extend(adaptive(a, b, rule, &mid, hi, tol, depth + 1)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_round_trip() {
        let p = Prec::new(256).unwrap();
        for v in [-300.0, -2.5, -1.0, -1e-300, 0.0, 1e-300, 0.75, 40.0] {
            let l = Scalar::from_f64(v, p);
            let z = zeta_of_lambda(&l);
            let zc = zeta_of_lambda(&-&l);
            assert!((&z + &zc - Scalar::one(p)).log2_abs() < -250.0);
            assert!(Scalar::rel_diff(&lambda_of(&z, &zc), &l).log2_abs() < -240.0 || v.abs() < 1.0);
        }
    }
}
