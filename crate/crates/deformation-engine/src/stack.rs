//! The conjugation stack `Φ_k = φ_k∘…∘φ₁` and the deformed objects built from it.

use base_field::BaseFieldOracle;
use rug::Integer;
use scalar_jet::{jet_compose, jet_invert, Jet, Prec, Scalar, Series};
use serde::{Deserialize, Serialize};
use time_chart::{psi_inverse_series_of, psi_jet_of};

use crate::wave::WavePlan;
use crate::DeformError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Sergeraert,
    General,
}

impl std::str::FromStr for Mode {
    type Err = DeformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sergeraert" => Ok(Mode::Sergeraert),
            "general" => Ok(Mode::General),
            other => Err(DeformError::Invalid(format!("unknown mode {other}"))),
        }
    }
}

/// Norm constants measured while building each stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageNorms {
    /// `‖γ‖_{k+1}` (sampled, with safety factor).
    pub gamma: Scalar,
    /// `‖DΦ_{k-1}‖_k` (sampled, with safety factor).
    pub dphi: Scalar,
    pub xi0_c1: Scalar,
    /// Both sides of the inequality that fixed `n_k`.
    pub lhs: Scalar,
    pub rhs: Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConjugationStack {
    pub mode: Mode,
    pub plans: Vec<WavePlan>,
    pub norms: Vec<StageNorms>,
    prec: Prec,
}

fn one_step(plan: &WavePlan, s: &Series) -> Series {
    let outer = plan.phi_series(&s.0[0], s.len());
    outer.compose(s)
}

impl ConjugationStack {
    pub fn new(mode: Mode, prec: Prec) -> Self {
        ConjugationStack { mode, plans: vec![], norms: vec![], prec }
    }

    pub fn from_parts(mode: Mode, prec: Prec, plans: Vec<WavePlan>, norms: Vec<StageNorms>) -> Self {
        ConjugationStack { mode, plans, norms, prec }
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    /// Number of built stages.
    pub fn depth(&self) -> usize {
        self.plans.len()
    }

    pub fn push(&mut self, plan: WavePlan, norms: StageNorms) {
        self.plans.push(plan);
        self.norms.push(norms);
    }

    /// Plan of the `k`-th built stage, counted from 1.
    pub fn plan(&self, k: usize) -> Result<&WavePlan, DeformError> {
        if k == 0 {
            return Err(DeformError::Stage(k));
        }
        self.plans.get(k - 1).ok_or(DeformError::Stage(k))
    }

    fn check(&self, k: usize) -> Result<(), DeformError> {
        if k > self.depth() {
            return Err(DeformError::Stage(k));
        }
        Ok(())
    }

    /// Taylor coefficients of `Φ_k` at `t`, `len` terms.
    pub fn phi_stack_series(&self, k: usize, t: &Scalar, len: usize) -> Result<Series, DeformError> {
        self.check(k)?;
        let mut s = Series::variable(t.with_prec(self.prec), len);
        for plan in &self.plans[..k] {
            s = one_step(plan, &s);
        }
        Ok(s)
    }

    /// Jet of `Φ_k` at `t`.
    pub fn stack_jet(&self, k: usize, t: &Scalar, order: usize) -> Result<Jet, DeformError> {
        let t = t.with_prec(self.prec);
        Ok(Jet::from_series(t.clone(), &self.phi_stack_series(k, &t, order + 1)?))
    }

    pub fn stack_point(&self, k: usize, t: &Scalar) -> Result<Scalar, DeformError> {
        Ok(self.phi_stack_series(k, t, 1)?.0.swap_remove(0))
    }

    /// `Φ_k⁻¹(y)`, inverting one factor at a time.
    pub fn stack_inverse_point(&self, k: usize, y: &Scalar) -> Result<Scalar, DeformError> {
        self.check(k)?;
        let mut t = y.with_prec(self.prec);
        for plan in self.plans[..k].iter().rev() {
            t = plan.phi_inverse_point(&t)?;
        }
        Ok(t)
    }

    /// Jet of `Φ_k⁻¹` at `y`.
    pub fn stack_inverse_jet(&self, k: usize, y: &Scalar, order: usize) -> Result<Jet, DeformError> {
        let y = y.with_prec(self.prec);
        let t = self.stack_inverse_point(k, &y)?;
        if order == 0 {
            return Ok(Jet::constant(y, t, 0));
        }
        let fwd = self.stack_jet(k, &t, order)?;
        Ok(jet_invert(&fwd)?.rebased(y))
    }

    /// Jet of `σ_k^{p/q_k} = φ_k⁻¹∘(+p/q_k)∘φ_k` at `t`, cross-checked against the explicit sum.
    pub fn sigma_jet(&self, k: usize, p: u64, t: &Scalar, order: usize) -> Result<Jet, DeformError> {
        let plan = self.plan(k)?;
        if p > plan.q {
            return Err(DeformError::Invalid(format!("σ needs 0 ≤ p ≤ q = {}, got {p}", plan.q)));
        }
        let t = t.with_prec(self.prec);
        let shift = Scalar::from_rational(&rug::Rational::from((p, plan.q)), self.prec);
        let fwd = plan.phi_jet(&t, order);
        let moved = fwd.add_value(&shift);
        let back = plan.phi_inverse_point(moved.value())?;
        let inv = jet_invert(&plan.phi_jet(&back, order))?;
        let conj = jet_compose(&inv, &moved)?;
        let direct = self.sigma_sum_jet(k, p, &t, order)?;
        let tol = Scalar::pow2(-(self.prec.bits() as i64) / 2, self.prec) * t.abs().max(&Scalar::one(self.prec));
        for (m, (a, b)) in conj.coeffs().iter().zip(direct.coeffs()).enumerate() {
            if (a - b).abs() > tol {
                return Err(DeformError::Mismatch(format!("σ_{k}^{p}/{} at order {m}: {} vs {}", plan.q, a.to_f64(), b.to_f64())));
            }
        }
        Ok(conj)
    }

    /// `t + p/q + Σ_{i<p} γ_k(t + i/q)` as a jet.
    pub fn sigma_sum_jet(&self, k: usize, p: u64, t: &Scalar, order: usize) -> Result<Jet, DeformError> {
        let plan = self.plan(k)?;
        let t = t.with_prec(self.prec);
        let shift = Scalar::from_rational(&rug::Rational::from((p, plan.q)), self.prec);
        let mut s = Series::variable(&t + &shift, order + 1);
        // γ_k(t + i/q) ≠ 0 needs q(t - j) + i within 1/4 of zero
        let u = t.sub_integer(&plan.j).mul_integer(&Integer::from(plan.q));
        let i = (-&u).round_integer();
        if i >= 0 && i < p {
            let tau = u.add_integer(&i);
            let g = base_field::bump_jet(base_field::Bump::Gamma, &tau, order).to_series();
            let q = Scalar::from_integer(&Integer::from(plan.q), self.prec);
            s = s.add(&g.rescale(&q).scale(&plan.w));
        }
        Ok(Jet::from_series(t, &s))
    }
}

/// A stack together with the base field it deforms.
#[derive(Clone, Copy)]
pub struct Deformed<'a, O: BaseFieldOracle + ?Sized> {
    pub oracle: &'a O,
    pub stack: &'a ConjugationStack,
}

impl<'a, O: BaseFieldOracle + ?Sized> Deformed<'a, O> {
    pub fn new(oracle: &'a O, stack: &'a ConjugationStack) -> Self {
        Deformed { oracle, stack }
    }

    fn prec(&self) -> Prec {
        self.stack.prec()
    }

    /// Jet of `f_k^t = ψ∘Φ_k⁻¹∘(+t)∘Φ_k∘ψ⁻¹` at `x`.
    pub fn flow_jet(&self, k: usize, t: &Scalar, x: &Scalar, order: usize) -> Result<Jet, DeformError> {
        self.stack.check(k)?;
        let x = x.with_prec(self.prec());
        if t.is_zero() {
            return Ok(Jet::identity(x, order));
        }
        let ti = Jet::from_series(x.clone(), &psi_inverse_series_of(self.oracle, &x, order + 1)?);
        let fwd = jet_compose(&self.stack.stack_jet(k, ti.value(), order)?, &ti)?;
        let moved = fwd.add_value(&t.with_prec(self.prec()));
        let back = jet_compose(&self.stack.stack_inverse_jet(k, moved.value(), order)?, &moved)?;
        let out = psi_jet_of(self.oracle, back.value(), order)?;
        Ok(jet_compose(&out, &back)?)
    }

    pub fn flow_point(&self, k: usize, t: &Scalar, x: &Scalar) -> Result<Scalar, DeformError> {
        Ok(self.flow_jet(k, t, x, 0)?.value().clone())
    }

    /// Taylor coefficients of `ξ_k = ξ₀ / (DΦ_k∘ψ⁻¹)` at `x`, `len` terms.
    pub fn xi_k_series(&self, k: usize, x: &Scalar, len: usize) -> Result<Series, DeformError> {
        let x = x.with_prec(self.prec());
        let xi0 = self.oracle.field_jet(&x, len - 1)?.to_series();
        if k == 0 {
            return Ok(xi0);
        }
        let ti = psi_inverse_series_of(self.oracle, &x, len)?;
        let dphi = self.stack.phi_stack_series(k, &ti.0[0], len + 1)?.derivative();
        Ok(xi0.mul(&dphi.recip().compose(&ti)))
    }

    /// Jet of `ξ_k` at `x`.
    pub fn xi_k_jet(&self, k: usize, x: &Scalar, order: usize) -> Result<Jet, DeformError> {
        let x = x.with_prec(self.prec());
        Ok(Jet::from_series(x.clone(), &self.xi_k_series(k, &x, order + 1)?))
    }

    /// Jet of the wave `ν_k = ξ₀·(1/(Dφ_k∘ψ⁻¹) - 1)` at `x`.
    pub fn wave_jet(&self, k: usize, x: &Scalar, order: usize) -> Result<Jet, DeformError> {
        let plan = self.stack.plan(k)?;
        let x = x.with_prec(self.prec());
        let len = order + 1;
        let xi0 = self.oracle.field_jet(&x, order)?.to_series();
        let ti = psi_inverse_series_of(self.oracle, &x, len)?;
        let dphi = plan.phi_series(&ti.0[0], len + 1).derivative();
        let factor = dphi.recip().add_constant(&Scalar::from_i64(-1, self.prec()));
        Ok(Jet::from_series(x, &xi0.mul(&factor.compose(&ti))))
    }

    /// Jet of `ψ` at `t`.
    pub fn psi_jet(&self, t: &Scalar, order: usize) -> Result<Jet, DeformError> {
        Ok(psi_jet_of(self.oracle, t, order)?)
    }

    /// Jet of `ψ⁻¹` at `x`.
    pub fn psi_inverse_jet(&self, x: &Scalar, order: usize) -> Result<Jet, DeformError> {
        let x = x.with_prec(self.prec());
        Ok(Jet::from_series(x.clone(), &psi_inverse_series_of(self.oracle, &x, order + 1)?))
    }
}
