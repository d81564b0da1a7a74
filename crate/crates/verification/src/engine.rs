//! Checks that do not need the flow: the jet engine against exact polynomial
//! arithmetic, the shape of the interval schedule, and the oscillation of the base field.

use base_field::{oscillation_statistic, BaseFieldOracle};
use deformation_engine::Mode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use scalar_jet::{jet_L, jet_compose, jet_invert, Jet, Prec, Scalar};

use crate::config::Suite;
use crate::report::CheckReport;
use crate::VerifyError;

/// Polynomial with exact rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::new(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| Rational::from(c * i as u32)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.0.is_empty() || o.0.is_empty() {
            return Poly(vec![]);
        }
        let mut out = vec![Rational::new(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        Poly(out)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly((0..n).map(|i| self.0.get(i).cloned().unwrap_or_default() + o.0.get(i).cloned().unwrap_or_default()).collect())
    }

    /// `self ∘ inner`, by Horner.
    pub fn compose(&self, inner: &Poly) -> Poly {
        self.0.iter().rev().fold(Poly(vec![]), |acc, c| acc.mul(inner).add(&Poly(vec![c.clone()])))
    }

    /// Exact derivatives `D⁰..D^order` at `x`.
    pub fn derivatives(&self, x: &Rational, order: usize) -> Vec<Rational> {
        let mut p = self.clone();
        let mut out = Vec::with_capacity(order + 1);
        for _ in 0..=order {
            out.push(p.eval(x));
            p = p.derivative();
        }
        out
    }

    pub fn jet(&self, x: &Rational, order: usize, p: Prec) -> Jet {
        let coeffs = self.derivatives(x, order).iter().map(|d| Scalar::from_rational(d, p)).collect();
        Jet::new(Scalar::from_rational(x, p), coeffs).expect("non-empty jet")
    }
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::from((rng.gen_range(-9i64..=9), rng.gen_range(1i64..=7)))
}

/// Degree-4 polynomial with `Dg(x) ≥ 1` on `|x| ≤ 1`.
pub fn random_quartic(rng: &mut ChaCha8Rng) -> Poly {
    let mut c: Vec<Rational> = (0..5).map(|_| small_rational(rng) / 16).collect();
    c[4] = Rational::from(rng.gen_range(1i64..=3)) / 16;
    // the slope dominates the higher terms
    c[1] = Rational::from(rng.gen_range(3i64..=6));
    Poly(c)
}

/// Jet order used for the engine checks.
pub const ENGINE_ORDER: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct EngineErrors {
    pub faa_di_bruno: Scalar,
    pub inverse: Scalar,
    pub chain_rule: Scalar,
}

pub fn engine_errors(count: usize, seed: u64, p: Prec) -> Result<EngineErrors, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = EngineErrors { faa_di_bruno: Scalar::zero(p), inverse: Scalar::zero(p), chain_rule: Scalar::zero(p) };
    for _ in 0..count {
        let (g, h) = (random_quartic(&mut rng), random_quartic(&mut rng));
        let x = Rational::from((rng.gen_range(-8i64..=8), 16));
        let hj = h.jet(&x, ENGINE_ORDER, p);
        let gj = g.jet(&h.eval(&x), ENGINE_ORDER, p);
        let got = jet_compose(&gj, &hj)?;
        let want = g.compose(&h).derivatives(&x, ENGINE_ORDER);
        for (m, w) in want.iter().enumerate() {
            let w = Scalar::from_rational(w, p);
            e.faa_di_bruno = e.faa_di_bruno.max(&Scalar::rel_diff(got.d(m), &w));
        }
        let inv = jet_invert(&hj)?;
        let round = jet_compose(&inv, &hj)?;
        let id = Jet::identity(hj.base().clone(), ENGINE_ORDER);
        for m in 0..=ENGINE_ORDER {
            e.inverse = e.inverse.max(&(round.d(m) - id.d(m)).abs());
        }
        let lhs = jet_L(&got)?;
        let rhs = jet_L(&gj)? * hj.d(1) + jet_L(&hj)?;
        e.chain_rule = e.chain_rule.max(&Scalar::rel_diff(&lhs, &rhs));
    }
    Ok(e)
}

pub fn check_engine<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, bits: (i64, i64, i64)) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("jet-engine", "jet composition, inversion and the chain rule for L against exact polynomial arithmetic");
    let count = 16;
    let e = engine_errors(count, s.config.seed ^ 0x6a6574, s.prec())?;
    r.compare(&e.faa_di_bruno, &s.pow2(-bits.0));
    r.compare(&e.inverse, &s.pow2(-bits.1));
    r.compare(&e.chain_rule, &s.pow2(-bits.2));
    Ok(r.exact(format!(
        "{count} seeded pairs of quartics with rational coefficients, jets of order {ENGINE_ORDER}; composition relative per order, inversion absolute, L(g∘h) = Lg∘h·Dh + Lh relative"
    )))
}

pub fn check_cantor<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("cantor-structure", "I_k nested two per parent, avoiding r_k, with shrinking components");
    let sets = &s.built.intervals;
    for (idx, pair) in sets.windows(2).enumerate() {
        let (parent, child) = (&pair[0], &pair[1]);
        let excluded = &s.built.rationals[..=idx];
        r.require(child.len() == 2 * parent.len(), format!("I_{} has {} components", child.k, child.len()));
        for pi in 0..parent.len() {
            r.require(child.children(pi).len() == 2, format!("parent {pi} of I_{} has two children", child.k));
        }
        if let Err(e) = child.validate(parent, excluded) {
            r.require(false, format!("I_{}: {e}", child.k));
        }
        r.require(child.max_width() < parent.max_width(), format!("max width of I_{} below that of I_{}", child.k, parent.k));
    }
    let last = sets.last().expect("unit interval");
    r.measured.push(format!("{} components in I_{}", last.len(), last.k));
    Ok(r.exact(format!("{} interval sets, exact rational endpoint comparisons", sets.len())))
}

/// `(n, statistic)` at the centre of the `u_n` plateau, `x = (23/12)·2^{-n-1}`.
pub fn oscillation_points<O: BaseFieldOracle + ?Sized>(oracle: &O, ns: &[u32]) -> Result<Vec<(u32, f64)>, VerifyError> {
    ns.iter()
        .map(|&n| {
            let x = Scalar::ratio(23, 12, oracle.prec()).mul_pow2(-(n as i32) - 1);
            Ok((n, oscillation_statistic(oracle, &x)?.to_f64()))
        })
        .collect()
}

/// Least-squares slope of `log y` against `log n`.
pub fn log_log_slope(points: &[(u32, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

pub fn check_oscillation<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, ns: &[u32], slope: f64, tol: f64) -> Result<CheckReport, VerifyError> {
    let mut r = CheckReport::new("oscillation", "log u_n / log v_n grows like n² on the Sergeraert field");
    if s.built.stack.mode != Mode::Sergeraert {
        return Err(VerifyError::Precondition("the oscillation fit is defined for the Sergeraert field".into()));
    }
    let pts = oscillation_points(s.oracle, ns)?;
    let fit = log_log_slope(&pts);
    r.require((fit - slope).abs() <= tol, format!("fitted exponent {fit:.6} within {tol} of {slope}"));
    r.measured.push(format!("{fit:.9}"));
    r.bounds.push(format!("{slope} ± {tol}"));
    let listed: Vec<String> = pts.iter().map(|(n, v)| format!("n = {n}: {v:.6}")).collect();
    Ok(r.exact(format!("statistic at the u_n plateau centres, {}", listed.join(", "))))
}
