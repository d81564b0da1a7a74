//! Gauss–Legendre rules at arbitrary precision.

use scalar_jet::{Prec, Scalar};

/// Nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<Scalar>,
    pub weights: Vec<Scalar>,
}

fn legendre_f64(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// `(P_n(x), P_{n-1}(x))`.
fn legendre(n: usize, x: &Scalar) -> (Scalar, Scalar) {
    let p = x.prec();
    let (mut p0, mut p1) = (Scalar::one(p), x.clone());
    for k in 1..n {
        let p2 = (x * &p1).mul_i(2 * k as i64 + 1) - p0.mul_i(k as i64);
        p0 = p1;
        p1 = p2.div_i(k as i64 + 1);
    }
    (p1, p0)
}

impl GaussLegendre {
    /// `n`-point rule computed by Newton iteration on `P_n`.
    pub fn new(n: usize, p: Prec) -> Self {
        assert!(n >= 2, "need at least two nodes");
        let mut nodes = vec![Scalar::zero(p); n];
        let mut weights = vec![Scalar::zero(p); n];
        let one = Scalar::one(p);
        let tol = -(p.bits() as f64) + 8.0;
        for i in 0..n.div_ceil(2) {
            let mut g = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..8 {
                let (pn, pm) = legendre_f64(n, g);
                let d = n as f64 * (g * pn - pm) / (g * g - 1.0);
                g -= pn / d;
            }
            let mut x = Scalar::from_f64(g, p);
            if 2 * i + 1 == n {
                x = Scalar::zero(p);
            }
            let mut dp = Scalar::one(p);
            for _ in 0..64 {
                let (pn, pm) = legendre(n, &x);
                dp = (&x * &pn - pm).mul_i(n as i64) / (x.square() - &one);
                let step = &pn / &dp;
                x = &x - &step;
                if step.is_zero() || step.log2_abs() < tol {
                    let (pn, pm) = legendre(n, &x);
                    dp = (&x * &pn - pm).mul_i(n as i64) / (x.square() - &one);
                    break;
                }
            }
            let w = Scalar::from_i64(2, p) / ((&one - &x.square()) * dp.square());
            nodes[i] = -&x;
            weights[i] = w.clone();
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_lo^hi f`.
    pub fn integrate(&self, lo: &Scalar, hi: &Scalar, mut f: impl FnMut(&Scalar) -> Scalar) -> Scalar {
        let c = (lo + hi).mul_pow2(-1);
        let r = (hi - lo).mul_pow2(-1);
        let mut acc = Scalar::zero(lo.prec());
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * &f(&(&c + &(&r * x)));
        }
        acc * r
    }
}
