//! Pluggable base fields and the oscillation statistic.

use scalar_jet::{Jet, Prec, Scalar};

use crate::FieldError;

/// A contracting field on the half line together with its time chart `ψ(t) = f₀^t(1)`.
pub trait BaseFieldOracle {
    fn prec(&self) -> Prec;

    /// Jet of ξ at `x > 0`.
    fn field_jet(&self, x: &Scalar, order: usize) -> Result<Jet, FieldError>;

    /// `ψ⁻¹(x)`, the time needed to flow from 1 to `x`.
    fn travel_time(&self, x: &Scalar) -> Result<Scalar, FieldError>;

    /// `ψ(t)`.
    fn psi_point(&self, t: &Scalar) -> Result<Scalar, FieldError>;

    /// An upper bound for `‖ξ‖₁`.
    fn c1_bound(&self) -> Scalar;

    /// Smallest position the chart can resolve.
    fn horizon(&self) -> Scalar;

    /// Declared infinite tangency to zero at the origin.
    fn flat_at_origin(&self) -> bool {
        true
    }

    /// `f₀(x)`, the time-one map.
    fn time_one(&self, x: &Scalar) -> Result<Scalar, FieldError> {
        self.psi_point(&self.travel_time(x)?.add_i(1))
    }

    /// `x - f₀(x)`.
    fn displacement(&self, x: &Scalar) -> Result<Scalar, FieldError> {
        Ok(x - self.time_one(x)?)
    }
}

/// The linear field `ξ(x) = -x`, with `ψ(t) = e^{-t}`. Not flat at the origin.
#[derive(Clone, Debug)]
pub struct LinearField {
    pub prec: Prec,
    /// Smallest resolved position, as a power of two.
    pub horizon_log2: i64,
}

impl LinearField {
    pub fn new(prec: Prec) -> Self {
        LinearField { prec, horizon_log2: -256 }
    }
}

impl BaseFieldOracle for LinearField {
    fn prec(&self) -> Prec {
        self.prec
    }

    fn field_jet(&self, x: &Scalar, order: usize) -> Result<Jet, FieldError> {
        if !x.is_positive() {
            return Err(FieldError::Origin);
        }
        Ok(Jet::affine(x.clone(), -x, Scalar::from_i64(-1, x.prec()), order))
    }

    fn travel_time(&self, x: &Scalar) -> Result<Scalar, FieldError> {
        if !x.is_positive() {
            return Err(FieldError::Origin);
        }
        Ok(-x.ln())
    }

    fn psi_point(&self, t: &Scalar) -> Result<Scalar, FieldError> {
        Ok((-t).exp())
    }

    fn c1_bound(&self) -> Scalar {
        Scalar::from_i64(2, self.prec)
    }

    fn horizon(&self) -> Scalar {
        Scalar::pow2(self.horizon_log2, self.prec)
    }

    fn flat_at_origin(&self) -> bool {
        false
    }

    fn displacement(&self, x: &Scalar) -> Result<Scalar, FieldError> {
        let one = Scalar::one(x.prec());
        Ok(x * &(&one - &(-&one).exp()))
    }
}

/// Geometric grid from `x` down to `lo`, `per_octave` points per factor two.
pub fn geometric_grid(x: &Scalar, lo: &Scalar, per_octave: u32) -> Vec<Scalar> {
    let p = x.prec();
    let ratio = (-Scalar::from_i64(2, p).ln().div_i(per_octave as i64)).exp();
    let mut out = vec![x.clone()];
    loop {
        let next = out.last().unwrap() * &ratio;
        if &next < lo {
            break;
        }
        out.push(next);
    }
    out
}

/// `sup_y |log(x - f₀x)| / |log(y - f₀y)|` over the given grid.
pub fn oscillation_statistic_on<O: BaseFieldOracle + ?Sized>(
    oracle: &O,
    x: &Scalar,
    ys: &[Scalar],
) -> Result<Scalar, FieldError> {
    let dx = oracle.displacement(x)?;
    if !dx.is_positive() {
        return Err(FieldError::NotContracting(x.to_f64()));
    }
    let num = dx.ln().abs();
    let mut best = Scalar::zero(x.prec());
    for y in ys {
        let dy = oracle.displacement(y)?;
        if !dy.is_positive() {
            return Err(FieldError::NotContracting(y.to_f64()));
        }
        best = best.max(&(&num / &dy.ln().abs()));
    }
    Ok(best)
}

/// Oscillation statistic at `x` on a grid of 16 points per octave down to the oracle horizon.
pub fn oscillation_statistic<O: BaseFieldOracle + ?Sized>(oracle: &O, x: &Scalar) -> Result<Scalar, FieldError> {
    let ys = geometric_grid(x, &oracle.horizon(), 16);
    oscillation_statistic_on(oracle, x, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_field_statistic_is_one() {
        let f = LinearField { prec: Prec::new(256).unwrap(), horizon_log2: -40 };
        let x = Scalar::ratio(1, 2, f.prec);
        let s = oscillation_statistic(&f, &x).unwrap();
        assert!((s.to_f64() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_point_grid() {
        let f = LinearField::new(Prec::new(256).unwrap());
        let x = Scalar::ratio(1, 3, f.prec);
        let s = oscillation_statistic_on(&f, &x, std::slice::from_ref(&x)).unwrap();
        assert!(s == Scalar::one(f.prec));
    }

    #[test]
    fn time_one_default_matches_closed_form() {
        let f = LinearField::new(Prec::new(256).unwrap());
        let x = Scalar::ratio(1, 5, f.prec);
        let via_chart = &x - &f.time_one(&x).unwrap();
        let direct = f.displacement(&x).unwrap();
        assert!(Scalar::rel_diff(&via_chart, &direct).log2_abs() < -240.0);
    }
}
