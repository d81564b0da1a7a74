//! The Sergeraert field with its tabulated chart, as a base-field oracle.

use base_field::{xi0_c1_norm, BaseFieldOracle, FieldError, Piece};
use scalar_jet::{Jet, Prec, Scalar, Series};

use crate::table::{flow_series, TravelTable};

/// Flow-series order used for short-time displacements.
const DISPLACEMENT_ORDER: usize = 12;

#[derive(Clone, Debug)]
pub struct SergeraertChart {
    table: TravelTable,
    c1: Scalar,
}

impl SergeraertChart {
    pub fn new(table: TravelTable) -> Result<Self, FieldError> {
        let c1 = xi0_c1_norm(table.field(), table.n_max(), table.prec())?;
        Ok(SergeraertChart { table, c1 })
    }

    pub fn table(&self) -> &TravelTable {
        &self.table
    }
}

fn chart_err(e: crate::ChartError) -> FieldError {
    match e {
        crate::ChartError::Field(f) => f,
        other => FieldError::Chart(other.to_string()),
    }
}

impl BaseFieldOracle for SergeraertChart {
    fn prec(&self) -> Prec {
        self.table.prec()
    }

    fn field_jet(&self, x: &Scalar, order: usize) -> Result<Jet, FieldError> {
        let x = x.with_prec(self.prec());
        Ok(Jet::from_series(x.clone(), &self.table.field().xi0_series(&x, order + 1)?))
    }

    fn travel_time(&self, x: &Scalar) -> Result<Scalar, FieldError> {
        self.table.travel_time(x).map_err(chart_err)
    }

    fn psi_point(&self, t: &Scalar) -> Result<Scalar, FieldError> {
        self.table.psi_point(t).map_err(chart_err)
    }

    fn c1_bound(&self) -> Scalar {
        self.c1.clone()
    }

    fn horizon(&self) -> Scalar {
        self.table.horizon()
    }

    /// On transitions the time-one displacement can be far below the quadrature
    /// resolution of positions; there the flow series at `x` is summed when it converges.
    fn displacement(&self, x: &Scalar) -> Result<Scalar, FieldError> {
        let x = x.with_prec(self.prec());
        let loc = self.table.field().locate(&x)?;
        if matches!(loc.piece, Piece::A | Piece::B) {
            let s = flow_series(self.table.field(), &x, DISPLACEMENT_ORDER).map_err(chart_err)?;
            let first = s.coeff(1).abs();
            let tail = s.coeff(DISPLACEMENT_ORDER).abs();
            let limit = -(self.table.target_bits() as f64);
            if tail.is_zero() || (&tail / &first).log2_abs() < limit {
                let moved = s.0[1..].iter().fold(Scalar::zero(x.prec()), |a, c| a + c);
                return Ok(-moved);
            }
        }
        Ok(&x - &self.time_one(&x)?)
    }
}

/// Taylor series in time of the flow line through `x` of any base field, `order + 1` terms.
pub fn flow_series_of<O: BaseFieldOracle + ?Sized>(oracle: &O, x: &Scalar, order: usize) -> Result<Series, FieldError> {
    let xi = oracle.field_jet(x, order)?.to_series();
    let mut s = Series::constant(x.clone(), order + 1);
    for k in 0..order {
        let v = xi.compose(&s).truncate(k + 1);
        let mut next = v.integrate(x.clone());
        next.0.resize(order + 1, Scalar::zero(x.prec()));
        s = next;
    }
    Ok(s)
}

/// Jet of `ψ` at `t` for any base field.
pub fn psi_jet_of<O: BaseFieldOracle + ?Sized>(oracle: &O, t: &Scalar, order: usize) -> Result<Jet, FieldError> {
    let t = t.with_prec(oracle.prec());
    let x = oracle.psi_point(&t)?;
    Ok(Jet::from_series(t, &flow_series_of(oracle, &x, order)?))
}

/// Taylor series of `ψ⁻¹` at `x`, `len` terms.
pub fn psi_inverse_series_of<O: BaseFieldOracle + ?Sized>(oracle: &O, x: &Scalar, len: usize) -> Result<Series, FieldError> {
    let x = x.with_prec(oracle.prec());
    let tt = oracle.travel_time(&x)?;
    if len <= 1 {
        return Ok(Series::constant(tt, 1));
    }
    let xi = oracle.field_jet(&x, len - 2)?.to_series();
    Ok(xi.recip().integrate(tt))
}

/// Jet of `ψ⁻¹` at `x` for any base field.
pub fn psi_inverse_jet_of<O: BaseFieldOracle + ?Sized>(oracle: &O, x: &Scalar, order: usize) -> Result<Jet, FieldError> {
    let x = x.with_prec(oracle.prec());
    Ok(Jet::from_series(x.clone(), &psi_inverse_series_of(oracle, &x, order + 1)?))
}
