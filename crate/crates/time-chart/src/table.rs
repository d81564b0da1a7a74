//! The travel-time table of the Sergeraert field and the time chart `ψ`.

use base_field::{Piece, SergeraertField};
use scalar_jet::{Jet, Prec, Scalar, Series};

use crate::gauss::GaussLegendre;
use crate::transition::TransitionTable;
use crate::ChartError;

/// Sub-block breakpoints of block `n`, in flow order.
///
/// Index `i` of `times`/`points` is the start of piece `i` of
/// `[UHigh, A, V, B, ULow]`; index 5 is the end of the block.
#[derive(Clone, Debug)]
pub struct BlockTimes {
    pub n: u32,
    pub times: [Scalar; 6],
    pub points: [Scalar; 6],
    /// Duration of each piece; exact on plateaus.
    pub durations: [Scalar; 5],
    /// Length of one sixth of the block, `2^{-n-1}/6`.
    pub h: Scalar,
    pub a: TransitionTable,
    pub b: TransitionTable,
}

impl BlockTimes {
    /// `C_n = ψ⁻¹(2^{-n})`.
    pub fn start(&self) -> &Scalar {
        &self.times[0]
    }

    /// `τ_n = C_{n+1} - C_n`.
    pub fn duration(&self) -> Scalar {
        &self.times[5] - &self.times[0]
    }
}

const PIECES: [Piece; 5] = [Piece::UHigh, Piece::A, Piece::V, Piece::B, Piece::ULow];

/// Precomputed block durations and quadrature tables.
#[derive(Clone, Debug)]
pub struct TravelTable {
    field: SergeraertField,
    prec: Prec,
    wp: Prec,
    target_bits: u32,
    n_max: u32,
    rule: GaussLegendre,
    blocks: Vec<BlockTimes>,
}

/// Quadrature precision for a full precision of `bits`.
pub fn working_bits(bits: u32) -> u32 {
    bits / 4 + 96
}

/// Relative quadrature target, as a power of two.
pub fn target_bits(bits: u32) -> u32 {
    bits / 4 + 32
}

/// Gauss–Legendre order reaching `2^{-target}` on panels graded with ratio 2.
fn rule_size(target: u32) -> usize {
    // Bernstein ellipse parameter ≥ 2 + √3 on every panel
    let rho = (2.0f64 + 3.0f64.sqrt()).log2();
    ((target as f64 + 40.0) / (2.0 * rho)).ceil() as usize
}

impl TravelTable {
    pub fn build(field: SergeraertField, prec: Prec, n_max: u32) -> Result<Self, ChartError> {
        let wp = Prec::new(working_bits(prec.bits())).map_err(|e| ChartError::Precondition(e.to_string()))?;
        let tb = target_bits(prec.bits());
        let rule = GaussLegendre::new(rule_size(tb), wp);
        let mut blocks = Vec::with_capacity(n_max as usize + 1);
        let mut t = Scalar::zero(prec);
        for n in 0..=n_max {
            let len = Scalar::pow2(-(n as i64) - 1, prec);
            let h = len.div_i(6);
            let top = Scalar::pow2(-(n as i64), prec);
            // y = 1, 5/6, 2/3, 1/3, 1/6, 0
            let points = [
                top.clone(),
                &len + &h.mul_i(5),
                &len + &h.mul_i(4),
                &len + &h.mul_i(2),
                &len + &h,
                len.clone(),
            ];
            let (aa, ab) = field.transition_coeffs(n, Piece::A, prec).expect("A coefficients");
            let (ba, bb) = field.transition_coeffs(n, Piece::B, prec).expect("B coefficients");
            let ta = TransitionTable::build(&aa, &ab, wp, tb, &rule)?;
            let tbl = TransitionTable::build(&ba, &bb, wp, tb, &rule)?;
            let durations = [
                &h / &field.u(n, prec),
                &h * &ta.total().with_prec(prec),
                &h.mul_i(2) / &field.v(n, prec),
                &h * &tbl.total().with_prec(prec),
                &h / &field.u(n + 1, prec),
            ];
            let mut times: [Scalar; 6] = std::array::from_fn(|_| Scalar::zero(prec));
            times[0] = t.clone();
            for k in 0..5 {
                times[k + 1] = &times[k] + &durations[k];
            }
            t = times[5].clone();
            blocks.push(BlockTimes { n, times, points, durations, h, a: ta, b: tbl });
        }
        Ok(TravelTable { field, prec, wp, target_bits: tb, n_max, rule, blocks })
    }

    pub fn field(&self) -> &SergeraertField {
        &self.field
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    pub fn working_prec(&self) -> Prec {
        self.wp
    }

    pub fn target_bits(&self) -> u32 {
        self.target_bits
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn blocks(&self) -> &[BlockTimes] {
        &self.blocks
    }

    pub fn block(&self, n: u32) -> Result<&BlockTimes, ChartError> {
        self.blocks.get(n as usize).ok_or(ChartError::TableExhausted)
    }

    /// `C_n`; `C_{n_max+1}` is the end of the table.
    pub fn cumulative(&self, n: u32) -> Result<Scalar, ChartError> {
        if n == self.n_max + 1 {
            return Ok(self.blocks.last().unwrap().times[5].clone());
        }
        Ok(self.block(n)?.start().clone())
    }

    /// Smallest tabulated position `2^{-n_max-1}`.
    pub fn horizon(&self) -> Scalar {
        Scalar::pow2(-(self.n_max as i64) - 1, self.prec)
    }

    /// `ψ⁻¹(x)`.
    pub fn travel_time(&self, x: &Scalar) -> Result<Scalar, ChartError> {
        let x = x.with_prec(self.prec);
        let loc = self.field.locate(&x)?;
        if loc.piece == Piece::Unit {
            return Ok(Scalar::one(self.prec) - x);
        }
        let blk = self.block(loc.n)?;
        let p = self.prec;
        let tp = &blk.times;
        let pt = &blk.points;
        Ok(match loc.piece {
            Piece::UHigh => &tp[0] + &((&pt[0] - &x) / &self.field.u(loc.n, p)),
            Piece::V => &tp[2] + &((&pt[2] - &x) / &self.field.v(loc.n, p)),
            Piece::ULow => &tp[4] + &((&pt[4] - &x) / &self.field.u(loc.n + 1, p)),
            Piece::A => {
                // z = 0 at points[1], z = 1 at points[2]
                let zc = (&x - &pt[2]) / &blk.h;
                let z = (&pt[1] - &x) / &blk.h;
                let f = blk.a.f_of(&z, &zc, &self.rule).with_prec(p);
                &tp[2] - &(&blk.h * &f)
            }
            Piece::B => {
                // z = 1 at points[3], z = 0 at points[4]
                let zc = (&pt[3] - &x) / &blk.h;
                let z = (&x - &pt[4]) / &blk.h;
                let f = blk.b.f_of(&z, &zc, &self.rule).with_prec(p);
                &tp[3] + &(&blk.h * &f)
            }
            Piece::Unit => unreachable!(),
        })
    }

    /// `ψ(t)`.
    pub fn psi_point(&self, t: &Scalar) -> Result<Scalar, ChartError> {
        let p = self.prec;
        let t = t.with_prec(p);
        if !t.is_positive() {
            return Ok(Scalar::one(p) - t);
        }
        let end = &self.blocks.last().unwrap().times[5];
        if &t > end {
            return Err(ChartError::TableExhausted);
        }
        let bi = self.blocks.partition_point(|b| b.times[5] < t).min(self.blocks.len() - 1);
        let blk = &self.blocks[bi];
        let n = blk.n;
        let tp = &blk.times;
        let pt = &blk.points;
        let piece = (0..5).rev().find(|&i| tp[i] <= t).unwrap_or(0);
        Ok(match PIECES[piece] {
            Piece::UHigh => &pt[0] - &((&t - &tp[0]) * &self.field.u(n, p)),
            Piece::V => &pt[2] - &((&t - &tp[2]) * &self.field.v(n, p)),
            Piece::ULow => &pt[4] - &((&t - &tp[4]) * &self.field.u(n + 1, p)),
            Piece::A => {
                let phi = (&tp[2] - &t) / &blk.h;
                let (z, zc) = blk.a.z_of(&phi, &self.rule)?;
                if zc <= z {
                    &pt[2] + &(&blk.h * &zc.with_prec(p))
                } else {
                    &pt[1] - &(&blk.h * &z.with_prec(p))
                }
            }
            Piece::B => {
                let phi = (&t - &tp[3]) / &blk.h;
                let (z, zc) = blk.b.z_of(&phi, &self.rule)?;
                if zc <= z {
                    &pt[3] - &(&blk.h * &zc.with_prec(p))
                } else {
                    &pt[4] + &(&blk.h * &z.with_prec(p))
                }
            }
            Piece::Unit => unreachable!(),
        })
    }

    /// Jet of `ψ` at `t`, from `Dψ = ξ₀∘ψ`.
    pub fn psi_jet(&self, t: &Scalar, order: usize) -> Result<Jet, ChartError> {
        let x = self.psi_point(t)?;
        let s = flow_series(&self.field, &x, order)?;
        Ok(Jet::from_series(t.with_prec(self.prec), &s))
    }

    /// Jet of `ψ⁻¹` at `x`, from `Dψ⁻¹ = 1/ξ₀`.
    pub fn psi_inverse_jet(&self, x: &Scalar, order: usize) -> Result<Jet, ChartError> {
        let x = x.with_prec(self.prec);
        let tt = self.travel_time(&x)?;
        if order == 0 {
            return Ok(Jet::constant(x, tt, 0));
        }
        let xi = self.field.xi0_jet(&x, order - 1)?.to_series();
        let s = xi.recip().integrate(tt);
        Ok(Jet::from_series(x, &s))
    }
}

/// Taylor series in time of the flow line of ξ₀ through `x`, `order + 1` terms.
pub fn flow_series(field: &SergeraertField, x: &Scalar, order: usize) -> Result<Series, ChartError> {
    let xi = field.xi0_jet(x, order)?.to_series();
    let mut s = Series::constant(x.clone(), order + 1);
    // each pass fixes one more coefficient
    for k in 0..order {
        let v = xi.compose(&s).truncate(k + 1);
        let mut next = v.integrate(x.clone());
        next.0.resize(order + 1, Scalar::zero(x.prec()));
        s = next;
    }
    Ok(s)
}
