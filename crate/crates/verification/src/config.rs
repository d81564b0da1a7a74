//! What the checks run on and how densely they sample.

use base_field::BaseFieldOracle;
use cantor_schedule::CantorAddress;
use deformation_engine::{BuiltStack, Deformed};
use scalar_jet::{Prec, Scalar};

use crate::ode::TaylorConfig;

/// Tolerances as `-log₂` of the bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub l_jump: i64,
    pub tangency: i64,
    pub blowup: i64,
    pub locality: i64,
    pub scaling: i64,
    pub oracle: i64,
    pub wave: i64,
    pub composition: i64,
    pub inverse: i64,
    pub l_chain: i64,
    /// Expected exponent of the oscillation fit and its allowed deviation.
    pub oscillation: (f64, f64),
}

impl Tolerances {
    /// Fractions of the working precision; at 4096 bits these are 1024, 1024, 512,
    /// 2048, 512, 512, 512, 4000, 2048, 2048.
    pub fn for_precision(bits: u32) -> Self {
        let p = bits as i64;
        Tolerances {
            l_jump: p / 4,
            tangency: p / 4,
            blowup: p / 8,
            locality: p / 2,
            scaling: p / 8,
            oracle: p / 8,
            wave: p / 8,
            composition: p - 96,
            inverse: p / 2,
            l_chain: p / 2,
            oscillation: (2.0, 0.1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Points per interval or tile.
    pub samples: usize,
    /// Positions of `ψ(M_k)` per time in the flow sweeps.
    pub sweep: usize,
    /// Point of the Cantor set used by the smooth-time check.
    pub address: CantorAddress,
    pub seed: u64,
    /// Random `(k, t, x)` triples for the ODE oracle.
    pub triples: usize,
    /// Exterior points per stage for the locality check.
    pub exterior: usize,
    pub taylor: TaylorConfig,
    /// `(k_cut, log₂ ε)` for the closeness check of general-mode stacks;
    /// `ε` defaults to `2^{-k₀-1}` for a stack starting at stage `k₀ + 1`.
    pub closeness: (usize, Option<i64>),
    /// Blocks `n` of the oscillation fit.
    pub oscillation_levels: Vec<u32>,
    pub tolerances: Tolerances,
}

impl VerifyConfig {
    pub fn new(precision_bits: u32) -> Self {
        VerifyConfig {
            samples: 9,
            sweep: 1024,
            address: "00".parse().expect("valid address"),
            seed: 0,
            triples: 32,
            exterior: 64,
            taylor: TaylorConfig::for_precision(precision_bits),
            closeness: (2, None),
            oscillation_levels: vec![4, 5, 6, 7],
            tolerances: Tolerances::for_precision(precision_bits),
        }
    }
}

/// A built stack, its base field and the sampling configuration.
pub struct Suite<'a, O: BaseFieldOracle + ?Sized> {
    pub oracle: &'a O,
    pub built: &'a BuiltStack,
    pub config: VerifyConfig,
}

impl<'a, O: BaseFieldOracle + ?Sized> Suite<'a, O> {
    pub fn new(oracle: &'a O, built: &'a BuiltStack, config: VerifyConfig) -> Self {
        Suite { oracle, built, config }
    }

    pub fn deformed(&self) -> Deformed<'a, O> {
        Deformed::new(self.oracle, &self.built.stack)
    }

    pub fn prec(&self) -> Prec {
        self.built.stack.prec()
    }

    pub fn depth(&self) -> usize {
        self.built.depth()
    }

    /// Stage label of the `idx`-th built stage.
    pub fn label(&self, idx: usize) -> usize {
        self.built.label(idx)
    }

    pub fn pow2(&self, e: i64) -> Scalar {
        Scalar::pow2(e, self.prec())
    }
}
