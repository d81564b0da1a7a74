//! Binary addresses of nested components.

use std::fmt;
use std::str::FromStr;

use scalar_jet::{Prec, Scalar};

use crate::intervals::IntervalSet;
use crate::ScheduleError;

/// Left (`0`) or right (`1`) child at each stage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CantorAddress {
    pub bits: Vec<bool>,
}

impl FromStr for CantorAddress {
    type Err = ScheduleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(ScheduleError::BadAddress(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CantorAddress { bits })
    }
}

impl fmt::Display for CantorAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Component of `I_len` reached by following `address` through `stages = [I_1, …, I_K]`.
pub fn cantor_point(address: &CantorAddress, stages: &[IntervalSet], p: Prec) -> Result<(Scalar, Scalar), ScheduleError> {
    if address.bits.len() > stages.len() {
        return Err(ScheduleError::AddressTooLong { len: address.bits.len(), depth: stages.len() });
    }
    let mut current = 0usize;
    let mut out = (Scalar::zero(p), Scalar::one(p));
    for (set, &bit) in stages.iter().zip(&address.bits) {
        let mut kids = set.children(current);
        kids.sort_by(|&a, &b| set.components[a].lo.total_cmp(&set.components[b].lo));
        if kids.len() != 2 {
            return Err(ScheduleError::Invalid(format!("stage {} has {} children under {current}", set.k, kids.len())));
        }
        current = kids[bit as usize];
        let c = &set.components[current];
        out = (c.lo.clone(), c.hi.clone());
    }
    Ok(out)
}
