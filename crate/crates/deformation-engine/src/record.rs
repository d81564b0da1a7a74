//! `stack.json`: the serialized stack and interval schedule.

use base_field::gamma_norms;
use cantor_schedule::{format_rational, parse_rational, GridTime, IntervalSet, IntervalSetRecord};
use rug::Rational;
use scalar_jet::{Prec, Scalar};
use serde::{Deserialize, Serialize};

use crate::build::BuiltStack;
use crate::stack::{ConjugationStack, Mode, StageNorms};
use crate::wave::{WavePlan, WavePlanRecord};
use crate::DeformError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormsRecord {
    pub gamma_hex: String,
    pub dphi_hex: String,
    pub xi0_c1_hex: String,
    pub lhs_hex: String,
    pub rhs_hex: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    #[serde(flatten)]
    pub plan: WavePlanRecord,
    pub r_k: String,
    pub grid_times: Vec<String>,
    pub measured_norms: NormsRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackRecord {
    pub mode: Mode,
    pub precision_bits: u32,
    pub start: usize,
    pub stages: Vec<StageRecord>,
    pub intervals: Vec<IntervalSetRecord>,
}

impl BuiltStack {
    pub fn to_record(&self) -> StackRecord {
        let mut excluded: Vec<Rational> = vec![];
        let mut intervals = vec![self.intervals[0].to_record(&[])];
        for (set, r) in self.intervals[1..].iter().zip(&self.rationals) {
            excluded.push(r.clone());
            intervals.push(set.to_record(&excluded));
        }
        let stages = self
            .stack
            .plans
            .iter()
            .zip(&self.stack.norms)
            .zip(self.rationals.iter().zip(&self.grid_times))
            .map(|((plan, n), (r, tk))| StageRecord {
                plan: plan.to_record(),
                r_k: format_rational(r),
                grid_times: tk.iter().map(|g| format_rational(&g.time)).collect(),
                measured_norms: NormsRecord {
                    gamma_hex: n.gamma.to_hex(),
                    dphi_hex: n.dphi.to_hex(),
                    xi0_c1_hex: n.xi0_c1.to_hex(),
                    lhs_hex: n.lhs.to_hex(),
                    rhs_hex: n.rhs.to_hex(),
                },
            })
            .collect();
        StackRecord { mode: self.stack.mode, precision_bits: self.stack.prec().bits(), start: self.start, stages, intervals }
    }

    /// Rebuilds a stack, checking the stage invariants that can be read off the record.
    pub fn from_record(r: &StackRecord) -> Result<Self, DeformError> {
        let p = Prec::new(r.precision_bits).map_err(|e| DeformError::Invalid(e.to_string()))?;
        let bad = |m: String| DeformError::Invariant(m);
        let hex = |s: &str| Scalar::from_hex(s, p).map_err(|e| DeformError::Invalid(e.to_string()));
        if r.intervals.len() != r.stages.len() + 1 {
            return Err(DeformError::Invalid("one interval set per stage plus [0, 1] expected".into()));
        }
        let gamma1 = gamma_norms(1, p).swap_remove(1);
        let mut plans = Vec::new();
        let mut norms = Vec::new();
        let mut rationals = Vec::new();
        let mut grid_times = Vec::new();
        for (idx, s) in r.stages.iter().enumerate() {
            let plan = WavePlan::from_record(&s.plan, p)?;
            if plan.k != r.start + idx {
                return Err(bad(format!("stage labels: expected {}, found {}", r.start + idx, plan.k)));
            }
            if plan.q % 2 == 0 {
                return Err(bad(format!("q_k odd: stage {} has q = {}", plan.k, plan.q)));
            }
            if let Some(prev) = plans.last().map(|x: &WavePlan| (x.q, x.n, x.j.clone())) {
                if plan.q <= prev.0 {
                    return Err(bad(format!("q_k increasing: stage {} has q = {} after {}", plan.k, plan.q, prev.0)));
                }
                if plan.n <= prev.1 {
                    return Err(bad(format!("n_k increasing: stage {} has n = {} after {}", plan.k, plan.n, prev.1)));
                }
                if plan.j <= prev.2 {
                    return Err(bad(format!("orbit indices increasing at stage {}", plan.k)));
                }
            }
            if plan.gamma_k_norm(1, &gamma1) >= Scalar::one(p) {
                return Err(bad(format!("‖γ_{}‖_1 < 1 fails", plan.k)));
            }
            let m = &s.measured_norms;
            let n = StageNorms { gamma: hex(&m.gamma_hex)?, dphi: hex(&m.dphi_hex)?, xi0_c1: hex(&m.xi0_c1_hex)?, lhs: hex(&m.lhs_hex)?, rhs: hex(&m.rhs_hex)? };
            if n.lhs > n.rhs {
                return Err(bad(format!("level inequality fails at stage {}", plan.k)));
            }
            let rat = |x: &str| parse_rational(x).ok_or_else(|| DeformError::Invalid(format!("bad rational {x}")));
            rationals.push(rat(&s.r_k)?);
            grid_times.push(
                s.grid_times
                    .iter()
                    .enumerate()
                    .map(|(i, g)| Ok(GridTime { component: i / 2, time: rat(g)? }))
                    .collect::<Result<Vec<_>, DeformError>>()?,
            );
            plans.push(plan);
            norms.push(n);
        }
        let mut intervals = Vec::new();
        for rec in &r.intervals {
            intervals.push(IntervalSet::from_record(rec, p)?.0);
        }
        for (idx, w) in intervals.windows(2).enumerate() {
            w[1].validate(&w[0], &rationals[..=idx])?;
        }
        Ok(BuiltStack { stack: ConjugationStack::from_parts(r.mode, p, plans, norms), start: r.start, rationals, grid_times, intervals })
    }
}
