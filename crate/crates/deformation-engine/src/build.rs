//! Stage-by-stage construction of the stack together with the interval sets `I_k`.

use base_field::{gamma_norms, BaseFieldOracle};
use cantor_schedule::{refine_ik, select_tk, GridTime, IntervalSet, RationalEnumeration, ScheduleError};
use rug::Rational;
use scalar_jet::Scalar;

use crate::choose::{choose_nk, choose_qk, nk_sides, psi_inverse_ok, psi_tail_norm, Level};
use crate::measure::{dphi_deviation, dphi_norm, flow_step_norm};
use crate::samples::{m_positions, structured_times};
use crate::stack::{ConjugationStack, Deformed, Mode, StageNorms};
use crate::wave::WavePlan;
use crate::DeformError;

/// Safety factor on the measured `‖DΦ_{k-1}‖_k`.
pub const DPHI_SAFETY: i64 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildConfig {
    pub stages: usize,
    /// Label of the first stage; earlier stages are taken as already satisfied.
    pub start: usize,
    pub mode: Mode,
    /// Sample times per candidate interval of `I_k`.
    pub samples: usize,
    /// Positions sampled across `ψ(M_k)` for flow distances.
    pub m_samples: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { stages: 3, start: 1, mode: Mode::Sergeraert, samples: 9, m_samples: 17 }
    }
}

/// A built stack and its interval schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct BuiltStack {
    pub stack: ConjugationStack,
    pub start: usize,
    /// `r_k` for every built stage.
    pub rationals: Vec<Rational>,
    pub grid_times: Vec<Vec<GridTime>>,
    /// `I_{start-1} = [0, 1]` followed by one set per stage.
    pub intervals: Vec<IntervalSet>,
}

impl BuiltStack {
    /// Stage label of the `idx`-th built stage, counted from 1.
    pub fn label(&self, idx: usize) -> usize {
        self.start + idx - 1
    }

    pub fn depth(&self) -> usize {
        self.stack.depth()
    }
}

fn sched(e: DeformError) -> ScheduleError {
    ScheduleError::Bound(e.to_string())
}

/// Runs stages `start..start+stages` over the given candidate levels.
pub fn build_stack<O: BaseFieldOracle + ?Sized>(oracle: &O, levels: &[Level], config: &BuildConfig) -> Result<BuiltStack, DeformError> {
    if config.stages == 0 || config.start == 0 {
        return Err(DeformError::Invalid("need at least one stage, labelled from 1".into()));
    }
    let p = oracle.prec();
    let last = config.start + config.stages - 1;
    let gamma = gamma_norms(last + 1, p);
    let c1 = oracle.c1_bound();
    let mut stack = ConjugationStack::new(config.mode, p);
    let mut intervals = vec![IntervalSet::unit(config.start - 1, p)];
    let mut rationals = Vec::new();
    let mut grid_times = Vec::new();
    let mut enumeration = RationalEnumeration::new().skip(config.start - 1);
    let mut prev_q = 1u64;
    let mut prev_n = None;
    for idx in 1..=config.stages {
        let k = config.start + idx - 1;
        let r = enumeration.next().expect("enumeration is infinite");
        let parent = intervals.last().unwrap().clone();
        let q = choose_qk(prev_q, &parent, &r);
        let times = structured_times(&stack, idx - 1)?;
        let dphi = if idx == 1 {
            Scalar::one(p)
        } else {
            let dev = dphi_deviation(&stack, idx - 1, &times)?;
            let allowed = Scalar::ratio(1, 2, p) - Scalar::pow2(-(k as i64), p);
            if dev > allowed {
                return Err(DeformError::Estimate(format!("|DΦ_{} - 1| + |D²Φ_{}| = {} exceeds 1/2 - 2^-{k}", k - 1, k - 1, dev.to_f64())));
            }
            dphi_norm(&stack, idx - 1, k + 1, &times)?
        }
        .mul_i(DPHI_SAFETY);
        let g = &gamma[k + 1];
        let mut sides = None;
        let chosen = choose_nk(levels, prev_n, k, |level| {
            let (lhs, rhs) = nk_sides(config.mode, k, q, level, g, &dphi, &c1)?;
            let mut ok = lhs <= rhs;
            if ok && config.mode == Mode::General {
                ok = psi_tail_norm(oracle, level, k)? < Scalar::one(p) && psi_inverse_ok(oracle, level, k)?;
            }
            if ok {
                sides = Some((lhs, rhs));
            }
            Ok(ok)
        })?;
        let level = &levels[chosen];
        let (lhs, rhs) = sides.expect("admissible level has its sides");
        let plan = WavePlan { k, q, n: level.n, i: level.i.clone(), j: level.j.clone(), w: level.w.clone(), u: level.u.clone(), v: level.v.clone() };
        if plan.gamma_k_norm(1, &gamma[1]) >= Scalar::one(p) {
            return Err(DeformError::Estimate(format!("‖γ_{k}‖_1 ≥ 1")));
        }
        stack.push(plan, StageNorms { gamma: g.clone(), dphi, xi0_c1: c1.clone(), lhs, rhs });
        let tk = select_tk(&parent, q)?;
        let d = Deformed::new(oracle, &stack);
        let xs = m_positions(oracle, &stack, idx, config.m_samples)?;
        let next = refine_ik(&tk, &parent, &r, k, q, config.samples, p, |t| flow_step_norm(&d, idx, t, &xs).map_err(sched))?;
        intervals.push(next);
        rationals.push(r);
        grid_times.push(tk);
        prev_q = q;
        prev_n = Some(level.n);
    }
    Ok(BuiltStack { stack, start: config.start, rationals, grid_times, intervals })
}

