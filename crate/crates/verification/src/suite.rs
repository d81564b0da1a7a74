//! The check registry and its runner.

use base_field::BaseFieldOracle;
use deformation_engine::Mode;
use rayon::prelude::*;

use crate::config::Suite;
use crate::report::{CheckReport, Report, Status};
use crate::{engine, estimates, flows, identities, oracle, wave, VerifyError};

const COMMON: &[&str] = &[
    "blowup",
    "cantor-structure",
    "estimate-i",
    "estimate-ii",
    "estimate-iii",
    "estimate-iii-grid",
    "group-law",
    "jet-engine",
    "locality",
    "ode-oracle",
    "phi-positivity",
    "scaling",
    "smooth-times",
    "stack-half-integers",
    "stack-l-jump",
    "stack-tangency",
    "wave-propagation",
];

/// Ids of the checks that apply to a stack built in `mode`, sorted.
pub fn check_ids(mode: Mode) -> Vec<&'static str> {
    let mut ids = COMMON.to_vec();
    ids.push(match mode {
        Mode::Sergeraert => "oscillation",
        Mode::General => "closeness",
    });
    ids.sort_unstable();
    ids
}

fn dispatch<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, id: &str) -> Result<CheckReport, VerifyError> {
    let t = &s.config.tolerances;
    match id {
        "blowup" => flows::check_blowup(s, t.blowup),
        "cantor-structure" => engine::check_cantor(s),
        "closeness" => flows::check_closeness(s),
        "estimate-i" => estimates::check_estimate_i(s),
        "estimate-ii" => estimates::check_estimate_ii(s),
        "estimate-iii" => estimates::check_estimate_iii(s),
        "estimate-iii-grid" => estimates::check_estimate_iii_grid(s),
        "group-law" => flows::check_group_law(s),
        "jet-engine" => engine::check_engine(s, (t.composition, t.inverse, t.l_chain)),
        "locality" => flows::check_locality(s, t.locality),
        "ode-oracle" => oracle::check_oracle(s, t.oracle),
        "oscillation" => engine::check_oscillation(s, &s.config.oscillation_levels, t.oscillation.0, t.oscillation.1),
        "phi-positivity" => identities::check_positivity(s),
        "scaling" => flows::check_scaling(s, t.scaling),
        "smooth-times" => estimates::check_smooth_times(s),
        "stack-half-integers" => identities::check_half_integers(s),
        "stack-l-jump" => identities::check_lphi_jump(s, t.l_jump),
        "stack-tangency" => identities::check_tangency(s, t.tangency),
        "wave-propagation" => wave::check_wave(s, t.wave),
        other => Err(VerifyError::UnknownCheck(other.to_string())),
    }
}

/// Runs one check; a failure to evaluate is reported as a failed check.
pub fn run_one<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, id: &str) -> Result<CheckReport, VerifyError> {
    if !check_ids(s.built.stack.mode).contains(&id) {
        return Err(VerifyError::UnknownCheck(id.to_string()));
    }
    Ok(dispatch(s, id).unwrap_or_else(|e| {
        let mut r = CheckReport::new(id, "evaluation error");
        r.status = Status::Fail;
        r.note(e.to_string());
        r
    }))
}

pub fn run_all<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, stack_hash: String) -> Report {
    let checks: Vec<CheckReport> = check_ids(s.built.stack.mode)
        .par_iter()
        .map(|id| run_one(s, id).expect("registered id"))
        .collect();
    Report::new(stack_hash, checks)
}
