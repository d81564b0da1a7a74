//! Check reports and the summary written to `report.json`.

use scalar_jet::Scalar;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    /// Every sampled point satisfies the bound; the bound itself is a supremum.
    SampledPass,
    Fail,
}

/// Digits kept for each reported scalar.
pub const REPORT_BITS: u32 = 96;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    /// The statement being checked.
    pub anchor: String,
    pub status: Status,
    pub measured: Vec<String>,
    pub bounds: Vec<String>,
    pub samples: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>) -> Self {
        CheckReport {
            id: id.into(),
            anchor: anchor.into(),
            status: Status::Pass,
            measured: vec![],
            bounds: vec![],
            samples: String::new(),
            notes: vec![],
        }
    }

    /// Records `measured ≤ bound`; a violation turns the report into a failure.
    pub fn compare(&mut self, measured: &Scalar, bound: &Scalar) -> bool {
        let ok = measured <= bound;
        self.measured.push(measured.to_hex_rounded(REPORT_BITS));
        self.bounds.push(bound.to_hex_rounded(REPORT_BITS));
        if !ok {
            self.status = Status::Fail;
        }
        ok
    }

    /// Records a condition without a numeric bound.
    pub fn require(&mut self, ok: bool, what: impl Into<String>) -> bool {
        if !ok {
            self.status = Status::Fail;
            self.notes.push(format!("violated: {}", what.into()));
        }
        ok
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn sampled(mut self, desc: impl Into<String>) -> Self {
        if self.status == Status::Pass {
            self.status = Status::SampledPass;
        }
        self.samples = desc.into();
        self
    }

    pub fn exact(mut self, desc: impl Into<String>) -> Self {
        self.samples = desc.into();
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub sampled_pass: usize,
    pub fail: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub stack_hash: String,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
}

impl Report {
    /// Sorts the checks by id and tallies them.
    pub fn new(stack_hash: String, mut checks: Vec<CheckReport>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let mut summary = Summary::default();
        for c in &checks {
            match c.status {
                Status::Pass => summary.pass += 1,
                Status::SampledPass => summary.sampled_pass += 1,
                Status::Fail => summary.fail += 1,
            }
        }
        Report { stack_hash, checks, summary }
    }

    pub fn ok(&self) -> bool {
        self.summary.fail == 0
    }
}
