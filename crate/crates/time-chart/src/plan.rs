//! Serializable summary of a travel table and its orbit indices.

use serde::{Deserialize, Serialize};

use crate::indices::find_indices;
use crate::table::TravelTable;
use crate::ChartError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanBlock {
    pub n: u32,
    pub tau_hex: String,
    #[serde(rename = "C_hex")]
    pub c_hex: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanIndex {
    pub n: u32,
    pub i: String,
    pub j: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub blocks: Vec<PlanBlock>,
    pub indices: Vec<PlanIndex>,
}

impl Plan {
    /// Block durations and `i(n)`, `j(n)` for `4 ≤ n ≤ n_max`.
    pub fn from_table(table: &TravelTable) -> Result<Self, ChartError> {
        let blocks = table
            .blocks()
            .iter()
            .map(|b| PlanBlock { n: b.n, tau_hex: b.duration().to_hex(), c_hex: b.start().to_hex() })
            .collect();
        let mut indices = Vec::new();
        for n in 4..=table.n_max() {
            let o = find_indices(table, n)?;
            indices.push(PlanIndex { n, i: o.i.to_string(), j: o.j.to_string() });
        }
        Ok(Plan { blocks, indices })
    }
}
