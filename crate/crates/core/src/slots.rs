//! Slot-set job model: unit jobs whose feasible timeslots form an explicit,
//! possibly non-contiguous set. Only the greedy baseline and its dedicated
//! brute force speak this model; it is serialized in its own file schema.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{GridError, Result};
use crate::model::Time;

fn default_alpha() -> f64 {
    2.0
}

/// A unit-width, unit-height job restricted to `slots`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotJob {
    pub id: String,
    pub slots: Vec<Time>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotInstance {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub jobs: Vec<SlotJob>,
}

impl SlotInstance {
    pub fn parse(text: &str) -> Result<Self> {
        let instance: SlotInstance = serde_json::from_str(text)?;
        if instance.alpha <= 1.0 {
            return Err(GridError::InvalidAlpha(instance.alpha));
        }
        Ok(instance)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("slot instance serializes")
    }
}

/// Loads induced by an assignment, sparse over the slots actually used.
pub fn slot_loads(assignment: &BTreeMap<String, Time>) -> BTreeMap<Time, i64> {
    let mut loads = BTreeMap::new();
    for &slot in assignment.values() {
        *loads.entry(slot).or_insert(0) += 1;
    }
    loads
}

/// `sum load^alpha` over the used slots.
pub fn slot_cost(assignment: &BTreeMap<String, Time>, alpha: f64) -> f64 {
    slot_loads(assignment)
        .values()
        .map(|&l| (l as f64).powf(alpha))
        .sum()
}
