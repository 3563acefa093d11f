//! Greedy baseline on the slot-set model: place each arriving unit job on
//! its allowed slot of minimum current load, lowest index on ties. Known to
//! be no better than 3-competitive; the adversary module builds the
//! instances that show it.

use std::collections::BTreeMap;

use crate::error::{GridError, Result};
use crate::model::Time;
use crate::slots::{slot_cost, SlotInstance};

/// Assignment and its cost; jobs are processed in instance order.
pub fn greedy_assign(instance: &SlotInstance) -> Result<(BTreeMap<String, Time>, f64)> {
    let mut loads: BTreeMap<Time, i64> = BTreeMap::new();
    let mut assignment = BTreeMap::new();
    for job in &instance.jobs {
        let slot = job
            .slots
            .iter()
            .copied()
            .min_by_key(|s| (loads.get(s).copied().unwrap_or(0), *s))
            .ok_or_else(|| GridError::NoFeasibleSlot(job.id.clone()))?;
        *loads.entry(slot).or_insert(0) += 1;
        assignment.insert(job.id.clone(), slot);
    }
    let cost = slot_cost(&assignment, instance.alpha);
    Ok((assignment, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slots::SlotJob;

    #[test]
    fn picks_smallest_slot_on_empty_loads() {
        let instance = SlotInstance {
            alpha: 2.0,
            jobs: vec![SlotJob { id: "a".into(), slots: vec![5, 3] }],
        };
        let (assignment, cost) = greedy_assign(&instance).unwrap();
        assert_eq!(assignment["a"], 3);
        assert_eq!(cost, 1.0);
    }

    #[test]
    fn prefers_lower_load_over_lower_index() {
        let instance = SlotInstance {
            alpha: 2.0,
            jobs: vec![
                SlotJob { id: "a".into(), slots: vec![1] },
                SlotJob { id: "b".into(), slots: vec![1, 2] },
            ],
        };
        let (assignment, _) = greedy_assign(&instance).unwrap();
        assert_eq!(assignment["b"], 2);
    }

    #[test]
    fn empty_slot_set_is_an_error() {
        let instance = SlotInstance {
            alpha: 2.0,
            jobs: vec![SlotJob { id: "a".into(), slots: vec![] }],
        };
        assert!(matches!(greedy_assign(&instance), Err(GridError::NoFeasibleSlot(_))));
    }
}
