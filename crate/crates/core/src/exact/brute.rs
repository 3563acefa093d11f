//! Exhaustive minimisation, kept deliberately independent of the window DP
//! so the two can cross-check each other.

use std::collections::BTreeMap;

use crate::error::{GridError, Result};
use crate::model::{Instance, Schedule, Time};
use crate::slots::SlotInstance;

pub const DEFAULT_CAP: f64 = 1e7;

/// Minimum-cost schedule by trying every start-time tuple, depth-first in
/// ascending start order with cost pruning. Ties resolve to the first tuple
/// found, i.e. the lexicographically smallest one.
pub fn brute_force(instance: &Instance) -> Result<(Schedule, f64)> {
    brute_force_capped(instance, DEFAULT_CAP)
}

pub fn brute_force_capped(instance: &Instance, cap: f64) -> Result<(Schedule, f64)> {
    instance.validate()?;
    let mut space = 1.0f64;
    for job in &instance.jobs {
        space *= (job.latest_start() - job.release + 1) as f64;
        if space > cap {
            return Err(GridError::TooLarge(space));
        }
    }

    let horizon = instance.horizon().max(0) as usize;
    let max_load: i64 = instance.jobs.iter().map(|j| j.height).sum();
    let pow: Vec<f64> = (0..=max_load).map(|l| (l as f64).powf(instance.alpha)).collect();

    let mut loads = vec![0i64; horizon];
    let mut starts = vec![0 as Time; instance.jobs.len()];
    let mut best: Option<(f64, Vec<Time>)> = None;
    search(instance, 0, 0.0, &pow, &mut loads, &mut starts, &mut best);

    let (cost, starts) = best.expect("every valid instance admits a schedule");
    let schedule = Schedule::from_pairs(
        instance.jobs.iter().zip(starts).map(|(j, s)| (j.id.clone(), s)),
    );
    Ok((schedule, cost))
}

fn search(
    instance: &Instance,
    depth: usize,
    cost_so_far: f64,
    pow: &[f64],
    loads: &mut Vec<i64>,
    starts: &mut Vec<Time>,
    best: &mut Option<(f64, Vec<Time>)>,
) {
    // loads only grow, so a partial cost at or above the incumbent is dead
    if let Some((incumbent, _)) = best {
        if cost_so_far >= *incumbent {
            return;
        }
    }
    if depth == instance.jobs.len() {
        *best = Some((cost_so_far, starts.clone()));
        return;
    }
    let job = &instance.jobs[depth];
    for st in job.release..=job.latest_start() {
        let mut cost = cost_so_far;
        for t in st..st + job.width {
            let slot = t as usize;
            cost += pow[(loads[slot] + job.height) as usize] - pow[loads[slot] as usize];
            loads[slot] += job.height;
        }
        starts[depth] = st;
        search(instance, depth + 1, cost, pow, loads, starts, best);
        for t in st..st + job.width {
            loads[t as usize] -= job.height;
        }
    }
}

/// Brute force over the slot-set job model: every job picks one of its
/// allowed slots. Used to certify the greedy lower-bound construction.
pub fn brute_force_slots(instance: &SlotInstance, cap: f64) -> Result<(BTreeMap<String, Time>, f64)> {
    let mut space = 1.0f64;
    for job in &instance.jobs {
        if job.slots.is_empty() {
            return Err(GridError::NoFeasibleSlot(job.id.clone()));
        }
        space *= job.slots.len() as f64;
        if space > cap {
            return Err(GridError::TooLarge(space));
        }
    }
    let alpha = instance.alpha;
    let mut loads: BTreeMap<Time, i64> = BTreeMap::new();
    let mut picks: Vec<Time> = vec![0; instance.jobs.len()];
    let mut best: Option<(f64, Vec<Time>)> = None;

    fn go(
        instance: &SlotInstance,
        alpha: f64,
        depth: usize,
        cost_so_far: f64,
        loads: &mut BTreeMap<Time, i64>,
        picks: &mut Vec<Time>,
        best: &mut Option<(f64, Vec<Time>)>,
    ) {
        if let Some((incumbent, _)) = best {
            if cost_so_far >= *incumbent {
                return;
            }
        }
        if depth == instance.jobs.len() {
            *best = Some((cost_so_far, picks.clone()));
            return;
        }
        for &slot in &instance.jobs[depth].slots {
            let load = loads.entry(slot).or_insert(0);
            let old = *load as f64;
            *load += 1;
            let delta = (old + 1.0).powf(alpha) - old.powf(alpha);
            picks[depth] = slot;
            go(instance, alpha, depth + 1, cost_so_far + delta, loads, picks, best);
            *loads.get_mut(&slot).unwrap() -= 1;
        }
    }
    go(instance, alpha, 0, 0.0, &mut loads, &mut picks, &mut best);

    let (cost, picks) = best.expect("nonempty slot sets admit an assignment");
    let assignment = instance
        .jobs
        .iter()
        .zip(picks)
        .map(|(j, s)| (j.id.clone(), s))
        .collect();
    Ok((assignment, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Job;

    #[test]
    fn remark_instance_costs_six() {
        let instance = Instance::new(
            2.0,
            vec![Job::new("j1", 0, 3, 3, 1), Job::new("j2", 1, 2, 1, 1)],
        )
        .unwrap();
        let (schedule, cost) = brute_force(&instance).unwrap();
        assert!((cost - 6.0).abs() < 1e-12);
        assert_eq!(schedule.start("j1"), Some(0));
        assert_eq!(schedule.start("j2"), Some(1));
    }

    #[test]
    fn single_job_any_start() {
        let instance = Instance::new(2.0, vec![Job::new("a", 0, 9, 3, 2)]).unwrap();
        let (_, cost) = brute_force(&instance).unwrap();
        assert!((cost - 3.0 * 4.0).abs() < 1e-12);
    }

    #[test]
    fn cap_rejects_huge_spaces() {
        let jobs = (0..8)
            .map(|i| Job::new(format!("j{i}"), 0, 100, 1, 1))
            .collect();
        let instance = Instance::new(2.0, jobs).unwrap();
        assert!(matches!(
            brute_force_capped(&instance, 1e6),
            Err(GridError::TooLarge(_))
        ));
    }
}
