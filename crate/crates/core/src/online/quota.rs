//! Unit width, uniform height: start `ceil(avg(t) / h)` jobs per slot.
//!
//! `avg(t)` sums the densities of jobs whose feasible interval covers `t`,
//! which depends only on jobs released by `t`; the quota is evaluated in
//! exact arithmetic so the ceiling never flips on rounding. Per slot the
//! load stays within `h * ceil(avg(t) / h)`, and the cumulative work keeps
//! up with the average-rate reference, which makes the schedule feasible.

use crate::error::{GridError, Result};
use crate::model::{avg_quota, Instance, Job, Schedule, Time};

use super::{run_online, Commitment, OnlineScheduler};

struct Quota {
    quotas: Vec<i64>,
    available: Vec<Job>,
}

impl OnlineScheduler for Quota {
    fn on_release(&mut self, _t: Time, job: &Job) -> Result<Vec<Commitment>> {
        self.available.push(job.clone());
        Ok(Vec::new())
    }

    fn on_slot(&mut self, t: Time) -> Result<Vec<Commitment>> {
        let quota = self.quotas.get(t as usize).copied().unwrap_or(0).max(0) as usize;
        self.available
            .sort_by(|a, b| (a.deadline, a.release, &a.id).cmp(&(b.deadline, b.release, &b.id)));
        let take = quota.min(self.available.len());
        Ok(self.available.drain(..take).map(|job| (job.id, t)).collect())
    }
}

/// Schedule a unit-width, uniform-height instance online.
pub fn solve_uu(instance: &Instance) -> Result<Schedule> {
    if let Some(job) = instance.jobs.iter().find(|j| j.width != 1) {
        return Err(GridError::InputClassViolation(format!(
            "job {} has width {}, quota scheduling needs unit widths",
            job.id, job.width
        )));
    }
    let h = match instance.jobs.first() {
        None => return Ok(Schedule::new()),
        Some(job) => job.height,
    };
    if let Some(job) = instance.jobs.iter().find(|j| j.height != h) {
        return Err(GridError::InputClassViolation(format!(
            "job {} has height {}, expected uniform height {h}",
            job.id, job.height
        )));
    }
    let quotas = avg_quota(instance, h);
    run_online(&mut Quota { quotas, available: Vec::new() }, instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{load_profile, validate_schedule};

    fn unit_jobs(n: usize, release: Time, deadline: Time) -> Vec<Job> {
        (0..n).map(|i| Job::new(format!("j{i}"), release, deadline, 1, 1)).collect()
    }

    #[test]
    fn quota_two_per_slot_when_avg_is_two() {
        let instance = Instance::new(2.0, unit_jobs(4, 0, 2)).unwrap();
        let schedule = solve_uu(&instance).unwrap();
        let profile = load_profile(&instance, &schedule).unwrap();
        assert_eq!(profile.loads, vec![2.0, 2.0]);
    }

    #[test]
    fn fractional_avg_rounds_up_to_one_per_slot() {
        let instance = Instance::new(2.0, unit_jobs(4, 0, 5)).unwrap();
        let schedule = solve_uu(&instance).unwrap();
        let profile = load_profile(&instance, &schedule).unwrap();
        // avg = 0.8, one job per slot until the four jobs are done
        assert_eq!(profile.loads, vec![1.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn load_never_exceeds_quota_times_height() {
        let mut jobs = unit_jobs(5, 0, 3);
        jobs.extend(unit_jobs(3, 2, 6).into_iter().map(|mut j| {
            j.id = format!("k{}", j.id);
            j
        }));
        for job in &mut jobs {
            job.height = 2;
        }
        let instance = Instance::new(2.0, jobs).unwrap();
        let schedule = solve_uu(&instance).unwrap();
        assert!(validate_schedule(&instance, &schedule).is_empty());
        let profile = load_profile(&instance, &schedule).unwrap();
        let quotas = avg_quota(&instance, 2);
        for t in 0..instance.horizon() {
            assert!(profile.get(t) <= (2 * quotas[t as usize]) as f64);
        }
    }

    #[test]
    fn rejects_mixed_heights() {
        let jobs = vec![Job::new("a", 0, 2, 1, 1), Job::new("b", 0, 2, 1, 2)];
        let instance = Instance::new(2.0, jobs).unwrap();
        assert!(matches!(solve_uu(&instance), Err(GridError::InputClassViolation(_))));
    }
}
