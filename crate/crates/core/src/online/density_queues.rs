//! Agreeable deadlines, uniform height: pack jobs into queues by density and
//! chain each queue back to back.
//!
//! A queue accepts a job while its density sum stays within the height `h`;
//! such a queue can run its members without any two overlapping, so each
//! queue contributes at most `h` load anywhere. Start times are fixed on
//! arrival: a member starts at its release or at the queue's current ending
//! time, whichever is later.

use num_rational::Ratio;

use crate::error::{GridError, Result};
use crate::model::{Instance, Job, Schedule, Time};

use super::{run_online, Commitment, OnlineScheduler};

/// Queue selection rule. Next-fit only ever considers the newest queue and
/// works for any agreeable instance; first-fit reuses earlier queues and is
/// reserved for equal releases or equal deadlines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitRule {
    NextFit,
    FirstFit,
}

struct Queue {
    density: Ratio<i128>,
    ending: Time,
}

struct DensityQueues {
    fit: FitRule,
    height: Option<i64>,
    queues: Vec<Queue>,
    membership: Vec<Vec<String>>,
    /// arrivals of the current slot, ordered by deadline before insertion
    pending: Vec<Job>,
    max_deadline_seen: Time,
    first_release: Option<Time>,
    first_deadline: Option<Time>,
    same_release: bool,
    same_deadline: bool,
}

impl DensityQueues {
    fn new(fit: FitRule) -> Self {
        DensityQueues {
            fit,
            height: None,
            queues: Vec::new(),
            membership: Vec::new(),
            pending: Vec::new(),
            max_deadline_seen: Time::MIN,
            first_release: None,
            first_deadline: None,
            same_release: true,
            same_deadline: true,
        }
    }

    fn insert(&mut self, job: &Job, h: i64) -> Commitment {
        let density = job.density_exact();
        let capacity = Ratio::from_integer(h as i128);
        let queue_idx = match self.fit {
            FitRule::NextFit => self
                .queues
                .last()
                .and_then(|q| (q.density + density <= capacity).then_some(self.queues.len() - 1)),
            FitRule::FirstFit => self
                .queues
                .iter()
                .position(|q| q.density + density <= capacity),
        };
        let idx = queue_idx.unwrap_or_else(|| {
            self.queues.push(Queue { density: Ratio::from_integer(0), ending: 0 });
            self.membership.push(Vec::new());
            self.queues.len() - 1
        });
        self.membership[idx].push(job.id.clone());
        let queue = &mut self.queues[idx];
        let start = if job.release <= queue.ending { queue.ending } else { job.release };
        queue.ending = start + job.width;
        queue.density += density;
        (job.id.clone(), start)
    }
}

impl OnlineScheduler for DensityQueues {
    fn on_release(&mut self, _t: Time, job: &Job) -> Result<Vec<Commitment>> {
        let h = *self.height.get_or_insert(job.height);
        if job.height != h {
            return Err(GridError::InputClassViolation(format!(
                "job {} has height {}, expected uniform height {h}",
                job.id, job.height
            )));
        }
        if self.fit == FitRule::FirstFit {
            let r0 = *self.first_release.get_or_insert(job.release);
            let d0 = *self.first_deadline.get_or_insert(job.deadline);
            self.same_release &= job.release == r0;
            self.same_deadline &= job.deadline == d0;
            if !self.same_release && !self.same_deadline {
                return Err(GridError::InputClassViolation(
                    "first-fit queues need a common release or common deadline".into(),
                ));
            }
        }
        self.pending.push(job.clone());
        Ok(Vec::new())
    }

    fn on_slot(&mut self, _t: Time) -> Result<Vec<Commitment>> {
        // same-slot arrivals are inserted in deadline order, which is the
        // agreeable order when one exists
        self.pending.sort_by(|a, b| (a.deadline, &a.id).cmp(&(b.deadline, &b.id)));
        let pending = std::mem::take(&mut self.pending);
        let mut commitments = Vec::new();
        for job in pending {
            if job.deadline < self.max_deadline_seen {
                return Err(GridError::NotAgreeable(format!(
                    "job {} is released later but due earlier",
                    job.id
                )));
            }
            self.max_deadline_seen = self.max_deadline_seen.max(job.deadline);
            let h = self.height.expect("height fixed on first arrival");
            commitments.push(self.insert(&job, h));
        }
        Ok(commitments)
    }
}

/// Schedule a uniform-height instance with agreeable deadlines online.
pub fn solve_ad(instance: &Instance, fit: FitRule) -> Result<Schedule> {
    run_online(&mut DensityQueues::new(fit), instance)
}

/// Density sum and membership of one queue after a run.
#[derive(Debug, Clone)]
pub struct QueueSummary {
    pub jobs: Vec<String>,
    pub density: Ratio<i128>,
    pub ending: Time,
}

/// [`solve_ad`] plus the final queue state, for invariant checks: adjacent
/// next-fit queues always exceed the height together, and members of one
/// queue never overlap.
pub fn solve_ad_detailed(instance: &Instance, fit: FitRule) -> Result<(Schedule, Vec<QueueSummary>)> {
    let mut scheduler = DensityQueues::new(fit);
    let schedule = run_online(&mut scheduler, instance)?;
    let summaries = scheduler
        .queues
        .iter()
        .zip(scheduler.membership.iter())
        .map(|(queue, jobs)| QueueSummary {
            jobs: jobs.clone(),
            density: queue.density,
            ending: queue.ending,
        })
        .collect();
    Ok((schedule, summaries))
}
