//! Reference-paced scheduling of unit-width jobs.
//!
//! At each slot, available jobs are started in EDF order until the slot load
//! reaches the reference speed (or no job is left). With a feasible
//! speed-scaling reference the cumulative work never falls behind the
//! reference, which is what makes the schedule feasible; the cost is within
//! `2^alpha * (R + 1)` of optimal for a reference of competitive ratio `R`.

use crate::dvs::SpeedProfile;
use crate::error::{GridError, Result};
use crate::model::{Instance, Job, Schedule, Time};

use super::{run_online, Commitment, OnlineScheduler};

pub(crate) struct Paced {
    reference: SpeedProfile,
    available: Vec<Job>,
}

impl Paced {
    pub(crate) fn new(reference: SpeedProfile) -> Self {
        Paced { reference, available: Vec::new() }
    }
}

impl OnlineScheduler for Paced {
    fn on_release(&mut self, _t: Time, job: &Job) -> Result<Vec<Commitment>> {
        if job.width != 1 {
            return Err(GridError::InputClassViolation(format!(
                "job {} has width {}, pacing needs unit widths",
                job.id, job.width
            )));
        }
        self.available.push(job.clone());
        Ok(Vec::new())
    }

    fn on_slot(&mut self, t: Time) -> Result<Vec<Commitment>> {
        let target = self.reference.get(t);
        self.available
            .sort_by(|a, b| (a.deadline, a.release, &a.id).cmp(&(b.deadline, b.release, &b.id)));
        let mut load = 0.0;
        let mut started = 0;
        while load < target && started < self.available.len() {
            load += self.available[started].height as f64;
            started += 1;
        }
        Ok(self
            .available
            .drain(..started)
            .map(|job| (job.id, t))
            .collect())
    }
}

/// Schedule a unit-width instance against a slot-constant reference profile.
pub fn solve_v(instance: &Instance, reference: &SpeedProfile) -> Result<Schedule> {
    if let Some(job) = instance.jobs.iter().find(|j| j.width != 1) {
        return Err(GridError::InputClassViolation(format!(
            "job {} has width {}, pacing needs unit widths",
            job.id, job.width
        )));
    }
    run_online(&mut Paced::new(reference.clone()), instance)
}
