//! Online scheduling: jobs become visible at their release times and start
//! decisions are irrevocable.
//!
//! The driver walks timeslots in order. At each slot it first reveals the
//! newly released jobs, then asks the algorithm for decisions. A decision is
//! a committed `(job, start)` pair with `start` no earlier than the current
//! slot; committing ahead of time is allowed (the density-queue algorithm
//! fixes start times on arrival), moving a commitment is not.

pub mod density_queues;
pub mod greedy;
pub mod paced;
pub mod quota;
pub mod uniform_width;
pub mod width_classes;

pub use density_queues::{solve_ad, solve_ad_detailed, FitRule, QueueSummary};
pub use greedy::greedy_assign;
pub use paced::solve_v;
pub use quota::solve_uu;
pub use uniform_width::{
    align_feasible_interval, align_schedule, free_schedule, solve_uv, AlignedJob,
};
pub use width_classes::{convert_job, convert_jobs, relax_schedule, shrink_schedule, solve_general};

use crate::dvs::{self, Reference};
use crate::error::{GridError, Result};
use crate::model::{validate_schedule, Instance, Job, JobId, Schedule, Time};

/// One irrevocable start decision.
pub type Commitment = (JobId, Time);

/// A stateful online decision rule driven by [`run_online`].
pub trait OnlineScheduler {
    /// A job just became visible. May already commit it.
    fn on_release(&mut self, t: Time, job: &Job) -> Result<Vec<Commitment>>;
    /// Called once per slot after all arrivals of that slot.
    fn on_slot(&mut self, t: Time) -> Result<Vec<Commitment>>;
}

/// Simulate `algorithm` over the instance and return its total schedule.
///
/// Errors with [`GridError::InfeasibleOutcome`] if any job is left
/// unassigned or assigned outside its window; the algorithms here are proven
/// feasible on their input classes, so that indicates a bug or a reference
/// profile that does not complete all work.
pub fn run_online<S: OnlineScheduler + ?Sized>(
    algorithm: &mut S,
    instance: &Instance,
) -> Result<Schedule> {
    instance.validate()?;
    let horizon = instance.horizon();
    let mut schedule = Schedule::new();
    for t in 0..horizon {
        for job in instance.jobs.iter().filter(|j| j.release == t) {
            commit(&mut schedule, algorithm.on_release(t, job)?, t);
        }
        commit(&mut schedule, algorithm.on_slot(t)?, t);
    }
    let violations = validate_schedule(instance, &schedule);
    if violations.is_empty() {
        Ok(schedule)
    } else {
        Err(GridError::InfeasibleOutcome(violations))
    }
}

fn commit(schedule: &mut Schedule, commitments: Vec<Commitment>, now: Time) {
    for (id, start) in commitments {
        debug_assert!(start >= now, "commitment for {id} points into the past");
        debug_assert!(schedule.start(&id).is_none(), "{id} committed twice");
        schedule.assign(id, start);
    }
}

/// Algorithm selection used by the harness and the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    /// Reference-paced EDF for unit widths ("v").
    Paced(Reference),
    /// Tight/loose split with aligned pacing for one uniform width ("uv").
    UniformWidth,
    /// Width classes, each padded and scheduled independently ("general").
    WidthClassed { base: f64 },
    /// Average-rate quota for unit width and uniform height ("uu").
    Quota,
    /// Density queues for agreeable deadlines and uniform height ("ad-nextfit").
    DensityQueues(FitRule),
}

impl Algorithm {
    /// Harness/CSV name; the bare CLI names are "v", "uv", "general", "uu",
    /// "ad-nextfit", "ad-firstfit".
    pub fn name(&self) -> String {
        match self {
            Algorithm::Paced(Reference::Avr) => "v-avr".into(),
            Algorithm::Paced(Reference::Bkp) => "v-bkp".into(),
            Algorithm::Paced(Reference::Yds) => "v-yds".into(),
            Algorithm::UniformWidth => "uv".into(),
            Algorithm::WidthClassed { .. } => "general".into(),
            Algorithm::Quota => "uu".into(),
            Algorithm::DensityQueues(FitRule::NextFit) => "ad-nextfit".into(),
            Algorithm::DensityQueues(FitRule::FirstFit) => "ad-firstfit".into(),
        }
    }
}

/// Run the selected algorithm on `instance`.
pub fn solve(instance: &Instance, algorithm: Algorithm) -> Result<Schedule> {
    match algorithm {
        Algorithm::Paced(reference) => {
            let profile = dvs::reference_profile(instance, reference);
            solve_v(instance, &profile)
        }
        Algorithm::UniformWidth => solve_uv(instance),
        Algorithm::WidthClassed { base } => solve_general(instance, base),
        Algorithm::Quota => solve_uu(instance),
        Algorithm::DensityQueues(fit) => solve_ad(instance, fit),
    }
}
