//! Scheduling a uniform-width job set online.
//!
//! Tight jobs (feasible interval at most twice the width) start at their
//! release. Loose jobs get their release rounded up and their deadline
//! rounded down to multiples of the width; on that aligned timeline they
//! behave like unit-width jobs and are paced against a BKP reference of the
//! rescaled speed-scaling conversion, with decisions at multiples of the
//! width only.

use crate::dvs::{bkp_speed_from_jobs, DvsJob};
use crate::error::{GridError, Result};
use crate::model::{Instance, Job, JobId, Schedule, Time};

use super::{run_online, Commitment, OnlineScheduler};

/// A loose job with window aligned to multiples of the uniform width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedJob {
    pub id: JobId,
    pub release: Time,
    pub deadline: Time,
    pub width: i64,
    pub height: i64,
}

/// `|I| <= 2w` starts at release; anything longer goes through alignment.
pub fn is_tight(job: &Job) -> bool {
    job.span() <= 2 * job.width
}

/// Round the release up and the deadline down to multiples of the width.
/// The aligned window sits inside the original one, keeps at least width
/// `w`, and keeps more than a third of the original length.
pub fn align_feasible_interval(job: &Job) -> Result<AlignedJob> {
    if is_tight(job) {
        return Err(GridError::NotLoose(job.id.clone()));
    }
    let w = job.width;
    let release = job.release.div_euclid(w) * w + if job.release % w == 0 { 0 } else { w };
    let deadline = job.deadline.div_euclid(w) * w;
    debug_assert!(release < deadline && deadline - release >= w);
    Ok(AlignedJob { id: job.id.clone(), release, deadline, width: w, height: job.height })
}

/// Shift every start of a loose-job schedule to the next multiple of the
/// width, clamped to the aligned deadline. Feasible for the aligned jobs;
/// per slot, the shifted load is covered by the loads at `t`, `t-(w-1)` and
/// `t+(w-1)` of the input schedule.
pub fn align_schedule(loose: &[Job], schedule: &Schedule) -> Result<Schedule> {
    let mut aligned = Schedule::new();
    for job in loose {
        let target = align_feasible_interval(job)?;
        let start = schedule
            .start(&job.id)
            .ok_or_else(|| GridError::UnassignedJob(job.id.clone()))?;
        let rounded = if start % job.width == 0 {
            start
        } else {
            (start.div_euclid(job.width) + 1) * job.width
        };
        aligned.assign(job.id.clone(), rounded.min(target.deadline - job.width));
    }
    Ok(aligned)
}

/// Map a schedule of aligned jobs back to the original loose jobs. Start and
/// end times are unchanged, so the cost is too.
pub fn free_schedule(aligned: &Schedule) -> Schedule {
    aligned.clone()
}

pub(crate) struct UniformWidth {
    width: Option<i64>,
    /// rescaled speed-scaling jobs (times divided by the width) feeding BKP
    rescaled: Vec<DvsJob>,
    /// aligned loose jobs not yet started
    waiting: Vec<AlignedJob>,
}

impl UniformWidth {
    pub(crate) fn new() -> Self {
        UniformWidth { width: None, rescaled: Vec::new(), waiting: Vec::new() }
    }
}

impl OnlineScheduler for UniformWidth {
    fn on_release(&mut self, t: Time, job: &Job) -> Result<Vec<Commitment>> {
        let w = *self.width.get_or_insert(job.width);
        if job.width != w {
            return Err(GridError::InputClassViolation(format!(
                "job {} has width {}, expected uniform width {w}",
                job.id, job.width
            )));
        }
        if is_tight(job) {
            return Ok(vec![(job.id.clone(), t)]);
        }
        let aligned = align_feasible_interval(job)?;
        self.rescaled.push(DvsJob {
            id: aligned.id.clone(),
            release: aligned.release / w,
            deadline: aligned.deadline / w,
            work: aligned.height,
        });
        self.waiting.push(aligned);
        Ok(Vec::new())
    }

    fn on_slot(&mut self, t: Time) -> Result<Vec<Commitment>> {
        let Some(w) = self.width else { return Ok(Vec::new()) };
        if t % w != 0 {
            return Ok(Vec::new());
        }
        let u = t / w;
        let target = bkp_speed_from_jobs(&self.rescaled, u);
        self.waiting
            .sort_by(|a, b| (a.deadline, a.release, &a.id).cmp(&(b.deadline, b.release, &b.id)));
        // start available jobs in EDF order until the load covers the target
        let mut commitments = Vec::new();
        let mut remaining = Vec::new();
        let mut load = 0.0;
        for job in self.waiting.drain(..) {
            if job.release <= t && load < target {
                load += job.height as f64;
                commitments.push((job.id, t));
            } else {
                remaining.push(job);
            }
        }
        self.waiting = remaining;
        Ok(commitments)
    }
}

/// Schedule a uniform-width instance online.
pub fn solve_uv(instance: &Instance) -> Result<Schedule> {
    if let (Some(first), Some(bad)) = (
        instance.jobs.first(),
        instance.jobs.iter().find(|j| j.width != instance.jobs[0].width),
    ) {
        return Err(GridError::InputClassViolation(format!(
            "widths {} and {} mixed, uniform width required",
            first.width, bad.width
        )));
    }
    run_online(&mut UniformWidth::new(), instance)
}
