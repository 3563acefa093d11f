//! General widths and heights: classify by width, pad each width up to the
//! class bound, schedule every class independently as a uniform-width set,
//! and superpose the loads.
//!
//! Padding a width may push the deadline out; shrinking the committed start
//! back to the original width stays inside the original window, so the
//! superposed schedule is feasible as released.

use std::collections::BTreeMap;

use crate::error::{GridError, Result};
use crate::model::{width_class, Instance, Job, Schedule, Time};

use super::uniform_width::UniformWidth;
use super::{run_online, Commitment, OnlineScheduler};

/// Integer width every class-`p` job is padded to.
pub fn class_width(p: u32, base: f64) -> i64 {
    if base == 2.0 {
        1i64 << p
    } else {
        base.powi(p as i32).ceil() as i64
    }
}

/// Pad the width to the class bound; if the window is too short for the
/// padded width, stretch the deadline to exactly fit it.
pub fn convert_job(job: &Job, base: f64) -> Job {
    let padded = class_width(classify(job, base), base);
    Job {
        id: job.id.clone(),
        release: job.release,
        deadline: job.release + job.span().max(padded),
        width: padded,
        height: job.height,
    }
}

fn classify(job: &Job, base: f64) -> u32 {
    width_class(job.width, base)
}

pub fn convert_jobs(jobs: &[Job], base: f64) -> Vec<Job> {
    jobs.iter().map(|j| convert_job(j, base)).collect()
}

/// Rewrite a schedule of the originals into one of the padded jobs: keep the
/// start, clamped so the padded width still fits the padded window.
pub fn relax_schedule(converted: &[Job], schedule: &Schedule) -> Result<Schedule> {
    let mut relaxed = Schedule::new();
    for job in converted {
        let start = schedule
            .start(&job.id)
            .ok_or_else(|| GridError::UnassignedJob(job.id.clone()))?;
        relaxed.assign(job.id.clone(), start.min(job.deadline - job.width));
    }
    Ok(relaxed)
}

/// Rewrite a schedule of padded jobs back to the originals: same starts, the
/// original width trims the execution to a prefix.
pub fn shrink_schedule(padded: &Schedule) -> Schedule {
    padded.clone()
}

struct WidthClassed {
    base: f64,
    classes: BTreeMap<u32, UniformWidth>,
}

impl OnlineScheduler for WidthClassed {
    fn on_release(&mut self, t: Time, job: &Job) -> Result<Vec<Commitment>> {
        let p = classify(job, self.base);
        let padded = convert_job(job, self.base);
        self.classes
            .entry(p)
            .or_insert_with(UniformWidth::new)
            .on_release(t, &padded)
    }

    fn on_slot(&mut self, t: Time) -> Result<Vec<Commitment>> {
        let mut commitments = Vec::new();
        for class in self.classes.values_mut() {
            commitments.extend(class.on_slot(t)?);
        }
        Ok(commitments)
    }
}

/// Schedule arbitrary widths and heights online; `base` is the class base
/// (2 by default everywhere else in the crate).
pub fn solve_general(instance: &Instance, base: f64) -> Result<Schedule> {
    if base <= 1.0 {
        return Err(GridError::InputClassViolation(format!(
            "class base must exceed 1, got {base}"
        )));
    }
    run_online(&mut WidthClassed { base, classes: BTreeMap::new() }, instance)
}

/// Fresh scheduler state for adaptive (adversary-driven) runs.
pub fn boxed_scheduler(base: f64) -> Box<dyn OnlineScheduler> {
    Box::new(WidthClassed { base, classes: BTreeMap::new() })
}
