//! Domain model: jobs, instances, schedules, loads and cost.
//!
//! A job is a rectangle: it requests `height` units of power for `width`
//! consecutive timeslots, anywhere inside its feasible interval
//! `[release, deadline)`. A schedule assigns each job an integral start time;
//! the load of a slot is the sum of heights of jobs running there and the
//! electricity cost is the sum over slots of `load^alpha` for a fixed
//! exponent `alpha > 1`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{GridError, Result};

/// Timeslot index. Slot `t` is the unit interval `[t, t+1)`.
pub type Time = i64;

/// Job identifier as it appears in instance files.
pub type JobId = String;

/// A power request: `height` units for `width` slots within `[release, deadline)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    pub release: Time,
    pub deadline: Time,
    pub width: i64,
    pub height: i64,
}

impl Job {
    pub fn new(id: impl Into<JobId>, release: Time, deadline: Time, width: i64, height: i64) -> Self {
        Job { id: id.into(), release, deadline, width, height }
    }

    /// Length of the feasible interval `[release, deadline)`.
    pub fn span(&self) -> i64 {
        self.deadline - self.release
    }

    /// Average load the job imposes over its feasible interval.
    pub fn density(&self) -> f64 {
        (self.width * self.height) as f64 / self.span() as f64
    }

    /// `density` as an exact rational, for ceiling comparisons.
    pub fn density_exact(&self) -> Ratio<i128> {
        Ratio::new((self.width * self.height) as i128, self.span() as i128)
    }

    /// Latest feasible start time.
    pub fn latest_start(&self) -> Time {
        self.deadline - self.width
    }

    fn check(&self) -> Result<()> {
        if self.release < 0 {
            return Err(GridError::InvalidInstance(format!("job {}: negative release", self.id)));
        }
        if self.release >= self.deadline {
            return Err(GridError::InvalidInstance(format!(
                "job {}: release {} must precede deadline {}",
                self.id, self.release, self.deadline
            )));
        }
        if self.width < 1 || self.height < 1 {
            return Err(GridError::InvalidInstance(format!(
                "job {}: width and height must be positive",
                self.id
            )));
        }
        if self.width > self.span() {
            return Err(GridError::InvalidInstance(format!(
                "job {}: width {} exceeds feasible interval of length {}",
                self.id,
                self.width,
                self.span()
            )));
        }
        Ok(())
    }
}

/// A job set together with the cost exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub alpha: f64,
    pub jobs: Vec<Job>,
}

impl Instance {
    pub fn new(alpha: f64, jobs: Vec<Job>) -> Result<Self> {
        let instance = Instance { alpha, jobs };
        instance.validate()?;
        Ok(instance)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha <= 1.0 {
            return Err(GridError::InvalidAlpha(self.alpha));
        }
        let mut seen = BTreeSet::new();
        for job in &self.jobs {
            job.check()?;
            if !seen.insert(job.id.as_str()) {
                return Err(GridError::InvalidInstance(format!("duplicate job id {}", job.id)));
            }
        }
        Ok(())
    }

    /// `tau`: one past the last deadline; profiles are indexed `0..horizon`.
    pub fn horizon(&self) -> Time {
        self.jobs.iter().map(|j| j.deadline).max().unwrap_or(0)
    }

    pub fn job(&self, id: &str) -> Option<&Job> {
        self.jobs.iter().find(|j| j.id == id)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let instance: Instance = serde_json::from_str(text)?;
        instance.validate()?;
        Ok(instance)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

/// Start-time assignment. Partial while an online run is in progress,
/// total when returned to the caller.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub assignments: BTreeMap<JobId, Time>,
}

impl Schedule {
    pub fn new() -> Self {
        Schedule::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (JobId, Time)>) -> Self {
        Schedule { assignments: pairs.into_iter().collect() }
    }

    pub fn start(&self, id: &str) -> Option<Time> {
        self.assignments.get(id).copied()
    }

    pub fn assign(&mut self, id: impl Into<JobId>, start: Time) {
        self.assignments.insert(id.into(), start);
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }
}

/// Per-slot load (or per-slot speed when used as a DVS reference).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    pub loads: Vec<f64>,
}

impl LoadProfile {
    pub fn zeros(horizon: Time) -> Self {
        LoadProfile { loads: vec![0.0; horizon.max(0) as usize] }
    }

    /// Load at slot `t`; zero outside the indexed range.
    pub fn get(&self, t: Time) -> f64 {
        if t < 0 || t as usize >= self.loads.len() {
            0.0
        } else {
            self.loads[t as usize]
        }
    }

    pub fn horizon(&self) -> Time {
        self.loads.len() as Time
    }
}

/// A set of timeslots, not necessarily contiguous.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSet(pub BTreeSet<Time>);

impl SlotSet {
    pub fn contains(&self, t: Time) -> bool {
        self.0.contains(&t)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<Time> for SlotSet {
    fn from_iter<I: IntoIterator<Item = Time>>(iter: I) -> Self {
        SlotSet(iter.into_iter().collect())
    }
}

/// One rule broken by a schedule. Violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// The schedule has no start time for this job.
    Unassigned { job: JobId },
    /// The schedule assigns a job the instance does not contain.
    UnknownJob { job: JobId },
    /// Start precedes the release time.
    StartsBeforeRelease { job: JobId, start: Time, release: Time },
    /// `start + width` exceeds the deadline.
    MissesDeadline { job: JobId, start: Time, end: Time, deadline: Time },
}

/// Per-slot load of a total schedule.
///
/// Fails if the schedule is partial or places a job outside its window;
/// validate first when violations should be inspected instead.
pub fn load_profile(instance: &Instance, schedule: &Schedule) -> Result<LoadProfile> {
    let mut profile = LoadProfile::zeros(instance.horizon());
    for job in &instance.jobs {
        let start = schedule
            .start(&job.id)
            .ok_or_else(|| GridError::UnassignedJob(job.id.clone()))?;
        if start < job.release || start + job.width > job.deadline {
            return Err(GridError::InfeasibleAssignment { job: job.id.clone(), start });
        }
        for t in start..start + job.width {
            profile.loads[t as usize] += job.height as f64;
        }
    }
    Ok(profile)
}

/// `sum_t load(t)^alpha` over the whole profile.
pub fn cost(profile: &LoadProfile, alpha: f64) -> Result<f64> {
    if alpha <= 1.0 {
        return Err(GridError::InvalidAlpha(alpha));
    }
    Ok(profile.loads.iter().map(|&l| l.powf(alpha)).sum())
}

/// Cost restricted to a slot set.
pub fn cost_on(profile: &LoadProfile, slots: &SlotSet, alpha: f64) -> Result<f64> {
    if alpha <= 1.0 {
        return Err(GridError::InvalidAlpha(alpha));
    }
    Ok(slots.0.iter().map(|&t| profile.get(t).powf(alpha)).sum())
}

/// The "average" load: each job spread uniformly over its feasible interval.
pub fn avg_profile(instance: &Instance) -> LoadProfile {
    let mut profile = LoadProfile::zeros(instance.horizon());
    for job in &instance.jobs {
        let den = job.density();
        for t in job.release..job.deadline {
            profile.loads[t as usize] += den;
        }
    }
    profile
}

/// Exact-rational version of [`avg_profile`], one value per slot.
pub(crate) fn avg_profile_exact(instance: &Instance) -> Vec<Ratio<i128>> {
    let mut avg = vec![Ratio::from_integer(0); instance.horizon().max(0) as usize];
    for job in &instance.jobs {
        let den = job.density_exact();
        for t in job.release..job.deadline {
            avg[t as usize] += den;
        }
    }
    avg
}

/// `ceil(avg(t) / h)` per slot, evaluated in exact arithmetic so the ceiling
/// never flips on a rounding artifact.
pub fn avg_quota(instance: &Instance, h: i64) -> Vec<i64> {
    avg_profile_exact(instance)
        .into_iter()
        .map(|a| (a / Ratio::from_integer(h as i128)).ceil().to_integer() as i64)
        .collect()
}

/// Split `[0, horizon)` into the slots with `avg(t) > h` and those with
/// `avg(t) <= h`, using exact arithmetic.
pub fn partition_by_avg(instance: &Instance, h: i64) -> (SlotSet, SlotSet) {
    let threshold = Ratio::from_integer(h as i128);
    let mut above = SlotSet::default();
    let mut below = SlotSet::default();
    for (t, a) in avg_profile_exact(instance).into_iter().enumerate() {
        if a > threshold {
            above.0.insert(t as Time);
        } else {
            below.0.insert(t as Time);
        }
    }
    (above, below)
}

/// Float variant over an arbitrary profile: slots with load `> h` and `<= h`.
/// The pieces are disjoint and cover the full indexed range.
pub fn partition_slots(profile: &LoadProfile, h: f64) -> (SlotSet, SlotSet) {
    let mut above = SlotSet::default();
    let mut below = SlotSet::default();
    for (t, &l) in profile.loads.iter().enumerate() {
        if l > h {
            above.0.insert(t as Time);
        } else {
            below.0.insert(t as Time);
        }
    }
    (above, below)
}

/// Width class of `width` for a class base `> 1`: the smallest `p >= 0` with
/// `base^(p-1) < width <= base^p`.
pub fn width_class(width: i64, base: f64) -> u32 {
    debug_assert!(width >= 1 && base > 1.0);
    if base == 2.0 {
        // exact integer route
        let mut p = 0u32;
        while (1i64 << p) < width {
            p += 1;
        }
        return p;
    }
    let w = width as f64;
    let mut p = 0u32;
    while base.powi(p as i32) < w {
        p += 1;
    }
    p
}

/// Class of a job's width; see [`width_class`].
pub fn classify_width(job: &Job, base: f64) -> u32 {
    width_class(job.width, base)
}

/// Every rule the schedule breaks; empty means total and feasible.
pub fn validate_schedule(instance: &Instance, schedule: &Schedule) -> Vec<Violation> {
    let mut violations = Vec::new();
    for job in &instance.jobs {
        match schedule.start(&job.id) {
            None => violations.push(Violation::Unassigned { job: job.id.clone() }),
            Some(start) => {
                if start < job.release {
                    violations.push(Violation::StartsBeforeRelease {
                        job: job.id.clone(),
                        start,
                        release: job.release,
                    });
                }
                if start + job.width > job.deadline {
                    violations.push(Violation::MissesDeadline {
                        job: job.id.clone(),
                        start,
                        end: start + job.width,
                        deadline: job.deadline,
                    });
                }
            }
        }
    }
    for id in schedule.assignments.keys() {
        if instance.job(id).is_none() {
            violations.push(Violation::UnknownJob { job: id.clone() });
        }
    }
    violations
}

/// Stable sort by `(deadline, release, id)`.
pub fn edf_order(jobs: &[Job]) -> Vec<Job> {
    let mut sorted = jobs.to_vec();
    sorted.sort_by(|a, b| {
        (a.deadline, a.release, &a.id).cmp(&(b.deadline, b.release, &b.id))
    });
    sorted
}
