//! Reference speed profiles from dynamic speed scaling.
//!
//! A grid job maps to a speed-scaling job whose work requirement is
//! `width * height`; release times and deadlines carry over. The profiles
//! here (`AVR`, `BKP`, and the optimal `YDS`) are used as pacing references
//! by the online algorithms and as cost baselines by the harness. All
//! releases and deadlines are integral, so every profile is constant within
//! each timeslot and is stored as one value per slot.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Instance, Time};

/// One speed value per timeslot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpeedProfile {
    pub speeds: Vec<f64>,
}

impl SpeedProfile {
    pub fn zeros(horizon: Time) -> Self {
        SpeedProfile { speeds: vec![0.0; horizon.max(0) as usize] }
    }

    pub fn get(&self, t: Time) -> f64 {
        if t < 0 || t as usize >= self.speeds.len() {
            0.0
        } else {
            self.speeds[t as usize]
        }
    }

    pub fn cost(&self, alpha: f64) -> Result<f64> {
        if alpha <= 1.0 {
            return Err(crate::error::GridError::InvalidAlpha(alpha));
        }
        Ok(self.speeds.iter().map(|&s| s.powf(alpha)).sum())
    }
}

/// A speed-scaling job: complete `work` units within `[release, deadline)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DvsJob {
    pub id: String,
    pub release: Time,
    pub deadline: Time,
    pub work: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DvsInstance {
    pub alpha: f64,
    pub jobs: Vec<DvsJob>,
}

impl DvsInstance {
    pub fn horizon(&self) -> Time {
        self.jobs.iter().map(|j| j.deadline).max().unwrap_or(0)
    }
}

/// Which reference profile paces an online run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Avr,
    Bkp,
    Yds,
}

impl Reference {
    /// Competitive ratio of the reference on the speed-scaling problem.
    pub fn competitive_ratio(&self, alpha: f64) -> f64 {
        match self {
            Reference::Avr => (2.0 * alpha).powf(alpha) / 2.0,
            Reference::Bkp => 8.0 * std::f64::consts::E.powf(alpha),
            Reference::Yds => 1.0,
        }
    }
}

/// The selected reference profile of the instance's speed-scaling conversion.
pub fn reference_profile(instance: &Instance, reference: Reference) -> SpeedProfile {
    let dvs = to_dvs(instance);
    match reference {
        Reference::Avr => avr_profile(&dvs),
        Reference::Bkp => bkp_profile(&dvs),
        Reference::Yds => yds_profile(&dvs),
    }
}

/// Work requirement = width * height per job, window unchanged.
pub fn to_dvs(instance: &Instance) -> DvsInstance {
    DvsInstance {
        alpha: instance.alpha,
        jobs: instance
            .jobs
            .iter()
            .map(|j| DvsJob {
                id: j.id.clone(),
                release: j.release,
                deadline: j.deadline,
                work: j.width * j.height,
            })
            .collect(),
    }
}

/// Average-rate profile: each job contributes `work / span` to every slot of
/// its window. Slot-wise equal to the grid instance's average load.
pub fn avr_profile(dvs: &DvsInstance) -> SpeedProfile {
    let mut profile = SpeedProfile::zeros(dvs.horizon());
    for job in &dvs.jobs {
        let rate = job.work as f64 / (job.deadline - job.release) as f64;
        for t in job.release..job.deadline {
            profile.speeds[t as usize] += rate;
        }
    }
    profile
}

/// Speed at `t` used by [`bkp_profile`], computed from the jobs released by
/// `t` only, so the value is available online.
///
/// The speed is `max over t' > t` of `p(t, [e*t - (e-1)*t', t')) / (t' - t)`
/// where `p(t, I)` totals the work of jobs with window inside `I` released by
/// `t`. The objective only steps up when the growing interval swallows a new
/// job window, so it suffices to evaluate it at each job's entry point
/// `max(deadline, (e*t - release) / (e - 1))`.
pub fn bkp_speed_at(dvs: &DvsInstance, t: Time) -> f64 {
    bkp_speed_from_jobs(&dvs.jobs, t)
}

/// [`bkp_speed_at`] over a bare job list; jobs released after `t` are
/// ignored, so feeding only the jobs seen so far gives the same value.
pub fn bkp_speed_from_jobs(jobs: &[DvsJob], t: Time) -> f64 {
    const E: f64 = std::f64::consts::E;
    const EPS: f64 = 1e-9;
    let released: Vec<&DvsJob> = jobs.iter().filter(|j| j.release <= t).collect();
    let mut best: f64 = 0.0;
    for job in &released {
        let entry = (job.deadline as f64).max((E * t as f64 - job.release as f64) / (E - 1.0));
        if entry <= t as f64 {
            continue;
        }
        let left = E * t as f64 - (E - 1.0) * entry;
        let enclosed: i64 = released
            .iter()
            .filter(|j| j.release as f64 >= left - EPS && (j.deadline as f64) <= entry + EPS)
            .map(|j| j.work)
            .sum();
        best = best.max(enclosed as f64 / (entry - t as f64));
    }
    best
}

/// Bansal-Kimbrel-Pruhs online profile, evaluated slot by slot.
pub fn bkp_profile(dvs: &DvsInstance) -> SpeedProfile {
    let horizon = dvs.horizon();
    SpeedProfile { speeds: (0..horizon).map(|t| bkp_speed_at(dvs, t)).collect() }
}

/// Optimal preemptive speed profile, by repeatedly fixing the interval of
/// maximum enclosed-work density and collapsing it out of the timeline.
///
/// Densities are compared as exact rationals so the critical interval never
/// flips on rounding. Boundaries stay integral throughout, hence the result
/// is constant on unit slots by construction.
pub fn yds_profile(dvs: &DvsInstance) -> SpeedProfile {
    let horizon = dvs.horizon();
    let mut profile = SpeedProfile::zeros(horizon);
    // timeline[c] = original slot behind compressed coordinate c
    let mut timeline: Vec<Time> = (0..horizon).collect();
    let mut jobs: Vec<DvsJob> = dvs.jobs.clone();

    while !jobs.is_empty() {
        let starts: Vec<Time> = jobs.iter().map(|j| j.release).collect();
        let ends: Vec<Time> = jobs.iter().map(|j| j.deadline).collect();
        let mut best: Option<(Ratio<i128>, Time, Time)> = None;
        for &a in &starts {
            for &b in &ends {
                if a >= b {
                    continue;
                }
                let work: i64 = jobs
                    .iter()
                    .filter(|j| j.release >= a && j.deadline <= b)
                    .map(|j| j.work)
                    .sum();
                if work == 0 {
                    continue;
                }
                let density = Ratio::new(work as i128, (b - a) as i128);
                let better = match &best {
                    None => true,
                    Some((d, a0, b0)) => {
                        density > *d || (density == *d && (a, b) < (*a0, *b0))
                    }
                };
                if better {
                    best = Some((density, a, b));
                }
            }
        }
        let (density, a, b) = best.expect("nonempty job set has a critical interval");
        let speed = *density.numer() as f64 / *density.denom() as f64;
        for c in a..b {
            profile.speeds[timeline[c as usize] as usize] = speed;
        }
        // drop the processed jobs and cut [a, b) out of the timeline
        jobs.retain(|j| !(j.release >= a && j.deadline <= b));
        let cut = b - a;
        timeline.drain(a as usize..b as usize);
        for job in &mut jobs {
            job.release = shift_past_cut(job.release, a, b, cut);
            job.deadline = shift_past_cut(job.deadline, a, b, cut);
        }
    }
    profile
}

fn shift_past_cut(t: Time, a: Time, b: Time, cut: Time) -> Time {
    if t >= b {
        t - cut
    } else if t > a {
        a
    } else {
        t
    }
}

/// Total work of jobs that must be finished by `t` (deadline at or before `t`).
pub fn work_due_by(dvs: &DvsInstance, t: Time) -> i64 {
    dvs.jobs.iter().filter(|j| j.deadline <= t).map(|j| j.work).sum()
}

/// Deadline feasibility of a reference: every prefix `[0, t)` carries at
/// least the work due by `t`.
pub fn completes_all_work(dvs: &DvsInstance, profile: &SpeedProfile) -> bool {
    let mut cumulative = 0.0;
    for t in 0..=dvs.horizon() {
        if cumulative + 1e-9 < work_due_by(dvs, t) as f64 {
            return false;
        }
        cumulative += profile.get(t);
    }
    true
}
