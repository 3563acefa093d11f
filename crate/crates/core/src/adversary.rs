//! Adversarial instance generators that interact with an online algorithm.
//!
//! The nesting adversary releases unit-height jobs of sharply decreasing
//! width, each one's window carved out of the algorithm's last committed
//! execution interval. The algorithm has to stack all of them, while an
//! offline schedule keeps them disjoint; the cost gap realises the
//! `(log(wmax/wmin) / 3)^alpha` lower bound. The greedy adversary replays
//! the k-round construction that pins greedy at ratio 3.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{GridError, Result};
use crate::model::{cost, cost_on, load_profile, validate_schedule, Instance, Job, Schedule, SlotSet, Time};
use crate::online::greedy::greedy_assign;
use crate::online::{Commitment, OnlineScheduler};
use crate::slots::{SlotInstance, SlotJob};

/// Interaction log of one adversary run.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaTranscript {
    pub alpha: f64,
    pub x: i64,
    /// jobs in release order
    pub instance: Instance,
    /// `(job, commit slot, start)` in commitment order
    pub commitments: Vec<(String, Time, Time)>,
    pub algorithm_schedule: Schedule,
    pub algorithm_cost: f64,
    /// cost restricted to the execution interval of the last job
    pub last_interval_cost: f64,
    /// `x * 3^floor(alpha)`, the offline cost guarantee
    pub opt_bound: f64,
    /// `algorithm_cost / opt_bound`
    pub ratio_vs_bound: f64,
}

/// Widths used by the adversary: `floor(alpha) + 1` jobs, the last two of
/// width `x` and `x - 1`, each earlier one `3 * next + 1`.
pub fn lambda_widths(alpha: f64, x: i64) -> Vec<i64> {
    let n = alpha.floor() as usize + 1;
    let mut widths = vec![0; n];
    widths[n - 1] = x - 1;
    widths[n - 2] = x;
    for i in (0..n.saturating_sub(2)).rev() {
        widths[i] = 3 * widths[i + 1] + 1;
    }
    widths
}

/// Run the adversary against `algorithm`. `x >= 2`; the algorithm must
/// accept unit-height jobs of arbitrary width.
pub fn lambda_adversary<S: OnlineScheduler + ?Sized>(
    algorithm: &mut S,
    alpha: f64,
    x: i64,
) -> Result<LambdaTranscript> {
    if alpha <= 1.0 {
        return Err(GridError::InvalidAlpha(alpha));
    }
    if x < 2 {
        return Err(GridError::InvalidInstance(format!("adversary needs x >= 2, got {x}")));
    }
    let widths = lambda_widths(alpha, x);
    let n = widths.len();

    let mut jobs: Vec<Job> = vec![Job::new("adv1", 0, 3 * widths[0], widths[0], 1)];
    let mut commitments: Vec<(String, Time, Time)> = Vec::new();
    let mut starts: BTreeMap<String, Time> = BTreeMap::new();
    let mut released = 0usize; // jobs handed to the algorithm
    let mut t: Time = 0;

    while commitments.len() < n {
        if released < jobs.len() && jobs[released].release == t {
            let job = jobs[released].clone();
            released += 1;
            record(algorithm.on_release(t, &job)?, t, &mut commitments, &mut starts);
        }
        record(algorithm.on_slot(t)?, t, &mut commitments, &mut starts);

        // the next job's window is carved out of the algorithm's execution
        // interval for the previous one, so release it only once committed
        if jobs.len() < n && jobs.len() == commitments.len() {
            let prev = &jobs[jobs.len() - 1];
            let start = starts[&prev.id];
            let next = Job::new(
                format!("adv{}", jobs.len() + 1),
                start + 1,
                start + prev.width,
                widths[jobs.len()],
                1,
            );
            debug_assert!(next.release > t);
            // window length is w(prev) - 1: three widths for the middle
            // jobs, exactly its own width for the final one
            if jobs.len() + 1 < n {
                debug_assert_eq!(next.span(), 3 * next.width);
            } else {
                debug_assert_eq!(next.span(), next.width);
            }
            jobs.push(next);
        }

        // stalled: the awaited job can no longer start in time
        if commitments.len() < released {
            let awaited = &jobs[commitments.len()];
            if t >= awaited.latest_start() {
                return Err(GridError::AlgorithmStalled(awaited.id.clone()));
            }
        }
        t += 1;
    }

    let instance = Instance::new(alpha, jobs)?;
    let schedule = Schedule { assignments: starts };
    let violations = validate_schedule(&instance, &schedule);
    if !violations.is_empty() {
        return Err(GridError::InfeasibleOutcome(violations));
    }
    let profile = load_profile(&instance, &schedule)?;
    let algorithm_cost = cost(&profile, alpha)?;
    let last = &instance.jobs[n - 1];
    let last_start = schedule.start(&last.id).unwrap();
    let last_slots: SlotSet = (last_start..last_start + last.width).collect();
    let last_interval_cost = cost_on(&profile, &last_slots, alpha)?;
    let opt_bound = x as f64 * 3f64.powi(alpha.floor() as i32);

    Ok(LambdaTranscript {
        alpha,
        x,
        instance,
        commitments,
        algorithm_schedule: schedule,
        algorithm_cost,
        last_interval_cost,
        opt_bound,
        ratio_vs_bound: algorithm_cost / opt_bound,
    })
}

fn record(
    commitments: Vec<Commitment>,
    t: Time,
    log: &mut Vec<(String, Time, Time)>,
    starts: &mut BTreeMap<String, Time>,
) {
    for (id, start) in commitments {
        log.push((id.clone(), t, start));
        starts.insert(id, start);
    }
}

/// Non-overlapping offline schedule for an adversary transcript.
///
/// Each job is placed on whichever side of the algorithm's execution
/// interval has room for it; everything released later lives inside that
/// execution interval, so the placements never collide. The cost equals the
/// width sum, which also lower-bounds any schedule, so this one is optimal.
pub fn lambda_opt_schedule(transcript: &LambdaTranscript) -> (Schedule, f64) {
    let jobs = &transcript.instance.jobs;
    let mut schedule = Schedule::new();
    for (i, job) in jobs.iter().enumerate() {
        let algo_start = transcript.algorithm_schedule.start(&job.id).unwrap();
        let start = if i == jobs.len() - 1 {
            job.release
        } else if algo_start - job.release >= job.width {
            job.release
        } else {
            job.deadline - job.width
        };
        schedule.assign(job.id.clone(), start);
    }
    let total_width: i64 = jobs.iter().map(|j| j.width).sum();
    (schedule, total_width as f64)
}

/// Output of the k-round greedy adversary.
#[derive(Debug, Clone, Serialize)]
pub struct GreedyAdversaryOutput {
    pub k: u32,
    pub instance: SlotInstance,
    /// `3 * 2^k - 4` at alpha = 2
    pub expected_greedy_cost: f64,
    /// `2^k`: one unit of load on each of `2^k` slots
    pub expected_opt_cost: f64,
    /// witness assignment achieving the optimal cost
    pub opt_assignment: BTreeMap<String, Time>,
}

/// Build the k-round instance by simulating greedy round by round: round 1
/// offers slots `1..=2^k`, every later round offers exactly the slots greedy
/// used in the previous round, and the final round releases two jobs.
pub fn greedy_adversary(k: u32) -> Result<GreedyAdversaryOutput> {
    if k < 2 {
        return Err(GridError::InvalidInstance(format!("greedy adversary needs k >= 2, got {k}")));
    }
    let mut loads: BTreeMap<Time, i64> = BTreeMap::new();
    let mut feasible: Vec<Time> = (1..=1i64 << k).collect();
    let mut jobs = Vec::new();
    let mut opt_assignment = BTreeMap::new();

    for round in 1..=k {
        let count = if round == k { 2 } else { 1usize << (k - round) };
        let mut used = Vec::with_capacity(count);
        for j in 0..count {
            let id = format!("r{round}-{j}");
            jobs.push(SlotJob { id: id.clone(), slots: feasible.clone() });
            let slot = feasible
                .iter()
                .copied()
                .min_by_key(|s| (loads.get(s).copied().unwrap_or(0), *s))
                .expect("feasible set is never empty");
            *loads.entry(slot).or_insert(0) += 1;
            used.push(slot);
        }
        used.sort();
        used.dedup();
        if round < k {
            // the witness takes the abandoned half; the final round's jobs
            // go onto the two slots greedy kept, untouched by the witness
            let abandoned: Vec<Time> =
                feasible.iter().copied().filter(|s| !used.contains(s)).collect();
            for (j, slot) in abandoned.into_iter().enumerate() {
                opt_assignment.insert(format!("r{round}-{j}"), slot);
            }
        } else {
            for (j, slot) in used.iter().enumerate() {
                opt_assignment.insert(format!("r{round}-{j}"), *slot);
            }
        }
        feasible = used;
    }

    let two_k = (1i64 << k) as f64;
    Ok(GreedyAdversaryOutput {
        k,
        instance: SlotInstance { alpha: 2.0, jobs },
        expected_greedy_cost: 3.0 * two_k - 4.0,
        expected_opt_cost: two_k,
        opt_assignment,
    })
}

/// Run greedy on the generated instance and report both costs.
pub fn greedy_adversary_report(k: u32) -> Result<(GreedyAdversaryOutput, f64)> {
    let output = greedy_adversary(k)?;
    let (_, greedy_cost) = greedy_assign(&output.instance)?;
    Ok((output, greedy_cost))
}
