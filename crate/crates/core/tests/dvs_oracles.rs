//! Independent oracles for the reference speed profiles.
//!
//! BKP is checked against exhaustive maximisation over a dense grid of
//! candidate interval endpoints. YDS is checked against a generic convex
//! program: maximise the Lagrangian dual of `min sum s^alpha` subject to the
//! interval demand constraints (a certified lower bound by weak duality) and
//! repair the dual's primal point to feasibility (an upper bound). The
//! sandwich pins the optimum without reusing any of the YDS structure.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use gridsched_core::dvs::{
    avr_profile, bkp_profile, bkp_speed_at, completes_all_work, to_dvs, yds_profile, DvsInstance,
    SpeedProfile,
};
use gridsched_core::model::{avg_profile, Instance, Job, Time};

fn random_instance(rng: &mut StdRng, n: usize, tau: Time) -> Instance {
    let jobs = (0..n)
        .map(|i| {
            let width = rng.gen_range(1..=3.min(tau));
            let release = rng.gen_range(0..=tau - width);
            let span = rng.gen_range(width..=tau - release);
            Job::new(format!("j{i}"), release, release + span, width, rng.gen_range(1..=3))
        })
        .collect();
    Instance::new(2.0, jobs).unwrap()
}

/// p(t, [e*t - (e-1)*t', t')) / (t' - t) maximised over a dense grid of t'.
fn bkp_grid_max(dvs: &DvsInstance, t: Time, step: f64) -> f64 {
    const E: f64 = std::f64::consts::E;
    let horizon = dvs.horizon() as f64;
    let mut best: f64 = 0.0;
    let mut tp = t as f64 + step;
    while tp <= 2.0 * horizon + 2.0 {
        let left = E * t as f64 - (E - 1.0) * tp;
        let enclosed: i64 = dvs
            .jobs
            .iter()
            .filter(|j| j.release <= t && j.release as f64 >= left && (j.deadline as f64) <= tp)
            .map(|j| j.work)
            .sum();
        best = best.max(enclosed as f64 / (tp - t as f64));
        tp += step;
    }
    best
}

#[test]
fn bkp_matches_grid_oracle() {
    let mut rng = StdRng::seed_from_u64(42);
    for _ in 0..8 {
        let instance = random_instance(&mut rng, 3, 8);
        let dvs = to_dvs(&instance);
        for t in 0..dvs.horizon() {
            let speed = bkp_speed_at(&dvs, t);
            let grid = bkp_grid_max(&dvs, t, 1e-3);
            // the analytic value dominates every sampled point and the grid
            // comes arbitrarily close just past each step of p
            assert!(speed >= grid - 1e-9, "t={t}: {speed} < grid {grid}");
            assert!(speed <= grid * (1.0 + 5e-3) + 1e-9, "t={t}: {speed} far above grid {grid}");
        }
    }
}

/// One demand constraint: total work of jobs inside `[lo, hi)`.
struct IntervalDemand {
    lo: Time,
    hi: Time,
    work: f64,
}

fn demands(dvs: &DvsInstance) -> Vec<IntervalDemand> {
    let mut out = Vec::new();
    let releases: Vec<Time> = dvs.jobs.iter().map(|j| j.release).collect();
    let deadlines: Vec<Time> = dvs.jobs.iter().map(|j| j.deadline).collect();
    for &lo in &releases {
        for &hi in &deadlines {
            if lo >= hi {
                continue;
            }
            let work: i64 = dvs
                .jobs
                .iter()
                .filter(|j| j.release >= lo && j.deadline <= hi)
                .map(|j| j.work)
                .sum();
            if work > 0 {
                out.push(IntervalDemand { lo, hi, work: work as f64 });
            }
        }
    }
    out
}

/// Primal point induced by dual multipliers: `s_t = (c_t / alpha)^(1/(alpha-1))`
/// where `c_t` sums the multipliers of the constraints covering `t`.
fn dual_primal(lambda: &[f64], demands: &[IntervalDemand], alpha: f64, tau: Time) -> Vec<f64> {
    let mut c = vec![0.0; tau as usize];
    for (l, d) in lambda.iter().zip(demands) {
        for t in d.lo..d.hi {
            c[t as usize] += l;
        }
    }
    c.iter().map(|&ct| (ct / alpha).powf(1.0 / (alpha - 1.0))).collect()
}

/// Lagrangian dual value; a lower bound on the constrained optimum for any
/// nonnegative multipliers.
fn dual_value(lambda: &[f64], demands: &[IntervalDemand], alpha: f64, tau: Time) -> f64 {
    let s = dual_primal(lambda, demands, alpha, tau);
    let mut value: f64 = s.iter().map(|&st| st.powf(alpha)).sum();
    for (l, d) in lambda.iter().zip(demands) {
        let covered: f64 = s[d.lo as usize..d.hi as usize].iter().sum();
        value += l * (d.work - covered);
    }
    value
}

/// Raise the profile until every demand is met; additions never break other
/// constraints, so one repair pass plus a verification pass suffices.
fn repair(mut s: Vec<f64>, demands: &[IntervalDemand]) -> Vec<f64> {
    for _ in 0..2 {
        for d in demands {
            let covered: f64 = s[d.lo as usize..d.hi as usize].iter().sum();
            if covered < d.work {
                let add = (d.work - covered) / (d.hi - d.lo) as f64;
                for t in d.lo..d.hi {
                    s[t as usize] += add;
                }
            }
        }
    }
    s
}

/// Projected gradient ascent on the dual with backtracking on the step.
fn convex_opt_sandwich(dvs: &DvsInstance, alpha: f64) -> (f64, f64) {
    let tau = dvs.horizon();
    let demands = demands(dvs);
    let mut lambda = vec![1.0; demands.len()];
    let mut step = 0.5;
    let mut best = dual_value(&lambda, &demands, alpha, tau);
    for _ in 0..60_000 {
        let s = dual_primal(&lambda, &demands, alpha, tau);
        let mut next = lambda.clone();
        for (i, d) in demands.iter().enumerate() {
            let covered: f64 = s[d.lo as usize..d.hi as usize].iter().sum();
            next[i] = (lambda[i] + step * (d.work - covered)).max(0.0);
        }
        let value = dual_value(&next, &demands, alpha, tau);
        if value >= best {
            best = value;
            lambda = next;
        } else {
            step *= 0.7;
            if step < 1e-12 {
                break;
            }
        }
    }
    let upper_profile = repair(dual_primal(&lambda, &demands, alpha, tau), &demands);
    let upper: f64 = upper_profile.iter().map(|&st| st.powf(alpha)).sum();
    (best, upper)
}

#[test]
fn yds_is_pinned_by_the_convex_sandwich() {
    let nested = Instance::new(
        2.0,
        vec![Job::new("a", 0, 4, 4, 1), Job::new("b", 1, 2, 1, 3)],
    )
    .unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    let mut cases = vec![(nested, 2.0), (random_instance(&mut rng, 4, 8), 2.0)];
    cases.push((random_instance(&mut rng, 4, 8), 3.0));
    for (instance, alpha) in cases {
        let mut dvs = to_dvs(&instance);
        dvs.alpha = alpha;
        let yds = yds_profile(&dvs);
        let yds_cost = yds.cost(alpha).unwrap();
        let (lower, upper) = convex_opt_sandwich(&dvs, alpha);
        let scale = upper.max(1.0);
        assert!(
            upper - lower <= 1e-4 * scale,
            "oracle did not converge: [{lower}, {upper}]"
        );
        assert!(yds_cost <= upper + 1e-6 * scale, "yds {yds_cost} above upper {upper}");
        assert!(yds_cost >= lower - 1e-4 * scale, "yds {yds_cost} below lower {lower}");
    }
}

#[test]
fn yds_never_beats_any_feasible_profile() {
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..20 {
        let instance = random_instance(&mut rng, 4, 9);
        let dvs = to_dvs(&instance);
        let yds_cost = yds_profile(&dvs).cost(2.0).unwrap();
        // random feasible profiles: each job's work spread over a random
        // sub-interval of its window
        for _ in 0..20 {
            let mut speeds = vec![0.0; dvs.horizon() as usize];
            for job in &dvs.jobs {
                let lo = rng.gen_range(job.release..job.deadline);
                let hi = rng.gen_range(lo + 1..=job.deadline);
                let rate = job.work as f64 / (hi - lo) as f64;
                for t in lo..hi {
                    speeds[t as usize] += rate;
                }
            }
            let profile = SpeedProfile { speeds };
            assert!(completes_all_work(&dvs, &profile));
            assert!(yds_cost <= profile.cost(2.0).unwrap() + 1e-9);
        }
    }
}

#[test]
fn avr_equals_average_load_everywhere() {
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..20 {
        let instance = random_instance(&mut rng, 5, 10);
        let avg = avg_profile(&instance);
        let avr = avr_profile(&to_dvs(&instance));
        for t in 0..instance.horizon() {
            assert!((avg.get(t) - avr.get(t)).abs() <= 1e-12);
        }
    }
}

#[test]
fn every_reference_completes_all_work() {
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..30 {
        let instance = random_instance(&mut rng, 5, 10);
        let dvs = to_dvs(&instance);
        for profile in [avr_profile(&dvs), bkp_profile(&dvs), yds_profile(&dvs)] {
            assert!(completes_all_work(&dvs, &profile));
        }
    }
}
