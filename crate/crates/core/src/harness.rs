//! Seeded instance generation, batch runs against exact optima, and
//! bound-violation reporting.
//!
//! Instances of a batch are evaluated independently; with the `parallel`
//! feature they fan out over a rayon pool and are merged back in instance
//! order, so reports are byte-identical either way.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dvs::Reference;
use crate::error::{GridError, Result};
use crate::exact;
use crate::model::{cost, load_profile, Instance, Job, Time};
use crate::online::{self, Algorithm, FitRule};

/// Input-class constraint a generated batch satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassConstraint {
    Any,
    UnitWidth,
    UniformWidth,
    /// unit width and one common height
    UnitUniform,
    /// agreeable deadlines and one common height
    Agreeable,
    /// common release time and one common height
    SameRelease,
    /// common deadline and one common height
    SameDeadline,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub count: usize,
    /// jobs per instance
    pub jobs: usize,
    pub tau: Time,
    /// inclusive width range
    pub width: (i64, i64),
    /// inclusive height range
    pub height: (i64, i64),
    pub alpha: f64,
    pub class: ClassConstraint,
}

impl GeneratorSpec {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Deterministic batch of instances under the spec's constraint.
pub fn generate(spec: &GeneratorSpec) -> Result<Vec<Instance>> {
    if spec.jobs == 0 || spec.width.0 < 1 || spec.width.0 > spec.width.1 {
        return Err(GridError::UnsatisfiableConstraint("empty width range or no jobs".into()));
    }
    if spec.height.0 < 1 || spec.height.0 > spec.height.1 {
        return Err(GridError::UnsatisfiableConstraint("empty height range".into()));
    }
    let max_width = match spec.class {
        ClassConstraint::UnitWidth | ClassConstraint::UnitUniform => 1,
        _ => spec.width.1,
    };
    if max_width > spec.tau {
        return Err(GridError::UnsatisfiableConstraint(format!(
            "width {} cannot fit horizon {}",
            max_width, spec.tau
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.count).map(|_| generate_one(spec, &mut rng)).collect()
}

fn generate_one(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<Instance> {
    let n = spec.jobs;
    let uniform_height = !matches!(spec.class, ClassConstraint::Any | ClassConstraint::UnitWidth | ClassConstraint::UniformWidth);
    let shared_height = rng.gen_range(spec.height.0..=spec.height.1);
    let shared_width = rng.gen_range(spec.width.0..=spec.width.1.min(spec.tau));

    let mut jobs = Vec::with_capacity(n);
    match spec.class {
        ClassConstraint::Agreeable => {
            // releases sorted, deadlines forced non-decreasing
            let widths: Vec<i64> = (0..n).map(|_| draw_width(spec, rng, shared_width)).collect();
            let wmax = *widths.iter().max().unwrap();
            let mut releases: Vec<Time> =
                (0..n).map(|_| rng.gen_range(0..=spec.tau - wmax)).collect();
            releases.sort();
            let mut last_deadline = 0;
            for (i, (&w, &r)) in widths.iter().zip(&releases).enumerate() {
                let span = rng.gen_range(w..=spec.tau - r);
                let deadline = (r + span).max(last_deadline);
                last_deadline = deadline;
                jobs.push(Job::new(format!("j{i}"), r, deadline, w, shared_height));
            }
        }
        ClassConstraint::SameRelease => {
            for i in 0..n {
                let w = draw_width(spec, rng, shared_width);
                let span = rng.gen_range(w..=spec.tau);
                jobs.push(Job::new(format!("j{i}"), 0, span, w, shared_height));
            }
        }
        ClassConstraint::SameDeadline => {
            for i in 0..n {
                let w = draw_width(spec, rng, shared_width);
                let span = rng.gen_range(w..=spec.tau);
                jobs.push(Job::new(format!("j{i}"), spec.tau - span, spec.tau, w, shared_height));
            }
        }
        _ => {
            for i in 0..n {
                let w = draw_width(spec, rng, shared_width);
                let h = if uniform_height {
                    shared_height
                } else {
                    rng.gen_range(spec.height.0..=spec.height.1)
                };
                let release = rng.gen_range(0..=spec.tau - w);
                let span = rng.gen_range(w..=spec.tau - release);
                jobs.push(Job::new(format!("j{i}"), release, release + span, w, h));
            }
        }
    }
    Instance::new(spec.alpha, jobs)
}

fn draw_width(spec: &GeneratorSpec, rng: &mut ChaCha8Rng, shared: i64) -> i64 {
    match spec.class {
        ClassConstraint::UnitWidth | ClassConstraint::UnitUniform => 1,
        ClassConstraint::UniformWidth => shared,
        _ => rng.gen_range(spec.width.0..=spec.width.1.min(spec.tau)),
    }
}

/// Exact method used as the ratio denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptMethod {
    E,
    EPlus,
    Brute,
}

pub fn optimal_cost(instance: &Instance, method: OptMethod) -> Result<f64> {
    match method {
        OptMethod::E => Ok(exact::solve_e_default(instance)?.cost),
        OptMethod::EPlus => Ok(exact::solve_eplus(instance)?.cost),
        OptMethod::Brute => Ok(exact::brute_force(instance)?.1),
    }
}

/// Proven competitive (or approximation) bound of an algorithm at `alpha`
/// on the instance's parameters. `None` when no bound applies.
pub fn competitive_bound(algorithm: Algorithm, alpha: f64, instance: &Instance) -> Option<f64> {
    let e = std::f64::consts::E;
    match algorithm {
        Algorithm::Paced(reference) => {
            Some(2f64.powf(alpha) * (reference.competitive_ratio(alpha) + 1.0))
        }
        Algorithm::UniformWidth => {
            Some(12f64.powf(alpha) * (8.0 * e.powf(alpha) + 1.0))
        }
        Algorithm::WidthClassed { .. } => {
            let wmax = instance.jobs.iter().map(|j| j.width).max()?;
            let wmin = instance.jobs.iter().map(|j| j.width).min()?;
            let classes = ceil_log2_ratio(wmax, wmin).max(1);
            Some((36.0 * classes as f64).powf(alpha) * (8.0 * e.powf(alpha) + 1.0))
        }
        Algorithm::Quota => Some((4.0 * alpha).powf(alpha) / 2.0 + 1.0),
        Algorithm::DensityQueues(FitRule::NextFit) => {
            Some((12.0 * alpha).powf(alpha) / 2.0 + 1.0)
        }
        Algorithm::DensityQueues(FitRule::FirstFit) => {
            Some((8.0 * alpha).powf(alpha) / 2.0 + 1.0)
        }
    }
}

/// Smallest `L >= 0` with `wmin * 2^L >= wmax`.
pub fn ceil_log2_ratio(wmax: i64, wmin: i64) -> u32 {
    let mut l = 0;
    let mut reach = wmin;
    while reach < wmax {
        reach *= 2;
        l += 1;
    }
    l
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub seed: u64,
    pub instance_idx: usize,
    pub algorithm: String,
    pub cost: f64,
    pub opt_cost: f64,
    pub ratio: f64,
    pub bound: Option<f64>,
    pub violated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub instances: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub aggregates: BTreeMap<String, Aggregate>,
}

impl Report {
    /// One CSV row per instance and algorithm, in instance order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,instance_idx,algorithm,cost,opt_cost,ratio,bound,violated\n");
        for row in &self.rows {
            let bound = row.bound.map(|b| b.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.seed, row.instance_idx, row.algorithm, row.cost, row.opt_cost, row.ratio,
                bound, row.violated
            ));
        }
        out
    }

    pub fn aggregate_json(&self) -> String {
        serde_json::to_string_pretty(&self.aggregates).expect("aggregates serialize")
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violated).count()
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min)
    }
}

/// Run every algorithm and the exact method over the batch; fans out across
/// instances when built with the `parallel` feature.
pub fn compare(
    instances: &[Instance],
    algorithms: &[Algorithm],
    opt: OptMethod,
    seed: u64,
) -> Result<Report> {
    let evaluated = map_instances(instances, |idx, instance| {
        evaluate_instance(idx, instance, algorithms, opt, seed)
    })?;
    Ok(build_report(evaluated))
}

/// [`compare`] pinned to sequential evaluation, for benchmarks and as the
/// fallback when the `parallel` feature is off.
pub fn compare_seq(
    instances: &[Instance],
    algorithms: &[Algorithm],
    opt: OptMethod,
    seed: u64,
) -> Result<Report> {
    let evaluated = instances
        .iter()
        .enumerate()
        .map(|(idx, instance)| evaluate_instance(idx, instance, algorithms, opt, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(build_report(evaluated))
}

#[cfg(feature = "parallel")]
fn map_instances(
    instances: &[Instance],
    eval: impl Fn(usize, &Instance) -> Result<Vec<ReportRow>> + Send + Sync,
) -> Result<Vec<Vec<ReportRow>>> {
    use rayon::prelude::*;
    instances
        .par_iter()
        .enumerate()
        .map(|(idx, instance)| eval(idx, instance))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn map_instances(
    instances: &[Instance],
    eval: impl Fn(usize, &Instance) -> Result<Vec<ReportRow>> + Send + Sync,
) -> Result<Vec<Vec<ReportRow>>> {
    instances
        .iter()
        .enumerate()
        .map(|(idx, instance)| eval(idx, instance))
        .collect()
}

fn evaluate_instance(
    idx: usize,
    instance: &Instance,
    algorithms: &[Algorithm],
    opt: OptMethod,
    seed: u64,
) -> Result<Vec<ReportRow>> {
    let opt_cost = optimal_cost(instance, opt)?;
    algorithms
        .iter()
        .map(|&algorithm| {
            let schedule = online::solve(instance, algorithm)?;
            let alg_cost = cost(&load_profile(instance, &schedule)?, instance.alpha)?;
            let ratio = if opt_cost > 0.0 { alg_cost / opt_cost } else { 1.0 };
            let bound = competitive_bound(algorithm, instance.alpha, instance);
            Ok(ReportRow {
                seed,
                instance_idx: idx,
                algorithm: algorithm.name(),
                cost: alg_cost,
                opt_cost,
                ratio,
                bound,
                violated: bound.map_or(false, |b| ratio > b + 1e-9),
            })
        })
        .collect()
}

fn build_report(evaluated: Vec<Vec<ReportRow>>) -> Report {
    let rows: Vec<ReportRow> = evaluated.into_iter().flatten().collect();
    let mut aggregates: BTreeMap<String, Aggregate> = BTreeMap::new();
    for row in &rows {
        let entry = aggregates.entry(row.algorithm.clone()).or_insert(Aggregate {
            instances: 0,
            max_ratio: 0.0,
            mean_ratio: 0.0,
            violations: 0,
        });
        entry.instances += 1;
        entry.max_ratio = entry.max_ratio.max(row.ratio);
        entry.mean_ratio += row.ratio;
        entry.violations += row.violated as usize;
    }
    for aggregate in aggregates.values_mut() {
        if aggregate.instances > 0 {
            aggregate.mean_ratio /= aggregate.instances as f64;
        }
    }
    Report { rows, aggregates }
}

/// Algorithms whose input class the constraint satisfies.
pub fn algorithms_for(class: ClassConstraint) -> Vec<Algorithm> {
    let mut algorithms = vec![Algorithm::WidthClassed { base: 2.0 }];
    match class {
        ClassConstraint::UnitWidth => {
            algorithms.extend([
                Algorithm::Paced(Reference::Avr),
                Algorithm::Paced(Reference::Bkp),
                Algorithm::Paced(Reference::Yds),
                Algorithm::UniformWidth,
            ]);
        }
        ClassConstraint::UniformWidth => algorithms.push(Algorithm::UniformWidth),
        ClassConstraint::UnitUniform => {
            algorithms.extend([
                Algorithm::Paced(Reference::Avr),
                Algorithm::Paced(Reference::Bkp),
                Algorithm::Paced(Reference::Yds),
                Algorithm::UniformWidth,
                Algorithm::Quota,
            ]);
        }
        ClassConstraint::Agreeable => algorithms.push(Algorithm::DensityQueues(FitRule::NextFit)),
        ClassConstraint::SameRelease | ClassConstraint::SameDeadline => {
            algorithms.extend([
                Algorithm::DensityQueues(FitRule::NextFit),
                Algorithm::DensityQueues(FitRule::FirstFit),
            ]);
        }
        ClassConstraint::Any => {}
    }
    algorithms
}
