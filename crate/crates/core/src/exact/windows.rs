//! Window decompositions of the timeline for the table-based exact solvers.
//!
//! Feasible intervals form an interval graph whose maximal cliques admit a
//! consecutive left-to-right arrangement. Window boundaries derived from
//! that arrangement partition the horizon so that the jobs touching any one
//! window pairwise overlap, which bounds the per-stage table width by the
//! maximum number of overlapping feasible intervals.

use std::collections::BTreeSet;

use crate::error::{GridError, Result};
use crate::model::{Instance, Time};

#[derive(Debug, Clone)]
pub struct WindowDecomposition {
    /// `k + 1` strictly increasing boundaries; window `i` is
    /// `[boundaries[i], boundaries[i+1])`.
    pub boundaries: Vec<Time>,
    /// Per window, indices of jobs whose feasible interval meets it.
    pub window_jobs: Vec<Vec<usize>>,
    /// Maximum number of feasible intervals overlapping any single slot.
    pub max_clique: usize,
}

impl WindowDecomposition {
    pub fn windows(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn window(&self, i: usize) -> (Time, Time) {
        (self.boundaries[i], self.boundaries[i + 1])
    }

    fn from_boundaries(instance: &Instance, boundaries: Vec<Time>) -> Self {
        let window_jobs = (0..boundaries.len() - 1)
            .map(|i| {
                let (lo, hi) = (boundaries[i], boundaries[i + 1]);
                instance
                    .jobs
                    .iter()
                    .enumerate()
                    .filter(|(_, j)| j.release < hi && j.deadline > lo)
                    .map(|(idx, _)| idx)
                    .collect()
            })
            .collect();
        WindowDecomposition {
            boundaries,
            window_jobs,
            max_clique: max_overlap(instance),
        }
    }
}

fn max_overlap(instance: &Instance) -> usize {
    (0..instance.horizon())
        .map(|t| instance.jobs.iter().filter(|j| j.release <= t && t < j.deadline).count())
        .max()
        .unwrap_or(0)
}

/// Maximal cliques of the interval graph in sweep order; boundary `i` is the
/// earliest release among jobs first appearing in clique `i`, and the last
/// boundary is the latest deadline.
pub fn clique_windows(instance: &Instance) -> Result<WindowDecomposition> {
    if instance.jobs.is_empty() {
        return Err(GridError::EmptyInstance);
    }
    let horizon = instance.horizon();
    let active: Vec<BTreeSet<usize>> = (0..horizon)
        .map(|t| {
            instance
                .jobs
                .iter()
                .enumerate()
                .filter(|(_, j)| j.release <= t && t < j.deadline)
                .map(|(idx, _)| idx)
                .collect()
        })
        .collect();

    // a slot's active set is a maximal clique iff no other slot's active set
    // properly contains it
    let mut cliques: Vec<BTreeSet<usize>> = Vec::new();
    for (t, set) in active.iter().enumerate() {
        if set.is_empty() {
            continue;
        }
        let maximal = !active
            .iter()
            .enumerate()
            .any(|(u, other)| u != t && other.len() > set.len() && set.is_subset(other));
        if maximal && cliques.last() != Some(set) {
            cliques.push(set.clone());
        }
    }

    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut boundaries = Vec::with_capacity(cliques.len() + 1);
    for clique in &cliques {
        let first_release = clique
            .iter()
            .filter(|idx| !seen.contains(idx))
            .map(|&idx| instance.jobs[idx].release)
            .min()
            .expect("consecutive clique arrangement always introduces a new job");
        boundaries.push(first_release);
        seen.extend(clique.iter().copied());
    }
    boundaries.push(horizon);
    debug_assert_eq!(boundaries[0], instance.jobs.iter().map(|j| j.release).min().unwrap());
    debug_assert!(boundaries.windows(2).all(|w| w[0] < w[1]));

    Ok(WindowDecomposition::from_boundaries(instance, boundaries))
}

/// Boundaries at every distinct release and deadline; no event falls inside
/// a window, so any job touching a window spans it completely.
pub fn event_windows(instance: &Instance) -> Result<WindowDecomposition> {
    if instance.jobs.is_empty() {
        return Err(GridError::EmptyInstance);
    }
    let boundaries: Vec<Time> = instance
        .jobs
        .iter()
        .flat_map(|j| [j.release, j.deadline])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    Ok(WindowDecomposition::from_boundaries(instance, boundaries))
}

/// Fixed-length windows of two slots from `0` to the horizon padded even,
/// used by the unit-width solver.
pub fn fixed_windows(instance: &Instance) -> Result<WindowDecomposition> {
    if instance.jobs.is_empty() {
        return Err(GridError::EmptyInstance);
    }
    let horizon = instance.horizon();
    let padded = horizon + horizon % 2;
    let boundaries: Vec<Time> = (0..=padded / 2).map(|i| 2 * i).collect();
    Ok(WindowDecomposition::from_boundaries(instance, boundaries))
}
