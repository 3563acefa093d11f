//! Exact optimisation: window decompositions, the table dynamic programs,
//! the fixed-window unit-width solver, and an independent brute force.

mod brute;
mod table;
mod windows;

pub use brute::{brute_force, brute_force_capped, brute_force_slots, DEFAULT_CAP};
pub use table::{solve_windows, ExactOutcome, ExactStats, StartPolicy, TieBreak};
pub use windows::{clique_windows, event_windows, fixed_windows, WindowDecomposition};

use crate::error::{GridError, Result};
use crate::model::Instance;

/// Optimal schedule via maximal-clique windows with exhaustive start
/// enumeration per window.
pub fn solve_e(instance: &Instance, decomp: &WindowDecomposition) -> Result<ExactOutcome> {
    solve_windows(instance, decomp, StartPolicy::Exhaustive, TieBreak::Lexicographic)
}

/// [`solve_e`] on the instance's own clique decomposition.
pub fn solve_e_default(instance: &Instance) -> Result<ExactOutcome> {
    let decomp = clique_windows(instance)?;
    solve_e(instance, &decomp)
}

/// Optimal schedule via event-boundary windows with the packed candidate
/// set, dropping the window length from the table bound.
pub fn solve_eplus(instance: &Instance) -> Result<ExactOutcome> {
    let decomp = event_windows(instance)?;
    solve_windows(instance, &decomp, StartPolicy::Packed, TieBreak::Lexicographic)
}

/// Optimal schedule for unit-width jobs over fixed length-2 windows.
pub fn solve_unit(instance: &Instance) -> Result<ExactOutcome> {
    if instance.jobs.iter().any(|j| j.width != 1) {
        return Err(GridError::NotUnitWidth);
    }
    let decomp = fixed_windows(instance)?;
    solve_windows(instance, &decomp, StartPolicy::Exhaustive, TieBreak::Lexicographic)
}
