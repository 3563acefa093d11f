//! Non-preemptive scheduling of power requests against a convex load cost.
//!
//! Each request occupies a fixed number of consecutive timeslots at a fixed
//! height within its feasible interval; the cost of a schedule is the sum
//! over slots of `load^alpha`. The crate provides:
//!
//! - the domain model with load, cost, density and validation ([`model`]),
//! - reference speed profiles from dynamic speed scaling ([`dvs`]),
//! - online algorithms with proven competitive ratios ([`online`]),
//! - fixed-parameter exact solvers and a brute-force oracle ([`exact`]),
//! - adversarial instance generators ([`adversary`]),
//! - a seeded sweep harness with ratio reports ([`harness`]).
//!
//! Built with the `parallel` feature (default), batch evaluation fans out
//! over rayon; without it everything runs sequentially with identical
//! results.

pub mod adversary;
pub mod dvs;
pub mod error;
pub mod exact;
pub mod harness;
pub mod model;
pub mod online;
pub mod slots;

pub use error::{GridError, Result};
pub use model::{Instance, Job, LoadProfile, Schedule, SlotSet, Time};
