use thiserror::Error;

use crate::model::Violation;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum GridError {
    #[error("alpha must be > 1, got {0}")]
    InvalidAlpha(f64),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("instance has no jobs")]
    EmptyInstance,

    #[error("job {0} has no assignment in the schedule")]
    UnassignedJob(String),

    #[error("job {job} assigned outside its feasible interval: start {start}")]
    InfeasibleAssignment { job: String, start: i64 },

    #[error("input outside the algorithm's class: {0}")]
    InputClassViolation(String),

    #[error("online run produced an infeasible schedule: {0:?}")]
    InfeasibleOutcome(Vec<Violation>),

    #[error("job {0} is not loose (feasible interval must exceed twice the width)")]
    NotLoose(String),

    #[error("jobs do not have agreeable deadlines: {0}")]
    NotAgreeable(String),

    #[error("job {0} has no feasible timeslot left")]
    NoFeasibleSlot(String),

    #[error("search space of {0} start tuples exceeds the brute-force cap")]
    TooLarge(f64),

    #[error("instance contains non-unit widths")]
    NotUnitWidth,

    #[error("no valid configuration survived; instance is infeasible")]
    InfeasibleInstance,

    #[error("online algorithm failed to commit job {0} before its latest start")]
    AlgorithmStalled(String),

    #[error("generator constraint cannot be satisfied: {0}")]
    UnsatisfiableConstraint(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GridError>;
