//! Small hand-checkable instance: two prone tasks and one clean task, each
//! with a single 0.3-unit job, sharing a unit of time of which 60 % is
//! exposed to the interferer.
//!
//! The interference-aware allocator reaches utility 2.1 here, leaving
//! `(0.0, 0.1)` unused; putting both prone tasks on their mitigated jobs
//! gives 1.8, and ignoring the interferer altogether gives 2.3.

use crate::model::{InterferencePattern, Interval, JobList, ResourceBudget, Task};

/// Tasks `T1` (prone), `T2` (prone) and `T3`, in that order. Interfered
/// standard jobs are worth nothing (`d_std = 0`).
pub fn three_task_example() -> Vec<Task> {
    let prone = |id, label: &str, u: f64, u_alt: f64| {
        Task::prone_with_alternative(
            id,
            JobList::from_rows(&[(label, 0.3, u)]).expect("valid row"),
            JobList::from_rows(&[(&format!("{label}a"), 0.3, u_alt)]).expect("valid row"),
            0.0,
            2.0 / 3.0,
        )
        .expect("alternative mirrors the standard list")
    };
    vec![
        prone(1, "c1", 0.6, 0.4),
        prone(2, "c2", 0.9, 0.6),
        Task::new(3, JobList::from_rows(&[("c3", 0.3, 0.8)]).expect("valid row")),
    ]
}

/// Interferer active over the first 60 % of a one-second horizon.
pub fn three_task_pattern() -> InterferencePattern {
    InterferencePattern::new(1.0, vec![Interval::new(0.0, 0.6)]).expect("valid pattern")
}

/// `(R_i, R_ni) = (0.6, 0.4)`.
pub fn three_task_budget() -> ResourceBudget {
    ResourceBudget::new(0.6, 0.4).expect("valid budget")
}
