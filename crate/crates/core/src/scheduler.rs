//! Places the dwells of an allocation on the planning-horizon timeline.
//!
//! Each selected job owes `resource * horizon` seconds of radar time, emitted
//! as dwells no longer than `chunk`. Placement is first-fit in time order:
//!
//! * tasks flagged non-interfered go first and only into interference-free
//!   gaps;
//! * non-prone and alternative dwells prefer interference-present time and
//!   fall back to free gaps, so free time is kept for flagged tasks;
//! * when the allocation did not know about the interferer, every dwell is
//!   placed blind, in task order, from the start of the horizon.
//!
//! A dwell that does not fit whole is shortened to the gap it lands in, so
//! total placed time matches capacity without fragmentation loss. Time that
//! still cannot be placed is reported per task.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{AllocationState, InterferencePattern, Interval, ListKind, Task, TaskId};
use crate::optimizer::AllocationResult;

/// Default maximum dwell length in seconds.
pub const DEFAULT_CHUNK: f64 = 0.005;

/// Overlap below this many seconds is ignored.
pub const OVERLAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DwellClass {
    NonProne,
    StandardFlagged,
    Alternative,
    /// Prone task in a standard configuration scheduled without knowledge
    /// of the interferer.
    StandardUnaware,
}

impl DwellClass {
    pub fn of(task: &Task, state: &AllocationState) -> Self {
        if !task.is_prone() {
            DwellClass::NonProne
        } else if state.held.list == ListKind::Alternative {
            DwellClass::Alternative
        } else if state.flag_non_interfered {
            DwellClass::StandardFlagged
        } else {
            DwellClass::StandardUnaware
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dwell {
    pub task: TaskId,
    pub start: f64,
    pub duration: f64,
    pub class: DwellClass,
}

impl Dwell {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Unplaced {
    pub task: TaskId,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub horizon: f64,
    pub active: Vec<Interval>,
    pub dwells: Vec<Dwell>,
    pub unplaced: Vec<Unplaced>,
}

impl Schedule {
    /// Seconds placed for `task`.
    pub fn placed(&self, task: TaskId) -> f64 {
        self.dwells.iter().filter(|d| d.task == task).map(|d| d.duration).sum()
    }

    pub fn unplaced_for(&self, task: TaskId) -> f64 {
        self.unplaced.iter().filter(|u| u.task == task).map(|u| u.seconds).sum()
    }

    /// Tasks with at least one interfered dwell.
    pub fn interfered_tasks(&self, pattern: &InterferencePattern) -> BTreeSet<TaskId> {
        self.dwells
            .iter()
            .zip(overlap_report(self, pattern))
            .filter_map(|(d, hit)| hit.then_some(d.task))
            .collect()
    }
}

/// Unoccupied parts of the horizon, sorted and disjoint.
struct Timeline {
    free: Vec<Interval>,
}

impl Timeline {
    fn new(horizon: f64) -> Self {
        Self {
            free: vec![Interval::new(0.0, horizon)],
        }
    }

    /// First-fit placement of up to `owed` seconds into `region`, windows
    /// taken in the given order. Returns the placed pieces and what is left.
    fn fill(&mut self, region: &[Interval], mut owed: f64, chunk: f64) -> (Vec<(f64, f64)>, f64) {
        let mut pieces = Vec::new();
        for w in region {
            while owed > OVERLAP_TOL {
                let Some((k, start, end)) = self.free.iter().enumerate().find_map(|(k, f)| {
                    let s = f.start.max(w.start);
                    let e = f.end.min(w.end);
                    (e - s > OVERLAP_TOL).then_some((k, s, e))
                }) else {
                    break;
                };
                let d = chunk.min(owed).min(end - start);
                self.occupy(k, start, start + d);
                pieces.push((start, d));
                owed -= d;
            }
        }
        (pieces, owed.max(0.0))
    }

    fn occupy(&mut self, k: usize, start: f64, end: f64) {
        let f = self.free[k];
        let mut rest = Vec::with_capacity(2);
        if start - f.start > OVERLAP_TOL {
            rest.push(Interval::new(f.start, start));
        }
        if f.end - end > OVERLAP_TOL {
            rest.push(Interval::new(end, f.end));
        }
        self.free.splice(k..=k, rest);
    }
}

/// Lays out every selected non-base job of `result` on the timeline of
/// `pattern`.
///
/// # Panics
///
/// If `chunk` is not a positive finite number.
pub fn build_schedule(
    result: &AllocationResult,
    tasks: &[Task],
    pattern: &InterferencePattern,
    chunk: f64,
) -> Schedule {
    assert!(chunk.is_finite() && chunk > 0.0, "chunk must be positive, got {chunk}");
    let horizon = pattern.horizon();
    let whole = [Interval::new(0.0, horizon)];
    let free = pattern.free_intervals();
    let mut active_first: Vec<Interval> = pattern.active().to_vec();
    active_first.extend_from_slice(&free);

    let mut timeline = Timeline::new(horizon);
    let mut schedule = Schedule {
        horizon,
        active: pattern.active().to_vec(),
        dwells: Vec::new(),
        unplaced: Vec::new(),
    };

    let jobs: Vec<(usize, DwellClass, f64)> = tasks
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let r = result.selected(tasks, i).resource;
            (r > 0.0).then(|| (i, DwellClass::of(t, &result.states[i]), r * horizon))
        })
        .collect();

    let mut place = |i: usize, class: DwellClass, owed: f64, region: &[Interval], schedule: &mut Schedule| {
        let task = tasks[i].id;
        let (pieces, left) = timeline.fill(region, owed, chunk);
        schedule
            .dwells
            .extend(pieces.into_iter().map(|(start, duration)| Dwell {
                task,
                start,
                duration,
                class,
            }));
        if left > OVERLAP_TOL {
            schedule.unplaced.push(Unplaced { task, seconds: left });
        }
    };

    if result.interference_aware {
        for &(i, class, owed) in jobs.iter().filter(|j| j.1 == DwellClass::StandardFlagged) {
            place(i, class, owed, &free, &mut schedule);
        }
        for &(i, class, owed) in jobs.iter().filter(|j| j.1 != DwellClass::StandardFlagged) {
            let region: &[Interval] = match class {
                DwellClass::StandardUnaware => &whole,
                _ => &active_first,
            };
            place(i, class, owed, region, &mut schedule);
        }
    } else {
        for &(i, class, owed) in &jobs {
            place(i, class, owed, &whole, &mut schedule);
        }
    }
    schedule.dwells.sort_by(|a, b| a.start.total_cmp(&b.start));
    schedule
}

/// For each dwell, whether it overlaps active interference by more than
/// [`OVERLAP_TOL`] seconds.
pub fn overlap_report(schedule: &Schedule, pattern: &InterferencePattern) -> Vec<bool> {
    schedule
        .dwells
        .iter()
        .map(|d| pattern.overlap(d.start, d.end()) > OVERLAP_TOL)
        .collect()
}
