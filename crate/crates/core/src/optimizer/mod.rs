//! Global optimiser.
//!
//! [`classic_allocate`] is the plain greedy Q-RAM loop over a single time
//! budget. [`allocate_interference_aware`] splits time into an
//! interference-possible share `R_i` and an interference-free share `R_ni`:
//! prone tasks on their standard list may only be upgraded inside `R_ni`
//! (and are flagged so the scheduler keeps them clear of the interferer);
//! when `R_ni` runs short they move to their alternative (mitigated) list.
//! Everything else charges `R_i` first and overflows into `R_ni`.
//!
//! Both routines charge upgrades with full-refund semantics: the task's
//! current draws are returned to the budget before the new configuration's
//! whole requirement is charged.

mod oracle;

pub use oracle::{oracle_allocate, ORACLE_LIMIT};

use serde::{Deserialize, Serialize};

use crate::error::AllocationError;
use crate::model::{clamp_tiny, AllocationState, Configuration, JobRef, ListKind, ResourceBudget, Task, TaskId, EPS};

/// One accepted upgrade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Upgrade {
    pub task: TaskId,
    pub from: JobRef,
    pub to: JobRef,
    pub delta_utility: f64,
    pub delta_resource: f64,
    /// Budget left after the upgrade.
    pub remaining: ResourceBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum AllocationEvent {
    Upgrade(Upgrade),
    /// A prone task could not fit its next standard job into `R_ni` and was
    /// moved to its alternative list.
    SwitchToAlternative {
        task: TaskId,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    /// One state per task, in task order.
    pub states: Vec<AllocationState>,
    pub total_utility: f64,
    pub initial: ResourceBudget,
    pub remaining: ResourceBudget,
    pub log: Vec<AllocationEvent>,
    /// Whether the allocation knew about the interferer. Schedulers use this
    /// to decide whether placement may look at the interference pattern.
    pub interference_aware: bool,
}

impl AllocationResult {
    fn empty(n: usize, budget: ResourceBudget, interference_aware: bool) -> Self {
        Self {
            states: vec![AllocationState::default(); n],
            total_utility: 0.0,
            initial: budget,
            remaining: budget,
            log: Vec::new(),
            interference_aware,
        }
    }

    pub fn upgrades(&self) -> impl Iterator<Item = &Upgrade> {
        self.log.iter().filter_map(|e| match e {
            AllocationEvent::Upgrade(u) => Some(u),
            AllocationEvent::SwitchToAlternative { .. } => None,
        })
    }

    /// Configuration in force for the task at `index`.
    pub fn selected<'a>(&self, tasks: &'a [Task], index: usize) -> &'a Configuration {
        tasks[index]
            .config(self.states[index].held)
            .expect("state refers to an existing job")
    }

    pub(crate) fn recompute_utility(&mut self, tasks: &[Task]) {
        self.total_utility = (0..tasks.len()).map(|i| self.selected(tasks, i).utility).sum();
    }

    /// Verifies per-task state invariants, budget conservation and the
    /// utility total.
    pub fn check_invariants(&self, tasks: &[Task]) -> Result<(), String> {
        if self.states.len() != tasks.len() {
            return Err("state count differs from task count".into());
        }
        for (t, s) in tasks.iter().zip(&self.states) {
            s.check(t)?;
        }
        let drawn_i: f64 = self.states.iter().map(|s| s.draw_i).sum();
        let drawn_ni: f64 = self.states.iter().map(|s| s.draw_ni).sum();
        if (drawn_i + self.remaining.r_i - self.initial.r_i).abs() > EPS
            || (drawn_ni + self.remaining.r_ni - self.initial.r_ni).abs() > EPS
        {
            return Err(format!(
                "conservation violated: drawn ({drawn_i}, {drawn_ni}) + remaining ({}, {}) != initial ({}, {})",
                self.remaining.r_i, self.remaining.r_ni, self.initial.r_i, self.initial.r_ni
            ));
        }
        if self.remaining.r_i < -EPS || self.remaining.r_ni < -EPS {
            return Err("negative remaining budget".into());
        }
        let utility: f64 = (0..tasks.len()).map(|i| self.selected(tasks, i).utility).sum();
        if (utility - self.total_utility).abs() > EPS {
            return Err(format!("total utility {} != sum {}", self.total_utility, utility));
        }
        Ok(())
    }
}

/// The best next upgrade found by [`select_next_upgrade`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    /// Position of the task in the input slice.
    pub index: usize,
    pub task: TaskId,
    pub to: JobRef,
    pub delta_utility: f64,
    pub delta_resource: f64,
    pub ratio: f64,
}

/// Next job on the task's active list that improves on the held one.
fn next_job(task: &Task, state: &AllocationState) -> Option<JobRef> {
    let list = task.list(state.active_list)?;
    if state.held.list == state.active_list {
        let index = state.held.index + 1;
        return (index < list.len()).then_some(JobRef::new(state.active_list, index));
    }
    // Freshly switched: cheapest job that beats the held utility.
    let current = task.config(state.held)?.utility;
    list.jobs()
        .iter()
        .position(|c| c.utility > current + EPS)
        .map(|index| JobRef::new(state.active_list, index))
}

fn candidate_for(index: usize, task: &Task, state: &AllocationState) -> Option<Candidate> {
    let to = next_job(task, state)?;
    let cur = task.config(state.held)?;
    let next = task.config(to)?;
    let delta_utility = next.utility - cur.utility;
    let delta_resource = next.resource - cur.resource;
    let ratio = if delta_resource > 0.0 {
        delta_utility / delta_resource
    } else {
        f64::INFINITY
    };
    Some(Candidate {
        index,
        task: task.id,
        to,
        delta_utility,
        delta_resource,
        ratio,
    })
}

fn select_excluding(tasks: &[Task], states: &[AllocationState], blocked: &[bool]) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for (i, (task, state)) in tasks.iter().zip(states).enumerate() {
        if blocked[i] {
            continue;
        }
        let Some(c) = candidate_for(i, task, state) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some(b) => c.ratio > b.ratio || (c.ratio == b.ratio && c.task < b.task),
        };
        if better {
            best = Some(c);
        }
    }
    best
}

/// Task with the highest utility-to-resource ratio for its next upgrade;
/// ties go to the smaller task id. `None` when every active list is
/// exhausted.
pub fn select_next_upgrade(tasks: &[Task], states: &[AllocationState]) -> Option<Candidate> {
    let blocked = vec![false; tasks.len()];
    select_excluding(tasks, states, &blocked)
}

/// Which list a task is allocated on by [`classic_allocate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ListPolicy {
    #[default]
    Standard,
    /// Prone tasks use their alternative list from the start.
    AlternativeForProne,
}

fn validate_tasks(tasks: &[Task]) -> Result<(), AllocationError> {
    for t in tasks {
        t.validate()?;
    }
    Ok(())
}

/// Greedy allocation over a single time budget on the standard lists.
pub fn classic_allocate(tasks: &[Task], capacity: f64) -> Result<AllocationResult, AllocationError> {
    classic_allocate_with(tasks, capacity, ListPolicy::Standard)
}

/// Greedy allocation over a single time budget.
///
/// The budget is reported as `r_i = capacity`, `r_ni = 0`; all draws land in
/// `draw_i`. A task whose next upgrade does not fit is skipped until some
/// other upgrade succeeds.
pub fn classic_allocate_with(
    tasks: &[Task],
    capacity: f64,
    policy: ListPolicy,
) -> Result<AllocationResult, AllocationError> {
    validate_tasks(tasks)?;
    let budget = ResourceBudget::single(capacity)?;
    let mut res = AllocationResult::empty(tasks.len(), budget, false);
    if policy == ListPolicy::AlternativeForProne {
        for (t, s) in tasks.iter().zip(res.states.iter_mut()) {
            if t.is_prone() {
                s.active_list = ListKind::Alternative;
            }
        }
    }
    let mut blocked = vec![false; tasks.len()];
    while let Some(c) = select_excluding(tasks, &res.states, &blocked) {
        let state = &mut res.states[c.index];
        let r = tasks[c.index].config(c.to).expect("candidate job exists").resource;
        let available = res.remaining.r_i + state.draw_i;
        if r > available + EPS {
            blocked[c.index] = true;
            continue;
        }
        let from = state.held;
        res.remaining.r_i = clamp_tiny(available - r).max(0.0);
        state.draw_i = r;
        state.held = c.to;
        res.log.push(AllocationEvent::Upgrade(Upgrade {
            task: c.task,
            from,
            to: c.to,
            delta_utility: c.delta_utility,
            delta_resource: c.delta_resource,
            remaining: res.remaining,
        }));
        blocked.fill(false);
    }
    res.recompute_utility(tasks);
    Ok(res)
}

/// Greedy allocation over the split budget `(R_i, R_ni)`.
///
/// Each round picks the best-ratio candidate and then:
/// * non-prone tasks and tasks on their alternative list drop any
///   non-interfered flag and charge `R_i` first, overflowing into `R_ni`;
///   if the two together cannot hold the job the task is skipped;
/// * prone tasks on their standard list are upgraded inside `R_ni` and
///   flagged non-interfered if it has room, otherwise they switch to their
///   alternative list and the round is repeated.
///
/// The loop ends when no task has an upgrade that fits.
pub fn allocate_interference_aware(
    tasks: &[Task],
    budget: ResourceBudget,
) -> Result<AllocationResult, AllocationError> {
    validate_tasks(tasks)?;
    let budget = ResourceBudget::new(budget.r_i, budget.r_ni)?;
    let mut res = AllocationResult::empty(tasks.len(), budget, true);
    let mut blocked = vec![false; tasks.len()];

    while let Some(c) = select_excluding(tasks, &res.states, &blocked) {
        let task = &tasks[c.index];
        let state = &mut res.states[c.index];
        let r = task.config(c.to).expect("candidate job exists").resource;
        let from = state.held;
        // Budget as if the task's current draws were handed back.
        let avail_i = res.remaining.r_i + state.draw_i;
        let avail_ni = res.remaining.r_ni + state.draw_ni;

        if task.is_prone() && state.active_list == ListKind::Standard {
            if avail_ni + EPS < r {
                state.active_list = ListKind::Alternative;
                res.log.push(AllocationEvent::SwitchToAlternative { task: task.id });
                continue;
            }
            res.remaining.r_i = clamp_tiny(avail_i);
            res.remaining.r_ni = clamp_tiny(avail_ni - r).max(0.0);
            state.draw_i = 0.0;
            state.draw_ni = r;
            state.flag_non_interfered = true;
        } else {
            if r > avail_i + avail_ni + EPS {
                blocked[c.index] = true;
                continue;
            }
            let take_i = r.min(avail_i);
            let take_ni = (r - take_i).min(avail_ni);
            res.remaining.r_i = clamp_tiny(avail_i - take_i);
            res.remaining.r_ni = clamp_tiny(avail_ni - take_ni).max(0.0);
            state.draw_i = take_i;
            state.draw_ni = r - take_i;
            state.flag_non_interfered = false;
        }
        state.held = c.to;
        res.log.push(AllocationEvent::Upgrade(Upgrade {
            task: c.task,
            from,
            to: c.to,
            delta_utility: c.delta_utility,
            delta_resource: c.delta_resource,
            remaining: res.remaining,
        }));
        blocked.fill(false);
    }
    res.recompute_utility(tasks);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::three_task_example;
    use crate::model::JobList;

    /// The three-task instance with one interferer covering 60 % of the time.
    #[test]
    fn worked_example_trace() {
        let tasks = three_task_example();
        let res = allocate_interference_aware(&tasks, ResourceBudget::new(0.6, 0.4).unwrap()).unwrap();
        let order: Vec<String> = res
            .log
            .iter()
            .map(|e| match e {
                AllocationEvent::Upgrade(u) => format!("{}->{}", u.task, u.to),
                AllocationEvent::SwitchToAlternative { task } => format!("{task} switch"),
            })
            .collect();
        assert_eq!(order, ["T2->std[1]", "T3->std[1]", "T1 switch", "T1->alt[1]"]);
        assert!((res.total_utility - 2.1).abs() < 1e-12);
        assert!(res.remaining.r_i.abs() < 1e-9);
        assert!((res.remaining.r_ni - 0.1).abs() < 1e-9);
        assert!(res.states[1].flag_non_interfered);
        assert_eq!(res.states[0].held, JobRef::new(ListKind::Alternative, 1));
        assert!(!res.states[0].flag_non_interfered);
        assert!((res.states[2].draw_i - 0.3).abs() < 1e-12);
        res.check_invariants(&tasks).unwrap();
    }

    #[test]
    fn classic_ignores_interference() {
        let tasks = three_task_example();
        let res = classic_allocate(&tasks, 1.0).unwrap();
        assert!((res.total_utility - 2.3).abs() < 1e-12);
        assert!((res.remaining.total() - 0.1).abs() < 1e-9);
        res.check_invariants(&tasks).unwrap();
    }

    #[test]
    fn classic_all_alternative_counterfactual() {
        let tasks = three_task_example();
        let res = classic_allocate_with(&tasks, 1.0, ListPolicy::AlternativeForProne).unwrap();
        assert!((res.total_utility - 1.8).abs() < 1e-12);
        res.check_invariants(&tasks).unwrap();
    }

    #[test]
    fn classic_edge_cases() {
        let res = classic_allocate(&[], 0.7).unwrap();
        assert_eq!(res.total_utility, 0.0);
        assert_eq!(res.remaining.total(), 0.7);
        let res = classic_allocate(&three_task_example(), 0.0).unwrap();
        assert_eq!(res.total_utility, 0.0);
        assert!(res.states.iter().all(|s| s.held == JobRef::BASE));
    }

    #[test]
    fn overflow_into_interference_free_share() {
        let tasks = vec![Task::new(1, JobList::from_rows(&[("a", 0.5, 1.0)]).unwrap())];
        let res = allocate_interference_aware(&tasks, ResourceBudget::new(0.3, 0.3).unwrap()).unwrap();
        assert!((res.states[0].draw_i - 0.3).abs() < 1e-12);
        assert!((res.states[0].draw_ni - 0.2).abs() < 1e-12);
        assert!(res.remaining.r_i.abs() < 1e-12);
        assert!((res.remaining.r_ni - 0.1).abs() < 1e-9);
    }

    #[test]
    fn infeasible_non_prone_is_skipped_not_fatal() {
        let tasks = vec![
            Task::new(1, JobList::from_rows(&[("big", 0.9, 9.0)]).unwrap()),
            Task::new(2, JobList::from_rows(&[("small", 0.2, 0.1)]).unwrap()),
        ];
        let res = allocate_interference_aware(&tasks, ResourceBudget::new(0.3, 0.2).unwrap()).unwrap();
        assert_eq!(res.states[0].held, JobRef::BASE);
        assert_eq!(res.states[1].held.index, 1);
    }

    #[test]
    fn select_examples() {
        let tasks = three_task_example();
        let states = vec![AllocationState::default(); 3];
        let c = select_next_upgrade(&tasks, &states).unwrap();
        assert_eq!(c.task, TaskId(2));
        assert!((c.ratio - 3.0).abs() < 1e-12);

        let exhausted: Vec<_> = states
            .iter()
            .map(|s| AllocationState {
                held: JobRef::new(ListKind::Standard, 1),
                ..*s
            })
            .collect();
        assert!(select_next_upgrade(&tasks, &exhausted).is_none());

        let same = JobList::from_rows(&[("x", 0.2, 0.4)]).unwrap();
        let tied = vec![Task::new(7, same.clone()), Task::new(4, same)];
        let c = select_next_upgrade(&tied, &[AllocationState::default(); 2]).unwrap();
        assert_eq!(c.task, TaskId(4));
    }

    #[test]
    fn switched_task_without_better_alternative_stays_put() {
        // Alternative utilities never beat the held standard job.
        let std = JobList::from_rows(&[("a", 0.2, 1.0), ("b", 0.5, 1.2)]).unwrap();
        let t = Task::prone(1, std, 0.0, 0.5).unwrap();
        let res =
            allocate_interference_aware(std::slice::from_ref(&t), ResourceBudget::new(0.6, 0.3).unwrap()).unwrap();
        assert_eq!(res.states[0].held, JobRef::new(ListKind::Standard, 1));
        assert!(res.states[0].flag_non_interfered);
        assert_eq!(res.states[0].active_list, ListKind::Alternative);
        res.check_invariants(&[t]).unwrap();
    }

    #[test]
    fn flag_removed_on_alternative_upgrade() {
        let std = JobList::from_rows(&[("a", 0.1, 1.0), ("b", 0.6, 2.0)]).unwrap();
        let t = Task::prone(1, std, 0.0, 0.9).unwrap();
        let res =
            allocate_interference_aware(std::slice::from_ref(&t), ResourceBudget::new(0.7, 0.3).unwrap()).unwrap();
        let st = res.states[0];
        assert_eq!(st.held, JobRef::new(ListKind::Alternative, 2));
        assert!(!st.flag_non_interfered);
        // 0.6 charged to R_i after the 0.1 in R_ni was refunded.
        assert!((st.draw_i - 0.6).abs() < 1e-12 && st.draw_ni.abs() < 1e-12);
        assert!((res.remaining.r_ni - 0.3).abs() < 1e-12);
        res.check_invariants(&[t]).unwrap();
    }

    #[test]
    fn negative_budget_rejected() {
        let bad = ResourceBudget { r_i: -0.1, r_ni: 0.5 };
        assert!(allocate_interference_aware(&three_task_example(), bad).is_err());
    }

    #[test]
    fn deterministic_log() {
        let tasks = three_task_example();
        let b = ResourceBudget::new(0.6, 0.4).unwrap();
        assert_eq!(
            allocate_interference_aware(&tasks, b).unwrap(),
            allocate_interference_aware(&tasks, b).unwrap()
        );
    }
}
