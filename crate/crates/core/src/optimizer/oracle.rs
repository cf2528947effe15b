//! Exhaustive allocation for small instances, used to bound the greedy
//! allocators from above.

use crate::error::AllocationError;
use crate::model::{clamp_tiny, JobRef, ListKind, ResourceBudget, Task, EPS};

use super::AllocationResult;

/// Largest number of joint assignments the oracle will enumerate.
pub const ORACLE_LIMIT: u128 = 1_000_000;

/// Every choice a task can take: each standard job, plus each non-base
/// alternative job when prone.
fn options(task: &Task) -> Vec<JobRef> {
    let mut out: Vec<JobRef> = (0..task.standard.len())
        .map(|i| JobRef::new(ListKind::Standard, i))
        .collect();
    if let Some(e) = &task.exposure {
        out.extend((1..e.alternative.len()).map(|i| JobRef::new(ListKind::Alternative, i)));
    }
    out
}

/// Maximum-utility assignment of one job per task under the split budget.
///
/// Prone tasks holding a non-base standard job must fit, together, inside
/// `R_ni`; everything else may use any remaining time. Those two conditions
/// are exactly what lets the draws be laid out with standard prone jobs in
/// `R_ni` and the rest filling `R_i` before spilling over. Ties keep the
/// first assignment found in lexicographic order of choices.
pub fn oracle_allocate(tasks: &[Task], budget: ResourceBudget) -> Result<AllocationResult, AllocationError> {
    for t in tasks {
        t.validate()?;
    }
    let budget = ResourceBudget::new(budget.r_i, budget.r_ni)?;
    let opts: Vec<Vec<JobRef>> = tasks.iter().map(options).collect();
    let size = opts
        .iter()
        .try_fold(1u128, |acc, o| acc.checked_mul(o.len() as u128))
        .unwrap_or(u128::MAX);
    if size > ORACLE_LIMIT {
        return Err(AllocationError::SearchSpaceTooLarge {
            size,
            limit: ORACLE_LIMIT,
        });
    }

    let total_cap = budget.total();
    let mut choice = vec![0usize; tasks.len()];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let mut utility = 0.0;
        let mut prone_standard = 0.0;
        let mut total = 0.0;
        for (i, t) in tasks.iter().enumerate() {
            let at = opts[i][choice[i]];
            let c = t.config(at).expect("option exists");
            utility += c.utility;
            total += c.resource;
            if t.is_prone() && at.list == ListKind::Standard {
                prone_standard += c.resource;
            }
        }
        let feasible = prone_standard <= budget.r_ni + EPS && total <= total_cap + EPS;
        if feasible && best.as_ref().is_none_or(|(u, _)| utility > *u) {
            best = Some((utility, choice.clone()));
        }
        // Advance the odometer.
        let mut k = 0;
        while k < choice.len() {
            choice[k] += 1;
            if choice[k] < opts[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
        if k == choice.len() {
            break;
        }
    }

    let chosen = best.map(|(_, c)| c).unwrap_or_else(|| vec![0; tasks.len()]);
    let mut res = AllocationResult::empty(tasks.len(), budget, true);
    // Prone standard jobs go to R_ni first, then the rest fills R_i and spills.
    for (i, t) in tasks.iter().enumerate() {
        let at = opts[i][chosen[i]];
        let r = t.config(at).expect("option exists").resource;
        let state = &mut res.states[i];
        state.held = at;
        state.active_list = at.list;
        if t.is_prone() && at.list == ListKind::Standard && at.index > 0 {
            state.draw_ni = r;
            state.flag_non_interfered = true;
            res.remaining.r_ni = clamp_tiny(res.remaining.r_ni - r).max(0.0);
        }
    }
    for (i, t) in tasks.iter().enumerate() {
        let state = &mut res.states[i];
        if state.flag_non_interfered {
            continue;
        }
        let r = t.config(state.held).expect("option exists").resource;
        let take_i = r.min(res.remaining.r_i);
        state.draw_i = take_i;
        state.draw_ni = r - take_i;
        res.remaining.r_i = clamp_tiny(res.remaining.r_i - take_i);
        res.remaining.r_ni = clamp_tiny(res.remaining.r_ni - state.draw_ni).max(0.0);
    }
    res.recompute_utility(tasks);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::three_task_example;
    use crate::model::JobList;

    #[test]
    fn worked_example_optimum() {
        let tasks = three_task_example();
        let res = oracle_allocate(&tasks, ResourceBudget::new(0.6, 0.4).unwrap()).unwrap();
        assert!((res.total_utility - 2.1).abs() < 1e-12);
        res.check_invariants(&tasks).unwrap();
    }

    #[test]
    fn all_alternative_variant() {
        // Standard lists removed: prone tasks only have their mitigated jobs.
        let tasks: Vec<Task> = three_task_example()
            .into_iter()
            .map(|t| match &t.exposure {
                Some(e) => Task::new(t.id.0, e.alternative.clone()),
                None => t,
            })
            .collect();
        let res = oracle_allocate(&tasks, ResourceBudget::new(0.6, 0.4).unwrap()).unwrap();
        assert!((res.total_utility - 1.8).abs() < 1e-12);
    }

    #[test]
    fn empty_task_set() {
        let res = oracle_allocate(&[], ResourceBudget::new(0.5, 0.5).unwrap()).unwrap();
        assert_eq!(res.total_utility, 0.0);
        assert_eq!(res.remaining, ResourceBudget::new(0.5, 0.5).unwrap());
    }

    #[test]
    fn refuses_large_search_space() {
        let rows: Vec<(String, f64, f64)> = (1..=9)
            .map(|k| (format!("j{k}"), 0.01 * k as f64, (k as f64).sqrt()))
            .collect();
        let rows: Vec<(&str, f64, f64)> = rows.iter().map(|(l, r, u)| (l.as_str(), *r, *u)).collect();
        let list = JobList::from_rows(&rows).unwrap();
        let tasks: Vec<Task> = (0..7).map(|i| Task::new(i, list.clone())).collect();
        assert!(matches!(
            oracle_allocate(&tasks, ResourceBudget::new(0.5, 0.5).unwrap()),
            Err(AllocationError::SearchSpaceTooLarge { .. })
        ));
    }
}
