//! File writers. Every writer is deterministic: no timestamps, fixed key
//! order, records sorted before they reach disk.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use qram_core::{
    AllocationEvent, AllocationResult, MonteCarloReport, ResourceBudget, RunRecord, StrategyKind, StrategyStats, Task,
    TaskId,
};
use serde::Serialize;

#[derive(Serialize)]
struct RunRow<'a> {
    run: usize,
    strategy: &'a str,
    allocated: f64,
    realized: f64,
    baseline: f64,
    normalized: f64,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    strategy: &'a str,
    mean: f64,
    std: f64,
    min: f64,
    max: f64,
}

pub fn write_runs_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| (r.run, r.strategy));
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in &sorted {
        w.serialize(RunRow {
            run: r.run,
            strategy: r.strategy.name(),
            allocated: r.allocated,
            realized: r.realized,
            baseline: r.baseline,
            normalized: r.normalized,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv(path: &Path, summary: &[StrategyStats]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for s in summary {
        w.serialize(SummaryRow {
            strategy: s.strategy.name(),
            mean: s.mean,
            std: s.std,
            min: s.min,
            max: s.max,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Per-task view of an allocation, readable without the task list.
#[derive(Serialize)]
pub struct TaskAllocation {
    pub task: TaskId,
    pub prone: bool,
    pub job: String,
    pub label: String,
    pub resource: f64,
    pub utility: f64,
    pub non_interfered: bool,
    pub draw_i: f64,
    pub draw_ni: f64,
}

#[derive(Serialize)]
pub struct AllocationDump<'a> {
    pub strategy: &'a str,
    pub interference_aware: bool,
    pub total_utility: f64,
    pub initial: ResourceBudget,
    pub remaining: ResourceBudget,
    pub tasks: Vec<TaskAllocation>,
    pub log: &'a [AllocationEvent],
}

impl<'a> AllocationDump<'a> {
    pub fn new(strategy: StrategyKind, tasks: &[Task], res: &'a AllocationResult) -> Self {
        Self {
            strategy: strategy.name(),
            interference_aware: res.interference_aware,
            total_utility: res.total_utility,
            initial: res.initial,
            remaining: res.remaining,
            tasks: tasks
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let state = &res.states[i];
                    let c = res.selected(tasks, i);
                    TaskAllocation {
                        task: t.id,
                        prone: t.is_prone(),
                        job: state.held.to_string(),
                        label: c.label.clone(),
                        resource: c.resource,
                        utility: c.utility,
                        non_interfered: state.flag_non_interfered,
                        draw_i: state.draw_i,
                        draw_ni: state.draw_ni,
                    }
                })
                .collect(),
            log: &res.log,
        }
    }
}

/// Fixed-width table of the summary statistics.
pub fn print_summary(out: &mut impl Write, report: &MonteCarloReport) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<24} {:>7} {:>7} {:>7} {:>7}",
        "strategy", "mean", "std", "min", "max"
    )?;
    for s in &report.summary {
        writeln!(
            out,
            "{:<24} {:>7.3} {:>7.3} {:>7.3} {:>7.3}",
            s.strategy.name(),
            s.mean,
            s.std,
            s.min,
            s.max
        )?;
    }
    Ok(())
}
