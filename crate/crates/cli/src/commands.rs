use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use qram_core::example::{three_task_budget, three_task_example};
use qram_core::{
    allocate_interference_aware, classic_allocate_with, evaluate_all, generate_scenario, monte_carlo,
    monte_carlo_with_workers, AllocationEvent, JobRef, ListKind, ListPolicy, RunRecord, GENERATOR_ID,
};
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{print_summary, write_json, write_runs_csv, write_summary_csv, AllocationDump};

/// Why a subcommand did not succeed. Each variant maps to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("example mismatch:\n{0}")]
    Golden(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Golden(_) => 1,
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

/// One decimal, with negative zero and rounding noise folded away.
fn one_decimal(x: f64) -> String {
    format!("{:.1}", (x * 10.0).round() / 10.0 + 0.0)
}

/// Runs the three-task example and checks it against its known outcome.
pub fn cmd_example(out: &mut impl Write) -> Result<(), Failure> {
    let tasks = three_task_example();
    let budget = three_task_budget();
    let res = allocate_interference_aware(&tasks, budget).context("allocating the example")?;
    let traditional = classic_allocate_with(&tasks, budget.total(), ListPolicy::AlternativeForProne)
        .context("allocating the mitigated-only counterfactual")?;

    writeln!(
        out,
        "three-task example, budget (R_i, R_ni) = ({}, {})",
        one_decimal(budget.r_i),
        one_decimal(budget.r_ni)
    )?;
    writeln!(out, "upgrade log:")?;
    let mut trace = Vec::new();
    for event in &res.log {
        match event {
            AllocationEvent::Upgrade(u) => {
                writeln!(
                    out,
                    "  {} {} -> {}  utility +{}  time +{}  remaining ({}, {})",
                    u.task,
                    u.from,
                    u.to,
                    one_decimal(u.delta_utility),
                    one_decimal(u.delta_resource),
                    one_decimal(u.remaining.r_i),
                    one_decimal(u.remaining.r_ni)
                )?;
                trace.push(format!("{} -> {}", u.task, u.to));
            }
            AllocationEvent::SwitchToAlternative { task } => {
                writeln!(out, "  {task} switches to its alternative list")?;
                trace.push(format!("{task} switch"));
            }
        }
    }
    let flagged: Vec<String> = tasks
        .iter()
        .zip(&res.states)
        .filter(|(_, s)| s.flag_non_interfered)
        .map(|(t, _)| t.id.to_string())
        .collect();
    writeln!(out, "non-interfered: {}", flagged.join(", "))?;
    writeln!(out, "total utility {}", one_decimal(res.total_utility))?;
    writeln!(
        out,
        "remaining budget ({}, {})",
        one_decimal(res.remaining.r_i),
        one_decimal(res.remaining.r_ni)
    )?;
    writeln!(out, "traditional {}", one_decimal(traditional.total_utility))?;

    let mut diff = Vec::new();
    let mut expect = |what: &str, want: String, got: String| {
        if want != got {
            diff.push(format!("- {what}: {want}\n+ {what}: {got}"));
        }
    };
    expect(
        "trace",
        "T2 -> std[1], T3 -> std[1], T1 switch, T1 -> alt[1]".into(),
        trace.join(", "),
    );
    expect("non-interfered", "T2".into(), flagged.join(", "));
    expect(
        "T1 job",
        JobRef::new(ListKind::Alternative, 1).to_string(),
        res.states[0].held.to_string(),
    );
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
    let exact = |x: f64, want: f64| {
        if close(x, want) {
            format!("{want}")
        } else {
            format!("{x}")
        }
    };
    expect("total utility", "2.1".into(), exact(res.total_utility, 2.1));
    expect("remaining R_i", "0".into(), exact(res.remaining.r_i, 0.0));
    expect("remaining R_ni", "0.1".into(), exact(res.remaining.r_ni, 0.1));
    expect("traditional", "1.8".into(), exact(traditional.total_utility, 1.8));
    if diff.is_empty() {
        Ok(())
    } else {
        Err(Failure::Golden(diff.join("\n")))
    }
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    command: &'static str,
    seed: u64,
    generator: &'static str,
    config_sha256: String,
    strategies: Vec<&'static str>,
    files: Vec<String>,
    config: &'a ExperimentConfig,
}

#[derive(Serialize)]
struct MonteCarloMetadata<'a> {
    command: &'static str,
    base_seed: u64,
    n_runs: usize,
    generator: &'static str,
    config_sha256: String,
    files: Vec<String>,
    config: &'a ExperimentConfig,
}

/// One scenario, all four strategies, every artefact written to `out_dir`.
pub fn cmd_run(cfg: &ExperimentConfig, seed: u64, out_dir: &Path, out: &mut impl Write) -> Result<(), Failure> {
    cfg.validate()?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let scenario = generate_scenario(seed, &cfg.scenario_params()).context("generating the scenario")?;
    let outcomes = evaluate_all(&scenario).context("evaluating strategies")?;

    let mut files = vec!["scenario.json".to_string()];
    write_json(&out_dir.join("scenario.json"), &scenario)?;
    let mut records = Vec::new();
    for o in &outcomes {
        let name = o.run.strategy.name();
        let alloc_file = format!("allocation_{name}.json");
        let sched_file = format!("schedule_{name}.json");
        write_json(
            &out_dir.join(&alloc_file),
            &AllocationDump::new(o.run.strategy, &scenario.tasks, &o.allocation),
        )?;
        write_json(&out_dir.join(&sched_file), &o.schedule)?;
        files.extend([alloc_file, sched_file]);
        records.push(RunRecord {
            run: 0,
            seed,
            strategy: o.run.strategy,
            allocated: o.run.allocated,
            realized: o.run.realized,
            baseline: o.run.baseline,
            normalized: o.run.normalized,
        });
        writeln!(
            out,
            "{:<24} allocated {:>8.3} realized {:>8.3} normalized {:.3}",
            name, o.run.allocated, o.run.realized, o.run.normalized
        )?;
    }
    write_runs_csv(&out_dir.join(&cfg.runs_csv), &records)?;
    files.push(cfg.runs_csv.clone());
    files.push(cfg.metadata_json.clone());
    write_json(
        &out_dir.join(&cfg.metadata_json),
        &RunMetadata {
            command: "run",
            seed,
            generator: GENERATOR_ID,
            config_sha256: cfg.hash(),
            strategies: outcomes.iter().map(|o| o.run.strategy.name()).collect(),
            files,
            config: cfg,
        },
    )?;
    writeln!(
        out,
        "seed {seed}: {} targets, {} prone, duty {:.3}; outputs in {}",
        scenario.targets.len(),
        scenario.prone_count(),
        scenario.pattern.duty(),
        out_dir.display()
    )?;
    Ok(())
}

/// Monte-Carlo experiment. `workers` overrides the configured thread count;
/// the outputs do not depend on it.
pub fn cmd_montecarlo(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    workers: Option<usize>,
    out: &mut impl Write,
) -> Result<(), Failure> {
    cfg.validate()?;
    if workers == Some(0) {
        return Err(ConfigError::Key {
            key: "workers".into(),
            reason: "must be at least 1".into(),
        }
        .into());
    }
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let params = cfg.scenario_params();
    let report = match workers.or(cfg.workers) {
        Some(n) => monte_carlo_with_workers(&params, cfg.n_runs, cfg.base_seed, n),
        None => monte_carlo(&params, cfg.n_runs, cfg.base_seed),
    }
    .context("running the Monte-Carlo experiment")?;

    write_runs_csv(&out_dir.join(&cfg.runs_csv), &report.records)?;
    write_summary_csv(&out_dir.join(&cfg.summary_csv), &report.summary)?;
    write_json(
        &out_dir.join(&cfg.metadata_json),
        &MonteCarloMetadata {
            command: "montecarlo",
            base_seed: cfg.base_seed,
            n_runs: cfg.n_runs,
            generator: GENERATOR_ID,
            config_sha256: cfg.hash(),
            files: vec![cfg.runs_csv.clone(), cfg.summary_csv.clone(), cfg.metadata_json.clone()],
            config: cfg,
        },
    )?;
    writeln!(
        out,
        "{} runs from base seed {} ({GENERATOR_ID})",
        cfg.n_runs, cfg.base_seed
    )?;
    print_summary(out, &report)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_output_is_stable() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        cmd_example(&mut a).unwrap();
        cmd_example(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        for line in ["total utility 2.1", "traditional 1.8", "remaining budget (0.0, 0.1)"] {
            assert!(text.lines().any(|l| l == line), "missing {line:?} in\n{text}");
        }
    }

    #[test]
    fn failures_map_to_exit_codes() {
        assert_eq!(Failure::Golden(String::new()).exit_code(), 1);
        assert_eq!(Failure::Config(ConfigError::Syntax(String::new())).exit_code(), 2);
        assert_eq!(Failure::Runtime(anyhow::anyhow!("io")).exit_code(), 3);
    }

    #[test]
    fn rejects_zero_workers() {
        let dir = std::env::temp_dir();
        let err = cmd_montecarlo(&ExperimentConfig::default(), &dir, Some(0), &mut Vec::new()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
