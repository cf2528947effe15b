//! Quality-of-service radar resource management with interference-aware
//! virtual time budgets.
//!
//! Tasks carry a standard job list and, when prone to a known interferer,
//! an alternative (mitigated) job list. The interference-aware allocator
//! splits radar time into interference-possible and interference-free
//! shares, flags prone tasks that fit in the free share so the scheduler
//! keeps them clear of the interferer, and moves the rest to mitigated
//! configurations.
//!
//! ```
//! use qram_core::{allocate_interference_aware, JobList, ResourceBudget, Task};
//!
//! let tasks = vec![
//!     Task::prone(1, JobList::from_rows(&[("c1", 0.3, 0.6)]).unwrap(), 0.1, 2.0 / 3.0).unwrap(),
//!     Task::prone(2, JobList::from_rows(&[("c2", 0.3, 0.9)]).unwrap(), 0.1, 2.0 / 3.0).unwrap(),
//!     Task::new(3, JobList::from_rows(&[("c3", 0.3, 0.8)]).unwrap()),
//! ];
//! let res = allocate_interference_aware(&tasks, ResourceBudget::new(0.6, 0.4).unwrap()).unwrap();
//! assert!((res.total_utility - 2.1).abs() < 1e-9);
//! ```

pub mod error;
pub mod example;
pub mod joblist;
pub mod model;
pub mod optimizer;
pub mod scenario;
pub mod scheduler;

pub use error::{AllocationError, ModelError, ScenarioError};
pub use joblist::{build_job_list, concave_majorant, enumerate_configs, marginal_ratios, ConfigGrid};
pub use model::{
    partition_budget, AllocationState, Configuration, Exposure, InterferencePattern, Interval, JobList, JobRef,
    ListKind, ResourceBudget, Task, TaskId, EPS,
};
pub use optimizer::{
    allocate_interference_aware, classic_allocate, classic_allocate_with, oracle_allocate, select_next_upgrade,
    AllocationEvent, AllocationResult, Candidate, ListPolicy, Upgrade, ORACLE_LIMIT,
};
pub use scenario::{
    config_utility, evaluate_all, evaluate_strategy, generate_scenario, monte_carlo, monte_carlo_with_workers,
    run_strategy, MonteCarloReport, RunRecord, RunResult, Scenario, ScenarioParams, StrategyKind, StrategyOutcome,
    StrategyStats, TargetType, GENERATOR_ID,
};
pub use scheduler::{build_schedule, overlap_report, Dwell, DwellClass, Schedule, Unplaced, DEFAULT_CHUNK};
