use thiserror::Error;

/// Errors raised when constructing or validating domain values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("configuration `{label}`: {reason}")]
    InvalidConfiguration { label: String, reason: String },
    #[error("job list: {0}")]
    InvalidJobList(String),
    #[error("task {task}: {reason}")]
    InvalidTask { task: u32, reason: String },
    #[error("budget component {name} = {value} must be finite and non-negative")]
    InvalidBudget { name: &'static str, value: f64 },
    #[error("interference pattern: {0}")]
    InvalidPattern(String),
}

/// Errors raised by the allocation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AllocationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("allocation state count {states} does not match task count {tasks}")]
    StateMismatch { states: usize, tasks: usize },
    #[error("oracle search space of {size} assignments exceeds the limit of {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },
}

/// Errors raised by scenario generation and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("scenario parameter `{key}`: {reason}")]
    InvalidParameter { key: &'static str, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
    #[error("baseline utility is zero; normalized utility is undefined")]
    ZeroBaseline,
}
