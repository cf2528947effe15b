//! Fixtures shared by the allocation benchmarks.

use qram_core::{enumerate_configs, generate_scenario, ConfigGrid, Configuration, Scenario, ScenarioParams};

/// Reference scenario (100 targets, 70 % duty) for a given seed.
pub fn reference_scenario(seed: u64) -> Scenario {
    generate_scenario(seed, &ScenarioParams::default()).expect("default parameters are valid")
}

/// Unfiltered configuration cloud for a dense `n × n` timing grid; input
/// for hull construction.
pub fn dense_configs(n: usize) -> Vec<Configuration> {
    let dwells: Vec<f64> = (1..=n).map(|k| 0.0005 * k as f64).collect();
    let revisits: Vec<f64> = (1..=n).map(|k| 0.05 * k as f64).collect();
    let grid = ConfigGrid::new(dwells, revisits).expect("positive grid");
    enumerate_configs(&grid, |d, r| (1.0 - (-d / 0.002).exp()) / (1.0 + r * r))
}
