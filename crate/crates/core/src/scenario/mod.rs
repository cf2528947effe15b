//! Tracking scenarios with one interferer covering part of the field of
//! view, and the machinery to compare allocation strategies on them.
//!
//! Quality model: a track's quality grows with dwell time (more energy on
//! target) and falls as the revisit interval grows relative to the
//! target type's characteristic time `tau`:
//!
//! ```text
//! q = (1 - exp(-dwell / delta)) / (1 + (revisit / tau)^2)
//! u = weight * q
//! ```

mod generate;
mod montecarlo;
mod strategy;

pub use generate::{generate_pattern, generate_scenario};
pub use montecarlo::{monte_carlo, monte_carlo_with_workers, MonteCarloReport, RunRecord, StrategyStats, GENERATOR_ID};
pub use strategy::{evaluate_all, evaluate_strategy, realized_utility, run_strategy, StrategyOutcome};

use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
use crate::model::{InterferencePattern, Task};
use crate::scheduler::DEFAULT_CHUNK;

/// Quality of one track configuration, in `[0, 1)`.
pub fn track_quality(dwell: f64, revisit: f64, tau: f64, delta: f64) -> f64 {
    let energy = 1.0 - (-dwell / delta).exp();
    let staleness = revisit / tau;
    energy / (1.0 + staleness * staleness)
}

/// Utility of a track configuration for a target of the given type.
pub fn config_utility(dwell: f64, revisit: f64, kind: &TargetType, delta: f64) -> f64 {
    kind.weight * track_quality(dwell, revisit, kind.revisit_scale, delta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetType {
    pub name: String,
    /// Characteristic revisit time `tau` in seconds.
    pub revisit_scale: f64,
    /// Importance multiplier applied to the track quality.
    pub weight: f64,
}

impl TargetType {
    pub fn new(name: &str, revisit_scale: f64, weight: f64) -> Self {
        Self {
            name: name.to_string(),
            revisit_scale,
            weight,
        }
    }

    /// The three reference types, from slow and unimportant to agile and
    /// important.
    pub fn reference() -> Vec<Self> {
        vec![
            Self::new("slow", 2.0, 1.0),
            Self::new("medium", 1.0, 1.5),
            Self::new("agile", 0.5, 2.0),
        ]
    }
}

/// Parameters of the scenario generator. Times are in seconds, angles in
/// degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub target_count: usize,
    /// Targets are spread uniformly over `[0, azimuth_span]`.
    pub azimuth_span: f64,
    pub sector_lo: f64,
    pub sector_hi: f64,
    /// Fraction of the horizon during which the interferer is active.
    pub duty: f64,
    pub min_segment: f64,
    pub max_segment: f64,
    pub horizon: f64,
    pub chunk: f64,
    pub dwell_choices: Vec<f64>,
    /// Revisit intervals as multiples of each type's `tau`.
    pub revisit_factors: Vec<f64>,
    /// Energy time constant `delta` of the quality model.
    pub dwell_scale: f64,
    pub target_types: Vec<TargetType>,
    /// Range of the interfered standard-configuration utility multiplier.
    pub d_std_range: (f64, f64),
    /// Range of the alternative-configuration utility multiplier.
    pub d_alt_range: (f64, f64),
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            target_count: 100,
            azimuth_span: 90.0,
            sector_lo: 20.0,
            sector_hi: 70.0,
            duty: 0.7,
            min_segment: 0.050,
            max_segment: 0.200,
            horizon: 1.0,
            chunk: DEFAULT_CHUNK,
            dwell_choices: vec![0.001, 0.002, 0.004, 0.008],
            revisit_factors: vec![0.25, 0.5, 1.0, 2.0],
            dwell_scale: 0.002,
            target_types: TargetType::reference(),
            d_std_range: (0.0, 0.3),
            d_alt_range: (0.3, 0.9),
        }
    }
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        fn bad(key: &'static str, reason: impl Into<String>) -> ScenarioError {
            ScenarioError::InvalidParameter {
                key,
                reason: reason.into(),
            }
        }
        let positive = |key: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(bad(key, format!("{v} must be positive")))
            }
        };
        let unit_range = |key: &'static str, (lo, hi): (f64, f64)| {
            if (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo <= hi {
                Ok(())
            } else {
                Err(bad(key, format!("[{lo}, {hi}] must be an ordered range within [0, 1]")))
            }
        };

        if self.target_count == 0 {
            return Err(bad("target_count", "must be at least 1"));
        }
        positive("azimuth_span", self.azimuth_span)?;
        if !(0.0..=self.azimuth_span).contains(&self.sector_lo) {
            return Err(bad(
                "sector_lo",
                format!("{} must lie within [0, {}]", self.sector_lo, self.azimuth_span),
            ));
        }
        if !(self.sector_lo..=self.azimuth_span).contains(&self.sector_hi) {
            return Err(bad(
                "sector_hi",
                format!(
                    "{} must lie within [sector_lo = {}, {}]",
                    self.sector_hi, self.sector_lo, self.azimuth_span
                ),
            ));
        }
        if !(self.duty.is_finite() && (0.0..=1.0).contains(&self.duty)) {
            return Err(bad("duty", format!("{} outside [0, 1]", self.duty)));
        }
        positive("min_segment", self.min_segment)?;
        positive("max_segment", self.max_segment)?;
        if self.max_segment < self.min_segment {
            return Err(bad("max_segment", "must not be below min_segment"));
        }
        positive("horizon", self.horizon)?;
        positive("chunk", self.chunk)?;
        positive("dwell_scale", self.dwell_scale)?;
        if self.dwell_choices.is_empty() {
            return Err(bad("dwell_choices", "must not be empty"));
        }
        for &d in &self.dwell_choices {
            positive("dwell_choices", d)?;
        }
        if self.revisit_factors.is_empty() {
            return Err(bad("revisit_factors", "must not be empty"));
        }
        for &f in &self.revisit_factors {
            positive("revisit_factors", f)?;
        }
        if self.target_types.is_empty() {
            return Err(bad("target_types", "must not be empty"));
        }
        for t in &self.target_types {
            positive("target_types", t.revisit_scale)?;
            positive("target_types", t.weight)?;
        }
        unit_range("d_std_range", self.d_std_range)?;
        unit_range("d_alt_range", self.d_alt_range)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub azimuth: f64,
    pub range_km: f64,
    pub speed_mps: f64,
    /// Index into the scenario's target types.
    pub kind: usize,
}

/// One planning cycle: targets, the interferer and the resulting tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub seed: u64,
    pub targets: Vec<Target>,
    pub target_types: Vec<TargetType>,
    pub sector: (f64, f64),
    pub pattern: InterferencePattern,
    /// One tracking task per target, same order.
    pub tasks: Vec<Task>,
    pub chunk: f64,
}

impl Scenario {
    pub fn prone_count(&self) -> usize {
        self.tasks.iter().filter(|t| t.is_prone()).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    /// Interferer unknown; plain allocation, blind scheduling.
    UnawareNoMitigation,
    /// Interferer known, no mitigation: the fallback list is the standard
    /// list degraded by interference.
    AwareNoMitigation,
    /// Every prone task uses its mitigated configurations.
    StandardMitigation,
    /// Split budget with free choice between interference-free scheduling
    /// and mitigation.
    CognitiveMitigation,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::UnawareNoMitigation,
        StrategyKind::AwareNoMitigation,
        StrategyKind::StandardMitigation,
        StrategyKind::CognitiveMitigation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::UnawareNoMitigation => "unaware_no_mitigation",
            StrategyKind::AwareNoMitigation => "aware_no_mitigation",
            StrategyKind::StandardMitigation => "standard_mitigation",
            StrategyKind::CognitiveMitigation => "cognitive_mitigation",
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub strategy: StrategyKind,
    pub allocated: f64,
    pub realized: f64,
    pub baseline: f64,
    pub normalized: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quality_limits() {
        assert!(track_quality(1e-12, 1.0, 1.0, 0.002) < 1e-8);
        assert!((track_quality(1.0, 1.0, 1.0, 0.002) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn quality_reference_point() {
        // (1 - e^-2) * 1 / (1 + 0.25)
        let q = track_quality(0.004, 0.5, 1.0, 0.002);
        assert!((q - 0.691_731_773_410_709_9).abs() < 1e-12, "{q}");
    }

    #[test]
    fn default_params_valid() {
        ScenarioParams::default().validate().unwrap();
    }

    #[test]
    fn invalid_duty_names_key() {
        let p = ScenarioParams {
            duty: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            p.validate(),
            Err(ScenarioError::InvalidParameter { key: "duty", .. })
        ));
    }
}
