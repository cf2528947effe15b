//! Experiment configuration file.
//!
//! A flat JSON object. Every key has a default, so `{}` is the reference
//! experiment; unknown keys are rejected to catch typos. Times carry their
//! unit in the key name.

use std::path::Path;

use qram_core::{ScenarioError, ScenarioParams, TargetType};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// One entry of the target type table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetTypeEntry {
    pub name: String,
    /// Revisit interval at which track quality has dropped by half.
    pub tau_s: f64,
    /// Importance multiplier on utility.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub target_count: usize,
    pub azimuth_span_deg: f64,
    pub sector_lo_deg: f64,
    pub sector_hi_deg: f64,
    /// Fraction of the horizon during which the interferer is active.
    pub duty: f64,
    pub min_segment_ms: f64,
    pub max_segment_ms: f64,
    pub horizon_s: f64,
    /// Longest piece a dwell is split into when scheduling.
    pub chunk_s: f64,
    pub dwell_choices_ms: Vec<f64>,
    /// Revisit choices as multiples of each type's `tau_s`.
    pub revisit_factors: Vec<f64>,
    /// Dwell length at which detection quality reaches `1 - 1/e`.
    pub dwell_scale_ms: f64,
    pub target_types: Vec<TargetTypeEntry>,
    pub d_std_range: [f64; 2],
    pub d_alt_range: [f64; 2],
    pub n_runs: usize,
    pub base_seed: u64,
    /// Monte-Carlo threads; `null` uses one per core.
    pub workers: Option<usize>,
    pub runs_csv: String,
    pub summary_csv: String,
    pub metadata_json: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::from_params(&ScenarioParams::default())
    }
}

/// A configuration problem, tied to the key that caused it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {reason}")]
    Read { path: String, reason: String },
    #[error("config key `{key}`: {reason}")]
    Key { key: String, reason: String },
    #[error("config: {0}")]
    Syntax(String),
}

impl ConfigError {
    fn key(key: &str, reason: impl Into<String>) -> Self {
        ConfigError::Key {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}

/// Config key for a generator parameter name.
fn config_key(param: &str) -> &str {
    match param {
        "azimuth_span" => "azimuth_span_deg",
        "sector_lo" => "sector_lo_deg",
        "sector_hi" => "sector_hi_deg",
        "min_segment" => "min_segment_ms",
        "max_segment" => "max_segment_ms",
        "horizon" => "horizon_s",
        "chunk" => "chunk_s",
        "dwell_choices" => "dwell_choices_ms",
        "dwell_scale" => "dwell_scale_ms",
        other => other,
    }
}

impl ExperimentConfig {
    fn from_params(p: &ScenarioParams) -> Self {
        Self {
            target_count: p.target_count,
            azimuth_span_deg: p.azimuth_span,
            sector_lo_deg: p.sector_lo,
            sector_hi_deg: p.sector_hi,
            duty: p.duty,
            min_segment_ms: p.min_segment * 1e3,
            max_segment_ms: p.max_segment * 1e3,
            horizon_s: p.horizon,
            chunk_s: p.chunk,
            dwell_choices_ms: p.dwell_choices.iter().map(|d| d * 1e3).collect(),
            revisit_factors: p.revisit_factors.clone(),
            dwell_scale_ms: p.dwell_scale * 1e3,
            target_types: p
                .target_types
                .iter()
                .map(|t| TargetTypeEntry {
                    name: t.name.clone(),
                    tau_s: t.revisit_scale,
                    weight: t.weight,
                })
                .collect(),
            d_std_range: [p.d_std_range.0, p.d_std_range.1],
            d_alt_range: [p.d_alt_range.0, p.d_alt_range.1],
            n_runs: 100,
            base_seed: 1,
            workers: None,
            runs_csv: "runs.csv".into(),
            summary_csv: "summary.csv".into(),
            metadata_json: "metadata.json".into(),
        }
    }

    /// Parses JSON text. Errors name the offending key.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path.is_empty() || path == "." {
                ConfigError::Syntax(inner.to_string())
            } else {
                ConfigError::Key {
                    key: path,
                    reason: inner.to_string(),
                }
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// Pretty JSON with every key spelled out.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact canonical serialization, as hex.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    pub fn scenario_params(&self) -> ScenarioParams {
        ScenarioParams {
            target_count: self.target_count,
            azimuth_span: self.azimuth_span_deg,
            sector_lo: self.sector_lo_deg,
            sector_hi: self.sector_hi_deg,
            duty: self.duty,
            min_segment: self.min_segment_ms / 1e3,
            max_segment: self.max_segment_ms / 1e3,
            horizon: self.horizon_s,
            chunk: self.chunk_s,
            dwell_choices: self.dwell_choices_ms.iter().map(|d| d / 1e3).collect(),
            revisit_factors: self.revisit_factors.clone(),
            dwell_scale: self.dwell_scale_ms / 1e3,
            target_types: self
                .target_types
                .iter()
                .map(|t| TargetType::new(&t.name, t.tau_s, t.weight))
                .collect(),
            d_std_range: (self.d_std_range[0], self.d_std_range[1]),
            d_alt_range: (self.d_alt_range[0], self.d_alt_range[1]),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario_params().validate().map_err(|e| match e {
            ScenarioError::InvalidParameter { key, reason } => ConfigError::key(config_key(key), reason),
            other => ConfigError::Syntax(other.to_string()),
        })?;
        if self.n_runs == 0 {
            return Err(ConfigError::key("n_runs", "must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(ConfigError::key("workers", "must be at least 1 when given"));
        }
        for (key, name) in [
            ("runs_csv", &self.runs_csv),
            ("summary_csv", &self.summary_csv),
            ("metadata_json", &self.metadata_json),
        ] {
            if name.is_empty() || name.contains(['/', '\\']) {
                return Err(ConfigError::key(key, "must be a plain file name"));
            }
        }
        Ok(())
    }
}
