//! Candidate configuration enumeration and job list construction.
//!
//! Every (dwell, revisit) pair of a grid is evaluated, then the candidates are
//! trimmed to the vertices of the rising part of their upper convex hull in
//! the resource/utility plane. Along such a list marginal utility per unit of
//! resource never increases, which is what makes the greedy allocators work.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{Configuration, JobList};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigGrid {
    /// Dwell times in seconds.
    pub dwell_choices: Vec<f64>,
    /// Revisit intervals in seconds.
    pub revisit_choices: Vec<f64>,
}

impl ConfigGrid {
    pub fn new(dwell_choices: Vec<f64>, revisit_choices: Vec<f64>) -> Result<Self, ModelError> {
        let grid = Self {
            dwell_choices,
            revisit_choices,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Grid whose revisit intervals are multiples of a characteristic
    /// revisit time `tau`.
    pub fn with_revisit_factors(dwell_choices: Vec<f64>, factors: &[f64], tau: f64) -> Result<Self, ModelError> {
        Self::new(dwell_choices, factors.iter().map(|f| f * tau).collect())
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |name: &str, v: &[f64]| {
            if v.is_empty() {
                return Err(ModelError::InvalidJobList(format!("{name} choices are empty")));
            }
            if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(ModelError::InvalidJobList(format!(
                    "{name} choice {bad} is not positive"
                )));
            }
            Ok(())
        };
        check("dwell", &self.dwell_choices)?;
        check("revisit", &self.revisit_choices)
    }
}

/// Evaluates every grid point with `utility(dwell, revisit)` and returns them
/// after the base configuration. Points needing more than the whole timeline
/// (`dwell > revisit`) are dropped.
pub fn enumerate_configs<F>(grid: &ConfigGrid, utility: F) -> Vec<Configuration>
where
    F: Fn(f64, f64) -> f64,
{
    let mut out = Vec::with_capacity(1 + grid.dwell_choices.len() * grid.revisit_choices.len());
    out.push(Configuration::base());
    for &dwell in &grid.dwell_choices {
        for &revisit in &grid.revisit_choices {
            if dwell > revisit {
                continue;
            }
            let label = format!("d{}ms-r{}ms", dwell * 1e3, revisit * 1e3);
            if let Ok(c) = Configuration::from_timing(label, dwell, revisit, utility(dwell, revisit)) {
                out.push(c);
            }
        }
    }
    out
}

/// Trims candidates to the rising upper hull: sorted by resource, strictly
/// increasing utility, only hull vertices kept. The base configuration is
/// always first; one is supplied if the input lacks it.
pub fn concave_majorant(configs: &[Configuration]) -> JobList {
    let mut pts: Vec<&Configuration> = configs.iter().filter(|c| !c.is_base()).collect();
    // Within equal resource keep the highest utility.
    pts.sort_by(|a, b| a.resource.total_cmp(&b.resource).then(b.utility.total_cmp(&a.utility)));
    pts.dedup_by(|later, earlier| later.resource == earlier.resource);

    let base = configs
        .iter()
        .find(|c| c.is_base())
        .cloned()
        .unwrap_or_else(Configuration::base);
    let mut hull: Vec<Configuration> = vec![base];
    for p in pts {
        let top = hull.last().expect("hull holds base");
        // Dominated: no more utility for more resource.
        if p.utility <= top.utility {
            continue;
        }
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // b on or under the chord a -> p
            let cross = (b.resource - a.resource) * (p.utility - a.utility)
                - (b.utility - a.utility) * (p.resource - a.resource);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    JobList::new(hull).expect("hull is strictly increasing and starts at base")
}

/// Enumerates a grid and trims it to a job list in one step.
pub fn build_job_list<F>(grid: &ConfigGrid, utility: F) -> JobList
where
    F: Fn(f64, f64) -> f64,
{
    concave_majorant(&enumerate_configs(grid, utility))
}

/// Marginal utility per unit resource between consecutive jobs.
pub fn marginal_ratios(list: &JobList) -> Vec<f64> {
    list.jobs()
        .windows(2)
        .map(|w| (w[1].utility - w[0].utility) / (w[1].resource - w[0].resource))
        .collect()
}
