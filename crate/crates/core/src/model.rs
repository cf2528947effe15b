//! Domain types shared by the job list builder, the allocators, the scheduler
//! and the scenario generator.
//!
//! Time is the only physical resource. A configuration's compound resource is
//! the fraction of radar time it occupies (`dwell / revisit`), so every
//! resource value lives in `[0, 1]` and budgets are time shares of the
//! planning horizon.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Absolute tolerance for resource and utility comparisons.
pub const EPS: f64 = 1e-9;

/// Snaps values within [`EPS`] of zero to exactly zero.
#[inline]
pub fn clamp_tiny(x: f64) -> f64 {
    if x.abs() < EPS {
        0.0
    } else {
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub u32);

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.0)
    }
}

/// One choice of operational parameters for a task, with its evaluated
/// resource requirement and utility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub label: String,
    /// Seconds of radar time per look.
    pub dwell_time: f64,
    /// Seconds between looks.
    pub revisit_interval: f64,
    /// Fraction of radar time, `dwell_time / revisit_interval`.
    pub resource: f64,
    pub utility: f64,
}

impl Configuration {
    pub const BASE_LABEL: &'static str = "base";

    /// The non-execution configuration: no resource, no utility.
    pub fn base() -> Self {
        Self {
            label: Self::BASE_LABEL.to_string(),
            dwell_time: 0.0,
            revisit_interval: 1.0,
            resource: 0.0,
            utility: 0.0,
        }
    }

    /// Builds a configuration from dwell and revisit times; the resource is
    /// their ratio.
    pub fn from_timing(
        label: impl Into<String>,
        dwell_time: f64,
        revisit_interval: f64,
        utility: f64,
    ) -> Result<Self, ModelError> {
        let label = label.into();
        if !(dwell_time.is_finite() && dwell_time > 0.0) {
            return Err(invalid(&label, format!("dwell time {dwell_time} must be positive")));
        }
        if !(revisit_interval.is_finite() && revisit_interval > 0.0) {
            return Err(invalid(
                &label,
                format!("revisit interval {revisit_interval} must be positive"),
            ));
        }
        let c = Self {
            label,
            dwell_time,
            revisit_interval,
            resource: dwell_time / revisit_interval,
            utility,
        };
        c.validate()?;
        Ok(c)
    }

    /// Builds a configuration directly from a time share and a utility, as
    /// found in hand-written tables. Timing is expressed against a unit
    /// revisit interval.
    pub fn from_share(label: impl Into<String>, resource: f64, utility: f64) -> Result<Self, ModelError> {
        let c = Self {
            label: label.into(),
            dwell_time: resource,
            revisit_interval: 1.0,
            resource,
            utility,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn is_base(&self) -> bool {
        self.resource == 0.0 && self.utility == 0.0
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.resource.is_finite() && (0.0..=1.0).contains(&self.resource)) {
            return Err(invalid(
                &self.label,
                format!("resource {} outside [0, 1]", self.resource),
            ));
        }
        if !(self.utility.is_finite() && self.utility >= 0.0) {
            return Err(invalid(&self.label, format!("utility {} is negative", self.utility)));
        }
        if self.dwell_time < 0.0 || (self.dwell_time == 0.0 && !self.is_base()) {
            return Err(invalid(
                &self.label,
                "only the base configuration may have zero dwell".into(),
            ));
        }
        Ok(())
    }
}

fn invalid(label: &str, reason: String) -> ModelError {
    ModelError::InvalidConfiguration {
        label: label.to_string(),
        reason,
    }
}

/// Configurations ordered by strictly increasing resource and strictly
/// increasing utility, starting with the base configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Configuration>", into = "Vec<Configuration>")]
pub struct JobList(Vec<Configuration>);

impl JobList {
    pub fn new(jobs: Vec<Configuration>) -> Result<Self, ModelError> {
        let first = jobs
            .first()
            .ok_or_else(|| ModelError::InvalidJobList("empty job list".into()))?;
        if !first.is_base() {
            return Err(ModelError::InvalidJobList(format!(
                "first job `{}` is not the base configuration",
                first.label
            )));
        }
        for c in &jobs {
            c.validate()?;
        }
        for w in jobs.windows(2) {
            if !(w[1].resource > w[0].resource && w[1].utility > w[0].utility) {
                return Err(ModelError::InvalidJobList(format!(
                    "`{}` -> `{}` is not strictly increasing in resource and utility",
                    w[0].label, w[1].label
                )));
            }
        }
        Ok(Self(jobs))
    }

    /// A list holding only the base configuration.
    pub fn base_only() -> Self {
        Self(vec![Configuration::base()])
    }

    /// Builds a list from `(label, resource, utility)` rows following an
    /// implicit base configuration.
    pub fn from_rows(rows: &[(&str, f64, f64)]) -> Result<Self, ModelError> {
        let mut jobs = vec![Configuration::base()];
        for &(label, r, u) in rows {
            jobs.push(Configuration::from_share(label, r, u)?);
        }
        Self::new(jobs)
    }

    pub fn jobs(&self) -> &[Configuration] {
        &self.0
    }

    pub fn get(&self, index: usize) -> Option<&Configuration> {
        self.0.get(index)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false: a job list holds at least the base configuration.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The same list with every utility multiplied by `factor`.
    ///
    /// A zero factor collapses the list to the base configuration, since all
    /// scaled utilities would tie at zero.
    pub fn scaled(&self, factor: f64) -> Self {
        if factor <= 0.0 {
            return Self::base_only();
        }
        Self(
            self.0
                .iter()
                .map(|c| Configuration {
                    utility: c.utility * factor,
                    ..c.clone()
                })
                .collect(),
        )
    }
}

impl TryFrom<Vec<Configuration>> for JobList {
    type Error = ModelError;

    fn try_from(jobs: Vec<Configuration>) -> Result<Self, Self::Error> {
        Self::new(jobs)
    }
}

impl From<JobList> for Vec<Configuration> {
    fn from(list: JobList) -> Self {
        list.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListKind {
    Standard,
    Alternative,
}

/// Position of a configuration: which list, which index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JobRef {
    pub list: ListKind,
    pub index: usize,
}

impl JobRef {
    pub const BASE: JobRef = JobRef {
        list: ListKind::Standard,
        index: 0,
    };

    pub fn new(list: ListKind, index: usize) -> Self {
        Self { list, index }
    }
}

impl fmt::Display for JobRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.list {
            ListKind::Standard => write!(f, "std[{}]", self.index),
            ListKind::Alternative => write!(f, "alt[{}]", self.index),
        }
    }
}

/// Interference exposure of a prone task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exposure {
    /// Realized-utility multiplier of an interfered standard configuration.
    pub d_std: f64,
    /// Utility multiplier that defines the alternative configurations.
    pub d_alt: f64,
    pub alternative: JobList,
}

/// One radar function competing for time, e.g. tracking one target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    /// Importance multiplier already folded into the configuration utilities.
    pub weight: f64,
    pub standard: JobList,
    /// Present iff the task is prone to interference.
    pub exposure: Option<Exposure>,
}

impl Task {
    /// A task that is never interfered.
    pub fn new(id: u32, standard: JobList) -> Self {
        Self {
            id: TaskId(id),
            weight: 1.0,
            standard,
            exposure: None,
        }
    }

    /// A prone task whose alternative list mirrors `standard` with utilities
    /// scaled by `d_alt`.
    pub fn prone(id: u32, standard: JobList, d_std: f64, d_alt: f64) -> Result<Self, ModelError> {
        let alternative = standard.scaled(d_alt);
        Self::prone_with_alternative(id, standard, alternative, d_std, d_alt)
    }

    /// A prone task with an explicitly given alternative list. The list must
    /// mirror the standard one: same resources index for index, utilities
    /// scaled by `d_alt`.
    pub fn prone_with_alternative(
        id: u32,
        standard: JobList,
        alternative: JobList,
        d_std: f64,
        d_alt: f64,
    ) -> Result<Self, ModelError> {
        let task = Self {
            id: TaskId(id),
            weight: 1.0,
            standard,
            exposure: Some(Exposure {
                d_std,
                d_alt,
                alternative,
            }),
        };
        task.validate()?;
        Ok(task)
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn is_prone(&self) -> bool {
        self.exposure.is_some()
    }

    pub fn list(&self, kind: ListKind) -> Option<&JobList> {
        match kind {
            ListKind::Standard => Some(&self.standard),
            ListKind::Alternative => self.exposure.as_ref().map(|e| &e.alternative),
        }
    }

    pub fn config(&self, at: JobRef) -> Option<&Configuration> {
        self.list(at.list)?.get(at.index)
    }

    pub fn d_std(&self) -> Option<f64> {
        self.exposure.as_ref().map(|e| e.d_std)
    }

    /// Copy of this task with the alternative list rebuilt from the standard
    /// list scaled by `factor`. Non-prone tasks are returned unchanged.
    pub fn with_alternative_scale(&self, factor: f64) -> Self {
        let mut t = self.clone();
        if let Some(e) = t.exposure.as_mut() {
            e.d_alt = factor;
            e.alternative = self.standard.scaled(factor);
        }
        t
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |reason: String| ModelError::InvalidTask {
            task: self.id.0,
            reason,
        };
        if !(self.weight.is_finite() && self.weight > 0.0) {
            return Err(fail(format!("weight {} must be positive", self.weight)));
        }
        let Some(e) = &self.exposure else {
            return Ok(());
        };
        for (name, d) in [("d_std", e.d_std), ("d_alt", e.d_alt)] {
            if !(d.is_finite() && (0.0..=1.0).contains(&d)) {
                return Err(fail(format!("{name} = {d} outside [0, 1]")));
            }
        }
        let std_jobs = self.standard.jobs();
        let alt_jobs = e.alternative.jobs();
        if alt_jobs.len() > std_jobs.len() {
            return Err(fail("alternative list is longer than the standard list".into()));
        }
        for (k, (s, a)) in std_jobs.iter().zip(alt_jobs).enumerate() {
            if (s.resource - a.resource).abs() > EPS {
                return Err(fail(format!("alternative job {k} resource differs from standard")));
            }
            if (s.utility * e.d_alt - a.utility).abs() > EPS {
                return Err(fail(format!(
                    "alternative job {k} utility {} != d_alt x {}",
                    a.utility, s.utility
                )));
            }
        }
        if alt_jobs.len() < std_jobs.len() && e.d_alt > 0.0 {
            return Err(fail("alternative list is truncated but d_alt is positive".into()));
        }
        Ok(())
    }
}

/// Per-task allocation state during and after one allocation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocationState {
    /// List the next upgrade is drawn from.
    pub active_list: ListKind,
    /// Configuration currently in force.
    pub held: JobRef,
    pub flag_non_interfered: bool,
    pub draw_i: f64,
    pub draw_ni: f64,
}

impl Default for AllocationState {
    fn default() -> Self {
        Self {
            active_list: ListKind::Standard,
            held: JobRef::BASE,
            flag_non_interfered: false,
            draw_i: 0.0,
            draw_ni: 0.0,
        }
    }
}

impl AllocationState {
    pub fn drawn(&self) -> f64 {
        self.draw_i + self.draw_ni
    }

    /// Checks the flag, list and draw invariants against the owning task.
    ///
    /// A flagged task may already have `active_list = Alternative`: the flag
    /// is dropped only when the task is upgraded on its alternative list, so
    /// until then it still holds a standard configuration inside the
    /// interference-free budget.
    pub fn check(&self, task: &Task) -> Result<(), String> {
        let held = task
            .config(self.held)
            .ok_or_else(|| format!("{}: held job {} does not exist", task.id, self.held))?;
        if (self.drawn() - held.resource).abs() > EPS {
            return Err(format!(
                "{}: draws {} + {} do not match resource {}",
                task.id, self.draw_i, self.draw_ni, held.resource
            ));
        }
        if self.draw_i < -EPS || self.draw_ni < -EPS {
            return Err(format!("{}: negative draw", task.id));
        }
        if self.active_list == ListKind::Alternative && !task.is_prone() {
            return Err(format!("{}: non-prone task on alternative list", task.id));
        }
        if self.held.list == ListKind::Alternative && self.active_list != ListKind::Alternative {
            return Err(format!("{}: holds an alternative job but is back on standard", task.id));
        }
        if self.flag_non_interfered {
            if !task.is_prone() {
                return Err(format!("{}: flagged but not prone", task.id));
            }
            if self.held.list != ListKind::Standard {
                return Err(format!("{}: flagged while holding an alternative job", task.id));
            }
            if self.draw_i.abs() > EPS {
                return Err(format!("{}: flagged but draws {} from R_i", task.id, self.draw_i));
            }
        }
        Ok(())
    }
}

/// Remaining interference-possible (`r_i`) and interference-free (`r_ni`)
/// time shares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceBudget {
    pub r_i: f64,
    pub r_ni: f64,
}

impl ResourceBudget {
    pub fn new(r_i: f64, r_ni: f64) -> Result<Self, ModelError> {
        for (name, value) in [("r_i", r_i), ("r_ni", r_ni)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ModelError::InvalidBudget { name, value });
            }
        }
        Ok(Self { r_i, r_ni })
    }

    /// A single undivided pool, used when the interferer is not modelled.
    pub fn single(capacity: f64) -> Result<Self, ModelError> {
        Self::new(capacity, 0.0)
    }

    pub fn total(&self) -> f64 {
        self.r_i + self.r_ni
    }
}

/// A half-open interval `[start, end)` in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Length of the intersection with `[start, end)`.
    pub fn overlap(&self, start: f64, end: f64) -> f64 {
        (self.end.min(end) - self.start.max(start)).max(0.0)
    }
}

impl From<[f64; 2]> for Interval {
    fn from([start, end]: [f64; 2]) -> Self {
        Self { start, end }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(iv: Interval) -> Self {
        [iv.start, iv.end]
    }
}

/// Known on-times of a single interferer over one planning horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPattern")]
pub struct InterferencePattern {
    horizon: f64,
    active: Vec<Interval>,
}

#[derive(Deserialize)]
struct RawPattern {
    horizon: f64,
    active: Vec<Interval>,
}

impl TryFrom<RawPattern> for InterferencePattern {
    type Error = ModelError;

    fn try_from(raw: RawPattern) -> Result<Self, Self::Error> {
        Self::new(raw.horizon, raw.active)
    }
}

impl InterferencePattern {
    pub fn new(horizon: f64, active: Vec<Interval>) -> Result<Self, ModelError> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(ModelError::InvalidPattern(format!(
                "horizon {horizon} must be positive"
            )));
        }
        let mut prev_end = 0.0;
        for iv in &active {
            if !(iv.start.is_finite() && iv.end.is_finite()) || iv.is_empty() {
                return Err(ModelError::InvalidPattern(format!(
                    "interval [{}, {}) is empty or not finite",
                    iv.start, iv.end
                )));
            }
            if iv.start < prev_end {
                return Err(ModelError::InvalidPattern(format!(
                    "interval [{}, {}) overlaps or is out of order",
                    iv.start, iv.end
                )));
            }
            if iv.end > horizon {
                return Err(ModelError::InvalidPattern(format!(
                    "interval [{}, {}) exceeds horizon {horizon}",
                    iv.start, iv.end
                )));
            }
            prev_end = iv.end;
        }
        Ok(Self { horizon, active })
    }

    /// A pattern with no interference at all.
    pub fn quiet(horizon: f64) -> Result<Self, ModelError> {
        Self::new(horizon, Vec::new())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn active(&self) -> &[Interval] {
        &self.active
    }

    /// Fraction of the horizon during which the interferer is active.
    pub fn duty(&self) -> f64 {
        let on: f64 = self.active.iter().map(Interval::len).sum();
        (on / self.horizon).clamp(0.0, 1.0)
    }

    /// Complement of the active intervals within `[0, horizon)`.
    pub fn free_intervals(&self) -> Vec<Interval> {
        let mut free = Vec::with_capacity(self.active.len() + 1);
        let mut t = 0.0;
        for iv in &self.active {
            if iv.start > t {
                free.push(Interval::new(t, iv.start));
            }
            t = iv.end;
        }
        if t < self.horizon {
            free.push(Interval::new(t, self.horizon));
        }
        free
    }

    /// Total time within `[start, end)` during which the interferer is active.
    pub fn overlap(&self, start: f64, end: f64) -> f64 {
        self.active.iter().map(|iv| iv.overlap(start, end)).sum()
    }
}

/// Splits the unit time budget into interference-possible and
/// interference-free shares according to the pattern's duty.
pub fn partition_budget(pattern: &InterferencePattern) -> ResourceBudget {
    let duty = pattern.duty();
    ResourceBudget {
        r_i: duty,
        r_ni: 1.0 - duty,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(horizon: f64, ivs: &[(f64, f64)]) -> InterferencePattern {
        InterferencePattern::new(horizon, ivs.iter().map(|&(s, e)| Interval::new(s, e)).collect()).unwrap()
    }

    #[test]
    fn duty_examples() {
        assert_eq!(pattern(1.0, &[]).duty(), 0.0);
        assert!((pattern(1.0, &[(0.0, 0.6)]).duty() - 0.6).abs() < 1e-12);
        assert!((pattern(2.0, &[(0.0, 0.7), (1.0, 1.7)]).duty() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn partition_examples() {
        let b = partition_budget(&pattern(1.0, &[(0.0, 0.6)]));
        assert!((b.r_i - 0.6).abs() < 1e-12 && (b.r_ni - 0.4).abs() < 1e-12);
        let b = partition_budget(&pattern(1.0, &[]));
        assert_eq!((b.r_i, b.r_ni), (0.0, 1.0));
        let b = partition_budget(&pattern(1.0, &[(0.3, 1.0)]));
        assert!((b.r_i - 0.7).abs() < 1e-12 && (b.r_ni - 0.3).abs() < 1e-12);
        assert!((b.r_i + b.r_ni - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pattern_rejects_bad_intervals() {
        assert!(InterferencePattern::new(1.0, vec![Interval::new(0.5, 0.4)]).is_err());
        assert!(InterferencePattern::new(1.0, vec![Interval::new(0.0, 0.5), Interval::new(0.4, 0.6)]).is_err());
        assert!(InterferencePattern::new(1.0, vec![Interval::new(0.5, 1.5)]).is_err());
        assert!(InterferencePattern::new(0.0, vec![]).is_err());
    }

    #[test]
    fn free_intervals_complement_active() {
        let p = pattern(1.0, &[(0.1, 0.3), (0.5, 1.0)]);
        let free = p.free_intervals();
        assert_eq!(free, vec![Interval::new(0.0, 0.1), Interval::new(0.3, 0.5)]);
        assert!((p.overlap(0.2, 0.6) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn job_list_requires_base_first_and_strict_growth() {
        assert!(JobList::from_rows(&[("a", 0.3, 0.6)]).is_ok());
        assert!(JobList::new(vec![Configuration::from_share("a", 0.3, 0.6).unwrap()]).is_err());
        assert!(JobList::from_rows(&[("a", 0.3, 0.6), ("b", 0.3, 0.7)]).is_err());
        assert!(JobList::from_rows(&[("a", 0.3, 0.6), ("b", 0.4, 0.6)]).is_err());
        assert!(Configuration::from_share("x", 1.2, 0.1).is_err());
        assert!(Configuration::from_share("x", 0.2, -0.1).is_err());
    }

    #[test]
    fn scaled_zero_collapses_to_base() {
        let l = JobList::from_rows(&[("a", 0.3, 0.6)]).unwrap();
        assert_eq!(l.scaled(0.0), JobList::base_only());
        assert!((l.scaled(0.5).get(1).unwrap().utility - 0.3).abs() < 1e-15);
    }

    #[test]
    fn prone_task_checks_mirror() {
        let std = JobList::from_rows(&[("c1", 0.3, 0.6)]).unwrap();
        let alt = JobList::from_rows(&[("c1a", 0.3, 0.4)]).unwrap();
        assert!(Task::prone_with_alternative(1, std.clone(), alt.clone(), 0.1, 2.0 / 3.0).is_ok());
        assert!(Task::prone_with_alternative(1, std.clone(), alt, 0.1, 0.5).is_err());
        let bad = JobList::from_rows(&[("c1a", 0.2, 0.4)]).unwrap();
        assert!(Task::prone_with_alternative(1, std, bad, 0.1, 2.0 / 3.0).is_err());
    }

    #[test]
    fn budget_rejects_negative() {
        assert!(ResourceBudget::new(-0.1, 0.5).is_err());
        assert!(ResourceBudget::new(0.1, f64::NAN).is_err());
    }

    #[test]
    fn interval_serializes_as_pair() {
        let s = serde_json::to_string(&Interval::new(0.25, 0.5)).unwrap();
        assert_eq!(s, "[0.25,0.5]");
    }
}
