//! Shop domain model: jobs as ordered activity chains, resources as
//! allocatable objects, the run configuration, and the schedule that the
//! pipeline builds up.
//!
//! An [`Instance`] is immutable once loaded; a [`Schedule`] is only mutated
//! by the allocation loop. Validation reports violations as data rather than
//! failing, so a linter can show all of them at once.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::fuzzy::{Defuzz, TriFuzzy};

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(
            Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

id_type!(
    /// Identifier of an activity, unique within an instance.
    ActivityId
);
id_type!(
    /// Identifier of a job.
    JobId
);
id_type!(
    /// Identifier of a resource.
    ResourceId
);

/// Atomic unit of work, allocated to exactly one resource over one interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Activity {
    pub id: ActivityId,
    pub job_id: JobId,
    pub index_in_job: u32,
    pub duration: TriFuzzy,
    pub capable_resources: BTreeSet<ResourceId>,
    /// Optional per-resource replacements for `duration`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub duration_overrides: BTreeMap<ResourceId, TriFuzzy>,
}

impl Activity {
    /// Processing time on one specific resource, override-aware.
    pub fn duration_on(&self, resource: &ResourceId) -> TriFuzzy {
        self.duration_overrides
            .get(resource)
            .copied()
            .unwrap_or(self.duration)
    }

    /// The capable-resource duration with the smallest centroid. Used where
    /// latest-possible semantics wants the optimistic processing time.
    pub fn optimistic_duration(&self) -> TriFuzzy {
        let mut best = self.duration;
        let mut best_c = best.centroid();
        for r in &self.capable_resources {
            let d = self.duration_on(r);
            let c = d.centroid();
            if c < best_c {
                best = d;
                best_c = c;
            }
        }
        best
    }
}

/// Ordered chain of activities plus its supplementary conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub id: JobId,
    pub activity_ids: Vec<ActivityId>,
    pub due_date: TriFuzzy,
    /// Strategic weight of the job in `[0, 1]`.
    pub importance: f64,
}

/// Allocatable object processing at most one activity at a time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resource {
    pub id: ResourceId,
    #[serde(default = "zero_tri")]
    pub available_from: TriFuzzy,
    /// Production-external preference for loading this resource, in `[0, 1]`.
    #[serde(default)]
    pub strategic_weight: f64,
}

fn zero_tri() -> TriFuzzy {
    TriFuzzy::crisp(0.0)
}

/// Engine configuration. Defaults are resolved on deserialization: `step`
/// falls back to `horizon / 2` and `overlap` to `step`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    /// Length H of the rolling selection window, in time-units.
    pub horizon: f64,
    /// Forward shift of the window per outer iteration.
    pub step: f64,
    /// Trailing window in which recently finished allocations still count as
    /// context for a resource.
    pub overlap: f64,
    /// Fixpoint stop threshold: largest effective-score change considered
    /// insignificant.
    pub significance_epsilon: f64,
    /// Hard cap on redundancy-removal fixpoint sweeps.
    pub max_fixpoint_iters: u32,
    /// Indifference threshold of the fuzzy comparator.
    pub compare_epsilon: f64,
    /// Strength of the load-balance score penalty.
    pub load_balance_lambda: f64,
    /// Crisp projection used for committed times and window membership.
    pub defuzz: Defuzz,
    /// Seed recorded with the instance; generation and any randomized
    /// tooling derive their streams from it.
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            horizon: 20.0,
            step: 10.0,
            overlap: 10.0,
            significance_epsilon: 1e-3,
            max_fixpoint_iters: 25,
            compare_epsilon: 1e-9,
            load_balance_lambda: 0.1,
            defuzz: Defuzz::Centroid,
            seed: 0,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    horizon: Option<f64>,
    step: Option<f64>,
    overlap: Option<f64>,
    significance_epsilon: Option<f64>,
    max_fixpoint_iters: Option<u32>,
    compare_epsilon: Option<f64>,
    load_balance_lambda: Option<f64>,
    defuzz: Option<Defuzz>,
    seed: Option<u64>,
}

impl<'de> Deserialize<'de> for Config {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawConfig::deserialize(deserializer)?;
        let defaults = Config::default();
        let horizon = raw.horizon.unwrap_or(defaults.horizon);
        let step = raw.step.unwrap_or(horizon / 2.0);
        Ok(Config {
            horizon,
            step,
            overlap: raw.overlap.unwrap_or(step),
            significance_epsilon: raw
                .significance_epsilon
                .unwrap_or(defaults.significance_epsilon),
            max_fixpoint_iters: raw.max_fixpoint_iters.unwrap_or(defaults.max_fixpoint_iters),
            compare_epsilon: raw.compare_epsilon.unwrap_or(defaults.compare_epsilon),
            load_balance_lambda: raw
                .load_balance_lambda
                .unwrap_or(defaults.load_balance_lambda),
            defuzz: raw.defuzz.unwrap_or(defaults.defuzz),
            seed: raw.seed.unwrap_or(defaults.seed),
        })
    }
}

/// A complete scheduling problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub activities: Vec<Activity>,
    pub resources: Vec<Resource>,
    #[serde(default)]
    pub config: Config,
}

impl Instance {
    pub fn activity(&self, id: &ActivityId) -> Option<&Activity> {
        self.activities.iter().find(|a| &a.id == id)
    }

    pub fn job(&self, id: &JobId) -> Option<&Job> {
        self.jobs.iter().find(|j| &j.id == id)
    }

    pub fn resource(&self, id: &ResourceId) -> Option<&Resource> {
        self.resources.iter().find(|r| &r.id == id)
    }

    /// Predecessor of `activity` in its job chain, if any.
    pub fn predecessor(&self, activity: &Activity) -> Option<&Activity> {
        if activity.index_in_job == 0 {
            return None;
        }
        self.activities.iter().find(|a| {
            a.job_id == activity.job_id && a.index_in_job + 1 == activity.index_in_job
        })
    }
}

/// One committed allocation. Fuzzy times document residual vagueness; the
/// crisp projections are the normative feasibility record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Allocation {
    pub activity_id: ActivityId,
    pub resource_id: ResourceId,
    pub fuzzy_start: TriFuzzy,
    pub fuzzy_finish: TriFuzzy,
    pub crisp_start: f64,
    pub crisp_finish: f64,
}

/// What one outer iteration saw and decided.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: u32,
    pub window_start: f64,
    /// Activities picked up by the time-window selection (job-closed).
    pub selected: Vec<ActivityId>,
    /// Job-level priority scores, highest first.
    pub priorities: Vec<(ActivityId, TriFuzzy)>,
    /// Final per-resource recommendation lists after redundancy removal.
    pub recommendations: BTreeMap<ResourceId, Vec<ActivityId>>,
    pub fixpoint_iterations: u32,
    pub converged: bool,
    pub committed: Vec<ActivityId>,
    /// Recommended but deferred because the job predecessor was not yet
    /// allocated.
    pub deferred: Vec<ActivityId>,
    /// Committed later than their defuzzified latest start.
    pub late: Vec<ActivityId>,
    /// Jobs whose chain cannot meet its due date (negative latest start);
    /// reported on the first iteration.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub infeasible_jobs: Vec<JobId>,
}

/// Committed allocations plus the per-iteration audit trail.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Schedule {
    pub allocations: Vec<Allocation>,
    pub iteration_log: Vec<IterationRecord>,
}

impl Schedule {
    pub fn allocation_for(&self, id: &ActivityId) -> Option<&Allocation> {
        self.allocations.iter().find(|a| &a.activity_id == id)
    }

    pub fn is_allocated(&self, id: &ActivityId) -> bool {
        self.allocation_for(id).is_some()
    }

    pub fn allocations_on<'a>(
        &'a self,
        resource: &'a ResourceId,
    ) -> impl Iterator<Item = &'a Allocation> {
        self.allocations
            .iter()
            .filter(move |a| &a.resource_id == resource)
    }

    /// Completion time of the last allocation; 0 for an empty schedule.
    pub fn makespan(&self) -> f64 {
        self.allocations
            .iter()
            .map(|a| a.crisp_finish)
            .fold(0.0, f64::max)
    }
}

/// One broken instance rule. Violations are data, not failures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Id of the offending entity (or `config`).
    pub entity: String,
    /// Stable rule code, e.g. `dangling-resource`.
    pub rule: &'static str,
    pub message: String,
}

impl Violation {
    fn new(entity: impl Into<String>, rule: &'static str, message: String) -> Self {
        Self {
            entity: entity.into(),
            rule,
            message,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.entity, self.rule, self.message)
    }
}

/// Checks every instance invariant and returns all violations found.
/// Pure and idempotent; an empty result means the instance is well-formed.
// negated float comparisons are deliberate: they also reject NaN
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn validate(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let cfg = &instance.config;

    if !(cfg.horizon > 0.0) || !cfg.horizon.is_finite() {
        out.push(Violation::new(
            "config",
            "horizon-positive",
            format!("horizon must be a positive finite number, got {}", cfg.horizon),
        ));
    }
    if !(cfg.step > 0.0) || !cfg.step.is_finite() {
        out.push(Violation::new(
            "config",
            "step-positive",
            format!("step must be a positive finite number, got {}", cfg.step),
        ));
    }
    if !(cfg.overlap >= 0.0) || !cfg.overlap.is_finite() {
        out.push(Violation::new(
            "config",
            "overlap-nonnegative",
            format!("overlap must be >= 0, got {}", cfg.overlap),
        ));
    }
    if !(cfg.significance_epsilon >= 0.0) || !cfg.significance_epsilon.is_finite() {
        out.push(Violation::new(
            "config",
            "significance-nonnegative",
            format!("significance_epsilon must be >= 0, got {}", cfg.significance_epsilon),
        ));
    }
    if cfg.max_fixpoint_iters < 1 {
        out.push(Violation::new(
            "config",
            "fixpoint-iters-min",
            "max_fixpoint_iters must be >= 1".to_string(),
        ));
    }
    if !(cfg.compare_epsilon >= 0.0) || !cfg.compare_epsilon.is_finite() {
        out.push(Violation::new(
            "config",
            "compare-epsilon-nonnegative",
            format!("compare_epsilon must be >= 0, got {}", cfg.compare_epsilon),
        ));
    }
    if !(cfg.load_balance_lambda >= 0.0) || !cfg.load_balance_lambda.is_finite() {
        out.push(Violation::new(
            "config",
            "lambda-nonnegative",
            format!("load_balance_lambda must be >= 0, got {}", cfg.load_balance_lambda),
        ));
    }

    let mut seen_jobs = BTreeSet::new();
    for job in &instance.jobs {
        if !seen_jobs.insert(&job.id) {
            out.push(Violation::new(
                job.id.as_str(),
                "duplicate-job-id",
                format!("job id {} declared more than once", job.id),
            ));
        }
    }
    let mut seen_activities = BTreeSet::new();
    for act in &instance.activities {
        if !seen_activities.insert(&act.id) {
            out.push(Violation::new(
                act.id.as_str(),
                "duplicate-activity-id",
                format!("activity id {} declared more than once", act.id),
            ));
        }
    }
    let mut seen_resources = BTreeSet::new();
    for res in &instance.resources {
        if !seen_resources.insert(&res.id) {
            out.push(Violation::new(
                res.id.as_str(),
                "duplicate-resource-id",
                format!("resource id {} declared more than once", res.id),
            ));
        }
    }

    let mut referenced: BTreeSet<&ActivityId> = BTreeSet::new();
    for job in &instance.jobs {
        if job.activity_ids.is_empty() {
            out.push(Violation::new(
                job.id.as_str(),
                "empty-job",
                format!("job {} has no activities", job.id),
            ));
        }
        if job.due_date.a() < 0.0 {
            out.push(Violation::new(
                job.id.as_str(),
                "negative-due-date",
                format!("job {} due date support starts below 0", job.id),
            ));
        }
        if !(0.0..=1.0).contains(&job.importance) || !job.importance.is_finite() {
            out.push(Violation::new(
                job.id.as_str(),
                "importance-range",
                format!("job {} importance {} outside [0, 1]", job.id, job.importance),
            ));
        }
        let mut in_job = BTreeSet::new();
        for (pos, aid) in job.activity_ids.iter().enumerate() {
            if !in_job.insert(aid) {
                out.push(Violation::new(
                    job.id.as_str(),
                    "duplicate-activity-ref",
                    format!("job {} lists activity {} more than once", job.id, aid),
                ));
                continue;
            }
            referenced.insert(aid);
            match instance.activity(aid) {
                None => out.push(Violation::new(
                    job.id.as_str(),
                    "dangling-activity",
                    format!("job {} references unknown activity {}", job.id, aid),
                )),
                Some(act) => {
                    if act.job_id != job.id {
                        out.push(Violation::new(
                            aid.as_str(),
                            "job-mismatch",
                            format!(
                                "activity {} claims job {} but is listed by job {}",
                                aid, act.job_id, job.id
                            ),
                        ));
                    }
                    if act.index_in_job as usize != pos {
                        out.push(Violation::new(
                            aid.as_str(),
                            "index-order",
                            format!(
                                "activity {} has index_in_job {} but sits at position {} of job {}",
                                aid, act.index_in_job, pos, job.id
                            ),
                        ));
                    }
                }
            }
        }
    }

    let mut seen_index: BTreeSet<(&JobId, u32)> = BTreeSet::new();
    for act in &instance.activities {
        if act.duration.a() < 0.0 {
            out.push(Violation::new(
                act.id.as_str(),
                "negative-duration",
                format!("activity {} duration support starts below 0", act.id),
            ));
        }
        if act.capable_resources.is_empty() {
            out.push(Violation::new(
                act.id.as_str(),
                "no-capable-resource",
                format!("activity {} has an empty capability set", act.id),
            ));
        }
        if instance.job(&act.job_id).is_none() {
            out.push(Violation::new(
                act.id.as_str(),
                "dangling-job",
                format!("activity {} references unknown job {}", act.id, act.job_id),
            ));
        }
        if !referenced.contains(&act.id) {
            out.push(Violation::new(
                act.id.as_str(),
                "orphan-activity",
                format!("activity {} is not listed by any job", act.id),
            ));
        }
        if !seen_index.insert((&act.job_id, act.index_in_job)) {
            out.push(Violation::new(
                act.id.as_str(),
                "duplicate-index",
                format!(
                    "activity {} duplicates index {} within job {}",
                    act.id, act.index_in_job, act.job_id
                ),
            ));
        }
        for rid in &act.capable_resources {
            if instance.resource(rid).is_none() {
                out.push(Violation::new(
                    act.id.as_str(),
                    "dangling-resource",
                    format!("activity {} lists unknown resource {}", act.id, rid),
                ));
            }
        }
        for (rid, dur) in &act.duration_overrides {
            if instance.resource(rid).is_none() {
                out.push(Violation::new(
                    act.id.as_str(),
                    "dangling-resource",
                    format!("activity {} overrides duration on unknown resource {}", act.id, rid),
                ));
            } else if !act.capable_resources.contains(rid) {
                out.push(Violation::new(
                    act.id.as_str(),
                    "override-without-capability",
                    format!(
                        "activity {} overrides duration on {} but is not capable on it",
                        act.id, rid
                    ),
                ));
            }
            if dur.a() < 0.0 {
                out.push(Violation::new(
                    act.id.as_str(),
                    "negative-duration",
                    format!("activity {} override on {} starts below 0", act.id, rid),
                ));
            }
        }
    }

    for res in &instance.resources {
        if res.available_from.a() < 0.0 {
            out.push(Violation::new(
                res.id.as_str(),
                "negative-availability",
                format!("resource {} available_from support starts below 0", res.id),
            ));
        }
        if !(0.0..=1.0).contains(&res.strategic_weight) || !res.strategic_weight.is_finite() {
            out.push(Violation::new(
                res.id.as_str(),
                "strategic-weight-range",
                format!(
                    "resource {} strategic_weight {} outside [0, 1]",
                    res.id, res.strategic_weight
                ),
            ));
        }
    }

    out
}

/// Activities of the instance with no allocation record in the schedule.
pub fn unscheduled_activities(instance: &Instance, schedule: &Schedule) -> BTreeSet<ActivityId> {
    let allocated: BTreeSet<&ActivityId> = schedule
        .allocations
        .iter()
        .map(|a| &a.activity_id)
        .collect();
    instance
        .activities
        .iter()
        .filter(|a| !allocated.contains(&a.id))
        .map(|a| a.id.clone())
        .collect()
}
