//! Schedule quality and run diagnostics emitted as `metrics.json`.

use std::collections::BTreeMap;

use fjs_core::{Instance, JobId, ResourceId, Schedule};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    /// Completion time of the last allocation (crisp).
    pub makespan: f64,
    /// Per job: last activity finish minus the defuzzified due date
    /// (negative = early).
    pub job_lateness: BTreeMap<JobId, f64>,
    /// Per resource: busy time divided by the makespan.
    pub resource_utilization: BTreeMap<ResourceId, f64>,
    pub outer_iterations: usize,
    /// Redundancy-removal sweep count per outer iteration.
    pub fixpoint_iterations: Vec<u32>,
    /// Fixpoint convergence flag per outer iteration.
    pub convergence: Vec<bool>,
    /// Jobs that could not meet their due date in the backward arrangement.
    pub infeasible_jobs: Vec<JobId>,
    /// Activities committed past their latest start, per the iteration log.
    pub late_activities: usize,
}

pub fn compute(instance: &Instance, schedule: &Schedule) -> Metrics {
    let cfg = &instance.config;
    let makespan = schedule.makespan();

    let mut job_lateness = BTreeMap::new();
    for job in &instance.jobs {
        let finish = job
            .activity_ids
            .iter()
            .filter_map(|id| schedule.allocation_for(id))
            .map(|a| a.crisp_finish)
            .fold(f64::NEG_INFINITY, f64::max);
        if finish.is_finite() {
            job_lateness.insert(job.id.clone(), finish - cfg.defuzz.apply(&job.due_date));
        }
    }

    let mut resource_utilization = BTreeMap::new();
    for resource in &instance.resources {
        let busy: f64 = schedule
            .allocations_on(&resource.id)
            .map(|a| a.crisp_finish - a.crisp_start)
            .sum();
        let utilization = if makespan > 0.0 { busy / makespan } else { 0.0 };
        resource_utilization.insert(resource.id.clone(), utilization);
    }

    Metrics {
        makespan,
        job_lateness,
        resource_utilization,
        outer_iterations: schedule.iteration_log.len(),
        fixpoint_iterations: schedule.iteration_log.iter().map(|r| r.fixpoint_iterations).collect(),
        convergence: schedule.iteration_log.iter().map(|r| r.converged).collect(),
        infeasible_jobs: schedule
            .iteration_log
            .first()
            .map(|r| r.infeasible_jobs.clone())
            .unwrap_or_default(),
        late_activities: schedule.iteration_log.iter().map(|r| r.late.len()).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fjs_core::allocate;

    #[test]
    fn metrics_reflect_a_small_run() {
        let instance: Instance = serde_json::from_str(
            r#"{
                "jobs": [
                    {"id": "J1", "activity_ids": ["A1"], "due_date": 10, "importance": 0.5},
                    {"id": "J2", "activity_ids": ["B1"], "due_date": 4, "importance": 0.5}
                ],
                "activities": [
                    {"id": "A1", "job_id": "J1", "index_in_job": 0, "duration": 4, "capable_resources": ["R1"]},
                    {"id": "B1", "job_id": "J2", "index_in_job": 0, "duration": 3, "capable_resources": ["R1"]}
                ],
                "resources": [{"id": "R1", "available_from": 0, "strategic_weight": 0.5}],
                "config": {"horizon": 20}
            }"#,
        )
        .unwrap();
        let schedule = allocate::run(&instance, &crate::default_rule_base()).unwrap();
        let m = compute(&instance, &schedule);
        assert_eq!(m.makespan, 7.0);
        // one of the two jobs runs second and finishes at 7
        let total_late: f64 = m.job_lateness.values().sum();
        assert_eq!(m.job_lateness.len(), 2);
        assert!(total_late.is_finite());
        let u = m.resource_utilization[&ResourceId::from("R1")];
        assert!((u - 1.0).abs() < 1e-9, "single machine fully busy, got {u}");
        assert_eq!(m.outer_iterations, schedule.iteration_log.len());
        assert_eq!(m.fixpoint_iterations.len(), m.outer_iterations);
        assert_eq!(m.convergence.len(), m.outer_iterations);
    }

    #[test]
    fn empty_schedule_yields_zero_metrics() {
        let instance: Instance = serde_json::from_str(
            r#"{"jobs": [], "activities": [], "resources": [{"id": "R1"}], "config": {}}"#,
        )
        .unwrap();
        let schedule = Schedule::default();
        let m = compute(&instance, &schedule);
        assert_eq!(m.makespan, 0.0);
        assert!(m.job_lateness.is_empty());
        assert_eq!(m.resource_utilization[&ResourceId::from("R1")], 0.0);
    }
}
