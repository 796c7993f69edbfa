//! Allocation determinations and the rolling outer loop.
//!
//! Recommendations are turned into commitments resource by resource, in
//! recommendation order: an activity starts at the fuzzy max of its
//! resource's availability and its predecessor's finish, as early as
//! possible.  Activities whose predecessor is not yet allocated are skipped
//! rather than blocking the resource; they return in a later round.  The
//! outer loop repeats select → prioritize → recommend → commit, shifting the
//! window forward each round and dropping whatever is already placed, until
//! the schedule is complete.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::fuzzy::TriFuzzy;
use crate::horizon::{self, HorizonWindow};
use crate::model::{
    unscheduled_activities, ActivityId, Allocation, Instance, IterationRecord, JobId, Schedule,
};
use crate::rating::{self, RatingError, RuleBase};
use crate::recommend::{self, RecommendationSet};
use crate::retrograde::{self, Arrangement};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error(
        "scheduling stalled: the window swept past every latest start (start {window_start}) \
         with {unscheduled} activities unallocated; likely a capability dead-end"
    )]
    Stall { window_start: f64, unscheduled: usize },
    #[error(transparent)]
    Rating(#[from] RatingError),
}

/// What one commit pass did.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommitOutcome {
    pub committed: Vec<ActivityId>,
    /// Recommended but left unscheduled because the job predecessor was not
    /// allocated yet.
    pub deferred: Vec<ActivityId>,
}

/// Commits the recommendations onto the schedule.
///
/// Passes repeat until nothing new commits, so a predecessor committed on
/// another resource within the same round unblocks its successors
/// immediately. Start times never move earlier: availability advances with
/// every commitment, which keeps crisp projections overlap-free per resource
/// and precedence-consistent per job.
pub fn commit(
    recs: &RecommendationSet,
    schedule: &mut Schedule,
    instance: &Instance,
) -> CommitOutcome {
    let cfg = &instance.config;

    let mut avail: BTreeMap<&crate::model::ResourceId, TriFuzzy> = BTreeMap::new();
    for rid in recs.lists.keys() {
        let mut t = instance
            .resource(rid)
            .map(|r| r.available_from)
            .unwrap_or_else(|| TriFuzzy::crisp(0.0));
        for alloc in schedule.allocations_on(rid) {
            t = t.max(alloc.fuzzy_finish);
        }
        avail.insert(rid, t);
    }

    let mut outcome = CommitOutcome::default();
    loop {
        let mut progressed = false;
        for (rid, list) in &recs.lists {
            for entry in &list.entries {
                if entry.context || schedule.is_allocated(&entry.activity_id) {
                    continue;
                }
                let Some(activity) = instance.activity(&entry.activity_id) else {
                    continue;
                };
                let predecessor = instance.predecessor(activity);
                let pred_finish = match predecessor {
                    Some(pred) => match schedule.allocation_for(&pred.id) {
                        Some(alloc) => alloc.fuzzy_finish,
                        None => continue, // deferred to a later round
                    },
                    None => TriFuzzy::crisp(0.0),
                };
                let duration = activity.duration_on(rid);
                let start = avail[rid].max(pred_finish);
                let finish = start + duration;
                let crisp_start = cfg.defuzz.apply(&start);
                schedule.allocations.push(Allocation {
                    activity_id: entry.activity_id.clone(),
                    resource_id: rid.clone(),
                    fuzzy_start: start,
                    fuzzy_finish: finish,
                    crisp_start,
                    crisp_finish: crisp_start + cfg.defuzz.apply(&duration),
                });
                *avail.get_mut(rid).expect("availability seeded above") = finish;
                outcome.committed.push(entry.activity_id.clone());
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }

    for list in recs.lists.values() {
        for entry in &list.entries {
            if !entry.context && !schedule.is_allocated(&entry.activity_id) {
                outcome.deferred.push(entry.activity_id.clone());
            }
        }
    }
    outcome
}

/// Runs the whole pipeline until every activity is allocated.
///
/// Assumes the instance validates cleanly (the front end lints first). Each
/// round either commits something or shifts the window; once the window has
/// swept past every latest start and a full round still commits nothing,
/// the run fails with [`RunError::Stall`] instead of spinning.
pub fn run(instance: &Instance, rule_base: &RuleBase) -> Result<Schedule, RunError> {
    let cfg = &instance.config;
    let mut schedule = Schedule::default();
    if instance.activities.is_empty() {
        return Ok(schedule);
    }

    let arrangement = retrograde::backward_pass(instance);
    let infeasible = infeasible_jobs(instance, &arrangement);
    let stall_bound = arrangement
        .iter()
        .map(|e| cfg.defuzz.apply(&e.latest_start))
        .fold(0.0f64, f64::max)
        + cfg.horizon;

    let mut window = HorizonWindow::new(0.0, cfg.horizon);
    let mut iteration = 0u32;
    loop {
        let unscheduled = unscheduled_activities(instance, &schedule);
        if unscheduled.is_empty() {
            return Ok(schedule);
        }
        iteration += 1;

        let selected = horizon::select(&arrangement, &window, &schedule, instance);
        let mut record = IterationRecord {
            iteration,
            window_start: window.start,
            selected: selected.clone(),
            infeasible_jobs: if iteration == 1 { infeasible.clone() } else { Vec::new() },
            ..Default::default()
        };

        let committed_now = if selected.is_empty() {
            schedule.iteration_log.push(record);
            0
        } else {
            // the selection is logged before rating so waiting time starts
            // counting from the first round that saw the activity
            schedule.iteration_log.push(record.clone());
            let now = window.start;
            let prioritized = rating::prioritize_jobs(
                &selected,
                instance,
                &arrangement,
                &schedule,
                rule_base,
                now,
            )?;
            let lists = recommend::resource_specific(
                &prioritized,
                &schedule,
                instance,
                &arrangement,
                rule_base,
                now,
            )?;
            let recs = recommend::resource_comprehensive(&lists, instance);
            let outcome = commit(&recs, &mut schedule, instance);

            record.priorities = prioritized;
            record.recommendations = recs
                .lists
                .iter()
                .map(|(rid, l)| {
                    (rid.clone(), l.entries.iter().map(|e| e.activity_id.clone()).collect())
                })
                .collect();
            record.fixpoint_iterations = recs.iteration_count;
            record.converged = recs.converged;
            record.late = outcome
                .committed
                .iter()
                .filter(|id| {
                    let Some(alloc) = schedule.allocation_for(id) else {
                        return false;
                    };
                    arrangement
                        .get(id)
                        .map(|e| alloc.crisp_start > cfg.defuzz.apply(&e.latest_start) + 1e-9)
                        .unwrap_or(false)
                })
                .cloned()
                .collect();
            let n = outcome.committed.len();
            record.committed = outcome.committed;
            record.deferred = outcome.deferred;
            *schedule.iteration_log.last_mut().expect("record pushed above") = record;
            n
        };

        window.advance(cfg.step);
        if committed_now == 0 && window.start > stall_bound {
            return Err(RunError::Stall {
                window_start: window.start,
                unscheduled: unscheduled_activities(instance, &schedule).len(),
            });
        }
    }
}

// Jobs that cannot meet their due date: the chain's first latest start
// already projects below zero.
fn infeasible_jobs(instance: &Instance, arrangement: &Arrangement) -> Vec<JobId> {
    let cfg = &instance.config;
    let mut out: Vec<JobId> = instance
        .jobs
        .iter()
        .filter(|job| {
            job.activity_ids.first().is_some_and(|first| {
                arrangement
                    .get(first)
                    .is_some_and(|e| cfg.defuzz.apply(&e.latest_start) < 0.0)
            })
        })
        .map(|job| job.id.clone())
        .collect();
    out.sort();
    out
}
