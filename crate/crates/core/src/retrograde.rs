//! Fuzzy backward pass: a rough temporal arrangement of all activities.
//!
//! Each job chain is walked in reverse from its due date, deriving the
//! latest placement of every activity with fuzzy subtraction. Resource
//! capacity is deliberately ignored; the arrangement only steers selection
//! and urgency, commitment happens later.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::Serialize;

use crate::fuzzy::TriFuzzy;
use crate::model::{ActivityId, Instance, JobId};

/// Latest-start / latest-finish window of one activity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrangementEntry {
    pub activity_id: ActivityId,
    pub job_id: JobId,
    pub index_in_job: u32,
    pub latest_start: TriFuzzy,
    pub latest_finish: TriFuzzy,
}

/// Per-activity fuzzy latest windows from the backward pass.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Arrangement {
    entries: BTreeMap<ActivityId, ArrangementEntry>,
}

impl Arrangement {
    pub fn get(&self, id: &ActivityId) -> Option<&ArrangementEntry> {
        self.entries.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ArrangementEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Walks each job chain backwards from its due date. The last activity
/// finishes at the due date; every predecessor finishes where its successor
/// starts at the latest. Negative latest starts are kept, not clamped: they
/// signal that the job cannot meet its due date and read as maximal urgency
/// downstream.
///
/// Durations are the optimistic (smallest-centroid) capable-resource
/// durations, so the arrangement reflects the latest placement that is still
/// achievable at all.
pub fn backward_pass(instance: &Instance) -> Arrangement {
    let mut entries = BTreeMap::new();
    for job in &instance.jobs {
        let mut latest_finish = job.due_date;
        for aid in job.activity_ids.iter().rev() {
            let Some(act) = instance.activity(aid) else {
                continue;
            };
            let latest_start = latest_finish - act.optimistic_duration();
            entries.insert(
                aid.clone(),
                ArrangementEntry {
                    activity_id: aid.clone(),
                    job_id: job.id.clone(),
                    index_in_job: act.index_in_job,
                    latest_start,
                    latest_finish,
                },
            );
            latest_finish = latest_start;
        }
    }
    Arrangement { entries }
}

/// Activities sorted ascending by latest start (fuzzy comparison with the
/// given epsilon); ties fall back to job id, then index in job.
pub fn relative_order(arrangement: &Arrangement, compare_epsilon: f64) -> Vec<ActivityId> {
    let mut entries: Vec<&ArrangementEntry> = arrangement.iter().collect();
    entries.sort_by(|x, y| {
        x.latest_start
            .compare(&y.latest_start, compare_epsilon)
            .then_with(|| x.job_id.cmp(&y.job_id))
            .then_with(|| x.index_in_job.cmp(&y.index_in_job))
    });
    entries.into_iter().map(|e| e.activity_id.clone()).collect()
}
