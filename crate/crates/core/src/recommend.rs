//! Allocation recommendations: first a preferred sequence per resource, then
//! a resource-comprehensive pass that removes redundancy and balances load.
//!
//! An activity capable on several resources starts out on all of their lists
//! (usually with different priorities); since it may be allocated at most
//! once, an iterative rating sweep assigns each duplicated activity to the
//! resource where its load-adjusted score is highest, repeated until nothing
//! changes, changes stop being significant, or the iteration cap is hit.
//! Nothing is committed here — the schedule is read, never written — so no
//! activity gets pinned down before the allocation stage.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::Serialize;

use crate::fuzzy::TriFuzzy;
use crate::model::{ActivityId, Instance, ResourceId, Schedule};
use crate::rating::{infer, resource_criteria, tier_indices, RatingError, RuleBase};
use crate::retrograde::Arrangement;

/// One entry of a resource's preferred sequence. Context entries are
/// recently finished allocations kept for sequencing perception and load
/// accounting only; they are never allocatable again.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceEntry {
    pub activity_id: ActivityId,
    pub score: TriFuzzy,
    pub context: bool,
}

/// Preferred allocation sequence of one resource.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceList {
    pub resource_id: ResourceId,
    pub entries: Vec<ResourceEntry>,
}

/// Redundancy-free recommendations per resource plus fixpoint diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecommendationSet {
    pub lists: BTreeMap<ResourceId, ResourceList>,
    pub iteration_count: u32,
    pub converged: bool,
}

/// Builds every resource's preferred sequence from the job-level priorities.
///
/// Each capable activity is rescored with resource-specific criteria, but the
/// job-level partial order is respected as much as possible: an activity may
/// precede a higher job-tier activity only when their job-level scores
/// compare equal, so resource scores reorder within tiers only. Allocations
/// whose crisp finish falls inside the trailing overlap window are prepended
/// as non-allocatable context.
pub fn resource_specific(
    prioritized: &[(ActivityId, TriFuzzy)],
    schedule: &Schedule,
    instance: &Instance,
    arrangement: &Arrangement,
    rule_base: &RuleBase,
    now: f64,
) -> Result<BTreeMap<ResourceId, ResourceList>, RatingError> {
    let cfg = &instance.config;
    let tiers = tier_indices(prioritized, cfg.compare_epsilon);
    let tier_count = tiers.last().map(|t| t + 1).unwrap_or(0);

    let mut out = BTreeMap::new();
    for resource in &instance.resources {
        let mut entries: Vec<ResourceEntry> = Vec::new();

        let mut recent: Vec<_> = schedule
            .allocations_on(&resource.id)
            .filter(|a| a.crisp_finish > now - cfg.overlap)
            .collect();
        recent.sort_by(|x, y| {
            x.crisp_start
                .total_cmp(&y.crisp_start)
                .then_with(|| x.activity_id.cmp(&y.activity_id))
        });
        entries.extend(recent.into_iter().map(|a| ResourceEntry {
            activity_id: a.activity_id.clone(),
            score: TriFuzzy::crisp(0.0),
            context: true,
        }));

        for tier in 0..tier_count {
            let mut scored: Vec<ResourceEntry> = Vec::new();
            for (pos, (id, _)) in prioritized.iter().enumerate() {
                if tiers[pos] != tier {
                    continue;
                }
                let Some(activity) = instance.activity(id) else {
                    continue;
                };
                if !activity.capable_resources.contains(&resource.id) {
                    continue;
                }
                let criteria =
                    resource_criteria(activity, resource, instance, arrangement, schedule, now);
                scored.push(ResourceEntry {
                    activity_id: id.clone(),
                    score: infer(rule_base, &criteria.inputs())?,
                    context: false,
                });
            }
            scored.sort_by(|x, y| y.score.compare(&x.score, cfg.compare_epsilon));
            entries.extend(scored);
        }

        out.insert(
            resource.id.clone(),
            ResourceList {
                resource_id: resource.id.clone(),
                entries,
            },
        );
    }
    Ok(out)
}

/// Removes redundancy across the resource-specific lists and trims each list
/// to its window capacity.
///
/// Sequential rating sweeps: activities are visited in descending best-score
/// order; each is assigned to the capable resource maximizing its effective
/// score, the raw defuzzified score shifted by `-lambda * (load/mean - 1)`
/// where load is the projected load (context entries plus currently assigned
/// work). Ties go to the lighter resource, then the lexically smaller id.
/// Sweeps repeat until an entire sweep changes nothing, the largest effective
/// score change drops to the significance epsilon, or the iteration cap is
/// reached.
pub fn resource_comprehensive(
    lists: &BTreeMap<ResourceId, ResourceList>,
    instance: &Instance,
) -> RecommendationSet {
    let cfg = &instance.config;

    let mut candidates: BTreeMap<ActivityId, Vec<(ResourceId, f64)>> = BTreeMap::new();
    let mut best_score: BTreeMap<ActivityId, TriFuzzy> = BTreeMap::new();
    let mut loads: BTreeMap<ResourceId, f64> = BTreeMap::new();

    for (rid, list) in lists {
        let mut load = 0.0;
        for entry in &list.entries {
            let Some(activity) = instance.activity(&entry.activity_id) else {
                continue;
            };
            if entry.context {
                load += activity.duration_on(rid).centroid();
                continue;
            }
            candidates
                .entry(entry.activity_id.clone())
                .or_default()
                .push((rid.clone(), entry.score.centroid()));
            best_score
                .entry(entry.activity_id.clone())
                .and_modify(|s| {
                    if entry.score.compare(s, cfg.compare_epsilon) == core::cmp::Ordering::Greater {
                        *s = entry.score;
                    }
                })
                .or_insert(entry.score);
        }
        loads.insert(rid.clone(), load);
    }

    // highest best score first; the pre-sorted id order breaks ties
    let mut sweep_order: Vec<ActivityId> = candidates.keys().cloned().collect();
    sweep_order.sort_by(|x, y| best_score[y].compare(&best_score[x], cfg.compare_epsilon));

    let duration = |a: &ActivityId, r: &ResourceId| -> f64 {
        instance
            .activity(a)
            .map(|act| act.duration_on(r).centroid())
            .unwrap_or(0.0)
    };

    let mut assignment: BTreeMap<ActivityId, ResourceId> = BTreeMap::new();
    let mut prev_eff: BTreeMap<(ActivityId, ResourceId), f64> = BTreeMap::new();
    let mut iterations = 0u32;
    let mut converged = false;

    while iterations < cfg.max_fixpoint_iters {
        iterations += 1;
        let mut changed = false;
        let mut max_delta = 0.0f64;
        let mut cur_eff: BTreeMap<(ActivityId, ResourceId), f64> = BTreeMap::new();

        for aid in &sweep_order {
            if let Some(old) = assignment.get(aid) {
                *loads.get_mut(old).expect("assigned resource has a load slot") -=
                    duration(aid, old);
            }
            let mean = if loads.is_empty() {
                0.0
            } else {
                loads.values().sum::<f64>() / loads.len() as f64
            };

            let mut best: Option<(&ResourceId, f64)> = None;
            for (rid, raw) in &candidates[aid] {
                let adjustment = if mean > 1e-12 {
                    cfg.load_balance_lambda * (loads[rid] / mean - 1.0)
                } else {
                    0.0
                };
                let eff = raw - adjustment;
                cur_eff.insert((aid.clone(), rid.clone()), eff);
                let replace = match best {
                    None => true,
                    Some((best_r, best_eff)) => {
                        if eff > best_eff + cfg.compare_epsilon {
                            true
                        } else if (eff - best_eff).abs() <= cfg.compare_epsilon {
                            loads[rid] < loads[best_r] - 1e-12
                        } else {
                            false
                        }
                    }
                };
                if replace {
                    best = Some((rid, eff));
                }
            }
            let (chosen, _) = best.expect("every swept activity has candidates");
            *loads.get_mut(chosen).expect("candidate resource has a load slot") +=
                duration(aid, chosen);
            if assignment.get(aid) != Some(chosen) {
                assignment.insert(aid.clone(), chosen.clone());
                changed = true;
            }
        }

        for (key, eff) in &cur_eff {
            if let Some(prev) = prev_eff.get(key) {
                max_delta = max_delta.max((eff - prev).abs());
            }
        }
        let had_prev = !prev_eff.is_empty();
        prev_eff = cur_eff;

        if !changed {
            converged = true;
            break;
        }
        if had_prev && max_delta <= cfg.significance_epsilon {
            converged = true;
            break;
        }
    }

    // per resource: original order filtered to its assignees, cut to the
    // window capacity (the head entry always survives so progress is possible
    // even when a single duration exceeds the horizon)
    let mut out = BTreeMap::new();
    for (rid, list) in lists {
        let mut entries = Vec::new();
        let mut cumulative = 0.0;
        for entry in &list.entries {
            if entry.context || assignment.get(&entry.activity_id) != Some(rid) {
                continue;
            }
            let d = duration(&entry.activity_id, rid);
            if entries.is_empty() || cumulative + d <= cfg.horizon + 1e-9 {
                cumulative += d;
                entries.push(entry.clone());
            } else {
                break;
            }
        }
        out.insert(
            rid.clone(),
            ResourceList {
                resource_id: rid.clone(),
                entries,
            },
        );
    }

    RecommendationSet {
        lists: out,
        iteration_count: iterations,
        converged,
    }
}
