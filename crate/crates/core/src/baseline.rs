//! Classical baselines and desk-scale oracles.
//!
//! These make the heuristic's degenerate behavior checkable: the crisp
//! backward pass must match [`cpm_backward`] exactly, produced makespans are
//! bounded below by [`brute_force`]'s exhaustive optimum, and on the
//! single-machine shape the sequence is held against [`edd_single_machine`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::{Activity, ActivityId, Instance, ResourceId};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BaselineError {
    #[error("instance is not crisp: {entity} carries a fuzzy value")]
    NonCrisp { entity: String },
    #[error("instance has {actual} activities, over the exhaustive-search limit of {limit}")]
    TooLarge { actual: usize, limit: usize },
    #[error("instance shape not supported: {0}")]
    Shape(String),
}

fn require_crisp(instance: &Instance) -> Result<(), BaselineError> {
    let non_crisp = |entity: &str| BaselineError::NonCrisp {
        entity: String::from(entity),
    };
    for job in &instance.jobs {
        if !job.due_date.is_crisp() {
            return Err(non_crisp(job.id.as_str()));
        }
    }
    for act in &instance.activities {
        if !act.duration.is_crisp() || act.duration_overrides.values().any(|d| !d.is_crisp()) {
            return Err(non_crisp(act.id.as_str()));
        }
    }
    for res in &instance.resources {
        if !res.available_from.is_crisp() {
            return Err(non_crisp(res.id.as_str()));
        }
    }
    Ok(())
}

fn crisp_duration_on(act: &Activity, rid: &ResourceId) -> f64 {
    act.duration_on(rid).peak()
}

/// Classical backward pass over each job chain: latest starts from the due
/// date, using the fastest capable duration. Only defined on crisp input.
pub fn cpm_backward(instance: &Instance) -> Result<BTreeMap<ActivityId, f64>, BaselineError> {
    require_crisp(instance)?;
    let mut out = BTreeMap::new();
    for job in &instance.jobs {
        let mut latest_finish = job.due_date.peak();
        for aid in job.activity_ids.iter().rev() {
            let Some(act) = instance.activity(aid) else {
                continue;
            };
            let duration = act
                .capable_resources
                .iter()
                .map(|r| crisp_duration_on(act, r))
                .fold(act.duration.peak(), f64::min);
            let latest_start = latest_finish - duration;
            out.insert(aid.clone(), latest_start);
            latest_finish = latest_start;
        }
    }
    Ok(out)
}

/// One placement of the exhaustive optimum.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OraclePlacement {
    pub activity_id: ActivityId,
    pub resource_id: ResourceId,
    pub start: f64,
    pub finish: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BruteForceResult {
    pub makespan: f64,
    /// Lexicographically smallest optimal placement, sorted by activity id.
    pub allocations: Vec<OraclePlacement>,
}

/// Exhaustive minimal makespan over all dispatch orders and resource
/// assignments with semi-active timetabling (every activity starts at the
/// max of resource availability and predecessor finish, no inserted idle
/// time). Deterministic: among optima, the lexicographically smallest
/// placement wins.
pub fn brute_force(instance: &Instance, limit: usize) -> Result<BruteForceResult, BaselineError> {
    require_crisp(instance)?;
    let actual = instance.activities.len();
    if actual > limit {
        return Err(BaselineError::TooLarge { actual, limit });
    }

    let mut chains: Vec<Vec<&Activity>> = Vec::new();
    let mut jobs_sorted: Vec<_> = instance.jobs.iter().collect();
    jobs_sorted.sort_by(|x, y| x.id.cmp(&y.id));
    for job in jobs_sorted {
        let chain: Vec<&Activity> = job
            .activity_ids
            .iter()
            .filter_map(|id| instance.activity(id))
            .collect();
        if !chain.is_empty() {
            chains.push(chain);
        }
    }

    let mut resources: Vec<&ResourceId> = instance.resources.iter().map(|r| &r.id).collect();
    resources.sort();
    let res_index: BTreeMap<&ResourceId, usize> =
        resources.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let res_avail: Vec<f64> = resources
        .iter()
        .map(|rid| instance.resource(rid).map(|r| r.available_from.peak()).unwrap_or(0.0))
        .collect();

    struct Search<'a> {
        chains: Vec<Vec<&'a Activity>>,
        resources: Vec<&'a ResourceId>,
        res_index: BTreeMap<&'a ResourceId, usize>,
        best: Option<(f64, Vec<OraclePlacement>)>,
    }

    impl<'a> Search<'a> {
        fn dfs(
            &mut self,
            next: &mut Vec<usize>,
            avail: &mut Vec<f64>,
            job_finish: &mut Vec<f64>,
            placed: &mut Vec<OraclePlacement>,
            makespan: f64,
        ) {
            if placed.len() == self.chains.iter().map(|c| c.len()).sum::<usize>() {
                let mut key = placed.clone();
                key.sort_by(|x, y| x.activity_id.cmp(&y.activity_id));
                let better = match &self.best {
                    None => true,
                    Some((best_m, best_key)) => {
                        makespan < best_m - 1e-12
                            || ((makespan - best_m).abs() <= 1e-12
                                && placement_key(&key) < placement_key(best_key))
                    }
                };
                if better {
                    self.best = Some((makespan, key));
                }
                return;
            }
            for c in 0..self.chains.len() {
                if next[c] >= self.chains[c].len() {
                    continue;
                }
                let act = self.chains[c][next[c]];
                for rid in &act.capable_resources {
                    let Some(&r) = self.res_index.get(rid) else {
                        continue;
                    };
                    let start = avail[r].max(job_finish[c]);
                    let finish = start + crisp_duration_on(act, rid);
                    let new_makespan = makespan.max(finish);
                    if let Some((best_m, _)) = &self.best {
                        if new_makespan > *best_m + 1e-12 {
                            continue;
                        }
                    }
                    let (old_avail, old_finish) = (avail[r], job_finish[c]);
                    avail[r] = finish;
                    job_finish[c] = finish;
                    next[c] += 1;
                    placed.push(OraclePlacement {
                        activity_id: act.id.clone(),
                        resource_id: self.resources[r].clone(),
                        start,
                        finish,
                    });
                    self.dfs(next, avail, job_finish, placed, new_makespan);
                    placed.pop();
                    next[c] -= 1;
                    avail[r] = old_avail;
                    job_finish[c] = old_finish;
                }
            }
        }
    }

    fn placement_key(placed: &[OraclePlacement]) -> Vec<(&str, &str, u64)> {
        placed
            .iter()
            .map(|p| (p.activity_id.as_str(), p.resource_id.as_str(), p.start.to_bits()))
            .collect()
    }

    let n_chains = chains.len();
    let mut search = Search {
        chains,
        resources,
        res_index,
        best: None,
    };
    search.dfs(
        &mut alloc::vec![0; n_chains],
        &mut res_avail.clone(),
        &mut alloc::vec![0.0; n_chains],
        &mut Vec::new(),
        0.0,
    );

    let (makespan, allocations) = search.best.unwrap_or((0.0, Vec::new()));
    Ok(BruteForceResult {
        makespan,
        allocations,
    })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EddResult {
    /// Activity ids in earliest-due-date order.
    pub sequence: Vec<ActivityId>,
    pub max_lateness: f64,
}

/// Earliest-due-date sequencing on the single-machine shape (one resource,
/// one activity per job, crisp). Stable: equal due dates keep instance
/// order. This order minimizes the maximum lateness, which is reported.
pub fn edd_single_machine(instance: &Instance) -> Result<EddResult, BaselineError> {
    require_crisp(instance)?;
    if instance.resources.len() != 1 {
        return Err(BaselineError::Shape(format!(
            "need exactly one resource, got {}",
            instance.resources.len()
        )));
    }
    for job in &instance.jobs {
        if job.activity_ids.len() != 1 {
            return Err(BaselineError::Shape(format!(
                "job {} has {} activities, need exactly one",
                job.id,
                job.activity_ids.len()
            )));
        }
    }

    let mut jobs: Vec<_> = instance.jobs.iter().collect();
    jobs.sort_by(|x, y| x.due_date.peak().total_cmp(&y.due_date.peak()));

    let mut t = instance.resources[0].available_from.peak();
    let mut sequence = Vec::with_capacity(jobs.len());
    let mut max_lateness = 0.0f64;
    let mut first = true;
    for job in jobs {
        let aid = &job.activity_ids[0];
        let act = instance
            .activity(aid)
            .ok_or_else(|| BaselineError::Shape(format!("job {} references unknown activity", job.id)))?;
        t += crisp_duration_on(act, &instance.resources[0].id);
        let lateness = t - job.due_date.peak();
        max_lateness = if first { lateness } else { max_lateness.max(lateness) };
        first = false;
        sequence.push(aid.clone());
    }
    if first {
        max_lateness = 0.0;
    }
    Ok(EddResult {
        sequence,
        max_lateness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::TriFuzzy;
    use crate::model::testkit::*;
    use crate::model::Config;
    use crate::retrograde::backward_pass;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn cpm_hand_examples() {
        let inst = Instance {
            jobs: vec![job("J1", &["A1", "A2"], TriFuzzy::crisp(10.0), 0.5)],
            activities: vec![
                activity("A1", "J1", 0, TriFuzzy::crisp(3.0), &["R1"]),
                activity("A2", "J1", 1, TriFuzzy::crisp(2.0), &["R1"]),
            ],
            resources: vec![resource("R1")],
            config: Config::default(),
        };
        let ls = cpm_backward(&inst).unwrap();
        assert_eq!(ls[&ActivityId::from("A1")], 5.0);
        assert_eq!(ls[&ActivityId::from("A2")], 8.0);

        let inst = Instance {
            jobs: vec![job("J1", &["A1"], TriFuzzy::crisp(10.0), 0.5)],
            activities: vec![activity("A1", "J1", 0, TriFuzzy::crisp(10.0), &["R1"])],
            resources: vec![resource("R1")],
            config: Config::default(),
        };
        assert_eq!(cpm_backward(&inst).unwrap()[&ActivityId::from("A1")], 0.0);

        let inst = Instance {
            jobs: vec![job("J1", &["A1"], TriFuzzy::crisp(5.0), 0.5)],
            activities: vec![activity("A1", "J1", 0, TriFuzzy::crisp(7.0), &["R1"])],
            resources: vec![resource("R1")],
            config: Config::default(),
        };
        assert_eq!(cpm_backward(&inst).unwrap()[&ActivityId::from("A1")], -2.0);
    }

    #[test]
    fn cpm_rejects_fuzzy_input() {
        let mut inst = two_job_instance();
        inst.activities[0].duration = TriFuzzy::new(2.0, 3.0, 4.0).unwrap();
        assert!(matches!(
            cpm_backward(&inst),
            Err(BaselineError::NonCrisp { .. })
        ));
    }

    #[test]
    fn brute_force_hand_examples() {
        let inst = Instance {
            jobs: vec![job("J1", &["A1"], TriFuzzy::crisp(10.0), 0.5)],
            activities: vec![activity("A1", "J1", 0, TriFuzzy::crisp(4.0), &["R1"])],
            resources: vec![resource("R1")],
            config: Config::default(),
        };
        assert_eq!(brute_force(&inst, 8).unwrap().makespan, 4.0);

        // two independent length-3 activities on two identical resources run
        // in parallel
        let inst = Instance {
            jobs: vec![
                job("J1", &["A1"], TriFuzzy::crisp(10.0), 0.5),
                job("J2", &["B1"], TriFuzzy::crisp(10.0), 0.5),
            ],
            activities: vec![
                activity("A1", "J1", 0, TriFuzzy::crisp(3.0), &["R1", "R2"]),
                activity("B1", "J2", 0, TriFuzzy::crisp(3.0), &["R1", "R2"]),
            ],
            resources: vec![resource("R1"), resource("R2")],
            config: Config::default(),
        };
        assert_eq!(brute_force(&inst, 8).unwrap().makespan, 3.0);
    }

    fn crossing_instance() -> Instance {
        // two jobs crossing two machines in opposite order
        let mut a11 = activity("A11", "J1", 0, TriFuzzy::crisp(3.0), &["M1"]);
        let mut a12 = activity("A12", "J1", 1, TriFuzzy::crisp(2.0), &["M2"]);
        let mut a21 = activity("A21", "J2", 0, TriFuzzy::crisp(2.0), &["M2"]);
        let mut a22 = activity("A22", "J2", 1, TriFuzzy::crisp(1.0), &["M1"]);
        for a in [&mut a11, &mut a12, &mut a21, &mut a22] {
            a.capable_resources = a.capable_resources.clone();
        }
        Instance {
            jobs: vec![
                job("J1", &["A11", "A12"], TriFuzzy::crisp(10.0), 0.5),
                job("J2", &["A21", "A22"], TriFuzzy::crisp(10.0), 0.5),
            ],
            activities: vec![a11, a12, a21, a22],
            resources: vec![resource("M1"), resource("M2")],
            config: Config::default(),
        }
    }

    // Second, independent implementation: enumerate every precedence-valid
    // permutation and every assignment, timetable semi-actively, take the
    // minimum. Exponential, used only on tiny instances.
    fn order_enumeration_optimum(instance: &Instance) -> f64 {
        fn perms(items: &[usize]) -> Vec<Vec<usize>> {
            if items.is_empty() {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for (i, &x) in items.iter().enumerate() {
                let rest: Vec<usize> = items
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, v)| *v)
                    .collect();
                for mut p in perms(&rest) {
                    p.insert(0, x);
                    out.push(p);
                }
            }
            out
        }

        let acts = &instance.activities;
        let ids: Vec<usize> = (0..acts.len()).collect();
        let mut best = f64::INFINITY;
        for perm in perms(&ids) {
            // precedence-valid: within a job, indices appear in order
            let mut pos = BTreeMap::new();
            for (i, &a) in perm.iter().enumerate() {
                pos.insert(&acts[a].id, i);
            }
            let valid = instance.jobs.iter().all(|j| {
                j.activity_ids
                    .windows(2)
                    .all(|w| pos.get(&w[0]).unwrap_or(&0) < pos.get(&w[1]).unwrap_or(&0))
            });
            if !valid {
                continue;
            }
            // all assignments, odometer-style
            let caps: Vec<Vec<&ResourceId>> = perm
                .iter()
                .map(|&a| acts[a].capable_resources.iter().collect())
                .collect();
            let mut counter = vec![0usize; perm.len()];
            loop {
                let mut avail: BTreeMap<&ResourceId, f64> = instance
                    .resources
                    .iter()
                    .map(|r| (&r.id, r.available_from.peak()))
                    .collect();
                let mut job_finish: BTreeMap<&crate::model::JobId, f64> = BTreeMap::new();
                let mut makespan = 0.0f64;
                for (k, &a) in perm.iter().enumerate() {
                    let act = &acts[a];
                    let rid = caps[k][counter[k]];
                    let start = avail[rid].max(*job_finish.get(&act.job_id).unwrap_or(&0.0));
                    let finish = start + crisp_duration_on(act, rid);
                    avail.insert(rid, finish);
                    job_finish.insert(&act.job_id, finish);
                    makespan = makespan.max(finish);
                }
                best = best.min(makespan);
                // advance the odometer
                let mut k = 0;
                loop {
                    if k == counter.len() {
                        break;
                    }
                    counter[k] += 1;
                    if counter[k] < caps[k].len() {
                        break;
                    }
                    counter[k] = 0;
                    k += 1;
                }
                if k == counter.len() {
                    break;
                }
            }
        }
        if best.is_finite() {
            best
        } else {
            0.0
        }
    }

    #[test]
    fn crossing_instance_matches_second_enumeration() {
        let inst = crossing_instance();
        let got = brute_force(&inst, 8).unwrap();
        assert_eq!(got.makespan, 5.0);
        assert_eq!(order_enumeration_optimum(&inst), 5.0);
        // placements are feasible and deterministic
        let again = brute_force(&inst, 8).unwrap();
        assert_eq!(got, again);
    }

    #[test]
    fn brute_force_refuses_oversized_instances() {
        let inst = crossing_instance();
        assert!(matches!(
            brute_force(&inst, 3),
            Err(BaselineError::TooLarge { actual: 4, limit: 3 })
        ));
    }

    #[test]
    fn edd_hand_examples() {
        let mk = |dues: &[f64], durs: &[f64]| {
            let jobs = dues
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    job(
                        &alloc::format!("J{}", i + 1),
                        &[&alloc::format!("A{}", i + 1)],
                        TriFuzzy::crisp(*d),
                        0.5,
                    )
                })
                .collect();
            let activities = durs
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    activity(
                        &alloc::format!("A{}", i + 1),
                        &alloc::format!("J{}", i + 1),
                        0,
                        TriFuzzy::crisp(*d),
                        &["R1"],
                    )
                })
                .collect();
            Instance {
                jobs,
                activities,
                resources: vec![resource("R1")],
                config: Config::default(),
            }
        };

        let got = edd_single_machine(&mk(&[9.0, 4.0, 7.0], &[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(
            got.sequence,
            vec![ActivityId::from("A2"), ActivityId::from("A3"), ActivityId::from("A1")]
        );

        // equal due dates preserve instance order
        let got = edd_single_machine(&mk(&[5.0, 5.0, 5.0], &[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(
            got.sequence,
            vec![ActivityId::from("A1"), ActivityId::from("A2"), ActivityId::from("A3")]
        );

        let got = edd_single_machine(&mk(&[4.0, 2.0], &[2.0, 2.0])).unwrap();
        assert_eq!(got.max_lateness, 0.0);
    }

    #[test]
    fn edd_rejects_wrong_shapes() {
        let inst = two_job_instance(); // two resources, multi-activity job
        assert!(matches!(
            edd_single_machine(&inst),
            Err(BaselineError::Shape(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        // the DFS oracle and the naive order-enumeration agree on tiny
        // random crisp instances
        #[test]
        fn dfs_matches_order_enumeration(
            durs in proptest::collection::vec(1.0f64..5.0, 1..5),
            two_jobs in proptest::bool::ANY,
            shared in proptest::bool::ANY,
        ) {
            let n = durs.len();
            let mut inst = Instance {
                jobs: vec![],
                activities: vec![],
                resources: vec![resource("R1"), resource("R2")],
                config: Config::default(),
            };
            let n_jobs = if two_jobs && n > 1 { 2 } else { 1 };
            let mut per_job: Vec<Vec<String>> = alloc::vec![Vec::new(); n_jobs];
            for (i, d) in durs.iter().enumerate() {
                let j = i % n_jobs;
                let id = alloc::format!("A{i}");
                let caps: &[&str] = if shared { &["R1", "R2"] } else { &["R1"] };
                inst.activities.push(activity(
                    &id,
                    &alloc::format!("J{j}"),
                    (i / n_jobs) as u32,
                    TriFuzzy::crisp(*d),
                    caps,
                ));
                per_job[j].push(id);
            }
            for (j, ids) in per_job.iter().enumerate() {
                inst.jobs.push(job(
                    &alloc::format!("J{j}"),
                    &ids.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                    TriFuzzy::crisp(20.0),
                    0.5,
                ));
            }
            let dfs = brute_force(&inst, 8).unwrap().makespan;
            let naive = order_enumeration_optimum(&inst);
            prop_assert!((dfs - naive).abs() <= 1e-9, "dfs {dfs} vs naive {naive}");
        }

        // crisp equivalence between the two backward passes
        #[test]
        fn cpm_equals_fuzzy_backward_pass_on_crisp_instances(
            due in 5.0f64..60.0,
            durs in proptest::collection::vec(0.5f64..8.0, 1..6),
        ) {
            let ids: Vec<String> = (0..durs.len()).map(|i| alloc::format!("A{i}")).collect();
            let inst = Instance {
                jobs: vec![job(
                    "J0",
                    &ids.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                    TriFuzzy::crisp(due),
                    0.5,
                )],
                activities: durs
                    .iter()
                    .enumerate()
                    .map(|(i, d)| activity(&ids[i], "J0", i as u32, TriFuzzy::crisp(*d), &["R1"]))
                    .collect(),
                resources: vec![resource("R1")],
                config: Config::default(),
            };
            let classical = cpm_backward(&inst).unwrap();
            let arrangement = backward_pass(&inst);
            for (id, want) in &classical {
                let got = arrangement.get(id).unwrap().latest_start;
                prop_assert!(got.is_crisp());
                prop_assert!((got.peak() - want).abs() <= 1e-9);
            }
        }
    }
}
