//! Seeded random instance generator.
//!
//! Output is a deterministic function of the parameters: the same seed and
//! sizes always produce the same file, byte for byte. The fuzziness factor
//! scales how far duration and due-date supports spread around their peaks;
//! zero produces a fully crisp instance.

use std::collections::{BTreeMap, BTreeSet};

use fjs_core::{Activity, Config, Instance, Job, Resource, TriFuzzy};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub jobs: usize,
    pub activities_per_job: usize,
    pub resources: usize,
    pub seed: u64,
    /// Relative spread of fuzzy values, in [0, 1]; 0 = crisp.
    pub fuzziness: f64,
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn fuzzy_around(rng: &mut ChaCha8Rng, peak: f64, fuzziness: f64) -> TriFuzzy {
    if fuzziness <= 0.0 {
        return TriFuzzy::crisp(round3(peak));
    }
    let m = round3(peak);
    let a = round3(m * (1.0 - fuzziness * rng.random::<f64>())).clamp(0.0, m);
    let b = round3(m * (1.0 + fuzziness * rng.random::<f64>())).max(m);
    TriFuzzy::new(a, m, b).expect("spread stays ordered")
}

pub fn generate(params: &GenParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n_resources = params.resources.max(1);
    let acts_per_job = params.activities_per_job.max(1);
    let width = |n: usize| n.to_string().len();

    let resources: Vec<Resource> = (1..=n_resources)
        .map(|i| Resource {
            id: format!("R{:0w$}", i, w = width(n_resources)).into(),
            available_from: if rng.random_bool(0.2) {
                TriFuzzy::crisp(round3(rng.random_range(0.0..2.0)))
            } else {
                TriFuzzy::crisp(0.0)
            },
            strategic_weight: round3(rng.random::<f64>()),
        })
        .collect();

    let mut jobs = Vec::new();
    let mut activities = Vec::new();
    let mut max_duration = 0.0f64;
    let mut total_work = 0.0f64;

    for j in 1..=params.jobs {
        let job_id = format!("J{:0w$}", j, w = width(params.jobs.max(1)));
        let mut activity_ids = Vec::new();
        let mut work = 0.0;
        for k in 0..acts_per_job {
            let id = format!("{job_id}-{}", k + 1);
            let peak = rng.random_range(1..=9) as f64;
            let duration = fuzzy_around(&mut rng, peak, params.fuzziness);

            let mut order: Vec<usize> = (0..n_resources).collect();
            order.shuffle(&mut rng);
            let count = 1 + rng.random_range(0..n_resources);
            let capable: BTreeSet<_> = order[..count]
                .iter()
                .map(|i| resources[*i].id.clone())
                .collect();

            let mut duration_overrides = BTreeMap::new();
            for rid in capable.iter().skip(1) {
                if rng.random_bool(0.2) {
                    let factor = rng.random_range(0.8..1.5);
                    duration_overrides
                        .insert(rid.clone(), fuzzy_around(&mut rng, peak * factor, params.fuzziness));
                }
            }

            work += duration.centroid();
            max_duration = max_duration.max(duration.centroid());
            activities.push(Activity {
                id: id.clone().into(),
                job_id: job_id.clone().into(),
                index_in_job: k as u32,
                duration,
                capable_resources: capable,
                duration_overrides,
            });
            activity_ids.push(id.into());
        }
        total_work += work;
        let due_peak = work * rng.random_range(1.2..2.2) + 1.0;
        jobs.push(Job {
            id: job_id.into(),
            activity_ids,
            due_date: fuzzy_around(&mut rng, due_peak, params.fuzziness * 0.5),
            importance: round3(rng.random::<f64>()),
        });
    }

    let horizon = round3(
        (2.5 * max_duration)
            .max(0.6 * total_work / n_resources as f64)
            .max(10.0),
    );
    Instance {
        jobs,
        activities,
        resources,
        config: Config {
            horizon,
            step: round3(horizon / 2.0),
            overlap: round3(horizon / 2.0),
            seed: params.seed,
            ..Config::default()
        },
    }
}
