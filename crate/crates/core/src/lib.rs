//! Core engine for job-shop scheduling under vague data.
//!
//! Times, durations, due dates, and scores are all carried as triangular
//! fuzzy numbers, so sharp and vague quantities flow through the same
//! arithmetic. A schedule is built iteratively: a fuzzy backward pass
//! arranges activities relative to their due dates, a rolling time window
//! restricts what is considered per round, a rule-based rating engine
//! prioritizes the selected activities, per-resource and cross-resource
//! recommendation stages resolve who should run what, and the allocation
//! stage commits the recommendations and advances the window until every
//! activity is placed.
//!
//! The crate is `no_std` (with `alloc`); file formats, generators, and the
//! command-line front end live in the companion `fjs-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod allocate;
pub mod baseline;
pub mod fuzzy;
pub mod horizon;
pub mod model;
pub mod rating;
pub mod recommend;
pub mod retrograde;

pub use fuzzy::{AlphaInterval, Defuzz, FuzzyError, TriFuzzy};
pub use model::{
    Activity, ActivityId, Allocation, Config, Instance, Job, JobId, Resource, ResourceId,
    Schedule, Violation,
};
