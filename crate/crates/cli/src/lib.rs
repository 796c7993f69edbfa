//! File formats, artifact emission, and tooling around the scheduling
//! engine: instance and rule-base ingestion with precise error locations,
//! schedule/metrics JSON, Gantt rendering, and a seeded instance generator.

pub mod formats;
pub mod gantt;
pub mod gen;
pub mod metrics;

pub use formats::{default_rule_base, read_instance, read_rule_base, write_json, CliError};
