//! Reading and writing the JSON artifacts.
//!
//! Parse errors name the file, the JSON pointer of the offending value, and
//! the line/column; rule-base files are additionally checked structurally
//! and rejected with one message per issue. Unknown keys are rejected
//! everywhere.

use std::fs;
use std::path::{Path, PathBuf};

use fjs_core::rating::RuleBase;
use fjs_core::Instance;
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} at {pointer}: {message}")]
    Schema {
        path: PathBuf,
        pointer: String,
        message: String,
    },
    #[error("{path}: invalid rule base:\n  {}", issues.join("\n  "))]
    Rules { path: PathBuf, issues: Vec<String> },
}

/// Parses JSON tracking the path to any error as a JSON pointer.
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let pointer = {
            let mut p = String::new();
            for segment in err.path().iter() {
                use serde_path_to_error::Segment;
                p.push('/');
                match segment {
                    Segment::Seq { index } => p.push_str(&index.to_string()),
                    Segment::Map { key } => p.push_str(key),
                    Segment::Enum { variant } => p.push_str(variant),
                    Segment::Unknown => p.push('?'),
                }
            }
            if p.is_empty() {
                p.push('/');
            }
            p
        };
        let inner = err.into_inner();
        CliError::Schema {
            path: path.to_path_buf(),
            pointer,
            message: format!("{inner} (line {}, column {})", inner.line(), inner.column()),
        }
    })
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_instance(path: &Path) -> Result<Instance, CliError> {
    parse_json(path, &read_to_string(path)?)
}

/// Reads and structurally validates a rule-base file.
pub fn read_rule_base(path: &Path) -> Result<RuleBase, CliError> {
    let rule_base: RuleBase = parse_json(path, &read_to_string(path)?)?;
    let issues = rule_base.issues();
    if issues.is_empty() {
        Ok(rule_base)
    } else {
        Err(CliError::Rules {
            path: path.to_path_buf(),
            issues,
        })
    }
}

/// The rule base shipped with the tool (`data/default_rules.json`), used when
/// no `--rules` file is given. The file is the editable artifact; this is a
/// compiled-in copy of it.
pub fn default_rule_base() -> RuleBase {
    let rule_base: RuleBase = serde_json::from_str(include_str!("../data/default_rules.json"))
        .expect("shipped rule base parses");
    debug_assert!(rule_base.issues().is_empty());
    rule_base
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable artifact");
    text.push('\n');
    text
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    fs::write(path, to_json_string(value)).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
