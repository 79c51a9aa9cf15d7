use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;
use serde_json::{Map, Value};
use thiserror::Error;

use super::{EvalCase, Expectation, ScenarioKind};
use crate::corpus::ToolDefinition;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read dataset: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {detail}")]
    Json { line: usize, detail: String },
    #[error("line {line}: case {id:?}: {reason}")]
    Invalid { line: usize, id: String, reason: String },
    #[error("line {line}: duplicate case id {id:?}")]
    DuplicateId { line: usize, id: String },
}

/// On-disk line shape; `should_call` defaults from the scenario.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCase {
    id: String,
    scenario: ScenarioKind,
    #[serde(default)]
    tools: Vec<ToolDefinition>,
    query: String,
    #[serde(default)]
    should_call: Option<bool>,
    #[serde(default)]
    expected_function: Option<String>,
    #[serde(default)]
    expected_parameters: Option<Map<String, Value>>,
}

/// Parses and validates one dataset line.
pub fn parse_case(line_no: usize, line: &str) -> Result<EvalCase, DatasetError> {
    let raw: RawCase = serde_json::from_str(line).map_err(|e| DatasetError::Json {
        line: line_no,
        detail: e.to_string(),
    })?;
    let derived = raw.scenario.expects_call();
    let should_call = raw.should_call.unwrap_or(derived);
    if should_call != derived {
        log::warn!(
            "line {line_no}: case {:?} overrides should_call={derived} implied by {}",
            raw.id,
            raw.scenario
        );
    }
    let case = EvalCase {
        id: raw.id,
        scenario: raw.scenario,
        tools: raw.tools,
        query: raw.query,
        expectation: Expectation {
            should_call,
            expected_function: raw.expected_function,
            expected_parameters: raw.expected_parameters,
        },
    };
    case.validate().map_err(|reason| DatasetError::Invalid {
        line: line_no,
        id: case.id.clone(),
        reason,
    })?;
    Ok(case)
}

/// Reads an NDJSON dataset. Blank lines are skipped; ids must be unique.
pub fn read_dataset<R: BufRead>(reader: R) -> Result<Vec<EvalCase>, DatasetError> {
    let mut cases = Vec::new();
    let mut ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let case = parse_case(idx + 1, &line)?;
        if !ids.insert(case.id.clone()) {
            return Err(DatasetError::DuplicateId {
                line: idx + 1,
                id: case.id,
            });
        }
        cases.push(case);
    }
    Ok(cases)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<EvalCase>, DatasetError> {
    read_dataset(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    const FCR: &str = r#"{"id":"a","scenario":"function_call_required","tools":[{"name":"f","description":"d","parameters":{}}],"query":"q","expected_function":"f","expected_parameters":{"x":1}}"#;
    const MISS: &str = r#"{"id":"b","scenario":"missing_required_parameters","tools":[{"name":"f","description":"d","parameters":{}}],"query":"q"}"#;

    #[test]
    fn should_call_derived_from_scenario() {
        let cases = read_dataset(Cursor::new(format!("{FCR}\n\n{MISS}\n"))).unwrap();
        assert_eq!(cases.len(), 2);
        assert!(cases[0].expectation.should_call);
        assert!(!cases[1].expectation.should_call);
    }

    #[test]
    fn explicit_should_call_overrides() {
        let line = r#"{"id":"c","scenario":"missing_required_parameters","tools":[{"name":"f","description":"d","parameters":{}}],"query":"q","should_call":true,"expected_function":"f"}"#;
        let case = parse_case(1, line).unwrap();
        assert!(case.expectation.should_call);
    }

    #[test]
    fn invariants_are_enforced() {
        let no_fn = r#"{"id":"d","scenario":"no_functions_available","tools":[{"name":"f","description":"d","parameters":{}}],"query":"q"}"#;
        assert!(matches!(parse_case(4, no_fn), Err(DatasetError::Invalid { line: 4, .. })));
        let missing_fn = r#"{"id":"e","scenario":"ambiguous_selection","tools":[],"query":"q"}"#;
        assert!(matches!(parse_case(1, missing_fn), Err(DatasetError::Invalid { .. })));
        let bad_scenario = r#"{"id":"e","scenario":"other","query":"q"}"#;
        assert!(matches!(parse_case(1, bad_scenario), Err(DatasetError::Json { .. })));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = read_dataset(Cursor::new(format!("{FCR}\n{FCR}\n"))).unwrap_err();
        assert!(matches!(err, DatasetError::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn round_trips_through_serialization() {
        let case = parse_case(1, FCR).unwrap();
        let line = serde_json::to_string(&case).unwrap();
        assert_eq!(parse_case(1, &line).unwrap(), case);
    }
}
