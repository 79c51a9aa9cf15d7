use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{BackendError, CompletionRequest, ModelBackend};

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Entry {
    Single(String),
    PerRun(Vec<String>),
}

/// Deterministic stand-in model: canned responses keyed by case id.
///
/// The fixture is a JSON object mapping each case id either to one response
/// (used for every run) or to a list with one response per run index.
#[derive(Debug, Clone)]
pub struct ReplayBackend {
    label: String,
    entries: HashMap<String, Entry>,
}

impl ReplayBackend {
    pub fn from_json_str(label: impl Into<String>, text: &str) -> Result<Self, BackendError> {
        let entries = serde_json::from_str(text).map_err(|e| BackendError::FixtureSyntax(e.to_string()))?;
        Ok(Self {
            label: label.into(),
            entries,
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, BackendError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| BackendError::FixtureSyntax(format!("{}: {e}", path.display())))?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "replay".into());
        Self::from_json_str(label, &text)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn response(&self, case_id: &str, run_index: usize) -> Result<&str, BackendError> {
        let missing = || BackendError::MissingReplayEntry {
            case_id: case_id.into(),
            run_index,
        };
        match self.entries.get(case_id).ok_or_else(missing)? {
            Entry::Single(text) => Ok(text),
            Entry::PerRun(texts) => texts.get(run_index).map(String::as_str).ok_or_else(missing),
        }
    }
}

impl ModelBackend for ReplayBackend {
    fn identity(&self) -> String {
        self.label.clone()
    }

    fn complete(&self, req: &CompletionRequest<'_>) -> Result<String, BackendError> {
        self.response(req.case_id, req.run_index).map(str::to_owned)
    }
}

pub fn replay_backend(path: impl AsRef<Path>) -> Result<ReplayBackend, BackendError> {
    ReplayBackend::from_path(path)
}
