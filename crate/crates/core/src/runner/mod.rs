//! Evaluation runs: render, query, extract, judge, collect.

mod http;
mod replay;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extraction::{extract_with, ExtractOptions, Extraction};
use crate::judgment::{EvalCase, Judge, Judgement, Verdict};
use crate::prompting::{render_prompt, PromptMode, PromptRequest};

pub use http::{http_backend, HttpBackend, HttpConfig};
pub use replay::{replay_backend, ReplayBackend};

pub const DEFAULT_TEMPERATURE: f64 = 0.1;
pub const DEFAULT_MAX_NEW_TOKENS: u32 = 1024;
pub const DEFAULT_RUNS: usize = 3;
pub const DEFAULT_MAX_RETRIES: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub temperature: f64,
    pub max_new_tokens: u32,
}

impl Default for GenerationParams {
    fn default() -> Self {
        Self {
            temperature: DEFAULT_TEMPERATURE,
            max_new_tokens: DEFAULT_MAX_NEW_TOKENS,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackendError {
    #[error("HTTP {code}: {body}")]
    HttpStatus { code: u16, body: String },
    #[error("request timed out")]
    Timeout,
    #[error("malformed API response: {0}")]
    MalformedApiResponse(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("no replay entry for case {case_id:?} run {run_index}")]
    MissingReplayEntry { case_id: String, run_index: usize },
    #[error("replay fixture: {0}")]
    FixtureSyntax(String),
    #[error("backend configuration: {0}")]
    Config(String),
}

impl BackendError {
    /// Timeouts, rate limiting, server errors and dropped connections are
    /// worth another attempt; everything else is final.
    pub fn is_retryable(&self) -> bool {
        match self {
            BackendError::Timeout | BackendError::Transport(_) => true,
            BackendError::HttpStatus { code, .. } => *code == 429 || (500..600).contains(code),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CompletionRequest<'a> {
    pub case_id: &'a str,
    pub run_index: usize,
    pub prompt: &'a str,
    pub params: &'a GenerationParams,
}

/// A model that turns a rendered prompt into text. Implementations are
/// called from several worker threads at once.
pub trait ModelBackend: Send + Sync {
    fn identity(&self) -> String;

    /// Prompt rendering mode used unless the run overrides it.
    fn preferred_mode(&self) -> PromptMode {
        PromptMode::Raw
    }

    fn complete(&self, req: &CompletionRequest<'_>) -> Result<String, BackendError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    /// Delay before the first retry; doubles on each further one.
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: DEFAULT_MAX_RETRIES,
            base_delay: Duration::from_millis(500),
        }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        Self {
            max_retries: 0,
            base_delay: Duration::ZERO,
        }
    }

    fn delay(&self, retry: u32) -> Duration {
        self.base_delay.saturating_mul(1u32 << retry.min(16))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub runs: usize,
    pub concurrency: usize,
    pub params: GenerationParams,
    pub retry: RetryPolicy,
    pub judge: Judge,
    pub extract: ExtractOptions,
    /// Overrides the backend's preferred prompt mode.
    pub mode: Option<PromptMode>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            runs: DEFAULT_RUNS,
            concurrency: 1,
            params: GenerationParams::default(),
            retry: RetryPolicy::default(),
            judge: Judge::default(),
            extract: ExtractOptions::default(),
            mode: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CaseOutcome {
    Judged(Judgement),
    InfrastructureError { detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case_id: String,
    pub run_index: usize,
    pub raw_output: String,
    pub extraction: Extraction,
    pub outcome: CaseOutcome,
    pub latency_ms: u64,
    /// Backend calls made, including retries.
    pub attempts: u32,
}

impl CaseResult {
    pub fn verdict(&self) -> Option<Verdict> {
        match &self.outcome {
            CaseOutcome::Judged(j) => Some(j.verdict),
            CaseOutcome::InfrastructureError { .. } => None,
        }
    }

    pub fn is_infrastructure_error(&self) -> bool {
        matches!(self.outcome, CaseOutcome::InfrastructureError { .. })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RunError {
    #[error("dataset has no cases")]
    EmptyDataset,
    #[error("{0} must be at least 1")]
    ZeroSetting(&'static str),
}

/// Runs one case once with default judging, extraction and retries.
pub fn run_case(
    backend: &dyn ModelBackend,
    case: &EvalCase,
    params: &GenerationParams,
    run_index: usize,
) -> CaseResult {
    let config = SuiteConfig {
        params: *params,
        ..SuiteConfig::default()
    };
    run_case_with(backend, case, run_index, &config)
}

pub fn run_case_with(
    backend: &dyn ModelBackend,
    case: &EvalCase,
    run_index: usize,
    config: &SuiteConfig,
) -> CaseResult {
    let started = Instant::now();
    let mode = config.mode.unwrap_or_else(|| backend.preferred_mode());
    let prompt = render_prompt(&PromptRequest {
        tools: case.tools.clone(),
        query: case.query.clone(),
        mode,
    });
    let failed = |detail: String, attempts: u32| CaseResult {
        case_id: case.id.clone(),
        run_index,
        raw_output: String::new(),
        extraction: Extraction::default(),
        outcome: CaseOutcome::InfrastructureError { detail },
        latency_ms: elapsed_ms(started),
        attempts,
    };
    let prompt = match prompt {
        Ok(p) => p,
        Err(e) => return failed(format!("prompt: {e}"), 0),
    };
    let req = CompletionRequest {
        case_id: &case.id,
        run_index,
        prompt: &prompt,
        params: &config.params,
    };

    let mut attempts = 0;
    let raw_output = loop {
        attempts += 1;
        match backend.complete(&req) {
            Ok(text) => break text,
            Err(e) if e.is_retryable() && attempts <= config.retry.max_retries => {
                let delay = config.retry.delay(attempts - 1);
                log::warn!("case {} run {run_index}: {e}; retrying in {delay:?}", case.id);
                thread::sleep(delay);
            }
            Err(e) => {
                log::error!("case {} run {run_index}: {e}", case.id);
                return failed(e.to_string(), attempts);
            }
        }
    };

    let extraction = extract_with(&raw_output, config.extract);
    let judgement = config.judge.judge(case, &extraction);
    CaseResult {
        case_id: case.id.clone(),
        run_index,
        raw_output,
        extraction,
        outcome: CaseOutcome::Judged(judgement),
        latency_ms: elapsed_ms(started),
        attempts,
    }
}

fn elapsed_ms(since: Instant) -> u64 {
    u64::try_from(since.elapsed().as_millis()).unwrap_or(u64::MAX)
}

/// Runs every case `config.runs` times with up to `config.concurrency`
/// requests in flight. Results come back sorted by (run index, case id).
pub fn run_suite(
    backend: &dyn ModelBackend,
    cases: &[EvalCase],
    config: &SuiteConfig,
) -> Result<Vec<CaseResult>, RunError> {
    if cases.is_empty() {
        return Err(RunError::EmptyDataset);
    }
    if config.runs == 0 {
        return Err(RunError::ZeroSetting("runs"));
    }
    if config.concurrency == 0 {
        return Err(RunError::ZeroSetting("concurrency"));
    }

    let total = config.runs * cases.len();
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(total));
    let workers = config.concurrency.min(total);

    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = next.fetch_add(1, Ordering::Relaxed);
                if job >= total {
                    break;
                }
                let (run_index, case) = (job / cases.len(), &cases[job % cases.len()]);
                let result = run_case_with(backend, case, run_index, config);
                results.lock().expect("result lock poisoned").push(result);
            });
        }
    });

    let mut results = results.into_inner().expect("result lock poisoned");
    results.sort_by(|a, b| (a.run_index, &a.case_id).cmp(&(b.run_index, &b.case_id)));
    Ok(results)
}
