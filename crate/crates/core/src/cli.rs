//! `tooleval` command line.
//!
//! Exit codes: 0 success, 1 operational failure (missing file, bad data,
//! lint errors, backend setup), 2 usage error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::builder::TypedValueParser as _;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{compute_corpus_stats, lint_reader, load_corpus, Severity};
use crate::extraction::ExtractOptions;
use crate::judgment::{load_dataset, ExtraKeys, Judge};
use crate::prompting::{render_prompt, PromptMode, PromptRequest};
use crate::reporting::{aggregate, diff_reports, render_report, OutputFormat, Report};
use crate::runner::{
    run_suite, GenerationParams, HttpBackend, HttpConfig, ModelBackend, ReplayBackend, RetryPolicy, SuiteConfig,
    DEFAULT_MAX_NEW_TOKENS, DEFAULT_RUNS, DEFAULT_TEMPERATURE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tooleval", version, about = "Function-calling evaluation harness and corpus toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an evaluation suite and write a report.
    Eval(EvalArgs),
    /// Descriptive statistics for an NDJSON conversation corpus.
    Stats(StatsArgs),
    /// Validate an NDJSON conversation corpus; exits 1 if any error is found.
    Lint(LintArgs),
    /// Print the prompt for one evaluation case.
    Render(RenderArgs),
    /// Compare two JSON reports (candidate − baseline).
    Diff(DiffArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Http,
    Replay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Markdown,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Markdown => OutputFormat::Markdown,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Raw,
    Chat,
}

impl From<ModeArg> for PromptMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Raw => PromptMode::Raw,
            ModeArg::Chat => PromptMode::Chat,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Evaluation dataset (NDJSON, one case per line).
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value = "replay")]
    pub backend: BackendKind,
    /// Replay fixture (JSON object: case id → response or list of responses).
    #[arg(long, required_if_eq("backend", "replay"))]
    pub replay: Option<PathBuf>,
    /// Chat-completions endpoint root, e.g. http://localhost:8000/v1.
    #[arg(long, required_if_eq("backend", "http"))]
    pub base_url: Option<String>,
    #[arg(long, required_if_eq("backend", "http"))]
    pub model: Option<String>,
    /// Environment variable holding the bearer token.
    #[arg(long)]
    pub api_key_env: Option<String>,
    /// Per-request timeout for the http backend.
    #[arg(long, default_value_t = 120)]
    pub timeout_secs: u64,
    /// Model label in the report; defaults to the backend identity.
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long, default_value_t = DEFAULT_RUNS, value_parser = clap::value_parser!(u32).range(1..).map(|v| v as usize))]
    pub runs: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..).map(|v| v as usize))]
    pub concurrency: usize,
    #[arg(long, default_value_t = DEFAULT_TEMPERATURE)]
    pub temperature: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_NEW_TOKENS, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_tokens: u32,
    /// Retries on timeouts, 429 and 5xx responses.
    #[arg(long, default_value_t = 2)]
    pub retries: u32,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Prompt mode; defaults to raw for replay and chat for http.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Fail parameter matching on keys the case does not expect (default).
    #[arg(long, overrides_with = "lenient_params")]
    pub strict_params: bool,
    /// Ignore extra argument keys when matching parameters.
    #[arg(long, overrides_with = "strict_params")]
    pub lenient_params: bool,
    /// Only accept fenced tool_call blocks, not XML-style spans.
    #[arg(long)]
    pub fences_only: bool,
    /// Also write every case result as NDJSON to this file.
    #[arg(long)]
    pub results: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Conversation corpus (NDJSON).
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LintArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// `json` prints the issues as a JSON array; otherwise one per line.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Evaluation dataset.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Case id to render.
    #[arg(long = "case")]
    pub case_id: String,
    #[arg(long, value_enum, default_value = "raw")]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    /// Baseline report (JSON).
    pub baseline: PathBuf,
    /// Candidate report (JSON).
    pub candidate: PathBuf,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    match run(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_FAILURE
        }
    }
}

fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Eval(args) => eval(args, out, err),
        Command::Stats(args) => stats(args, out, err),
        Command::Lint(args) => lint(args, out),
        Command::Render(args) => render(args, out),
        Command::Diff(args) => diff(args, out),
    }
}

fn emit(text: &str, dest: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match dest {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => out.write_all(text.as_bytes()).context("cannot write to standard output"),
    }
}

fn make_backend(args: &EvalArgs) -> Result<Box<dyn ModelBackend>> {
    Ok(match args.backend {
        BackendKind::Replay => {
            let path = args.replay.as_ref().context("--replay is required with --backend replay")?;
            if !path.is_file() {
                bail!("replay fixture {} not found", path.display());
            }
            Box::new(ReplayBackend::from_path(path)?)
        }
        BackendKind::Http => {
            let mut config = HttpConfig::new(
                args.base_url.clone().context("--base-url is required with --backend http")?,
                args.model.clone().context("--model is required with --backend http")?,
            );
            config.api_key_env = args.api_key_env.clone();
            config.timeout = Duration::from_secs(args.timeout_secs);
            Box::new(HttpBackend::new(config)?)
        }
    })
}

fn eval(args: EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cases = load_dataset(&args.dataset).with_context(|| format!("dataset {}", args.dataset.display()))?;
    let backend = make_backend(&args)?;
    if !(args.temperature.is_finite() && args.temperature >= 0.0) {
        bail!("--temperature must be a non-negative number");
    }
    let config = SuiteConfig {
        runs: args.runs,
        concurrency: args.concurrency,
        params: GenerationParams {
            temperature: args.temperature,
            max_new_tokens: args.max_tokens,
        },
        retry: RetryPolicy {
            max_retries: args.retries,
            ..RetryPolicy::default()
        },
        judge: Judge::new(if args.lenient_params {
            ExtraKeys::Allow
        } else {
            ExtraKeys::Reject
        }),
        extract: ExtractOptions {
            accept_xml: !args.fences_only,
        },
        mode: args.mode.map(PromptMode::from),
    };
    log::info!(
        "evaluating {} cases × {} runs against {}",
        cases.len(),
        config.runs,
        backend.identity()
    );
    let results = run_suite(backend.as_ref(), &cases, &config)?;
    if let Some(path) = &args.results {
        let mut file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
        for r in &results {
            serde_json::to_writer(&mut file, r)?;
            file.write_all(b"\n")?;
        }
    }
    let label = args.label.clone().unwrap_or_else(|| backend.identity());
    let report = aggregate(&results, &cases, &label)?;
    if report.infrastructure_errors() > 0 {
        let _ = writeln!(
            err,
            "warning: {} result(s) failed in the backend and are excluded from accuracy",
            report.infrastructure_errors()
        );
    }
    emit(&render_report(&report, args.format.into()), args.out.as_deref(), out)?;
    Ok(EXIT_OK)
}

fn stats(args: StatsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let loaded = load_corpus(&args.dataset).with_context(|| format!("corpus {}", args.dataset.display()))?;
    for w in &loaded.warnings {
        let _ = writeln!(err, "warning: line {}: {}", w.line, w.message);
    }
    let stats = compute_corpus_stats(&loaded.conversations)?;
    let text = match args.format {
        FormatArg::Json => stats.to_json(),
        FormatArg::Markdown => stats.to_markdown(),
        FormatArg::Csv => stats.to_csv(),
    };
    emit(&text, args.out.as_deref(), out)?;
    Ok(EXIT_OK)
}

fn lint(args: LintArgs, out: &mut dyn Write) -> Result<i32> {
    let file = File::open(&args.dataset).with_context(|| format!("cannot open {}", args.dataset.display()))?;
    let issues = lint_reader(BufReader::new(file))?;
    match args.format {
        Some(FormatArg::Json) => {
            let mut text = serde_json::to_string_pretty(&issues)?;
            text.push('\n');
            out.write_all(text.as_bytes())?;
        }
        _ => {
            for issue in &issues {
                writeln!(out, "{issue}")?;
            }
        }
    }
    let errors = issues.iter().filter(|i| i.severity == Severity::Error).count();
    log::info!("{} issue(s), {errors} error(s)", issues.len());
    Ok(if errors > 0 { EXIT_FAILURE } else { EXIT_OK })
}

fn render(args: RenderArgs, out: &mut dyn Write) -> Result<i32> {
    let cases = load_dataset(&args.dataset).with_context(|| format!("dataset {}", args.dataset.display()))?;
    let case = cases
        .into_iter()
        .find(|c| c.id == args.case_id)
        .with_context(|| format!("no case {:?} in {}", args.case_id, args.dataset.display()))?;
    let prompt = render_prompt(&PromptRequest {
        tools: case.tools,
        query: case.query,
        mode: args.mode.into(),
    })?;
    out.write_all(prompt.as_bytes())?;
    Ok(EXIT_OK)
}

fn read_report(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Report::from_json(&text).with_context(|| format!("report {}", path.display()))
}

fn diff(args: DiffArgs, out: &mut dyn Write) -> Result<i32> {
    let baseline = read_report(&args.baseline)?;
    let candidate = read_report(&args.candidate)?;
    let delta = diff_reports(&baseline, &candidate)?;
    emit(&render_report(&delta, args.format.into()), args.out.as_deref(), out)?;
    Ok(EXIT_OK)
}
