//! Accuracy and error-distribution reports.
//!
//! Reports keep integer tallies per run and derive every percentage as an
//! exact rational; rounding to two decimals (half away from zero) happens
//! only when rendering.

mod render;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::judgment::{EvalCase, ScenarioKind, Verdict};
use crate::runner::CaseResult;

pub use render::{render_report, OutputFormat, Render, SCHEMA_VERSION};

/// Exact percentage (0–100 for accuracies, any sign for deltas).
pub type Percent = Ratio<i128>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("result for unknown case id {0:?}")]
    UnknownCaseId(String),
    #[error("no results to aggregate")]
    NoResults,
    #[error("case {case_id:?} has more than one result in run {run_index}")]
    DuplicateResult { case_id: String, run_index: usize },
    #[error("run {run_index} has {got} results for {expected} cases")]
    IncompleteRun { run_index: usize, expected: usize, got: usize },
    #[error("reports cover different datasets: {0}")]
    DatasetMismatch(String),
    #[error("report JSON: {0}")]
    Parse(String),
    #[error("report JSON is inconsistent with its tallies: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioTally {
    pub judged: u64,
    pub correct: u64,
}

/// Integer counts for one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunTally {
    pub run_index: usize,
    pub judged: u64,
    pub correct: u64,
    pub infrastructure_errors: u64,
    /// Count per error kind; every kind is present.
    pub errors: BTreeMap<Verdict, u64>,
    pub scenarios: BTreeMap<ScenarioKind, ScenarioTally>,
}

impl RunTally {
    fn empty(run_index: usize) -> Self {
        Self {
            run_index,
            judged: 0,
            correct: 0,
            infrastructure_errors: 0,
            errors: Verdict::ERRORS.into_iter().map(|v| (v, 0)).collect(),
            scenarios: ScenarioKind::ALL.into_iter().map(|k| (k, ScenarioTally::default())).collect(),
        }
    }

    pub fn error_total(&self) -> u64 {
        self.errors.values().sum()
    }

    /// correct / judged × 100; zero when nothing was judged.
    pub fn accuracy(&self) -> Percent {
        percent(self.correct, self.judged)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorShare {
    pub count: u64,
    pub percent: Percent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub model: String,
    pub runs: usize,
    pub total_cases: usize,
    /// Cases per scenario in the dataset, all six kinds present.
    pub scenario_cases: BTreeMap<ScenarioKind, u64>,
    pub tallies: Vec<RunTally>,
}

fn percent(part: u64, whole: u64) -> Percent {
    if whole == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(i128::from(part) * 100, i128::from(whole))
    }
}

fn mean(values: impl IntoIterator<Item = Percent>) -> Option<Percent> {
    let (sum, n) = values
        .into_iter()
        .fold((Ratio::from_integer(0), 0i128), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n)
}

impl Report {
    pub fn per_run_accuracy(&self) -> Vec<Percent> {
        self.tallies.iter().map(RunTally::accuracy).collect()
    }

    /// Arithmetic mean of the per-run accuracies.
    pub fn overall_accuracy(&self) -> Percent {
        mean(self.per_run_accuracy()).unwrap_or_else(|| Ratio::from_integer(0))
    }

    /// Mean over runs of the scenario's per-run accuracy; `None` when the
    /// dataset has no case of that kind.
    pub fn scenario_accuracy(&self, kind: ScenarioKind) -> Option<Percent> {
        if self.scenario_cases.get(&kind).copied().unwrap_or(0) == 0 {
            return None;
        }
        mean(self.tallies.iter().map(|t| {
            let s = t.scenarios.get(&kind).copied().unwrap_or_default();
            percent(s.correct, s.judged)
        }))
    }

    /// Mean correct answers per run for a scenario.
    pub fn scenario_correct(&self, kind: ScenarioKind) -> Percent {
        mean(self.tallies.iter().map(|t| {
            Ratio::from_integer(i128::from(t.scenarios.get(&kind).map_or(0, |s| s.correct)))
        }))
        .unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn mean_correct(&self) -> Percent {
        mean(self.tallies.iter().map(|t| Ratio::from_integer(i128::from(t.correct))))
            .unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn judged(&self) -> u64 {
        self.tallies.iter().map(|t| t.judged).sum()
    }

    pub fn infrastructure_errors(&self) -> u64 {
        self.tallies.iter().map(|t| t.infrastructure_errors).sum()
    }

    /// Error counts summed over runs, as a share of all judged results.
    pub fn error_distribution(&self) -> BTreeMap<Verdict, ErrorShare> {
        let judged = self.judged();
        Verdict::ERRORS
            .into_iter()
            .map(|kind| {
                let count = self.tallies.iter().map(|t| t.errors.get(&kind).copied().unwrap_or(0)).sum();
                (
                    kind,
                    ErrorShare {
                        count,
                        percent: percent(count, judged),
                    },
                )
            })
            .collect()
    }

    /// Checks per-run conservation: judged = correct + Σ errors,
    /// judged + infrastructure errors = total cases, and the same per scenario.
    pub fn check_conservation(&self) -> Result<(), String> {
        for t in &self.tallies {
            if t.judged != t.correct + t.error_total() {
                return Err(format!(
                    "run {}: judged {} != correct {} + errors {}",
                    t.run_index,
                    t.judged,
                    t.correct,
                    t.error_total()
                ));
            }
            if t.judged + t.infrastructure_errors != self.total_cases as u64 {
                return Err(format!(
                    "run {}: judged {} + infrastructure {} != cases {}",
                    t.run_index, t.judged, t.infrastructure_errors, self.total_cases
                ));
            }
            let scenario_judged: u64 = t.scenarios.values().map(|s| s.judged).sum();
            let scenario_correct: u64 = t.scenarios.values().map(|s| s.correct).sum();
            if scenario_judged != t.judged || scenario_correct != t.correct {
                return Err(format!("run {}: scenario tallies do not add up", t.run_index));
            }
            for (kind, s) in &t.scenarios {
                if s.correct > s.judged || s.judged > self.scenario_cases.get(kind).copied().unwrap_or(0) {
                    return Err(format!("run {}: {kind} tally out of range", t.run_index));
                }
            }
        }
        if self.scenario_cases.values().sum::<u64>() != self.total_cases as u64 {
            return Err("scenario case counts do not sum to total".into());
        }
        Ok(())
    }
}

/// Tallies results into a report. Every run must contain exactly one result
/// per dataset case.
pub fn aggregate(results: &[CaseResult], dataset: &[EvalCase], model: &str) -> Result<Report, ReportError> {
    let scenario_of: HashMap<&str, ScenarioKind> = dataset.iter().map(|c| (c.id.as_str(), c.scenario)).collect();
    let mut scenario_cases: BTreeMap<ScenarioKind, u64> = ScenarioKind::ALL.into_iter().map(|k| (k, 0)).collect();
    for case in dataset {
        *scenario_cases.entry(case.scenario).or_default() += 1;
    }
    let runs = results
        .iter()
        .map(|r| r.run_index + 1)
        .max()
        .ok_or(ReportError::NoResults)?;

    let mut tallies: Vec<RunTally> = (0..runs).map(RunTally::empty).collect();
    let mut seen = HashSet::new();
    for r in results {
        let kind = *scenario_of
            .get(r.case_id.as_str())
            .ok_or_else(|| ReportError::UnknownCaseId(r.case_id.clone()))?;
        if !seen.insert((r.run_index, r.case_id.as_str())) {
            return Err(ReportError::DuplicateResult {
                case_id: r.case_id.clone(),
                run_index: r.run_index,
            });
        }
        let t = &mut tallies[r.run_index];
        match r.verdict() {
            None => t.infrastructure_errors += 1,
            Some(v) => {
                t.judged += 1;
                let s = t.scenarios.entry(kind).or_default();
                s.judged += 1;
                if v.is_correct() {
                    t.correct += 1;
                    s.correct += 1;
                } else {
                    *t.errors.entry(v).or_default() += 1;
                }
            }
        }
    }
    for t in &tallies {
        let got = (t.judged + t.infrastructure_errors) as usize;
        if got != dataset.len() {
            return Err(ReportError::IncompleteRun {
                run_index: t.run_index,
                expected: dataset.len(),
                got,
            });
        }
    }
    Ok(Report {
        model: model.to_owned(),
        runs,
        total_cases: dataset.len(),
        scenario_cases,
        tallies,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioDelta {
    pub baseline: Option<Percent>,
    pub candidate: Option<Percent>,
    pub delta: Option<Percent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportDelta {
    pub baseline: String,
    pub candidate: String,
    pub baseline_overall: Percent,
    pub candidate_overall: Percent,
    /// candidate − baseline, in percentage points.
    pub overall: Percent,
    pub per_scenario: BTreeMap<ScenarioKind, ScenarioDelta>,
}

/// Exact candidate − baseline differences. Both reports must cover the same
/// number of cases with the same scenario partition.
pub fn diff_reports(baseline: &Report, candidate: &Report) -> Result<ReportDelta, ReportError> {
    if baseline.total_cases != candidate.total_cases {
        return Err(ReportError::DatasetMismatch(format!(
            "{} vs {} cases",
            baseline.total_cases, candidate.total_cases
        )));
    }
    for kind in ScenarioKind::ALL {
        let (b, c) = (baseline.scenario_cases.get(&kind), candidate.scenario_cases.get(&kind));
        if b != c {
            return Err(ReportError::DatasetMismatch(format!(
                "{kind}: {} vs {} cases",
                b.copied().unwrap_or(0),
                c.copied().unwrap_or(0)
            )));
        }
    }
    let per_scenario = ScenarioKind::ALL
        .into_iter()
        .map(|kind| {
            let b = baseline.scenario_accuracy(kind);
            let c = candidate.scenario_accuracy(kind);
            let delta = b.zip(c).map(|(b, c)| c - b);
            (
                kind,
                ScenarioDelta {
                    baseline: b,
                    candidate: c,
                    delta,
                },
            )
        })
        .collect();
    let (b, c) = (baseline.overall_accuracy(), candidate.overall_accuracy());
    Ok(ReportDelta {
        baseline: baseline.model.clone(),
        candidate: candidate.model.clone(),
        baseline_overall: b,
        candidate_overall: c,
        overall: c - b,
        per_scenario,
    })
}

/// Rounds to hundredths, half away from zero.
pub fn round_hundredths(p: Percent) -> i128 {
    (p * 100).round().to_integer()
}

/// Fixed two-decimal rendering, e.g. `87.50`, `-8.33`.
pub fn format_percent(p: Percent) -> String {
    let h = round_hundredths(p);
    let sign = if h < 0 { "-" } else { "" };
    format!("{sign}{}.{:02}", h.abs() / 100, h.abs() % 100)
}

/// Like [`format_percent`] with an explicit `+` on positive values.
pub fn format_delta(p: Percent) -> String {
    let s = format_percent(p);
    if round_hundredths(p) > 0 {
        format!("+{s}")
    } else {
        s
    }
}

/// Display wrapper for an exact percentage.
pub struct Pct(pub Percent);

impl fmt::Display for Pct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_percent(self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::Extraction;
    use crate::judgment::{Expectation, Judgement};
    use crate::runner::CaseOutcome;
    use proptest::prelude::*;

    pub(crate) fn dataset(per_scenario: usize) -> Vec<EvalCase> {
        let mut cases = Vec::new();
        for kind in ScenarioKind::ALL {
            for i in 0..per_scenario {
                cases.push(EvalCase {
                    id: format!("{}-{i:03}", kind.as_str()),
                    scenario: kind,
                    tools: vec![],
                    query: "q".into(),
                    expectation: Expectation::no_call(),
                });
            }
        }
        cases
    }

    pub(crate) fn result(case_id: &str, run_index: usize, verdict: Option<Verdict>) -> CaseResult {
        CaseResult {
            case_id: case_id.into(),
            run_index,
            raw_output: String::new(),
            extraction: Extraction::default(),
            outcome: match verdict {
                Some(verdict) => CaseOutcome::Judged(Judgement {
                    verdict,
                    parameters: None,
                    ignored_calls: 0,
                }),
                None => CaseOutcome::InfrastructureError { detail: "down".into() },
            },
            latency_ms: 0,
            attempts: 1,
        }
    }

    /// One run where the first `correct` cases are right and the rest carry `error`.
    fn run(cases: &[EvalCase], run_index: usize, correct: usize, error: Verdict) -> Vec<CaseResult> {
        cases
            .iter()
            .enumerate()
            .map(|(i, c)| result(&c.id, run_index, Some(if i < correct { Verdict::Correct } else { error })))
            .collect()
    }

    #[test]
    fn single_run_accuracy() {
        let ds = dataset(20);
        let report = aggregate(&run(&ds, 0, 105, Verdict::WrongParameters), &ds, "m").unwrap();
        assert_eq!(format_percent(report.overall_accuracy()), "87.50");
        assert_eq!(report.overall_accuracy(), Ratio::new(175, 2));
        report.check_conservation().unwrap();
    }

    #[test]
    fn error_share_of_judged() {
        let ds = dataset(20);
        let report = aggregate(&run(&ds, 0, 60, Verdict::NoCallWhenExpected), &ds, "m").unwrap();
        let dist = report.error_distribution();
        assert_eq!(dist[&Verdict::NoCallWhenExpected].count, 60);
        assert_eq!(format_percent(dist[&Verdict::NoCallWhenExpected].percent), "50.00");
        assert_eq!(dist[&Verdict::MalformedJson].count, 0);
    }

    #[test]
    fn infrastructure_errors_leave_the_denominator() {
        let ds = dataset(1);
        let mut rs = run(&ds, 0, 3, Verdict::WrongFunction);
        rs[5] = result(&ds[5].id, 0, None);
        let report = aggregate(&rs, &ds, "m").unwrap();
        assert_eq!(report.infrastructure_errors(), 1);
        assert_eq!(report.overall_accuracy(), Ratio::from_integer(60));
        assert_eq!(report.scenario_accuracy(ScenarioKind::MissingRequiredParameters), Some(Ratio::from_integer(0)));
        report.check_conservation().unwrap();
    }

    #[test]
    fn multi_run_means() {
        let ds = dataset(20);
        let mut rs = run(&ds, 0, 94, Verdict::WrongParameters);
        rs.extend(run(&ds, 1, 95, Verdict::WrongParameters));
        let report = aggregate(&rs, &ds, "m").unwrap();
        assert_eq!(report.runs, 2);
        assert_eq!(format_percent(report.overall_accuracy()), "78.75");
        let per_run: Vec<_> = report.per_run_accuracy().into_iter().map(format_percent).collect();
        assert_eq!(per_run, ["78.33", "79.17"]);
        // error counts are summed over runs
        assert_eq!(report.error_distribution()[&Verdict::WrongParameters].count, 51);
    }

    #[test]
    fn equal_scenarios_mean_equals_overall() {
        let ds = dataset(20);
        let report = aggregate(&run(&ds, 0, 77, Verdict::WrongFunction), &ds, "m").unwrap();
        let scen = mean(ScenarioKind::ALL.into_iter().map(|k| report.scenario_accuracy(k).unwrap())).unwrap();
        assert_eq!(scen, report.overall_accuracy());
    }

    #[test]
    fn aggregate_errors() {
        let ds = dataset(1);
        assert_eq!(aggregate(&[], &ds, "m"), Err(ReportError::NoResults));
        let stray = vec![result("nope", 0, Some(Verdict::Correct))];
        assert_eq!(aggregate(&stray, &ds, "m"), Err(ReportError::UnknownCaseId("nope".into())));
        let mut dup = run(&ds, 0, 6, Verdict::Correct);
        dup.push(dup[0].clone());
        assert!(matches!(aggregate(&dup, &ds, "m"), Err(ReportError::DuplicateResult { .. })));
        let partial = run(&ds, 0, 6, Verdict::Correct)[..5].to_vec();
        assert!(matches!(aggregate(&partial, &ds, "m"), Err(ReportError::IncompleteRun { got: 5, .. })));
    }

    #[test]
    fn diff_is_exact() {
        let ds = dataset(20);
        let base = aggregate(&run(&ds, 0, 60, Verdict::NoCallWhenExpected), &ds, "base").unwrap();
        let mut rs = run(&ds, 0, 94, Verdict::WrongParameters);
        rs.extend(run(&ds, 1, 95, Verdict::WrongParameters));
        let tuned = aggregate(&rs, &ds, "tuned").unwrap();
        let d = diff_reports(&base, &tuned).unwrap();
        assert_eq!(format_delta(d.overall), "+28.75");
        assert_eq!(d.overall, Ratio::new(115, 4));

        let zero = diff_reports(&tuned, &tuned).unwrap();
        assert_eq!(zero.overall, Ratio::from_integer(0));
        assert!(zero.per_scenario.values().all(|s| s.delta == Some(Ratio::from_integer(0))));

        let other = dataset(10);
        let small = aggregate(&run(&other, 0, 60, Verdict::WrongFunction), &other, "s").unwrap();
        assert!(matches!(diff_reports(&base, &small), Err(ReportError::DatasetMismatch(_))));
    }

    #[test]
    fn exact_diff_differs_from_diff_of_rounded_values() {
        // 86.666… − 78.333… = 8.333…, not 86.67 − 78.33 = 8.34
        let d: Percent = Ratio::new(260, 3) - Ratio::new(235, 3);
        assert_eq!(format_delta(d), "+8.33");
    }

    #[test]
    fn rounding_half_away_from_zero() {
        assert_eq!(format_percent(Ratio::new(1, 200)), "0.01");
        assert_eq!(format_percent(Ratio::new(-1, 200)), "-0.01");
        assert_eq!(format_percent(Ratio::new(1, 300)), "0.00");
        assert_eq!(format_percent(Ratio::from_integer(100)), "100.00");
        assert_eq!(format_delta(Ratio::from_integer(0)), "0.00");
        assert_eq!(format_delta(Ratio::new(-5, 2)), "-2.50");
        assert_eq!(Pct(Ratio::new(2, 3)).to_string(), "0.67");
    }

    proptest! {
        #[test]
        fn conservation_and_bounds(verdicts in proptest::collection::vec(0usize..7, 12), runs in 1usize..4) {
            let ds = dataset(2);
            let mut rs = Vec::new();
            for r in 0..runs {
                for (i, c) in ds.iter().enumerate() {
                    let pick = (verdicts[i] + r) % 7;
                    rs.push(result(&c.id, r, Verdict::ALL.get(pick).copied()));
                }
            }
            let report = aggregate(&rs, &ds, "m").unwrap();
            prop_assert!(report.check_conservation().is_ok());
            let hundred = Ratio::from_integer(100);
            let zero = Ratio::from_integer(0);
            prop_assert!(report.overall_accuracy() >= zero && report.overall_accuracy() <= hundred);
            for share in report.error_distribution().values() {
                prop_assert!(share.percent >= zero && share.percent <= hundred);
            }
            let d = diff_reports(&report, &report).unwrap();
            prop_assert_eq!(d.overall, zero);
        }
    }
}
