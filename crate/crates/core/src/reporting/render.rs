use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;
use serde_json::{json, Map, Number, Value};

use super::{format_delta, format_percent, Percent, Report, ReportDelta, ReportError, RunTally};
use crate::judgment::ScenarioKind;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Json,
    Markdown,
    Csv,
}

pub trait Render {
    fn to_json(&self) -> String;
    fn to_markdown(&self) -> String;
    fn to_csv(&self) -> String;
}

pub fn render_report<R: Render + ?Sized>(report: &R, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Markdown => report.to_markdown(),
        OutputFormat::Csv => report.to_csv(),
    }
}

/// JSON number carrying the two-decimal rounded value.
fn pct_value(p: Percent) -> Value {
    let rounded: f64 = format_percent(p).parse().expect("formatted percent parses");
    Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

fn opt_pct_value(p: Option<Percent>) -> Value {
    p.map_or(Value::Null, pct_value)
}

fn opt_text(p: Option<Percent>, f: fn(Percent) -> String) -> String {
    p.map_or_else(|| "n/a".to_owned(), f)
}

/// Integer when exact, otherwise two decimals.
fn format_count(c: Percent) -> String {
    if c.is_integer() {
        c.to_integer().to_string()
    } else {
        format_percent(c)
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

impl Report {
    fn summary_json(&self) -> Map<String, Value> {
        let per_scenario: Map<String, Value> = ScenarioKind::ALL
            .into_iter()
            .map(|k| (k.as_str().to_owned(), opt_pct_value(self.scenario_accuracy(k))))
            .collect();
        let errors: Map<String, Value> = self
            .error_distribution()
            .into_iter()
            .map(|(k, share)| (k.as_str().to_owned(), json!({"count": share.count, "percent": pct_value(share.percent)})))
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "model": self.model,
            "runs": self.runs,
            "total_cases": self.total_cases,
            "overall_accuracy": pct_value(self.overall_accuracy()),
            "per_run_accuracy": self.per_run_accuracy().into_iter().map(pct_value).collect::<Vec<_>>(),
            "per_scenario_accuracy": per_scenario,
            "error_distribution": errors,
            "infrastructure_errors": self.infrastructure_errors(),
        });
        match doc {
            Value::Object(m) => m,
            _ => unreachable!(),
        }
    }

    /// Reads a report written by [`Render::to_json`], rebuilding the exact
    /// tallies and checking them against the rounded summary.
    pub fn from_json(text: &str) -> Result<Report, ReportError> {
        #[derive(Deserialize)]
        struct Tallies {
            scenario_cases: BTreeMap<ScenarioKind, u64>,
            runs: Vec<RunTally>,
        }
        #[derive(Deserialize)]
        struct Doc {
            schema_version: u32,
            model: String,
            total_cases: usize,
            tallies: Tallies,
        }
        let value: Value = serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))?;
        let doc: Doc = serde_json::from_value(value.clone()).map_err(|e| ReportError::Parse(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(ReportError::Parse(format!("unsupported schema_version {}", doc.schema_version)));
        }
        let mut scenario_cases = doc.tallies.scenario_cases;
        for k in ScenarioKind::ALL {
            scenario_cases.entry(k).or_insert(0);
        }
        let report = Report {
            model: doc.model,
            runs: doc.tallies.runs.len(),
            total_cases: doc.total_cases,
            scenario_cases,
            tallies: doc.tallies.runs,
        };
        report.check_conservation().map_err(ReportError::Inconsistent)?;
        for (i, t) in report.tallies.iter().enumerate() {
            if t.run_index != i {
                return Err(ReportError::Inconsistent(format!("run {i} is labelled {}", t.run_index)));
            }
        }
        for (key, expected) in report.summary_json() {
            if value.get(&key) != Some(&expected) {
                return Err(ReportError::Inconsistent(format!("{key} does not match the tallies")));
            }
        }
        Ok(report)
    }
}

impl Render for Report {
    fn to_json(&self) -> String {
        let mut doc = self.summary_json();
        doc.insert(
            "tallies".into(),
            json!({"scenario_cases": self.scenario_cases, "runs": self.tallies}),
        );
        pretty(&Value::Object(doc))
    }

    fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Evaluation report: {}\n", self.model);
        let _ = writeln!(
            s,
            "Runs: {} · Cases: {} · Infrastructure errors: {}\n",
            self.runs,
            self.total_cases,
            self.infrastructure_errors()
        );
        s.push_str("| Scenario | Cases | Correct | Accuracy (%) |\n|---|---:|---:|---:|\n");
        for k in ScenarioKind::ALL {
            let _ = writeln!(
                s,
                "| {k} | {} | {} | {} |",
                self.scenario_cases.get(&k).copied().unwrap_or(0),
                format_count(self.scenario_correct(k)),
                opt_text(self.scenario_accuracy(k), format_percent)
            );
        }
        let _ = writeln!(
            s,
            "| **overall** | {} | {} | {} |\n",
            self.total_cases,
            format_count(self.mean_correct()),
            format_percent(self.overall_accuracy())
        );
        let per_run: Vec<String> = self.per_run_accuracy().into_iter().map(format_percent).collect();
        let _ = writeln!(s, "Per-run accuracy (%): {}\n", per_run.join(", "));
        s.push_str("| Error | Count | Share of judged (%) |\n|---|---:|---:|\n");
        for (k, share) in self.error_distribution() {
            let _ = writeln!(s, "| {k} | {} | {} |", share.count, format_percent(share.percent));
        }
        s
    }

    fn to_csv(&self) -> String {
        let mut s = String::from("scenario,cases,correct,accuracy_percent\n");
        for k in ScenarioKind::ALL {
            let _ = writeln!(
                s,
                "{k},{},{},{}",
                self.scenario_cases.get(&k).copied().unwrap_or(0),
                format_count(self.scenario_correct(k)),
                opt_text(self.scenario_accuracy(k), format_percent)
            );
        }
        let _ = writeln!(
            s,
            "overall,{},{},{}",
            self.total_cases,
            format_count(self.mean_correct()),
            format_percent(self.overall_accuracy())
        );
        s
    }
}

impl Render for ReportDelta {
    fn to_json(&self) -> String {
        let per_scenario: Map<String, Value> = self
            .per_scenario
            .iter()
            .map(|(k, d)| {
                (
                    k.as_str().to_owned(),
                    json!({
                        "baseline": opt_pct_value(d.baseline),
                        "candidate": opt_pct_value(d.candidate),
                        "delta": opt_pct_value(d.delta),
                    }),
                )
            })
            .collect();
        pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "baseline": self.baseline,
            "candidate": self.candidate,
            "baseline_overall": pct_value(self.baseline_overall),
            "candidate_overall": pct_value(self.candidate_overall),
            "overall_delta": pct_value(self.overall),
            "per_scenario": per_scenario,
        }))
    }

    fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Report diff: {} → {}\n", self.baseline, self.candidate);
        s.push_str("| Scenario | Baseline (%) | Candidate (%) | Δ (points) |\n|---|---:|---:|---:|\n");
        for (k, d) in &self.per_scenario {
            let _ = writeln!(
                s,
                "| {k} | {} | {} | {} |",
                opt_text(d.baseline, format_percent),
                opt_text(d.candidate, format_percent),
                opt_text(d.delta, format_delta)
            );
        }
        let _ = writeln!(
            s,
            "| **overall** | {} | {} | {} |",
            format_percent(self.baseline_overall),
            format_percent(self.candidate_overall),
            format_delta(self.overall)
        );
        s
    }

    fn to_csv(&self) -> String {
        let mut s = String::from("scenario,baseline_percent,candidate_percent,delta_points\n");
        for (k, d) in &self.per_scenario {
            let _ = writeln!(
                s,
                "{k},{},{},{}",
                opt_text(d.baseline, format_percent),
                opt_text(d.candidate, format_percent),
                opt_text(d.delta, format_delta)
            );
        }
        let _ = writeln!(
            s,
            "overall,{},{},{}",
            format_percent(self.baseline_overall),
            format_percent(self.candidate_overall),
            format_delta(self.overall)
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{dataset, result};
    use super::*;
    use crate::judgment::Verdict;
    use crate::reporting::{aggregate, diff_reports};

    fn sample() -> Report {
        let ds = dataset(20);
        let results: Vec<_> = ds
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let v = match i % 8 {
                    0 => Verdict::WrongParameters,
                    1 => Verdict::NoCallWhenExpected,
                    _ => Verdict::Correct,
                };
                result(&c.id, 0, Some(v))
            })
            .collect();
        aggregate(&results, &ds, "sample-model").unwrap()
    }

    #[test]
    fn json_has_contract_keys() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        for key in ["schema_version", "model", "runs", "total_cases", "overall_accuracy", "per_run_accuracy", "per_scenario_accuracy", "error_distribution", "infrastructure_errors"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["overall_accuracy"], json!(75.0));
        assert_eq!(v["error_distribution"]["wrong_parameters"]["count"], 15);
        let order: Vec<&String> = v["per_scenario_accuracy"].as_object().unwrap().keys().collect();
        assert_eq!(order, ScenarioKind::ALL.iter().map(|k| k.as_str()).collect::<Vec<_>>());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = sample();
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), r.to_json());
    }

    #[test]
    fn tampered_summary_is_rejected() {
        let text = sample().to_json().replace("\"overall_accuracy\": 75.0", "\"overall_accuracy\": 99.0");
        assert!(matches!(Report::from_json(&text), Err(ReportError::Inconsistent(_))));
        assert!(matches!(Report::from_json("{}"), Err(ReportError::Parse(_))));
    }

    #[test]
    fn markdown_shape() {
        let md = sample().to_markdown();
        let rows = md.lines().filter(|l| ScenarioKind::ALL.iter().any(|k| l.starts_with(&format!("| {k} |"))));
        assert_eq!(rows.count(), 6);
        assert!(md.contains("| **overall** | 120 | 90 | 75.00 |"));
    }

    #[test]
    fn csv_shape() {
        let csv = sample().to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 8);
        assert_eq!(lines[0], "scenario,cases,correct,accuracy_percent");
        assert_eq!(lines[7], "overall,120,90,75.00");
    }

    #[test]
    fn delta_renderings() {
        let r = sample();
        let d = diff_reports(&r, &r).unwrap();
        let csv = render_report(&d, OutputFormat::Csv);
        assert_eq!(csv.lines().count(), 8);
        assert!(csv.ends_with("overall,75.00,75.00,0.00\n"));
        let v: Value = serde_json::from_str(&render_report(&d, OutputFormat::Json)).unwrap();
        assert_eq!(v["overall_delta"], json!(0.0));
        assert!(render_report(&d, OutputFormat::Markdown).contains("| **overall** | 75.00 | 75.00 | 0.00 |"));
    }

    #[test]
    fn fractional_mean_correct() {
        assert_eq!(format_count(Percent::new(27, 2)), "13.50");
        assert_eq!(format_count(Percent::from_integer(13)), "13");
    }
}
