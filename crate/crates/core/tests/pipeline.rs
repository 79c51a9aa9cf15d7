mod common;

use std::collections::HashMap;
use std::fs;

use serde_json::Value;
use tooleval::judgment::{load_dataset, ScenarioKind, Verdict};
use tooleval::prompting::{render_prompt, PromptMode, PromptRequest};
use tooleval::reporting::{aggregate, diff_reports, format_delta, format_percent, Render};
use tooleval::runner::{run_suite, ReplayBackend, RetryPolicy, SuiteConfig};
use tooleval::ToolDefinition;

fn config(runs: usize, concurrency: usize) -> SuiteConfig {
    SuiteConfig {
        runs,
        concurrency,
        retry: RetryPolicy::none(),
        ..SuiteConfig::default()
    }
}

/// Intended verdicts written alongside each fixture by the data generator.
fn expected_verdicts(name: &str) -> HashMap<String, Vec<Verdict>> {
    let text = fs::read_to_string(common::data(&format!("fixtures/{name}.expected.json"))).unwrap();
    let raw: HashMap<String, Value> = serde_json::from_str(&text).unwrap();
    raw.into_iter()
        .map(|(id, v)| {
            let names: Vec<String> = match v {
                Value::String(s) => vec![s],
                Value::Array(a) => a.into_iter().map(|x| x.as_str().unwrap().to_owned()).collect(),
                other => panic!("unexpected sidecar entry {other}"),
            };
            (id, names.iter().map(|n| Verdict::parse(n).unwrap()).collect())
        })
        .collect()
}

#[test]
fn dataset_layout() {
    let cases = load_dataset(common::data("eval/cases.jsonl")).unwrap();
    assert_eq!(cases.len(), 120);
    for kind in ScenarioKind::ALL {
        assert_eq!(cases.iter().filter(|c| c.scenario == kind).count(), 20, "{kind}");
    }
    assert!(cases
        .iter()
        .filter(|c| c.scenario == ScenarioKind::NoFunctionsAvailable)
        .all(|c| c.tools.is_empty()));
}

#[test]
fn every_fixture_verdict_matches_its_sidecar() {
    let cases = load_dataset(common::data("eval/cases.jsonl")).unwrap();
    for (name, runs) in [("strong", 1), ("base-small", 1), ("tuned-small", 2)] {
        let backend = ReplayBackend::from_path(common::data(&format!("fixtures/{name}.json"))).unwrap();
        let expected = expected_verdicts(name);
        let results = run_suite(&backend, &cases, &config(runs, 4)).unwrap();
        assert_eq!(results.len(), runs * cases.len());
        for r in &results {
            let want = &expected[&r.case_id];
            let want = want.get(r.run_index).unwrap_or(&want[0]);
            assert_eq!(r.verdict(), Some(*want), "{name} {} run {}", r.case_id, r.run_index);
        }
    }
}

#[test]
fn headline_numbers() {
    let cases = load_dataset(common::data("eval/cases.jsonl")).unwrap();
    let run = |name: &str, runs| {
        let backend = ReplayBackend::from_path(common::data(&format!("fixtures/{name}.json"))).unwrap();
        aggregate(&run_suite(&backend, &cases, &config(runs, 2)).unwrap(), &cases, name).unwrap()
    };
    let strong = run("strong", 1);
    assert_eq!(format_percent(strong.overall_accuracy()), "87.50");

    let base = run("base-small", 1);
    let no_call = base.error_distribution()[&Verdict::NoCallWhenExpected];
    assert_eq!((no_call.count, format_percent(no_call.percent).as_str()), (60, "50.00"));
    assert_eq!(
        format_percent(base.scenario_accuracy(ScenarioKind::NoFunctionsAvailable).unwrap()),
        "100.00"
    );

    let tuned = run("tuned-small", 2);
    assert_eq!(format_percent(tuned.overall_accuracy()), "78.75");
    let delta = diff_reports(&base, &tuned).unwrap();
    assert_eq!(format_delta(delta.overall), "+28.75");
    let fcr = &delta.per_scenario[&ScenarioKind::FunctionCallRequired];
    assert_eq!(format_delta(fcr.delta.unwrap()), "+65.00");
}

#[test]
fn report_bytes_independent_of_concurrency() {
    let cases = load_dataset(common::data("eval/cases.jsonl")).unwrap();
    let backend = ReplayBackend::from_path(common::data("fixtures/tuned-small.json")).unwrap();
    let render = |concurrency| {
        let results = run_suite(&backend, &cases, &config(2, concurrency)).unwrap();
        aggregate(&results, &cases, "tuned").unwrap().to_json()
    };
    let one = render(1);
    for c in [2, 4, 8, 16] {
        assert_eq!(render(c), one, "concurrency {c}");
    }
}

#[test]
fn missing_replay_entry_is_infrastructure_error() {
    let cases = load_dataset(common::data("eval/cases.jsonl")).unwrap();
    let backend = ReplayBackend::from_json_str("partial", r#"{"tc-001": "Не знам."}"#).unwrap();
    let results = run_suite(&backend, &cases[..3], &config(1, 1)).unwrap();
    assert_eq!(results[0].verdict(), Some(Verdict::NoCallWhenExpected));
    assert!(results[1].is_infrastructure_error());
    let report = aggregate(&results, &cases[..3], "partial").unwrap();
    assert_eq!(report.infrastructure_errors(), 2);
    assert_eq!(report.judged(), 1);
}

#[test]
fn prompt_matches_golden_file() {
    let input: Value =
        serde_json::from_str(&fs::read_to_string(common::golden("raw_prompt.input.json")).unwrap()).unwrap();
    let tools: Vec<ToolDefinition> = serde_json::from_value(input["tools"].clone()).unwrap();
    let prompt = render_prompt(&PromptRequest {
        tools,
        query: input["query"].as_str().unwrap().to_owned(),
        mode: PromptMode::Raw,
    })
    .unwrap();
    let golden = fs::read(common::golden("raw_prompt.txt")).unwrap();
    assert_eq!(prompt.as_bytes(), golden.as_slice());
}
