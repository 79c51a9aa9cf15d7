//! Behavioural, function and parameter validation of one model response.

mod compare;
mod dataset;
mod normalize;

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::corpus::ToolDefinition;
use crate::extraction::Extraction;

pub use compare::{compare_parameters, values_equal, ExtraKeys, Matcher, ParamComparison};
pub use dataset::{load_dataset, parse_case, read_dataset, DatasetError};
pub use normalize::{normalize_text, transliterate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    FunctionCallRequired,
    MultipleFunctionsSelection,
    IrrelevantWithFunctions,
    NoFunctionsAvailable,
    AmbiguousSelection,
    MissingRequiredParameters,
}

impl ScenarioKind {
    /// Fixed reporting order.
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::FunctionCallRequired,
        ScenarioKind::MultipleFunctionsSelection,
        ScenarioKind::IrrelevantWithFunctions,
        ScenarioKind::NoFunctionsAvailable,
        ScenarioKind::AmbiguousSelection,
        ScenarioKind::MissingRequiredParameters,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::FunctionCallRequired => "function_call_required",
            ScenarioKind::MultipleFunctionsSelection => "multiple_functions_selection",
            ScenarioKind::IrrelevantWithFunctions => "irrelevant_with_functions",
            ScenarioKind::NoFunctionsAvailable => "no_functions_available",
            ScenarioKind::AmbiguousSelection => "ambiguous_selection",
            ScenarioKind::MissingRequiredParameters => "missing_required_parameters",
        }
    }

    pub fn parse(s: &str) -> Option<ScenarioKind> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Whether the correct behaviour is a tool call. Missing-parameter cases
    /// expect a clarification turn instead.
    pub fn expects_call(self) -> bool {
        matches!(
            self,
            ScenarioKind::FunctionCallRequired
                | ScenarioKind::MultipleFunctionsSelection
                | ScenarioKind::AmbiguousSelection
        )
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub should_call: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_parameters: Option<Map<String, Value>>,
}

impl Expectation {
    pub fn call(function: impl Into<String>, parameters: Map<String, Value>) -> Self {
        Self {
            should_call: true,
            expected_function: Some(function.into()),
            expected_parameters: Some(parameters),
        }
    }

    pub fn no_call() -> Self {
        Self {
            should_call: false,
            expected_function: None,
            expected_parameters: None,
        }
    }
}

/// One benchmark case. Serializes to the flat dataset line format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalCase {
    pub id: String,
    pub scenario: ScenarioKind,
    pub tools: Vec<ToolDefinition>,
    pub query: String,
    #[serde(flatten)]
    pub expectation: Expectation,
}

impl EvalCase {
    /// Checks the structural invariants of a case. Agreement between
    /// `should_call` and the scenario is not checked here, because the
    /// dataset format lets an explicit field override the scenario default.
    pub fn validate(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("id is empty".into());
        }
        if self.query.trim().is_empty() {
            return Err("query is empty".into());
        }
        if self.scenario == ScenarioKind::NoFunctionsAvailable && !self.tools.is_empty() {
            return Err("no_functions_available case declares tools".into());
        }
        for tool in &self.tools {
            tool.validate().map_err(|e| format!("tool {:?}: {e}", tool.name))?;
        }
        let exp = &self.expectation;
        if exp.should_call && exp.expected_function.is_none() {
            return Err("should_call is true but expected_function is missing".into());
        }
        if !exp.should_call && exp.expected_parameters.is_some() {
            return Err("expected_parameters given for a case that expects no call".into());
        }
        if !exp.should_call && exp.expected_function.is_some() {
            return Err("expected_function given for a case that expects no call".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    NoCallWhenExpected,
    UnexpectedCall,
    WrongFunction,
    WrongParameters,
    MalformedJson,
}

impl Verdict {
    pub const ALL: [Verdict; 6] = [
        Verdict::Correct,
        Verdict::NoCallWhenExpected,
        Verdict::UnexpectedCall,
        Verdict::WrongFunction,
        Verdict::WrongParameters,
        Verdict::MalformedJson,
    ];

    /// The five error kinds, in reporting order.
    pub const ERRORS: [Verdict; 5] = [
        Verdict::NoCallWhenExpected,
        Verdict::UnexpectedCall,
        Verdict::WrongFunction,
        Verdict::WrongParameters,
        Verdict::MalformedJson,
    ];

    pub fn is_correct(self) -> bool {
        self == Verdict::Correct
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::NoCallWhenExpected => "no_call_when_expected",
            Verdict::UnexpectedCall => "unexpected_call",
            Verdict::WrongFunction => "wrong_function",
            Verdict::WrongParameters => "wrong_parameters",
            Verdict::MalformedJson => "malformed_json",
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        Self::ALL.into_iter().find(|v| v.as_str() == s)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A verdict plus the evidence behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgement {
    pub verdict: Verdict,
    /// Present when parameters were compared.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<ParamComparison>,
    /// Valid calls after the first; recorded, not judged.
    #[serde(default)]
    pub ignored_calls: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Judge {
    pub matcher: Matcher,
}

impl Judge {
    pub fn new(extra_keys: ExtraKeys) -> Self {
        Self {
            matcher: Matcher::new(extra_keys),
        }
    }

    pub fn judge(&self, case: &EvalCase, extraction: &Extraction) -> Judgement {
        let exp = &case.expectation;
        let ignored_calls = extraction.calls.len().saturating_sub(1);
        let done = |verdict| Judgement {
            verdict,
            parameters: None,
            ignored_calls,
        };

        if !extraction.malformed_spans.is_empty() {
            return done(Verdict::MalformedJson);
        }
        let first = match (exp.should_call, extraction.calls.first()) {
            (false, Some(_)) => return done(Verdict::UnexpectedCall),
            (false, None) => return done(Verdict::Correct),
            (true, None) => return done(Verdict::NoCallWhenExpected),
            (true, Some(call)) => call,
        };
        if exp.expected_function.as_deref() != Some(first.name.as_str()) {
            return done(Verdict::WrongFunction);
        }
        let empty = Map::new();
        let expected = exp.expected_parameters.as_ref().unwrap_or(&empty);
        let cmp = self.matcher.compare_parameters(expected, &first.arguments);
        Judgement {
            verdict: if cmp.matched {
                Verdict::Correct
            } else {
                Verdict::WrongParameters
            },
            parameters: Some(cmp),
            ignored_calls,
        }
    }
}

/// Judges with the default (strict extra-keys) matcher.
pub fn judge_case(case: &EvalCase, extraction: &Extraction) -> Verdict {
    Judge::default().judge(case, extraction).verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::{extract_tool_calls, ToolCall};
    use proptest::prelude::*;
    use serde_json::json;

    fn obj(v: Value) -> Map<String, Value> {
        v.as_object().cloned().unwrap()
    }

    fn case(scenario: ScenarioKind, expectation: Expectation) -> EvalCase {
        EvalCase {
            id: "t".into(),
            scenario,
            tools: vec![ToolDefinition::new("calculate_property_tax", "tax", json!({}))],
            query: "Колко е данъкът?".into(),
            expectation,
        }
    }

    fn tax_case() -> EvalCase {
        case(
            ScenarioKind::FunctionCallRequired,
            Expectation::call("calculate_property_tax", obj(json!({"assessed_value": 150000}))),
        )
    }

    #[test]
    fn scenario_strings_round_trip() {
        for k in ScenarioKind::ALL {
            assert_eq!(ScenarioKind::parse(k.as_str()), Some(k));
            assert_eq!(serde_json::to_value(k).unwrap(), json!(k.as_str()));
        }
        let calling: Vec<_> = ScenarioKind::ALL.into_iter().filter(|k| k.expects_call()).collect();
        assert_eq!(calling.len(), 3);
        for v in Verdict::ALL {
            assert_eq!(Verdict::parse(v.as_str()), Some(v));
        }
    }

    #[test]
    fn no_call_when_expected() {
        let ex = extract_tool_calls("Данъкът зависи от общината.");
        assert_eq!(judge_case(&tax_case(), &ex), Verdict::NoCallWhenExpected);
    }

    #[test]
    fn unexpected_call() {
        let c = case(ScenarioKind::IrrelevantWithFunctions, Expectation::no_call());
        let ex = extract_tool_calls(&ToolCall::new("calculate_property_tax", Map::new()).to_fence());
        assert_eq!(judge_case(&c, &ex), Verdict::UnexpectedCall);
    }

    #[test]
    fn wrong_parameters_and_correct() {
        let bad = ToolCall::new("calculate_property_tax", obj(json!({"assessed_value": 15000})));
        let j = Judge::default().judge(&tax_case(), &extract_tool_calls(&bad.to_fence()));
        assert_eq!(j.verdict, Verdict::WrongParameters);
        assert_eq!(j.parameters.unwrap().mismatched, vec!["assessed_value"]);

        let good = ToolCall::new("calculate_property_tax", obj(json!({"assessed_value": "150000"})));
        assert_eq!(judge_case(&tax_case(), &extract_tool_calls(&good.to_fence())), Verdict::Correct);
    }

    #[test]
    fn wrong_function() {
        let call = ToolCall::new("get_weather", obj(json!({"assessed_value": 150000})));
        assert_eq!(judge_case(&tax_case(), &extract_tool_calls(&call.to_fence())), Verdict::WrongFunction);
    }

    #[test]
    fn malformed_beats_everything() {
        let good = ToolCall::new("calculate_property_tax", obj(json!({"assessed_value": 150000})));
        let text = format!("{}\n```tool_call\n{{\"name\":\"x\",\"arguments\":", good.to_fence());
        let ex = extract_tool_calls(&text);
        assert_eq!(ex.calls.len(), 1);
        assert_eq!(judge_case(&tax_case(), &ex), Verdict::MalformedJson);
        let no_call = case(ScenarioKind::IrrelevantWithFunctions, Expectation::no_call());
        assert_eq!(judge_case(&no_call, &ex), Verdict::MalformedJson);
    }

    #[test]
    fn only_first_call_is_judged() {
        let good = ToolCall::new("calculate_property_tax", obj(json!({"assessed_value": 150000})));
        let other = ToolCall::new("get_weather", Map::new());
        let text = format!("{}\n{}", good.to_fence(), other.to_fence());
        let j = Judge::default().judge(&tax_case(), &extract_tool_calls(&text));
        assert_eq!(j.verdict, Verdict::Correct);
        assert_eq!(j.ignored_calls, 1);

        let text = format!("{}\n{}", other.to_fence(), good.to_fence());
        assert_eq!(judge_case(&tax_case(), &extract_tool_calls(&text)), Verdict::WrongFunction);
    }

    #[test]
    fn extra_keys_policy() {
        let call = ToolCall::new(
            "calculate_property_tax",
            obj(json!({"assessed_value": 150000, "year": 2024})),
        );
        let ex = extract_tool_calls(&call.to_fence());
        assert_eq!(judge_case(&tax_case(), &ex), Verdict::WrongParameters);
        assert_eq!(Judge::new(ExtraKeys::Allow).judge(&tax_case(), &ex).verdict, Verdict::Correct);
    }

    #[test]
    fn validation() {
        assert!(tax_case().validate().is_ok());
        let mut c = tax_case();
        c.scenario = ScenarioKind::NoFunctionsAvailable;
        assert!(c.validate().is_err());
        let mut c = tax_case();
        c.expectation.expected_function = None;
        assert!(c.validate().is_err());
        let mut c = tax_case();
        c.expectation.should_call = false;
        assert!(c.validate().is_err());
        let mut c = tax_case();
        c.query = " ".into();
        assert!(c.validate().is_err());
    }

    #[test]
    fn case_serializes_flat() {
        let v = serde_json::to_value(tax_case()).unwrap();
        assert_eq!(v["expected_function"], "calculate_property_tax");
        assert_eq!(v["should_call"], true);
        assert_eq!(v["scenario"], "function_call_required");
    }

    proptest! {
        // Any text yields exactly one verdict, and the same one twice.
        #[test]
        fn total_and_deterministic(text in "\\PC{0,60}", should_call in any::<bool>()) {
            let c = if should_call { tax_case() } else {
                case(ScenarioKind::MissingRequiredParameters, Expectation::no_call())
            };
            let ex = extract_tool_calls(&text);
            prop_assert_eq!(judge_case(&c, &ex), judge_case(&c, &ex));
        }

        #[test]
        fn own_fence_never_malformed(name in "[a-z_]{1,12}", n in any::<i64>(), s in "\\PC{0,12}") {
            let call = ToolCall::new(name, obj(json!({"n": n, "s": s})));
            let ex = extract_tool_calls(&call.to_fence());
            prop_assert_ne!(judge_case(&tax_case(), &ex), Verdict::MalformedJson);
        }
    }
}
