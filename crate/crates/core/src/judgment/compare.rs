use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use super::normalize::normalize_text;

const RELATIVE_TOLERANCE: f64 = 1e-9;
const ABSOLUTE_TOLERANCE: f64 = 1e-12;

/// How keys present only in the actual arguments are treated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtraKeys {
    #[default]
    Reject,
    Allow,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamComparison {
    pub matched: bool,
    pub missing: Vec<String>,
    pub mismatched: Vec<String>,
    pub extra: Vec<String>,
}

/// Lenient JSON comparison.
///
/// Numbers and numeric strings compare as numbers within a relative tolerance
/// of 1e-9 (absolute 1e-12 near zero), text compares by [`normalize_text`],
/// `"true"`/`"false"` coerce to booleans, arrays compare element-wise in
/// order and objects key by key. Keys themselves are compared exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Matcher {
    pub extra_keys: ExtraKeys,
}

impl Matcher {
    pub fn new(extra_keys: ExtraKeys) -> Self {
        Self { extra_keys }
    }

    pub fn values_equal(&self, expected: &Value, actual: &Value) -> bool {
        use Value::*;
        match (expected, actual) {
            (Null, Null) => true,
            (Bool(a), Bool(b)) => a == b,
            (Bool(b), String(s)) | (String(s), Bool(b)) => parse_bool(s) == Some(*b),
            (Number(a), Number(b)) => numbers_close(as_f64(a), as_f64(b)),
            (Number(n), String(s)) | (String(s), Number(n)) => {
                parse_number(s).is_some_and(|x| numbers_close(as_f64(n), x))
            }
            (String(a), String(b)) => match (parse_number(a), parse_number(b)) {
                (Some(x), Some(y)) => numbers_close(x, y),
                _ => a == b || normalize_text(a) == normalize_text(b),
            },
            (Array(a), Array(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.values_equal(x, y))
            }
            (Object(a), Object(b)) => self.compare_parameters(a, b).matched,
            _ => false,
        }
    }

    pub fn compare_parameters(
        &self,
        expected: &Map<String, Value>,
        actual: &Map<String, Value>,
    ) -> ParamComparison {
        let mut cmp = ParamComparison::default();
        for (key, want) in expected {
            match actual.get(key) {
                None => cmp.missing.push(key.clone()),
                Some(got) if !self.values_equal(want, got) => cmp.mismatched.push(key.clone()),
                Some(_) => {}
            }
        }
        cmp.extra = actual
            .keys()
            .filter(|k| !expected.contains_key(*k))
            .cloned()
            .collect();
        cmp.matched = cmp.missing.is_empty()
            && cmp.mismatched.is_empty()
            && (self.extra_keys == ExtraKeys::Allow || cmp.extra.is_empty());
        cmp
    }
}

pub fn values_equal(expected: &Value, actual: &Value) -> bool {
    Matcher::default().values_equal(expected, actual)
}

pub fn compare_parameters(expected: &Map<String, Value>, actual: &Map<String, Value>) -> ParamComparison {
    Matcher::default().compare_parameters(expected, actual)
}

fn as_f64(n: &Number) -> f64 {
    n.as_f64().unwrap_or(f64::NAN)
}

fn parse_number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|x| x.is_finite())
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_lowercase().as_str() {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

fn numbers_close(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= (RELATIVE_TOLERANCE * scale).max(ABSOLUTE_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    fn map(v: Value) -> Map<String, Value> {
        v.as_object().cloned().unwrap()
    }

    #[test]
    fn string_number_coercion() {
        assert!(values_equal(&json!("150000"), &json!(150000)));
        assert!(values_equal(&json!(150000), &json!(" 150000 ")));
        assert!(values_equal(&json!("98500.50"), &json!(98500.5)));
        assert!(values_equal(&json!(180), &json!(180.0)));
        assert!(values_equal(&json!("1.0"), &json!("1")));
        assert!(!values_equal(&json!(5), &json!(6)));
        assert!(!values_equal(&json!("5 лв"), &json!(5)));
        assert!(!values_equal(&json!("NaN"), &json!(0)));
    }

    #[test]
    fn tolerance() {
        assert!(values_equal(&json!(0.1 + 0.2), &json!(0.3)));
        assert!(values_equal(&json!(1e-13), &json!(0)));
        assert!(!values_equal(&json!(1e-11), &json!(0)));
        assert!(!values_equal(&json!(1.0), &json!(1.000001)));
    }

    #[test]
    fn text_leniency() {
        assert!(values_equal(&json!("Варна"), &json!("Varna")));
        assert!(values_equal(&json!("Sofia"), &json!("София")));
        assert!(values_equal(&json!("Ще закъснея"), &json!("ще закъснея.")));
        assert!(!values_equal(&json!("Varna"), &json!("Burgas")));
    }

    #[test]
    fn booleans_and_structure() {
        assert!(values_equal(&json!(true), &json!("true")));
        assert!(values_equal(&json!("FALSE"), &json!(false)));
        assert!(!values_equal(&json!(true), &json!("yes")));
        assert!(!values_equal(&json!(true), &json!(1)));
        assert!(values_equal(&json!(null), &json!(null)));
        assert!(!values_equal(&json!(null), &json!("")));
        assert!(values_equal(&json!(["Варна", 1]), &json!(["varna", "1"])));
        assert!(!values_equal(&json!(["a", "b"]), &json!(["b", "a"])));
        assert!(!values_equal(&json!([1]), &json!([1, 1])));
        assert!(values_equal(&json!({"city": "Русе"}), &json!({"city": "Ruse"})));
    }

    #[test]
    fn parameter_comparison() {
        let c = compare_parameters(&map(json!({"city": "Sofia"})), &map(json!({"city": "sofia"})));
        assert!(c.matched);

        let c = compare_parameters(&map(json!({"a": 1, "b": 2})), &map(json!({"a": 1})));
        assert!(!c.matched);
        assert_eq!(c.missing, vec!["b"]);

        let c = compare_parameters(&map(json!({"a": 1})), &map(json!({"a": 1, "extra": "x"})));
        assert!(!c.matched);
        assert_eq!(c.extra, vec!["extra"]);
        let lenient = Matcher::new(ExtraKeys::Allow);
        assert!(lenient
            .compare_parameters(&map(json!({"a": 1})), &map(json!({"a": 1, "extra": "x"})))
            .matched);

        // keys are schema identifiers: no case folding or transliteration
        let c = compare_parameters(&map(json!({"City": "Sofia"})), &map(json!({"city": "Sofia"})));
        assert_eq!(c.missing, vec!["City"]);

        let c = compare_parameters(&map(json!({"a": 1})), &map(json!({"a": 2})));
        assert_eq!(c.mismatched, vec!["a"]);
    }

    fn json_value() -> impl Strategy<Value = Value> {
        let leaf = prop_oneof![
            Just(Value::Null),
            any::<bool>().prop_map(Value::Bool),
            any::<i32>().prop_map(|n| json!(n)),
            (-1e6f64..1e6).prop_map(|f| json!(f)),
            "[a-zA-Zа-я0-9 .!?-]{0,8}".prop_map(Value::String),
            prop_oneof![Just("true"), Just("False"), Just("12"), Just("1e3")]
                .prop_map(|s| Value::String(s.into())),
        ];
        leaf.prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 0..4).prop_map(Value::Array),
                proptest::collection::btree_map("[a-c]", inner, 0..4)
                    .prop_map(|m| Value::Object(m.into_iter().collect())),
            ]
        })
    }

    proptest! {
        #[test]
        fn reflexive(v in json_value()) {
            prop_assert!(values_equal(&v, &v));
        }

        #[test]
        fn symmetric(a in json_value(), b in json_value()) {
            prop_assert_eq!(values_equal(&a, &b), values_equal(&b, &a));
        }
    }
}
