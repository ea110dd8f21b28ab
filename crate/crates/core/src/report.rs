//! Uniform pass/fail records emitted by every verifier.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::exactarith::Valuation;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// One check: what was run, with which parameters, what was observed, what
/// was required, and whether it passed.
///
/// Serializes with keys in the order `check, params, observed, required,
/// verdict`; `params` is a sorted map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub observed: Value,
    pub required: Value,
    pub verdict: Verdict,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            params: BTreeMap::new(),
            observed: Value::Null,
            required: Value::Null,
            verdict: Verdict::Fail,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_owned(), value.into());
        self
    }

    pub fn observed(mut self, value: impl Into<Value>) -> Self {
        self.observed = value.into();
        self
    }

    pub fn required(mut self, value: impl Into<Value>) -> Self {
        self.required = value.into();
        self
    }

    /// Records a valuation test `observed ≥ required` and sets the verdict.
    pub fn valuation_at_least(self, observed: Valuation, required: i64) -> Self {
        let ok = observed.at_least(required);
        self.observed(observed.to_json())
            .required(format!(">= {required}"))
            .verdict(ok)
    }

    /// Records an exact equality test between two rendered values.
    pub fn equality(self, lhs: impl fmt::Display, rhs: impl fmt::Display) -> Self {
        let (l, r) = (lhs.to_string(), rhs.to_string());
        let ok = l == r;
        self.observed(l).required(r).verdict(ok)
    }

    pub fn verdict(mut self, ok: bool) -> Self {
        self.verdict = Verdict::from_bool(ok);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

/// Whether every record passed (vacuously true for none).
pub fn all_pass<'a>(records: impl IntoIterator<Item = &'a CheckRecord>) -> bool {
    records.into_iter().all(CheckRecord::passed)
}

/// Renders a value compactly for table output: strings without quotes.
pub fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".to_owned(),
        other => other.to_string(),
    }
}

pub fn render_params(params: &BTreeMap<String, Value>) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={}", render_value(v)))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_key_order_is_stable() {
        let rec = CheckRecord::new("demo")
            .param("r", 1)
            .param("p", 5)
            .valuation_at_least(Valuation::Finite(3), 3);
        assert_eq!(
            rec.to_json_line(),
            r#"{"check":"demo","params":{"p":5,"r":1},"observed":3,"required":">= 3","verdict":"pass"}"#
        );
    }

    #[test]
    fn infinite_valuation_passes() {
        let rec = CheckRecord::new("zero").valuation_at_least(Valuation::Infinite, 100);
        assert!(rec.passed());
        assert_eq!(rec.observed, Value::from("inf"));
    }

    #[test]
    fn equality_records() {
        assert!(CheckRecord::new("eq").equality(3, "3").passed());
        assert!(!CheckRecord::new("eq").equality(3, 4).passed());
        assert!(all_pass(&[]));
    }
}
