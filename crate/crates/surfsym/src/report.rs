use serde::Serialize;
use serde_json::Value;

use crate::SCHEMA_VERSION;

/// One pass/fail decision together with the tolerance it was taken against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, relation: "<=", limit, passed: value <= limit }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, relation: ">=", limit, passed: value >= limit }
    }

    pub fn equals(name: impl Into<String>, value: f64, expected: f64) -> Self {
        Self { name: name.into(), value, relation: "==", limit: expected, passed: value == expected }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::equals(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

pub fn first_failure(checks: &[Check]) -> Option<&Check> {
    checks.iter().find(|c| !c.passed)
}

/// Top-level JSON document written by every subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub config: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub status: &'static str,
    pub first_failure: Option<String>,
    /// Wall-clock measurements; the only part of a report that may differ
    /// between identical runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Value>,
}

impl Report {
    pub fn new(command: &str, config: Value, results: Value, checks: Vec<Check>) -> Self {
        let first = first_failure(&checks).map(|c| c.name.clone());
        Self {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            results,
            status: if first.is_none() { "pass" } else { "fail" },
            first_failure: first,
            checks,
            timing: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Check::at_most("x", f64::NAN, 1.0).passed);
        assert!(!Check::at_least("x", f64::NAN, 1.0).passed);
        assert!(Check::at_most("x", 1.0, 1.0).passed);
    }

    #[test]
    fn first_failing_check_is_named() {
        let r = Report::new(
            "t",
            Value::Null,
            Value::Null,
            vec![Check::holds("a", true), Check::holds("b", false), Check::holds("c", false)],
        );
        assert_eq!(r.status, "fail");
        assert_eq!(r.first_failure.as_deref(), Some("b"));
    }
}
