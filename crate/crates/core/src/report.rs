//! Named residuals checked against tolerances.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

/// One verified identity. Serializes as a single JSON-lines record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub inputs: BTreeMap<String, Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tol,
            pass: passes(residual, tol),
            inputs: BTreeMap::new(),
        }
    }

    /// A check whose outcome is decided by the caller rather than a residual.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn with_input(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.inputs.insert(key.to_string(), v);
        self
    }

    /// Re-judges the check against a different tolerance.
    pub fn retol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.pass = passes(self.residual, tol);
        self
    }
}

fn passes(residual: f64, tol: f64) -> bool {
    residual.is_finite() && residual <= tol
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CheckReport {
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    /// Applies one tolerance to every residual check.
    pub fn override_tol(self, tol: f64) -> Self {
        Self {
            checks: self.checks.into_iter().map(|c| c.retol(tol)).collect(),
        }
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&serde_json::to_string(c).expect("check serializes"));
            out.push('\n');
        }
        out
    }
}

impl FromIterator<Check> for CheckReport {
    fn from_iter<I: IntoIterator<Item = Check>>(iter: I) -> Self {
        Self {
            checks: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        assert!(!Check::new("x", f64::NAN, 1.0).pass);
        assert!(Check::new("x", 0.5, 1.0).pass);
    }

    #[test]
    fn json_line_fields() {
        let c = Check::new("hesse", 1e-12, 1e-9).with_input("k", 2);
        let line = serde_json::to_string(&c).unwrap();
        assert_eq!(
            line,
            r#"{"name":"hesse","residual":1e-12,"tol":1e-9,"pass":true,"inputs":{"k":2}}"#
        );
    }

    #[test]
    fn unreachable_tolerance_fails() {
        let r: CheckReport = [Check::new("a", 1e-17, 1e-9)].into_iter().collect();
        assert!(r.passed());
        assert!(!r.override_tol(1e-30).passed());
    }
}
