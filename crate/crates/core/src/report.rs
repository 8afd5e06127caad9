//! Structured verification output shared by all verifiers.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

/// One asserted comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Tabular trace written as CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Trace {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Trace { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub operation: String,
    pub params: Value,
    pub values: BTreeMap<String, Value>,
    pub reference: BTreeMap<String, Value>,
    pub tolerance: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub wall_time_s: f64,
    #[serde(skip)]
    pub traces: Vec<Trace>,
    #[serde(skip)]
    started: Option<Instant>,
}

impl Report {
    pub fn new(operation: &str, params: impl Serialize) -> Self {
        Report {
            operation: operation.into(),
            params: serde_json::to_value(params).unwrap_or(Value::Null),
            values: BTreeMap::new(),
            reference: BTreeMap::new(),
            tolerance: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
            wall_time_s: 0.0,
            traces: Vec::new(),
            started: Some(Instant::now()),
        }
    }

    pub fn value(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.values.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn reference(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.reference.insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    /// Records a check with an explicit verdict.
    pub fn check(&mut self, name: &str, value: f64, reference: f64, tolerance: f64, pass: bool) -> &mut Self {
        self.tolerance.insert(name.into(), tolerance);
        self.checks.push(Check { name: name.into(), value, reference, tolerance, pass, note: None });
        self.pass &= pass;
        self
    }

    /// `|value - reference| <= tol * |reference|`.
    pub fn check_rel(&mut self, name: &str, value: f64, reference: f64, tol: f64) -> &mut Self {
        let pass = (value - reference).abs() <= tol * reference.abs();
        self.check(name, value, reference, tol, pass)
    }

    /// `|value - reference| <= tol`.
    pub fn check_abs(&mut self, name: &str, value: f64, reference: f64, tol: f64) -> &mut Self {
        let pass = (value - reference).abs() <= tol;
        self.check(name, value, reference, tol, pass)
    }

    /// `value < bound`.
    pub fn check_below(&mut self, name: &str, value: f64, bound: f64) -> &mut Self {
        self.check(name, value, bound, bound, value < bound)
    }

    pub fn check_flag(&mut self, name: &str, ok: bool) -> &mut Self {
        self.check(name, ok as u8 as f64, 1.0, 0.0, ok)
    }

    pub fn note(&mut self, text: &str) -> &mut Self {
        if let Some(c) = self.checks.last_mut() {
            c.note = Some(text.into());
        }
        self
    }

    pub fn trace(&mut self, t: Trace) -> &mut Self {
        self.traces.push(t);
        self
    }

    pub fn get_check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn get_trace(&self, name: &str) -> Option<&Trace> {
        self.traces.iter().find(|t| t.name == name)
    }

    /// Stamps the wall time. Called once by each verifier before returning.
    pub fn finish(mut self) -> Self {
        if let Some(t) = self.started {
            self.wall_time_s = t.elapsed().as_secs_f64();
        }
        self
    }

    /// Folds another report's checks in under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: &Report) {
        for c in &other.checks {
            let mut c = c.clone();
            c.name = format!("{prefix}.{}", c.name);
            self.tolerance.insert(c.name.clone(), c.tolerance);
            self.pass &= c.pass;
            self.checks.push(c);
        }
        for t in &other.traces {
            let mut t = t.clone();
            t.name = format!("{prefix}_{}", t.name);
            self.traces.push(t);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap_or_default()
    }

    /// Writes `report.json` and one `trace_<name>.csv` per trace.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut f = fs::File::create(dir.join("report.json"))?;
        f.write_all(self.to_json().as_bytes())?;
        for t in &self.traces {
            fs::write(dir.join(format!("trace_{}.csv", t.name)), t.to_csv())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_and_serialisation() {
        let mut r = Report::new("demo", serde_json::json!({"n": 1}));
        r.check_rel("a", 1.0 + 1e-9, 1.0, 1e-8).check_below("b", 0.5, 1.0);
        assert!(r.pass);
        r.check_flag("c", false);
        assert!(!r.pass);
        let mut t = Trace::new("t", &["a", "value"]);
        t.push(vec![0.5, 1.0 / 3.0]);
        r.trace(t);
        let r = r.finish();
        let j: Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["operation", "params", "values", "reference", "tolerance", "pass"] {
            assert!(j.get(key).is_some(), "{key}");
        }
        assert_eq!(r.traces[0].to_csv(), "a,value\n5.0000000000000000e-1,3.3333333333333331e-1\n");
    }
}
