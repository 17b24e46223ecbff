//! Deterministic run reports: rational strings, floats rounded to 12
//! significant digits, SHA-256 digests of every input.

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Structured,
}

impl std::str::FromStr for Format {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Self::Text),
            "structured" => Ok(Self::Structured),
            _ => Err(crate::Error::InvalidArgument(format!("unknown format '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    /// Only filled on request, so default reports stay byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round12(x))) {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

impl RunReport {
    pub fn new<S: AsRef<str>>(command: &[S]) -> Self {
        Self {
            command: command.iter().map(|s| s.as_ref().to_string()).collect(),
            tool_version: TOOL_VERSION.to_string(),
            seed: None,
            inputs: Vec::new(),
            results: Map::new(),
            checks: Vec::new(),
            wall_time_secs: None,
        }
    }

    pub fn digest(&mut self, name: &str, bytes: &[u8]) {
        self.inputs.push(InputDigest {
            name: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
    }

    pub fn set<T: Serialize>(&mut self, key: &str, value: T) {
        let mut v = serde_json::to_value(value).unwrap_or(Value::Null);
        round_floats(&mut v);
        self.results.insert(key.to_string(), v);
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => {
                let mut v = serde_json::to_value(self).expect("report serializes");
                round_floats(&mut v);
                serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
            }
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        out += &format!("command: {}\n", self.command.join(" "));
        out += &format!("version: {}\n", self.tool_version);
        if let Some(seed) = self.seed {
            out += &format!("seed: {seed}\n");
        }
        for d in &self.inputs {
            out += &format!("input: {} sha256:{}\n", d.name, d.sha256);
        }
        if !self.results.is_empty() {
            out += "results:\n";
            for (k, v) in &self.results {
                match v {
                    Value::String(s) => out += &format!("  {k}: {s}\n"),
                    Value::Array(items) if items.iter().any(|i| i.is_object()) => {
                        out += &format!("  {k}:\n");
                        for i in items {
                            out += &format!("    - {i}\n");
                        }
                    }
                    _ => out += &format!("  {k}: {v}\n"),
                }
            }
        }
        if !self.checks.is_empty() {
            out += "checks:\n";
            for c in &self.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                out += &format!("  {tag} {}: {}\n", c.name, c.detail);
            }
        }
        if let Some(t) = self.wall_time_secs {
            out += &format!("wall_time_secs: {}\n", round12(t));
        }
        out += &format!("status: {}\n", if self.passed() { "pass" } else { "FAIL" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_rounded() {
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        let mut r = RunReport::new(&["x"]);
        r.set("v", 2f64.sqrt());
        r.check("ok", true, "");
        let text = r.render(Format::Structured);
        assert!(text.contains("1.41421356237"));
        assert!(!text.contains("1.414213562373"));
        assert!(r.render(Format::Text).ends_with("status: pass\n"));
    }

    #[test]
    fn failures_flip_status() {
        let mut r = RunReport::new(&["x"]);
        r.check("bad", false, "nope");
        assert!(!r.passed());
        assert!(r.render(Format::Text).contains("FAIL bad: nope"));
    }
}
