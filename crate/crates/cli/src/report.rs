use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

/// Process exit codes.
pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// The JSON document printed for every invocation.
#[derive(Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dialect: Option<String>,
    pub verdict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signature: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    pub budget: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
    pub outcome: String,
    pub exit: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            ..RunReport::default()
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<String>) {
        self.inputs.insert(key.to_string(), value.into());
    }

    pub fn set_verdict(&mut self, v: bool) {
        self.verdict = Some(v);
        self.exit = if v { EXIT_TRUE } else { EXIT_FALSE };
        self.outcome = v.to_string();
    }

    pub fn fail(&mut self, exit: i32, msg: String) {
        self.verdict = None;
        self.exit = exit;
        self.outcome = if exit == EXIT_BUDGET {
            "budget-exhausted"
        } else {
            "input-error"
        }
        .to_string();
        self.error = Some(msg);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text rendering of the same fields.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.command, self.outcome);
        for (k, v) in &self.inputs {
            let _ = writeln!(out, "  {k}: {}", v.trim_end().replace('\n', "\n    "));
        }
        if let Some(d) = &self.dialect {
            let _ = writeln!(out, "  dialect: {d}");
        }
        if let Some(s) = &self.signature {
            let _ = writeln!(out, "  signature: {s}");
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "  error: {e}");
        }
        if let Value::Object(map) = &self.details {
            for (k, v) in map {
                match v {
                    Value::String(s) => {
                        let _ = writeln!(out, "  {k}: {}", s.trim_end().replace('\n', "\n    "));
                    }
                    Value::Array(a) if a.len() > 12 => {
                        let _ = writeln!(out, "  {k}: [{} entries]", a.len());
                    }
                    other => {
                        let _ = writeln!(out, "  {k}: {other}");
                    }
                }
            }
        }
        if !self.budget.is_empty() {
            let counters: Vec<String> = self
                .budget
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            let _ = writeln!(out, "  budget: {}", counters.join(" "));
        }
        if self.witness.is_some() {
            let _ = writeln!(out, "  witness: attached (use --witness FILE to save it)");
        }
        if let Some(t) = self.timing_ms {
            let _ = writeln!(out, "  time: {t} ms");
        }
        out
    }
}
