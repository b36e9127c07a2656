//! Check outcomes. A report is `ok` exactly when it carries no violations;
//! every violation names the rule that fired and the concrete witnesses
//! that make it fire again on replay.

use serde::{Deserialize, Serialize};

use crate::set::Subset;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessValue {
    Element(String),
    Set(Vec<String>),
}

/// One concrete object participating in a violation, tagged by the role
/// it plays in the rule ("A", "B", "F", "M", ...).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub role: String,
    pub value: WitnessValue,
}

impl Witness {
    pub fn set(role: &str, s: &Subset) -> Witness {
        Witness {
            role: role.to_string(),
            value: WitnessValue::Set(s.member_labels().iter().map(|l| l.to_string()).collect()),
        }
    }

    pub fn element(role: &str, label: &str) -> Witness {
        Witness { role: role.to_string(), value: WitnessValue::Element(label.to_string()) }
    }

    pub fn render(&self) -> String {
        match &self.value {
            WitnessValue::Element(l) => format!("{}={}", self.role, l),
            WitnessValue::Set(ls) => format!("{}={{{}}}", self.role, ls.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Stable identifier of the rule that failed, e.g. `hull-not-monotone`.
    pub rule: String,
    pub witnesses: Vec<Witness>,
    pub message: String,
}

impl Violation {
    pub fn new(rule: &str, witnesses: Vec<Witness>, message: impl Into<String>) -> Violation {
        Violation { rule: rule.to_string(), witnesses, message: message.into() }
    }

    pub fn witness(&self, role: &str) -> Option<&WitnessValue> {
        self.witnesses.iter().find(|w| w.role == role).map(|w| &w.value)
    }

    pub fn render(&self) -> String {
        let ws: Vec<String> = self.witnesses.iter().map(Witness::render).collect();
        format!("[{}] {} ({})", self.rule, self.message, ws.join("; "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// Non-failing annotations, e.g. "oracle skipped above cap".
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new() -> Report {
        Report { ok: true, violations: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, v: Violation) {
        self.ok = false;
        self.violations.push(v);
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn merge(&mut self, other: Report) {
        self.ok &= other.ok;
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
    }

    /// First violation of the given rule, if any.
    pub fn violation(&self, rule: &str) -> Option<&Violation> {
        self.violations.iter().find(|v| v.rule == rule)
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        out.push_str(if self.ok { "ok\n" } else { "FAILED\n" });
        for v in &self.violations {
            out.push_str("  ");
            out.push_str(&v.render());
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str("  note: ");
            out.push_str(n);
            out.push('\n');
        }
        out
    }
}

impl Default for Report {
    fn default() -> Self {
        Report::new()
    }
}
