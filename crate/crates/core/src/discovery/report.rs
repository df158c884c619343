//! Discovery reports: JSON layout and human-readable text.

use serde::{Deserialize, Serialize};

use crate::prover::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremKind {
    Identical,
    Collinear,
    Concyclic,
    Parallel,
    Perpendicular,
    Congruent,
}

/// One reported class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem {
    pub kind: TheoremKind,
    /// All points involved, by name.
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<[String; 2]>>,
    /// For direction classes: the lines on each axis, each line as its points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<Vec<Vec<String>>>>,
    pub class_id: String,
    pub color: usize,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureTiming {
    pub statement: String,
    pub verdict: LogVerdict,
    pub ms: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogVerdict {
    Proved,
    Refuted,
    Unknown,
    /// Implied by the construction steps themselves; not sent to the prover.
    Trivial,
}

impl From<Verdict> for LogVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Proved => LogVerdict::Proved,
            Verdict::Refuted => LogVerdict::Refuted,
            Verdict::Unknown => LogVerdict::Unknown,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub numeric_ms: u64,
    pub symbolic_ms: u64,
    pub per_conjecture: Vec<ConjectureTiming>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub phase: u8,
    pub statement: String,
    pub verdict: LogVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscoveryReport {
    pub target: String,
    pub theorems: Vec<Theorem>,
    pub halted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halt_reason: Option<String>,
    pub timings: Timings,
    pub verdict_log: Vec<LogEntry>,
}

impl DiscoveryReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One theorem per line, in report order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(reason) = &self.halt_reason {
            out.push_str(reason);
            out.push('\n');
            return out;
        }
        if self.theorems.is_empty() {
            out.push_str("no non-trivial theorems found\n");
        }
        for t in &self.theorems {
            out.push_str(&t.text);
            out.push('\n');
        }
        out
    }

    pub fn count(&self, kind: TheoremKind) -> usize {
        self.theorems.iter().filter(|t| t.kind == kind).count()
    }
}

/// "A", "A and B", "A, B and C".
pub(crate) fn list(items: &[String]) -> String {
    match items.len() {
        0 => String::new(),
        1 => items[0].clone(),
        n => format!("{} and {}", items[..n - 1].join(", "), items[n - 1]),
    }
}

pub(crate) fn line_name(points: &[String]) -> String {
    points.concat()
}

pub(crate) fn identity_text(points: &[String]) -> String {
    format!("{} are equal", list(points))
}

pub(crate) fn collinear_text(points: &[String]) -> String {
    format!("{} are collinear", list(points))
}

pub(crate) fn concyclic_text(points: &[String]) -> String {
    format!("{} are concyclic", list(points))
}

fn parallel_axis_text(lines: &[String]) -> String {
    if lines.len() == 2 {
        format!("{} is parallel to {}", lines[0], lines[1])
    } else {
        format!("{} are parallel", list(lines))
    }
}

pub(crate) fn direction_text(axes: &[Vec<String>]) -> String {
    match axes {
        [one] => parallel_axis_text(one),
        [a, b] if a.len() == 1 && b.len() == 1 => format!("{} is perpendicular to {}", a[0], b[0]),
        [a, b] => {
            let left = if a.len() == 1 {
                a[0].clone()
            } else {
                parallel_axis_text(a)
            };
            let right = list(b);
            if a.len() == 1 {
                format!("{left} is perpendicular to {right}")
            } else {
                format!("{left}, and perpendicular to {right}")
            }
        }
        _ => String::new(),
    }
}

pub(crate) fn congruent_text(segments: &[String]) -> String {
    format!("{} are congruent", list(segments))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn phrasing() {
        assert_eq!(direction_text(&[s(&["DE", "AB"])]), "DE is parallel to AB");
        assert_eq!(congruent_text(&s(&["BD", "CD"])), "BD and CD are congruent");
        assert_eq!(collinear_text(&s(&["X", "Y", "Z"])), "X, Y and Z are collinear");
        assert_eq!(identity_text(&s(&["G", "H", "I"])), "G, H and I are equal");
        assert_eq!(
            direction_text(&[s(&["AB"]), s(&["CD"])]),
            "AB is perpendicular to CD"
        );
        assert_eq!(
            direction_text(&[s(&["AB", "DE"]), s(&["CF"])]),
            "AB is parallel to DE, and perpendicular to CF"
        );
    }
}
