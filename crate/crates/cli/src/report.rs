use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check ran and the claim it tests does not hold here.
    Finding,
    /// Not applicable to this structure.
    Skipped,
}

impl Verdict {
    pub fn ok(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Skipped)
    }

    pub fn from_bool(pass: bool, otherwise: Verdict) -> Verdict {
        if pass {
            Verdict::Pass
        } else {
            otherwise
        }
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Finding => "finding",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CheckRecord {
    pub name: &'static str,
    pub verdict: Verdict,
    pub summary: String,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct StructureReport {
    pub name: String,
    pub file: String,
    pub sha256: String,
    pub carrier: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<Value>,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub structures: Vec<StructureReport>,
}

impl Report {
    pub fn new(structures: Vec<StructureReport>) -> Self {
        Report { tool: "epscan", version: env!("CARGO_PKG_VERSION"), structures }
    }

    pub fn ok(&self) -> bool {
        self.structures.iter().flat_map(|s| &s.checks).all(|c| c.verdict.ok())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.structures {
            let _ = writeln!(out, "{} ({}, {} elements, sha256 {})", s.name, s.file, s.carrier, &s.sha256[..12]);
            for c in &s.checks {
                let time = c.time_ms.map(|t| format!("  [{t:.1} ms]")).unwrap_or_default();
                let _ = writeln!(out, "  {:<12} {:<8} {}{}", c.name, c.verdict.label(), c.summary, time);
            }
        }
        out
    }
}
