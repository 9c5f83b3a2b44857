use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::dynamics::{DiagnosticReport, SweepReport, SweepVerdict};
use crate::families::Verdict;

pub const SCHEMA_VERSION: u32 = 1;

/// Rows shown in markdown output; the json form carries everything.
const MARKDOWN_ROWS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    Witnessed,
    Fails,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// The document every command emits.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: Value,
    pub verdict: String,
    pub witnesses: Value,
    pub certificates: Vec<Value>,
    pub tuples_checked: u64,
    pub elapsed_ms: Option<u64>,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(config: Value, verdict: &str, witnesses: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            config,
            verdict: verdict.to_string(),
            witnesses,
            certificates: Vec::new(),
            tuples_checked: 0,
            elapsed_ms: None,
            table: None,
        }
    }

    /// Whether the verdict counts as a positive outcome for `--expect`.
    pub fn positive(&self) -> bool {
        matches!(self.verdict.as_str(), "witnessed" | "agree" | "equal" | "reproduced")
    }

    pub fn matches(&self, expect: Expect) -> bool {
        match expect {
            Expect::Any => true,
            Expect::Witnessed => self.positive(),
            Expect::Fails => !self.positive(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# famtrans report\n");
        let _ = writeln!(out, "- schema version: {}", self.schema_version);
        let _ = writeln!(out, "- config: `{}`", self.config);
        let _ = writeln!(out, "- verdict: **{}**", self.verdict);
        let _ = writeln!(out, "- tuples checked: {}", self.tuples_checked);
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(out, "- elapsed: {ms} ms");
        }
        if !self.certificates.is_empty() {
            let _ = writeln!(out, "\n## Certificates\n");
            for c in &self.certificates {
                let name = c.get("name").or_else(|| c.get("kind")).and_then(Value::as_str).unwrap_or("certificate");
                let _ = writeln!(out, "- {name}: `{c}`");
            }
        }
        match &self.table {
            Some(t) if !t.rows.is_empty() => {
                let _ = writeln!(out, "\n## Results\n");
                let _ = writeln!(out, "| {} |", t.header.join(" | "));
                let _ = writeln!(out, "|{}", "---|".repeat(t.header.len()));
                for row in t.rows.iter().take(MARKDOWN_ROWS) {
                    let _ = writeln!(out, "| {} |", row.join(" | "));
                }
                if t.rows.len() > MARKDOWN_ROWS {
                    let _ = writeln!(out, "\n({} more rows in json output)", t.rows.len() - MARKDOWN_ROWS);
                }
            }
            _ => {
                let body = serde_json::to_string_pretty(&self.witnesses).expect("json");
                let _ = writeln!(out, "\n## Witnesses\n\n```json\n{body}\n```");
            }
        }
        out
    }
}

pub fn sweep_verdict(r: &SweepReport) -> &'static str {
    match r.verdict {
        SweepVerdict::Witnessed => "witnessed",
        SweepVerdict::FailsOnWindow => "fails-on-window",
    }
}

pub fn family_verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Witnessed => "witnessed",
        Verdict::Refuted => "refuted",
        Verdict::Undetermined => "undetermined",
    }
}

fn tuple_label(t: &[crate::subshift::Word]) -> String {
    t.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn sweep_table(r: &SweepReport) -> Table {
    Table {
        header: vec!["tuple".into(), "witness".into()],
        rows: r
            .outcomes
            .iter()
            .map(|o| {
                vec![
                    tuple_label(&o.tuple),
                    o.witness.map_or("none".to_string(), |n| n.to_string()),
                ]
            })
            .collect(),
    }
}

pub fn diagnostic_table(r: &DiagnosticReport) -> Table {
    Table {
        header: vec!["cylinder".into(), "entering times".into(), "verdict".into(), "interpretation".into()],
        rows: r
            .cylinders
            .iter()
            .map(|c| {
                vec![
                    format!("[{}]", c.word),
                    c.entering_times.to_string(),
                    family_verdict(c.report.verdict).into(),
                    serde_json::to_value(c.report.interpretation)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_default(),
                ]
            })
            .collect(),
    }
}

/// Compact description of a sweep, for preset reports.
pub fn sweep_summary(r: &SweepReport) -> Value {
    serde_json::json!({
        "rule": r.rule,
        "params": r.params,
        "verdict": sweep_verdict(r),
        "tuples_checked": r.tuples_checked,
        "max_witness": r.max_witness(),
        "failure": r.failure,
    })
}

/// Line diff for golden mismatches: differing lines with their numbers.
pub fn line_diff(expected: &str, actual: &str) -> String {
    let e: Vec<&str> = expected.lines().collect();
    let a: Vec<&str> = actual.lines().collect();
    let mut out = String::new();
    let mut shown = 0;
    for i in 0..e.len().max(a.len()) {
        let (x, y) = (e.get(i), a.get(i));
        if x != y {
            if let Some(x) = x {
                let _ = writeln!(out, "{:>5} - {x}", i + 1);
            }
            if let Some(y) = y {
                let _ = writeln!(out, "{:>5} + {y}", i + 1);
            }
            shown += 1;
            if shown == 40 {
                let _ = writeln!(out, "      ...");
                break;
            }
        }
    }
    out
}
