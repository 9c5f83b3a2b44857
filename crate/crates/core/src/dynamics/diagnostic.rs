use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyQuery, Verdict, WindowReport};
use crate::points::{GeneratedPoint, PointSource};
use crate::subshift::{ShiftRule, Word};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderDiagnostic {
    pub word: Word,
    pub entering_times: usize,
    pub report: WindowReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub rule: ShiftRule,
    pub query: FamilyQuery,
    pub wordlen: usize,
    pub horizon: u64,
    /// The weakest per-cylinder verdict.
    pub verdict: Verdict,
    pub cylinders: Vec<CylinderDiagnostic>,
}

/// The cylinders a point must visit: the rule's admissible words, or for a
/// periodic point the words of its own (finite) orbit.
fn cylinders(rule: &ShiftRule, point: &GeneratedPoint, len: usize) -> Result<Vec<Word>> {
    if let Some(period) = point.period() {
        let t = period.len();
        let p = point.prefix().symbols();
        if p.len() < t + len {
            return Err(Error::Precondition("periodic prefix shorter than one period plus a word".into()));
        }
        let found: BTreeSet<Word> = (0..t).map(|i| Word::new(p[i..i + len].to_vec()).expect("binary")).collect();
        return Ok(found.into_iter().collect());
    }
    let words = rule.enumerate_words(len)?;
    if let Some(w) = words.iter().find(|w| point.first_occurrence(w).is_none()) {
        return Err(Error::Precondition(format!("point is not transitive at scale {len}: {w} never occurs")));
    }
    Ok(words)
}

/// Apply a family query to the entering window of every cylinder of length `len`.
pub fn point_diagnostic(
    rule: &ShiftRule,
    point: &GeneratedPoint,
    len: usize,
    horizon: u64,
    query: &FamilyQuery,
) -> Result<DiagnosticReport> {
    if len == 0 {
        return Err(Error::Config("word length must be >= 1".into()));
    }
    let built_for_rule = matches!(point.source(), PointSource::Greedy { rule: r, .. } if r == rule);
    if !built_for_rule && !rule.is_admissible(point.prefix()) {
        return Err(Error::Precondition(format!("point prefix is not admissible for {rule}")));
    }
    let words = cylinders(rule, point, len)?;
    let cylinders: Vec<CylinderDiagnostic> = words
        .into_par_iter()
        .map(|word| {
            let s = point.entering_window(&word, horizon)?;
            Ok(CylinderDiagnostic {
                entering_times: s.len(),
                report: query.evaluate(&s)?,
                word,
            })
        })
        .collect::<Result<_>>()?;
    let verdict = cylinders
        .iter()
        .map(|c| c.report.verdict)
        .min()
        .unwrap_or(Verdict::Undetermined);
    Ok(DiagnosticReport {
        rule: rule.clone(),
        query: query.clone(),
        wordlen: len,
        horizon,
        verdict,
        cylinders,
    })
}
