//! Fixed parameter bundles with expected outcomes and checked-in golden
//! reports. The library computes; only this module knows what to expect.

use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use super::report::{family_verdict, sweep_summary, Report};
use crate::dynamics::{
    check_a_transitive, check_delta_a_transitive, closed_form_spacing_witness, point_diagnostic,
    verify_delta_product, verify_nuv, verify_orbit_closure_prop, SweepReport,
};
use crate::error::{Error, Result};
use crate::families::{fa_grid_report, fa_structural_refute_even, FamilyQuery, GridParams, Verdict, Witness};
use crate::intset::{SetRule, WindowedSet};
use crate::points::{build_transitive_point, champernowne, periodic};
use crate::subshift::{ShiftRule, Word};

const PRESETS: &[&str] = &[
    "example-spacing-23",
    "example-delta-p",
    "lemma-nuv",
    "thm-wm-point",
    "fa-parity",
    "prop-orbit-closure",
    "prop-delta-product",
    "thm-multimin-diag",
];

pub fn preset_names() -> &'static [&'static str] {
    PRESETS
}

pub(crate) fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden").join(format!("{name}.json"))
}

fn golden(name: &str) -> Option<&'static str> {
    let text = match name {
        "example-spacing-23" => include_str!("../../golden/example-spacing-23.json"),
        "example-delta-p-3" => include_str!("../../golden/example-delta-p-3.json"),
        "lemma-nuv" => include_str!("../../golden/lemma-nuv.json"),
        "thm-wm-point" => include_str!("../../golden/thm-wm-point.json"),
        "fa-parity" => include_str!("../../golden/fa-parity.json"),
        "prop-orbit-closure" => include_str!("../../golden/prop-orbit-closure.json"),
        "prop-delta-product" => include_str!("../../golden/prop-delta-product.json"),
        "thm-multimin-diag" => include_str!("../../golden/thm-multimin-diag.json"),
        _ => return None,
    };
    Some(text)
}

/// A preset run: its report, the golden file it is compared with, and that
/// file's checked-in contents (absent for parameters without a golden).
#[derive(Debug, Clone)]
pub struct PresetOutcome {
    pub report: Report,
    pub golden_name: String,
    pub golden: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
struct Claim {
    name: String,
    expected: Value,
    observed: Value,
    matched: bool,
    detail: Value,
}

#[derive(Default)]
struct Claims {
    claims: Vec<Claim>,
    certificates: Vec<Value>,
    tuples: u64,
}

impl Claims {
    fn push(&mut self, name: &str, expected: Value, observed: Value, detail: Value) {
        self.claims.push(Claim {
            name: name.into(),
            matched: expected == observed,
            expected,
            observed,
            detail,
        });
    }

    fn sweep(&mut self, name: &str, expected: &str, certificate: Option<&str>, r: &SweepReport) {
        self.tuples += r.tuples_checked;
        self.certificates.extend(r.certificates.iter().map(|c| serde_json::to_value(c).expect("json")));
        let observed_cert = r.certificates.first().map(|c| c.name.as_str());
        let certified = r.failure.as_ref().is_some_and(|f| f.certified);
        self.push(
            name,
            json!({ "verdict": expected, "certificate": certificate }),
            json!({ "verdict": super::report::sweep_verdict(r), "certificate": observed_cert.filter(|_| certified) }),
            sweep_summary(r),
        );
    }
}

fn rule(text: &str) -> ShiftRule {
    text.parse().expect("preset rule literal")
}

fn word(text: &str) -> Word {
    text.parse().expect("preset word literal")
}

/// Run a preset by name. `param` is required by `example-delta-p` and
/// rejected elsewhere.
pub fn reproduce_preset(name: &str, param: Option<u64>) -> Result<PresetOutcome> {
    if !PRESETS.contains(&name) {
        return Err(Error::Config(format!("unknown preset {name:?}; known: {}", PRESETS.join(", "))));
    }
    if name != "example-delta-p" && param.is_some() {
        return Err(Error::Config(format!("preset {name} takes no parameter")));
    }
    let mut c = Claims::default();
    let golden_name = match name {
        "example-spacing-23" => {
            spacing_23(&mut c)?;
            name.to_string()
        }
        "example-delta-p" => {
            let p = param.ok_or_else(|| Error::Config("example-delta-p needs p".into()))?;
            if p < 3 {
                return Err(Error::Config("example-delta-p needs p >= 3".into()));
            }
            delta_p(&mut c, p)?;
            format!("{name}-{p}")
        }
        "lemma-nuv" => {
            nuv(&mut c)?;
            name.to_string()
        }
        "thm-wm-point" => {
            wm_point(&mut c)?;
            name.to_string()
        }
        "fa-parity" => {
            fa_parity(&mut c)?;
            name.to_string()
        }
        "prop-orbit-closure" => {
            orbit_closure(&mut c)?;
            name.to_string()
        }
        "prop-delta-product" => {
            delta_product(&mut c)?;
            name.to_string()
        }
        "thm-multimin-diag" => {
            multimin(&mut c)?;
            name.to_string()
        }
        _ => unreachable!("checked against PRESETS"),
    };
    let all = c.claims.iter().all(|x| x.matched);
    let config = json!({ "command": "reproduce", "preset": name, "param": param });
    let mut report = Report::new(
        config,
        if all { "reproduced" } else { "not-reproduced" },
        serde_json::to_value(&c.claims).expect("json"),
    );
    report.certificates = c.certificates;
    report.tuples_checked = c.tuples;
    report.table = Some(super::Table {
        header: ["claim", "expected", "observed", "matched"].map(String::from).to_vec(),
        rows: c
            .claims
            .iter()
            .map(|x| vec![x.name.clone(), x.expected.to_string(), x.observed.to_string(), x.matched.to_string()])
            .collect(),
    });
    let golden = golden(&golden_name).filter(|g| !g.is_empty());
    Ok(PresetOutcome { report, golden_name, golden })
}

fn spacing_23(c: &mut Claims) -> Result<()> {
    let dy = rule("spacing(dyadic())");
    let r = check_a_transitive(&dy, &[2, 3], 4, 20_000)?;
    c.sweep("a-transitive (2,3), word length 4", "witnessed", None, &r);

    let cf = closed_form_spacing_witness(&dy, 2, &[2, 3])?;
    c.push(
        "closed-form spacer k=2",
        json!({ "t": 4, "s": 18, "gap_range": [32, 57], "block": [32, 63], "holds": true }),
        json!({ "t": cf.t, "s": cf.s, "gap_range": cf.gap_range, "block": cf.block, "holds": cf.holds() }),
        serde_json::to_value(&cf).expect("json"),
    );

    let r = check_a_transitive(&dy, &[1, 2], 1, 1_000_000)?;
    c.sweep("a-transitive (1,2) fails on [1]^4", "fails-on-window", Some("parity-law"), &r);
    Ok(())
}

fn delta_p(c: &mut Claims, p: u64) -> Result<()> {
    let tr = ShiftRule::triple_ratio(p)?;
    let r = check_delta_a_transitive(&tr, &[1, 2], 3, 10_000)?;
    c.sweep("delta-transitive (1,2), word length 3", "witnessed", None, &r);
    let r = check_delta_a_transitive(&tr, &[1, p], 1, 1_000_000)?;
    c.sweep(&format!("delta-transitive (1,{p}) fails on [1]^3"), "fails-on-window", Some("triple-law"), &r);
    Ok(())
}

fn nuv(c: &mut Claims) -> Result<()> {
    let full = ShiftRule::full();
    let x = champernowne(8)?;
    let mut words = Vec::new();
    for l in 1..=3 {
        words.extend(full.enumerate_words(l)?);
    }
    let h = (x.len() - 3) as u64;
    let mut pairs = 0u64;
    let mut mismatches = Vec::new();
    for u in &words {
        for v in &words {
            let r = verify_nuv(&full, &x, u, v, Some(h), Some(512))?;
            pairs += 1;
            if !r.equal {
                mismatches.push(json!({ "u": u, "v": v, "violations": r.violations.len(), "misses": r.misses.len() }));
            }
        }
    }
    c.tuples += pairs;
    c.push(
        "hitting times equal entering-time differences on [1,512]",
        json!({ "pairs": 196, "mismatches": 0 }),
        json!({ "pairs": pairs, "mismatches": mismatches.len() }),
        json!({ "prefix_len": x.len(), "horizon": h, "failing_pairs": mismatches }),
    );
    Ok(())
}

fn wm_point(c: &mut Claims) -> Result<()> {
    let full = ShiftRule::full();
    let x = champernowne(14)?;
    let q: FamilyQuery = "nabla(thick(16))".parse()?;
    let r = point_diagnostic(&full, &x, 2, 100_000, &q)?;
    c.tuples += r.cylinders.len() as u64;
    c.push(
        "full shift: differences of entering times are thick",
        json!({ "verdict": "witnessed", "cylinders": 4 }),
        json!({ "verdict": family_verdict(r.verdict), "cylinders": r.cylinders.len() }),
        json!({ "prefix_len": x.len(), "entering_times": r.cylinders.iter().map(|cd| json!([cd.word, cd.entering_times])).collect::<Vec<_>>() }),
    );

    let evens = ShiftRule::spacing(SetRule::evens())?;
    let y = build_transitive_point(&evens, 3, 64, 4000)?;
    let h = 3000;
    let s = y.entering_window(&word("1"), h)?;
    let q: FamilyQuery = "nabla(thick(2))".parse()?;
    let rep = q.evaluate(&s)?;
    let diffs: WindowedSet = s.difference_set();
    let odd = diffs.members().iter().find(|&&d| d % 2 == 1).copied();
    c.tuples += 1;
    c.push(
        "even spacing: [1] has no thick differences",
        json!({ "witnessed": false, "odd_difference": null }),
        json!({ "witnessed": rep.verdict == Verdict::Witnessed, "odd_difference": odd }),
        json!({
            "prefix_len": y.len(),
            "horizon": h,
            "entering_times": s.len(),
            "differences": diffs.len(),
            "holds_on_window": rep.holds_on_window,
        }),
    );
    Ok(())
}

fn fa_parity(c: &mut Claims) -> Result<()> {
    let vectors: [&[u64]; 4] = [&[1, 2], &[1, 3], &[2, 4], &[1, 3, 5]];
    for a in vectors {
        let rep = fa_structural_refute_even(a)?;
        let cert = rep.certificate().expect("refutation carries a certificate");
        c.certificates.push(serde_json::to_value(cert).expect("json"));
        c.push(
            &format!("even numbers refuted for a={a:?}"),
            json!({ "verdict": "refuted", "certificate": "even-parity" }),
            json!({ "verdict": family_verdict(rep.verdict), "certificate": cert.name() }),
            serde_json::to_value(cert).expect("json"),
        );
    }
    for a in vectors {
        let nat = WindowedSet::new(201, 1..=200)?;
        let grid = GridParams { n_max: 4, k_max: 1, ..GridParams::default() };
        let rep = fa_grid_report(&nat, a, &grid)?;
        let cells = match &rep.witness {
            Some(Witness::Cells { cells }) => cells.clone(),
            _ => Vec::new(),
        };
        c.tuples += cells.len() as u64;
        c.push(
            &format!("naturals witnessed for a={a:?} with k=1"),
            json!({ "verdict": "witnessed", "all_k_one": true }),
            json!({ "verdict": family_verdict(rep.verdict), "all_k_one": !cells.is_empty() && cells.iter().all(|w| w.k == 1) }),
            json!({ "cells": cells.len(), "n_max": grid.n_max }),
        );
    }
    Ok(())
}

fn orbit_closure(c: &mut Claims) -> Result<()> {
    for (text, a, len) in [("full()", &[1u64, 2, 3][..], 2usize), ("spacing(dyadic())", &[2, 3][..], 1)] {
        let r = verify_orbit_closure_prop(&rule(text), a, len, 10_000)?;
        c.tuples += r.tuples_checked;
        let disagreements = r.rows.iter().filter(|row| !row.agree).count();
        c.push(
            &format!("{text} a={a:?}: orbit side equals hitting side"),
            json!({ "agree": true }),
            json!({ "agree": r.agree }),
            json!({
                "reduced": r.reduced,
                "wordlen": len,
                "horizon": r.horizon,
                "tuples": r.tuples_checked,
                "disagreements": disagreements,
                "both_hit": r.rows.iter().filter(|row| row.lhs.is_some() && row.rhs.is_some()).count(),
            }),
        );
    }
    Ok(())
}

fn delta_product(c: &mut Claims) -> Result<()> {
    let r = verify_delta_product(&ShiftRule::full(), &[1, 2], 2, 1, 1000)?;
    let hyp = r.hypothesis.as_deref().expect("hypothesis attached");
    c.tuples += hyp.tuples_checked;
    c.push(
        "full shift: base hypothesis (1,2,3,4) holds",
        json!("witnessed"),
        json!(super::report::sweep_verdict(hyp)),
        sweep_summary(hyp),
    );
    c.sweep("full shift: product diagonal transitivity, a=(1,2), depth 2", "witnessed", None, &r);
    Ok(())
}

fn multimin(c: &mut Claims) -> Result<()> {
    let full = ShiftRule::full();
    let zero = periodic(&word("0"), 200)?;
    let q: FamilyQuery = "fsa(1,2,3;2,1)".parse()?;
    let r = point_diagnostic(&full, &zero, 1, 100, &q)?;
    c.tuples += r.cylinders.len() as u64;
    c.push(
        "fixed point 0: fsa(1,2,3) holds",
        json!({ "verdict": "witnessed" }),
        json!({ "verdict": family_verdict(r.verdict) }),
        serde_json::to_value(&r.cylinders).expect("json"),
    );

    let two = periodic(&word("10"), 400)?;
    let q: FamilyQuery = "fsa(1,2;1,2)".parse()?;
    let r = point_diagnostic(&full, &two, 1, 300, &q)?;
    c.tuples += r.cylinders.len() as u64;
    let one = r.cylinders.iter().find(|cd| cd.word == word("1"));
    let cert = one.and_then(|cd| cd.report.certificate());
    if let Some(cert) = cert {
        c.certificates.push(json!({ "cylinder": "1", "name": cert.name(), "certificate": cert }));
    }
    let cell = match cert {
        Some(crate::families::Certificate::ResidueClass { modulus, n, .. }) => json!({ "modulus": modulus, "n": n }),
        _ => Value::Null,
    };
    c.push(
        "period-2 point 10: fsa(1,2) cell refuted by parity",
        json!({ "verdict": "refuted", "certificate": "residue-class", "cell": { "modulus": 2, "n": [0, 1] } }),
        json!({ "verdict": family_verdict(r.verdict), "certificate": cert.map(|x| x.name()), "cell": cell }),
        serde_json::to_value(&r.cylinders).expect("json"),
    );
    Ok(())
}
