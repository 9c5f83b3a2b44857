//! Structural certificates that turn a failing window into a proof.
//!
//! A tuple forces a gap `d·n` between 1s when two of its cylinders with
//! time coefficients `c < c'` (`d = c' - c`) carry a 1 at the same relative
//! position. Three such cylinders force a triple of gaps `(d1·n, d2·n)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subshift::{ShiftRule, Word};

/// A law of the rule that excludes a tuple at every time `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawCertificate {
    /// `parity-law` or `triple-law`.
    pub name: String,
    /// Gap multipliers forced by the failing tuple.
    pub forced: Vec<u64>,
    pub claim: String,
    /// The law was checked by enumeration for all arguments up to this bound.
    pub verified_up_to: u64,
}

type Group<'a> = [(u64, &'a Word)];

fn forced_structure(groups: &[Vec<(u64, &Word)>]) -> (BTreeSet<u64>, BTreeSet<(u64, u64)>) {
    let mut gaps = BTreeSet::new();
    let mut triples = BTreeSet::new();
    for group in groups {
        let len = group.iter().map(|(_, w)| w.len()).max().unwrap_or(0);
        for q in 0..len {
            let mut coefs: Vec<u64> = group_coefs_at(group, q);
            coefs.sort_unstable();
            coefs.dedup();
            for (i, &x) in coefs.iter().enumerate() {
                for (j, &y) in coefs.iter().enumerate().skip(i + 1) {
                    gaps.insert(y - x);
                    for &z in &coefs[j + 1..] {
                        triples.insert((y - x, z - y));
                    }
                }
            }
        }
    }
    (gaps, triples)
}

fn group_coefs_at(group: &Group<'_>, q: usize) -> Vec<u64> {
    group
        .iter()
        .filter(|(_, w)| q < w.len() && w.get(q) == 1)
        .map(|&(c, _)| c)
        .collect()
}

/// Look for a law excluding the tuple described by `groups`; each group is one
/// pattern of `(time coefficient, word)` parts sharing an anchor.
pub(crate) fn find(rule: &ShiftRule, groups: &[Vec<(u64, &Word)>], horizon: u64) -> Option<LawCertificate> {
    let (gaps, triples) = forced_structure(groups);
    if rule.spacing_set().is_some_and(|p| p.structure().doubling_free) {
        if let Some(&d) = gaps.iter().find(|&&d| gaps.contains(&(2 * d))) {
            let bound = d.saturating_mul(horizon);
            let holds = (1..=bound).all(|m| !(rule.pair_allowed(m) && rule.pair_allowed(2 * m)));
            if holds {
                return Some(LawCertificate {
                    name: "parity-law".into(),
                    forced: vec![d, 2 * d],
                    claim: format!("m and 2m are never both allowed gaps; the tuple forces gaps {d}n and {}n", 2 * d),
                    verified_up_to: bound,
                });
            }
        }
    }
    if let Some(p) = rule.triple_ratio_p() {
        if let Some(&(d1, d2)) = triples.iter().find(|&&(d1, d2)| d2 == (p - 1) * d1) {
            let holds = (1..=horizon).all(|n| !rule.triple_allowed(d1 * n, d2 * n));
            if holds {
                return Some(LawCertificate {
                    name: "triple-law".into(),
                    forced: vec![d1, d2],
                    claim: format!(
                        "1s at 0, {d1}n, {}n give gaps with g2 = {}·g1, which the rule forbids",
                        d1 + d2,
                        p - 1
                    ),
                    verified_up_to: horizon,
                });
            }
        }
    }
    None
}

/// Validation of the explicit spacer witness for spacing rules: with
/// `t = 2^k` and `s = 2^(2k) + 2^(2k-3)`, the word `u 0^(a_i s - t) v` is
/// admissible for all admissible `u, v` of length `t`, so `n = s` witnesses
/// every tuple of the `a`-transitivity sweep at word length `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormCheck {
    pub k: u32,
    pub t: u64,
    pub s: u64,
    pub vector: Vec<u64>,
    /// Inclusive range containing every cross gap.
    pub gap_range: (u64, u64),
    /// The block of gap lengths with bit length `2k + 2`.
    pub block: (u64, u64),
    pub range_in_block: bool,
    pub range_allowed: bool,
    pub words_checked: u64,
    pub all_admissible: bool,
}

impl ClosedFormCheck {
    pub fn holds(&self) -> bool {
        self.range_in_block && self.range_allowed && self.all_admissible
    }
}

pub fn closed_form_spacing_witness(rule: &ShiftRule, k: u32, a: &[u64]) -> Result<ClosedFormCheck> {
    if !(2..=3).contains(&k) {
        return Err(Error::Config("closed-form witness needs 2 <= k <= 3".into()));
    }
    if a.is_empty() || a.contains(&0) {
        return Err(Error::Config("vector entries must be positive and non-empty".into()));
    }
    let t = 1u64 << k;
    let s = (1u64 << (2 * k)) + (1u64 << (2 * k - 3));
    let amin = *a.iter().min().expect("non-empty");
    let amax = *a.iter().max().expect("non-empty");
    if amin * s < t {
        return Err(Error::Precondition("spacer would be negative".into()));
    }
    let gap_range = (amin * s - t, amax * s + t - 1);
    let block = (1u64 << (2 * k + 1), (1u64 << (2 * k + 2)) - 1);
    let words = rule.enumerate_words(t as usize)?;
    let mut checked = 0u64;
    let mut all = true;
    for &ai in a {
        for u in &words {
            for v in &words {
                let spacer = Word::zeros((ai * s - t) as usize);
                checked += 1;
                all &= rule.is_admissible(&Word::concat(&[u, &spacer, v]));
            }
        }
    }
    Ok(ClosedFormCheck {
        k,
        t,
        s,
        vector: a.to_vec(),
        gap_range,
        block,
        range_in_block: block.0 <= gap_range.0 && gap_range.1 <= block.1,
        range_allowed: (gap_range.0..=gap_range.1).all(|g| rule.pair_allowed(g)),
        words_checked: checked,
        all_admissible: all,
    })
}
