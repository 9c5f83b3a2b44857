use serde::{Deserialize, Serialize};

use super::{
    check_delta_a_transitive, check_horizon, check_increasing, certificates, cyl, sweep, words_of,
    SweepParams, SweepReport, DEFAULT_TUPLE_CAP,
};
use crate::error::{Error, Result};
use crate::intset::WindowedSet;
use crate::points::GeneratedPoint;
use crate::subshift::{first_hit, hitting_window, superpose, Cylinder, Pattern, ShiftRule, Word};

/// Comparison of `N([u],[v])` with `N(x,[v]) - N(x,[u])` on `[1, h_cmp]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuvReport {
    pub u: Word,
    pub v: Word,
    pub horizon: u64,
    pub h_cmp: u64,
    pub hitting_count: usize,
    pub difference_count: usize,
    /// Differences that are not hitting times; must be empty.
    pub violations: Vec<u64>,
    /// Hitting times not realized by the prefix.
    pub misses: Vec<u64>,
    pub equal: bool,
}

impl NuvReport {
    pub fn inclusion_holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `{b - a : a ∈ from, b ∈ to, 1 <= b - a <= h_cmp}`.
fn bounded_differences(from: &WindowedSet, to: &WindowedSet, h_cmp: u64) -> Vec<u64> {
    let words = (h_cmp as usize + 1).div_ceil(64);
    let limit = to.horizon();
    let mut target = vec![0u64; (limit as usize).div_ceil(64) + words + 1];
    for &b in to.members() {
        target[(b / 64) as usize] |= 1 << (b % 64);
    }
    let bit_window = |start: u64, w: usize| -> u64 {
        let pos = start + 64 * w as u64;
        let (i, s) = ((pos / 64) as usize, pos % 64);
        let lo = target.get(i).copied().unwrap_or(0) >> s;
        let hi = if s == 0 { 0 } else { target.get(i + 1).copied().unwrap_or(0) << (64 - s) };
        lo | hi
    };
    let mut acc = vec![0u64; words];
    for &a in from.members() {
        for (w, slot) in acc.iter_mut().enumerate() {
            *slot |= bit_window(a, w);
        }
    }
    (1..=h_cmp).filter(|&d| acc[(d / 64) as usize] >> (d % 64) & 1 == 1).collect()
}

/// Check the hitting-set identity for one pair of words against a point prefix.
///
/// `horizon` defaults to the longest window the prefix supports and `h_cmp`
/// to a quarter of it.
pub fn verify_nuv(
    rule: &ShiftRule,
    point: &GeneratedPoint,
    u: &Word,
    v: &Word,
    horizon: Option<u64>,
    h_cmp: Option<u64>,
) -> Result<NuvReport> {
    let wlen = u.len().max(v.len());
    let supported = point.len().saturating_sub(wlen) as u64;
    let h = horizon.unwrap_or(supported);
    if h > supported || h < 2 {
        return Err(Error::Precondition(format!(
            "prefix of length {} supports horizons up to {supported}, asked for {h}",
            point.len()
        )));
    }
    let h_cmp = h_cmp.unwrap_or(h / 4);
    if h_cmp == 0 || h_cmp > h / 2 {
        return Err(Error::Precondition(format!("comparison window must lie in [1, {}]", h / 2)));
    }
    if !rule.is_admissible(point.prefix()) {
        return Err(Error::Precondition(format!("prefix is not admissible for {rule}")));
    }
    for w in words_of(rule, wlen)? {
        if point.first_occurrence(&w).is_none() {
            return Err(Error::Precondition(format!(
                "point is not transitive at scale {wlen}: {w} never occurs"
            )));
        }
    }
    let a = hitting_window(rule, &Cylinder::at_origin(u.clone()), &Cylinder::at_origin(v.clone()), h_cmp)?;
    let nu = point.entering_window(u, h)?;
    let nv = point.entering_window(v, h)?;
    let b = bounded_differences(&nu, &nv, h_cmp);
    let violations: Vec<u64> = b.iter().copied().filter(|&d| !a.contains(d)).collect();
    let misses: Vec<u64> = a.members().iter().copied().filter(|d| b.binary_search(d).is_err()).collect();
    Ok(NuvReport {
        u: u.clone(),
        v: v.clone(),
        horizon: h,
        h_cmp,
        hitting_count: a.len(),
        difference_count: b.len(),
        equal: violations.is_empty() && misses.is_empty(),
        violations,
        misses,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitClosureRow {
    pub tuple: Vec<Word>,
    /// Least `n` with the diagonal orbit entering the product cylinder.
    pub lhs: Option<u64>,
    /// Least `n` in the diagonal hitting set for the reduced vector.
    pub rhs: Option<u64>,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitClosureReport {
    pub rule: ShiftRule,
    pub vector: Vec<u64>,
    pub reduced: Vec<u64>,
    pub wordlen: usize,
    pub horizon: u64,
    pub agree: bool,
    pub tuples_checked: u64,
    pub rows: Vec<OrbitClosureRow>,
}

/// Compare, per `(r+1)`-tuple, the diagonal-orbit condition for `a` (computed
/// by explicit superposition) with the diagonal hitting condition for
/// `a' = (a_2 - a_1, …, a_(r+1) - a_1)` (computed by the hitting kernel).
pub fn verify_orbit_closure_prop(rule: &ShiftRule, a: &[u64], len: usize, horizon: u64) -> Result<OrbitClosureReport> {
    check_horizon(horizon)?;
    check_increasing(a)?;
    if a.len() < 2 {
        return Err(Error::Precondition("orbit-closure check needs at least two coordinates".into()));
    }
    let reduced: Vec<u64> = a[1..].iter().map(|&x| x - a[0]).collect();
    let words = words_of(rule, len)?;
    let offset = rule.sweep_offset(len);
    let lhs = |t: &[Word]| -> Option<u64> {
        (1..=horizon).find(|&n| {
            let cyls: Vec<Cylinder> = t
                .iter()
                .zip(a)
                .map(|(w, &ai)| Cylinder::new(w.clone(), offset + (n * ai) as i64))
                .collect();
            superpose(&cyls).is_some_and(|s| rule.admissible_positions(&s.ones()))
        })
    };
    let coefs: Vec<u64> = std::iter::once(0).chain(reduced.iter().copied()).collect();
    let rhs = |t: &[Word]| -> Option<u64> {
        let pattern = Pattern::new(t.iter().zip(&coefs).map(|(w, &c)| (cyl(rule, w), c)));
        first_hit(rule, &[pattern], horizon)
    };
    // each side is swept on its own so the two computations share no state
    let left = sweep(&words, a.len(), DEFAULT_TUPLE_CAP, lhs)?;
    let right = sweep(&words, a.len(), DEFAULT_TUPLE_CAP, rhs)?;
    let rows: Vec<OrbitClosureRow> = left
        .into_iter()
        .zip(right)
        .map(|(l, r)| OrbitClosureRow {
            agree: l.witness.is_some() == r.witness.is_some(),
            tuple: l.tuple,
            lhs: l.witness,
            rhs: r.witness,
        })
        .collect();
    Ok(OrbitClosureReport {
        rule: rule.clone(),
        vector: a.to_vec(),
        reduced,
        wordlen: len,
        horizon,
        agree: rows.iter().all(|r| r.agree),
        tuples_checked: rows.len() as u64,
        rows,
    })
}

/// Diagonal transitivity of the product `f^(a_1) × … × f^(a_r)` at depth `d`:
/// for every family `u_i^(0..=d)` there is `m <= horizon` with
/// `u_i^(j)` placed at `j·m·a_i` admissible for every coordinate `i`.
///
/// The hypothesis (diagonal transitivity of the base for `(1, …, d·max a)`)
/// is swept at word length 1 and attached to the report.
pub fn verify_delta_product(rule: &ShiftRule, a: &[u64], depth: u64, len: usize, horizon: u64) -> Result<SweepReport> {
    check_horizon(horizon)?;
    check_increasing(a)?;
    if depth == 0 {
        return Err(Error::Config("depth must be >= 1".into()));
    }
    let d = depth as usize;
    let top = depth * *a.iter().max().expect("non-empty");
    let base: Vec<u64> = (1..=top).collect();
    let hypothesis = check_delta_a_transitive(rule, &base, 1, horizon)?;
    let words = words_of(rule, len)?;
    let groups_of = |t: &[Word]| -> Vec<Vec<(u64, Word)>> {
        a.iter()
            .enumerate()
            .map(|(i, &ai)| {
                t[i * (d + 1)..(i + 1) * (d + 1)]
                    .iter()
                    .enumerate()
                    .map(|(j, w)| (j as u64 * ai, w.clone()))
                    .collect()
            })
            .collect()
    };
    let outcomes = sweep(&words, a.len() * (d + 1), DEFAULT_TUPLE_CAP, |t| {
        let patterns: Vec<Pattern> = groups_of(t)
            .into_iter()
            .map(|g| Pattern::new(g.into_iter().map(|(c, w)| (cyl(rule, &w), c))))
            .collect();
        first_hit(rule, &patterns, horizon)
    })?;
    let params = SweepParams {
        check: "delta-product".into(),
        wordlen: len,
        horizon,
        vector: Some(a.to_vec()),
        mode: None,
        depth: Some(depth),
    };
    let mut report = SweepReport::assemble(rule, params, outcomes);
    report.certify(|t| {
        let owned = groups_of(t);
        let groups: Vec<Vec<(u64, &Word)>> = owned.iter().map(|g| g.iter().map(|(c, w)| (*c, w)).collect()).collect();
        certificates::find(rule, &groups, horizon)
    });
    report.hypothesis = Some(Box::new(hypothesis));
    Ok(report)
}
