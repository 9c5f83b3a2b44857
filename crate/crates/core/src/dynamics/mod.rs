//! Sweep checkers for transitivity notions over all cylinder tuples of a
//! fixed word length, plus verifiers for identities between hitting sets.
//!
//! Every sweep enumerates ordered tuples of admissible words in lexicographic
//! order and records the least witness time per tuple. Work is spread over
//! rayon but results are merged by tuple index, so reports do not depend on
//! the number of threads.

mod certificates;
mod diagnostic;
mod verify;

pub use certificates::{closed_form_spacing_witness, ClosedFormCheck, LawCertificate};
pub use diagnostic::{point_diagnostic, CylinderDiagnostic, DiagnosticReport};
pub use verify::{
    verify_delta_product, verify_nuv, verify_orbit_closure_prop, NuvReport, OrbitClosureReport,
    OrbitClosureRow,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subshift::{first_hit, hits, Cylinder, Pattern, ShiftRule, Word};

/// Upper bound on the number of tuples a single sweep may enumerate.
pub const DEFAULT_TUPLE_CAP: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVerdict {
    /// Every tuple has a witness inside the window.
    Witnessed,
    /// Some tuple has none; see [`SweepReport::failure`].
    FailsOnWindow,
}

/// What each tuple must exhibit in plain transitivity sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitivityMode {
    /// Some hitting time.
    Plain,
    /// A run of this many consecutive hitting times.
    Thick(u64),
    /// The least `N0` with `[N0, H]` inside the hitting set.
    CofiniteFrom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepParams {
    pub check: String,
    pub wordlen: usize,
    pub horizon: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<TransitivityMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleOutcome {
    pub tuple: Vec<Word>,
    /// Least witness (meaning depends on the check); `None` means no witness in `[1, H]`.
    pub witness: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepFailure {
    pub index: u64,
    pub tuple: Vec<Word>,
    /// The exhausted range of times, inclusive.
    pub range: (u64, u64),
    /// A certificate rules the tuple out for every time, not just the window.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rule: ShiftRule,
    pub params: SweepParams,
    pub verdict: SweepVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<SweepFailure>,
    pub certificates: Vec<LawCertificate>,
    pub tuples_checked: u64,
    pub outcomes: Vec<TupleOutcome>,
    /// Outcome of a prerequisite sweep, when the check has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<Box<SweepReport>>,
}

impl SweepReport {
    fn assemble(rule: &ShiftRule, params: SweepParams, outcomes: Vec<TupleOutcome>) -> Self {
        let failure = outcomes
            .iter()
            .position(|o| o.witness.is_none())
            .map(|i| SweepFailure {
                index: i as u64,
                tuple: outcomes[i].tuple.clone(),
                range: (1, params.horizon),
                certified: false,
            });
        SweepReport {
            rule: rule.clone(),
            verdict: if failure.is_some() {
                SweepVerdict::FailsOnWindow
            } else {
                SweepVerdict::Witnessed
            },
            failure,
            certificates: Vec::new(),
            tuples_checked: outcomes.len() as u64,
            outcomes,
            params,
            hypothesis: None,
        }
    }

    /// Attach a certificate to the first failing tuple when one applies.
    fn certify(&mut self, forced: impl FnOnce(&[Word]) -> Option<LawCertificate>) {
        if let Some(f) = &mut self.failure {
            if let Some(c) = forced(&f.tuple) {
                f.certified = true;
                self.certificates.push(c);
            }
        }
    }

    pub fn witnessed(&self) -> bool {
        self.verdict == SweepVerdict::Witnessed
    }

    /// Largest recorded witness, if any tuple had one.
    pub fn max_witness(&self) -> Option<u64> {
        self.outcomes.iter().filter_map(|o| o.witness).max()
    }
}

/// All admissible words of length `len`, checked against the enumeration cap.
fn words_of(rule: &ShiftRule, len: usize) -> Result<Vec<Word>> {
    if len == 0 {
        return Err(Error::Config("word length must be >= 1".into()));
    }
    rule.enumerate_words(len)
}

fn check_horizon(h: u64) -> Result<()> {
    if h == 0 {
        return Err(Error::Config("horizon must be >= 1".into()));
    }
    Ok(())
}

/// Evaluate `f` on every `arity`-tuple over `words`, in lexicographic order.
pub(crate) fn sweep<F>(words: &[Word], arity: usize, cap: u128, f: F) -> Result<Vec<TupleOutcome>>
where
    F: Fn(&[Word]) -> Option<u64> + Sync,
{
    let base = words.len() as u128;
    let count = base.checked_pow(arity as u32).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::CapExceeded {
            what: "cylinder tuples",
            requested: count,
            cap,
        });
    }
    Ok((0..count as u64)
        .into_par_iter()
        .map(|idx| {
            let mut digits = vec![0usize; arity];
            let mut rest = idx;
            for d in digits.iter_mut().rev() {
                *d = (rest % base as u64) as usize;
                rest /= base as u64;
            }
            let tuple: Vec<Word> = digits.iter().map(|&d| words[d].clone()).collect();
            let witness = f(&tuple);
            TupleOutcome { tuple, witness }
        })
        .collect())
}

fn cyl(rule: &ShiftRule, w: &Word) -> Cylinder {
    Cylinder::new(w.clone(), rule.sweep_offset(w.len()))
}

/// Every ordered pair of length-`len` cylinders, under the chosen mode.
pub fn check_transitive(rule: &ShiftRule, len: usize, horizon: u64, mode: TransitivityMode) -> Result<SweepReport> {
    check_horizon(horizon)?;
    if let TransitivityMode::Thick(l) = mode {
        if l == 0 || l > horizon {
            return Err(Error::Config(format!("thick level must lie in [1, {horizon}]")));
        }
    }
    let words = words_of(rule, len)?;
    let outcomes = sweep(&words, 2, DEFAULT_TUPLE_CAP, |t| {
        let pattern = Pattern::pair(&cyl(rule, &t[0]), &cyl(rule, &t[1]), 1);
        match mode {
            TransitivityMode::Plain => first_hit(rule, &[pattern], horizon),
            TransitivityMode::Thick(l) => hits(rule, &[pattern], horizon).ok()?.find_run(l, 1),
            TransitivityMode::CofiniteFrom => {
                let s = hits(rule, &[pattern], horizon).ok()?;
                let m = s.members();
                if m.last() != Some(&horizon) {
                    return None;
                }
                // walk back over the final run
                let mut n0 = horizon;
                for w in m.windows(2).rev() {
                    if w[1] - w[0] != 1 {
                        break;
                    }
                    n0 = w[0];
                }
                Some(n0)
            }
        }
    })?;
    let params = SweepParams {
        check: "transitive".into(),
        wordlen: len,
        horizon,
        vector: None,
        mode: Some(mode),
        depth: None,
    };
    Ok(SweepReport::assemble(rule, params, outcomes))
}

fn check_vector(a: &[u64]) -> Result<()> {
    if a.is_empty() || a.contains(&0) {
        return Err(Error::Config("vector entries must be positive and non-empty".into()));
    }
    Ok(())
}

fn check_increasing(a: &[u64]) -> Result<()> {
    check_vector(a)?;
    if a.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(format!(
            "diagonal checks need a strictly increasing vector, got {a:?}; \
             equal coordinates such as (1,1) force the space to be a single point"
        )));
    }
    Ok(())
}

/// Every `r`-tuple of cylinder pairs `(U_i, V_i)` has a common time `n` with
/// `f^(a_i n) U_i ∩ V_i ≠ ∅` for all `i`.
pub fn check_a_transitive(rule: &ShiftRule, a: &[u64], len: usize, horizon: u64) -> Result<SweepReport> {
    check_horizon(horizon)?;
    check_vector(a)?;
    let words = words_of(rule, len)?;
    let outcomes = sweep(&words, 2 * a.len(), DEFAULT_TUPLE_CAP, |t| {
        let patterns: Vec<Pattern> = a
            .iter()
            .enumerate()
            .map(|(i, &ai)| Pattern::pair(&cyl(rule, &t[2 * i]), &cyl(rule, &t[2 * i + 1]), ai))
            .collect();
        first_hit(rule, &patterns, horizon)
    })?;
    let params = SweepParams {
        check: "a-transitive".into(),
        wordlen: len,
        horizon,
        vector: Some(a.to_vec()),
        mode: None,
        depth: None,
    };
    let mut report = SweepReport::assemble(rule, params, outcomes);
    report.certify(|t| {
        let groups: Vec<Vec<(u64, &Word)>> = a
            .iter()
            .enumerate()
            .map(|(i, &ai)| vec![(0, &t[2 * i]), (ai, &t[2 * i + 1])])
            .collect();
        certificates::find(rule, &groups, horizon)
    });
    Ok(report)
}

/// Every `(r+1)`-tuple `(U_0, …, U_r)` has a time `n` with
/// `U_0 ∩ f^(-a_1 n) U_1 ∩ … ∩ f^(-a_r n) U_r ≠ ∅`.
pub fn check_delta_a_transitive(rule: &ShiftRule, a: &[u64], len: usize, horizon: u64) -> Result<SweepReport> {
    check_horizon(horizon)?;
    check_increasing(a)?;
    let words = words_of(rule, len)?;
    let coefs: Vec<u64> = std::iter::once(0).chain(a.iter().copied()).collect();
    let outcomes = sweep(&words, a.len() + 1, DEFAULT_TUPLE_CAP, |t| {
        let pattern = Pattern::new(t.iter().zip(&coefs).map(|(w, &c)| (cyl(rule, w), c)));
        first_hit(rule, &[pattern], horizon)
    })?;
    let params = SweepParams {
        check: "delta-a-transitive".into(),
        wordlen: len,
        horizon,
        vector: Some(a.to_vec()),
        mode: None,
        depth: None,
    };
    let mut report = SweepReport::assemble(rule, params, outcomes);
    report.certify(|t| {
        let group: Vec<(u64, &Word)> = coefs.iter().copied().zip(t).collect();
        certificates::find(rule, &[group], horizon)
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intset::SetRule;

    fn dyadic() -> ShiftRule {
        ShiftRule::spacing(SetRule::DyadicBlocks).unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn plain_and_cofinite_on_full_shift() {
        let r = check_transitive(&ShiftRule::full(), 2, 16, TransitivityMode::Plain).unwrap();
        assert!(r.witnessed());
        assert_eq!(r.tuples_checked, 16);
        let r = check_transitive(&ShiftRule::full(), 2, 64, TransitivityMode::CofiniteFrom).unwrap();
        assert!(r.witnessed());
        assert!(r.max_witness().unwrap() <= 4);
        // "01" then "10" one step later conflicts; from n = 2 on nothing overlaps
        let o = r.outcomes.iter().find(|o| o.tuple == [w("01"), w("01")]).unwrap();
        assert_eq!(o.witness, Some(2));
    }

    #[test]
    fn thick_mode_fails_for_even_gaps() {
        let rule = ShiftRule::spacing(SetRule::evens()).unwrap();
        let r = check_transitive(&rule, 1, 10_000, TransitivityMode::Thick(2)).unwrap();
        assert_eq!(r.verdict, SweepVerdict::FailsOnWindow);
        let f = r.failure.unwrap();
        assert_eq!(f.tuple, [w("1"), w("1")]);
        assert_eq!(f.range, (1, 10_000));
    }

    #[test]
    fn thick_implies_plain() {
        for rule in [ShiftRule::full(), dyadic(), ShiftRule::triple_ratio(3).unwrap()] {
            let thick = check_transitive(&rule, 2, 300, TransitivityMode::Thick(3)).unwrap();
            let plain = check_transitive(&rule, 2, 300, TransitivityMode::Plain).unwrap();
            if thick.witnessed() {
                assert!(plain.witnessed());
            }
        }
    }

    #[test]
    fn dyadic_a_transitivity() {
        let r = check_a_transitive(&dyadic(), &[2, 3], 2, 2000).unwrap();
        assert!(r.witnessed());
        let r = check_a_transitive(&dyadic(), &[1, 2], 1, 5000).unwrap();
        assert_eq!(r.verdict, SweepVerdict::FailsOnWindow);
        let f = r.failure.as_ref().unwrap();
        assert_eq!(f.tuple, [w("1"), w("1"), w("1"), w("1")]);
        assert!(f.certified);
        assert_eq!(r.certificates[0].name, "parity-law");
    }

    #[test]
    fn full_shift_multi_transitivity() {
        assert!(check_a_transitive(&ShiftRule::full(), &[3, 5], 2, 32).unwrap().witnessed());
    }

    #[test]
    fn triple_ratio_delta_transitivity() {
        let rule = ShiftRule::triple_ratio(3).unwrap();
        assert!(check_delta_a_transitive(&rule, &[1, 2], 3, 2000).unwrap().witnessed());
        let r = check_delta_a_transitive(&rule, &[1, 3], 1, 20_000).unwrap();
        let f = r.failure.as_ref().unwrap();
        assert_eq!(f.tuple, [w("1"), w("1"), w("1")]);
        assert!(f.certified);
        assert_eq!(r.certificates[0].name, "triple-law");
    }

    #[test]
    fn full_shift_delta_transitivity() {
        assert!(check_delta_a_transitive(&ShiftRule::full(), &[1, 2, 3], 2, 64).unwrap().witnessed());
    }

    #[test]
    fn non_increasing_vectors_are_rejected() {
        let rule = ShiftRule::full();
        for a in [vec![1, 1], vec![2, 1]] {
            assert!(matches!(check_delta_a_transitive(&rule, &a, 1, 10), Err(Error::Precondition(_))));
        }
        assert!(matches!(check_a_transitive(&rule, &[1, 2], 99, 10), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn reports_do_not_depend_on_thread_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| serde_json::to_string(&check_a_transitive(&dyadic(), &[2, 3], 2, 500).unwrap()).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
