//! Three-valued windowed decision procedures for Furstenberg families.
//!
//! A window can witness some claims (an L-run exists, a k works for a grid
//! cell) and refute others (a gap larger than g exists), but never both
//! symmetrically. Each [`WindowReport`] says which kind of statement it makes.

mod grid;
mod query;

pub use grid::{
    fa_grid_report, fa_structural_refute_even, finfty_grid_report, fsa_grid_report, GridParams,
    InfinityFamily, DEFAULT_CELL_CAP,
};
pub use query::FamilyQuery;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::WindowedSet;

/// The three base families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilySpec {
    /// Contains `level` consecutive positive integers (window evidence for thickness).
    Thick(u64),
    /// Successive members (starting from 0) are at most `gap` apart.
    Syndetic(u64),
    /// Contains every `n >= threshold`.
    Cofinite(u64),
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        let (name, v) = match *self {
            FamilySpec::Thick(l) => ("thick level", l),
            FamilySpec::Syndetic(g) => ("syndetic gap bound", g),
            FamilySpec::Cofinite(n) => ("cofinite threshold", n),
        };
        if v == 0 {
            return Err(Error::Config(format!("{name} must be >= 1")));
        }
        Ok(())
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Thick(l) => write!(f, "thick({l})"),
            FamilySpec::Syndetic(g) => write!(f, "syndetic({g})"),
            FamilySpec::Cofinite(n) => write!(f, "cofinite({n})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Refuted,
    Undetermined,
    Witnessed,
}

/// What a verdict claims about the infinite object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpretation {
    /// Holds for the infinite set; stable under any larger horizon.
    Proof,
    /// A genuine finite witness, not a proof of the asymptotic property.
    WitnessOnly,
    /// Only describes the window.
    WindowEvidence,
    /// Every cell of a truncated quantifier grid succeeded.
    HoldsOnGrid,
}

/// Structural reasons why no `k ∈ ℕ` can work for a grid cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// The set lies in the given residue classes, and `k·a + n` leaves them
    /// for every residue of `k`.
    ResidueClass {
        modulus: u64,
        residues: Vec<u64>,
        a: Vec<u64>,
        n: Vec<u64>,
    },
    /// The set never contains both `m` and `2m`, while coordinates `i`, `j`
    /// satisfy `a_j = 2 a_i`, `n_j = 2 n_i`.
    ParityLaw { i: usize, j: usize, a: Vec<u64>, n: Vec<u64> },
    /// `2ℕ` misses `k·a + n` for every `k` (parity is 2-periodic in `k`).
    EvenParity { a: Vec<u64>, n: Vec<u64>, all_odd: bool },
}

impl Certificate {
    pub fn name(&self) -> &'static str {
        match self {
            Certificate::ResidueClass { .. } => "residue-class",
            Certificate::ParityLaw { .. } => "parity-law",
            Certificate::EvenParity { .. } => "even-parity",
        }
    }
}

/// Per-cell success for grid families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellWitness {
    pub n: Vec<u64>,
    /// Least `k` (F[a]) or least element of the candidate set (F_s[a]).
    pub k: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `[start, start + len)` lies in the set.
    Run { start: u64, len: u64 },
    /// No member strictly between `after` and `before`; `before = None` means
    /// the gap runs to the end of the window.
    Gap { after: u64, before: Option<u64> },
    Missing { n: u64 },
    Cells { cells: Vec<CellWitness> },
    /// No witness up to `searched` for this cell.
    FailingCell { n: Vec<u64>, searched: u64 },
    Certificate { certificate: Certificate },
    Levels {
        verdicts: Vec<Verdict>,
        first_failing: Option<u64>,
        detail: Option<Box<Witness>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowReport {
    pub verdict: Verdict,
    pub interpretation: Interpretation,
    pub horizon_used: u64,
    /// Whether the predicate holds on the window data, when meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds_on_window: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl WindowReport {
    pub(crate) fn undetermined(horizon: u64, holds: Option<bool>, witness: Option<Witness>) -> Self {
        WindowReport {
            verdict: Verdict::Undetermined,
            interpretation: Interpretation::WindowEvidence,
            horizon_used: horizon,
            holds_on_window: holds,
            witness,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.witness {
            Some(Witness::Certificate { certificate }) => Some(certificate),
            Some(Witness::Levels { detail: Some(d), .. }) => match d.as_ref() {
                Witness::Certificate { certificate } => Some(certificate),
                _ => None,
            },
            _ => None,
        }
    }
}

/// Decide what the window can say about membership of `S` in `spec`.
pub fn family_window_report(s: &WindowedSet, spec: FamilySpec) -> Result<WindowReport> {
    spec.validate()?;
    let h = s.horizon();
    let needs = match spec {
        FamilySpec::Thick(l) => l,
        FamilySpec::Syndetic(g) => g,
        FamilySpec::Cofinite(n) => n,
    };
    if needs >= h {
        return Err(Error::HorizonExhausted {
            needed: needs + 1,
            available: h,
        });
    }
    Ok(match spec {
        FamilySpec::Thick(l) => match s.find_run(l, 1) {
            Some(start) => WindowReport {
                verdict: Verdict::Witnessed,
                interpretation: Interpretation::WitnessOnly,
                horizon_used: h,
                holds_on_window: Some(true),
                witness: Some(Witness::Run { start, len: l }),
            },
            None => WindowReport::undetermined(h, Some(false), None),
        },
        FamilySpec::Syndetic(g) => {
            let mut prev = 0u64;
            let mut gap = None;
            for &m in s.range(1, h) {
                if m - prev > g {
                    gap = Some(Witness::Gap { after: prev, before: Some(m) });
                    break;
                }
                prev = m;
            }
            if gap.is_none() && h - prev > g {
                gap = Some(Witness::Gap { after: prev, before: None });
            }
            match gap {
                Some(w) if s.is_exact() => WindowReport {
                    verdict: Verdict::Refuted,
                    interpretation: Interpretation::Proof,
                    horizon_used: h,
                    holds_on_window: Some(false),
                    witness: Some(w),
                },
                Some(w) => WindowReport::undetermined(h, Some(false), Some(w)),
                None => WindowReport::undetermined(h, Some(true), None),
            }
        }
        FamilySpec::Cofinite(n0) => {
            let missing = (n0..h).find(|&n| !s.contains(n));
            match missing {
                Some(n) if s.is_exact() => WindowReport {
                    verdict: Verdict::Refuted,
                    interpretation: Interpretation::Proof,
                    horizon_used: h,
                    holds_on_window: Some(false),
                    witness: Some(Witness::Missing { n }),
                },
                Some(n) => WindowReport::undetermined(h, Some(false), Some(Witness::Missing { n })),
                None => WindowReport::undetermined(h, Some(true), None),
            }
        }
    })
}

/// Membership of `S` in `∇(spec)`, decided through its difference set.
pub fn nabla_report(s: &WindowedSet, spec: FamilySpec) -> Result<WindowReport> {
    family_window_report(&s.difference_set(), spec)
}
