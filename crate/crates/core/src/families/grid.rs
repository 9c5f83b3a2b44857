//! Truncated quantifier grids for `F[a]`, `F_s[a]` and their infinite
//! intersections. Cells are `n ∈ [0, n_max]^r`, visited in lexicographic order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    family_window_report, CellWitness, Certificate, FamilySpec, Interpretation, Verdict,
    WindowReport, Witness,
};
use crate::error::{Error, Result};
use crate::intset::{Completeness, Structure, WindowedSet};

pub const DEFAULT_CELL_CAP: u128 = 1_000_000;

/// Truncation of the `∀n ∃k` (or `∀n syndetic`) quantifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridParams {
    pub n_max: u64,
    /// Largest `k` tried for `F[a]`.
    pub k_max: u64,
    /// Syndeticity bound for `F_s[a]`.
    pub gap: u64,
    pub cell_cap: u128,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            n_max: 4,
            k_max: 64,
            gap: 8,
            cell_cap: DEFAULT_CELL_CAP,
        }
    }
}

impl GridParams {
    fn cell_count(&self, r: usize) -> Result<u64> {
        let side = self.n_max as u128 + 1;
        let mut total: u128 = 1;
        for _ in 0..r {
            total = total.saturating_mul(side);
            if total > self.cell_cap {
                return Err(Error::CapExceeded {
                    what: "grid cells",
                    requested: side.saturating_pow(r as u32),
                    cap: self.cell_cap,
                });
            }
        }
        Ok(total as u64)
    }

    fn cell(&self, r: usize, mut index: u64) -> Vec<u64> {
        let side = self.n_max + 1;
        let mut n = vec![0; r];
        for slot in n.iter_mut().rev() {
            *slot = index % side;
            index /= side;
        }
        n
    }
}

fn check_vector(a: &[u64]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::Config("vector a must be non-empty".into()));
    }
    if a.contains(&0) {
        return Err(Error::Config("vector a must have positive entries".into()));
    }
    Ok(())
}

/// A structural reason that no `k >= 1` places every `k·a_i + n_i` in the set.
fn cell_certificate(structure: &Structure, a: &[u64], n: &[u64]) -> Option<Certificate> {
    if let Some(env) = &structure.residues {
        if !env.admits_progression(a, n) {
            return Some(Certificate::ResidueClass {
                modulus: env.modulus(),
                residues: env.residues().to_vec(),
                a: a.to_vec(),
                n: n.to_vec(),
            });
        }
    }
    if structure.doubling_free {
        for i in 0..a.len() {
            for j in 0..a.len() {
                if a[j] == 2 * a[i] && n[j] == 2 * n[i] {
                    return Some(Certificate::ParityLaw {
                        i,
                        j,
                        a: a.to_vec(),
                        n: n.to_vec(),
                    });
                }
            }
        }
    }
    None
}

enum Cell {
    Ok(u64),
    Fail { searched: u64 },
}

/// Grid evidence for `S ∈ F[a]`: every cell needs some `k ∈ [1, k_max]` with
/// `k·a + n` inside the window and the set.
pub fn fa_grid_report(s: &WindowedSet, a: &[u64], grid: &GridParams) -> Result<WindowReport> {
    check_vector(a)?;
    let r = a.len();
    let cells = grid.cell_count(r)?;
    let h = s.horizon();
    if grid.n_max >= h {
        return Err(Error::HorizonExhausted {
            needed: grid.n_max + 1,
            available: h,
        });
    }
    let outcomes: Vec<Cell> = (0..cells)
        .into_par_iter()
        .map(|idx| {
            let n = grid.cell(r, idx);
            let mut searched = 0;
            for k in 1..=grid.k_max {
                let mut inside = true;
                let mut hit = true;
                for (&ai, &ni) in a.iter().zip(&n) {
                    let x = k.saturating_mul(ai).saturating_add(ni);
                    if x >= h {
                        inside = false;
                        break;
                    }
                    hit &= s.contains(x);
                }
                if !inside {
                    break;
                }
                searched = k;
                if hit {
                    return Cell::Ok(k);
                }
            }
            Cell::Fail { searched }
        })
        .collect();
    Ok(summarize(s, a, grid, r, outcomes))
}

fn summarize(s: &WindowedSet, a: &[u64], grid: &GridParams, r: usize, outcomes: Vec<Cell>) -> WindowReport {
    let h = s.horizon();
    let mut first_fail = None;
    for (idx, c) in outcomes.iter().enumerate() {
        if let Cell::Fail { searched } = c {
            let n = grid.cell(r, idx as u64);
            if let Some(certificate) = cell_certificate(s.structure(), a, &n) {
                return WindowReport {
                    verdict: Verdict::Refuted,
                    interpretation: Interpretation::Proof,
                    horizon_used: h,
                    holds_on_window: Some(false),
                    witness: Some(Witness::Certificate { certificate }),
                };
            }
            if first_fail.is_none() {
                first_fail = Some(Witness::FailingCell { n, searched: *searched });
            }
        }
    }
    match first_fail {
        Some(w) => WindowReport::undetermined(h, Some(false), Some(w)),
        None => WindowReport {
            verdict: Verdict::Witnessed,
            interpretation: Interpretation::HoldsOnGrid,
            horizon_used: h,
            holds_on_window: Some(true),
            witness: Some(Witness::Cells {
                cells: outcomes
                    .into_iter()
                    .enumerate()
                    .map(|(idx, c)| CellWitness {
                        n: grid.cell(r, idx as u64),
                        k: match c {
                            Cell::Ok(k) => k,
                            Cell::Fail { .. } => unreachable!("no failing cells"),
                        },
                    })
                    .collect(),
            }),
        },
    }
}

/// `B(n) = {m : a_i·m + n_i ∈ S for all i}` restricted to where it is decidable.
fn candidate_set(s: &WindowedSet, a: &[u64], n: &[u64]) -> WindowedSet {
    let h = s.horizon();
    let bound = a
        .iter()
        .zip(n)
        .map(|(&ai, &ni)| (h - ni).div_ceil(ai))
        .min()
        .unwrap_or(0);
    let members = (1..bound).filter(|&m| a.iter().zip(n).all(|(&ai, &ni)| s.contains(ai * m + ni)));
    let completeness = match s.completeness() {
        Completeness::Sound => Completeness::Sound,
        _ => Completeness::Window,
    };
    WindowedSet::from_sorted(bound.max(1), members.collect(), completeness)
}

/// Grid evidence for `S ∈ F_s[a]`: every cell's `B(n)` must look syndetic with
/// gap bound `grid.gap` on its window.
pub fn fsa_grid_report(s: &WindowedSet, a: &[u64], grid: &GridParams) -> Result<WindowReport> {
    check_vector(a)?;
    if grid.gap == 0 {
        return Err(Error::Config("syndetic gap bound must be >= 1".into()));
    }
    let r = a.len();
    let cells = grid.cell_count(r)?;
    let h = s.horizon();
    let amax = *a.iter().max().expect("non-empty");
    let needed = amax
        .saturating_mul(grid.gap + 1)
        .saturating_add(grid.n_max)
        .saturating_add(1);
    if needed > h {
        return Err(Error::HorizonExhausted { needed, available: h });
    }
    let outcomes: Vec<Cell> = (0..cells)
        .into_par_iter()
        .map(|idx| {
            let n = grid.cell(r, idx);
            let b = candidate_set(s, a, &n);
            let report = family_window_report(&b, FamilySpec::Syndetic(grid.gap))
                .expect("horizon checked above");
            match (report.holds_on_window, b.members().first()) {
                (Some(true), Some(&first)) => Cell::Ok(first),
                _ => Cell::Fail {
                    searched: b.horizon() - 1,
                },
            }
        })
        .collect();
    Ok(summarize(s, a, grid, r, outcomes))
}

/// Which infinite intersection to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfinityFamily {
    /// `F[∞] = ⋂ F[(1, …, m)]`.
    Plain,
    /// `F_s[∞] = ⋂ F_s[(1, …, m)]`.
    Syndetic,
}

/// Levels `m = 1..=m_max` of `F[∞]` or `F_s[∞]`; the overall verdict is the
/// weakest level's.
pub fn finfty_grid_report(
    s: &WindowedSet,
    m_max: u64,
    grid: &GridParams,
    which: InfinityFamily,
) -> Result<WindowReport> {
    if m_max == 0 {
        return Err(Error::Config("level count must be >= 1".into()));
    }
    let mut verdicts = Vec::with_capacity(m_max as usize);
    let mut first_failing = None;
    let mut detail = None;
    let mut refuted = None;
    for m in 1..=m_max {
        let a: Vec<u64> = (1..=m).collect();
        let rep = match which {
            InfinityFamily::Plain => fa_grid_report(s, &a, grid)?,
            InfinityFamily::Syndetic => fsa_grid_report(s, &a, grid)?,
        };
        verdicts.push(rep.verdict);
        if rep.verdict != Verdict::Witnessed && first_failing.is_none() {
            first_failing = Some(m);
            detail = rep.witness.clone().map(Box::new);
        }
        if rep.verdict == Verdict::Refuted && refuted.is_none() {
            refuted = Some(rep);
        }
    }
    let h = s.horizon();
    let verdict = *verdicts.iter().min().expect("m_max >= 1");
    Ok(match verdict {
        Verdict::Witnessed => WindowReport {
            verdict,
            interpretation: Interpretation::HoldsOnGrid,
            horizon_used: h,
            holds_on_window: Some(true),
            witness: Some(Witness::Levels {
                verdicts,
                first_failing,
                detail: None,
            }),
        },
        Verdict::Refuted => {
            let rep = refuted.expect("some level refuted");
            let m = verdicts.iter().position(|&v| v == Verdict::Refuted).expect("refuted level") as u64 + 1;
            WindowReport {
                verdict,
                interpretation: Interpretation::Proof,
                horizon_used: h,
                holds_on_window: Some(false),
                witness: Some(Witness::Levels {
                    verdicts,
                    first_failing: Some(m),
                    detail: rep.witness.map(Box::new),
                }),
            }
        }
        Verdict::Undetermined => WindowReport::undetermined(
            h,
            Some(false),
            Some(Witness::Levels {
                verdicts,
                first_failing,
                detail,
            }),
        ),
    })
}

/// Proof that `2ℕ ∉ F[a]` for any `a` with at least two coordinates.
///
/// If every `a_i` is odd, `n = (1, 2, …, r)` makes `k·a_i + n_i` take both
/// parities; otherwise some `a_i` is even and `n = (1, …, 1)` makes that
/// coordinate odd while an odd coordinate (if any) flips with `k`. Parity is
/// 2-periodic in `k`, so checking `k ∈ {0, 1}` covers all `k`.
pub fn fa_structural_refute_even(a: &[u64]) -> Result<WindowReport> {
    check_vector(a)?;
    let r = a.len();
    if r < 2 {
        return Err(Error::Precondition(
            "the even-parity refutation needs at least two coordinates".into(),
        ));
    }
    let all_odd = a.iter().all(|&x| x % 2 == 1);
    let n: Vec<u64> = if all_odd { (1..=r as u64).collect() } else { vec![1; r] };
    let blocked = (0..2u64).all(|k| a.iter().zip(&n).any(|(&ai, &ni)| (k * ai + ni) % 2 == 1));
    if !blocked {
        return Err(Error::Precondition("parity certificate failed to verify".into()));
    }
    Ok(WindowReport {
        verdict: Verdict::Refuted,
        interpretation: Interpretation::Proof,
        horizon_used: 0,
        holds_on_window: None,
        witness: Some(Witness::Certificate {
            certificate: Certificate::EvenParity {
                a: a.to_vec(),
                n,
                all_odd,
            },
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intset::{materialize, SetRule};
    use proptest::prelude::*;

    fn grid(n_max: u64, k_max: u64, gap: u64) -> GridParams {
        GridParams {
            n_max,
            k_max,
            gap,
            cell_cap: DEFAULT_CELL_CAP,
        }
    }

    #[test]
    fn naturals_are_in_fa() {
        let s = materialize(&SetRule::Naturals, 200).unwrap();
        let r = fa_grid_report(&s, &[1, 2, 3], &grid(4, 4, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::Witnessed);
        assert_eq!(r.interpretation, Interpretation::HoldsOnGrid);
        match r.witness {
            Some(Witness::Cells { cells }) => assert_eq!(cells.len(), 125),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn evens_are_refuted_by_residues() {
        let s = materialize(&SetRule::evens(), 200).unwrap();
        let r = fa_grid_report(&s, &[1, 2], &grid(3, 10, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert_eq!(r.certificate().unwrap().name(), "residue-class");
    }

    #[test]
    fn dyadic_blocks_are_refuted_by_parity_law() {
        let s = materialize(&SetRule::DyadicBlocks, 4096).unwrap();
        let r = fa_grid_report(&s, &[1, 2], &grid(4, 30, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        match r.certificate().unwrap() {
            Certificate::ParityLaw { i, j, n, .. } => {
                assert_eq!((*i, *j), (0, 1));
                assert_eq!(n[1], 2 * n[0]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undetermined_without_certificate() {
        let s = materialize(&SetRule::Range(10, 12), 200).unwrap();
        let r = fa_grid_report(&s, &[1, 3], &grid(2, 100, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::Undetermined);
        assert!(matches!(r.witness, Some(Witness::FailingCell { .. })));
    }

    #[test]
    fn grid_cap_and_bad_vectors() {
        let s = materialize(&SetRule::Naturals, 200).unwrap();
        let g = GridParams {
            cell_cap: 100,
            ..grid(9, 2, 1)
        };
        assert!(matches!(fa_grid_report(&s, &[1, 2, 3], &g), Err(Error::CapExceeded { .. })));
        assert!(matches!(fa_grid_report(&s, &[], &g), Err(Error::Config(_))));
        assert!(matches!(fa_grid_report(&s, &[0, 1], &g), Err(Error::Config(_))));
    }

    #[test]
    fn even_parity_refutation() {
        for a in [vec![1, 2], vec![1, 3], vec![2, 4], vec![3, 5, 7], vec![2, 3, 4]] {
            let r = fa_structural_refute_even(&a).unwrap();
            assert_eq!(r.verdict, Verdict::Refuted);
            let Some(Certificate::EvenParity { n, .. }) = r.certificate() else { panic!() };
            let evens = materialize(&SetRule::evens(), 2000).unwrap();
            for k in 1..200u64 {
                assert!(a.iter().zip(n).any(|(&ai, &ni)| !evens.contains(k * ai + ni)));
            }
        }
        assert!(fa_structural_refute_even(&[3]).is_err());
    }

    #[test]
    fn fsa_examples() {
        let nat = materialize(&SetRule::Naturals, 400).unwrap();
        let r = fsa_grid_report(&nat, &[1, 2], &grid(3, 0, 2)).unwrap();
        assert_eq!(r.verdict, Verdict::Witnessed);
        let ev = materialize(&SetRule::evens(), 400).unwrap();
        let r = fsa_grid_report(&ev, &[2, 4], &grid(3, 0, 2)).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        let short = materialize(&SetRule::Naturals, 10).unwrap();
        assert!(matches!(
            fsa_grid_report(&short, &[1, 2], &grid(3, 0, 8)),
            Err(Error::HorizonExhausted { .. })
        ));
    }

    #[test]
    fn finfty_levels() {
        let nat = materialize(&SetRule::Naturals, 300).unwrap();
        let r = finfty_grid_report(&nat, 3, &grid(2, 8, 2), InfinityFamily::Plain).unwrap();
        assert_eq!(r.verdict, Verdict::Witnessed);
        let ev = materialize(&SetRule::evens(), 300).unwrap();
        let r = finfty_grid_report(&ev, 3, &grid(2, 8, 2), InfinityFamily::Plain).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        match r.witness {
            Some(Witness::Levels { first_failing, .. }) => assert_eq!(first_failing, Some(2)),
            other => panic!("{other:?}"),
        }
        let r = finfty_grid_report(&ev, 2, &grid(2, 8, 2), InfinityFamily::Syndetic).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
    }

    fn rule() -> impl Strategy<Value = SetRule> {
        prop_oneof![
            (0u64..12, 1u64..5).prop_map(|(first, step)| SetRule::ArithmeticProgression { first, step }),
            Just(SetRule::DyadicBlocks),
            Just(SetRule::Naturals),
            (1u64..60, 0u64..200).prop_map(|(a, l)| SetRule::Range(a, a + l)),
            (0u64..12, 2u64..5, 1u64..60, 0u64..80).prop_map(|(f, s, a, l)| SetRule::Union(vec![
                SetRule::ArithmeticProgression { first: f, step: s },
                SetRule::Range(a, a + l)
            ])),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fsa_witness_implies_fa_witness(
            r in rule(),
            a in prop::collection::vec(1u64..4, 1..3),
            n_max in 0u64..3,
            g in 1u64..6,
        ) {
            let s = materialize(&r, 300).unwrap();
            let fs = fsa_grid_report(&s, &a, &grid(n_max, 0, g)).unwrap();
            if fs.verdict == Verdict::Witnessed {
                let f = fa_grid_report(&s, &a, &grid(n_max, g, g)).unwrap();
                prop_assert_eq!(f.verdict, Verdict::Witnessed);
            }
        }

        #[test]
        fn refutations_hold_beyond_the_window(
            r in rule(),
            a in prop::collection::vec(1u64..5, 1..4),
            n_max in 0u64..4,
        ) {
            let s = materialize(&r, 200).unwrap();
            let rep = fa_grid_report(&s, &a, &grid(n_max, 20, 1)).unwrap();
            if rep.verdict == Verdict::Refuted {
                let n = match rep.certificate().unwrap() {
                    Certificate::ResidueClass { n, .. } | Certificate::ParityLaw { n, .. } => n.clone(),
                    Certificate::EvenParity { n, .. } => n.clone(),
                };
                let big = materialize(&r, 20_000).unwrap();
                for k in 1..(19_000 / a.iter().max().unwrap()) {
                    prop_assert!(a.iter().zip(&n).any(|(&ai, &ni)| !big.contains(k * ai + ni)));
                }
            }
        }

        #[test]
        fn reports_are_deterministic(r in rule(), a in prop::collection::vec(1u64..4, 1..3)) {
            let s = materialize(&r, 150).unwrap();
            let g = grid(3, 12, 3);
            prop_assert_eq!(fa_grid_report(&s, &a, &g).unwrap(), fa_grid_report(&s, &a, &g).unwrap());
        }
    }
}
