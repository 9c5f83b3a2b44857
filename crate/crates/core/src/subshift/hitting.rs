//! Hitting-set kernels.
//!
//! Every question of the form "is `U_0 ∩ σ^{-c_1 n} U_1 ∩ ... ≠ ∅`" is
//! answered by superposing the cylinder words at their shifted offsets and
//! filling the rest with 0s. For a downward-closed rule this is exact: given
//! any point in the intersection, zeroing every 1 not forced by a cylinder
//! keeps it in the shift and in every cylinder, and what remains is the
//! zero-filled superposition.

use rayon::prelude::*;

use super::{superpose, Cylinder, ShiftRule, Sidedness, Superposition, Word};
use crate::error::{Error, Result};
use crate::intset::{Completeness, WindowedSet};

#[derive(Debug, Clone)]
struct Part {
    offset: i64,
    coef: u64,
    word: Word,
    ones: Vec<i64>,
}

/// Cylinders placed at `offset + coef·n`; a time `n` is admissible when the
/// superposition of all parts is consistent and admissible.
#[derive(Debug, Clone)]
pub struct Pattern {
    parts: Vec<Part>,
}

impl Pattern {
    pub fn new(parts: impl IntoIterator<Item = (Cylinder, u64)>) -> Self {
        Pattern {
            parts: parts
                .into_iter()
                .map(|(c, coef)| Part {
                    offset: c.offset,
                    coef,
                    ones: c.word.ones().map(|i| i as i64).collect(),
                    word: c.word,
                })
                .collect(),
        }
    }

    /// `U` at time 0 and `V` at time `coef·n`.
    pub fn pair(u: &Cylinder, v: &Cylinder, coef: u64) -> Self {
        Pattern::new([(u.clone(), 0), (v.clone(), coef)])
    }

    /// Every part is a non-empty cylinder on its own.
    pub fn parts_admissible(&self, rule: &ShiftRule) -> bool {
        self.parts.iter().all(|p| rule.is_admissible(&p.word))
    }

    /// Place the words at time `n` (slow path, used for witnesses and oracles).
    pub fn superposition_at(&self, n: u64) -> Option<Superposition> {
        let cyl: Vec<Cylinder> = self
            .parts
            .iter()
            .map(|p| Cylinder::new(p.word.clone(), p.offset + (p.coef * n) as i64))
            .collect();
        superpose(&cyl)
    }

    /// Kernel check at time `n`. Assumes [`Pattern::parts_admissible`].
    pub fn admissible_at(&self, rule: &ShiftRule, n: u64) -> bool {
        let starts: Vec<i64> = self
            .parts
            .iter()
            .map(|p| p.offset + (p.coef * n) as i64)
            .collect();
        // consistency on overlaps
        for (i, (pi, &si)) in self.parts.iter().zip(&starts).enumerate() {
            let ei = si + pi.word.len() as i64;
            for (pj, &sj) in self.parts.iter().zip(&starts).skip(i + 1) {
                let ej = sj + pj.word.len() as i64;
                let (lo, hi) = (si.max(sj), ei.min(ej));
                if lo < hi {
                    let a = pi.word.slice((lo - si) as usize, (hi - si) as usize);
                    let b = pj.word.slice((lo - sj) as usize, (hi - sj) as usize);
                    if a != b {
                        return false;
                    }
                }
            }
        }
        if rule.is_full() {
            return true;
        }
        if !rule.has_triple_constraint() {
            // pairs inside one part were checked up front
            for i in 0..self.parts.len() {
                for j in i + 1..self.parts.len() {
                    for &a in &self.parts[i].ones {
                        let pa = starts[i] + a;
                        for &b in &self.parts[j].ones {
                            let g = (starts[j] + b - pa).unsigned_abs();
                            if g != 0 && !rule.pair_allowed(g) {
                                return false;
                            }
                        }
                    }
                }
            }
            return true;
        }
        let mut ones: Vec<i64> = self
            .parts
            .iter()
            .zip(&starts)
            .flat_map(|(p, &s)| p.ones.iter().map(move |&o| s + o))
            .collect();
        ones.sort_unstable();
        ones.dedup();
        rule.admissible_positions(&ones)
    }
}

/// `{n ∈ [1, horizon] : every pattern is admissible at n}`, exact on `[0, horizon]`.
pub fn hits(rule: &ShiftRule, patterns: &[Pattern], horizon: u64) -> Result<WindowedSet> {
    if horizon < 1 {
        return Err(Error::Config("hitting windows need horizon >= 1".into()));
    }
    let members: Vec<u64> = if patterns.iter().all(|p| p.parts_admissible(rule)) {
        const CHUNK: u64 = 8192;
        let chunks = horizon.div_ceil(CHUNK) as usize;
        let parts: Vec<Vec<u64>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = 1 + c as u64 * CHUNK;
                let hi = (lo + CHUNK - 1).min(horizon);
                (lo..=hi)
                    .filter(|&n| patterns.iter().all(|p| p.admissible_at(rule, n)))
                    .collect()
            })
            .collect();
        parts.concat()
    } else {
        Vec::new()
    };
    Ok(WindowedSet::from_sorted(horizon + 1, members, Completeness::Window))
}

/// Least `n ∈ [1, horizon]` at which every pattern is admissible.
pub fn first_hit(rule: &ShiftRule, patterns: &[Pattern], horizon: u64) -> Option<u64> {
    if !patterns.iter().all(|p| p.parts_admissible(rule)) {
        return None;
    }
    (1..=horizon).find(|&n| patterns.iter().all(|p| p.admissible_at(rule, n)))
}

fn check_offsets<'a>(rule: &ShiftRule, cyls: impl IntoIterator<Item = &'a Cylinder>) -> Result<()> {
    if rule.sidedness() == Sidedness::OneSided {
        if let Some(c) = cyls.into_iter().find(|c| c.offset != 0) {
            return Err(Error::Precondition(format!(
                "one-sided rule {rule} needs cylinders at offset 0, got {c}"
            )));
        }
    }
    Ok(())
}

/// `N(U, V) ∩ [1, horizon]`.
pub fn hitting_window(rule: &ShiftRule, u: &Cylinder, v: &Cylinder, horizon: u64) -> Result<WindowedSet> {
    check_offsets(rule, [u, v])?;
    hits(rule, &[Pattern::pair(u, v, 1)], horizon)
}

/// Times `n ≤ horizon` at which `f^(a_1) × ... × f^(a_r)` carries `U_1 × ... × U_r` into `V_1 × ... × V_r`.
///
/// Product coordinates carry independent points, so the question splits into
/// one pair pattern per coordinate.
pub fn multi_hitting_window(
    rule: &ShiftRule,
    a: &[u64],
    pairs: &[(Cylinder, Cylinder)],
    horizon: u64,
) -> Result<WindowedSet> {
    if a.len() != pairs.len() || a.is_empty() {
        return Err(Error::Precondition(format!(
            "vector length {} does not match {} cylinder pairs",
            a.len(),
            pairs.len()
        )));
    }
    check_offsets(rule, pairs.iter().flat_map(|(u, v)| [u, v]))?;
    let patterns: Vec<Pattern> = a
        .iter()
        .zip(pairs)
        .map(|(&ai, (u, v))| Pattern::pair(u, v, ai))
        .collect();
    hits(rule, &patterns, horizon)
}

/// `{n ≤ horizon : U_0 ∩ σ^{-n a_1} U_1 ∩ ... ∩ σ^{-n a_r} U_r ≠ ∅}`.
pub fn delta_hitting_window(
    rule: &ShiftRule,
    a: &[u64],
    tuple: &[Cylinder],
    horizon: u64,
) -> Result<WindowedSet> {
    if tuple.len() != a.len() + 1 {
        return Err(Error::Precondition(format!(
            "vector of length {} needs {} cylinders, got {}",
            a.len(),
            a.len() + 1,
            tuple.len()
        )));
    }
    check_offsets(rule, tuple)?;
    hits(rule, &[delta_pattern(a, tuple)], horizon)
}

pub(crate) fn delta_pattern(a: &[u64], tuple: &[Cylinder]) -> Pattern {
    Pattern::new(
        std::iter::once((tuple[0].clone(), 0)).chain(a.iter().zip(&tuple[1..]).map(|(&ai, c)| (c.clone(), ai))),
    )
}
