//! Exact windowed calculus for subsets of the natural numbers.
//!
//! A [`WindowedSet`] is a finite snapshot of a (usually infinite) set
//! `F ⊆ ℤ₊` together with the bound below which the snapshot can be trusted.
//! Every operation recomputes that bound, so predicates further down never
//! claim more than the data supports.

mod residue;
mod rule;

pub use residue::ResidueEnvelope;
pub(crate) use rule::is_dyadic;
pub use rule::{materialize, Membership, SetRule, DEFAULT_MAX_DEPTH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Windows at least this long carry a dense membership bitmap.
pub const DENSE_THRESHOLD: u64 = 4096;

/// How far the snapshot can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completeness {
    /// Membership is exact on `[0, horizon)`; nothing is known beyond.
    Window,
    /// Exact on `[0, horizon)`, and the underlying set has no member `>= horizon`.
    Total,
    /// Every listed member is genuine, but absence proves nothing.
    Sound,
}

/// Facts about the underlying infinite set that hold beyond the window.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    /// The set lies inside these residue classes.
    pub residues: Option<ResidueEnvelope>,
    /// `m ∈ F` implies `2m ∉ F` for every `m >= 1`.
    pub doubling_free: bool,
}

impl Structure {
    pub fn is_empty(&self) -> bool {
        self.residues.is_none() && !self.doubling_free
    }
}

#[derive(Debug, Clone)]
struct Bitmap(Vec<u64>);

impl Bitmap {
    fn from_members(horizon: u64, members: &[u64]) -> Self {
        let mut words = vec![0u64; horizon.div_ceil(64) as usize];
        for &m in members {
            words[(m / 64) as usize] |= 1 << (m % 64);
        }
        Bitmap(words)
    }

    #[inline]
    fn get(&self, n: u64) -> bool {
        self.0
            .get((n / 64) as usize)
            .is_some_and(|w| w >> (n % 64) & 1 == 1)
    }
}

/// A finite window onto a subset of `ℤ₊`.
#[derive(Debug, Clone)]
pub struct WindowedSet {
    horizon: u64,
    members: Vec<u64>,
    completeness: Completeness,
    structure: Structure,
    dense: Option<Bitmap>,
}

impl PartialEq for WindowedSet {
    fn eq(&self, other: &Self) -> bool {
        self.horizon == other.horizon
            && self.members == other.members
            && self.completeness == other.completeness
            && self.structure == other.structure
    }
}

impl Eq for WindowedSet {}

impl WindowedSet {
    /// Build from arbitrary members; they are sorted and deduplicated. Every
    /// member must lie below `horizon`.
    pub fn new(horizon: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut members: Vec<u64> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if let Some(&last) = members.last() {
            if last >= horizon {
                return Err(Error::Config(format!(
                    "member {last} lies outside the window [0, {horizon})"
                )));
            }
        }
        Ok(Self::from_sorted(horizon, members, Completeness::Window))
    }

    /// `members` must already be strictly increasing and below `horizon`.
    pub(crate) fn from_sorted(horizon: u64, members: Vec<u64>, completeness: Completeness) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.last().is_none_or(|&m| m < horizon));
        let dense = (horizon >= DENSE_THRESHOLD).then(|| Bitmap::from_members(horizon, &members));
        WindowedSet {
            horizon,
            members,
            completeness,
            structure: Structure::default(),
            dense,
        }
    }

    pub fn with_completeness(mut self, completeness: Completeness) -> Self {
        self.completeness = completeness;
        self
    }

    pub fn with_structure(mut self, structure: Structure) -> Self {
        self.structure = structure;
        self
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn completeness(&self) -> Completeness {
        self.completeness
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    /// True when absence of `n < horizon` from the window implies absence from the set.
    pub fn is_exact(&self) -> bool {
        self.completeness != Completeness::Sound
    }

    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        if n >= self.horizon {
            return false;
        }
        match &self.dense {
            Some(bits) => bits.get(n),
            None => self.members.binary_search(&n).is_ok(),
        }
    }

    /// Members inside `[lo, hi)`.
    pub fn range(&self, lo: u64, hi: u64) -> &[u64] {
        let a = self.members.partition_point(|&m| m < lo);
        let b = self.members.partition_point(|&m| m < hi);
        &self.members[a..b.max(a)]
    }

    /// Same set, trimmed to a smaller window.
    pub fn restrict(&self, horizon: u64) -> WindowedSet {
        let h = horizon.min(self.horizon);
        let members = self.range(0, h).to_vec();
        let completeness = match self.completeness {
            Completeness::Total if h < self.horizon => Completeness::Window,
            c => c,
        };
        WindowedSet::from_sorted(h, members, completeness).with_structure(self.structure.clone())
    }

    /// `{a - b : a, b ∈ S, a > b}` on the same window.
    ///
    /// Every element is a genuine difference of the underlying set; absence is
    /// only conclusive when the input is [`Completeness::Total`].
    pub fn difference_set(&self) -> WindowedSet {
        let h = self.horizon;
        let members = if self.members.len() < 2 {
            Vec::new()
        } else if (self.members.len() as u64).saturating_mul(self.members.len() as u64) <= 4 * h {
            let mut out = Vec::new();
            for (i, &a) in self.members.iter().enumerate() {
                for &b in &self.members[..i] {
                    out.push(a - b);
                }
            }
            out.sort_unstable();
            out.dedup();
            out
        } else {
            self.difference_bitmap()
        };
        let completeness = match self.completeness {
            Completeness::Total => Completeness::Total,
            _ => Completeness::Sound,
        };
        let residues = self.structure.residues.as_ref().map(|r| r.differences());
        WindowedSet::from_sorted(h, members, completeness).with_structure(Structure {
            residues,
            doubling_free: false,
        })
    }

    // Shift-OR kernel: for every member b, OR in the set shifted down by b.
    fn difference_bitmap(&self) -> Vec<u64> {
        let words = self.horizon.div_ceil(64) as usize;
        let src = Bitmap::from_members(self.horizon, &self.members).0;
        let mut acc = vec![0u64; words];
        for &b in &self.members {
            let (q, r) = ((b / 64) as usize, (b % 64) as u32);
            for i in 0..words - q {
                let lo = src[i + q] >> r;
                let hi = if r == 0 { 0 } else { src.get(i + q + 1).map_or(0, |w| w << (64 - r)) };
                acc[i] |= lo | hi;
            }
        }
        acc[0] &= !1;
        let mut out = Vec::new();
        for (i, &w) in acc.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let t = w.trailing_zeros() as u64;
                let v = i as u64 * 64 + t;
                if v < self.horizon {
                    out.push(v);
                }
                w &= w - 1;
            }
        }
        out
    }

    /// A pair `(a, b)` of members with `a - b = d`, if one exists in the window.
    pub fn difference_witness(&self, d: u64) -> Option<(u64, u64)> {
        if d == 0 {
            return None;
        }
        self.members
            .iter()
            .find(|&&b| self.contains(b + d))
            .map(|&b| (b + d, b))
    }

    /// `(S + n) ∩ ℕ`. Non-positive results are dropped.
    ///
    /// A forward shift stays exact on `[0, horizon + n)`; a backward shift only
    /// on `[0, horizon - |n|)`.
    pub fn translate(&self, n: i64) -> Result<WindowedSet> {
        let mag = n.unsigned_abs();
        if mag >= self.horizon {
            return Err(Error::HorizonExhausted {
                needed: mag + 1,
                available: self.horizon,
            });
        }
        let horizon = if n >= 0 { self.horizon + mag } else { self.horizon - mag };
        let members: Vec<u64> = self
            .members
            .iter()
            .filter_map(|&k| {
                let v = k as i128 + n as i128;
                (v >= 1 && (v as u64) < horizon).then_some(v as u64)
            })
            .collect();
        let residues = self.structure.residues.as_ref().map(|r| r.shifted(n));
        Ok(WindowedSet::from_sorted(horizon, members, self.completeness).with_structure(Structure {
            residues,
            doubling_free: false,
        }))
    }

    pub fn stats(&self) -> SetStats {
        let mut longest_run = 0u64;
        let mut run = 0u64;
        let mut prev: Option<u64> = None;
        let mut max_gap: Option<u64> = None;
        for &m in &self.members {
            match prev {
                Some(p) if m == p + 1 => run += 1,
                _ => run = 1,
            }
            if let Some(p) = prev {
                max_gap = Some(max_gap.map_or(m - p, |g| g.max(m - p)));
            }
            longest_run = longest_run.max(run);
            prev = Some(m);
        }
        SetStats {
            longest_run,
            max_internal_gap: max_gap,
            window_density: if self.horizon == 0 {
                0.0
            } else {
                self.members.len() as f64 / self.horizon as f64
            },
        }
    }

    /// First `start` such that `[start, start + len)` ⊆ S with `start >= lo`.
    pub fn find_run(&self, len: u64, lo: u64) -> Option<u64> {
        if len == 0 {
            return Some(lo);
        }
        let mut start = None;
        let mut prev = None;
        for &m in self.range(lo, self.horizon) {
            match prev {
                Some(p) if m == p + 1 => {}
                _ => start = Some(m),
            }
            prev = Some(m);
            if let Some(s) = start {
                if m + 1 - s >= len {
                    return Some(s);
                }
            }
        }
        None
    }
}

/// Run and gap statistics of a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetStats {
    pub longest_run: u64,
    /// `None` when the window holds fewer than two members.
    pub max_internal_gap: Option<u64>,
    pub window_density: f64,
}
