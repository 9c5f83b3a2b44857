//! Downward-closed binary subshifts.
//!
//! A [`ShiftRule`] constrains only the positions of 1s: every pair of 1s must
//! have an allowed gap and every triple an allowed pair of gaps. Turning a 1
//! into a 0 can therefore never break admissibility, which is what makes the
//! zero-fill superposition in [`hitting`] an exact decision procedure for
//! cylinder intersections.

mod hitting;

pub use hitting::{
    delta_hitting_window, first_hit, hits, hitting_window, multi_hitting_window, Pattern,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::intset::{is_dyadic, Membership, SetRule};
use crate::parse::Cursor;

/// Default cap on word length for exhaustive enumeration.
pub const DEFAULT_WORD_CAP: usize = 12;

/// A finite word over `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if symbols.iter().any(|&s| s > 1) {
            return Err(Error::Config("words are over {0,1}".into()));
        }
        Ok(Word(symbols))
    }

    pub fn zeros(len: usize) -> Self {
        Word(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    /// Indices of the 1s, increasing.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &s)| s == 1).map(|(i, _)| i)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&s| s == 1).count()
    }

    pub fn concat(parts: &[&Word]) -> Word {
        Word(parts.iter().flat_map(|w| w.0.iter().copied()).collect())
    }

    pub(crate) fn extend_zeros(&mut self, n: usize) {
        self.0.resize(self.0.len() + n, 0);
    }

    pub(crate) fn extend_from(&mut self, w: &Word) {
        self.0.extend_from_slice(&w.0);
    }

    pub fn slice(&self, start: usize, end: usize) -> &[u8] {
        &self.0[start..end]
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.0 {
            f.write_str(if s == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::parse(s, i, "words are 0/1 strings")),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// `{x : x[offset .. offset + |word|) = word}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cylinder {
    pub word: Word,
    pub offset: i64,
}

impl Cylinder {
    pub fn new(word: Word, offset: i64) -> Self {
        Cylinder { word, offset }
    }

    pub fn at_origin(word: Word) -> Self {
        Cylinder { word, offset: 0 }
    }
}

impl fmt::Display for Cylinder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offset == 0 {
            write!(f, "[{}]", self.word)
        } else {
            write!(f, "[{}]@{}", self.word, self.offset)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

#[derive(Debug, Clone)]
enum Kind {
    Full,
    Spacing { gaps: SetRule, member: Membership, dyadic: bool },
    TripleRatio(u64),
}

/// A downward-closed subshift given by pair and triple predicates on the gaps between 1s.
#[derive(Debug, Clone)]
pub struct ShiftRule {
    kind: Kind,
}

impl PartialEq for ShiftRule {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

impl Eq for ShiftRule {}

impl ShiftRule {
    /// The full one-sided shift.
    pub fn full() -> Self {
        ShiftRule { kind: Kind::Full }
    }

    /// `Σ_P`: every gap between two 1s lies in `P`.
    pub fn spacing(gaps: SetRule) -> Result<Self> {
        gaps.validate(crate::intset::DEFAULT_MAX_DEPTH)?;
        let member = gaps.compile()?;
        let dyadic = gaps == SetRule::DyadicBlocks;
        Ok(ShiftRule {
            kind: Kind::Spacing { gaps, member, dyadic },
        })
    }

    /// Two-sided shift forbidding `11` and every `1u1v1` with `(p-1)(|u|+1) = |v|+1`.
    pub fn triple_ratio(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::Config(format!("tripleratio needs p >= 2, got {p}")));
        }
        Ok(ShiftRule {
            kind: Kind::TripleRatio(p),
        })
    }

    pub fn sidedness(&self) -> Sidedness {
        match self.kind {
            Kind::TripleRatio(_) => Sidedness::TwoSided,
            _ => Sidedness::OneSided,
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self.kind, Kind::Full)
    }

    /// The gap set when this is a spacing shift.
    pub fn spacing_set(&self) -> Option<&SetRule> {
        match &self.kind {
            Kind::Spacing { gaps, .. } => Some(gaps),
            _ => None,
        }
    }

    pub fn triple_ratio_p(&self) -> Option<u64> {
        match self.kind {
            Kind::TripleRatio(p) => Some(p),
            _ => None,
        }
    }

    pub fn has_triple_constraint(&self) -> bool {
        matches!(self.kind, Kind::TripleRatio(_))
    }

    #[inline]
    pub fn pair_allowed(&self, gap: u64) -> bool {
        match &self.kind {
            Kind::Full => true,
            Kind::Spacing { dyadic: true, .. } => is_dyadic(gap),
            Kind::Spacing { member, .. } => member.contains(gap),
            Kind::TripleRatio(_) => gap != 1,
        }
    }

    #[inline]
    pub fn triple_allowed(&self, g1: u64, g2: u64) -> bool {
        match self.kind {
            Kind::TripleRatio(p) => g2 != (p - 1) * g1,
            _ => true,
        }
    }

    /// Cylinder offset used when sweeping words of length `len`: centred for
    /// two-sided rules, origin otherwise.
    pub fn sweep_offset(&self, len: usize) -> i64 {
        match self.sidedness() {
            Sidedness::OneSided => 0,
            Sidedness::TwoSided => -((len.saturating_sub(1) / 2) as i64),
        }
    }

    /// Admissibility of a configuration given by its strictly increasing 1-positions.
    pub fn admissible_positions(&self, ones: &[i64]) -> bool {
        match &self.kind {
            Kind::Full => true,
            Kind::Spacing { .. } => {
                for (j, &b) in ones.iter().enumerate() {
                    for &a in &ones[..j] {
                        if !self.pair_allowed((b - a) as u64) {
                            return false;
                        }
                    }
                }
                true
            }
            Kind::TripleRatio(p) => {
                if ones.windows(2).any(|w| w[1] - w[0] == 1) {
                    return false;
                }
                // every forbidden triple is i < j < j + (p-1)(j-i)
                let step = (*p - 1) as i64;
                for (j, &b) in ones.iter().enumerate() {
                    for &a in &ones[..j] {
                        let target = b + step * (b - a);
                        if ones[j + 1..].binary_search(&target).is_ok() {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// Admissibility of `ones` given that `ones[..from]` is already admissible:
    /// only pairs and triples whose last element is at index `>= from` are checked.
    pub fn admissible_extension(&self, ones: &[i64], from: usize) -> bool {
        match &self.kind {
            Kind::Full => true,
            Kind::Spacing { .. } => (from..ones.len())
                .all(|j| ones[..j].iter().all(|&a| self.pair_allowed((ones[j] - a) as u64))),
            Kind::TripleRatio(p) => {
                let step = (*p - 1) as i64;
                (from.max(1)..ones.len()).all(|j| {
                    let c = ones[j];
                    ones[j - 1] + 1 != c
                        && ones[..j].iter().enumerate().all(|(i, &b)| {
                            let d = c - b;
                            d % step != 0 || ones[..i].binary_search(&(b - d / step)).is_err()
                        })
                })
            }
        }
    }

    pub fn is_admissible(&self, w: &Word) -> bool {
        let ones: Vec<i64> = w.ones().map(|i| i as i64).collect();
        self.admissible_positions(&ones)
    }

    /// All admissible words of length `len` in lexicographic order (0 < 1).
    pub fn enumerate_words(&self, len: usize) -> Result<Vec<Word>> {
        self.enumerate_words_capped(len, DEFAULT_WORD_CAP)
    }

    pub fn enumerate_words_capped(&self, len: usize, cap: usize) -> Result<Vec<Word>> {
        if len > cap {
            return Err(Error::CapExceeded {
                what: "word length",
                requested: len as u128,
                cap: cap as u128,
            });
        }
        let mut out = Vec::new();
        let mut ones: Vec<i64> = Vec::new();
        let mut cur = Vec::with_capacity(len);
        self.extend_words(len, &mut cur, &mut ones, &mut out);
        Ok(out)
    }

    // Admissibility is factor-closed, so pruning on prefixes is exact.
    fn extend_words(&self, len: usize, cur: &mut Vec<u8>, ones: &mut Vec<i64>, out: &mut Vec<Word>) {
        if cur.len() == len {
            out.push(Word(cur.clone()));
            return;
        }
        cur.push(0);
        self.extend_words(len, cur, ones, out);
        cur.pop();

        ones.push(cur.len() as i64);
        if self.admissible_positions(ones) {
            cur.push(1);
            self.extend_words(len, cur, ones, out);
            cur.pop();
        }
        ones.pop();
    }
}

impl fmt::Display for ShiftRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Full => f.write_str("full()"),
            Kind::Spacing { gaps, .. } => write!(f, "spacing({gaps})"),
            Kind::TripleRatio(p) => write!(f, "tripleratio({p})"),
        }
    }
}

impl FromStr for ShiftRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Cursor::new(s);
        let start = c.pos();
        let name = c.ident()?;
        c.expect('(')?;
        let rule = match name.as_str() {
            "full" => ShiftRule::full(),
            "spacing" => {
                let at = c.pos();
                let gaps = SetRule::parse_at(&mut c)?;
                ShiftRule::spacing(gaps).map_err(|e| match e {
                    Error::Config(m) => Error::parse(s, at, m),
                    e => e,
                })?
            }
            "tripleratio" => {
                let at = c.pos();
                let p = c.uint()?;
                ShiftRule::triple_ratio(p).map_err(|_| Error::parse(s, at, "tripleratio needs p >= 2"))?
            }
            other => {
                c.set_pos(start);
                return Err(c.err(format!("unknown shift rule '{other}'")));
            }
        };
        c.expect(')')?;
        c.finish()?;
        Ok(rule)
    }
}

impl Serialize for ShiftRule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ShiftRule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Gaps `|i - j|` between 1s of `w` (0 excluded), increasing.
pub fn spectrum(w: &Word) -> Vec<u64> {
    let ones: Vec<usize> = w.ones().collect();
    let mut out: Vec<u64> = Vec::new();
    for (j, &b) in ones.iter().enumerate() {
        for &a in &ones[..j] {
            out.push((b - a) as u64);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Zero-filled superposition of several cylinders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superposition {
    pub base: i64,
    pub word: Word,
}

impl Superposition {
    pub fn ones(&self) -> Vec<i64> {
        self.word.ones().map(|i| self.base + i as i64).collect()
    }
}

/// Merge constraints over their span; uncovered positions become 0.
/// Returns `None` when two constraints disagree on a position.
pub fn superpose(constraints: &[Cylinder]) -> Option<Superposition> {
    let base = constraints.iter().map(|c| c.offset).min()?;
    let end = constraints
        .iter()
        .map(|c| c.offset + c.word.len() as i64)
        .max()?;
    let span = (end - base).max(0) as usize;
    // 2 = unset
    let mut cells = vec![2u8; span];
    for c in constraints {
        let start = (c.offset - base) as usize;
        for (i, &s) in c.word.symbols().iter().enumerate() {
            let cell = &mut cells[start + i];
            if *cell != 2 && *cell != s {
                return None;
            }
            *cell = s;
        }
    }
    let symbols = cells.into_iter().map(|c| if c == 2 { 0 } else { c }).collect();
    Some(Superposition {
        base,
        word: Word(symbols),
    })
}

/// The two-sided word `u 0^(n-2k-1) v 0^(n-2k-1) w`, anchored so `u` starts at `-k`.
pub fn build_rn(u: &Word, v: &Word, w: &Word, n: u64, k: u64) -> Result<Cylinder> {
    let len = 2 * k + 1;
    if [u, v, w].iter().any(|x| x.len() as u64 != len) {
        return Err(Error::Precondition(format!(
            "u, v, w must all have length 2k+1 = {len}"
        )));
    }
    if n <= len {
        return Err(Error::Precondition(format!("need n > 2k+1 = {len}, got n = {n}")));
    }
    let gap = Word::zeros((n - len) as usize);
    Ok(Cylinder::new(Word::concat(&[u, &gap, v, &gap, w]), -(k as i64)))
}
