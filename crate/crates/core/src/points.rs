//! Transitive-point prefixes and their entering-time windows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intset::{Completeness, ResidueEnvelope, Structure, WindowedSet};
use crate::subshift::{ShiftRule, Word};

/// Longest word length that points enumerate exhaustively.
pub const DEFAULT_SCALE_CAP: usize = 16;

/// How a point was produced; enough to rebuild it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PointSource {
    Champernowne { scale: usize },
    Greedy { rule: ShiftRule, scale: usize, spacer_max: u64, min_len: usize },
    Periodic { word: Word, len: usize },
}

/// A finite one-sided prefix of a point of a subshift.
///
/// Invariants: the prefix is admissible for the rule it was built against,
/// and every admissible word of length `<= scale` occurs at its recorded
/// position.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedPoint {
    source: PointSource,
    prefix: Word,
    occurrences: BTreeMap<Word, usize>,
    log: Vec<(Word, u64)>,
}

impl GeneratedPoint {
    pub fn source(&self) -> &PointSource {
        &self.source
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    /// Placement position of each enumerated word.
    pub fn occurrences(&self) -> &BTreeMap<Word, usize> {
        &self.occurrences
    }

    /// `(word, spacer)` in append order.
    pub fn log(&self) -> &[(Word, u64)] {
        &self.log
    }

    pub fn scale(&self) -> usize {
        match &self.source {
            PointSource::Champernowne { scale } | PointSource::Greedy { scale, .. } => *scale,
            PointSource::Periodic { .. } => 0,
        }
    }

    /// The repeating block, for periodic points.
    pub fn period(&self) -> Option<&Word> {
        match &self.source {
            PointSource::Periodic { word, .. } => Some(word),
            _ => None,
        }
    }

    pub fn first_occurrence(&self, u: &Word) -> Option<usize> {
        if u.len() > self.prefix.len() {
            return None;
        }
        let p = self.prefix.symbols();
        (0..=p.len() - u.len()).find(|&i| &p[i..i + u.len()] == u.symbols())
    }

    /// `N(x, [u]) ∩ [1, h]`, exact; the result has horizon `h + 1`.
    pub fn entering_window(&self, u: &Word, h: u64) -> Result<WindowedSet> {
        let available = self.prefix.len().saturating_sub(u.len()) as u64;
        if h > available {
            return Err(Error::HorizonExhausted {
                needed: h + u.len() as u64,
                available: self.prefix.len() as u64,
            });
        }
        let p = self.prefix.symbols();
        let w = u.symbols();
        let members: Vec<u64> = (1..=h as usize)
            .filter(|&n| &p[n..n + w.len()] == w)
            .map(|n| n as u64)
            .collect();
        let mut set = WindowedSet::from_sorted(h + 1, members, Completeness::Window);
        if let Some(period) = self.period() {
            let t = period.len();
            if p.len() >= t + w.len() {
                let residues = (0..t).filter(|&r| &p[r..r + w.len()] == w).map(|r| r as u64);
                if let Some(env) = ResidueEnvelope::new(t as u64, residues) {
                    if !env.is_trivial() {
                        set = set.with_structure(Structure {
                            residues: Some(env),
                            doubling_free: false,
                        });
                    }
                }
            }
        }
        Ok(set)
    }

    /// Cache form: source plus run-length-encoded prefix.
    pub fn to_record(&self) -> PointRecord {
        let mut runs: Vec<(u8, u64)> = Vec::new();
        for &s in self.prefix.symbols() {
            match runs.last_mut() {
                Some((sym, n)) if *sym == s => *n += 1,
                _ => runs.push((s, 1)),
            }
        }
        PointRecord {
            source: self.source.clone(),
            prefix_rle: runs,
            occurrences: self.occurrences.iter().map(|(w, &p)| (w.clone(), p)).collect(),
            log: self.log.clone(),
        }
    }

    /// Rebuild from a cache record, re-checking admissibility for greedy points.
    pub fn from_record(rec: PointRecord) -> Result<Self> {
        let mut symbols = Vec::new();
        for (s, n) in rec.prefix_rle {
            symbols.extend(std::iter::repeat_n(s, n as usize));
        }
        let prefix = Word::new(symbols)?;
        if let PointSource::Greedy { rule, .. } = &rec.source {
            if !rule.is_admissible(&prefix) {
                return Err(Error::Config("cached point is not admissible for its rule".into()));
            }
        }
        let point = GeneratedPoint {
            source: rec.source,
            prefix,
            occurrences: rec.occurrences.into_iter().collect(),
            log: rec.log,
        };
        for (w, &pos) in &point.occurrences {
            if pos + w.len() > point.prefix.len() || point.prefix.slice(pos, pos + w.len()) != w.symbols() {
                return Err(Error::Config(format!("cached point lost occurrence of {w}")));
            }
        }
        Ok(point)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub source: PointSource,
    pub prefix_rle: Vec<(u8, u64)>,
    pub occurrences: Vec<(Word, usize)>,
    pub log: Vec<(Word, u64)>,
}

fn all_words(len: usize) -> impl Iterator<Item = Word> {
    (0u64..1 << len).map(move |bits| {
        Word::new((0..len).rev().map(|i| (bits >> i & 1) as u8).collect()).expect("binary")
    })
}

/// All binary words of lengths `1..=scale`, length-then-lex, concatenated.
pub fn champernowne(scale: usize) -> Result<GeneratedPoint> {
    if scale > DEFAULT_SCALE_CAP {
        return Err(Error::CapExceeded {
            what: "champernowne scale",
            requested: scale as u128,
            cap: DEFAULT_SCALE_CAP as u128,
        });
    }
    let mut prefix = Word::zeros(0);
    let mut occurrences = BTreeMap::new();
    let mut log = Vec::new();
    for len in 1..=scale {
        for w in all_words(len) {
            occurrences.insert(w.clone(), prefix.len());
            prefix.extend_from(&w);
            log.push((w, 0));
        }
    }
    Ok(GeneratedPoint {
        source: PointSource::Champernowne { scale },
        prefix,
        occurrences,
        log,
    })
}

/// Greedy spacer construction: for each admissible word (length-then-lex up
/// to `scale`) append `0^g w` with the least `g <= spacer_max` that keeps the
/// prefix admissible. Passes repeat until the prefix reaches `min_len`.
pub fn build_transitive_point(
    rule: &ShiftRule,
    scale: usize,
    spacer_max: u64,
    min_len: usize,
) -> Result<GeneratedPoint> {
    if scale == 0 {
        return Err(Error::Config("point scale must be >= 1".into()));
    }
    let mut words = Vec::new();
    for len in 1..=scale {
        words.extend(rule.enumerate_words_capped(len, DEFAULT_SCALE_CAP)?);
    }
    let mut prefix = Word::zeros(0);
    let mut ones: Vec<i64> = Vec::new();
    let mut occurrences = BTreeMap::new();
    let mut log = Vec::new();
    let mut first_pass = true;
    loop {
        for w in &words {
            let from = ones.len();
            let base = prefix.len() as i64;
            let mut placed = None;
            for g in 0..=spacer_max {
                ones.truncate(from);
                ones.extend(w.ones().map(|i| base + g as i64 + i as i64));
                if rule.admissible_extension(&ones, from) {
                    placed = Some(g);
                    break;
                }
            }
            let Some(g) = placed else {
                return Err(Error::SpacerExhausted {
                    word: w.to_string(),
                    max_spacer: spacer_max,
                });
            };
            prefix.extend_zeros(g as usize);
            if first_pass {
                occurrences.insert(w.clone(), prefix.len());
            }
            prefix.extend_from(w);
            log.push((w.clone(), g));
        }
        first_pass = false;
        if prefix.len() >= min_len {
            break;
        }
    }
    if !rule.is_admissible(&prefix) {
        return Err(Error::Precondition("built prefix failed the full admissibility check".into()));
    }
    Ok(GeneratedPoint {
        source: PointSource::Greedy {
            rule: rule.clone(),
            scale,
            spacer_max,
            min_len,
        },
        prefix,
        occurrences,
        log,
    })
}

/// The periodic point `word^∞`, truncated to `len` symbols.
pub fn periodic(word: &Word, len: usize) -> Result<GeneratedPoint> {
    if word.is_empty() {
        return Err(Error::Config("period must be a non-empty word".into()));
    }
    let symbols = word.symbols().iter().copied().cycle().take(len).collect();
    Ok(GeneratedPoint {
        source: PointSource::Periodic {
            word: word.clone(),
            len,
        },
        prefix: Word::new(symbols)?,
        occurrences: BTreeMap::new(),
        log: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intset::SetRule;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn champernowne_examples() {
        assert_eq!(champernowne(1).unwrap().prefix().to_string(), "01");
        let x = champernowne(2).unwrap();
        assert_eq!(x.prefix().to_string(), "0100011011");
        for (word, pos) in [("00", 2), ("01", 0), ("10", 6), ("11", 5)] {
            assert_eq!(x.prefix().slice(pos, pos + 2), w(word).symbols());
        }
        assert_eq!(x.first_occurrence(&w("10")), Some(1));
        assert_eq!(x.occurrences()[&w("11")], 8);
        assert!(matches!(champernowne(17), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn entering_window_examples() {
        let x = champernowne(2).unwrap();
        let ones = x.entering_window(&w("1"), 9).unwrap();
        assert_eq!(ones.members(), &[1, 5, 6, 8, 9]);
        assert_eq!(ones.horizon(), 10);
        let zeros = x.entering_window(&w("0"), 9).unwrap();
        assert_eq!(zeros.members(), &[2, 3, 4, 7]);
        // the prefix itself starts at 0, which is never an entering time
        let head = x.entering_window(&w("0100"), 6).unwrap();
        assert!(head.members().is_empty());
        assert!(matches!(x.entering_window(&w("1"), 10), Err(Error::HorizonExhausted { .. })));
    }

    #[test]
    fn full_shift_greedy_uses_no_spacers() {
        let x = build_transitive_point(&ShiftRule::full(), 2, 0, 0).unwrap();
        assert!(x.log().iter().all(|&(_, g)| g == 0));
        assert_eq!(x.prefix().to_string(), "0100011011");
    }

    #[test]
    fn even_spacing_extension() {
        let rule = ShiftRule::spacing(SetRule::evens()).unwrap();
        let ones = [1i64, 5];
        assert!(rule.admissible_extension(&ones, 1));
        let x = build_transitive_point(&rule, 3, 16, 0).unwrap();
        assert!(rule.is_admissible(x.prefix()));
        assert_eq!(&x.prefix().to_string()[..6], "010001");
    }

    #[test]
    fn dyadic_greedy_point() {
        let rule = ShiftRule::spacing(SetRule::DyadicBlocks).unwrap();
        let x = build_transitive_point(&rule, 4, 1 << 12, 0).unwrap();
        assert!(rule.is_admissible(x.prefix()));
        for len in 1..=4 {
            for word in rule.enumerate_words(len).unwrap() {
                let pos = x.occurrences()[&word];
                assert_eq!(x.prefix().slice(pos, pos + len), word.symbols());
            }
        }
    }

    #[test]
    fn spacer_exhaustion_is_reported() {
        // gaps {2} only: "101" then another 1 can never follow
        let rule = ShiftRule::spacing(SetRule::Explicit(vec![2])).unwrap();
        match build_transitive_point(&rule, 3, 64, 0) {
            Err(Error::SpacerExhausted { max_spacer, .. }) => assert_eq!(max_spacer, 64),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn min_len_repeats_passes() {
        let rule = ShiftRule::spacing(SetRule::evens()).unwrap();
        let x = build_transitive_point(&rule, 2, 8, 500).unwrap();
        assert!(x.len() >= 500);
        assert!(rule.is_admissible(x.prefix()));
        let again = build_transitive_point(&rule, 2, 8, 500).unwrap();
        assert_eq!(x, again);
    }

    #[test]
    fn triple_ratio_greedy_point() {
        let rule = ShiftRule::triple_ratio(3).unwrap();
        let x = build_transitive_point(&rule, 5, 64, 0).unwrap();
        assert!(rule.is_admissible(x.prefix()));
    }

    #[test]
    fn periodic_points_carry_residues() {
        let x = periodic(&w("10"), 100).unwrap();
        let s = x.entering_window(&w("1"), 50).unwrap();
        assert_eq!(s.members()[..3], [2, 4, 6]);
        let env = s.structure().residues.as_ref().unwrap();
        assert_eq!((env.modulus(), env.residues()), (2, &[0u64][..]));
        let z = periodic(&w("0"), 100).unwrap();
        let s = z.entering_window(&w("0"), 50).unwrap();
        assert_eq!(s.len(), 50);
        assert!(s.structure().residues.is_none());
    }

    #[test]
    fn record_round_trip() {
        let rule = ShiftRule::spacing(SetRule::DyadicBlocks).unwrap();
        let x = build_transitive_point(&rule, 3, 1 << 10, 0).unwrap();
        let json = serde_json::to_string(&x.to_record()).unwrap();
        let back = GeneratedPoint::from_record(serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(x, back);
    }
}
