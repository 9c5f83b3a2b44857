use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Completeness, ResidueEnvelope, Structure, WindowedSet};
use crate::error::{Error, Result};
use crate::parse::Cursor;

pub const DEFAULT_MAX_DEPTH: usize = 16;

/// Algebraic description of a subset of `ℤ₊`, materializable at any horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetRule {
    Explicit(Vec<u64>),
    /// Closed interval `[a, b]`.
    Range(u64, u64),
    /// `{first, first + step, first + 2·step, ...}`.
    ArithmeticProgression { first: u64, step: u64 },
    /// `⋃_{k≥1} [2^(2k-1), 2^(2k) - 1]`: the integers whose binary length is even.
    DyadicBlocks,
    /// `ℕ = {1, 2, ...}`.
    Naturals,
    Union(Vec<SetRule>),
    Intersection(Vec<SetRule>),
    /// `(F + n) ∩ ℕ`.
    Translate(Box<SetRule>, i64),
    /// `F - F`.
    DifferenceOf(Box<SetRule>),
}

#[inline]
pub(crate) fn is_dyadic(n: u64) -> bool {
    n != 0 && (64 - n.leading_zeros()).is_multiple_of(2)
}

impl SetRule {
    pub fn evens() -> Self {
        SetRule::ArithmeticProgression { first: 2, step: 2 }
    }

    /// Check ranges, steps, arity and nesting depth.
    pub fn validate(&self, max_depth: usize) -> Result<()> {
        self.validate_at(0, max_depth)
    }

    fn validate_at(&self, depth: usize, max_depth: usize) -> Result<()> {
        if depth >= max_depth {
            return Err(Error::Config(format!("set rule nesting exceeds depth {max_depth}")));
        }
        match self {
            SetRule::Range(a, b) if a > b => {
                Err(Error::Config(format!("range({a},{b}) requires a <= b")))
            }
            SetRule::ArithmeticProgression { step: 0, .. } => {
                Err(Error::Config("ap step must be >= 1".into()))
            }
            SetRule::Union(rs) | SetRule::Intersection(rs) => {
                if rs.is_empty() {
                    return Err(Error::Config("union/inter need at least one operand".into()));
                }
                rs.iter().try_for_each(|r| r.validate_at(depth + 1, max_depth))
            }
            SetRule::Translate(r, _) | SetRule::DifferenceOf(r) => r.validate_at(depth + 1, max_depth),
            _ => Ok(()),
        }
    }

    /// An exclusive bound on the members when the set is finite.
    pub fn finite_bound(&self) -> Option<u64> {
        match self {
            SetRule::Explicit(v) => Some(v.iter().max().map_or(0, |m| m + 1)),
            SetRule::Range(_, b) => Some(b + 1),
            SetRule::ArithmeticProgression { .. } | SetRule::DyadicBlocks | SetRule::Naturals => None,
            SetRule::Union(rs) => rs.iter().map(|r| r.finite_bound()).try_fold(0, |acc, b| b.map(|b| acc.max(b))),
            SetRule::Intersection(rs) => rs.iter().filter_map(|r| r.finite_bound()).min(),
            SetRule::Translate(r, o) => r.finite_bound().map(|b| (b as i64 + o).max(0) as u64),
            SetRule::DifferenceOf(r) => r.finite_bound(),
        }
    }

    /// Residue-class and doubling facts that hold for the whole infinite set.
    pub fn structure(&self) -> Structure {
        Structure {
            residues: self.residue_envelope().filter(|e| !e.is_trivial()),
            doubling_free: self.is_doubling_free(),
        }
    }

    fn residue_envelope(&self) -> Option<ResidueEnvelope> {
        match self {
            SetRule::ArithmeticProgression { first, step } => ResidueEnvelope::new(*step, [*first]),
            SetRule::Union(rs) => {
                let mut acc = rs[0].residue_envelope()?;
                for r in &rs[1..] {
                    acc = acc.union(&r.residue_envelope()?)?;
                }
                Some(acc)
            }
            SetRule::Intersection(rs) => rs
                .iter()
                .filter_map(|r| r.residue_envelope())
                .try_fold(None::<ResidueEnvelope>, |acc, e| match acc {
                    None => Some(Some(e)),
                    Some(a) => a.intersect(&e).map(Some),
                })
                .flatten(),
            SetRule::Translate(r, o) => r.residue_envelope().map(|e| e.shifted(*o)),
            SetRule::DifferenceOf(r) => r.residue_envelope().map(|e| e.differences()),
            _ => None,
        }
    }

    fn is_doubling_free(&self) -> bool {
        match self {
            SetRule::DyadicBlocks => true,
            SetRule::Explicit(v) => v.iter().all(|&m| m == 0 || !v.contains(&(2 * m))),
            SetRule::Range(a, b) => *a >= 1 && 2 * a > *b,
            // 2(a + id) = a + jd has a solution iff d divides a
            SetRule::ArithmeticProgression { first, step } => first % step != 0,
            SetRule::Intersection(rs) => rs.iter().any(|r| r.is_doubling_free()),
            _ => false,
        }
    }

    /// Pointwise membership oracle. Fails only for differences of infinite sets.
    pub fn compile(&self) -> Result<Membership> {
        Ok(Membership(self.compile_node()?))
    }

    fn compile_node(&self) -> Result<Node> {
        Ok(match self {
            SetRule::Explicit(v) => {
                let mut v = v.clone();
                v.sort_unstable();
                v.dedup();
                Node::Explicit(v)
            }
            SetRule::Range(a, b) => Node::Range(*a, *b),
            SetRule::ArithmeticProgression { first, step } => Node::Ap(*first, *step),
            SetRule::DyadicBlocks => Node::Dyadic,
            SetRule::Naturals => Node::Nat,
            SetRule::Union(rs) => Node::Union(rs.iter().map(|r| r.compile_node()).collect::<Result<_>>()?),
            SetRule::Intersection(rs) => {
                Node::Inter(rs.iter().map(|r| r.compile_node()).collect::<Result<_>>()?)
            }
            SetRule::Translate(r, o) => Node::Translate(Box::new(r.compile_node()?), *o),
            SetRule::DifferenceOf(r) => {
                let bound = r.finite_bound().ok_or_else(|| {
                    Error::Config(format!(
                        "{self} has no pointwise membership test (difference of an infinite set)"
                    ))
                })?;
                let inner = materialize(r, bound.max(1))?;
                Node::Explicit(inner.difference_set().members().to_vec())
            }
        })
    }
}

/// Compiled membership predicate for a [`SetRule`].
#[derive(Debug, Clone)]
pub struct Membership(Node);

#[derive(Debug, Clone)]
enum Node {
    Explicit(Vec<u64>),
    Range(u64, u64),
    Ap(u64, u64),
    Dyadic,
    Nat,
    Union(Vec<Node>),
    Inter(Vec<Node>),
    Translate(Box<Node>, i64),
}

impl Node {
    fn contains(&self, n: u64) -> bool {
        match self {
            Node::Explicit(v) => v.binary_search(&n).is_ok(),
            Node::Range(a, b) => (*a..=*b).contains(&n),
            Node::Ap(a, d) => n >= *a && (n - a).is_multiple_of(*d),
            Node::Dyadic => is_dyadic(n),
            Node::Nat => n >= 1,
            Node::Union(rs) => rs.iter().any(|r| r.contains(n)),
            Node::Inter(rs) => rs.iter().all(|r| r.contains(n)),
            Node::Translate(r, o) => {
                let k = n as i128 - *o as i128;
                n >= 1 && k >= 0 && r.contains(k as u64)
            }
        }
    }
}

impl Membership {
    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        self.0.contains(n)
    }
}

/// `{n ∈ [0, horizon) : n satisfies rule}`.
pub fn materialize(rule: &SetRule, horizon: u64) -> Result<WindowedSet> {
    if horizon == 0 {
        return Err(Error::Config("materialize needs horizon >= 1".into()));
    }
    rule.validate(DEFAULT_MAX_DEPTH)?;
    let (members, mut completeness) = members_below(rule, horizon)?;
    if completeness == Completeness::Window && rule.finite_bound().is_some_and(|b| b <= horizon) {
        completeness = Completeness::Total;
    }
    Ok(WindowedSet::from_sorted(horizon, members, completeness).with_structure(rule.structure()))
}

fn merge_union(mut parts: Vec<Vec<u64>>) -> Vec<u64> {
    let mut out: Vec<u64> = parts.drain(..).flatten().collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn members_below(rule: &SetRule, h: u64) -> Result<(Vec<u64>, Completeness)> {
    use Completeness::*;
    Ok(match rule {
        SetRule::Explicit(v) => {
            let mut m: Vec<u64> = v.iter().copied().filter(|&x| x < h).collect();
            m.sort_unstable();
            m.dedup();
            (m, Window)
        }
        SetRule::Range(a, b) => ((*a..=*b).take_while(|&x| x < h).collect(), Window),
        SetRule::ArithmeticProgression { first, step } => {
            ((*first..h).step_by(*step as usize).collect(), Window)
        }
        SetRule::DyadicBlocks => {
            let mut m = Vec::new();
            let mut lo = 2u64;
            while lo < h {
                m.extend(lo..(2 * lo).min(h));
                lo = lo.saturating_mul(4);
            }
            (m, Window)
        }
        SetRule::Naturals => ((1..h).collect(), Window),
        SetRule::Union(rs) => {
            let mut c = Window;
            let mut parts = Vec::with_capacity(rs.len());
            for r in rs {
                let (m, ci) = members_below(r, h)?;
                if ci == Sound {
                    c = Sound;
                }
                parts.push(m);
            }
            (merge_union(parts), c)
        }
        SetRule::Intersection(rs) => {
            let (mut acc, mut c) = members_below(&rs[0], h)?;
            for r in &rs[1..] {
                let (m, ci) = members_below(r, h)?;
                if ci == Sound {
                    c = Sound;
                }
                acc.retain(|x| m.binary_search(x).is_ok());
            }
            (acc, if c == Sound { Sound } else { Window })
        }
        SetRule::Translate(r, o) => {
            let inner_h = if *o < 0 { h + o.unsigned_abs() } else { h };
            let (m, c) = members_below(r, inner_h)?;
            let out = m
                .into_iter()
                .filter_map(|k| {
                    let v = k as i128 + *o as i128;
                    (v >= 1 && (v as u64) < h).then_some(v as u64)
                })
                .collect();
            (out, if c == Sound { Sound } else { Window })
        }
        SetRule::DifferenceOf(r) => match r.finite_bound() {
            Some(b) => {
                let inner = materialize(r, b.max(1))?;
                let d = inner.with_completeness(Total).difference_set();
                (d.range(0, h).to_vec(), Window)
            }
            None => {
                let inner = materialize(r, h)?;
                (inner.difference_set().members().to_vec(), Sound)
            }
        },
    })
}

impl fmt::Display for SetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            SetRule::Explicit(v) => {
                f.write_str("explicit(")?;
                list(f, v)?;
                f.write_str(")")
            }
            SetRule::Range(a, b) => write!(f, "range({a},{b})"),
            SetRule::ArithmeticProgression { first: 2, step: 2 } => f.write_str("evens()"),
            SetRule::ArithmeticProgression { first, step } => write!(f, "ap({first},{step})"),
            SetRule::DyadicBlocks => f.write_str("dyadic()"),
            SetRule::Naturals => f.write_str("nat()"),
            SetRule::Union(rs) => {
                f.write_str("union(")?;
                list(f, rs)?;
                f.write_str(")")
            }
            SetRule::Intersection(rs) => {
                f.write_str("inter(")?;
                list(f, rs)?;
                f.write_str(")")
            }
            SetRule::Translate(r, o) => write!(f, "shift({r},{o})"),
            SetRule::DifferenceOf(r) => write!(f, "diff({r})"),
        }
    }
}

impl SetRule {
    pub(crate) fn parse_at(c: &mut Cursor<'_>) -> Result<SetRule> {
        let start = c.pos();
        let name = c.ident()?;
        c.expect('(')?;
        let rule = match name.as_str() {
            "range" => {
                let a = c.uint()?;
                c.expect(',')?;
                let b = c.uint()?;
                SetRule::Range(a, b)
            }
            "ap" => {
                let first = c.uint()?;
                c.expect(',')?;
                let step = c.uint()?;
                SetRule::ArithmeticProgression { first, step }
            }
            "dyadic" => SetRule::DyadicBlocks,
            "nat" => SetRule::Naturals,
            "evens" => SetRule::evens(),
            "explicit" => SetRule::Explicit(c.uint_list(')')?),
            "union" | "inter" => {
                let mut rs = vec![SetRule::parse_at(c)?];
                while c.eat(',') {
                    rs.push(SetRule::parse_at(c)?);
                }
                if name == "union" {
                    SetRule::Union(rs)
                } else {
                    SetRule::Intersection(rs)
                }
            }
            "shift" => {
                let r = SetRule::parse_at(c)?;
                c.expect(',')?;
                SetRule::Translate(Box::new(r), c.int()?)
            }
            "diff" => SetRule::DifferenceOf(Box::new(SetRule::parse_at(c)?)),
            other => {
                c.set_pos(start);
                return Err(c.err(format!("unknown set rule '{other}'")));
            }
        };
        c.expect(')')?;
        if let Err(Error::Config(msg)) = rule.validate_at(0, usize::MAX) {
            c.set_pos(start);
            return Err(c.err(msg));
        }
        Ok(rule)
    }
}

impl FromStr for SetRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Cursor::new(s);
        let r = SetRule::parse_at(&mut c)?;
        c.finish()?;
        r.validate(DEFAULT_MAX_DEPTH)?;
        Ok(r)
    }
}

impl Serialize for SetRule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SetRule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
