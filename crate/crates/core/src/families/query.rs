use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    fa_grid_report, family_window_report, finfty_grid_report, fsa_grid_report, nabla_report,
    FamilySpec, GridParams, InfinityFamily, WindowReport, DEFAULT_CELL_CAP,
};
use crate::error::{Error, Result};
use crate::intset::WindowedSet;
use crate::parse::Cursor;

/// A family-membership question, as written on the command line.
///
/// Grammar: `thick(L)`, `syndetic(g)`, `cofinite(N0)`, `nabla(<base>)`,
/// `fa(a1,..;Nmax,Kmax)`, `fsa(a1,..;Nmax,g)`, `finfty(m;Nmax,Kmax)`,
/// `fsinfty(m;Nmax,g)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyQuery {
    Base(FamilySpec),
    Nabla(FamilySpec),
    Fa { a: Vec<u64>, grid: GridParams },
    Fsa { a: Vec<u64>, grid: GridParams },
    Infinity { levels: u64, grid: GridParams, which: InfinityFamily },
}

impl FamilyQuery {
    pub fn evaluate(&self, s: &WindowedSet) -> Result<WindowReport> {
        match self {
            FamilyQuery::Base(f) => family_window_report(s, *f),
            FamilyQuery::Nabla(f) => nabla_report(s, *f),
            FamilyQuery::Fa { a, grid } => fa_grid_report(s, a, grid),
            FamilyQuery::Fsa { a, grid } => fsa_grid_report(s, a, grid),
            FamilyQuery::Infinity { levels, grid, which } => finfty_grid_report(s, *levels, grid, *which),
        }
    }

    fn parse_base(c: &mut Cursor<'_>, name: &str) -> Result<FamilySpec> {
        let start = c.pos();
        c.expect('(')?;
        let v = c.uint()?;
        c.expect(')')?;
        let spec = match name {
            "thick" => FamilySpec::Thick(v),
            "syndetic" => FamilySpec::Syndetic(v),
            "cofinite" => FamilySpec::Cofinite(v),
            _ => unreachable!("caller matched the name"),
        };
        spec.validate().map_err(|e| {
            c.set_pos(start);
            c.err(e.to_string())
        })?;
        Ok(spec)
    }
}

fn grid_tail(c: &mut Cursor<'_>) -> Result<(u64, u64)> {
    c.expect(';')?;
    let n_max = c.uint()?;
    c.expect(',')?;
    let second = c.uint()?;
    c.expect(')')?;
    Ok((n_max, second))
}

impl FromStr for FamilyQuery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Cursor::new(s);
        let name_pos = c.pos();
        let name = c.ident()?;
        let q = match name.as_str() {
            "thick" | "syndetic" | "cofinite" => FamilyQuery::Base(Self::parse_base(&mut c, &name)?),
            "nabla" => {
                c.expect('(')?;
                let inner_pos = c.pos();
                let inner = c.ident()?;
                if !matches!(inner.as_str(), "thick" | "syndetic" | "cofinite") {
                    c.set_pos(inner_pos);
                    return Err(c.err("nabla() takes thick, syndetic or cofinite"));
                }
                let f = Self::parse_base(&mut c, &inner)?;
                c.expect(')')?;
                FamilyQuery::Nabla(f)
            }
            "fa" | "fsa" => {
                c.expect('(')?;
                let a_pos = c.pos();
                let a = c.uint_list(';')?;
                if a.is_empty() || a.contains(&0) {
                    c.set_pos(a_pos);
                    return Err(c.err("vector entries must be positive and non-empty"));
                }
                let (n_max, second) = grid_tail(&mut c)?;
                if name == "fa" {
                    FamilyQuery::Fa {
                        a,
                        grid: GridParams { n_max, k_max: second, gap: 1, cell_cap: DEFAULT_CELL_CAP },
                    }
                } else {
                    FamilyQuery::Fsa {
                        a,
                        grid: GridParams { n_max, k_max: 0, gap: second.max(1), cell_cap: DEFAULT_CELL_CAP },
                    }
                    .check_gap(second, &mut c)?
                }
            }
            "finfty" | "fsinfty" => {
                c.expect('(')?;
                let levels = c.uint()?;
                let (n_max, second) = grid_tail(&mut c)?;
                if levels == 0 {
                    return Err(Error::parse(s, name.len() + 1, "level count must be >= 1"));
                }
                if name == "finfty" {
                    FamilyQuery::Infinity {
                        levels,
                        grid: GridParams { n_max, k_max: second, gap: 1, cell_cap: DEFAULT_CELL_CAP },
                        which: InfinityFamily::Plain,
                    }
                } else {
                    FamilyQuery::Infinity {
                        levels,
                        grid: GridParams { n_max, k_max: 0, gap: second.max(1), cell_cap: DEFAULT_CELL_CAP },
                        which: InfinityFamily::Syndetic,
                    }
                    .check_gap(second, &mut c)?
                }
            }
            _ => {
                c.set_pos(name_pos);
                return Err(c.err(format!("unknown family '{name}'")));
            }
        };
        c.finish()?;
        Ok(q)
    }
}

impl FamilyQuery {
    fn check_gap(self, gap: u64, c: &mut Cursor<'_>) -> Result<Self> {
        if gap == 0 {
            return Err(c.err("syndetic gap bound must be >= 1"));
        }
        Ok(self)
    }
}

fn join(a: &[u64]) -> String {
    a.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for FamilyQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyQuery::Base(b) => write!(f, "{b}"),
            FamilyQuery::Nabla(b) => write!(f, "nabla({b})"),
            FamilyQuery::Fa { a, grid } => write!(f, "fa({};{},{})", join(a), grid.n_max, grid.k_max),
            FamilyQuery::Fsa { a, grid } => write!(f, "fsa({};{},{})", join(a), grid.n_max, grid.gap),
            FamilyQuery::Infinity { levels, grid, which } => match which {
                InfinityFamily::Plain => write!(f, "finfty({levels};{},{})", grid.n_max, grid.k_max),
                InfinityFamily::Syndetic => write!(f, "fsinfty({levels};{},{})", grid.n_max, grid.gap),
            },
        }
    }
}

impl Serialize for FamilyQuery {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FamilyQuery {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
