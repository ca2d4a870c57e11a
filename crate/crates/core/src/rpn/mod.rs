//! Regular path queries with nesting.
//!
//! ```text
//! html.body.table.tr{td[0].txt = "item"}.td[1].txt
//! (a.txt # b[0-2]{c.txt = "x" and d.txt = "y"}.txt)
//! ```
//!
//! A patom is a path, an optional range (default `*`) and optional
//! conditions. Paths are single tags, `_`, `^t`, optionally starred; any
//! other regular expression is written in parentheses, e.g. `(_*.td)[1]`.

mod eval;
mod translate;

use std::fmt;

use crate::object::RpnType;
use crate::pathrange::{parse_path_postfix, parse_range, PathRegex, Range};
use crate::syntax::{quote, Cursor, SyntaxError};

pub use eval::eval_rpn;
pub(crate) use eval::Engine;
pub use translate::{translate_rpn, Translation};
pub(crate) use translate::{translate, RangePlacement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rpn {
    Chain(Patom, Box<Rpn>),
    Txt,
    /// Two or more entries.
    Record(Vec<Rpn>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Patom {
    pub path: PathRegex,
    pub range: Range,
    pub conds: Vec<Cond>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    Chain(Patom, Box<Cond>),
    TxtEq(String),
}

impl Patom {
    pub fn new(path: PathRegex) -> Self {
        Patom { path, range: Range::Star, conds: Vec::new() }
    }

    pub fn with_range(mut self, range: Range) -> Self {
        self.range = range;
        self
    }

    pub fn with_cond(mut self, cond: Cond) -> Self {
        self.conds.push(cond);
        self
    }
}

impl Rpn {
    pub fn parse(text: &str) -> Result<Rpn, SyntaxError> {
        let mut c = Cursor::new(text);
        let r = parse_rpn(&mut c)?;
        c.finish()?;
        Ok(r)
    }

    /// `p1.p2. ... .rest`
    pub fn chain(patoms: impl IntoIterator<Item = Patom>, rest: Rpn) -> Rpn {
        let patoms: Vec<Patom> = patoms.into_iter().collect();
        patoms.into_iter().rev().fold(rest, |acc, p| Rpn::Chain(p, Box::new(acc)))
    }

    /// The type: chains take the type of their tail, `txt` is `{String}`,
    /// records are sets of records.
    pub fn typecheck(&self) -> RpnType {
        match self {
            Rpn::Chain(_, rest) => rest.typecheck(),
            Rpn::Txt => RpnType::set_of(RpnType::Str),
            Rpn::Record(es) => RpnType::set_of(RpnType::Record(es.iter().map(Rpn::typecheck).collect())),
        }
    }

    /// Nesting depth counting chain links, records and condition chains.
    pub fn depth(&self) -> usize {
        match self {
            Rpn::Chain(p, rest) => 1 + p.cond_depth().max(rest.depth()),
            Rpn::Txt => 0,
            Rpn::Record(es) => 1 + es.iter().map(Rpn::depth).max().unwrap_or(0),
        }
    }

    /// All patoms, conditions included, in preorder.
    pub fn patoms(&self) -> Vec<&Patom> {
        let mut out = Vec::new();
        self.collect_patoms(&mut out);
        out
    }

    fn collect_patoms<'a>(&'a self, out: &mut Vec<&'a Patom>) {
        match self {
            Rpn::Chain(p, rest) => {
                p.collect_patoms(out);
                rest.collect_patoms(out);
            }
            Rpn::Txt => {}
            Rpn::Record(es) => es.iter().for_each(|e| e.collect_patoms(out)),
        }
    }
}

impl Patom {
    fn cond_depth(&self) -> usize {
        self.conds.iter().map(Cond::depth).max().unwrap_or(0)
    }

    fn collect_patoms<'a>(&'a self, out: &mut Vec<&'a Patom>) {
        out.push(self);
        for c in &self.conds {
            let mut cur = c;
            while let Cond::Chain(p, rest) = cur {
                p.collect_patoms(out);
                cur = rest;
            }
        }
    }
}

impl Cond {
    pub fn parse(text: &str) -> Result<Cond, SyntaxError> {
        let mut c = Cursor::new(text);
        let r = parse_cond(&mut c)?;
        c.finish()?;
        Ok(r)
    }

    pub fn chain(patoms: impl IntoIterator<Item = Patom>, text: &str) -> Cond {
        let patoms: Vec<Patom> = patoms.into_iter().collect();
        patoms.into_iter().rev().fold(Cond::TxtEq(text.to_string()), |acc, p| Cond::Chain(p, Box::new(acc)))
    }

    fn depth(&self) -> usize {
        match self {
            Cond::Chain(p, rest) => 1 + p.cond_depth().max(rest.depth()),
            Cond::TxtEq(_) => 1,
        }
    }
}

pub(crate) fn parse_rpn(c: &mut Cursor<'_>) -> Result<Rpn, SyntaxError> {
    if c.eat_keyword("txt") {
        return Ok(Rpn::Txt);
    }
    if c.looking_at("(") {
        let mut probe = c.clone();
        probe.expect("(")?;
        let first = parse_rpn(&mut probe);
        if first.is_ok() && probe.looking_at("#") {
            let mut entries = vec![first?];
            while probe.eat("#") {
                entries.push(parse_rpn(&mut probe)?);
            }
            probe.expect(")")?;
            *c = probe;
            return Ok(Rpn::Record(entries));
        }
    }
    let patom = parse_patom(c)?;
    c.expect(".")?;
    Ok(Rpn::Chain(patom, Box::new(parse_rpn(c)?)))
}

fn parse_patom(c: &mut Cursor<'_>) -> Result<Patom, SyntaxError> {
    let path = parse_path_postfix(c)?;
    let range = if c.eat("[") {
        let r = parse_range(c)?;
        c.expect("]")?;
        r
    } else {
        Range::Star
    };
    let mut conds = Vec::new();
    if c.eat("{") {
        conds.push(parse_cond(c)?);
        while c.eat_keyword("and") {
            conds.push(parse_cond(c)?);
        }
        c.expect("}")?;
    }
    Ok(Patom { path, range, conds })
}

fn parse_cond(c: &mut Cursor<'_>) -> Result<Cond, SyntaxError> {
    if c.eat_keyword("txt") {
        c.expect("=")?;
        return Ok(Cond::TxtEq(c.string()?));
    }
    let patom = parse_patom(c)?;
    c.expect(".")?;
    Ok(Cond::Chain(patom, Box::new(parse_cond(c)?)))
}

impl fmt::Display for Patom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_simple_atom() {
            write!(f, "{}", self.path)?;
        } else {
            write!(f, "({})", self.path)?;
        }
        if !self.range.is_star() {
            write!(f, "[{}]", self.range)?;
        }
        if !self.conds.is_empty() {
            f.write_str("{")?;
            for (i, c) in self.conds.iter().enumerate() {
                if i > 0 {
                    f.write_str(" and ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::Chain(p, rest) => write!(f, "{p}.{rest}"),
            Cond::TxtEq(s) => write!(f, "txt = {}", quote(s)),
        }
    }
}

impl fmt::Display for Rpn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rpn::Chain(p, rest) => write!(f, "{p}.{rest}"),
            Rpn::Txt => f.write_str("txt"),
            Rpn::Record(es) => {
                f.write_str("(")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" # ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
        }
    }
}
