//! HEL with index variables, its variable-free form, and their evaluators.
//!
//! ```text
//! html.body.table(tr[0].td[0].txt # tr[i:*].td[1].txt)
//! where html.body.table.tr[i].td[0].txt = "item";
//! ```
//!
//! desugars to the variable-free statement
//!
//! ```text
//! html.body.table(tr[0].td[0].txt # tr[*]{td[0].txt = "item"}.td[1].txt);
//! ```
//!
//! Steps are `.` (child) or `->` (descendant). Ranges in the construction
//! part apply after conditions; ranges inside conditions apply to path
//! matches, as in RPN. A `!` before a condition marks it for the cut
//! evaluator.

mod desugar;
mod eval;
mod parse;

use std::fmt;

use thiserror::Error;

use crate::doctree::{NodeId, Tag};
use crate::pathrange::{PathRegex, Range};
use crate::rpn::{self, Cond, Patom, Rpn, Translation};
use crate::syntax::{quote, SyntaxError};

pub use desugar::{desugar, validate_vars};
pub use eval::{eval_cut, eval_vf, eval_vf_with, EvalOptions, SingleValue};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HelError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("index variable '{0}' occurs more than once in the construction part")]
    VarUsedTwice(String),
    #[error("index variable '{var}' in condition `{cond}` does not occur in the construction part")]
    VarUnbound { var: String, cond: String },
    #[error("condition `{cond}` does not match a construction path: {detail}")]
    PrefixMismatch { cond: String, detail: String },
    #[error("condition `{0}` has no index variable to attach it to")]
    ConditionWithoutVariable(String),
    #[error("condition `{cond}` is not single-valued at node {node}: {count} matches")]
    SingleValueViolation { cond: String, node: NodeId, count: usize },
    #[error("cut-marked conditions have no Elog translation")]
    CutNotTranslatable,
}

/// Child (`.`) or descendant (`->`) step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Child,
    Descendant,
}

impl Step {
    /// The path this step denotes for tag `t`: `t` or `_*.t`.
    pub fn path(self, t: &Tag) -> PathRegex {
        match self {
            Step::Child => PathRegex::tag(t.as_str()),
            Step::Descendant => PathRegex::descendant(t.as_str()),
        }
    }
}

/// Construction part: a path sequence ending in `.txt` or in a record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cc<P> {
    Txt(Vec<P>),
    /// Two or more entries.
    Record(Vec<P>, Vec<Cc<P>>),
}

impl<P> Cc<P> {
    pub fn pseq(&self) -> &[P] {
        match self {
            Cc::Txt(ps) | Cc::Record(ps, _) => ps,
        }
    }

    pub fn entries(&self) -> &[Cc<P>] {
        match self {
            Cc::Txt(_) => &[],
            Cc::Record(_, es) => es,
        }
    }

    fn map<Q, E>(&self, f: &mut impl FnMut(&P) -> Result<Q, E>) -> Result<Cc<Q>, E> {
        let ps = self.pseq().iter().map(&mut *f).collect::<Result<Vec<_>, E>>()?;
        Ok(match self {
            Cc::Txt(_) => Cc::Txt(ps),
            Cc::Record(_, es) => Cc::Record(ps, es.iter().map(|e| e.map(f)).collect::<Result<_, E>>()?),
        })
    }

    /// Every patom in reading order.
    pub fn patoms(&self) -> Vec<&P> {
        let mut out: Vec<&P> = self.pseq().iter().collect();
        for e in self.entries() {
            out.extend(e.patoms());
        }
        out
    }
}

/// `var:range`, `var` (range `*`), or a plain range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VRange {
    pub var: Option<String>,
    pub range: Range,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelPatom {
    pub step: Step,
    pub tag: Tag,
    pub vrange: Option<VRange>,
}

impl HelPatom {
    pub fn var(&self) -> Option<&str> {
        self.vrange.as_ref().and_then(|r| r.var.as_deref())
    }

    /// The range, `*` when absent.
    pub fn range(&self) -> &Range {
        self.vrange.as_ref().map_or(&Range::Star, |r| &r.range)
    }
}

/// `pseq.txt = "s"` in the where clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelCond {
    pub cut: bool,
    pub pseq: Vec<HelPatom>,
    pub text: String,
}

/// A statement with index variables and a where clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HelStatement {
    pub cc: Cc<HelPatom>,
    pub conds: Vec<HelCond>,
}

impl HelStatement {
    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        parse::parse_hel(text)
    }
}

/// A patom of the variable-free form. Patoms inside conditions carry no
/// conditions of their own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VfPatom {
    pub step: Step,
    pub tag: Tag,
    /// `None` when no range was written; it selects like `*`.
    pub range: Option<Range>,
    pub conds: Vec<VfCond>,
}

impl VfPatom {
    pub fn new(step: Step, tag: &str) -> Self {
        VfPatom { step, tag: Tag::new(tag), range: None, conds: Vec::new() }
    }

    pub fn path(&self) -> PathRegex {
        self.step.path(&self.tag)
    }

    pub fn range(&self) -> &Range {
        self.range.as_ref().unwrap_or(&Range::Star)
    }
}

/// `[!] pseq.txt = "s"`; an empty `pseq` tests the node itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VfCond {
    pub cut: bool,
    pub pseq: Vec<VfPatom>,
    pub text: String,
}

/// A variable-free statement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VfStatement {
    pub cc: Cc<VfPatom>,
}

impl VfStatement {
    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        parse::parse_vf(text)
    }

    pub fn has_cuts(&self) -> bool {
        self.cc.patoms().iter().any(|p| p.conds.iter().any(|c| c.cut))
    }

    /// The same expression as an RPN statement (cut marks dropped). Under RPN
    /// semantics it only agrees with this statement when ranges are `*`.
    pub fn to_rpn(&self) -> Rpn {
        fn patom(p: &VfPatom) -> Patom {
            Patom {
                path: p.path(),
                range: p.range().clone(),
                conds: p.conds.iter().map(|c| Cond::chain(c.pseq.iter().map(patom), &c.text)).collect(),
            }
        }
        fn cc(c: &Cc<VfPatom>) -> Rpn {
            let rest = match c {
                Cc::Txt(_) => Rpn::Txt,
                Cc::Record(_, es) => Rpn::Record(es.iter().map(cc).collect()),
            };
            Rpn::chain(c.pseq().iter().map(patom), rest)
        }
        cc(&self.cc)
    }
}

/// Elog translation with ranges placed at the rule level, so that they
/// select among nodes satisfying the conditions.
pub fn translate_vf(w: &VfStatement) -> Result<Translation, HelError> {
    if w.has_cuts() {
        return Err(HelError::CutNotTranslatable);
    }
    Ok(rpn::translate(&w.to_rpn(), rpn::RangePlacement::RuleLevel))
}

fn write_pseq<P: fmt::Display>(f: &mut fmt::Formatter<'_>, ps: &[P], steps: impl Fn(&P) -> Step) -> fmt::Result {
    for (i, p) in ps.iter().enumerate() {
        match (i, steps(p)) {
            (0, _) => {}
            (_, Step::Child) => f.write_str(".")?,
            (_, Step::Descendant) => f.write_str("->")?,
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

trait HasStep {
    fn step(&self) -> Step;
}

impl HasStep for HelPatom {
    fn step(&self) -> Step {
        self.step
    }
}

impl HasStep for VfPatom {
    fn step(&self) -> Step {
        self.step
    }
}

impl<P: fmt::Display + HasStep> fmt::Display for Cc<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pseq(f, self.pseq(), P::step)?;
        match self {
            Cc::Txt(_) => f.write_str(".txt"),
            Cc::Record(_, es) => {
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

impl fmt::Display for VRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.var {
            Some(v) => write!(f, "{v}:{}", self.range),
            None => write!(f, "{}", self.range),
        }
    }
}

impl fmt::Display for HelPatom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag)?;
        if let Some(r) = &self.vrange {
            write!(f, "[{r}]")?;
        }
        Ok(())
    }
}

fn write_cond<P: fmt::Display + HasStep>(f: &mut fmt::Formatter<'_>, cut: bool, ps: &[P], text: &str) -> fmt::Result {
    if cut {
        f.write_str("!")?;
    }
    if !ps.is_empty() {
        write_pseq(f, ps, P::step)?;
        f.write_str(".")?;
    }
    write!(f, "txt = {}", quote(text))
}

impl fmt::Display for HelCond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_cond(f, self.cut, &self.pseq, &self.text)
    }
}

impl fmt::Display for HelStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cc)?;
        for (i, c) in self.conds.iter().enumerate() {
            f.write_str(if i == 0 { "\nwhere " } else { " and " })?;
            write!(f, "{c}")?;
        }
        f.write_str(";")
    }
}

impl fmt::Display for VfPatom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag)?;
        if let Some(r) = &self.range {
            write!(f, "[{r}]")?;
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

impl fmt::Display for VfCond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_cond(f, self.cut, &self.pseq, &self.text)
    }
}

impl fmt::Display for VfStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.cc)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::doctree::DocTree;

    pub const LISTING: &str = "html.body.table(tr[0].td[0].txt # tr[i:*].td[1].txt)\n\
                               where html.body.table.tr[i].td[0].txt = \"item\";";
    pub const LISTING_VF: &str = "html.body.table(tr[0].td[0].txt # tr[*]{td[0].txt = \"item\"}.td[1].txt);";

    pub fn doc1() -> DocTree {
        DocTree::parse(
            "<html><body><table>\
             <tr><td>item</td><td>A</td></tr>\
             <tr><td>x</td><td>B</td></tr>\
             <tr><td>item</td><td>C</td></tr>\
             </table></body></html>",
        )
        .unwrap()
    }

    #[test]
    fn listing_desugars_to_the_variable_free_listing() {
        let w = HelStatement::parse(LISTING).unwrap();
        assert_eq!(desugar(&w).unwrap(), VfStatement::parse(LISTING_VF).unwrap());
        assert_eq!(VfStatement::parse(LISTING_VF).unwrap().to_string(), LISTING_VF);
    }

    #[test]
    fn translation_matches_eval() {
        let t = doc1();
        for src in [
            LISTING_VF,
            "html.body.table.tr[1]{td[0].txt = \"item\"}.td[1].txt",
            "html->td[last]{txt = \"item\"}.txt",
            "html.body.table(tr[0-1].td[1].txt # tr->td[1].txt)",
        ] {
            let w = VfStatement::parse(src).unwrap();
            let tr = translate_vf(&w).unwrap();
            assert_eq!(tr.run(&t).unwrap(), eval_vf(&w, &t), "{src}\n{}", tr.program);
        }
    }

    #[test]
    fn single_rule_with_rule_range() {
        let w = VfStatement::parse("t[1]{c.txt = \"x\"}.txt").unwrap();
        let tr = translate_vf(&w).unwrap();
        let chain: Vec<&Rule> = tr.program.rules.iter().filter(|r| r.head == "p1").collect();
        assert_eq!(chain.len(), 1);
        assert_eq!(chain[0].range, Some(Range::Index(1)));
        assert_eq!(chain[0].refs.len(), 1);
        assert_eq!(tr.condition_predicates(), ["c1", "c2"]);
    }

    #[test]
    fn star_ranges_translate_like_rpn() {
        let w = VfStatement::parse("a->b{c.txt = \"x\"}(txt # d.txt)").unwrap_err();
        assert!(w.message.contains("txt"), "{w}");
        let w = VfStatement::parse("a->b{c.txt = \"x\"}(e.txt # d.txt)").unwrap();
        assert_eq!(translate_vf(&w).unwrap(), rpn::translate_rpn(&w.to_rpn()));
    }

    #[test]
    fn cut_is_not_translated() {
        let w = VfStatement::parse("a{!b.txt = \"x\"}.txt").unwrap();
        assert_eq!(translate_vf(&w), Err(HelError::CutNotTranslatable));
    }

    use crate::elog::Rule;
}
