use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::doctree::Tag;
use crate::object::{parse_schema, ObjectSchema};
use crate::pathrange::{parse_range, PathRegex, Range};
use crate::syntax::{quote, Cursor, SyntaxError};

use super::ElogError;

/// Parent pattern of a rule: `root(_,X0)`, `dom(_,X0)` or `p(_,X0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parent {
    Root,
    Dom,
    Pred(String),
}

impl Parent {
    pub fn name(&self) -> &str {
        match self {
            Parent::Root => "root",
            Parent::Dom => "dom",
            Parent::Pred(p) => p,
        }
    }
}

/// How a rule binds its head variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Anchor {
    /// `parent(_,X0), subelem[π][ρ](X0,X)`
    Step { parent: Parent, path: PathRegex, range: Range },
    /// `dom(X0,X)`: the first argument is unconstrained; such predicates
    /// behave as unary and are stored as `p(_,v)`.
    Dom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `contains[π][ρ](X,Y)`: same relation as `subelem`.
    Contains { from: String, to: String, path: PathRegex, range: Range },
    /// `contains_s(X,"s")`: `txt(X) = s`.
    ContainsText { var: String, text: String },
    FirstChild(String, String),
    NextSibling(String, String),
    /// No next sibling.
    LastSibling(String),
    /// No children.
    Leaf(String),
    Label(String, Tag),
    Root(String),
}

impl Condition {
    pub fn vars(&self) -> Vec<&str> {
        match self {
            Condition::Contains { from, to, .. } => vec![from, to],
            Condition::FirstChild(a, b) | Condition::NextSibling(a, b) => vec![a, b],
            Condition::ContainsText { var, .. }
            | Condition::LastSibling(var)
            | Condition::Leaf(var)
            | Condition::Label(var, _)
            | Condition::Root(var) => vec![var],
        }
    }

    fn edge(&self) -> Option<(&str, &str)> {
        match self {
            Condition::Contains { from, to, .. } => Some((from, to)),
            Condition::FirstChild(a, b) | Condition::NextSibling(a, b) => Some((a, b)),
            _ => None,
        }
    }
}

/// Body reference `p(_,X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredRef {
    pub pred: String,
    pub var: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub head: String,
    pub x0: String,
    pub x: String,
    pub anchor: Anchor,
    pub conds: Vec<Condition>,
    pub refs: Vec<PredRef>,
    /// Applied per parent node to all satisfying `X` (rule-level range).
    pub range: Option<Range>,
}

impl Rule {
    /// `head(X0,X) :- parent(_,X0), subelem[path][range](X0,X).`
    pub fn step(head: &str, parent: Parent, path: PathRegex, range: Range) -> Rule {
        Rule {
            head: head.to_string(),
            x0: "X0".into(),
            x: "X".into(),
            anchor: Anchor::Step { parent, path, range },
            conds: Vec::new(),
            refs: Vec::new(),
            range: None,
        }
    }

    /// `head(X0,X) :- dom(X0,X).`
    pub fn dom(head: &str) -> Rule {
        Rule {
            head: head.to_string(),
            x0: "X0".into(),
            x: "X".into(),
            anchor: Anchor::Dom,
            conds: Vec::new(),
            refs: Vec::new(),
            range: None,
        }
    }

    pub fn parent(&self) -> Option<&Parent> {
        match &self.anchor {
            Anchor::Step { parent, .. } => Some(parent),
            Anchor::Dom => None,
        }
    }

    /// Pattern predicates this rule reads.
    pub fn dependencies(&self) -> impl Iterator<Item = &str> {
        let parent = match self.parent() {
            Some(Parent::Pred(p)) => Some(p.as_str()),
            _ => None,
        };
        parent.into_iter().chain(self.refs.iter().map(|r| r.pred.as_str()))
    }

    /// All body variables, head variables first.
    pub fn vars(&self) -> Vec<&str> {
        let mut out: Vec<&str> = vec![&self.x0, &self.x];
        let more = self.conds.iter().flat_map(Condition::vars).chain(self.refs.iter().map(|r| r.var.as_str()));
        for v in more {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    fn check_safety(&self) -> Result<(), ElogError> {
        let unsafe_var = |var: &str, why: &str| ElogError::UnsafeRule {
            head: self.head.clone(),
            var: var.to_string(),
            reason: why.to_string(),
        };
        if self.x0 == self.x {
            return Err(unsafe_var(&self.x, "head variables must differ"));
        }
        let mut reached: BTreeSet<&str> = BTreeSet::from([self.x.as_str(), self.x0.as_str()]);
        let x0_used = self.conds.iter().any(|c| c.vars().contains(&self.x0.as_str()))
            || self.refs.iter().any(|r| r.var == self.x0);
        if matches!(self.anchor, Anchor::Dom) && x0_used {
            return Err(unsafe_var(&self.x0, "the first argument of a dom rule is unconstrained"));
        }
        loop {
            let before = reached.len();
            for (a, b) in self.conds.iter().filter_map(Condition::edge) {
                if reached.contains(a) || reached.contains(b) {
                    reached.insert(a);
                    reached.insert(b);
                }
            }
            if reached.len() == before {
                break;
            }
        }
        match self.vars().into_iter().find(|v| !reached.contains(v)) {
            Some(v) => Err(unsafe_var(v, "not connected to the head variables")),
            None => Ok(()),
        }
    }
}

/// An Elog program plus its directives.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ElogProgram {
    pub rules: Vec<Rule>,
    /// `@aux`: predicates removed by gap closing before output.
    pub aux: BTreeSet<String>,
    /// `@record`: each list fixes the ordinals of sibling record entries.
    pub records: Vec<Vec<String>>,
    pub schema: Option<ObjectSchema>,
}

pub(crate) const BUILTINS: [&str; 2] = ["root", "dom"];

impl ElogProgram {
    pub fn new(rules: Vec<Rule>) -> Self {
        ElogProgram { rules, ..Default::default() }
    }

    pub fn parse(text: &str) -> Result<Self, ElogError> {
        let program = parse_program(text)?;
        program.validate()?;
        Ok(program)
    }

    /// Head predicates in order of first definition.
    pub fn predicates(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rules {
            if !out.contains(&r.head.as_str()) {
                out.push(&r.head);
            }
        }
        out
    }

    pub fn rules_of<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| r.head == pred)
    }

    /// Whether `pred` is defined by `dom(X0,X)` rules only.
    pub fn is_unary(&self, pred: &str) -> bool {
        let mut rules = self.rules_of(pred).peekable();
        rules.peek().is_some() && rules.all(|r| r.anchor == Anchor::Dom)
    }

    pub fn has_rule_ranges(&self) -> bool {
        self.rules.iter().any(|r| r.range.is_some())
    }

    /// Record-entry ordinal from `@record` declarations.
    pub fn ordinal(&self, pred: &str) -> Option<usize> {
        self.records.iter().find_map(|group| group.iter().position(|p| p == pred))
    }

    /// Parent predicates of each head (including `root`/`dom`).
    pub fn parents(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for r in &self.rules {
            let entry = out.entry(r.head.clone()).or_default();
            if let Some(p) = r.parent() {
                entry.insert(p.name().to_string());
            }
        }
        out
    }

    /// Checks safety, predicate references and anchor consistency.
    pub fn validate(&self) -> Result<(), ElogError> {
        let heads: BTreeSet<&str> = self.rules.iter().map(|r| r.head.as_str()).collect();
        for r in &self.rules {
            if BUILTINS.contains(&r.head.as_str()) {
                return Err(ElogError::BuiltinHead(r.head.clone()));
            }
            r.check_safety()?;
            if let Some(p) = r.dependencies().find(|p| !heads.contains(p)) {
                return Err(ElogError::UnknownPredicate(p.to_string()));
            }
        }
        for p in &heads {
            let mut kinds = self.rules_of(p).map(|r| r.anchor == Anchor::Dom);
            let first = kinds.next();
            if kinds.any(|k| Some(k) != first) {
                return Err(ElogError::MixedAnchors(p.to_string()));
            }
        }
        let declared = self.aux.iter().chain(self.records.iter().flatten());
        if let Some(p) = declared.into_iter().find(|p| !heads.contains(p.as_str())) {
            return Err(ElogError::UnknownPredicate(p.clone()));
        }
        Ok(())
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Contains { from, to, path, range } => {
                write!(f, "contains[{}][{range}]({from},{to})", quote(&path.to_string()))
            }
            Condition::ContainsText { var, text } => write!(f, "contains_s({var},{})", quote(text)),
            Condition::FirstChild(a, b) => write!(f, "firstchild({a},{b})"),
            Condition::NextSibling(a, b) => write!(f, "nextsibling({a},{b})"),
            Condition::LastSibling(a) => write!(f, "lastsibling({a})"),
            Condition::Leaf(a) => write!(f, "leaf({a})"),
            Condition::Label(a, t) => write!(f, "label({a},{})", quote(t.as_str())),
            Condition::Root(a) => write!(f, "root({a})"),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{}) :- ", self.head, self.x0, self.x)?;
        match &self.anchor {
            Anchor::Step { parent, path, range } => write!(
                f,
                "{}(_,{}), subelem[{}][{range}]({},{})",
                parent.name(),
                self.x0,
                quote(&path.to_string()),
                self.x0,
                self.x
            )?,
            Anchor::Dom => write!(f, "dom({},{})", self.x0, self.x)?,
        }
        for c in &self.conds {
            write!(f, ", {c}")?;
        }
        for r in &self.refs {
            write!(f, ", {}(_,{})", r.pred, r.var)?;
        }
        if let Some(range) = &self.range {
            write!(f, " [{range}]")?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for ElogProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(schema) = &self.schema {
            writeln!(f, "@schema {schema}.")?;
        }
        for group in &self.records {
            writeln!(f, "@record {}.", group.join(" "))?;
        }
        if !self.aux.is_empty() {
            let aux: Vec<&str> = self.aux.iter().map(String::as_str).collect();
            writeln!(f, "@aux {}.", aux.join(" "))?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

fn parse_program(text: &str) -> Result<ElogProgram, SyntaxError> {
    let mut c = Cursor::new(text);
    let mut program = ElogProgram::default();
    while !c.at_end() {
        if c.eat("@") {
            let kw = c.expect_ident("directive name")?;
            match kw {
                "aux" => program.aux.extend(pred_list(&mut c)?),
                "record" => program.records.push(pred_list(&mut c)?),
                "schema" => {
                    if program.schema.is_some() {
                        return c.error("duplicate @schema");
                    }
                    program.schema = Some(parse_schema(&mut c)?);
                }
                other => return c.error(format!("unknown directive @{other}")),
            }
            c.expect(".")?;
        } else {
            program.rules.push(parse_rule(&mut c)?);
        }
    }
    Ok(program)
}

fn pred_list(c: &mut Cursor<'_>) -> Result<Vec<String>, SyntaxError> {
    let mut out = Vec::new();
    while let Some(p) = c.ident() {
        out.push(p.to_string());
    }
    Ok(out)
}

fn var(c: &mut Cursor<'_>) -> Result<String, SyntaxError> {
    let v = c.expect_ident("variable")?;
    if v == "_" {
        return c.error("'_' is only allowed as the first argument of a pattern atom");
    }
    Ok(v.to_string())
}

/// `(_,V)`
fn projected_var(c: &mut Cursor<'_>) -> Result<String, SyntaxError> {
    c.expect("(")?;
    if !c.eat_keyword("_") {
        return c.error("expected '_' as first argument");
    }
    c.expect(",")?;
    let v = var(c)?;
    c.expect(")")?;
    Ok(v)
}

fn var_pair(c: &mut Cursor<'_>) -> Result<(String, String), SyntaxError> {
    c.expect("(")?;
    let a = var(c)?;
    c.expect(",")?;
    let b = var(c)?;
    c.expect(")")?;
    Ok((a, b))
}

fn single_var(c: &mut Cursor<'_>) -> Result<String, SyntaxError> {
    c.expect("(")?;
    let a = var(c)?;
    c.expect(")")?;
    Ok(a)
}

/// `["π"]` optionally followed by `[ρ]` (default `*`).
fn path_and_range(c: &mut Cursor<'_>) -> Result<(PathRegex, Range), SyntaxError> {
    c.expect("[")?;
    let loc = c.clone();
    let text = c.string()?;
    let path = PathRegex::parse(&text).or_else(|e| loc.error(format!("in path {}: {}", quote(&text), e.message)))?;
    c.expect("]")?;
    let range = if c.eat("[") {
        let r = parse_range(c)?;
        c.expect("]")?;
        r
    } else {
        Range::Star
    };
    Ok((path, range))
}

enum BodyAtom {
    Parent(Parent, String),
    Dom(String, String),
    Subelem(PathRegex, Range, String, String),
    Cond(Condition),
    Ref(PredRef),
}

fn parse_body_atom(c: &mut Cursor<'_>) -> Result<BodyAtom, SyntaxError> {
    let name = c.expect_ident("atom")?;
    Ok(match name {
        "subelem" => {
            let (path, range) = path_and_range(c)?;
            let (a, b) = var_pair(c)?;
            BodyAtom::Subelem(path, range, a, b)
        }
        "contains" => {
            let (path, range) = path_and_range(c)?;
            let (from, to) = var_pair(c)?;
            BodyAtom::Cond(Condition::Contains { from, to, path, range })
        }
        "contains_s" => {
            c.expect("(")?;
            let v = var(c)?;
            c.expect(",")?;
            let text = c.string()?;
            c.expect(")")?;
            BodyAtom::Cond(Condition::ContainsText { var: v, text })
        }
        "firstchild" => {
            let (a, b) = var_pair(c)?;
            BodyAtom::Cond(Condition::FirstChild(a, b))
        }
        "nextsibling" => {
            let (a, b) = var_pair(c)?;
            BodyAtom::Cond(Condition::NextSibling(a, b))
        }
        "lastsibling" => BodyAtom::Cond(Condition::LastSibling(single_var(c)?)),
        "leaf" => BodyAtom::Cond(Condition::Leaf(single_var(c)?)),
        "label" => {
            c.expect("(")?;
            let v = var(c)?;
            c.expect(",")?;
            let tag = c.string()?;
            c.expect(")")?;
            BodyAtom::Cond(Condition::Label(v, Tag::new(tag)))
        }
        "root" => {
            let mut probe = c.clone();
            probe.expect("(")?;
            if probe.eat_keyword("_") {
                BodyAtom::Parent(Parent::Root, projected_var(c)?)
            } else {
                BodyAtom::Cond(Condition::Root(single_var(c)?))
            }
        }
        "dom" => {
            let mut probe = c.clone();
            probe.expect("(")?;
            if probe.eat_keyword("_") {
                BodyAtom::Parent(Parent::Dom, projected_var(c)?)
            } else {
                let (a, b) = var_pair(c)?;
                BodyAtom::Dom(a, b)
            }
        }
        pred => BodyAtom::Ref(PredRef { pred: pred.to_string(), var: projected_var(c)? }),
    })
}

fn parse_rule(c: &mut Cursor<'_>) -> Result<Rule, SyntaxError> {
    let head_loc = c.clone();
    let head = c.expect_ident("rule head")?.to_string();
    if BUILTINS.contains(&head.as_str()) {
        return head_loc.error(format!("builtin '{head}' cannot be a rule head"));
    }
    let (x0, x) = var_pair(c)?;
    c.expect(":-")?;
    let start = c.clone();
    let mut atoms = vec![parse_body_atom(c)?];
    while c.eat(",") {
        atoms.push(parse_body_atom(c)?);
    }
    let range = if c.eat("[") {
        let r = parse_range(c)?;
        c.expect("]")?;
        Some(r)
    } else {
        None
    };
    c.expect(".")?;

    let mut atoms = atoms.into_iter();
    let anchor = match atoms.next() {
        Some(BodyAtom::Dom(a, b)) if a == x0 && b == x => Anchor::Dom,
        Some(BodyAtom::Parent(parent, v)) if v == x0 => match atoms.next() {
            Some(BodyAtom::Subelem(path, range, a, b)) if a == x0 && b == x => {
                Anchor::Step { parent, path, range }
            }
            _ => return start.error(format!("expected subelem[..]({x0},{x}) after the parent atom")),
        },
        Some(BodyAtom::Ref(r)) if r.var == x0 => match atoms.next() {
            Some(BodyAtom::Subelem(path, range, a, b)) if a == x0 && b == x => {
                Anchor::Step { parent: Parent::Pred(r.pred), path, range }
            }
            _ => return start.error(format!("expected subelem[..]({x0},{x}) after the parent atom")),
        },
        _ => {
            return start.error(format!(
                "a rule body starts with dom({x0},{x}) or a parent atom p(_,{x0}) followed by subelem"
            ))
        }
    };
    let mut rule = Rule { head, x0, x, anchor, conds: Vec::new(), refs: Vec::new(), range };
    for atom in atoms {
        match atom {
            BodyAtom::Cond(cond) => rule.conds.push(cond),
            BodyAtom::Ref(r) => rule.refs.push(r),
            BodyAtom::Parent(p, v) => rule.refs.push(PredRef { pred: p.name().to_string(), var: v }),
            BodyAtom::Dom(..) | BodyAtom::Subelem(..) => {
                return start.error("dom(X0,X) and subelem may only appear as the rule anchor")
            }
        }
    }
    if let Some(r) = rule.refs.iter().find(|r| BUILTINS.contains(&r.pred.as_str())) {
        return start.error(format!("builtin {}(_,{}) may only be a parent atom", r.pred, r.var));
    }
    Ok(rule)
}
