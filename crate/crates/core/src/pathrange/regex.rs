//! Regular expressions over tag names and their compiled automata.
//!
//! Textual syntax: tags, `_` (any element tag), `^t` / `^(a|b)` (any element
//! tag except the listed ones), `#text` (text leaves, only when written),
//! `.` concatenation, `|` alternation, postfix `*`, parentheses, `()` for the
//! empty word and `!` for the empty language.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::doctree::{Tag, TEXT_TAG};
use crate::syntax::{Cursor, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PathRegex {
    /// The empty language.
    Empty,
    /// The empty word.
    Epsilon,
    Tag(Tag),
    /// Any element tag (`_`); never matches text leaves.
    Any,
    /// Any element tag not in the list (`^t`).
    AnyExcept(Vec<Tag>),
    Concat(Vec<PathRegex>),
    Alt(Vec<PathRegex>),
    Star(Box<PathRegex>),
}

impl PathRegex {
    pub fn tag(name: &str) -> Self {
        PathRegex::Tag(Tag::new(name))
    }

    /// `_*.t`, the descendant step.
    pub fn descendant(name: &str) -> Self {
        PathRegex::Concat(vec![PathRegex::Star(Box::new(PathRegex::Any)), PathRegex::tag(name)])
    }

    /// Dotted tag sequence, e.g. `html.body.table`.
    pub fn path(tags: &[&str]) -> Self {
        match tags {
            [] => PathRegex::Epsilon,
            [t] => PathRegex::tag(t),
            _ => PathRegex::Concat(tags.iter().map(|t| PathRegex::tag(t)).collect()),
        }
    }

    pub fn star(self) -> Self {
        PathRegex::Star(Box::new(self))
    }

    pub fn parse(text: &str) -> Result<PathRegex, SyntaxError> {
        let mut c = Cursor::new(text);
        let r = parse_alt(&mut c)?;
        c.finish()?;
        Ok(r)
    }

    /// Tags mentioned anywhere in the expression.
    pub fn tags(&self) -> BTreeSet<Tag> {
        let mut out = BTreeSet::new();
        self.collect_tags(&mut out);
        out
    }

    fn collect_tags(&self, out: &mut BTreeSet<Tag>) {
        match self {
            PathRegex::Tag(t) => {
                out.insert(t.clone());
            }
            PathRegex::AnyExcept(ts) => out.extend(ts.iter().cloned()),
            PathRegex::Concat(rs) | PathRegex::Alt(rs) => rs.iter().for_each(|r| r.collect_tags(out)),
            PathRegex::Star(r) => r.collect_tags(out),
            PathRegex::Empty | PathRegex::Epsilon | PathRegex::Any => {}
        }
    }

    /// Nesting depth of the AST (atoms have depth 1).
    pub fn depth(&self) -> usize {
        match self {
            PathRegex::Concat(rs) | PathRegex::Alt(rs) => 1 + rs.iter().map(|r| r.depth()).max().unwrap_or(0),
            PathRegex::Star(r) => 1 + r.depth(),
            _ => 1,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            PathRegex::Alt(rs) if rs.len() > 1 => 0,
            PathRegex::Concat(rs) if rs.len() > 1 => 1,
            PathRegex::Alt(_) | PathRegex::Concat(_) => 3,
            PathRegex::Star(_) => 2,
            _ => 3,
        }
    }

    /// Whether this expression can be written as an RPN path without
    /// surrounding parentheses (a single atom, optionally starred).
    pub fn is_simple_atom(&self) -> bool {
        match self {
            PathRegex::Tag(_) | PathRegex::Any | PathRegex::AnyExcept(_) | PathRegex::Empty => true,
            PathRegex::Star(r) => r.is_simple_atom(),
            _ => false,
        }
    }

    pub fn compile(&self) -> PathAutomaton {
        PathAutomaton::new(self)
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, r: &PathRegex, min_prec: u8) -> fmt::Result {
    if r.precedence() < min_prec {
        write!(f, "({r})")
    } else {
        write!(f, "{r}")
    }
}

impl fmt::Display for PathRegex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathRegex::Empty => f.write_str("!"),
            PathRegex::Epsilon => f.write_str("()"),
            PathRegex::Tag(t) => write!(f, "{t}"),
            PathRegex::Any => f.write_str("_"),
            PathRegex::AnyExcept(ts) if ts.len() == 1 => write!(f, "^{}", ts[0]),
            PathRegex::AnyExcept(ts) => {
                f.write_str("^(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            PathRegex::Concat(rs) if rs.is_empty() => f.write_str("()"),
            PathRegex::Alt(rs) if rs.is_empty() => f.write_str("!"),
            PathRegex::Concat(rs) | PathRegex::Alt(rs) if rs.len() == 1 => write!(f, "{}", rs[0]),
            PathRegex::Concat(rs) => {
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(".")?;
                    }
                    write_child(f, r, 2)?;
                }
                Ok(())
            }
            PathRegex::Alt(rs) => {
                for (i, r) in rs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write_child(f, r, 1)?;
                }
                Ok(())
            }
            PathRegex::Star(r) => {
                write_child(f, r, 3)?;
                f.write_str("*")
            }
        }
    }
}

pub(crate) fn parse_alt(c: &mut Cursor<'_>) -> Result<PathRegex, SyntaxError> {
    let mut alts = vec![parse_concat(c)?];
    while c.eat("|") {
        alts.push(parse_concat(c)?);
    }
    Ok(if alts.len() == 1 { alts.pop().expect("one") } else { PathRegex::Alt(alts) })
}

fn parse_concat(c: &mut Cursor<'_>) -> Result<PathRegex, SyntaxError> {
    let mut parts = vec![parse_postfix(c)?];
    while c.eat(".") {
        parts.push(parse_postfix(c)?);
    }
    Ok(if parts.len() == 1 { parts.pop().expect("one") } else { PathRegex::Concat(parts) })
}

/// A primary followed by any number of `*`.
pub(crate) fn parse_postfix(c: &mut Cursor<'_>) -> Result<PathRegex, SyntaxError> {
    let mut r = parse_primary(c)?;
    while c.eat("*") {
        r = PathRegex::Star(Box::new(r));
    }
    Ok(r)
}

fn parse_tag(c: &mut Cursor<'_>) -> Result<Tag, SyntaxError> {
    if c.eat(TEXT_TAG) {
        return Ok(Tag::text());
    }
    match c.ident() {
        Some("_") | None => c.error("expected tag name"),
        Some(name) => Ok(Tag::new(name.to_ascii_lowercase())),
    }
}

fn parse_primary(c: &mut Cursor<'_>) -> Result<PathRegex, SyntaxError> {
    if c.eat("(") {
        if c.eat(")") {
            return Ok(PathRegex::Epsilon);
        }
        let r = parse_alt(c)?;
        c.expect(")")?;
        return Ok(r);
    }
    if c.eat("!") {
        return Ok(PathRegex::Empty);
    }
    if c.eat("^") {
        if c.eat("(") {
            let mut tags = vec![parse_tag(c)?];
            while c.eat("|") {
                tags.push(parse_tag(c)?);
            }
            c.expect(")")?;
            return Ok(PathRegex::AnyExcept(tags));
        }
        return Ok(PathRegex::AnyExcept(vec![parse_tag(c)?]));
    }
    if c.eat_keyword("_") {
        return Ok(PathRegex::Any);
    }
    Ok(PathRegex::Tag(parse_tag(c)?))
}

#[derive(Clone, Debug)]
enum Matcher {
    Class(usize),
    AnyElement,
    AnyElementExcept(Vec<usize>),
}

#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<usize>>,
    sym: Vec<Vec<(Matcher, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.sym.push(Vec::new());
        self.eps.len() - 1
    }

    /// Thompson construction; returns (start, accept).
    fn build(&mut self, r: &PathRegex, classes: &HashMap<Tag, usize>) -> (usize, usize) {
        let s = self.state();
        let a = self.state();
        match r {
            PathRegex::Empty => {}
            PathRegex::Epsilon => self.eps[s].push(a),
            PathRegex::Tag(t) => self.sym[s].push((Matcher::Class(classes[t]), a)),
            PathRegex::Any => self.sym[s].push((Matcher::AnyElement, a)),
            PathRegex::AnyExcept(ts) => {
                let excluded = ts.iter().map(|t| classes[t]).collect();
                self.sym[s].push((Matcher::AnyElementExcept(excluded), a));
            }
            PathRegex::Concat(rs) => {
                let mut cur = s;
                for r in rs {
                    let (rs_, ra) = self.build(r, classes);
                    self.eps[cur].push(rs_);
                    cur = ra;
                }
                self.eps[cur].push(a);
            }
            PathRegex::Alt(rs) => {
                for r in rs {
                    let (rs_, ra) = self.build(r, classes);
                    self.eps[s].push(rs_);
                    self.eps[ra].push(a);
                }
            }
            PathRegex::Star(inner) => {
                let (is, ia) = self.build(inner, classes);
                self.eps[s].push(is);
                self.eps[s].push(a);
                self.eps[ia].push(is);
                self.eps[ia].push(a);
            }
        }
        (s, a)
    }

    fn closure(&self, states: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<usize> = states.into_iter().collect();
        while let Some(q) = stack.pop() {
            if out.insert(q) {
                stack.extend(self.eps[q].iter().copied());
            }
        }
        out
    }
}

const DEAD: u32 = u32::MAX;

/// Deterministic automaton over tag classes. The alphabet is partitioned into
/// the tags mentioned by the expression, `#text`, and "every other element tag".
#[derive(Clone, Debug)]
pub struct PathAutomaton {
    class_of: HashMap<String, usize>,
    text_class: usize,
    other_class: usize,
    n_classes: usize,
    trans: Vec<u32>,
    accepting: Vec<bool>,
}

/// Opaque automaton state.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathState(u32);

impl PathAutomaton {
    pub fn new(regex: &PathRegex) -> Self {
        let mut tags: Vec<Tag> = regex.tags().into_iter().collect();
        if !tags.iter().any(|t| t.as_str() == TEXT_TAG) {
            tags.push(Tag::text());
        }
        let classes: HashMap<Tag, usize> = tags.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let text_class = classes[&Tag::text()];
        let other_class = tags.len();
        let n_classes = tags.len() + 1;

        let mut nfa = Nfa::default();
        let (start, accept) = nfa.build(regex, &classes);
        let matches = |m: &Matcher, class: usize| match m {
            Matcher::Class(c) => *c == class,
            Matcher::AnyElement => class != text_class,
            Matcher::AnyElementExcept(ex) => class != text_class && !ex.contains(&class),
        };

        let mut ids: BTreeMap<BTreeSet<usize>, u32> = BTreeMap::new();
        let mut sets: Vec<BTreeSet<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        let init = nfa.closure([start]);
        ids.insert(init.clone(), 0);
        sets.push(init);
        queue.push_back(0usize);
        let mut trans: Vec<u32> = Vec::new();
        while let Some(d) = queue.pop_front() {
            if trans.len() < (d + 1) * n_classes {
                trans.resize((d + 1) * n_classes, DEAD);
            }
            for class in 0..n_classes {
                let targets: Vec<usize> = sets[d]
                    .iter()
                    .flat_map(|&q| nfa.sym[q].iter())
                    .filter(|(m, _)| matches(m, class))
                    .map(|&(_, t)| t)
                    .collect();
                if targets.is_empty() {
                    continue;
                }
                let next = nfa.closure(targets);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = sets.len() as u32;
                        ids.insert(next.clone(), id);
                        sets.push(next);
                        queue.push_back(id as usize);
                        id
                    }
                };
                trans[d * n_classes + class] = id;
            }
        }
        trans.resize(sets.len() * n_classes, DEAD);
        let accepting = sets.iter().map(|s| s.contains(&accept)).collect();
        PathAutomaton {
            class_of: tags.iter().enumerate().map(|(i, t)| (t.as_str().to_string(), i)).collect(),
            text_class,
            other_class,
            n_classes,
            trans,
            accepting,
        }
    }

    pub fn start(&self) -> PathState {
        PathState(0)
    }

    fn class(&self, label: &str) -> usize {
        match self.class_of.get(label) {
            Some(&c) => c,
            None if label == TEXT_TAG => self.text_class,
            None => self.other_class,
        }
    }

    pub fn step(&self, state: PathState, label: &str) -> Option<PathState> {
        let next = self.trans[state.0 as usize * self.n_classes + self.class(label)];
        (next != DEAD).then_some(PathState(next))
    }

    pub fn is_accepting(&self, state: PathState) -> bool {
        self.accepting[state.0 as usize]
    }

    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let mut q = self.start();
        for label in word {
            match self.step(q, label.as_ref()) {
                Some(n) => q = n,
                None => return false,
            }
        }
        self.is_accepting(q)
    }

    pub fn accepts_empty_word(&self) -> bool {
        self.is_accepting(self.start())
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }
}
