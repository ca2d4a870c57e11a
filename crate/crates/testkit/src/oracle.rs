//! Brute-force transcriptions of the semantics. Nothing here calls the
//! automata, range masks or evaluators of `wrapcore`; only the document
//! tree and the AST types are shared.

use std::collections::BTreeSet;

use wrapcore::doctree::{DocTree, NodeId, TEXT_TAG};
use wrapcore::hel::{Cc, VfCond, VfPatom, VfStatement};
use wrapcore::object::ComplexObject;
use wrapcore::pathrange::{BinRegex, PathRegex, Range};
use wrapcore::rpn::{Cond, Patom, Rpn};

fn is_element(label: &str) -> bool {
    label != TEXT_TAG
}

fn nullable(r: &PathRegex) -> bool {
    match r {
        PathRegex::Empty | PathRegex::Tag(_) | PathRegex::Any | PathRegex::AnyExcept(_) => false,
        PathRegex::Epsilon | PathRegex::Star(_) => true,
        PathRegex::Concat(rs) => rs.iter().all(nullable),
        PathRegex::Alt(rs) => rs.iter().any(nullable),
    }
}

/// Brzozowski derivative of `r` by one label.
fn derive(r: &PathRegex, a: &str) -> PathRegex {
    match r {
        PathRegex::Empty | PathRegex::Epsilon => PathRegex::Empty,
        PathRegex::Tag(t) => eps_if(t.as_str() == a),
        PathRegex::Any => eps_if(is_element(a)),
        PathRegex::AnyExcept(ts) => eps_if(is_element(a) && ts.iter().all(|t| t.as_str() != a)),
        PathRegex::Concat(rs) => match rs.split_first() {
            None => PathRegex::Empty,
            Some((head, tail)) => {
                let tail = match tail {
                    [] => PathRegex::Epsilon,
                    [one] => one.clone(),
                    _ => PathRegex::Concat(tail.to_vec()),
                };
                let first = concat(derive(head, a), tail.clone());
                if nullable(head) {
                    alt(first, derive(&tail, a))
                } else {
                    first
                }
            }
        },
        PathRegex::Alt(rs) => rs.iter().map(|r| derive(r, a)).fold(PathRegex::Empty, alt),
        PathRegex::Star(inner) => concat(derive(inner, a), r.clone()),
    }
}

fn eps_if(b: bool) -> PathRegex {
    if b {
        PathRegex::Epsilon
    } else {
        PathRegex::Empty
    }
}

fn concat(a: PathRegex, b: PathRegex) -> PathRegex {
    match (a, b) {
        (PathRegex::Empty, _) | (_, PathRegex::Empty) => PathRegex::Empty,
        (PathRegex::Epsilon, x) | (x, PathRegex::Epsilon) => x,
        (a, b) => PathRegex::Concat(vec![a, b]),
    }
}

fn alt(a: PathRegex, b: PathRegex) -> PathRegex {
    match (a, b) {
        (PathRegex::Empty, x) | (x, PathRegex::Empty) => x,
        (a, b) if a == b => a,
        (a, b) => PathRegex::Alt(vec![a, b]),
    }
}

/// Whether the label word is in `L(r)`.
pub fn word_matches(r: &PathRegex, word: &[&str]) -> bool {
    let mut cur = r.clone();
    for a in word {
        cur = derive(&cur, a);
        if cur == PathRegex::Empty {
            return false;
        }
    }
    nullable(&cur)
}

/// Every node below or at `v0` whose path word (labels strictly below
/// `v0`, down to and including its own) is in `L(π)`.
pub fn naive_subelem(t: &DocTree, v0: NodeId, pi: &PathRegex) -> BTreeSet<NodeId> {
    fn walk<'a>(t: &'a DocTree, v: NodeId, word: &mut Vec<&'a str>, pi: &PathRegex, out: &mut BTreeSet<NodeId>) {
        if word_matches(pi, word) {
            out.insert(v);
        }
        for &c in t.children(v) {
            word.push(t.label(c).as_str());
            walk(t, c, word, pi, out);
            word.pop();
        }
    }
    let mut out = BTreeSet::new();
    walk(t, v0, &mut Vec::new(), pi, &mut out);
    out
}

fn bin_nullable(r: &BinRegex) -> bool {
    match r {
        BinRegex::Empty | BinRegex::Bit(_) => false,
        BinRegex::Epsilon | BinRegex::Star(_) => true,
        BinRegex::Concat(rs) => rs.iter().all(bin_nullable),
        BinRegex::Alt(rs) => rs.iter().any(bin_nullable),
    }
}

fn bin_derive(r: &BinRegex, b: bool) -> BinRegex {
    match r {
        BinRegex::Empty | BinRegex::Epsilon => BinRegex::Empty,
        BinRegex::Bit(x) if *x == b => BinRegex::Epsilon,
        BinRegex::Bit(_) => BinRegex::Empty,
        BinRegex::Concat(rs) => match rs.split_first() {
            None => BinRegex::Empty,
            Some((head, tail)) => {
                let tail = match tail {
                    [] => BinRegex::Epsilon,
                    [one] => one.clone(),
                    _ => BinRegex::Concat(tail.to_vec()),
                };
                let first = bin_concat(bin_derive(head, b), tail.clone());
                if bin_nullable(head) {
                    bin_alt(first, bin_derive(&tail, b))
                } else {
                    first
                }
            }
        },
        BinRegex::Alt(rs) => rs.iter().map(|r| bin_derive(r, b)).fold(BinRegex::Empty, bin_alt),
        BinRegex::Star(inner) => bin_concat(bin_derive(inner, b), r.clone()),
    }
}

fn bin_concat(a: BinRegex, b: BinRegex) -> BinRegex {
    match (a, b) {
        (BinRegex::Empty, _) | (_, BinRegex::Empty) => BinRegex::Empty,
        (BinRegex::Epsilon, x) | (x, BinRegex::Epsilon) => x,
        (a, b) => BinRegex::Concat(vec![a, b]),
    }
}

fn bin_alt(a: BinRegex, b: BinRegex) -> BinRegex {
    match (a, b) {
        (BinRegex::Empty, x) | (x, BinRegex::Empty) => x,
        (a, b) if a == b => a,
        (a, b) => BinRegex::Alt(vec![a, b]),
    }
}

/// Bitmask of the word lengths (< 128) in `L(r)`.
fn lengths(r: &BinRegex) -> u128 {
    match r {
        BinRegex::Empty => 0,
        BinRegex::Epsilon => 1,
        BinRegex::Bit(_) => 2,
        BinRegex::Concat(rs) => rs.iter().fold(1, |acc, r| sumset(acc, lengths(r))),
        BinRegex::Alt(rs) => rs.iter().fold(0, |acc, r| acc | lengths(r)),
        BinRegex::Star(inner) => {
            let step = lengths(inner) & !1;
            let mut acc: u128 = 1;
            loop {
                let next = acc | sumset(acc, step);
                if next == acc {
                    return acc;
                }
                acc = next;
            }
        }
    }
}

fn sumset(a: u128, b: u128) -> u128 {
    (0..128).filter(|i| b >> i & 1 == 1).fold(0, |acc, i| acc | a << i)
}

/// All words of length `k` in `L(r)` (`k < 128`), by derivative search.
pub fn bin_words(r: &BinRegex, k: usize) -> Vec<Vec<bool>> {
    fn go(r: &BinRegex, k: usize, prefix: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if k == 0 {
            if bin_nullable(r) {
                out.push(prefix.clone());
            }
            return;
        }
        for b in [false, true] {
            let d = bin_derive(r, b);
            if lengths(&d) >> (k - 1) & 1 == 1 {
                prefix.push(b);
                go(&d, k - 1, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(r, k, &mut Vec::new(), &mut out);
    out
}

/// Range selection by direct indexing. A range without exactly one word
/// for the sequence length selects nothing.
pub fn naive_select<T: Copy>(seq: &[T], range: &Range) -> Vec<T> {
    let n = seq.len();
    let keep: Vec<bool> = match range {
        Range::Star => vec![true; n],
        Range::Index(i) => (0..n).map(|k| k == *i).collect(),
        Range::Interval(lo, hi) => (0..n).map(|k| *lo <= k && k <= *hi).collect(),
        Range::Union(spans) => (0..n).map(|k| spans.iter().any(|s| s.lo <= k && k <= s.hi)).collect(),
        Range::Last => (0..n).map(|k| k + 1 == n).collect(),
        Range::Raw(raw) => match bin_words(raw.regex(), n).as_slice() {
            [w] => w.clone(),
            _ => vec![false; n],
        },
    };
    seq.iter().zip(keep).filter(|(_, k)| *k).map(|(x, _)| *x).collect()
}

fn subelem_range(t: &DocTree, v: NodeId, pi: &PathRegex, rho: &Range) -> Vec<NodeId> {
    let all: Vec<NodeId> = naive_subelem(t, v, pi).into_iter().collect();
    naive_select(&all, rho)
}

fn txt(t: &DocTree, v: NodeId) -> String {
    let mut s = String::new();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        if let Some(text) = t.text(u) {
            s.push_str(text);
        }
        stack.extend(t.children(u).iter().rev());
    }
    s
}

/// The RPN semantics, evaluated at the document root.
pub fn naive_rpn(w: &Rpn, t: &DocTree) -> ComplexObject {
    rpn_at(w, t, t.root())
}

fn rpn_at(w: &Rpn, t: &DocTree, v: NodeId) -> ComplexObject {
    match w {
        Rpn::Txt => ComplexObject::set([ComplexObject::Str(txt(t, v))]),
        Rpn::Record(es) => ComplexObject::set([ComplexObject::Record(es.iter().map(|e| rpn_at(e, t, v)).collect())]),
        Rpn::Chain(p, rest) => {
            let mut items = Vec::new();
            for u in patom_nodes(p, t, v) {
                if let ComplexObject::Set(xs) = rpn_at(rest, t, u) {
                    items.extend(xs);
                }
            }
            ComplexObject::set(items)
        }
    }
}

fn patom_nodes(p: &Patom, t: &DocTree, v: NodeId) -> Vec<NodeId> {
    subelem_range(t, v, &p.path, &p.range)
        .into_iter()
        .filter(|&u| p.conds.iter().all(|c| cond_at(c, t, u)))
        .collect()
}

fn cond_at(c: &Cond, t: &DocTree, v: NodeId) -> bool {
    match c {
        Cond::TxtEq(s) => txt(t, v) == *s,
        Cond::Chain(p, rest) => patom_nodes(p, t, v).into_iter().any(|u| cond_at(rest, t, u)),
    }
}

/// The `i`-th (0-based) element of `v` by the first-order chain
/// definition: a minimal `y0`, then immediate successors.
pub fn r_index(v: &BTreeSet<NodeId>, i: usize) -> Option<NodeId> {
    let mut cur = v.iter().copied().find(|&y| !v.iter().any(|&z| z < y))?;
    for _ in 0..i {
        cur = v.iter().copied().find(|&y| cur < y && !v.iter().any(|&z| cur < z && z < y))?;
    }
    Some(cur)
}

fn r_range(v: BTreeSet<NodeId>, rho: &Range) -> Vec<NodeId> {
    match rho {
        Range::Index(i) => r_index(&v, *i).into_iter().collect(),
        _ => naive_select(&v.into_iter().collect::<Vec<_>>(), rho),
    }
}

/// Variable-free HEL: conditions filter the path matches, then the range
/// picks among the survivors. Condition paths are existential.
pub fn naive_helvf(w: &VfStatement, t: &DocTree) -> ComplexObject {
    cc_at(&w.cc, t, t.root(), false)
}

/// The cut reading: a match is kept only if every match up to and
/// including it satisfies the cut-marked conditions.
pub fn naive_helvf_cut(w: &VfStatement, t: &DocTree) -> ComplexObject {
    cc_at(&w.cc, t, t.root(), true)
}

fn cc_at(cc: &Cc<VfPatom>, t: &DocTree, v: NodeId, cut: bool) -> ComplexObject {
    fn go(ps: &[VfPatom], cc: &Cc<VfPatom>, t: &DocTree, v: NodeId, cut: bool, items: &mut Vec<ComplexObject>) {
        match ps.split_first() {
            None => items.push(match cc {
                Cc::Txt(_) => ComplexObject::Str(txt(t, v)),
                Cc::Record(_, es) => ComplexObject::Record(es.iter().map(|e| cc_at(e, t, v, cut)).collect()),
            }),
            Some((p, rest)) => {
                for u in hel_nodes(p, t, v, cut) {
                    go(rest, cc, t, u, cut, items);
                }
            }
        }
    }
    let mut items = Vec::new();
    go(cc.pseq(), cc, t, v, cut, &mut items);
    ComplexObject::set(items)
}

fn hel_nodes(p: &VfPatom, t: &DocTree, v: NodeId, cut: bool) -> Vec<NodeId> {
    let matches = naive_subelem(t, v, &p.path());
    let c = |z: NodeId| p.conds.iter().all(|c| hel_cond(c, t, z));
    let c_cut = |z: NodeId| p.conds.iter().filter(|c| c.cut).all(|c| hel_cond(c, t, z));
    let kept: BTreeSet<NodeId> = matches
        .iter()
        .copied()
        .filter(|&z| c(z) && (!cut || matches.iter().filter(|&&x| x <= z).all(|&x| c_cut(x))))
        .collect();
    r_range(kept, p.range())
}

fn hel_cond(c: &VfCond, t: &DocTree, v: NodeId) -> bool {
    let mut reached = BTreeSet::from([v]);
    for p in &c.pseq {
        reached = reached.iter().flat_map(|&u| subelem_range(t, u, &p.path(), p.range())).collect();
    }
    reached.iter().any(|&u| txt(t, u) == c.text)
}

/// Whether the top element has an even number of children.
pub fn parity_oracle(t: &DocTree) -> bool {
    let top = if t.label(t.root()).is_reserved() { t.children(t.root()).first().copied() } else { Some(t.root()) };
    top.is_none_or(|v| t.children(v).len().is_multiple_of(2))
}
