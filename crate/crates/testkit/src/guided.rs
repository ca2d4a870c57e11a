//! Documents grown from the paths a statement walks.
//!
//! Uniform random trees rarely contain a five-step path such as
//! `html.body.table.tr.td`, so differential runs on them exercise little
//! more than the empty result. A guided tree samples a word from each patom
//! path, realizes it below the current node (sometimes reusing an existing
//! child with the same tag), and recurses into conditions and the rest of
//! the statement. Random noise siblings then disturb positions.

use std::cell::Cell;

use rand::seq::SliceRandom;
use rand::Rng;
use wrapcore::doctree::{DocTree, Tag, TreeBuilder};
use wrapcore::hel::{Cc, Step, VfPatom, VfStatement};
use wrapcore::pathrange::PathRegex;
use wrapcore::rpn::{Cond, Rpn};

use crate::gen::TreeGenSpec;

#[derive(Clone, Copy, Debug)]
pub enum Guide<'a> {
    Rpn(&'a Rpn),
    Vf(&'a VfStatement),
}

#[derive(Debug)]
enum Sketch {
    Elem(Tag, Vec<Sketch>),
    Text(String),
}

struct Ctx<'a> {
    spec: &'a TreeGenSpec,
    /// Nodes that may still be created.
    budget: Cell<usize>,
}

impl Ctx<'_> {
    fn take(&self) -> bool {
        let b = self.budget.get();
        self.budget.set(b.saturating_sub(1));
        b > 0
    }

    fn text<R: Rng>(&self, rng: &mut R) -> String {
        self.spec.texts.choose(rng).cloned().unwrap_or_else(|| "x".to_string())
    }

    fn tag<R: Rng>(&self, rng: &mut R) -> Tag {
        Tag::new(self.spec.tags.choose(rng).map_or("z", String::as_str))
    }
}

type Cont<'k, R> = &'k mut dyn FnMut(&mut R, &mut Vec<Sketch>);

/// A document shaped by `guides`, with at most about `spec.max_nodes`
/// nodes. Tags and texts for wildcards and noise come from `spec`.
pub fn gen_guided_tree<R: Rng>(rng: &mut R, guides: &[Guide<'_>], spec: &TreeGenSpec) -> DocTree {
    let g = Ctx { spec, budget: Cell::new(spec.max_nodes.saturating_sub(1)) };
    let mut top = Vec::new();
    for guide in guides {
        for _ in 0..rng.gen_range(1..=2) {
            match guide {
                Guide::Rpn(w) => grow_rpn(rng, &g, &mut top, w),
                Guide::Vf(w) => grow_cc(rng, &g, &mut top, &w.cc),
            }
        }
    }
    for child in &mut top {
        noise(rng, &g, child);
    }
    let mut b = TreeBuilder::new();
    emit(&mut b, &top);
    b.finish()
}

/// A random word of `L(r)` over the spec's tags; `None` if the sample hit
/// the empty language.
fn sample_word<R: Rng>(rng: &mut R, g: &Ctx<'_>, r: &PathRegex) -> Option<Vec<Tag>> {
    Some(match r {
        PathRegex::Empty => return None,
        PathRegex::Epsilon => Vec::new(),
        PathRegex::Tag(t) => vec![t.clone()],
        PathRegex::Any => vec![g.tag(rng)],
        PathRegex::AnyExcept(ex) => {
            let allowed: Vec<&String> = g.spec.tags.iter().filter(|t| !ex.iter().any(|e| e.as_str() == *t)).collect();
            vec![Tag::new(allowed.choose(rng).map_or("z", |t| t.as_str()))]
        }
        PathRegex::Concat(rs) => {
            let mut w = Vec::new();
            for r in rs {
                w.extend(sample_word(rng, g, r)?);
            }
            w
        }
        PathRegex::Alt(rs) => {
            let mut order: Vec<&PathRegex> = rs.iter().collect();
            order.shuffle(rng);
            return order.into_iter().find_map(|r| sample_word(rng, g, r));
        }
        PathRegex::Star(r) => {
            let mut w = Vec::new();
            for _ in 0..rng.gen_range(0..=2) {
                w.extend(sample_word(rng, g, r).unwrap_or_default());
            }
            w
        }
    })
}

/// Realizes `word` below the node owning `children` and runs `k` at its
/// end. A text label ends the word with a text leaf. With `reuse`, an
/// existing child with the right tag may be followed instead of a new one.
fn attach<R: Rng>(
    rng: &mut R,
    g: &Ctx<'_>,
    children: &mut Vec<Sketch>,
    word: &[Tag],
    reuse: bool,
    k: Cont<'_, R>,
) {
    let Some((t, rest)) = word.split_first() else {
        return k(rng, children);
    };
    if t.is_reserved() {
        if g.take() {
            children.push(Sketch::Text(g.text(rng)));
        }
        return;
    }
    let existing = children.iter().rposition(|c| matches!(c, Sketch::Elem(u, _) if u == t)).filter(|_| reuse);
    let i = match existing {
        Some(i) if rng.gen_bool(0.5) || g.budget.get() == 0 => i,
        _ if g.take() => {
            children.push(Sketch::Elem(t.clone(), Vec::new()));
            children.len() - 1
        }
        _ => return,
    };
    if let Sketch::Elem(_, cs) = &mut children[i] {
        attach(rng, g, cs, rest, reuse, k);
    }
}

fn push_text<R: Rng>(rng: &mut R, g: &Ctx<'_>, children: &mut Vec<Sketch>, wanted: Option<&str>) {
    if g.take() {
        let s = match wanted {
            Some(s) if rng.gen_bool(0.6) => s.to_string(),
            _ => g.text(rng),
        };
        children.push(Sketch::Text(s));
    }
}

fn grow_rpn<R: Rng>(rng: &mut R, g: &Ctx<'_>, children: &mut Vec<Sketch>, w: &Rpn) {
    match w {
        Rpn::Txt => {
            if rng.gen_bool(0.8) {
                push_text(rng, g, children, None);
            }
        }
        Rpn::Record(es) => es.iter().for_each(|e| grow_rpn(rng, g, children, e)),
        Rpn::Chain(p, rest) => {
            for _ in 0..rng.gen_range(1..=2) {
                let Some(word) = sample_word(rng, g, &p.path) else { return };
                attach(rng, g, children, &word, true, &mut |rng, cs| {
                    for c in &p.conds {
                        if rng.gen_bool(0.7) {
                            grow_cond(rng, g, cs, c);
                        }
                    }
                    grow_rpn(rng, g, cs, rest);
                });
            }
        }
    }
}

fn grow_cond<R: Rng>(rng: &mut R, g: &Ctx<'_>, children: &mut Vec<Sketch>, c: &Cond) {
    match c {
        Cond::TxtEq(s) => push_text(rng, g, children, Some(s)),
        Cond::Chain(p, rest) => {
            if let Some(word) = sample_word(rng, g, &p.path) {
                attach(rng, g, children, &word, false, &mut |rng, cs| grow_cond(rng, g, cs, rest));
            }
        }
    }
}

fn step_word<R: Rng>(rng: &mut R, g: &Ctx<'_>, p: &VfPatom) -> Vec<Tag> {
    let mut w = Vec::new();
    if p.step == Step::Descendant {
        for _ in 0..rng.gen_range(0..=1) {
            w.push(g.tag(rng));
        }
    }
    w.push(p.tag.clone());
    w
}

fn grow_cc<R: Rng>(rng: &mut R, g: &Ctx<'_>, children: &mut Vec<Sketch>, cc: &Cc<VfPatom>) {
    grow_pseq(rng, g, children, cc.pseq(), true, &mut |rng, cs| match cc {
        Cc::Txt(_) => {
            if rng.gen_bool(0.8) {
                push_text(rng, g, cs, None);
            }
        }
        Cc::Record(_, es) => es.iter().for_each(|e| grow_cc(rng, g, cs, e)),
    });
}

/// Condition paths (`reuse == false`) get fresh nodes, so that the
/// wanted text is the whole text value of the node it lands on.
fn grow_pseq<R: Rng>(
    rng: &mut R,
    g: &Ctx<'_>,
    children: &mut Vec<Sketch>,
    ps: &[VfPatom],
    reuse: bool,
    k: Cont<'_, R>,
) {
    let Some((p, rest)) = ps.split_first() else {
        return k(rng, children);
    };
    let copies = if reuse { rng.gen_range(1..=2) } else { 1 };
    for _ in 0..copies {
        let word = step_word(rng, g, p);
        attach(rng, g, children, &word, reuse, &mut |rng, cs| {
            for c in &p.conds {
                if rng.gen_bool(0.7) {
                    let text = c.text.as_str();
                    grow_pseq(rng, g, cs, &c.pseq, false, &mut |rng, ds| push_text(rng, g, ds, Some(text)));
                }
            }
            grow_pseq(rng, g, cs, rest, reuse, &mut *k);
        });
    }
}

/// Inserts random leaves and text at random positions.
fn noise<R: Rng>(rng: &mut R, g: &Ctx<'_>, node: &mut Sketch) {
    let Sketch::Elem(_, children) = node else { return };
    for c in children.iter_mut() {
        noise(rng, g, c);
    }
    if rng.gen_bool(0.25) && g.take() {
        let at = rng.gen_range(0..=children.len());
        let leaf = if rng.gen_bool(0.3) {
            Sketch::Text(g.text(rng))
        } else {
            let inner = if rng.gen_bool(0.5) && g.take() { vec![Sketch::Text(g.text(rng))] } else { Vec::new() };
            Sketch::Elem(g.tag(rng), inner)
        };
        children.insert(at, leaf);
    }
}

fn emit(b: &mut TreeBuilder, nodes: &[Sketch]) {
    for n in nodes {
        match n {
            Sketch::Text(s) => {
                b.text(s);
            }
            Sketch::Elem(t, cs) => {
                b.open(t.clone());
                emit(b, cs);
                b.close();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{DIVERGENCE, EXAMPLE_3_3};
    use crate::gen::rng;
    use wrapcore::hel::eval_vf;
    use wrapcore::rpn::eval_rpn;

    fn spec() -> TreeGenSpec {
        TreeGenSpec { max_nodes: 40, tags: vec!["td".into(), "tr".into()], texts: vec!["item".into(), "x".into()], ..TreeGenSpec::default() }
    }

    #[test]
    fn guided_trees_reach_deep_paths() {
        let w = Rpn::parse(EXAMPLE_3_3).unwrap();
        let mut r = rng(1);
        let hits = (0..100)
            .filter(|_| {
                let t = gen_guided_tree(&mut r, &[Guide::Rpn(&w)], &spec());
                assert!(t.len() <= 40, "{}", t.len());
                !eval_rpn(&w, &t).is_empty_set()
            })
            .count();
        assert!(hits > 30, "only {hits} of 100 guided trees give a result");
    }

    #[test]
    fn guided_trees_expose_the_range_divergence() {
        let a = Rpn::parse(DIVERGENCE).unwrap();
        let b = VfStatement::parse(DIVERGENCE).unwrap();
        let mut r = rng(2);
        let found = (0..200).any(|_| {
            let t = gen_guided_tree(&mut r, &[Guide::Rpn(&a), Guide::Vf(&b)], &spec());
            eval_rpn(&a, &t) != eval_vf(&b, &t)
        });
        assert!(found);
    }

    #[test]
    fn words_come_from_the_language() {
        let g = Ctx { spec: &spec(), budget: Cell::new(0) };
        let r = PathRegex::parse("a.(b|c)*.^td").unwrap();
        let mut rn = rng(3);
        for _ in 0..50 {
            let w = sample_word(&mut rn, &g, &r).unwrap();
            assert_eq!(w[0].as_str(), "a");
            assert_ne!(w.last().unwrap().as_str(), "td");
        }
        assert_eq!(sample_word(&mut rn, &g, &PathRegex::Empty), None);
    }
}
