//! Seeded generators for documents, path expressions and statements.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wrapcore::doctree::{DocTree, NodeId, Tag, TreeBuilder};
use wrapcore::hel::{Cc, Step, VfCond, VfPatom, VfStatement};
use wrapcore::pathrange::{PathRegex, Range};
use wrapcore::rpn::{Cond, Patom, Rpn};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug)]
pub struct TreeGenSpec {
    pub seed: u64,
    /// Including the `#doc` root.
    pub max_nodes: usize,
    pub tags: Vec<String>,
    pub texts: Vec<String>,
    pub max_fanout: usize,
    pub max_depth: usize,
}

impl Default for TreeGenSpec {
    fn default() -> Self {
        TreeGenSpec {
            seed: 0,
            max_nodes: 30,
            tags: ["a", "b", "c"].map(String::from).to_vec(),
            texts: ["x", "y"].map(String::from).to_vec(),
            max_fanout: 4,
            max_depth: 5,
        }
    }
}

/// A document with at most `max_nodes` nodes: a `#doc` root and, if room
/// remains, one top element. Text leaves are nonempty and never adjacent.
pub fn gen_tree(spec: &TreeGenSpec) -> DocTree {
    gen_tree_with(&mut rng(spec.seed), spec)
}

pub fn gen_tree_with(rng: &mut impl Rng, spec: &TreeGenSpec) -> DocTree {
    let mut b = TreeBuilder::new();
    let mut budget = spec.max_nodes.saturating_sub(1);
    if budget > 0 {
        budget -= 1;
        b.open(Tag::new(spec.tags.choose(rng).expect("tags")));
        fill(rng, spec, &mut b, &mut budget, 1);
    }
    b.finish()
}

fn fill(rng: &mut impl Rng, spec: &TreeGenSpec, b: &mut TreeBuilder, budget: &mut usize, depth: usize) {
    let fanout = rng.gen_range(0..=spec.max_fanout);
    let mut last_text = false;
    for _ in 0..fanout {
        if *budget == 0 {
            break;
        }
        *budget -= 1;
        let text = !last_text && !spec.texts.is_empty() && (depth >= spec.max_depth || rng.gen_bool(0.3));
        if text {
            b.text(spec.texts.choose(rng).expect("texts"));
        } else {
            b.open(Tag::new(spec.tags.choose(rng).expect("tags")));
            if depth < spec.max_depth {
                fill(rng, spec, b, budget, depth + 1);
            }
            b.close();
        }
        last_text = text;
    }
}

/// A random path expression of nesting depth at most `depth` over `tags`.
pub fn gen_path(rng: &mut impl Rng, tags: &[String], depth: usize) -> PathRegex {
    let leaf = |rng: &mut dyn rand::RngCore| -> PathRegex {
        match rng.gen_range(0..10) {
            0..=4 => PathRegex::tag(tags.choose(rng).expect("tags")),
            5 | 6 => PathRegex::Any,
            7 => PathRegex::AnyExcept(vec![Tag::new(tags.choose(rng).expect("tags"))]),
            8 => PathRegex::Tag(Tag::text()),
            _ => {
                if rng.gen_bool(0.5) {
                    PathRegex::Epsilon
                } else {
                    PathRegex::Empty
                }
            }
        }
    };
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    match rng.gen_range(0..3) {
        0 => PathRegex::Concat((0..rng.gen_range(2..=3)).map(|_| gen_path(rng, tags, depth - 1)).collect()),
        1 => PathRegex::Alt((0..2).map(|_| gen_path(rng, tags, depth - 1)).collect()),
        _ => PathRegex::Star(Box::new(gen_path(rng, tags, depth - 1))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StmtLanguage {
    Rpn,
    HelVf,
}

#[derive(Clone, Debug)]
pub struct StmtGenSpec {
    pub seed: u64,
    pub language: StmtLanguage,
    /// Longest patom sequence (HEL) before `.txt` or a record.
    pub max_chain: usize,
    /// Nesting depth bound; for RPN this is [`Rpn::depth`].
    pub max_depth: usize,
    pub ranges: Vec<Range>,
    pub cond_prob: f64,
    /// Probability that a HEL condition carries the cut mark.
    pub cut_prob: f64,
    pub tags: Vec<String>,
    pub texts: Vec<String>,
}

impl StmtGenSpec {
    pub fn new(language: StmtLanguage) -> Self {
        StmtGenSpec {
            seed: 0,
            language,
            max_chain: 3,
            max_depth: 3,
            ranges: default_ranges(),
            cond_prob: 0.4,
            cut_prob: 0.0,
            tags: ["a", "b", "c"].map(String::from).to_vec(),
            texts: ["x", "y", "xy"].map(String::from).to_vec(),
        }
    }
}

/// Star-heavy pool with indexes, intervals, a union, `last` and raw ranges.
pub fn default_ranges() -> Vec<Range> {
    let mut out = vec![Range::Star, Range::Star, Range::Star];
    for src in ["0", "1", "0-1", "1-2", "0,2-3", "last", "regex:10*", "regex:0*10"] {
        out.push(Range::parse(src).expect("pool range parses"));
    }
    out
}

/// Ranges whose selection on a prefix of a sequence is a prefix of the
/// selection on the whole sequence.
pub fn prefix_stable_ranges() -> Vec<Range> {
    let mut out = vec![Range::Star, Range::Star];
    for src in ["0", "1", "0-1", "1-2", "0,2-3"] {
        out.push(Range::parse(src).expect("pool range parses"));
    }
    out
}

fn pick_range(rng: &mut impl Rng, spec: &StmtGenSpec) -> Range {
    spec.ranges.choose(rng).cloned().unwrap_or(Range::Star)
}

fn pick_text(rng: &mut impl Rng, spec: &StmtGenSpec) -> String {
    spec.texts.choose(rng).cloned().unwrap_or_default()
}

fn rpn_path(rng: &mut impl Rng, spec: &StmtGenSpec) -> PathRegex {
    let t = spec.tags.choose(rng).expect("tags");
    match rng.gen_range(0..10) {
        0..=4 => PathRegex::tag(t),
        5 | 6 => PathRegex::descendant(t),
        7 => PathRegex::Any,
        8 => PathRegex::Alt(vec![PathRegex::tag(t), PathRegex::tag(spec.tags.choose(rng).expect("tags"))]),
        _ => PathRegex::Concat(vec![PathRegex::Any, PathRegex::tag(t)]),
    }
}

pub fn gen_rpn(spec: &StmtGenSpec) -> Rpn {
    gen_rpn_with(&mut rng(spec.seed), spec)
}

/// A statement with `depth() <= spec.max_depth`.
pub fn gen_rpn_with(rng: &mut impl Rng, spec: &StmtGenSpec) -> Rpn {
    rpn_expr(rng, spec, spec.max_depth)
}

fn rpn_expr(rng: &mut impl Rng, spec: &StmtGenSpec, d: usize) -> Rpn {
    if d == 0 {
        return Rpn::Txt;
    }
    match rng.gen_range(0..10) {
        0 => Rpn::Txt,
        1 | 2 => Rpn::Record((0..rng.gen_range(2..=3)).map(|_| rpn_expr(rng, spec, d - 1)).collect()),
        _ => {
            let p = rpn_patom(rng, spec, d - 1);
            Rpn::Chain(p, Box::new(rpn_expr(rng, spec, d - 1)))
        }
    }
}

/// A patom whose conditions have depth at most `d`.
fn rpn_patom(rng: &mut impl Rng, spec: &StmtGenSpec, d: usize) -> Patom {
    let mut p = Patom::new(rpn_path(rng, spec)).with_range(pick_range(rng, spec));
    if d >= 1 && rng.gen_bool(spec.cond_prob) {
        for _ in 0..rng.gen_range(1..=2) {
            p.conds.push(rpn_cond(rng, spec, d));
        }
    }
    p
}

fn rpn_cond(rng: &mut impl Rng, spec: &StmtGenSpec, d: usize) -> Cond {
    if d <= 1 || rng.gen_bool(0.3) {
        return Cond::TxtEq(pick_text(rng, spec));
    }
    let p = rpn_patom(rng, spec, d - 1);
    Cond::Chain(p, Box::new(rpn_cond(rng, spec, d - 1)))
}

pub fn gen_vf(spec: &StmtGenSpec) -> VfStatement {
    gen_vf_with(&mut rng(spec.seed), spec)
}

/// A variable-free HEL statement whose records nest at most
/// `spec.max_depth` deep.
pub fn gen_vf_with(rng: &mut impl Rng, spec: &StmtGenSpec) -> VfStatement {
    VfStatement { cc: vf_cc(rng, spec, spec.max_depth) }
}

fn vf_cc(rng: &mut impl Rng, spec: &StmtGenSpec, d: usize) -> Cc<VfPatom> {
    let len = rng.gen_range(1..=spec.max_chain.max(1));
    let ps: Vec<VfPatom> = (0..len).map(|i| vf_patom(rng, spec, i > 0, true)).collect();
    if d > 0 && rng.gen_bool(0.25) {
        Cc::Record(ps, (0..rng.gen_range(2..=3)).map(|_| vf_cc(rng, spec, d - 1)).collect())
    } else {
        Cc::Txt(ps)
    }
}

fn vf_patom(rng: &mut impl Rng, spec: &StmtGenSpec, may_descend: bool, with_conds: bool) -> VfPatom {
    let step = if may_descend && rng.gen_bool(0.3) { Step::Descendant } else { Step::Child };
    let mut p = VfPatom::new(step, spec.tags.choose(rng).expect("tags"));
    let range = pick_range(rng, spec);
    if !range.is_star() || rng.gen_bool(0.2) {
        p.range = Some(range);
    }
    if with_conds && rng.gen_bool(spec.cond_prob) {
        for _ in 0..rng.gen_range(1..=2) {
            let len = rng.gen_range(0..=2);
            let pseq = (0..len).map(|i| vf_patom(rng, spec, i > 0, false)).collect();
            let cut = rng.gen_bool(spec.cut_prob);
            p.conds.push(VfCond { cut, pseq, text: pick_text(rng, spec) });
        }
    }
    p
}

/// Picks a node uniformly.
pub fn pick_node(rng: &mut impl Rng, t: &DocTree) -> NodeId {
    NodeId::new(rng.gen_range(0..t.len()))
}
