//! Stratified semi-naive fixpoint evaluation.
//!
//! Rule bodies only read pattern predicates through `p(_,X)`, so a rule's
//! output depends on the projections of the predicates it references. Within
//! a recursive stratum, each round re-derives only what a new projection
//! element can affect.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::doctree::{DocTree, NodeId, Tag};
use crate::pathrange::{select, subelem, PathAutomaton, Range};

use super::ast::{Anchor, Condition, ElogProgram, Parent, Rule};
use super::ElogError;

/// Derived atoms. Binary atoms `p(v0,v)`; predicates defined by
/// `dom(X0,X)` rules are stored unary, as `p(_,v)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomStore {
    pairs: BTreeMap<String, BTreeSet<(NodeId, NodeId)>>,
    unary: BTreeMap<String, BTreeSet<NodeId>>,
    /// Parent predicates of the rules that produced each predicate.
    parents: BTreeMap<String, BTreeSet<String>>,
}

impl AtomStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, pred: &str, v0: NodeId, v: NodeId) -> bool {
        self.pairs.entry(pred.to_string()).or_default().insert((v0, v))
    }

    pub fn insert_unary(&mut self, pred: &str, v: NodeId) -> bool {
        self.unary.entry(pred.to_string()).or_default().insert(v)
    }

    pub fn contains(&self, pred: &str, v0: NodeId, v: NodeId) -> bool {
        self.pairs.get(pred).is_some_and(|s| s.contains(&(v0, v)))
    }

    pub fn contains_unary(&self, pred: &str, v: NodeId) -> bool {
        self.unary.get(pred).is_some_and(|s| s.contains(&v))
    }

    /// Binary atoms of `pred`, sorted.
    pub fn pairs(&self, pred: &str) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.pairs.get(pred).into_iter().flatten().copied()
    }

    /// Nodes `w` with `pred(v0, w)`, in document order.
    pub fn targets(&self, pred: &str, v0: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.pairs
            .get(pred)
            .into_iter()
            .flat_map(move |s| s.range((v0, NodeId::ROOT)..).take_while(move |(a, _)| *a == v0))
            .map(|&(_, w)| w)
    }

    pub fn unary(&self, pred: &str) -> impl Iterator<Item = NodeId> + '_ {
        self.unary.get(pred).into_iter().flatten().copied()
    }

    /// Predicates with at least one binary atom.
    pub fn binary_predicates(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().filter(|(_, s)| !s.is_empty()).map(|(p, _)| p.as_str())
    }

    /// Predicates with at least one unary atom.
    pub fn unary_predicates(&self) -> impl Iterator<Item = &str> {
        self.unary.iter().filter(|(_, s)| !s.is_empty()).map(|(p, _)| p.as_str())
    }

    pub fn count(&self, pred: &str) -> usize {
        self.pairs.get(pred).map_or(0, BTreeSet::len) + self.unary.get(pred).map_or(0, BTreeSet::len)
    }

    pub fn len(&self) -> usize {
        self.pairs.values().map(BTreeSet::len).sum::<usize>() + self.unary.values().map(BTreeSet::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn parents(&self, pred: &str) -> Option<&BTreeSet<String>> {
        self.parents.get(pred)
    }

    pub fn set_parents(&mut self, pred: &str, parents: BTreeSet<String>) {
        self.parents.insert(pred.to_string(), parents);
    }

    /// Same atoms, regardless of provenance.
    pub fn same_atoms(&self, other: &AtomStore) -> bool {
        let strip = |s: &AtomStore| {
            let mut s = s.clone();
            s.parents.clear();
            s.pairs.retain(|_, v| !v.is_empty());
            s.unary.retain(|_, v| !v.is_empty());
            s
        };
        strip(self) == strip(other)
    }

    /// One atom per line, `p(v0,v)` or `p(_,v)`, sorted as strings.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self
            .pairs
            .iter()
            .flat_map(|(p, s)| s.iter().map(move |(a, b)| format!("{p}({a},{b})")))
            .chain(self.unary.iter().flat_map(|(p, s)| s.iter().map(move |v| format!("{p}(_,{v})"))))
            .collect();
        lines.sort();
        lines.into_iter().map(|l| l + "\n").collect()
    }
}

/// `Q_p`: projection of `p` on its second argument.
pub fn unary_query(store: &AtomStore, pred: &str) -> BTreeSet<NodeId> {
    store.pairs(pred).map(|(_, v)| v).chain(store.unary(pred)).collect()
}

/// Evaluates `program` on `t` to its least fixpoint, stratum by stratum.
pub fn eval_fixpoint(program: &ElogProgram, t: &DocTree) -> Result<AtomStore, ElogError> {
    program.validate()?;
    let strata = stratify(program)?;
    let mut ev = Evaluator::new(program, t);
    for (preds, recursive) in &strata {
        let rules: Vec<usize> = ev
            .rules
            .iter()
            .enumerate()
            .filter(|(_, r)| preds.contains(&r.head))
            .map(|(i, _)| i)
            .collect();
        log::debug!("stratum {preds:?} ({} rules, recursive: {recursive})", rules.len());
        if *recursive {
            ev.run_recursive(&rules, preds);
        } else {
            for &i in &rules {
                ev.derive_full(i, None);
            }
        }
    }
    let mut store = ev.store;
    for (head, parents) in program.parents() {
        store.set_parents(&head, parents);
    }
    Ok(store)
}

/// Strongly connected components of the dependency graph, dependencies
/// first, each flagged recursive or not.
fn stratify(program: &ElogProgram) -> Result<Vec<(Vec<String>, bool)>, ElogError> {
    let mut g: DiGraph<&str, ()> = DiGraph::new();
    let mut idx: HashMap<&str, NodeIndex> = HashMap::new();
    for p in program.predicates() {
        idx.insert(p, g.add_node(p));
    }
    for r in &program.rules {
        for d in r.dependencies() {
            g.update_edge(idx[d], idx[r.head.as_str()], ());
        }
    }
    let mut out = Vec::new();
    for scc in tarjan_scc(&g).into_iter().rev() {
        let recursive = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
        let mut preds: Vec<String> = scc.iter().map(|&n| g[n].to_string()).collect();
        preds.sort();
        if recursive {
            if let Some(r) = program.rules.iter().find(|r| r.range.is_some() && preds.contains(&r.head)) {
                return Err(ElogError::NotStratified(r.head.clone()));
            }
        }
        out.push((preds, recursive));
    }
    Ok(out)
}

enum Lit {
    Contains { from: usize, to: usize, step: usize },
    Text { var: usize, text: String },
    FirstChild(usize, usize),
    NextSibling(usize, usize),
    LastSibling(usize),
    Leaf(usize),
    Label(usize, Tag),
    Root(usize),
    Ref { pred: String, var: usize },
}

struct CompiledRule {
    head: String,
    parent: Option<Parent>,
    step: Option<usize>,
    nvars: usize,
    /// Literals in evaluation order: each one has a bound variable when reached.
    lits: Vec<Lit>,
    refs: Vec<(String, usize)>,
    range: Option<Range>,
}

const X0: usize = 0;
const X: usize = 1;

/// Step results per (step, context node).
type StepCache = HashMap<(usize, NodeId), Rc<Vec<NodeId>>>;

struct Evaluator<'a> {
    t: &'a DocTree,
    rules: Vec<CompiledRule>,
    steps: Vec<(PathAutomaton, Range)>,
    cache: RefCell<StepCache>,
    /// Projection bitmaps per predicate.
    proj: HashMap<String, Vec<bool>>,
    store: AtomStore,
}

impl<'a> Evaluator<'a> {
    fn new(program: &ElogProgram, t: &'a DocTree) -> Self {
        let mut steps = Vec::new();
        let rules = program.rules.iter().map(|r| compile_rule(r, &mut steps)).collect();
        let proj = program.predicates().into_iter().map(|p| (p.to_string(), vec![false; t.len()])).collect();
        Evaluator { t, rules, steps, cache: RefCell::default(), proj, store: AtomStore::new() }
    }

    fn step_result(&self, step: usize, v0: NodeId) -> Rc<Vec<NodeId>> {
        if let Some(hit) = self.cache.borrow().get(&(step, v0)) {
            return hit.clone();
        }
        let (dfa, range) = &self.steps[step];
        let result = Rc::new(select(&subelem(self.t, v0, dfa), range));
        self.cache.borrow_mut().insert((step, v0), result.clone());
        result
    }

    fn in_proj(&self, pred: &str, v: NodeId) -> bool {
        self.proj.get(pred).is_some_and(|b| b[v.index()])
    }

    fn parent_holds(&self, parent: &Parent, v0: NodeId) -> bool {
        match parent {
            Parent::Root => v0 == self.t.root(),
            Parent::Dom => true,
            Parent::Pred(p) => self.in_proj(p, v0),
        }
    }

    fn parent_nodes(&self, parent: &Parent) -> Vec<NodeId> {
        self.t.nodes().filter(|&v| self.parent_holds(parent, v)).collect()
    }

    fn solve(&self, rule: &CompiledRule, assign: &mut [Option<NodeId>], k: usize) -> bool {
        let Some(lit) = rule.lits.get(k) else { return true };
        let t = self.t;
        let try_bind = |assign: &mut [Option<NodeId>], var: usize, cands: &mut dyn Iterator<Item = NodeId>| {
            for c in cands {
                assign[var] = Some(c);
                if self.solve(rule, assign, k + 1) {
                    assign[var] = None;
                    return true;
                }
            }
            assign[var] = None;
            false
        };
        let check = |ok: bool, assign: &mut [Option<NodeId>]| ok && self.solve(rule, assign, k + 1);
        let val = |v: usize, assign: &[Option<NodeId>]| assign[v].expect("planned literal has a bound variable");
        match *lit {
            Lit::Contains { from, to, step } => match (assign[from], assign[to]) {
                (Some(a), Some(b)) => check(self.step_result(step, a).binary_search(&b).is_ok(), assign),
                (Some(a), None) => try_bind(assign, to, &mut self.step_result(step, a).iter().copied()),
                (None, Some(b)) => try_bind(
                    assign,
                    from,
                    &mut t.ancestors_or_self(b).filter(|&a| self.step_result(step, a).binary_search(&b).is_ok()),
                ),
                (None, None) => unreachable!("plan binds one side first"),
            },
            Lit::FirstChild(a, b) => match (assign[a], assign[b]) {
                (Some(x), Some(y)) => check(t.first_child(x) == Some(y), assign),
                (Some(x), None) => try_bind(assign, b, &mut t.first_child(x).into_iter()),
                (None, Some(y)) => try_bind(
                    assign,
                    a,
                    &mut t.parent(y).filter(|&p| t.first_child(p) == Some(y)).into_iter(),
                ),
                (None, None) => unreachable!("plan binds one side first"),
            },
            Lit::NextSibling(a, b) => match (assign[a], assign[b]) {
                (Some(x), Some(y)) => check(t.next_sibling(x) == Some(y), assign),
                (Some(x), None) => try_bind(assign, b, &mut t.next_sibling(x).into_iter()),
                (None, Some(y)) => try_bind(assign, a, &mut t.prev_sibling(y).into_iter()),
                (None, None) => unreachable!("plan binds one side first"),
            },
            Lit::Text { var, ref text } => check(t.txt_eq(val(var, assign), text), assign),
            Lit::LastSibling(v) => check(t.is_last_sibling(val(v, assign)), assign),
            Lit::Leaf(v) => check(t.is_leaf(val(v, assign)), assign),
            Lit::Label(v, ref tag) => check(t.label(val(v, assign)) == tag, assign),
            Lit::Root(v) => check(t.is_root(val(v, assign)), assign),
            Lit::Ref { ref pred, var } => check(self.in_proj(pred, val(var, assign)), assign),
        }
    }

    fn body_holds(&self, rule: &CompiledRule, v0: Option<NodeId>, v: NodeId) -> bool {
        let mut assign = vec![None; rule.nvars];
        assign[X0] = v0;
        assign[X] = Some(v);
        self.solve(rule, &mut assign, 0)
    }

    /// Adds atoms; returns nodes newly entering the head's projection.
    fn add(&mut self, head: &str, v0: Option<NodeId>, vs: &[NodeId], fresh: &mut Vec<NodeId>) {
        let bits = self.proj.get_mut(head).expect("head predicate has a projection");
        for &v in vs {
            let added = match v0 {
                Some(v0) => self.store.insert(head, v0, v),
                None => self.store.insert_unary(head, v),
            };
            if added && !bits[v.index()] {
                bits[v.index()] = true;
                fresh.push(v);
            }
        }
    }

    /// Derives everything rule `i` yields, for all parents or just `only`.
    fn derive_full(&mut self, i: usize, only: Option<&[NodeId]>) -> Vec<NodeId> {
        let rule = &self.rules[i];
        let mut batches: Vec<(Option<NodeId>, Vec<NodeId>)> = Vec::new();
        match (&rule.parent, rule.step) {
            (Some(parent), Some(step)) => {
                let v0s = match only {
                    Some(v0s) => v0s.to_vec(),
                    None => self.parent_nodes(parent),
                };
                for v0 in v0s {
                    let mut s: Vec<NodeId> =
                        self.step_result(step, v0).iter().copied().filter(|&v| self.body_holds(rule, Some(v0), v)).collect();
                    if let Some(range) = &rule.range {
                        s = select(&s, range);
                    }
                    batches.push((Some(v0), s));
                }
            }
            _ => {
                let mut s: Vec<NodeId> = self.t.nodes().filter(|&v| self.body_holds(rule, None, v)).collect();
                if let Some(range) = &rule.range {
                    s = select(&s, range);
                }
                batches.push((None, s));
            }
        }
        let head = rule.head.clone();
        let mut fresh = Vec::new();
        for (v0, vs) in batches {
            self.add(&head, v0, &vs, &mut fresh);
        }
        fresh
    }

    /// Derivations of rule `i` that use a node of `delta` (no rule ranges here).
    fn derive_delta(&mut self, i: usize, delta: &BTreeMap<String, Vec<NodeId>>) -> Vec<NodeId> {
        let rule = &self.rules[i];
        let changed = |p: &str| delta.get(p).is_some_and(|d| !d.is_empty());
        let unary = rule.step.is_none();
        if unary || rule.refs.iter().any(|(p, var)| changed(p) && *var != X) {
            // unary rules are cheap enough to recheck on every node
            let any = rule.refs.iter().any(|(p, _)| changed(p));
            return if any || !unary { self.derive_full(i, None) } else { Vec::new() };
        }
        let (Some(parent), Some(step)) = (&rule.parent, rule.step) else { unreachable!() };
        let mut v0s: BTreeSet<NodeId> = BTreeSet::new();
        if let Parent::Pred(p) = parent {
            if changed(p) {
                v0s.extend(&delta[p]);
            }
        }
        let mut direct: Vec<(NodeId, NodeId)> = Vec::new();
        for (p, var) in &rule.refs {
            if !changed(p) {
                continue;
            }
            debug_assert_eq!(*var, X);
            for &v in &delta[p] {
                for a in self.t.ancestors_or_self(v) {
                    if self.parent_holds(parent, a)
                        && self.step_result(step, a).binary_search(&v).is_ok()
                        && self.body_holds(rule, Some(a), v)
                    {
                        direct.push((a, v));
                    }
                }
            }
        }
        let head = rule.head.clone();
        let mut fresh = Vec::new();
        for (a, v) in direct {
            self.add(&head, Some(a), &[v], &mut fresh);
        }
        let v0s: Vec<NodeId> = v0s.into_iter().collect();
        if !v0s.is_empty() {
            fresh.extend(self.derive_full(i, Some(&v0s)));
        }
        fresh
    }

    fn run_recursive(&mut self, rules: &[usize], preds: &[String]) {
        let mut delta: BTreeMap<String, Vec<NodeId>> = preds.iter().map(|p| (p.clone(), Vec::new())).collect();
        for &i in rules {
            let fresh = self.derive_full(i, None);
            delta.get_mut(&self.rules[i].head).expect("stratum head").extend(fresh);
        }
        let mut rounds = 1;
        while delta.values().any(|d| !d.is_empty()) {
            let mut next: BTreeMap<String, Vec<NodeId>> = preds.iter().map(|p| (p.clone(), Vec::new())).collect();
            for &i in rules {
                let fresh = self.derive_delta(i, &delta);
                next.get_mut(&self.rules[i].head).expect("stratum head").extend(fresh);
            }
            delta = next;
            rounds += 1;
        }
        log::debug!("recursive stratum {preds:?} reached its fixpoint after {rounds} rounds");
    }
}

fn compile_rule(rule: &Rule, steps: &mut Vec<(PathAutomaton, Range)>) -> CompiledRule {
    let vars = rule.vars();
    let var = |name: &str| vars.iter().position(|v| *v == name).expect("variable collected");
    let mut add_step = |path: &crate::pathrange::PathRegex, range: &Range| {
        steps.push((path.compile(), range.clone()));
        steps.len() - 1
    };
    let (parent, step) = match &rule.anchor {
        Anchor::Step { parent, path, range } => (Some(parent.clone()), Some(add_step(path, range))),
        Anchor::Dom => (None, None),
    };
    let mut pending: Vec<Lit> = rule
        .conds
        .iter()
        .map(|c| match c {
            Condition::Contains { from, to, path, range } => {
                Lit::Contains { from: var(from), to: var(to), step: add_step(path, range) }
            }
            Condition::ContainsText { var: v, text } => Lit::Text { var: var(v), text: text.clone() },
            Condition::FirstChild(a, b) => Lit::FirstChild(var(a), var(b)),
            Condition::NextSibling(a, b) => Lit::NextSibling(var(a), var(b)),
            Condition::LastSibling(a) => Lit::LastSibling(var(a)),
            Condition::Leaf(a) => Lit::Leaf(var(a)),
            Condition::Label(a, tag) => Lit::Label(var(a), tag.clone()),
            Condition::Root(a) => Lit::Root(var(a)),
        })
        .chain(rule.refs.iter().map(|r| Lit::Ref { pred: r.pred.clone(), var: var(&r.var) }))
        .collect();

    // Checks as early as possible, generators only when nothing can be checked.
    let mut bound = vec![false; vars.len()];
    bound[X] = true;
    bound[X0] = matches!(rule.anchor, Anchor::Step { .. });
    let mut lits = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let lit_vars = |l: &Lit| -> Vec<usize> {
            match *l {
                Lit::Contains { from, to, .. } => vec![from, to],
                Lit::FirstChild(a, b) | Lit::NextSibling(a, b) => vec![a, b],
                Lit::Text { var, .. } | Lit::Ref { var, .. } => vec![var],
                Lit::LastSibling(v) | Lit::Leaf(v) | Lit::Label(v, _) | Lit::Root(v) => vec![v],
            }
        };
        let pick = pending
            .iter()
            .position(|l| lit_vars(l).iter().all(|&v| bound[v]))
            .or_else(|| pending.iter().position(|l| lit_vars(l).iter().any(|&v| bound[v])))
            .expect("safe rules connect every variable");
        let lit = pending.remove(pick);
        for v in lit_vars(&lit) {
            bound[v] = true;
        }
        lits.push(lit);
    }
    CompiledRule {
        head: rule.head.clone(),
        parent,
        step,
        nvars: vars.len(),
        lits,
        refs: rule.refs.iter().map(|r| (r.pred.clone(), var(&r.var))).collect(),
        range: rule.range.clone(),
    }
}
