//! Program and store transformations: monadic collapse and auxiliary
//! predicate elimination.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::doctree::NodeId;

use super::ast::{Anchor, ElogProgram, Parent, PredRef, Rule};
use super::eval::{unary_query, AtomStore};
use super::ElogError;

/// Name of the unary companion of `pred` introduced by [`monadic_collapse`].
pub fn companion(pred: &str) -> String {
    format!("{pred}'")
}

/// Rewrites the program so that bodies only read unary predicates: every
/// head `p` gets a companion `p'(X0,X) :- dom(X0,X), p(_,X).` and all
/// parent and body references to `p` become references to `p'`.
///
/// `Q_p` is unchanged for every original predicate, and `Q_p' = Q_p`.
/// Rule ranges survive too: a rule-level range picks among the bindings
/// of one parent node, and both the parent nodes (`Q_p = Q_p'`) and the
/// body's truth values are the same before and after.
pub fn monadic_collapse(program: &ElogProgram) -> Result<ElogProgram, ElogError> {
    let preds: Vec<String> = program.predicates().into_iter().map(str::to_string).collect();
    let mut out = program.clone();
    for rule in &mut out.rules {
        if let Anchor::Step { parent: Parent::Pred(p), .. } = &mut rule.anchor {
            *p = companion(p);
        }
        for r in &mut rule.refs {
            r.pred = companion(&r.pred);
        }
    }
    for p in &preds {
        let mut rule = Rule::dom(&companion(p));
        rule.refs.push(PredRef { pred: p.clone(), var: rule.x.clone() });
        out.rules.push(rule);
    }
    out.validate()?;
    Ok(out)
}

/// Closes the gaps left by dropping auxiliary predicates: an atom `q(v,w)`
/// whose parent position `v` was reached through auxiliary atoms
/// `a(u,v)` becomes `q(u,w)`, repeatedly, until the anchor is a node of a
/// retained predicate. Auxiliary atoms are then dropped.
///
/// Stores produced by [`super::eval_fixpoint`] record which parent
/// predicates each predicate's rules use, and redirection follows those.
/// Predicates without that record are redirected through every auxiliary
/// atom ending at `v`.
pub fn eliminate_aux(store: &AtomStore, aux: &BTreeSet<String>) -> Result<AtomStore, ElogError> {
    check_aux_acyclic(store, aux)?;
    let mut closer = Closer { store, aux, by_target: HashMap::new(), memo: HashMap::new(), proj: HashMap::new() };
    for a in aux {
        for (u, v) in store.pairs(a) {
            closer.by_target.entry(a.as_str()).or_default().entry(v).or_default().push(u);
        }
    }
    let mut out = AtomStore::new();
    let preds: Vec<&str> = store.binary_predicates().filter(|p| !aux.contains(*p)).collect();
    for q in preds {
        for (v, w) in store.pairs(q) {
            let anchors = match store.parents(q) {
                Some(parents) => {
                    let mut all = BTreeSet::new();
                    for p in parents {
                        all.extend(closer.anchors(p, v, &mut Vec::new())?);
                    }
                    all
                }
                None => closer.untracked_anchors(v, &mut Vec::new())?,
            };
            for a in anchors {
                out.insert(q, a, w);
            }
        }
    }
    for q in store.unary_predicates().filter(|p| !aux.contains(*p)) {
        for v in store.unary(q) {
            out.insert_unary(q, v);
        }
    }
    for q in store.binary_predicates().chain(store.unary_predicates()) {
        if aux.contains(q) {
            continue;
        }
        if let Some(parents) = store.parents(q) {
            let mut resolved = BTreeSet::new();
            for p in parents {
                resolve_parents(store, aux, p, &mut resolved);
            }
            out.set_parents(q, resolved);
        }
    }
    Ok(out)
}

fn resolve_parents(store: &AtomStore, aux: &BTreeSet<String>, p: &str, out: &mut BTreeSet<String>) {
    if !aux.contains(p) {
        out.insert(p.to_string());
    } else if let Some(ps) = store.parents(p) {
        for q in ps {
            resolve_parents(store, aux, q, out);
        }
    }
}

fn check_aux_acyclic(store: &AtomStore, aux: &BTreeSet<String>) -> Result<(), ElogError> {
    // colors: absent = unvisited, false = on stack, true = done
    fn visit<'a>(
        store: &'a AtomStore,
        aux: &BTreeSet<String>,
        p: &'a str,
        color: &mut BTreeMap<&'a str, bool>,
    ) -> Result<(), ElogError> {
        match color.get(p) {
            Some(true) => return Ok(()),
            Some(false) => return Err(ElogError::AuxCycle(p.to_string())),
            None => {}
        }
        color.insert(p, false);
        for q in store.parents(p).into_iter().flatten().filter(|q| aux.contains(*q)) {
            visit(store, aux, q, color)?;
        }
        color.insert(p, true);
        Ok(())
    }
    let mut color = BTreeMap::new();
    for p in aux {
        visit(store, aux, p, &mut color)?;
    }
    Ok(())
}

struct Closer<'a> {
    store: &'a AtomStore,
    aux: &'a BTreeSet<String>,
    /// aux predicate -> target node -> source nodes
    by_target: HashMap<&'a str, HashMap<NodeId, Vec<NodeId>>>,
    memo: HashMap<(String, NodeId), BTreeSet<NodeId>>,
    proj: HashMap<String, BTreeSet<NodeId>>,
}

impl Closer<'_> {
    fn sources(&self, a: &str, v: NodeId) -> Vec<NodeId> {
        self.by_target.get(a).and_then(|m| m.get(&v)).cloned().unwrap_or_default()
    }

    /// Nodes that parent position `v`, reached through predicate `p`,
    /// resolves to once auxiliary predicates are gone.
    fn anchors(&mut self, p: &str, v: NodeId, stack: &mut Vec<(String, NodeId)>) -> Result<BTreeSet<NodeId>, ElogError> {
        if !self.aux.contains(p) {
            let store = self.store;
            let holds = matches!(p, "root" | "dom")
                || self.proj.entry(p.to_string()).or_insert_with(|| unary_query(store, p)).contains(&v);
            return Ok(if holds { BTreeSet::from([v]) } else { BTreeSet::new() });
        }
        let key = (p.to_string(), v);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        if stack.contains(&key) {
            return Err(ElogError::AuxCycle(p.to_string()));
        }
        stack.push(key.clone());
        let mut out = BTreeSet::new();
        let sources = self.sources(p, v);
        match self.store.parents(p).cloned() {
            Some(parents) => {
                for u in sources {
                    for q in &parents {
                        out.extend(self.anchors(q, u, stack)?);
                    }
                }
            }
            None => {
                for u in sources {
                    out.extend(self.untracked_anchors(u, stack)?);
                }
            }
        }
        stack.pop();
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    /// Redirects through every auxiliary atom ending at `v`; `v` itself if none.
    fn untracked_anchors(&mut self, v: NodeId, stack: &mut Vec<(String, NodeId)>) -> Result<BTreeSet<NodeId>, ElogError> {
        let incoming: Vec<&str> = self
            .aux
            .iter()
            .map(String::as_str)
            .filter(|a| self.by_target.get(a).is_some_and(|m| m.contains_key(&v)))
            .collect();
        if incoming.is_empty() {
            return Ok(BTreeSet::from([v]));
        }
        let mut out = BTreeSet::new();
        for a in incoming {
            out.extend(self.anchors(a, v, stack)?);
        }
        Ok(out)
    }
}
