//! Output graph, its unfolding, and complex-object rendering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::doctree::{DocTree, NodeId};
use crate::object::{ComplexObject, ObjectSchema, SetElem, SetSchema, SetSource};

use super::eval::AtomStore;
use super::ElogError;

/// Node-labeled graph over the document: an edge `(v0, v)` for every binary
/// atom, labeled with the predicates deriving it, and `Q_p` for every
/// predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputGraph {
    pub node_count: usize,
    pub root: NodeId,
    pub edges: BTreeMap<(NodeId, NodeId), BTreeSet<String>>,
    pub queries: BTreeMap<String, BTreeSet<NodeId>>,
}

pub fn output_graph(store: &AtomStore, t: &DocTree) -> OutputGraph {
    let mut edges: BTreeMap<(NodeId, NodeId), BTreeSet<String>> = BTreeMap::new();
    let mut queries: BTreeMap<String, BTreeSet<NodeId>> = BTreeMap::new();
    for p in store.binary_predicates() {
        for (v0, v) in store.pairs(p) {
            edges.entry((v0, v)).or_default().insert(p.to_string());
            queries.entry(p.to_string()).or_default().insert(v);
        }
    }
    for p in store.unary_predicates() {
        queries.entry(p.to_string()).or_default().extend(store.unary(p));
    }
    OutputGraph { node_count: t.len(), root: t.root(), edges, queries }
}

impl OutputGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Graphviz rendering; nodes carry their tag and the predicates whose
    /// query contains them.
    pub fn to_dot(&self, t: &DocTree) -> String {
        let mut labels: BTreeMap<NodeId, Vec<&str>> = BTreeMap::new();
        for (p, nodes) in &self.queries {
            for &v in nodes {
                labels.entry(v).or_default().push(p);
            }
        }
        let mut used: BTreeSet<NodeId> = labels.keys().copied().collect();
        used.insert(self.root);
        for &(a, b) in self.edges.keys() {
            used.insert(a);
            used.insert(b);
        }
        let mut out = String::from("digraph output {\n");
        for v in used {
            let preds = labels.get(&v).map(|ps| ps.join(",")).unwrap_or_default();
            let _ = writeln!(out, "  n{v} [label=\"{v}:{} {{{preds}}}\"];", t.label(v).as_str().replace('"', "\\\""));
        }
        for ((a, b), preds) in &self.edges {
            let preds: Vec<&str> = preds.iter().map(String::as_str).collect();
            let _ = writeln!(out, "  n{a} -> n{b} [label=\"{}\"];", preds.join(","));
        }
        out.push_str("}\n");
        out
    }
}

/// A node of the unfolded output graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldNode {
    pub node: NodeId,
    /// Predicates of the edge leading here (empty at a source).
    pub via: BTreeSet<String>,
    pub children: Vec<UnfoldNode>,
}

impl UnfoldNode {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(UnfoldNode::size).sum::<usize>()
    }

    /// `(id child...)`
    pub fn to_sexpr(&self) -> String {
        if self.children.is_empty() {
            return self.node.to_string();
        }
        let kids: Vec<String> = self.children.iter().map(UnfoldNode::to_sexpr).collect();
        format!("({} {})", self.node, kids.join(" "))
    }
}

/// Unfolds the graph into trees, one per source: the document root first,
/// then every other node with outgoing but no incoming edges. Children are
/// ordered by predicate ordinal (undeclared last), then document order.
pub fn unfold(g: &OutputGraph, ordinals: &BTreeMap<String, usize>) -> Result<Vec<UnfoldNode>, ElogError> {
    let mut succ: BTreeMap<NodeId, Vec<(NodeId, &BTreeSet<String>)>> = BTreeMap::new();
    let mut has_incoming = BTreeSet::new();
    for ((a, b), preds) in &g.edges {
        succ.entry(*a).or_default().push((*b, preds));
        has_incoming.insert(*b);
    }
    let rank = |preds: &BTreeSet<String>| preds.iter().filter_map(|p| ordinals.get(p)).min().copied().unwrap_or(usize::MAX);
    for children in succ.values_mut() {
        children.sort_by_key(|&(v, preds)| (rank(preds), v));
    }

    fn build(
        v: NodeId,
        via: BTreeSet<String>,
        succ: &BTreeMap<NodeId, Vec<(NodeId, &BTreeSet<String>)>>,
        path: &mut Vec<NodeId>,
    ) -> Result<UnfoldNode, ElogError> {
        if path.contains(&v) {
            return Err(ElogError::CycleDetected(v));
        }
        path.push(v);
        let mut children = Vec::new();
        for &(w, preds) in succ.get(&v).into_iter().flatten() {
            children.push(build(w, preds.clone(), succ, path)?);
        }
        path.pop();
        Ok(UnfoldNode { node: v, via, children })
    }

    let mut sources = vec![g.root];
    sources.extend(succ.keys().copied().filter(|v| *v != g.root && !has_incoming.contains(v)));
    let trees = sources
        .into_iter()
        .map(|s| build(s, BTreeSet::new(), &succ, &mut Vec::new()))
        .collect::<Result<Vec<_>, _>>()?;
    // nodes on a cycle have incoming edges, so no source reaches them
    let mut seen = BTreeSet::new();
    fn mark(n: &UnfoldNode, seen: &mut BTreeSet<NodeId>) {
        if seen.insert(n.node) {
            n.children.iter().for_each(|c| mark(c, seen));
        }
    }
    trees.iter().for_each(|t| mark(t, &mut seen));
    if let Some(&(v, _)) = g.edges.keys().find(|(a, _)| !seen.contains(a)) {
        return Err(ElogError::CycleDetected(v));
    }
    Ok(trees)
}

/// How selected nodes are rendered as strings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Emit {
    /// `txt(v)`
    #[default]
    Text,
    /// `#` followed by the node id, so equal texts stay apart.
    Nodes,
}

/// Renders the atoms of a store (auxiliary predicates already eliminated)
/// as a complex object, starting at the document root.
pub fn to_complex_object(
    store: &AtomStore,
    schema: &ObjectSchema,
    t: &DocTree,
    emit: Emit,
) -> Result<ComplexObject, ElogError> {
    let known = schema.predicates();
    if let Some(p) = store.binary_predicates().chain(store.unary_predicates()).find(|p| !known.contains(p)) {
        return Err(ElogError::SchemaMismatch(p.to_string()));
    }
    Ok(render_set(store, &schema.top, t, t.root(), emit))
}

fn render_set(store: &AtomStore, s: &SetSchema, t: &DocTree, v: NodeId, emit: Emit) -> ComplexObject {
    let members: Vec<NodeId> = match &s.source {
        SetSource::Context => vec![v],
        SetSource::Pred(p) => store.targets(p, v).collect(),
    };
    ComplexObject::set(members.into_iter().map(|w| match &s.elem {
        SetElem::Text => match emit {
            Emit::Text => ComplexObject::Str(t.txt(w)),
            Emit::Nodes => ComplexObject::Str(format!("#{w}")),
        },
        SetElem::Record(entries) => {
            ComplexObject::Record(entries.iter().map(|e| render_set(store, e, t, w, emit)).collect())
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(i: usize) -> NodeId {
        NodeId::new(i)
    }

    fn graph(edges: &[(usize, usize, &str)]) -> OutputGraph {
        let mut store = AtomStore::new();
        for &(a, b, p) in edges {
            store.insert(p, n(a), n(b));
        }
        let t = DocTree::parse("<a><b/><c/><d/><e/></a>").unwrap();
        output_graph(&store, &t)
    }

    #[test]
    fn diamond_duplicates_shared_node() {
        let g = graph(&[(0, 1, "p"), (0, 2, "p"), (1, 3, "q"), (2, 3, "q")]);
        let trees = unfold(&g, &BTreeMap::new()).unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].to_sexpr(), "(0 (1 3) (2 3))");
    }

    #[test]
    fn edgeless_graph_is_the_root() {
        let g = graph(&[]);
        assert_eq!(g.edge_count(), 0);
        let trees = unfold(&g, &BTreeMap::new()).unwrap();
        assert_eq!(trees, vec![UnfoldNode { node: n(0), via: BTreeSet::new(), children: vec![] }]);
    }

    #[test]
    fn shared_pair_is_one_edge() {
        let g = graph(&[(0, 1, "p"), (0, 1, "q")]);
        assert_eq!(g.edge_count(), 1);
        assert!(g.queries["p"].contains(&n(1)) && g.queries["q"].contains(&n(1)));
    }

    #[test]
    fn ordinals_order_children() {
        let g = graph(&[(0, 1, "late"), (0, 2, "early")]);
        let ord = BTreeMap::from([("early".to_string(), 0), ("late".to_string(), 1)]);
        assert_eq!(unfold(&g, &ord).unwrap()[0].to_sexpr(), "(0 2 1)");
        assert_eq!(unfold(&g, &BTreeMap::new()).unwrap()[0].to_sexpr(), "(0 1 2)");
    }

    #[test]
    fn cycles_are_detected() {
        let g = graph(&[(0, 1, "p"), (1, 2, "p"), (2, 1, "p")]);
        assert!(matches!(unfold(&g, &BTreeMap::new()), Err(ElogError::CycleDetected(_))));
    }

    #[test]
    fn renders_sets_and_records() {
        let t = DocTree::parse("<r><a>x</a><a>y</a><a>x</a></r>").unwrap();
        let mut store = AtomStore::new();
        for v in [3, 5, 7] {
            store.insert("p", n(1), n(v));
        }
        store.insert("top", n(0), n(1));
        let schema = ObjectSchema::parse("{top:<{p:txt},{.:txt}>}").unwrap();
        let obj = to_complex_object(&store, &schema, &t, Emit::Text).unwrap();
        assert_eq!(obj.to_json(), serde_json::json!([[["x", "y"], ["xyx"]]]));
        let nodes = to_complex_object(&store, &schema, &t, Emit::Nodes).unwrap();
        assert_eq!(nodes.to_json(), serde_json::json!([[["#3", "#5", "#7"], ["#1"]]]));
        store.insert("stray", n(0), n(1));
        assert_eq!(
            to_complex_object(&store, &schema, &t, Emit::Text),
            Err(ElogError::SchemaMismatch("stray".into()))
        );
    }
}
