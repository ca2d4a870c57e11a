//! Downward regular-path matching and range selection.

mod range;
mod regex;

pub use range::{apply_range, unique_word, BinDfa, BinRegex, Direction, Range, RangeError, RawRange, Span};
pub use regex::{PathAutomaton, PathRegex, PathState};

pub(crate) use range::parse_range;
pub(crate) use regex::parse_postfix as parse_path_postfix;

use crate::doctree::{DocTree, NodeId};

/// Compiles a path expression to its deterministic automaton.
pub fn compile_path(pi: &PathRegex) -> PathAutomaton {
    pi.compile()
}

/// All `v` below `v0` whose path word (labels strictly below `v0`, ending
/// with `label(v)`) is accepted, in document order. `v0` is included iff the
/// automaton accepts the empty word.
pub fn subelem(t: &DocTree, v0: NodeId, pi: &PathAutomaton) -> Vec<NodeId> {
    let mut out = Vec::new();
    if pi.accepts_empty_word() {
        out.push(v0);
    }
    // preorder DFS keeps the output in document order
    let mut stack: Vec<(NodeId, PathState)> = Vec::new();
    let push_children = |stack: &mut Vec<(NodeId, PathState)>, u: NodeId, q: PathState| {
        for &c in t.children(u).iter().rev() {
            if let Some(q2) = pi.step(q, t.label(c).as_str()) {
                stack.push((c, q2));
            }
        }
    };
    push_children(&mut stack, v0, pi.start());
    while let Some((u, q)) = stack.pop() {
        if pi.is_accepting(q) {
            out.push(u);
        }
        push_children(&mut stack, u, q);
    }
    out
}

/// The relation `subelem_{π,ρ}(v0, ·)`: range applied after path matching.
pub fn subelem_range(
    t: &DocTree,
    v0: NodeId,
    pi: &PathAutomaton,
    rho: &Range,
) -> Result<Vec<NodeId>, RangeError> {
    apply_range(&subelem(t, v0, pi), rho, Direction::Forward)
}

/// Like [`subelem_range`], but a range with no word of the needed length
/// selects nothing.
pub fn subelem_range_lenient(t: &DocTree, v0: NodeId, pi: &PathAutomaton, rho: &Range) -> Vec<NodeId> {
    select(&subelem(t, v0, pi), rho)
}

/// Range application where a missing word selects nothing.
pub fn select(seq: &[NodeId], rho: &Range) -> Vec<NodeId> {
    match apply_range(seq, rho, Direction::Forward) {
        Ok(v) => v,
        Err(RangeError::NoWordOfLength(_)) => Vec::new(),
        Err(e @ RangeError::MultipleWords(_)) => {
            // RawRange::new rejects these up to the probe bound
            log::warn!("range {rho} at length {}: {e}", seq.len());
            Vec::new()
        }
    }
}

/// `txt(v) = s`, exact.
pub fn contains_string(t: &DocTree, v: NodeId, s: &str) -> bool {
    t.txt_eq(v, s)
}
