use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::doctree::{DocTree, NodeId};
use crate::object::ComplexObject;
use crate::pathrange::{select, subelem, PathAutomaton, PathRegex, Range};

use super::{Cond, Patom, Rpn};

/// Path matching with compiled automata cached per expression.
pub(crate) struct Engine<'t> {
    pub t: &'t DocTree,
    automata: RefCell<HashMap<PathRegex, Rc<PathAutomaton>>>,
}

impl<'t> Engine<'t> {
    pub fn new(t: &'t DocTree) -> Self {
        Engine { t, automata: RefCell::default() }
    }

    fn automaton(&self, path: &PathRegex) -> Rc<PathAutomaton> {
        if let Some(a) = self.automata.borrow().get(path) {
            return a.clone();
        }
        let a = Rc::new(path.compile());
        self.automata.borrow_mut().insert(path.clone(), a.clone());
        a
    }

    /// `subelem_π(v, ·)` in document order.
    pub fn step(&self, path: &PathRegex, v: NodeId) -> Vec<NodeId> {
        subelem(self.t, v, &self.automaton(path))
    }

    /// `subelem_{π,ρ}(v, ·)`.
    pub fn step_range(&self, path: &PathRegex, range: &Range, v: NodeId) -> Vec<NodeId> {
        select(&self.step(path, v), range)
    }

    /// Range first, then conditions.
    pub fn patom_targets(&self, p: &Patom, v: NodeId) -> Vec<NodeId> {
        self.step_range(&p.path, &p.range, v)
            .into_iter()
            .filter(|&w| p.conds.iter().all(|c| self.cond(c, w)))
            .collect()
    }

    pub fn cond(&self, c: &Cond, v: NodeId) -> bool {
        match c {
            Cond::TxtEq(s) => self.t.txt_eq(v, s),
            Cond::Chain(p, rest) => self.patom_targets(p, v).into_iter().any(|w| self.cond(rest, w)),
        }
    }

    pub fn eval(&self, w: &Rpn, v: NodeId) -> ComplexObject {
        match w {
            Rpn::Txt => ComplexObject::set([ComplexObject::Str(self.t.txt(v))]),
            Rpn::Record(es) => ComplexObject::set([ComplexObject::Record(es.iter().map(|e| self.eval(e, v)).collect())]),
            Rpn::Chain(p, rest) => ComplexObject::set(self.patom_targets(p, v).into_iter().flat_map(|u| match self.eval(rest, u) {
                ComplexObject::Set(items) => items,
                _ => unreachable!("statements evaluate to sets"),
            })),
        }
    }
}

/// Evaluates `w` at the document root.
pub fn eval_rpn(w: &Rpn, t: &DocTree) -> ComplexObject {
    Engine::new(t).eval(w, t.root())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    pub(crate) fn doc1() -> DocTree {
        DocTree::parse(
            "<html><body><table>\
             <tr><td>item</td><td>A</td></tr>\
             <tr><td>x</td><td>B</td></tr>\
             <tr><td>item</td><td>C</td></tr>\
             </table></body></html>",
        )
        .unwrap()
    }

    fn run(src: &str) -> serde_json::Value {
        eval_rpn(&Rpn::parse(src).unwrap(), &doc1()).to_json()
    }

    #[test]
    fn example_on_doc1() {
        assert_eq!(run(r#"html.body.table.tr{td[0].txt = "item"}.td[1].txt"#), json!(["A", "C"]));
    }

    #[test]
    fn txt_at_root() {
        assert_eq!(run("txt"), json!(["itemAxBitemC"]));
    }

    #[test]
    fn range_applies_before_conditions() {
        assert_eq!(run(r#"html.body.table.tr[1]{td[0].txt = "item"}.td[1].txt"#), json!([]));
    }

    #[test]
    fn records_and_flattening() {
        assert_eq!(
            run("html.body.table.tr[0].(td[0].txt # td[1].txt)"),
            json!([[["item"], ["A"]]])
        );
        // one set level however long the chain
        assert_eq!(run("(_*.td).txt"), json!(["item", "A", "x", "B", "C"]));
    }
}
