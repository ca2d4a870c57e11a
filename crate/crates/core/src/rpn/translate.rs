//! RPN to Elog: one pattern predicate per patom, one unary predicate per
//! condition step, and a schema mapping set positions to predicates.

use std::collections::BTreeSet;

use crate::doctree::DocTree;
use crate::elog::{extract, Condition, ElogError, ElogProgram, Emit, Parent, PredRef, Rule};
use crate::object::{ComplexObject, ObjectSchema, SetElem, SetSchema, SetSource};
use crate::pathrange::Range;

use super::{Cond, Patom, Rpn};

/// Where a patom's range goes in the generated chain rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RangePlacement {
    /// `subelem[π][ρ]`: the range picks among path matches (RPN).
    InStep,
    /// `subelem[π] ... [ρ]`: the range picks among matches that satisfy the
    /// conditions (variable-free HEL).
    RuleLevel,
}

/// A translated wrapper: the program (carrying `@aux` and `@schema`), plus
/// the schema and auxiliary set for direct use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub program: ElogProgram,
    pub schema: ObjectSchema,
    pub aux: BTreeSet<String>,
}

impl Translation {
    /// Fixpoint, auxiliary elimination, then rendering from the root.
    pub fn run(&self, t: &DocTree) -> Result<ComplexObject, ElogError> {
        extract(&self.program, t, Emit::Text)
    }

    /// Predicates introduced for chain patoms (as opposed to conditions).
    pub fn chain_predicates(&self) -> Vec<&str> {
        self.program.predicates().into_iter().filter(|p| !self.program.is_unary(p)).collect()
    }

    /// Predicates introduced for condition steps.
    pub fn condition_predicates(&self) -> Vec<&str> {
        self.program.predicates().into_iter().filter(|p| self.program.is_unary(p)).collect()
    }
}

/// The RPN translation: ranges stay inside `subelem`.
pub fn translate_rpn(w: &Rpn) -> Translation {
    translate(w, RangePlacement::InStep)
}

pub(crate) fn translate(w: &Rpn, placement: RangePlacement) -> Translation {
    let mut tr = Translator { placement, rules: Vec::new(), aux: BTreeSet::new(), chains: 0, conds: 0 };
    let top = tr.expr(w, &Parent::Root);
    let schema = ObjectSchema::new(top);
    let program = ElogProgram {
        rules: tr.rules,
        aux: tr.aux.clone(),
        records: Vec::new(),
        schema: Some(schema.clone()),
    };
    debug_assert!(program.validate().is_ok(), "{program}");
    Translation { program, schema, aux: tr.aux }
}

struct Translator {
    placement: RangePlacement,
    rules: Vec<Rule>,
    aux: BTreeSet<String>,
    chains: usize,
    conds: usize,
}

impl Translator {
    /// Emits rules for `w` evaluated at the nodes bound by `ctx`, returning
    /// the schema of the set it produces there.
    fn expr(&mut self, w: &Rpn, ctx: &Parent) -> SetSchema {
        match w {
            Rpn::Txt => SetSchema::text(SetSource::Context),
            Rpn::Record(es) => SetSchema {
                source: SetSource::Context,
                elem: SetElem::Record(es.iter().map(|e| self.expr(e, ctx)).collect()),
            },
            Rpn::Chain(p, rest) => {
                let name = self.chain_rule(p, ctx);
                let here = Parent::Pred(name.clone());
                match rest.as_ref() {
                    Rpn::Txt => SetSchema::text(SetSource::Pred(name)),
                    Rpn::Record(es) => SetSchema {
                        source: SetSource::Pred(name),
                        elem: SetElem::Record(es.iter().map(|e| self.expr(e, &here)).collect()),
                    },
                    Rpn::Chain(..) => {
                        // followed by further patoms: no set of its own
                        self.aux.insert(name);
                        self.expr(rest, &here)
                    }
                }
            }
        }
    }

    fn chain_rule(&mut self, p: &Patom, ctx: &Parent) -> String {
        self.chains += 1;
        let name = format!("p{}", self.chains);
        let (step_range, rule_range) = match self.placement {
            RangePlacement::InStep => (p.range.clone(), None),
            RangePlacement::RuleLevel if p.range.is_star() => (Range::Star, None),
            RangePlacement::RuleLevel => (Range::Star, Some(p.range.clone())),
        };
        let mut rule = Rule::step(&name, ctx.clone(), p.path.clone(), step_range);
        rule.range = rule_range;
        let idx = self.rules.len();
        self.rules.push(rule);
        for c in &p.conds {
            let r = self.cond(c);
            let x = self.rules[idx].x.clone();
            self.rules[idx].refs.push(PredRef { pred: r, var: x });
        }
        name
    }

    fn cond(&mut self, c: &Cond) -> String {
        self.conds += 1;
        let name = format!("c{}", self.conds);
        self.aux.insert(name.clone());
        let mut rule = Rule::dom(&name);
        let idx = self.rules.len();
        match c {
            Cond::TxtEq(s) => {
                rule.conds.push(Condition::ContainsText { var: rule.x.clone(), text: s.clone() });
                self.rules.push(rule);
            }
            Cond::Chain(p, rest) => {
                let y = "Y".to_string();
                rule.conds.push(Condition::Contains {
                    from: rule.x.clone(),
                    to: y.clone(),
                    path: p.path.clone(),
                    range: p.range.clone(),
                });
                self.rules.push(rule);
                for inner in &p.conds {
                    let r = self.cond(inner);
                    self.rules[idx].refs.push(PredRef { pred: r, var: y.clone() });
                }
                let s = self.cond(rest);
                self.rules[idx].refs.push(PredRef { pred: s, var: y });
            }
        }
        name
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rpn::eval_rpn;

    fn doc1() -> DocTree {
        DocTree::parse(
            "<html><body><table>\
             <tr><td>item</td><td>A</td></tr>\
             <tr><td>x</td><td>B</td></tr>\
             <tr><td>item</td><td>C</td></tr>\
             </table></body></html>",
        )
        .unwrap()
    }

    #[test]
    fn example_translation_shape() {
        let w = Rpn::parse(r#"html.body.table.tr{td[0].txt = "item"}.td[1].txt"#).unwrap();
        let tr = translate_rpn(&w);
        assert_eq!(tr.chain_predicates(), ["p1", "p2", "p3", "p4", "p5"]);
        assert_eq!(tr.condition_predicates(), ["c1", "c2"]);
        let chain_aux: Vec<&String> = tr.aux.iter().filter(|p| p.starts_with('p')).collect();
        assert_eq!(chain_aux, ["p1", "p2", "p3", "p4"]);
        assert_eq!(tr.schema.to_string(), "{p5:txt}");
        assert_eq!(tr.run(&doc1()).unwrap(), eval_rpn(&w, &doc1()));
        let text = tr.program.to_string();
        assert_eq!(ElogProgram::parse(&text).unwrap(), tr.program);
    }

    #[test]
    fn txt_is_empty_program() {
        let tr = translate_rpn(&Rpn::Txt);
        assert!(tr.program.rules.is_empty());
        assert_eq!(tr.schema.to_string(), "{.:txt}");
        assert_eq!(tr.run(&doc1()).unwrap().to_json(), serde_json::json!(["itemAxBitemC"]));
    }

    #[test]
    fn records_translate() {
        for src in [
            "html.body.table.(tr[0].td[0].txt # tr{td[0].txt = \"item\"}.td[1].txt)",
            "html.body.table.tr.(txt # td[1].txt)",
            "(txt # (_*.td)[last].txt)",
            "html.body.table.tr[1]{td[0].txt = \"item\"}.td[1].txt",
        ] {
            let w = Rpn::parse(src).unwrap();
            let tr = translate_rpn(&w);
            assert_eq!(tr.run(&doc1()).unwrap(), eval_rpn(&w, &doc1()), "{src}\n{}", tr.program);
        }
    }
}
