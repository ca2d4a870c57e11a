use std::collections::BTreeSet;

use log::warn;

use crate::doctree::{DocTree, NodeId};
use crate::object::ComplexObject;
use crate::pathrange::select;
use crate::rpn::Engine;

use super::{Cc, HelError, VfCond, VfPatom, VfStatement};

/// What to do when a condition path reaches more than one node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SingleValue {
    /// Fail with [`HelError::SingleValueViolation`].
    #[default]
    Strict,
    /// Log a warning and hold if any reached node matches.
    Lenient,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    pub single_value: SingleValue,
    /// Honour `!` marks: a patom's matches stop at the first node that
    /// violates a marked condition.
    pub cut: bool,
}

/// Conditions first, then the range, at every construction patom.
/// Condition paths are read existentially and cut marks are ignored.
pub fn eval_vf(w: &VfStatement, t: &DocTree) -> ComplexObject {
    let opts = EvalOptions { single_value: SingleValue::Lenient, cut: false };
    eval_vf_with(w, t, opts).expect("lenient evaluation does not fail")
}

/// Like [`eval_vf`] but with cut marks in force.
pub fn eval_cut(w: &VfStatement, t: &DocTree) -> ComplexObject {
    let opts = EvalOptions { single_value: SingleValue::Lenient, cut: true };
    eval_vf_with(w, t, opts).expect("lenient evaluation does not fail")
}

pub fn eval_vf_with(w: &VfStatement, t: &DocTree, opts: EvalOptions) -> Result<ComplexObject, HelError> {
    let ev = Evaluator { e: Engine::new(t), opts };
    ev.cc(&w.cc, t.root())
}

struct Evaluator<'t> {
    e: Engine<'t>,
    opts: EvalOptions,
}

impl Evaluator<'_> {
    fn cc(&self, cc: &Cc<VfPatom>, v: NodeId) -> Result<ComplexObject, HelError> {
        let mut out = Vec::new();
        self.chain(cc.pseq(), cc, v, &mut out)?;
        Ok(ComplexObject::set(out))
    }

    fn chain(&self, ps: &[VfPatom], cc: &Cc<VfPatom>, v: NodeId, out: &mut Vec<ComplexObject>) -> Result<(), HelError> {
        let Some((p, rest)) = ps.split_first() else {
            out.push(match cc {
                Cc::Txt(_) => ComplexObject::Str(self.e.t.txt(v)),
                Cc::Record(_, es) => ComplexObject::Record(es.iter().map(|e| self.cc(e, v)).collect::<Result<_, _>>()?),
            });
            return Ok(());
        };
        for w in self.select(p, v)? {
            self.chain(rest, cc, w, out)?;
        }
        Ok(())
    }

    fn select(&self, p: &VfPatom, v: NodeId) -> Result<Vec<NodeId>, HelError> {
        let mut kept = Vec::new();
        for x in self.e.step(&p.path(), v) {
            let mut all = true;
            for c in &p.conds {
                if !self.holds(c, x)? {
                    if self.opts.cut && c.cut {
                        return Ok(select(&kept, p.range()));
                    }
                    all = false;
                }
            }
            if all {
                kept.push(x);
            }
        }
        Ok(select(&kept, p.range()))
    }

    fn holds(&self, c: &VfCond, v: NodeId) -> Result<bool, HelError> {
        let mut reached = BTreeSet::from([v]);
        for p in &c.pseq {
            let path = p.path();
            reached = reached.iter().flat_map(|&u| self.e.step_range(&path, p.range(), u)).collect();
        }
        if reached.len() > 1 {
            match self.opts.single_value {
                SingleValue::Strict => {
                    return Err(HelError::SingleValueViolation { cond: c.to_string(), node: v, count: reached.len() })
                }
                SingleValue::Lenient => warn!("condition `{c}` reaches {} nodes from node {v}", reached.len()),
            }
        }
        Ok(reached.iter().any(|&u| self.e.t.txt_eq(u, &c.text)))
    }
}
