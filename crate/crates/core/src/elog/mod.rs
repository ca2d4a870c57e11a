//! Elog with binary pattern predicates: programs, fixpoint evaluation, and
//! the post-processing steps that turn atoms into output.
//!
//! ```text
//! @schema {p:txt}.
//! @aux q.
//! q(X0,X) :- root(_,X0), subelem["html.body"](X0,X).
//! p(X0,X) :- q(_,X0), subelem["_*.td"][0](X0,X), contains_s(X,"item") [last].
//! ```

mod ast;
mod eval;
mod output;
mod transform;

use thiserror::Error;

use crate::doctree::{DocTree, NodeId};
use crate::object::ComplexObject;
use crate::syntax::SyntaxError;

pub use ast::{Anchor, Condition, ElogProgram, Parent, PredRef, Rule};
pub use eval::{eval_fixpoint, unary_query, AtomStore};
pub use output::{output_graph, to_complex_object, unfold, Emit, OutputGraph, UnfoldNode};
pub use transform::{eliminate_aux, monadic_collapse};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElogError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unsafe rule for {head}: variable {var} is {reason}")]
    UnsafeRule { head: String, var: String, reason: String },
    #[error("unknown predicate '{0}'")]
    UnknownPredicate(String),
    #[error("builtin '{0}' cannot be defined by rules")]
    BuiltinHead(String),
    #[error("predicate '{0}' mixes dom(X0,X) rules with parent-anchored rules")]
    MixedAnchors(String),
    #[error("predicate '{0}' carries a rule range but is defined recursively")]
    NotStratified(String),
    #[error("auxiliary predicates form a cycle through '{0}'")]
    AuxCycle(String),
    #[error("predicate '{0}' has no position in the object schema")]
    SchemaMismatch(String),
    #[error("output graph has a cycle through node {0}")]
    CycleDetected(NodeId),
    #[error("program has no @schema declaration")]
    NoSchema,
}

/// Evaluates `program`, drops its `@aux` predicates and renders the result
/// through its `@schema`.
pub fn extract(program: &ElogProgram, t: &DocTree, emit: Emit) -> Result<ComplexObject, ElogError> {
    let schema = program.schema.as_ref().ok_or(ElogError::NoSchema)?;
    let store = eval_fixpoint(program, t)?;
    let store = eliminate_aux(&store, &program.aux)?;
    to_complex_object(&store, schema, t, emit)
}
