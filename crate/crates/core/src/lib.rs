//! Tree wrapper languages over a shared document and path engine.
//!
//! - [`doctree`]: ordered labeled documents.
//! - [`pathrange`]: regular downward paths and position ranges.
//! - [`elog`]: the binary datalog wrapper language and its evaluator.
//! - [`rpn`]: regular path queries with nesting.
//! - [`hel`]: the HEL fragment with index variables, its variable-free form,
//!   and the cut evaluator.
//! - [`object`]: complex objects, their types, and schemas.

pub mod doctree;
pub mod elog;
pub mod hel;
pub mod object;
pub mod pathrange;
pub mod rpn;
mod syntax;

pub use syntax::{quote, Location, SyntaxError};
