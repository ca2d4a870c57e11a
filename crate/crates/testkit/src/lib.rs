//! Test support for `wrapcore`: brute-force oracles, seeded generators,
//! shrinkers, shared fixtures and the wrapper corpus.
//!
//! The oracles only read document trees and ASTs. They share no matching,
//! range or evaluation code with the engine, so agreement between the two
//! is evidence rather than tautology.

pub mod corpus;
pub mod fixtures;
pub mod gen;
pub mod guided;
pub mod oracle;
pub mod shrink;

pub use oracle::{naive_helvf, naive_helvf_cut, naive_rpn, naive_select, naive_subelem, parity_oracle};
