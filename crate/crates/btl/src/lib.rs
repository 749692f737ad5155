//! btl: a small behavior-tree language with linear-logic action
//! specifications.
//!
//! Atomic actions are declared as linear rewrite rules `name : xs. S -o S'`
//! over a multiset world state. Tree expressions combine actions with
//! sequencing, selection, conditions, and repeaters. The crate provides:
//!
//! - [`syntax`]: domain types and canonical forms;
//! - [`parser`] / [`pretty`]: concrete syntax for specification files, tree
//!   expressions, states, formulas, and sequents;
//! - [`logic`]: multiset matching, affine condition entailment, and a bounded
//!   sequent prover with an independent naive oracle;
//! - [`eval`]: big-step evaluation with replayable traces, an angelic
//!   all-outcomes variant, and DOT export of resource flow;
//! - [`typesys`]: compositional interface-type synthesis for repeater-free
//!   trees;
//! - [`normalize`]: the structural-congruence normalizer and decision
//!   procedure;
//! - [`testkit`]: seeded generators, shrinking, and the executable property
//!   suites.
//!
//! With the default `parallel` feature, suite cases run on a rayon pool;
//! results are identical to the sequential fallback because every case is
//! seeded independently and reports aggregate in case order.

pub mod eval;
pub mod logic;
pub mod normalize;
pub mod parser;
pub mod pretty;
pub mod syntax;
pub mod testkit;
pub mod typesys;
