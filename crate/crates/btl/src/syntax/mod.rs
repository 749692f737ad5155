//! Domain types: terms, atoms, world states, formulas, trees, and signatures.

mod formula;
mod state;
mod term;
mod tree;

pub use formula::{equal_interface, Interface, PosFormula};
pub use state::{pos_of_state, state_of_pos, NonGroundError, WorldState};
pub use term::{Atom, Substitution, Term};
pub use tree::{BTExpr, OpDecl, Param, Signature, SignatureError, TreeError, TreeErrorKind};
