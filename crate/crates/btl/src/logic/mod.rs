//! Multiset matching, affine condition entailment, and a bounded sequent
//! prover for a fragment of intuitionistic linear logic.
//!
//! The prover works over interface formulas with the rules init, 1R, 1L,
//! topR, *R, *L, -oR, -oL, &R, &L1, &L2. Two provability modes are
//! supported: strict (every linear resource must be consumed) and affine
//! (unused resources may be discarded). There is no left rule for `top`.
//!
//! The production prover threads an input context through the proof and
//! reads leftovers back out instead of enumerating context splits at `*R`
//! and `-oL`; [`oracle_prove`] is an independent naive prover that does
//! enumerate every split, usable as a cross-check on small sequents.

mod entail;
mod oracle;
mod prover;
mod replay;
mod rewrite;
#[cfg(test)]
mod tests;

use std::fmt;

use crate::syntax::Interface;

pub use entail::affine_entails;
pub use oracle::{oracle_prove, OracleError, ORACLE_SIZE_CAP};
pub use prover::prove;
pub use replay::{replay, ReplayError};
pub use rewrite::match_rule;

/// Which sequents count as provable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Every linear resource must be consumed.
    Strict,
    /// Weakening is admissible: resources may be discarded unused.
    Affine,
}

/// A sequent `Γ; Δ |- C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    /// Sort-typed variable bindings. Reserved for ground quantifier
    /// instantiation; synthesized interfaces are quantifier-free, so this is
    /// empty everywhere in practice.
    pub bindings: Vec<(String, String)>,
    /// The linear context Δ, a multiset of interface formulas.
    pub context: Vec<Interface>,
    pub goal: Interface,
}

impl Sequent {
    pub fn new(context: Vec<Interface>, goal: Interface) -> Self {
        Sequent {
            bindings: Vec::new(),
            context,
            goal,
        }
    }

    /// Total formula size of the sequent, the measure the oracle caps.
    pub fn size(&self) -> usize {
        self.context.iter().map(Interface::size).sum::<usize>() + self.goal.size()
    }
}

/// Rule names of the implemented sequent-calculus fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RuleName {
    Init,
    OneR,
    OneL,
    TopR,
    TensorR,
    TensorL,
    LolliR,
    LolliL,
    WithR,
    WithL1,
    WithL2,
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleName::Init => "init",
            RuleName::OneR => "1R",
            RuleName::OneL => "1L",
            RuleName::TopR => "topR",
            RuleName::TensorR => "*R",
            RuleName::TensorL => "*L",
            RuleName::LolliR => "-oR",
            RuleName::LolliL => "-oL",
            RuleName::WithR => "&R",
            RuleName::WithL1 => "&L1",
            RuleName::WithL2 => "&L2",
        };
        write!(f, "{s}")
    }
}

/// One node of a proof, in resource-threaded form: `input` is the context
/// the rule sees and `output` the unconsumed leftovers handed back. A node
/// with `slack` contains a `topR` leaf, which can absorb any leftovers.
///
/// Premise contexts thread left to right (at `*R` and `-oL`, the second
/// premise starts from the first premise's output), so splits never have to
/// be guessed. [`replay`] checks each node against its rule's schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub rule: RuleName,
    pub input: Vec<Interface>,
    pub output: Vec<Interface>,
    pub goal: Interface,
    pub slack: bool,
    /// The context formula a left rule decomposes.
    pub focus: Option<Interface>,
    pub premises: Vec<ProofNode>,
}

impl ProofNode {
    /// Number of rule applications in the proof.
    pub fn len(&self) -> usize {
        1 + self.premises.iter().map(ProofNode::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        for _ in 0..depth {
            write!(f, "  ")?;
        }
        for (i, n) in self.input.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match n {
                Interface::Pos(_) | Interface::Top => write!(f, "{n}")?,
                _ => write!(f, "({n})")?,
            }
        }
        if !self.input.is_empty() {
            write!(f, " ")?;
        }
        writeln!(f, "|- {}   [{}]", self.goal, self.rule)?;
        for p in &self.premises {
            p.fmt_indented(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for ProofNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

/// Outcome of proof search. `BudgetExhausted` is distinct from `Unproved`:
/// the latter is only returned once the bounded search space is exhausted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofResult {
    Proved(ProofNode),
    Unproved,
    BudgetExhausted,
}

impl ProofResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofResult::Proved(_))
    }
}
