//! All-outcomes evaluation: selector branches are chosen nondeterministically
//! and an op may take any match, giving the set of reachable results.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::logic::{affine_entails, match_rule};
use crate::syntax::{BTExpr, Signature, TreeError, WorldState};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum AngelicOutcome {
    State(WorldState),
    Fail,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalAllError {
    #[error("repeaters are not supported by all-outcomes evaluation")]
    RepUnsupported,
    #[error("exploration budget exhausted")]
    BudgetExhausted,
    #[error(transparent)]
    Invalid(#[from] TreeError),
}

/// Every outcome reachable from `d` under angelic choice. Always a superset
/// of the deterministic evaluator's outcome. Repeater-free trees only;
/// `budget` caps the number of explored (node, state) pairs.
pub fn eval_all(
    sig: &Signature,
    a: &BTExpr,
    d: &WorldState,
    budget: u64,
) -> Result<BTreeSet<AngelicOutcome>, EvalAllError> {
    a.validate(sig)?;
    if a.contains_rep() {
        return Err(EvalAllError::RepUnsupported);
    }
    let mut e = Explorer { sig, budget };
    e.go(a, &d.clone())
}

struct Explorer<'a> {
    sig: &'a Signature,
    budget: u64,
}

impl Explorer<'_> {
    fn go(
        &mut self,
        a: &BTExpr,
        d: &WorldState,
    ) -> Result<BTreeSet<AngelicOutcome>, EvalAllError> {
        if self.budget == 0 {
            return Err(EvalAllError::BudgetExhausted);
        }
        self.budget -= 1;
        let mut out = BTreeSet::new();
        match a {
            BTExpr::Op(name, args) => {
                let decl = self.sig.op(name).expect("op validated");
                let bound = decl.bind_args(args).expect("arity validated");
                let matches = match_rule(d, decl, &bound);
                if matches.is_empty() {
                    out.insert(AngelicOutcome::Fail);
                } else {
                    for (_, next) in matches {
                        out.insert(AngelicOutcome::State(next));
                    }
                }
            }
            BTExpr::Cond(s, body) => {
                if affine_entails(d, s).expect("payload validated ground") {
                    out = self.go(body, d)?;
                } else {
                    out.insert(AngelicOutcome::Fail);
                }
            }
            BTExpr::Seq(children) => {
                let mut states = BTreeSet::from([d.clone()]);
                let mut failed = false;
                for c in children {
                    let mut next = BTreeSet::new();
                    for s in &states {
                        for o in self.go(c, s)? {
                            match o {
                                AngelicOutcome::State(d2) => {
                                    next.insert(d2);
                                }
                                AngelicOutcome::Fail => failed = true,
                            }
                        }
                    }
                    states = next;
                }
                out.extend(states.into_iter().map(AngelicOutcome::State));
                if failed {
                    out.insert(AngelicOutcome::Fail);
                }
            }
            BTExpr::Sel(children) => {
                if children.is_empty() {
                    out.insert(AngelicOutcome::Fail);
                }
                for c in children {
                    out.extend(self.go(c, d)?);
                }
            }
            BTExpr::Rep(_) => return Err(EvalAllError::RepUnsupported),
        }
        Ok(out)
    }
}
