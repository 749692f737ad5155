//! Big-step evaluation of tree expressions over world states.
//!
//! Sequences thread the state through their children and fail on the first
//! child failure; selectors try children from the entry state and succeed
//! with the first success; conditions require affine entailment and leave
//! the state untouched; repeaters run their body until it fails and succeed
//! with the last state. Evaluation is deterministic: an op applies the first
//! match in the documented order.
//!
//! A failing subtree produces no state, so each selector branch restarts
//! from the selector's entry state; state changes inside an earlier branch
//! are not visible to later ones. Divergence (e.g. repeating an always
//! successful body) is cut off by a step budget counted per node visit, with
//! a distinct `BudgetExhausted` outcome.

mod angelic;
mod dot;
#[cfg(test)]
mod tests;
mod trace;

pub use angelic::{eval_all, AngelicOutcome, EvalAllError};
pub use dot::trace_to_dot;
pub use trace::{trace_json, EventKind, EventStatus, Trace, TraceEvent};

use crate::logic::{affine_entails, match_rule};
use crate::syntax::{BTExpr, Signature, TreeError, WorldState};

/// Result of evaluating a tree: a new world state on success, failure, or
/// budget exhaustion, each carrying the trace accumulated so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalOutcome {
    Success { state: WorldState, trace: Trace },
    Failure { trace: Trace },
    BudgetExhausted { trace: Trace },
}

impl EvalOutcome {
    pub fn trace(&self) -> &Trace {
        match self {
            EvalOutcome::Success { trace, .. }
            | EvalOutcome::Failure { trace }
            | EvalOutcome::BudgetExhausted { trace } => trace,
        }
    }

    pub fn final_state(&self) -> Option<&WorldState> {
        match self {
            EvalOutcome::Success { state, .. } => Some(state),
            _ => None,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self, EvalOutcome::Success { .. })
    }
}

/// Evaluates `a` against `d`, spending at most `budget` node visits.
/// The tree is validated against `sig` up front.
pub fn eval(
    sig: &Signature,
    a: &BTExpr,
    d: &WorldState,
    budget: u64,
) -> Result<EvalOutcome, TreeError> {
    a.validate(sig)?;
    let mut m = Machine {
        sig,
        budget,
        events: Vec::new(),
    };
    let flow = m.go(a, &mut Vec::new(), d.clone());
    let trace = Trace {
        initial: d.clone(),
        events: m.events,
    };
    Ok(match flow {
        Flow::Ok(state) => EvalOutcome::Success { state, trace },
        Flow::Fail => EvalOutcome::Failure { trace },
        Flow::Budget => EvalOutcome::BudgetExhausted { trace },
    })
}

enum Flow {
    Ok(WorldState),
    /// The subtree failed; its trace events net to zero, so the caller
    /// continues from its own entry state.
    Fail,
    Budget,
}

struct Machine<'a> {
    sig: &'a Signature,
    budget: u64,
    events: Vec<TraceEvent>,
}

impl Machine<'_> {
    fn go(&mut self, a: &BTExpr, path: &mut Vec<usize>, state: WorldState) -> Flow {
        if self.budget == 0 {
            return Flow::Budget;
        }
        self.budget -= 1;
        match a {
            BTExpr::Op(name, args) => self.fire(name, args, path, state),
            BTExpr::Cond(s, body) => {
                let holds = affine_entails(&state, s).expect("payload validated ground");
                self.events.push(TraceEvent::plain(
                    path.clone(),
                    EventKind::CondEnter,
                    if holds { EventStatus::Ok } else { EventStatus::Fail },
                ));
                if !holds {
                    self.events.push(TraceEvent::plain(
                        path.clone(),
                        EventKind::CondExit,
                        EventStatus::Fail,
                    ));
                    return Flow::Fail;
                }
                path.push(0);
                let r = self.go(body, path, state);
                path.pop();
                match r {
                    Flow::Ok(next) => {
                        self.events.push(TraceEvent::plain(
                            path.clone(),
                            EventKind::CondExit,
                            EventStatus::Ok,
                        ));
                        Flow::Ok(next)
                    }
                    Flow::Fail => {
                        self.events.push(TraceEvent::plain(
                            path.clone(),
                            EventKind::CondExit,
                            EventStatus::Fail,
                        ));
                        Flow::Fail
                    }
                    Flow::Budget => Flow::Budget,
                }
            }
            BTExpr::Seq(children) => {
                self.events.push(TraceEvent::plain(
                    path.clone(),
                    EventKind::SeqEnter,
                    EventStatus::Ok,
                ));
                let entry = state.clone();
                let mut cur = state;
                for (i, c) in children.iter().enumerate() {
                    path.push(i);
                    let r = self.go(c, path, cur.clone());
                    path.pop();
                    match r {
                        Flow::Ok(next) => cur = next,
                        Flow::Fail => {
                            // Undo the successful prefix so the failed
                            // subtree nets to zero in the trace.
                            self.events.push(seq_fail_exit(path, &entry, &cur));
                            return Flow::Fail;
                        }
                        Flow::Budget => return Flow::Budget,
                    }
                }
                self.events.push(TraceEvent::plain(
                    path.clone(),
                    EventKind::SeqExit,
                    EventStatus::Ok,
                ));
                Flow::Ok(cur)
            }
            BTExpr::Sel(children) => {
                self.events.push(TraceEvent::plain(
                    path.clone(),
                    EventKind::SelEnter,
                    EventStatus::Ok,
                ));
                for (i, c) in children.iter().enumerate() {
                    path.push(i);
                    let r = self.go(c, path, state.clone());
                    path.pop();
                    match r {
                        Flow::Ok(next) => {
                            self.events.push(TraceEvent::plain(
                                path.clone(),
                                EventKind::SelExit,
                                EventStatus::Ok,
                            ));
                            return Flow::Ok(next);
                        }
                        Flow::Fail => continue,
                        Flow::Budget => return Flow::Budget,
                    }
                }
                self.events.push(TraceEvent::plain(
                    path.clone(),
                    EventKind::SelExit,
                    EventStatus::Fail,
                ));
                Flow::Fail
            }
            BTExpr::Rep(body) => {
                self.events.push(TraceEvent::plain(
                    path.clone(),
                    EventKind::RepEnter,
                    EventStatus::Ok,
                ));
                let mut cur = state;
                loop {
                    path.push(0);
                    let r = self.go(body, path, cur.clone());
                    path.pop();
                    match r {
                        Flow::Ok(next) => cur = next,
                        Flow::Fail => {
                            self.events.push(TraceEvent::plain(
                                path.clone(),
                                EventKind::RepExit,
                                EventStatus::Ok,
                            ));
                            return Flow::Ok(cur);
                        }
                        Flow::Budget => return Flow::Budget,
                    }
                }
            }
        }
    }

    fn fire(&mut self, name: &str, args: &[crate::syntax::Term], path: &mut Vec<usize>, state: WorldState) -> Flow {
        let decl = self.sig.op(name).expect("op validated");
        let bound = decl.bind_args(args).expect("arity validated");
        let matches = match_rule(&state, decl, &bound);
        match matches.into_iter().next() {
            Some((theta, next)) => {
                let mut consumed = decl.antecedent.apply(&theta).atom_multiset();
                consumed.sort();
                let mut produced = decl.consequent.apply(&theta).atom_multiset();
                produced.sort();
                self.events.push(TraceEvent {
                    path: path.clone(),
                    kind: EventKind::Op,
                    op: Some((name.to_string(), args.to_vec())),
                    consumed,
                    produced,
                    status: EventStatus::Ok,
                });
                Flow::Ok(next)
            }
            None => {
                self.events.push(TraceEvent {
                    path: path.clone(),
                    kind: EventKind::Op,
                    op: Some((name.to_string(), args.to_vec())),
                    consumed: Vec::new(),
                    produced: Vec::new(),
                    status: EventStatus::Fail,
                });
                Flow::Fail
            }
        }
    }
}

/// The undo delta for a sequence that fails after a successful prefix:
/// consume what the prefix added, produce what it removed.
fn seq_fail_exit(path: &[usize], entry: &WorldState, cur: &WorldState) -> TraceEvent {
    let consumed: Vec<_> = cur
        .iter_counts()
        .flat_map(|(a, n)| {
            let excess = n.saturating_sub(entry.count(a));
            std::iter::repeat(a.clone()).take(excess)
        })
        .collect();
    let produced: Vec<_> = entry
        .iter_counts()
        .flat_map(|(a, n)| {
            let missing = n.saturating_sub(cur.count(a));
            std::iter::repeat(a.clone()).take(missing)
        })
        .collect();
    TraceEvent {
        path: path.to_vec(),
        kind: EventKind::SeqExit,
        op: None,
        consumed,
        produced,
        status: EventStatus::Fail,
    }
}
