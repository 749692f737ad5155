//! A naive prover used as an independent cross-check.
//!
//! Backward search that enumerates every context split explicitly at `*R`
//! and `-oL`, in contrast to the production prover's resource threading.
//! Exponential, so inputs are capped by total formula size. Spectator
//! resources are threaded through purely as bookkeeping so the returned
//! trees satisfy the same replay schema as the production prover's.

use std::collections::HashSet;

use thiserror::Error;

use crate::syntax::{Interface, PosFormula};

use super::{Mode, ProofNode, ProofResult, RuleName, Sequent};

/// Maximum total formula size (context plus goal) the oracle accepts.
pub const ORACLE_SIZE_CAP: usize = 32;

/// Internal guard against pathological inputs under the cap; hitting it
/// yields `BudgetExhausted`.
const WORK_LIMIT: u64 = 5_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("sequent size {size} exceeds the oracle cap {cap}")]
    TooLarge { size: usize, cap: usize },
}

/// Decides `seq` by exhaustive naive search. Agrees with the production
/// prover on Proved/Unproved for every sequent under the size cap.
pub fn oracle_prove(seq: &Sequent, mode: Mode) -> Result<ProofResult, OracleError> {
    let size = seq.size();
    if size > ORACLE_SIZE_CAP {
        return Err(OracleError::TooLarge {
            size,
            cap: ORACLE_SIZE_CAP,
        });
    }
    let goal = seq.goal.canonical_payloads();
    let mut active: Vec<Interface> = seq
        .context
        .iter()
        .map(Interface::canonical_payloads)
        .collect();
    active.sort();
    let mut oracle = Oracle {
        mode,
        failed: HashSet::new(),
        work: 0,
        exhausted: false,
    };
    match oracle.prove(active, Vec::new(), &goal) {
        Some(p) => Ok(ProofResult::Proved(p)),
        None if oracle.exhausted => Ok(ProofResult::BudgetExhausted),
        None => Ok(ProofResult::Unproved),
    }
}

struct Oracle {
    mode: Mode,
    /// (active context, goal) pairs known to be unprovable.
    failed: HashSet<(Vec<Interface>, Interface)>,
    work: u64,
    exhausted: bool,
}

impl Oracle {
    /// Proves `active, spect |- goal` where only `active` may be consumed;
    /// `spect` is carried for context bookkeeping in the returned tree.
    fn prove(
        &mut self,
        active: Vec<Interface>,
        spect: Vec<Interface>,
        goal: &Interface,
    ) -> Option<ProofNode> {
        if self.exhausted {
            return None;
        }
        self.work += 1;
        if self.work > WORK_LIMIT {
            self.exhausted = true;
            return None;
        }
        let key = (active.clone(), goal.clone());
        if self.failed.contains(&key) {
            return None;
        }
        let r = self.attempt(&active, &spect, goal);
        if r.is_none() && !self.exhausted {
            self.failed.insert(key);
        }
        r
    }

    fn attempt(
        &mut self,
        active: &[Interface],
        spect: &[Interface],
        goal: &Interface,
    ) -> Option<ProofNode> {
        let input = merge(active, spect);

        // Right rules first.
        match goal {
            Interface::Pos(PosFormula::One) => {
                let ok = match self.mode {
                    Mode::Strict => active.is_empty(),
                    Mode::Affine => true,
                };
                if ok {
                    return Some(leaf(RuleName::OneR, input, spect.to_vec(), goal, false));
                }
            }
            Interface::Pos(PosFormula::Atom(_)) => {
                let ok = match self.mode {
                    Mode::Strict => active == [goal.clone()],
                    Mode::Affine => active.contains(goal),
                };
                if ok {
                    return Some(leaf(RuleName::Init, input, spect.to_vec(), goal, false));
                }
            }
            Interface::Pos(PosFormula::Tensor(l, r)) => {
                let g1 = Interface::Pos((**l).clone());
                let g2 = Interface::Pos((**r).clone());
                if let Some(p) = self.tensor_right(active, spect, goal, &g1, &g2) {
                    return Some(p);
                }
            }
            Interface::Tensor(s, n) => {
                let g1 = Interface::Pos(s.clone());
                if let Some(p) = self.tensor_right(active, spect, goal, &g1, n) {
                    return Some(p);
                }
            }
            Interface::Lolli(s, n) => {
                let mut a2 = active.to_vec();
                sorted_insert(&mut a2, Interface::Pos(s.clone()));
                if let Some(p) = self.prove(a2, spect.to_vec(), n) {
                    let slack = p.slack;
                    return Some(ProofNode {
                        rule: RuleName::LolliR,
                        input,
                        output: spect.to_vec(),
                        goal: goal.clone(),
                        slack,
                        focus: None,
                        premises: vec![p],
                    });
                }
            }
            Interface::With(a, b) => {
                if let Some(p1) = self.prove(active.to_vec(), spect.to_vec(), a) {
                    if let Some(p2) = self.prove(active.to_vec(), spect.to_vec(), b) {
                        let slack = p1.slack && p2.slack;
                        return Some(ProofNode {
                            rule: RuleName::WithR,
                            input,
                            output: spect.to_vec(),
                            goal: goal.clone(),
                            slack,
                            focus: None,
                            premises: vec![p1, p2],
                        });
                    }
                }
            }
            Interface::Top => {
                return Some(leaf(RuleName::TopR, input, spect.to_vec(), goal, true));
            }
        }

        // Left rules on each distinct context formula.
        let mut tried: Vec<&Interface> = Vec::new();
        for (i, f) in active.iter().enumerate() {
            if tried.contains(&f) {
                continue;
            }
            tried.push(f);
            let mut rest = active.to_vec();
            rest.remove(i);
            match f {
                Interface::Pos(PosFormula::One) => {
                    if let Some(p) = self.prove(rest, spect.to_vec(), goal) {
                        return Some(unary(RuleName::OneL, input, goal, f.clone(), p));
                    }
                }
                Interface::Pos(PosFormula::Tensor(l, r)) => {
                    let mut a2 = rest;
                    sorted_insert(&mut a2, Interface::Pos((**l).clone()));
                    sorted_insert(&mut a2, Interface::Pos((**r).clone()));
                    if let Some(p) = self.prove(a2, spect.to_vec(), goal) {
                        return Some(unary(RuleName::TensorL, input, goal, f.clone(), p));
                    }
                }
                Interface::Tensor(s, n) => {
                    let mut a2 = rest;
                    sorted_insert(&mut a2, Interface::Pos(s.clone()));
                    sorted_insert(&mut a2, (**n).clone());
                    if let Some(p) = self.prove(a2, spect.to_vec(), goal) {
                        return Some(unary(RuleName::TensorL, input, goal, f.clone(), p));
                    }
                }
                Interface::Lolli(s, n) => {
                    let arg_goal = Interface::Pos(s.clone());
                    for (d1, d2) in splits(&rest) {
                        let wide = merge(&d2, spect);
                        if let Some(p1) = self.prove(d1, wide, &arg_goal) {
                            let mut a2 = d2.clone();
                            sorted_insert(&mut a2, (**n).clone());
                            if let Some(p2) = self.prove(a2, spect.to_vec(), goal) {
                                let slack = p1.slack || p2.slack;
                                return Some(ProofNode {
                                    rule: RuleName::LolliL,
                                    input,
                                    output: spect.to_vec(),
                                    goal: goal.clone(),
                                    slack,
                                    focus: Some(f.clone()),
                                    premises: vec![p1, p2],
                                });
                            }
                        }
                        if self.exhausted {
                            return None;
                        }
                    }
                }
                Interface::With(a, b) => {
                    for (rule, branch) in
                        [(RuleName::WithL1, a), (RuleName::WithL2, b)]
                    {
                        let mut a2 = rest.clone();
                        sorted_insert(&mut a2, (**branch).clone());
                        if let Some(p) = self.prove(a2, spect.to_vec(), goal) {
                            return Some(unary(rule, input, goal, f.clone(), p));
                        }
                    }
                }
                Interface::Pos(PosFormula::Atom(_)) | Interface::Top => {}
            }
        }
        None
    }

    fn tensor_right(
        &mut self,
        active: &[Interface],
        spect: &[Interface],
        goal: &Interface,
        g1: &Interface,
        g2: &Interface,
    ) -> Option<ProofNode> {
        let input = merge(active, spect);
        for (d1, d2) in splits(active) {
            let wide = merge(&d2, spect);
            if let Some(p1) = self.prove(d1, wide, g1) {
                if let Some(p2) = self.prove(d2.clone(), spect.to_vec(), g2) {
                    let slack = p1.slack || p2.slack;
                    return Some(ProofNode {
                        rule: RuleName::TensorR,
                        input,
                        output: spect.to_vec(),
                        goal: goal.clone(),
                        slack,
                        focus: None,
                        premises: vec![p1, p2],
                    });
                }
            }
            if self.exhausted {
                return None;
            }
        }
        None
    }
}

fn leaf(
    rule: RuleName,
    input: Vec<Interface>,
    output: Vec<Interface>,
    goal: &Interface,
    slack: bool,
) -> ProofNode {
    ProofNode {
        rule,
        input,
        output,
        goal: goal.clone(),
        slack,
        focus: None,
        premises: Vec::new(),
    }
}

fn unary(
    rule: RuleName,
    input: Vec<Interface>,
    goal: &Interface,
    focus: Interface,
    premise: ProofNode,
) -> ProofNode {
    ProofNode {
        rule,
        input,
        output: premise.output.clone(),
        goal: goal.clone(),
        slack: premise.slack,
        focus: Some(focus),
        premises: vec![premise],
    }
}

fn merge(a: &[Interface], b: &[Interface]) -> Vec<Interface> {
    let mut out = a.to_vec();
    out.extend_from_slice(b);
    out.sort();
    out
}

fn sorted_insert(v: &mut Vec<Interface>, f: Interface) {
    let i = v.binary_search(&f).unwrap_or_else(|i| i);
    v.insert(i, f);
}

/// Every split of `v` into two multisets, lazily, in bitmask order.
fn splits(v: &[Interface]) -> impl Iterator<Item = (Vec<Interface>, Vec<Interface>)> + '_ {
    let n = v.len();
    assert!(n < 63, "context too large to split");
    (0u64..(1u64 << n)).map(move |mask| {
        let mut d1 = Vec::new();
        let mut d2 = Vec::new();
        for (i, f) in v.iter().enumerate() {
            if mask & (1 << i) != 0 {
                d1.push(f.clone());
            } else {
                d2.push(f.clone());
            }
        }
        (d1, d2)
    })
}
