//! Mechanical replay of proof trees.
//!
//! Each node must follow from its premises by its named rule, read in
//! resource-threaded form: premise inputs chain left to right, outputs
//! thread back, leaves consume from the input, and `topR` marks its subproof
//! as able to absorb leftovers. Strict mode demands exact consumption;
//! affine mode lets leaves and the root discard.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::syntax::{Interface, PosFormula};

use super::prover::decomposition_parts;
use super::{Mode, ProofNode, RuleName, Sequent};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("replay failed at rule {rule}: {reason}")]
pub struct ReplayError {
    pub rule: RuleName,
    pub reason: String,
}

type Ms = BTreeMap<Interface, usize>;

fn ms(v: &[Interface]) -> Ms {
    let mut out = Ms::new();
    for f in v {
        *out.entry(f.clone()).or_insert(0) += 1;
    }
    out
}

fn ms_sub(a: &Ms, b: &Ms) -> Option<Ms> {
    let mut out = a.clone();
    for (f, n) in b {
        let slot = out.get_mut(f)?;
        if *slot < *n {
            return None;
        }
        *slot -= n;
        if *slot == 0 {
            out.remove(f);
        }
    }
    Some(out)
}

fn ms_excess(a: &Ms, b: &Ms) -> Ms {
    let mut out = Ms::new();
    for (f, n) in a {
        let m = n.saturating_sub(b.get(f).copied().unwrap_or(0));
        if m > 0 {
            out.insert(f.clone(), m);
        }
    }
    out
}

fn ms_min(a: &Ms, b: &Ms) -> Ms {
    let mut out = Ms::new();
    for (f, n) in a {
        let m = (*n).min(b.get(f).copied().unwrap_or(0));
        if m > 0 {
            out.insert(f.clone(), m);
        }
    }
    out
}

fn ms_included(a: &Ms, b: &Ms) -> bool {
    a.iter().all(|(f, n)| b.get(f).copied().unwrap_or(0) >= *n)
}

fn one(f: &Interface) -> Ms {
    let mut out = Ms::new();
    out.insert(f.clone(), 1);
    out
}

/// Checks that `proof` is a valid derivation of `seq` in the given mode.
pub fn replay(seq: &Sequent, mode: Mode, proof: &ProofNode) -> Result<(), ReplayError> {
    let want_ctx: Vec<Interface> = seq
        .context
        .iter()
        .map(Interface::canonical_payloads)
        .collect();
    if ms(&proof.input) != ms(&want_ctx) {
        return Err(err(proof, "root input differs from the sequent context"));
    }
    if proof.goal != seq.goal.canonical_payloads() {
        return Err(err(proof, "root goal differs from the sequent goal"));
    }
    if mode == Mode::Strict && !(proof.output.is_empty() || proof.slack) {
        return Err(err(
            proof,
            "strict proof leaves resources unconsumed without slack",
        ));
    }
    check(mode, proof)
}

fn err(node: &ProofNode, reason: &str) -> ReplayError {
    ReplayError {
        rule: node.rule,
        reason: reason.to_string(),
    }
}

fn check(mode: Mode, node: &ProofNode) -> Result<(), ReplayError> {
    let input = ms(&node.input);
    let output = ms(&node.output);
    match node.rule {
        RuleName::Init => {
            let Interface::Pos(PosFormula::Atom(_)) = &node.goal else {
                return Err(err(node, "init goal must be an atom"));
            };
            expect(node, node.premises.is_empty(), "init has no premises")?;
            expect(node, !node.slack, "init is not slack")?;
            let rest = ms_sub(&input, &one(&node.goal))
                .ok_or_else(|| err(node, "init goal not in context"))?;
            match mode {
                Mode::Strict => expect(node, output == rest, "init output mismatch"),
                Mode::Affine => expect(node, ms_included(&output, &rest), "init output mismatch"),
            }
        }
        RuleName::OneR => {
            expect(node, node.goal == Interface::Pos(PosFormula::One), "1R goal must be 1")?;
            expect(node, node.premises.is_empty(), "1R has no premises")?;
            expect(node, !node.slack, "1R is not slack")?;
            match mode {
                Mode::Strict => expect(node, output == input, "1R consumes nothing"),
                Mode::Affine => expect(node, ms_included(&output, &input), "1R output mismatch"),
            }
        }
        RuleName::TopR => {
            expect(node, node.goal == Interface::Top, "topR goal must be top")?;
            expect(node, node.premises.is_empty(), "topR has no premises")?;
            expect(node, node.slack, "topR is slack")?;
            expect(node, ms_included(&output, &input), "topR output exceeds input")
        }
        RuleName::OneL | RuleName::TensorL => {
            let focus = node
                .focus
                .as_ref()
                .ok_or_else(|| err(node, "left rule without focus"))?;
            let parts = decomposition_parts(focus)
                .ok_or_else(|| err(node, "focus is not decomposable"))?;
            if node.rule == RuleName::OneL && *focus != Interface::Pos(PosFormula::One) {
                return Err(err(node, "1L focus must be 1"));
            }
            let [p] = node.premises.as_slice() else {
                return Err(err(node, "decomposition has one premise"));
            };
            let mut want = ms_sub(&input, &one(focus))
                .ok_or_else(|| err(node, "focus not in context"))?;
            for part in parts {
                *want.entry(part).or_insert(0) += 1;
            }
            expect(node, ms(&p.input) == want, "premise context mismatch")?;
            expect(node, p.goal == node.goal, "premise goal mismatch")?;
            expect(node, ms(&p.output) == output, "output must thread through")?;
            expect(node, p.slack == node.slack, "slack must thread through")?;
            check(mode, p)
        }
        RuleName::TensorR => {
            let (g1, g2) = match &node.goal {
                Interface::Pos(PosFormula::Tensor(l, r)) => (
                    Interface::Pos((**l).clone()),
                    Interface::Pos((**r).clone()),
                ),
                Interface::Tensor(s, n) => (Interface::Pos(s.clone()), (**n).clone()),
                _ => return Err(err(node, "*R goal must be a tensor")),
            };
            let [p1, p2] = node.premises.as_slice() else {
                return Err(err(node, "*R has two premises"));
            };
            expect(node, p1.goal == g1 && p2.goal == g2, "premise goals mismatch")?;
            expect(node, ms(&p1.input) == input, "first premise starts from the input")?;
            expect(
                node,
                ms(&p2.input) == ms(&p1.output),
                "second premise starts from the first leftover",
            )?;
            expect(node, ms(&p2.output) == output, "output mismatch")?;
            expect(node, node.slack == (p1.slack || p2.slack), "slack mismatch")?;
            check(mode, p1)?;
            check(mode, p2)
        }
        RuleName::LolliR => {
            let Interface::Lolli(s, n) = &node.goal else {
                return Err(err(node, "-oR goal must be an implication"));
            };
            let [p] = node.premises.as_slice() else {
                return Err(err(node, "-oR has one premise"));
            };
            let mut want = input.clone();
            *want.entry(Interface::Pos(s.clone())).or_insert(0) += 1;
            expect(node, ms(&p.input) == want, "premise assumes the antecedent")?;
            expect(node, p.goal == **n, "premise goal mismatch")?;
            close_entry(mode, node, &ms(&p.output), p.slack, &input, &output)?;
            expect(node, node.slack == p.slack, "slack mismatch")?;
            check(mode, p)
        }
        RuleName::LolliL => {
            let focus = node
                .focus
                .as_ref()
                .ok_or_else(|| err(node, "-oL needs a focus"))?;
            let Interface::Lolli(s, n) = focus else {
                return Err(err(node, "-oL focus must be an implication"));
            };
            let [p1, p2] = node.premises.as_slice() else {
                return Err(err(node, "-oL has two premises"));
            };
            let rest = ms_sub(&input, &one(focus))
                .ok_or_else(|| err(node, "focus not in context"))?;
            expect(node, p1.goal == Interface::Pos(s.clone()), "first premise proves the antecedent")?;
            expect(node, ms(&p1.input) == rest, "first premise context mismatch")?;
            let mut want2 = ms(&p1.output);
            *want2.entry((**n).clone()).or_insert(0) += 1;
            expect(node, ms(&p2.input) == want2, "second premise assumes the consequent")?;
            expect(node, p2.goal == node.goal, "second premise goal mismatch")?;
            close_entry(mode, node, &ms(&p2.output), p2.slack, &ms(&p1.output), &output)?;
            expect(node, node.slack == (p1.slack || p2.slack), "slack mismatch")?;
            check(mode, p1)?;
            check(mode, p2)
        }
        RuleName::WithR => {
            let Interface::With(a, b) = &node.goal else {
                return Err(err(node, "&R goal must be an alternative"));
            };
            let [p1, p2] = node.premises.as_slice() else {
                return Err(err(node, "&R has two premises"));
            };
            expect(node, p1.goal == **a && p2.goal == **b, "premise goals mismatch")?;
            expect(
                node,
                ms(&p1.input) == input && ms(&p2.input) == input,
                "&R premises share the input",
            )?;
            let o1 = ms(&p1.output);
            let o2 = ms(&p2.output);
            let min = ms_min(&o1, &o2);
            expect(node, output == min, "&R output is the common leftover")?;
            if mode == Mode::Strict {
                expect(
                    node,
                    (o1 == min || p1.slack) && (o2 == min || p2.slack),
                    "&R branches must realize the same consumption",
                )?;
            }
            expect(node, node.slack == (p1.slack && p2.slack), "slack mismatch")?;
            check(mode, p1)?;
            check(mode, p2)
        }
        RuleName::WithL1 | RuleName::WithL2 => {
            let focus = node
                .focus
                .as_ref()
                .ok_or_else(|| err(node, "&L needs a focus"))?;
            let Interface::With(a, b) = focus else {
                return Err(err(node, "&L focus must be an alternative"));
            };
            let branch = if node.rule == RuleName::WithL1 { a } else { b };
            let [p] = node.premises.as_slice() else {
                return Err(err(node, "&L has one premise"));
            };
            let rest = ms_sub(&input, &one(focus))
                .ok_or_else(|| err(node, "focus not in context"))?;
            let mut want = rest.clone();
            *want.entry((**branch).clone()).or_insert(0) += 1;
            expect(node, ms(&p.input) == want, "premise context mismatch")?;
            expect(node, p.goal == node.goal, "premise goal mismatch")?;
            close_entry(mode, node, &ms(&p.output), p.slack, &rest, &output)?;
            expect(node, node.slack == p.slack, "slack mismatch")?;
            check(mode, p)
        }
    }
}

/// Shared output check for rules that add a formula to the premise context:
/// pieces of the added formula may not leak out; leftovers of it require
/// slack (or affine mode), and the output is the premise leftover clipped to
/// the base context.
fn close_entry(
    mode: Mode,
    node: &ProofNode,
    premise_out: &Ms,
    premise_slack: bool,
    base: &Ms,
    output: &Ms,
) -> Result<(), ReplayError> {
    let excess = ms_excess(premise_out, base);
    if !excess.is_empty() && mode == Mode::Strict && !premise_slack {
        return Err(err(
            node,
            "entered formula leaks out unconsumed without slack",
        ));
    }
    expect(
        node,
        *output == ms_min(premise_out, base),
        "output must be the premise leftover clipped to the base context",
    )
}

fn expect(node: &ProofNode, ok: bool, reason: &str) -> Result<(), ReplayError> {
    if ok {
        Ok(())
    } else {
        Err(err(node, reason))
    }
}
