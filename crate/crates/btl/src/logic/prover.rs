//! The production prover: backward search with resource threading.
//!
//! Contexts are passed as input/output pairs instead of being split up front
//! at `*R` and `-oL`: a premise consumes what it needs from the input and
//! hands the leftovers to the next premise. Positive context formulas are
//! decomposed into atoms as they enter (recording the `*L`/`1L` steps), so
//! the search state is a multiset of atoms plus the remaining implications,
//! alternatives, and `top`s.
//!
//! Proof trees record the threaded input/output contexts per node; the
//! `slack` flag marks subproofs containing `topR`, which can absorb any
//! leftovers. Leftover admissibility is decided at the root (strict mode
//! requires an empty or absorbable leftover), at `&R` (both branches must
//! realize the same consumption, up to slack), and wherever a formula enters
//! the context (its pieces may not leak back out unconsumed).

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use crate::syntax::{Atom, Interface, PosFormula};

use super::{Mode, ProofNode, ProofResult, RuleName, Sequent};

/// Proves `seq` in the given mode, spending at most `budget` rule attempts.
pub fn prove(seq: &Sequent, mode: Mode, budget: u64) -> ProofResult {
    let goal = seq.goal.canonical_payloads();
    let entry: Vec<Interface> = seq
        .context
        .iter()
        .map(Interface::canonical_payloads)
        .collect();

    let mut ctx = Ctx::default();
    let mut steps = Vec::new();
    for f in &entry {
        admit(&mut ctx, f, &mut steps);
    }
    let mut entry_sorted = entry;
    entry_sorted.sort();

    let searcher = Searcher {
        mode,
        budget: Cell::new(budget),
    };
    let mut found: Option<ProofNode> = None;
    let flow = searcher.search(&ctx, &goal, &mut |c: Cand| {
        let accepted = match mode {
            Mode::Affine => true,
            Mode::Strict => c.out.is_empty() || c.slack,
        };
        if accepted {
            found = Some(wrap_chain(&steps, entry_sorted.clone(), c.proof));
            ControlFlow::Break(Stop::Found)
        } else {
            ControlFlow::Continue(())
        }
    });
    match (found, flow) {
        (Some(p), _) => ProofResult::Proved(p),
        (None, ControlFlow::Break(Stop::Budget)) => ProofResult::BudgetExhausted,
        (None, _) => ProofResult::Unproved,
    }
}

#[derive(Clone, Copy)]
pub(super) enum Stop {
    Found,
    Budget,
}

type Flow = ControlFlow<Stop>;

/// Search context: atoms decomposed, with implications, alternatives, and
/// `top`s kept whole.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub(super) struct Ctx {
    atoms: BTreeMap<Atom, usize>,
    complex: BTreeMap<Interface, usize>,
}

impl Ctx {
    fn add_atom(&mut self, a: Atom) {
        *self.atoms.entry(a).or_insert(0) += 1;
    }

    fn remove_atom(&mut self, a: &Atom) {
        let n = self.atoms.get_mut(a).expect("atom present");
        *n -= 1;
        if *n == 0 {
            self.atoms.remove(a);
        }
    }

    fn add_complex(&mut self, f: Interface) {
        *self.complex.entry(f).or_insert(0) += 1;
    }

    fn remove_complex(&mut self, f: &Interface) {
        let n = self.complex.get_mut(f).expect("formula present");
        *n -= 1;
        if *n == 0 {
            self.complex.remove(f);
        }
    }

    fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.complex.is_empty()
    }

    fn has_complex(&self) -> bool {
        !self.complex.is_empty()
    }

    /// The context as a sorted multiset of interface formulas.
    fn to_vec(&self) -> Vec<Interface> {
        let mut out: Vec<Interface> = Vec::new();
        for (a, &n) in &self.atoms {
            for _ in 0..n {
                out.push(Interface::Pos(PosFormula::Atom(a.clone())));
            }
        }
        for (f, &n) in &self.complex {
            for _ in 0..n {
                out.push(f.clone());
            }
        }
        out.sort();
        out
    }

    /// Pointwise minimum with `other`.
    fn pointwise_min(&self, other: &Ctx) -> Ctx {
        let mut out = Ctx::default();
        for (a, &n) in &self.atoms {
            let m = n.min(other.atoms.get(a).copied().unwrap_or(0));
            if m > 0 {
                out.atoms.insert(a.clone(), m);
            }
        }
        for (f, &n) in &self.complex {
            let m = n.min(other.complex.get(f).copied().unwrap_or(0));
            if m > 0 {
                out.complex.insert(f.clone(), m);
            }
        }
        out
    }

    /// Pointwise `self - other`, clamped at zero: what `self` holds beyond
    /// `other`.
    fn excess_over(&self, other: &Ctx) -> Ctx {
        let mut out = Ctx::default();
        for (a, &n) in &self.atoms {
            let m = n.saturating_sub(other.atoms.get(a).copied().unwrap_or(0));
            if m > 0 {
                out.atoms.insert(a.clone(), m);
            }
        }
        for (f, &n) in &self.complex {
            let m = n.saturating_sub(other.complex.get(f).copied().unwrap_or(0));
            if m > 0 {
                out.complex.insert(f.clone(), m);
            }
        }
        out
    }
}

/// Adds a formula to the search context, decomposing positives into atoms
/// and recording the `1L`/`*L` steps performed.
fn admit(ctx: &mut Ctx, f: &Interface, steps: &mut Vec<(RuleName, Interface)>) {
    match f {
        Interface::Pos(PosFormula::One) => steps.push((RuleName::OneL, f.clone())),
        Interface::Pos(PosFormula::Atom(a)) => ctx.add_atom(a.clone()),
        Interface::Pos(PosFormula::Tensor(l, r)) => {
            steps.push((RuleName::TensorL, f.clone()));
            admit(ctx, &Interface::Pos((**l).clone()), steps);
            admit(ctx, &Interface::Pos((**r).clone()), steps);
        }
        Interface::Tensor(s, n) => {
            steps.push((RuleName::TensorL, f.clone()));
            admit(ctx, &Interface::Pos(s.clone()), steps);
            admit(ctx, n, steps);
        }
        other => ctx.add_complex(other.clone()),
    }
}

/// The pieces a `1L`/`*L` step replaces its focus with.
pub(super) fn decomposition_parts(f: &Interface) -> Option<Vec<Interface>> {
    match f {
        Interface::Pos(PosFormula::One) => Some(vec![]),
        Interface::Pos(PosFormula::Tensor(l, r)) => Some(vec![
            Interface::Pos((**l).clone()),
            Interface::Pos((**r).clone()),
        ]),
        Interface::Tensor(s, n) => {
            Some(vec![Interface::Pos(s.clone()), (**n).clone()])
        }
        _ => None,
    }
}

fn vec_remove(v: &mut Vec<Interface>, f: &Interface) {
    let i = v.iter().position(|x| x == f).expect("focus in context");
    v.remove(i);
}

fn vec_insert(v: &mut Vec<Interface>, f: Interface) {
    let i = v.binary_search(&f).unwrap_or_else(|i| i);
    v.insert(i, f);
}

/// Wraps `inner` in the recorded decomposition steps, threading contexts.
fn wrap_chain(
    steps: &[(RuleName, Interface)],
    entry: Vec<Interface>,
    inner: ProofNode,
) -> ProofNode {
    let mut contexts = Vec::with_capacity(steps.len());
    let mut cur = entry;
    for (_, focus) in steps {
        contexts.push(cur.clone());
        vec_remove(&mut cur, focus);
        for p in decomposition_parts(focus).expect("decomposable focus") {
            vec_insert(&mut cur, p);
        }
    }
    debug_assert_eq!(cur, inner.input, "decomposition chain mismatch");
    let mut node = inner;
    for (i, (rule, focus)) in steps.iter().enumerate().rev() {
        let output = node.output.clone();
        let goal = node.goal.clone();
        let slack = node.slack;
        node = ProofNode {
            rule: *rule,
            input: contexts[i].clone(),
            output,
            goal,
            slack,
            focus: Some(focus.clone()),
            premises: vec![node],
        };
    }
    node
}

#[derive(Debug, Clone)]
struct Cand {
    out: Ctx,
    slack: bool,
    proof: ProofNode,
}

struct Searcher {
    mode: Mode,
    budget: Cell<u64>,
}

impl Searcher {
    fn tick(&self) -> Flow {
        let b = self.budget.get();
        if b == 0 {
            return ControlFlow::Break(Stop::Budget);
        }
        self.budget.set(b - 1);
        ControlFlow::Continue(())
    }

    /// Enumerates proof candidates for `ctx |- goal` in a fixed order,
    /// deduplicated on (leftover, slack). The right rule for the goal is
    /// tried first, then the left rules on each remaining context formula.
    fn search(
        &self,
        ctx: &Ctx,
        goal: &Interface,
        emit: &mut dyn FnMut(Cand) -> Flow,
    ) -> Flow {
        let mut seen: BTreeSet<(Ctx, bool)> = BTreeSet::new();
        let mut emit = |c: Cand| -> Flow {
            if seen.insert((c.out.clone(), c.slack)) {
                emit(c)
            } else {
                ControlFlow::Continue(())
            }
        };
        self.right_rule(ctx, goal, &mut emit)?;
        self.left_rules(ctx, goal, &mut emit)?;
        ControlFlow::Continue(())
    }

    fn right_rule(
        &self,
        ctx: &Ctx,
        goal: &Interface,
        emit: &mut dyn FnMut(Cand) -> Flow,
    ) -> Flow {
        match goal {
            Interface::Pos(s) if !ctx.has_complex() => {
                // Flat context, positive goal: the only possible consumption
                // is exactly the goal's atoms.
                self.tick()?;
                self.flat_pos(ctx, s, emit)
            }
            Interface::Pos(PosFormula::One) => {
                self.tick()?;
                emit(Cand {
                    out: ctx.clone(),
                    slack: false,
                    proof: leaf(RuleName::OneR, ctx, ctx, goal, false),
                })
            }
            Interface::Pos(PosFormula::Atom(a)) => {
                self.tick()?;
                if ctx.atoms.contains_key(a) {
                    let mut out = ctx.clone();
                    out.remove_atom(a);
                    let proof = leaf(RuleName::Init, ctx, &out, goal, false);
                    emit(Cand {
                        out,
                        slack: false,
                        proof,
                    })
                } else {
                    ControlFlow::Continue(())
                }
            }
            Interface::Pos(PosFormula::Tensor(l, r)) => self.tensor_right(
                ctx,
                goal,
                &Interface::Pos((**l).clone()),
                &Interface::Pos((**r).clone()),
                emit,
            ),
            Interface::Tensor(s, n) => {
                self.tensor_right(ctx, goal, &Interface::Pos(s.clone()), n, emit)
            }
            Interface::Lolli(s, n) => self.lolli_right(ctx, goal, s, n, emit),
            Interface::With(a, b) => self.with_right(ctx, goal, a, b, emit),
            Interface::Top => {
                self.tick()?;
                emit(Cand {
                    out: ctx.clone(),
                    slack: true,
                    proof: leaf(RuleName::TopR, ctx, ctx, goal, true),
                })
            }
        }
    }

    /// Flat fast path: with no implications or alternatives left, a positive
    /// goal is provable exactly when its atoms are included in the context,
    /// and the consumption is forced.
    fn flat_pos(&self, ctx: &Ctx, s: &PosFormula, emit: &mut dyn FnMut(Cand) -> Flow) -> Flow {
        let mut needed: BTreeMap<&Atom, usize> = BTreeMap::new();
        let atoms = s.atom_multiset();
        for a in &atoms {
            *needed.entry(a).or_insert(0) += 1;
        }
        for (a, n) in &needed {
            if ctx.atoms.get(*a).copied().unwrap_or(0) < *n {
                return ControlFlow::Continue(());
            }
        }
        let (proof, out) = build_flat(ctx, s);
        emit(Cand {
            out,
            slack: false,
            proof,
        })
    }

    fn tensor_right(
        &self,
        ctx: &Ctx,
        goal: &Interface,
        g1: &Interface,
        g2: &Interface,
        emit: &mut dyn FnMut(Cand) -> Flow,
    ) -> Flow {
        self.tick()?;
        self.search(ctx, g1, &mut |c1: Cand| {
            self.search(&c1.out, g2, &mut |c2: Cand| {
                let slack = c1.slack || c2.slack;
                let proof = ProofNode {
                    rule: RuleName::TensorR,
                    input: ctx.to_vec(),
                    output: c2.out.to_vec(),
                    goal: goal.clone(),
                    slack,
                    focus: None,
                    premises: vec![c1.proof.clone(), c2.proof.clone()],
                };
                emit(Cand {
                    out: c2.out.clone(),
                    slack,
                    proof,
                })
            })
        })
    }

    fn lolli_right(
        &self,
        ctx: &Ctx,
        goal: &Interface,
        s: &PosFormula,
        n: &Interface,
        emit: &mut dyn FnMut(Cand) -> Flow,
    ) -> Flow {
        self.tick()?;
        let assumed = Interface::Pos(s.clone());
        let mut inner_ctx = ctx.clone();
        let mut steps = Vec::new();
        admit(&mut inner_ctx, &assumed, &mut steps);
        let mut entry = ctx.to_vec();
        vec_insert(&mut entry, assumed);
        self.search(&inner_ctx, n, &mut |c: Cand| {
            let Some((out, slack)) = self.close_entry(&c, ctx) else {
                return ControlFlow::Continue(());
            };
            let premise = wrap_chain(&steps, entry.clone(), c.proof.clone());
            let proof = ProofNode {
                rule: RuleName::LolliR,
                input: ctx.to_vec(),
                output: out.to_vec(),
                goal: goal.clone(),
                slack,
                focus: None,
                premises: vec![premise],
            };
            emit(Cand { out, slack, proof })
        })
    }

    fn with_right(
        &self,
        ctx: &Ctx,
        goal: &Interface,
        a: &Interface,
        b: &Interface,
        emit: &mut dyn FnMut(Cand) -> Flow,
    ) -> Flow {
        self.tick()?;
        self.search(ctx, a, &mut |c1: Cand| {
            self.search(ctx, b, &mut |c2: Cand| {
                // Both branches share the input; they are compatible when
                // they realize the same consumption, up to slack (or any
                // difference, in affine mode).
                let out = c1.out.pointwise_min(&c2.out);
                let ok = match self.mode {
                    Mode::Affine => true,
                    Mode::Strict => {
                        (c1.out == out || c1.slack) && (c2.out == out || c2.slack)
                    }
                };
                if !ok {
                    return ControlFlow::Continue(());
                }
                let slack = c1.slack && c2.slack;
                let proof = ProofNode {
                    rule: RuleName::WithR,
                    input: ctx.to_vec(),
                    output: out.to_vec(),
                    goal: goal.clone(),
                    slack,
                    focus: None,
                    premises: vec![c1.proof.clone(), c2.proof.clone()],
                };
                emit(Cand { out, slack, proof })
            })
        })
    }

    fn left_rules(
        &self,
        ctx: &Ctx,
        goal: &Interface,
        emit: &mut dyn FnMut(Cand) -> Flow,
    ) -> Flow {
        let foci: Vec<Interface> = ctx.complex.keys().cloned().collect();
        for f in foci {
            match &f {
                Interface::Lolli(s, n) => self.lolli_left(ctx, goal, &f, s, n, emit)?,
                Interface::With(a, b) => {
                    self.with_left(ctx, goal, &f, a, RuleName::WithL1, emit)?;
                    self.with_left(ctx, goal, &f, b, RuleName::WithL2, emit)?;
                }
                // No left rule for top: it can only be absorbed by topR or
                // discarded by weakening.
                Interface::Top => {}
                _ => unreachable!("positives are decomposed on entry"),
            }
        }
        ControlFlow::Continue(())
    }

    fn lolli_left(
        &self,
        ctx: &Ctx,
        goal: &Interface,
        f: &Interface,
        s: &PosFormula,
        n: &Interface,
        emit: &mut dyn FnMut(Cand) -> Flow,
    ) -> Flow {
        self.tick()?;
        let mut without = ctx.clone();
        without.remove_complex(f);
        let arg_goal = Interface::Pos(s.clone());
        self.search(&without, &arg_goal, &mut |c1: Cand| {
            let mut inner_ctx = c1.out.clone();
            let mut steps = Vec::new();
            admit(&mut inner_ctx, n, &mut steps);
            let mut entry = c1.out.to_vec();
            vec_insert(&mut entry, n.clone());
            self.search(&inner_ctx, goal, &mut |c2: Cand| {
                let Some((out, _)) = self.close_entry(&c2, &c1.out) else {
                    return ControlFlow::Continue(());
                };
                let slack = c1.slack || c2.slack;
                let premise2 = wrap_chain(&steps, entry.clone(), c2.proof.clone());
                let proof = ProofNode {
                    rule: RuleName::LolliL,
                    input: ctx.to_vec(),
                    output: out.to_vec(),
                    goal: goal.clone(),
                    slack,
                    focus: Some(f.clone()),
                    premises: vec![c1.proof.clone(), premise2],
                };
                emit(Cand { out, slack, proof })
            })
        })
    }

    fn with_left(
        &self,
        ctx: &Ctx,
        goal: &Interface,
        f: &Interface,
        branch: &Interface,
        rule: RuleName,
        emit: &mut dyn FnMut(Cand) -> Flow,
    ) -> Flow {
        self.tick()?;
        let mut base = ctx.clone();
        base.remove_complex(f);
        let mut inner_ctx = base.clone();
        let mut steps = Vec::new();
        admit(&mut inner_ctx, branch, &mut steps);
        let mut entry = base.to_vec();
        vec_insert(&mut entry, branch.clone());
        self.search(&inner_ctx, goal, &mut |c: Cand| {
            let Some((out, slack)) = self.close_entry(&c, &base) else {
                return ControlFlow::Continue(());
            };
            let premise = wrap_chain(&steps, entry.clone(), c.proof.clone());
            let proof = ProofNode {
                rule,
                input: ctx.to_vec(),
                output: out.to_vec(),
                goal: goal.clone(),
                slack,
                focus: Some(f.clone()),
                premises: vec![premise],
            };
            emit(Cand { out, slack, proof })
        })
    }

    /// Validates a candidate that ran with `base` extended by an entering
    /// formula: the formula's pieces may not leak out unconsumed. Leftover
    /// pieces are admissible when the premise can absorb them (slack) or the
    /// mode discards them (affine); the output is then clipped to `base`.
    fn close_entry(&self, c: &Cand, base: &Ctx) -> Option<(Ctx, bool)> {
        let excess = c.out.excess_over(base);
        if excess.is_empty() {
            Some((c.out.clone(), c.slack))
        } else if self.mode == Mode::Affine || c.slack {
            Some((c.out.pointwise_min(base), c.slack))
        } else {
            None
        }
    }
}

fn leaf(rule: RuleName, input: &Ctx, output: &Ctx, goal: &Interface, slack: bool) -> ProofNode {
    ProofNode {
        rule,
        input: input.to_vec(),
        output: output.to_vec(),
        goal: goal.clone(),
        slack,
        focus: None,
        premises: Vec::new(),
    }
}

/// Builds the forced proof of a positive goal from a flat context whose
/// atoms cover it.
fn build_flat(ctx: &Ctx, s: &PosFormula) -> (ProofNode, Ctx) {
    match s {
        PosFormula::One => (
            leaf(RuleName::OneR, ctx, ctx, &Interface::Pos(PosFormula::One), false),
            ctx.clone(),
        ),
        PosFormula::Atom(a) => {
            let mut out = ctx.clone();
            out.remove_atom(a);
            (
                leaf(
                    RuleName::Init,
                    ctx,
                    &out,
                    &Interface::Pos(s.clone()),
                    false,
                ),
                out,
            )
        }
        PosFormula::Tensor(l, r) => {
            let (p1, mid) = build_flat(ctx, l);
            let (p2, out) = build_flat(&mid, r);
            let node = ProofNode {
                rule: RuleName::TensorR,
                input: ctx.to_vec(),
                output: out.to_vec(),
                goal: Interface::Pos(s.clone()),
                slack: false,
                focus: None,
                premises: vec![p1, p2],
            };
            (node, out)
        }
    }
}
