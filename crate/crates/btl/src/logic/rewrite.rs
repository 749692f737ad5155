//! One step of multiset rewriting: matching an operator declaration against
//! a world state.

use std::collections::BTreeSet;

use crate::syntax::{Atom, OpDecl, Substitution, WorldState};

/// Enumerates every substitution θ extending `partial` that grounds the
/// antecedent with its atoms multiset-included in `d`, paired with the
/// successor state `d - θ(antecedent) + θ(consequent)`.
///
/// Results are deduplicated and come back in lexicographic order of θ. A
/// variable occurring only in the consequent has no occurrence to match
/// against, so it must already be bound by `partial`; matches that would
/// leave the consequent non-ground are not produced.
pub fn match_rule(
    d: &WorldState,
    decl: &OpDecl,
    partial: &Substitution,
) -> Vec<(Substitution, WorldState)> {
    let mut patterns: Vec<Atom> = decl
        .antecedent
        .atom_multiset()
        .iter()
        .map(|a| partial.apply_atom(a))
        .collect();
    patterns.sort();

    let mut found: BTreeSet<Substitution> = BTreeSet::new();
    search(&patterns, d, partial.clone(), &mut found);

    found
        .into_iter()
        .filter_map(|theta| {
            let consumed = decl.consequent_ready(&theta)?;
            let produced = theta_state(&decl.consequent, &theta)?;
            let after = d.checked_minus(&consumed)?.plus(&produced);
            Some((theta, after))
        })
        .collect()
}

impl OpDecl {
    /// θ(antecedent) as a state, when θ grounds it.
    fn consequent_ready(&self, theta: &Substitution) -> Option<WorldState> {
        theta_state(&self.antecedent, theta)
    }
}

fn theta_state(
    s: &crate::syntax::PosFormula,
    theta: &Substitution,
) -> Option<WorldState> {
    let mut out = WorldState::new();
    for a in s.atom_multiset() {
        let g = theta.apply_atom(&a);
        if !g.is_ground() {
            return None;
        }
        out.insert(g).ok()?;
    }
    Some(out)
}

fn search(
    patterns: &[Atom],
    remaining: &WorldState,
    theta: Substitution,
    found: &mut BTreeSet<Substitution>,
) {
    let Some((pat, rest)) = patterns.split_first() else {
        found.insert(theta);
        return;
    };
    let pat = theta.apply_atom(pat);
    if pat.is_ground() {
        if remaining.count(&pat) > 0 {
            let mut next = remaining.clone();
            next.remove_n(&pat, 1);
            search(rest, &next, theta, found);
        }
        return;
    }
    let candidates: Vec<Atom> = remaining
        .iter_counts()
        .map(|(a, _)| a.clone())
        .filter(|a| a.predicate == pat.predicate && a.args.len() == pat.args.len())
        .collect();
    for candidate in candidates {
        if let Some(extended) = unify(&pat, &candidate, &theta) {
            let mut next = remaining.clone();
            next.remove_n(&candidate, 1);
            search(rest, &next, extended, found);
        }
    }
}

fn unify(pattern: &Atom, ground: &Atom, theta: &Substitution) -> Option<Substitution> {
    use crate::syntax::Term;
    let mut out = theta.clone();
    for (p, g) in pattern.args.iter().zip(&ground.args) {
        match p {
            Term::Const(_) => {
                if p != g {
                    return None;
                }
            }
            Term::Var(v) => match out.get(v) {
                Some(bound) => {
                    if bound != g {
                        return None;
                    }
                }
                None => out.bind(v.clone(), g.clone()),
            },
        }
    }
    Some(out)
}
