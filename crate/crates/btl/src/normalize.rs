//! Structural-congruence normalizer and decision procedure.
//!
//! The congruence: sequences and selectors are monoids with units Skip and
//! Abort, and sequencing distributes over selection from both sides.
//! Normalization orients the laws toward a selector of sequences: nested
//! Seq/Sel flatten, Skip disappears from sequences, Abort disappears from
//! selector branch lists, and every selector inside a sequence distributes
//! out. Branch order is preserved throughout.
//!
//! Distribution applies only across real branches: an Abort *inside* a
//! sequence stays where it is, along with everything after it, because the
//! annihilation law does not hold — the steps before the failure still
//! change state. Cond and Rep bodies are normalization boundaries; they are
//! normalized recursively in isolation.

use thiserror::Error;

use crate::syntax::BTExpr;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("normal form would exceed the size cap of {cap} nodes")]
pub struct SizeCapExceeded {
    pub cap: usize,
}

/// One selector alternative: a sequence of steps. A step is an Op, Cond, or
/// Rep leaf, or an inert Abort.
type Branch = Vec<BTExpr>;

/// Rewrites `a` to its canonical selector-of-sequences form. Errors if the
/// output would exceed `cap` nodes (distribution is exponential in nesting
/// depth).
pub fn normalize(a: &BTExpr, cap: usize) -> Result<BTExpr, SizeCapExceeded> {
    let branches = branches_of(a, cap)?;
    Ok(rebuild(branches))
}

/// Decides the stated congruence by normal-form comparison. Branch order
/// distinguishes selectors, and a sequence ending in failure is not
/// identified with failure itself.
pub fn congruent(a: &BTExpr, b: &BTExpr, cap: usize) -> Result<bool, SizeCapExceeded> {
    Ok(normalize(a, cap)? == normalize(b, cap)?)
}

fn rebuild(branches: Vec<Branch>) -> BTExpr {
    BTExpr::Sel(branches.into_iter().map(BTExpr::Seq).collect())
}

fn branches_of(a: &BTExpr, cap: usize) -> Result<Vec<Branch>, SizeCapExceeded> {
    let out = match a {
        BTExpr::Op(..) => vec![vec![a.clone()]],
        BTExpr::Cond(s, body) => {
            let body = normalize(body, cap)?;
            vec![vec![BTExpr::cond(s.canonical(), body)]]
        }
        BTExpr::Rep(body) => {
            let body = normalize(body, cap)?;
            vec![vec![BTExpr::rep(body)]]
        }
        BTExpr::Sel(children) => {
            let mut out = Vec::new();
            for c in children {
                out.extend(branches_of(c, cap)?);
                check_cap(&out, cap)?;
            }
            out
        }
        BTExpr::Seq(children) => {
            let mut acc: Vec<Branch> = vec![Vec::new()];
            for c in children {
                let bs = branches_of(c, cap)?;
                if bs.is_empty() {
                    // The child is congruent to Abort: keep it as an inert
                    // step. Later children still distribute past it.
                    for branch in &mut acc {
                        branch.push(BTExpr::abort());
                    }
                } else {
                    let mut next = Vec::with_capacity(acc.len() * bs.len());
                    for prefix in &acc {
                        for b in &bs {
                            let mut branch = prefix.clone();
                            branch.extend(b.iter().cloned());
                            next.push(branch);
                        }
                    }
                    acc = next;
                }
                check_cap(&acc, cap)?;
            }
            acc
        }
    };
    Ok(out)
}

fn check_cap(branches: &[Branch], cap: usize) -> Result<(), SizeCapExceeded> {
    let nodes: usize = branches
        .iter()
        .map(|b| 1 + b.iter().map(BTExpr::node_count).sum::<usize>())
        .sum::<usize>()
        + 1;
    if nodes > cap {
        Err(SizeCapExceeded { cap })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_spec, parse_tree};
    use crate::syntax::Signature;

    const CAP: usize = 10_000;

    fn sig() -> Signature {
        parse_spec("a : 1 -o 1.\nb : 1 -o 1.\nc : 1 -o 1.\nd : 1 -o 1.\n").unwrap()
    }

    fn norm(text: &str) -> BTExpr {
        normalize(&parse_tree(text, &sig()).unwrap(), CAP).unwrap()
    }

    fn cong(a: &str, b: &str) -> bool {
        let s = sig();
        congruent(
            &parse_tree(a, &s).unwrap(),
            &parse_tree(b, &s).unwrap(),
            CAP,
        )
        .unwrap()
    }

    #[test]
    fn skip_deleted_from_sequences() {
        assert_eq!(norm("Seq{Skip; a(); Skip}"), norm("a()"));
        assert_eq!(norm("Seq{Skip; a(); Skip}").to_string(), "Sel{Seq{a()}}");
    }

    #[test]
    fn sequencing_distributes_over_selection() {
        assert_eq!(
            norm("Seq{a(); Sel{b() + c()}}"),
            norm("Sel{Seq{a(); b()} + Seq{a(); c()}}")
        );
        assert_eq!(
            norm("Seq{a(); Sel{b() + c()}}").to_string(),
            "Sel{Seq{a(); b()} + Seq{a(); c()}}"
        );
        // And from the left position.
        assert_eq!(
            norm("Seq{Sel{a() + b()}; c()}"),
            norm("Sel{Seq{a(); c()} + Seq{b(); c()}}")
        );
    }

    #[test]
    fn abort_deleted_from_selectors() {
        assert_eq!(norm("Sel{Abort + a()}"), norm("Sel{a()}"));
        assert_eq!(norm("Sel{Abort + a()}").to_string(), "Sel{Seq{a()}}");
    }

    #[test]
    fn associativity_flattens() {
        assert!(cong("Seq{a(); Seq{b(); c()}}", "Seq{Seq{a(); b()}; c()}"));
        assert!(cong("Sel{a() + Sel{b() + c()}}", "Sel{Sel{a() + b()} + c()}"));
    }

    #[test]
    fn selector_order_matters() {
        assert!(!cong("Sel{a() + b()}", "Sel{b() + a()}"));
    }

    #[test]
    fn no_annihilation() {
        assert!(!cong("Seq{a(); Abort}", "Abort"));
        // Steps after a dead one are preserved, not dropped.
        assert!(!cong("Seq{a(); Abort; b()}", "Seq{a(); Abort}"));
    }

    #[test]
    fn distribution_continues_past_a_dead_step() {
        assert_eq!(
            norm("Seq{a(); Abort; Sel{b() + c()}}"),
            norm("Sel{Seq{a(); Abort; b()} + Seq{a(); Abort; c()}}")
        );
    }

    #[test]
    fn units_normalize_to_themselves() {
        assert_eq!(norm("Skip"), BTExpr::Sel(vec![BTExpr::skip()]));
        assert_eq!(norm("Abort"), BTExpr::abort());
        assert!(cong("Skip", "Seq{Skip; Skip}"));
        assert!(cong("Abort", "Sel{Abort + Abort}"));
        assert!(!cong("Skip", "Abort"));
    }

    #[test]
    fn normalize_is_idempotent() {
        for text in [
            "Seq{a(); Sel{b() + c()}; d()}",
            "Sel{?p. a() + Rep{Seq{b(); Sel{c() + d()}}}}",
            "Seq{Sel{a() + b()}; Sel{c() + d()}}",
            "Skip",
            "Abort",
        ] {
            let once = norm(text);
            let twice = normalize(&once, CAP).unwrap();
            assert_eq!(once, twice, "{text}");
        }
    }

    #[test]
    fn bodies_are_normalized_in_isolation() {
        let n = norm("Rep{Seq{a(); Sel{b() + c()}}}");
        assert_eq!(
            n.to_string(),
            "Sel{Seq{Rep{Sel{Seq{a(); b()} + Seq{a(); c()}}}}}"
        );
    }

    #[test]
    fn cap_stops_exponential_distribution() {
        // Ten seq children of two-way selectors = 1024 branches.
        let text = format!("Seq{{{}}}", vec!["Sel{a() + b()}"; 10].join("; "));
        let t = parse_tree(&text, &sig()).unwrap();
        assert!(normalize(&t, 100).is_err());
        assert!(normalize(&t, 20_000).is_ok());
    }
}
