use super::*;
use crate::parser::{parse_interface, parse_sequent};
use crate::syntax::{Interface, PosFormula};

fn seq(text: &str) -> Sequent {
    parse_sequent(text).unwrap()
}

fn check_proved(s: &Sequent, mode: Mode) -> ProofNode {
    let r = prove(s, mode, 1_000_000);
    match r {
        ProofResult::Proved(p) => {
            replay(s, mode, &p).unwrap_or_else(|e| panic!("replay of {s}: {e}\n{p}"));
            p
        }
        other => panic!("expected proof of {s}, got {other:?}"),
    }
}

fn check_unproved(s: &Sequent, mode: Mode) {
    assert_eq!(prove(s, mode, 1_000_000), ProofResult::Unproved, "{s}");
}

fn oracle_verdict(s: &Sequent, mode: Mode) -> bool {
    match oracle_prove(s, mode).unwrap() {
        ProofResult::Proved(p) => {
            replay(s, mode, &p).unwrap_or_else(|e| panic!("oracle replay of {s}: {e}\n{p}"));
            true
        }
        ProofResult::Unproved => false,
        ProofResult::BudgetExhausted => panic!("oracle gave up on {s}"),
    }
}

#[test]
fn axiom_is_proved_by_init() {
    let s = seq("p |- p");
    for mode in [Mode::Strict, Mode::Affine] {
        let p = check_proved(&s, mode);
        assert_eq!(p.rule, RuleName::Init);
        assert!(oracle_verdict(&s, mode));
    }
}

#[test]
fn weakening_is_exactly_the_mode_difference() {
    let s = seq("p |- 1");
    check_unproved(&s, Mode::Strict);
    check_proved(&s, Mode::Affine);
    assert!(!oracle_verdict(&s, Mode::Strict));
    assert!(oracle_verdict(&s, Mode::Affine));
}

/// The door-world counterexample context: the state releases its resources
/// through a pair of implications that were joined by a tensor.
fn door_counterexample() -> Sequent {
    seq("at_elsewhere, door_unlocked, \
         (at_door*door_unlocked -o door_open)*(at_elsewhere -o at_door) \
         |- door_unlocked")
}

#[test]
fn door_counterexample_proved_affine_only() {
    let s = door_counterexample();
    check_proved(&s, Mode::Affine);
    check_unproved(&s, Mode::Strict);
    assert!(oracle_verdict(&s, Mode::Affine));
    assert!(!oracle_verdict(&s, Mode::Strict));
}

/// The interface of the noise-investigation tree, built by hand.
fn investigation_interface() -> Interface {
    let b1 = parse_interface("heard_noise -o heard_noise * (no_target -o has_target)").unwrap();
    let b2 = parse_interface(
        "has_target -o has_target * at_target * \
         (has_target * at_target * heard_noise -o no_target)",
    )
    .unwrap();
    let b3 = parse_interface("has_cigarette -o 1").unwrap();
    let b4 = Interface::one();
    Interface::with(b1, Interface::with(b2, Interface::with(b3, b4)))
}

#[test]
fn investigation_interface_discharges_strictly() {
    // Pick alternative 2, feed it has_target, then discharge the staged
    // implication with everything it released plus heard_noise.
    let s = Sequent::new(
        vec![
            Interface::Pos(PosFormula::prop("has_target")),
            Interface::Pos(PosFormula::prop("heard_noise")),
            investigation_interface(),
        ],
        Interface::Pos(PosFormula::prop("no_target")),
    );
    check_proved(&s, Mode::Strict);
    check_proved(&s, Mode::Affine);
}

#[test]
fn strict_proofs_are_also_affine() {
    for text in [
        "p |- p",
        "p, q |- q * p",
        "p, p -o q |- q",
        "|- 1",
        "a, a -o b, b -o c |- c",
        "p & q |- q",
    ] {
        let s = seq(text);
        check_proved(&s, Mode::Strict);
        check_proved(&s, Mode::Affine);
        assert!(oracle_verdict(&s, Mode::Strict));
        assert!(oracle_verdict(&s, Mode::Affine));
    }
}

#[test]
fn goal_side_connectives() {
    // Both &R branches must consume the same resources.
    check_proved(&seq("p |- p & p"), Mode::Strict);
    check_unproved(&seq("p, q |- p & q"), Mode::Strict);
    check_proved(&seq("p, q |- p & q"), Mode::Affine);
    check_proved(&seq("p |- q -o q * p"), Mode::Strict);
    check_proved(&seq("p, q |- top"), Mode::Strict);
    check_proved(&seq("p, q |- p * top"), Mode::Strict);
    check_unproved(&seq("p, q |- p & q * q"), Mode::Strict);
    check_unproved(&seq("|- p"), Mode::Affine);
}

#[test]
fn released_resources_cross_tensor_branches() {
    // Proving the tensor requires releasing a * b from the implication
    // before the split; the threaded search must still find it.
    let s = seq("p, p -o a * b |- a * b");
    check_proved(&s, Mode::Strict);
    assert!(oracle_verdict(&s, Mode::Strict));
}

#[test]
fn top_absorbs_leftovers_strictly() {
    let s = seq("p, q, r |- p * top");
    check_proved(&s, Mode::Strict);
    assert!(oracle_verdict(&s, Mode::Strict));
    // But top on the left can never be consumed by a positive goal.
    let s = seq("p, top |- p");
    check_unproved(&s, Mode::Strict);
    assert!(!oracle_verdict(&s, Mode::Strict));
    check_proved(&s, Mode::Affine);
}

#[test]
fn alternatives_in_context_pick_branches() {
    let s = seq("(a -o b) & (a -o c), a |- c");
    check_proved(&s, Mode::Strict);
    assert!(oracle_verdict(&s, Mode::Strict));
    let s = seq("(a -o b) & (a -o c), a |- d");
    check_unproved(&s, Mode::Strict);
    assert!(!oracle_verdict(&s, Mode::Strict));
}

#[test]
fn budget_exhaustion_is_distinct() {
    let s = door_counterexample();
    assert_eq!(prove(&s, Mode::Strict, 3), ProofResult::BudgetExhausted);
}

#[test]
fn unit_contexts_decompose() {
    check_proved(&seq("1, p |- p"), Mode::Strict);
    check_proved(&seq("p * q |- q * p"), Mode::Strict);
    check_proved(&seq("p * (q -o r), q |- p * r"), Mode::Strict);
}

#[test]
fn proof_display_names_rules() {
    let p = check_proved(&seq("p |- p"), Mode::Strict);
    let text = p.to_string();
    assert!(text.contains("[init]"), "{text}");
    assert!(text.contains("|- p"), "{text}");
}

#[test]
fn prove_is_deterministic() {
    let s = door_counterexample();
    let a = prove(&s, Mode::Affine, 100_000);
    let b = prove(&s, Mode::Affine, 100_000);
    assert_eq!(a, b);
}
