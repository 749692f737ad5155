use super::*;
use crate::parser::{parse_spec, parse_state, parse_tree};
use crate::syntax::Atom;

fn investigation() -> Signature {
    parse_spec(
        "set_target : no_target -o has_target.\n\
         move_to_target : has_target -o has_target * at_target.\n\
         investigate_target : has_target * at_target * heard_noise -o no_target.\n\
         idle_smoke : has_cigarette -o 1.\n\
         idle_pace : 1 -o 1.\n",
    )
    .unwrap()
}

fn investigation_tree(sig: &Signature) -> BTExpr {
    parse_tree(
        "Sel{?heard_noise. set_target() +\n\
             Seq{move_to_target(); investigate_target()} +\n\
             Sel{idle_smoke() + idle_pace()}}",
        sig,
    )
    .unwrap()
}

const BUDGET: u64 = 100_000;

fn run(sig: &Signature, tree: &str, state: &str) -> EvalOutcome {
    let t = parse_tree(tree, sig).unwrap();
    let d = parse_state(state).unwrap();
    eval(sig, &t, &d, BUDGET).unwrap()
}

#[test]
fn investigation_with_target_only_succeeds_through_idling() {
    // Branch 1 fails (no noise heard), branch 2 moves then fails to
    // investigate, branch 3 falls through to pacing, which changes nothing.
    let sig = investigation();
    let tree = investigation_tree(&sig);
    let d = parse_state("{has_target}").unwrap();
    let out = eval(&sig, &tree, &d, BUDGET).unwrap();
    assert_eq!(out.final_state(), Some(&d));
    assert_eq!(out.trace().replay().unwrap(), d);
}

#[test]
fn investigation_with_noise_ends_with_no_target() {
    let sig = investigation();
    let tree = investigation_tree(&sig);
    let d = parse_state("{has_target, heard_noise}").unwrap();
    let out = eval(&sig, &tree, &d, BUDGET).unwrap();
    assert_eq!(out.final_state(), Some(&parse_state("{no_target}").unwrap()));
    assert_eq!(out.trace().replay().unwrap(), parse_state("{no_target}").unwrap());
}

#[test]
fn investigation_branch_two_fails_after_moving() {
    let sig = investigation();
    let out = run(
        &sig,
        "Seq{move_to_target(); investigate_target()}",
        "{has_target}",
    );
    let EvalOutcome::Failure { trace } = &out else {
        panic!("expected failure, got {out:?}");
    };
    let ops: Vec<_> = trace
        .events
        .iter()
        .filter(|e| e.kind == EventKind::Op)
        .collect();
    assert_eq!(ops.len(), 2);
    assert_eq!(ops[0].op.as_ref().unwrap().0, "move_to_target");
    assert_eq!(ops[0].status, EventStatus::Ok);
    assert!(ops[0].produced.contains(&Atom::prop("at_target")));
    assert_eq!(ops[1].op.as_ref().unwrap().0, "investigate_target");
    assert_eq!(ops[1].status, EventStatus::Fail);
    // The failure propagates to the sequence root, which nets to zero.
    assert_eq!(trace.replay().unwrap(), trace.initial);
}

#[test]
fn repeating_an_unfailing_body_exhausts_the_budget() {
    let sig = investigation();
    let out = run(&sig, "Rep{idle_pace()}", "{}");
    assert!(matches!(out, EvalOutcome::BudgetExhausted { .. }));
}

#[test]
fn repeater_succeeds_with_the_last_state() {
    let sig = investigation();
    let out = run(
        &sig,
        "Rep{idle_smoke()}",
        "{has_cigarette, has_cigarette}",
    );
    assert_eq!(out.final_state(), Some(&parse_state("{}").unwrap()));
}

#[test]
fn skip_returns_the_state_and_abort_fails() {
    let sig = investigation();
    let d = parse_state("{has_target}").unwrap();
    let out = run(&sig, "Skip", "{has_target}");
    assert_eq!(out.final_state(), Some(&d));
    let out = run(&sig, "Abort", "{has_target}");
    assert!(matches!(out, EvalOutcome::Failure { .. }));
}

#[test]
fn unit_laws_hold_directly() {
    let sig = investigation();
    for (a, b) in [
        ("Seq{Skip; idle_smoke()}", "idle_smoke()"),
        ("Seq{idle_smoke(); Skip}", "idle_smoke()"),
        ("Sel{Abort + idle_smoke()}", "Sel{idle_smoke()}"),
        ("Sel{idle_smoke() + Abort}", "Sel{idle_smoke()}"),
    ] {
        let oa = run(&sig, a, "{has_cigarette}");
        let ob = run(&sig, b, "{has_cigarette}");
        assert_eq!(oa.final_state(), ob.final_state(), "{a} vs {b}");
    }
}

#[test]
fn annihilation_law_does_not_hold() {
    // Seq{smoke; Abort} and Abort both fail, but the states they die in
    // differ: the sequence consumed the cigarette first.
    let sig = investigation();
    let d = parse_state("{has_cigarette}").unwrap();
    let seq = parse_tree("Seq{idle_smoke(); Abort}", &sig).unwrap();
    let abort = BTExpr::abort();

    let out_seq = eval(&sig, &seq, &d, BUDGET).unwrap();
    let out_abort = eval(&sig, &abort, &d, BUDGET).unwrap();
    assert!(matches!(out_seq, EvalOutcome::Failure { .. }));
    assert!(matches!(out_abort, EvalOutcome::Failure { .. }));

    let state_before_failure = |t: &Trace| {
        // Replay up to (not including) the failing exit of the root.
        let mut state = t.initial.clone();
        for e in &t.events {
            if e.status == EventStatus::Fail {
                break;
            }
            let consumed: WorldState = e.consumed.iter().cloned().collect();
            state = state.checked_minus(&consumed).unwrap();
            for a in &e.produced {
                state.insert(a.clone()).unwrap();
            }
        }
        state
    };
    let seq_state = state_before_failure(out_seq.trace());
    let abort_state = state_before_failure(out_abort.trace());
    assert_eq!(seq_state, parse_state("{}").unwrap());
    assert_eq!(abort_state, d);
    assert_ne!(seq_state, abort_state);
}

#[test]
fn selector_branches_restart_from_the_entry_state() {
    // Branch 1 makes progress then dies; branch 2 must still see the
    // original state, including the resource branch 1 consumed.
    let sig = parse_spec(
        "consume : token -o progress.\n\
         need_token : token -o done.\n",
    )
    .unwrap();
    let out = run(
        &sig,
        "Sel{Seq{consume(); Abort} + need_token()}",
        "{token}",
    );
    assert_eq!(out.final_state(), Some(&parse_state("{done}").unwrap()));
}

#[test]
fn eval_all_explores_both_selector_branches() {
    let sig = parse_spec("smoke : has_cigarette -o 1.\npace : 1 -o 1.\n").unwrap();
    let t = parse_tree("Sel{smoke() + pace()}", &sig).unwrap();
    let d = parse_state("{has_cigarette}").unwrap();
    let got = eval_all(&sig, &t, &d, BUDGET).unwrap();
    let want: std::collections::BTreeSet<_> = [
        AngelicOutcome::State(parse_state("{}").unwrap()),
        AngelicOutcome::State(d.clone()),
    ]
    .into();
    assert_eq!(got, want);
}

#[test]
fn eval_all_units() {
    let sig = investigation();
    let d = parse_state("{has_target}").unwrap();
    let skip = BTExpr::skip();
    assert_eq!(
        eval_all(&sig, &skip, &d, BUDGET).unwrap(),
        [AngelicOutcome::State(d.clone())].into()
    );
    let abort = BTExpr::abort();
    assert_eq!(
        eval_all(&sig, &abort, &d, BUDGET).unwrap(),
        [AngelicOutcome::Fail].into()
    );
}

#[test]
fn eval_all_rejects_repeaters() {
    let sig = investigation();
    let t = parse_tree("Rep{idle_pace()}", &sig).unwrap();
    let err = eval_all(&sig, &t, &WorldState::new(), BUDGET).unwrap_err();
    assert_eq!(err, EvalAllError::RepUnsupported);
}

#[test]
fn eval_all_contains_eval_outcome() {
    let sig = investigation();
    let tree = investigation_tree(&sig);
    for state in ["{has_target}", "{has_target, heard_noise}", "{}"] {
        let d = parse_state(state).unwrap();
        let det = eval(&sig, &tree, &d, BUDGET).unwrap();
        let all = eval_all(&sig, &tree, &d, BUDGET).unwrap();
        let det_outcome = match det.final_state() {
            Some(s) => AngelicOutcome::State(s.clone()),
            None => AngelicOutcome::Fail,
        };
        assert!(all.contains(&det_outcome), "{state}: {all:?}");
    }
}

#[test]
fn dot_shows_resource_flow_between_firings() {
    let sig = investigation();
    let out = run(
        &sig,
        "Seq{set_target(); move_to_target()}",
        "{no_target}",
    );
    let dot = trace_to_dot(out.trace());
    assert!(dot.contains("f1 [label=\"set_target()\"]"), "{dot}");
    assert!(dot.contains("f2 [label=\"move_to_target()\"]"), "{dot}");
    assert!(dot.contains("f1 -> f2 [label=\"has_target\"]"), "{dot}");
    assert!(dot.contains("n0 -> f1 [label=\"no_target\"]"), "{dot}");
}

#[test]
fn dot_of_empty_trace_is_just_the_initial_state() {
    let trace = Trace {
        initial: parse_state("{p}").unwrap(),
        events: Vec::new(),
    };
    let dot = trace_to_dot(&trace);
    assert!(dot.contains("n0 [label=\"{p}\", shape=box]"));
    assert!(!dot.contains("f1"));
}

#[test]
fn dot_chain_for_successful_investigation_prefix() {
    let sig = investigation();
    let tree = investigation_tree(&sig);
    let d = parse_state("{has_target, heard_noise}").unwrap();
    let out = eval(&sig, &tree, &d, BUDGET).unwrap();
    let dot = trace_to_dot(out.trace());
    // Two firings: move_to_target feeding investigate_target.
    assert!(dot.contains("f1 [label=\"move_to_target()\"]"), "{dot}");
    assert!(dot.contains("f2 [label=\"investigate_target()\"]"), "{dot}");
    assert!(dot.contains("f1 -> f2 [label=\"at_target\"]"), "{dot}");
    assert!(dot.contains("f1 -> f2 [label=\"has_target\"]"), "{dot}");
    assert!(dot.contains("n0 -> f2 [label=\"heard_noise\"]"), "{dot}");
    assert!(!dot.contains("f3"), "{dot}");
}

#[test]
fn rolled_back_firings_are_dashed_without_edges() {
    let sig = investigation();
    let tree = investigation_tree(&sig);
    let d = parse_state("{has_target}").unwrap();
    let out = eval(&sig, &tree, &d, BUDGET).unwrap();
    let dot = trace_to_dot(out.trace());
    // move_to_target fired inside the failed branch 2.
    assert!(
        dot.contains("f1 [label=\"move_to_target()\", style=dashed]"),
        "{dot}"
    );
    assert!(!dot.contains("f1 ->"), "{dot}");
}

#[test]
fn trace_json_matches_schema() {
    let sig = investigation();
    let out = run(&sig, "Seq{move_to_target(); investigate_target()}", "{has_target}");
    let v = trace_json(out.trace(), "failure", None);
    assert_eq!(v["outcome"], "failure");
    assert_eq!(v["initial"][0], "has_target");
    let ev = v["events"].as_array().unwrap();
    assert!(ev.iter().any(|e| e["kind"] == "op" && e["op"] == "move_to_target"));
    assert!(ev.iter().all(|e| e["status"] == "ok" || e["status"] == "fail"));
    assert!(v.get("final").is_none());
}

#[test]
fn budget_counts_node_visits() {
    let sig = investigation();
    let t = parse_tree("Seq{idle_pace(); idle_pace()}", &sig).unwrap();
    let d = WorldState::new();
    // Seq + two children = 3 visits.
    assert!(matches!(
        eval(&sig, &t, &d, 2).unwrap(),
        EvalOutcome::BudgetExhausted { .. }
    ));
    assert!(eval(&sig, &t, &d, 3).unwrap().is_success());
}
