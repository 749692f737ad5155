//! Execution traces and their JSON form.

use serde_json::{json, Value};

use crate::syntax::{Atom, Term, WorldState};

/// What a trace event marks. Composite nodes get an enter and an exit event;
/// an op firing (or failing) is a single event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Op,
    CondEnter,
    CondExit,
    SeqEnter,
    SeqExit,
    SelEnter,
    SelExit,
    RepEnter,
    RepExit,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Op => "op",
            EventKind::CondEnter => "cond-enter",
            EventKind::CondExit => "cond-exit",
            EventKind::SeqEnter => "seq-enter",
            EventKind::SeqExit => "seq-exit",
            EventKind::SelEnter => "sel-enter",
            EventKind::SelExit => "sel-exit",
            EventKind::RepEnter => "rep-enter",
            EventKind::RepExit => "rep-exit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventStatus {
    Ok,
    Fail,
}

/// One step of a trace. `consumed`/`produced` are the multiset delta this
/// event applies to the running state: op firings carry their rewrite, and a
/// failing node's exit event carries the undo of its subtree's net effect,
/// so that a failed subtree always nets to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    /// Child indices from the root; Cond and Rep bodies are child 0.
    pub path: Vec<usize>,
    pub kind: EventKind,
    /// Op name and arguments, for op events.
    pub op: Option<(String, Vec<Term>)>,
    pub consumed: Vec<Atom>,
    pub produced: Vec<Atom>,
    pub status: EventStatus,
}

impl TraceEvent {
    pub(super) fn plain(path: Vec<usize>, kind: EventKind, status: EventStatus) -> Self {
        TraceEvent {
            path,
            kind,
            op: None,
            consumed: Vec::new(),
            produced: Vec::new(),
            status,
        }
    }
}

/// The event sequence of one evaluation, replayable against the initial
/// state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: WorldState,
    pub events: Vec<TraceEvent>,
}

impl Trace {
    /// Applies every event delta in order. For a successful evaluation this
    /// reproduces the final state exactly; errors if an event consumes an
    /// atom that is not present at its step.
    pub fn replay(&self) -> Result<WorldState, String> {
        let mut state = self.initial.clone();
        for (i, e) in self.events.iter().enumerate() {
            let consumed: WorldState = e.consumed.iter().cloned().collect();
            state = state.checked_minus(&consumed).ok_or_else(|| {
                format!(
                    "event {i} ({}) consumes atoms missing from the state",
                    e.kind.as_str()
                )
            })?;
            for a in &e.produced {
                state.insert(a.clone()).map_err(|e| e.to_string())?;
            }
        }
        Ok(state)
    }
}

fn atoms_json(atoms: &[Atom]) -> Value {
    Value::Array(atoms.iter().map(|a| Value::String(a.to_string())).collect())
}

fn state_json(d: &WorldState) -> Value {
    Value::Array(d.iter().map(|a| Value::String(a.to_string())).collect())
}

/// The documented trace schema:
/// `{ "initial": [atom], "events": [event], "outcome": "success"|"failure"|"budget", "final": [atom]? }`
/// with each event
/// `{ "path": [int], "kind": str, "op": str?, "args": [str]?, "consumed": [atom], "produced": [atom], "status": "ok"|"fail" }`.
pub fn trace_json(trace: &Trace, outcome: &str, final_state: Option<&WorldState>) -> Value {
    let events: Vec<Value> = trace
        .events
        .iter()
        .map(|e| {
            let mut obj = json!({
                "path": e.path,
                "kind": e.kind.as_str(),
                "consumed": atoms_json(&e.consumed),
                "produced": atoms_json(&e.produced),
                "status": match e.status { EventStatus::Ok => "ok", EventStatus::Fail => "fail" },
            });
            if let Some((name, args)) = &e.op {
                obj["op"] = Value::String(name.clone());
                obj["args"] = Value::Array(
                    args.iter().map(|t| Value::String(t.to_string())).collect(),
                );
            }
            obj
        })
        .collect();
    let mut out = json!({
        "initial": state_json(&trace.initial),
        "events": events,
        "outcome": outcome,
    });
    if let Some(d) = final_state {
        out["final"] = state_json(d);
    }
    out
}
