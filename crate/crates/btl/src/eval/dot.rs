//! DOT export of the resource flow in a trace.
//!
//! One node per op firing plus a node for the initial state; an edge from A
//! to B labeled with an atom means B consumed an atom that A produced.
//! Producers are matched FIFO per atom identity, so a consumer links to the
//! oldest live producer of that atom. Firings whose effects were rolled back
//! by an enclosing failure are kept, dashed, with their edges dropped.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write;

use crate::syntax::Atom;

use super::{EventKind, EventStatus, Trace};

pub fn trace_to_dot(trace: &Trace) -> String {
    let mut firings: Vec<(String, bool)> = Vec::new(); // label, rolled_back
    let mut edges: Vec<(usize, usize, Atom)> = Vec::new(); // node ids: 0 = initial
    let mut queues: BTreeMap<Atom, VecDeque<usize>> = BTreeMap::new();
    for a in trace.initial.iter() {
        queues.entry(a.clone()).or_default().push_back(0);
    }

    // (queues snapshot, edge count, firing count) per open composite node.
    let mut checkpoints: Vec<(BTreeMap<Atom, VecDeque<usize>>, usize, usize)> = Vec::new();

    for e in &trace.events {
        match e.kind {
            EventKind::Op => {
                if e.status == EventStatus::Fail {
                    continue;
                }
                let (name, args) = e.op.as_ref().expect("op event carries its op");
                let arg_text = args
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(", ");
                firings.push((format!("{name}({arg_text})"), false));
                let id = firings.len(); // node ids are offset by the initial node
                for a in &e.consumed {
                    let q = queues.get_mut(a).expect("consumed atom has a producer");
                    let producer = q.pop_front().expect("consumed atom has a producer");
                    edges.push((producer, id, a.clone()));
                }
                for a in &e.produced {
                    queues.entry(a.clone()).or_default().push_back(id);
                }
            }
            EventKind::CondEnter => {}
            EventKind::SeqEnter | EventKind::SelEnter | EventKind::RepEnter => {
                checkpoints.push((queues.clone(), edges.len(), firings.len()));
            }
            EventKind::CondExit => {}
            EventKind::SeqExit | EventKind::SelExit | EventKind::RepExit => {
                let (saved_queues, saved_edges, saved_firings) =
                    checkpoints.pop().expect("balanced enter/exit");
                if e.status == EventStatus::Fail {
                    queues = saved_queues;
                    edges.truncate(saved_edges);
                    for f in firings.iter_mut().skip(saved_firings) {
                        f.1 = true;
                    }
                }
            }
        }
    }

    let mut out = String::new();
    out.push_str("digraph trace {\n  rankdir=LR;\n");
    let _ = writeln!(out, "  n0 [label=\"{}\", shape=box];", trace.initial);
    for (i, (label, rolled_back)) in firings.iter().enumerate() {
        let style = if *rolled_back { ", style=dashed" } else { "" };
        let _ = writeln!(out, "  f{} [label=\"{label}\"{style}];", i + 1);
    }
    for (from, to, atom) in &edges {
        let from = node_name(*from);
        let to = node_name(*to);
        let _ = writeln!(out, "  {from} -> {to} [label=\"{atom}\"];");
    }
    out.push_str("}\n");
    out
}

fn node_name(id: usize) -> String {
    if id == 0 {
        "n0".to_string()
    } else {
        format!("f{id}")
    }
}
