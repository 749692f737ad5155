//! Compositional interface-type synthesis for repeater-free trees.
//!
//! Skip gets `1`, Abort gets `top`, an op gets its declaration with the
//! arguments substituted in, a condition `?S. e` gets `S -o S * N` (the
//! guard is assumed and then reproduced alongside the body's interface —
//! conditions always have this shape, never a curried `S -o S -o N`), a
//! selector folds its branches with `&`, and a sequence folds left to right
//! with [`seq_op`]. Results are canonical: payloads sorted, `*` stagings
//! fused, and an op typed `1 -o S'` collapses to `S'` (so `1 -o 1` is `1`).

use thiserror::Error;

use crate::syntax::{BTExpr, Interface, PosFormula, Signature, TreeError, TreeErrorKind};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{kind} at node {path:?}")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub path: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TypeErrorKind {
    #[error("repeaters have no interface type")]
    RepUnsupported,
    #[error("unknown op `{name}`")]
    UnknownOp { name: String },
    #[error("op `{name}` expects {expected} argument(s), got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("{0}")]
    Invalid(String),
}

impl From<TreeError> for TypeError {
    fn from(e: TreeError) -> Self {
        let kind = match e.kind {
            TreeErrorKind::UnknownOp { name } => TypeErrorKind::UnknownOp { name },
            TreeErrorKind::ArityMismatch {
                name,
                expected,
                got,
            } => TypeErrorKind::ArityMismatch {
                name,
                expected,
                got,
            },
            other => TypeErrorKind::Invalid(other.to_string()),
        };
        TypeError { kind, path: e.path }
    }
}

/// Sequential composition of interfaces: pushes the requirements of the
/// first interface outward and conjoins its releases with the second.
///
/// Defined by first-match over the listed cases; `top` absorbs from either
/// side (a sequence through a doomed step guarantees nothing), making the
/// operator total.
pub fn seq_op(n1: &Interface, n2: &Interface) -> Interface {
    seq_canonical(&n1.canonical(), &n2.canonical())
}

fn seq_canonical(n1: &Interface, n2: &Interface) -> Interface {
    use Interface as I;
    match (n1, n2) {
        (I::Top, _) | (_, I::Top) => I::Top,
        (I::Pos(PosFormula::One), n) => n.clone(),
        (I::Pos(s1), I::Pos(s2)) => {
            I::Pos(PosFormula::tensor(s1.clone(), s2.clone()).canonical())
        }
        (I::Pos(s), I::Tensor(s2, n)) => I::tensor(
            PosFormula::tensor(s.clone(), s2.clone()).canonical(),
            (**n).clone(),
        ),
        (I::Pos(s), I::With(a, b)) => I::with(
            seq_canonical(&I::Pos(s.clone()), a),
            seq_canonical(&I::Pos(s.clone()), b),
        ),
        (I::Pos(s1), I::Lolli(..)) => I::tensor(s1.clone(), n2.clone()),
        (I::Tensor(s, n1), n2) => {
            let rest = seq_canonical(n1, n2);
            seq_canonical(&I::Pos(s.clone()), &rest)
        }
        (I::Lolli(s1, n1), n2) => I::lolli(s1.clone(), seq_canonical(n1, n2)),
        (I::With(a, b), n) => I::with(seq_canonical(a, n), seq_canonical(b, n)),
    }
}

/// Synthesizes the interface of a repeater-free tree expression.
pub fn synth(sig: &Signature, a: &BTExpr) -> Result<Interface, TypeError> {
    a.validate(sig)?;
    synth_at(sig, a, &mut Vec::new())
}

fn synth_at(sig: &Signature, a: &BTExpr, path: &mut Vec<usize>) -> Result<Interface, TypeError> {
    match a {
        BTExpr::Op(name, args) => {
            let decl = sig.op(name).expect("op validated");
            let theta = decl.bind_args(args).expect("arity validated");
            let ante = decl.antecedent.apply(&theta);
            let cons = decl.consequent.apply(&theta);
            Ok(Interface::lolli(ante, Interface::Pos(cons)).canonical())
        }
        BTExpr::Cond(s, body) => {
            path.push(0);
            let n = synth_at(sig, body, path)?;
            path.pop();
            Ok(Interface::lolli(s.clone(), Interface::tensor(s.clone(), n)).canonical())
        }
        BTExpr::Seq(children) => {
            let mut acc = Interface::one();
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                let n = synth_at(sig, c, path)?;
                path.pop();
                acc = seq_op(&acc, &n);
            }
            Ok(acc)
        }
        BTExpr::Sel(children) => {
            let mut parts = Vec::with_capacity(children.len());
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                parts.push(synth_at(sig, c, path)?);
                path.pop();
            }
            Ok(parts
                .into_iter()
                .rev()
                .reduce(|acc, n| Interface::with(n, acc))
                .unwrap_or(Interface::Top))
        }
        BTExpr::Rep(_) => Err(TypeError {
            kind: TypeErrorKind::RepUnsupported,
            path: path.clone(),
        }),
    }
}
