//! Tree expressions and operator signatures.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::formula::PosFormula;
use super::term::{Substitution, Term};

/// A behavior tree expression.
///
/// `Seq(vec![])` is the unit of sequencing (Skip) and `Sel(vec![])` is the
/// unit of selection (Abort); the n-ary forms and the binary forms of the
/// operators are interconvertible by the monoid laws.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BTExpr {
    /// An atomic action: an operator applied to ground arguments.
    Op(String, Vec<Term>),
    /// Checks the condition, then runs the body; fails if the condition does
    /// not hold. Payloads are ground positive formulas.
    Cond(PosFormula, Box<BTExpr>),
    Seq(Vec<BTExpr>),
    Sel(Vec<BTExpr>),
    /// Runs the body until it fails, then succeeds with the last state.
    Rep(Box<BTExpr>),
}

impl BTExpr {
    pub fn skip() -> Self {
        BTExpr::Seq(Vec::new())
    }

    pub fn abort() -> Self {
        BTExpr::Sel(Vec::new())
    }

    pub fn op(name: impl Into<String>, args: Vec<Term>) -> Self {
        BTExpr::Op(name.into(), args)
    }

    pub fn cond(s: PosFormula, body: BTExpr) -> Self {
        BTExpr::Cond(s, Box::new(body))
    }

    pub fn rep(body: BTExpr) -> Self {
        BTExpr::Rep(Box::new(body))
    }

    pub fn is_skip(&self) -> bool {
        matches!(self, BTExpr::Seq(cs) if cs.is_empty())
    }

    pub fn is_abort(&self) -> bool {
        matches!(self, BTExpr::Sel(cs) if cs.is_empty())
    }

    pub fn contains_rep(&self) -> bool {
        match self {
            BTExpr::Rep(_) => true,
            BTExpr::Op(..) => false,
            BTExpr::Cond(_, b) => b.contains_rep(),
            BTExpr::Seq(cs) | BTExpr::Sel(cs) => cs.iter().any(BTExpr::contains_rep),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            BTExpr::Op(..) => 1,
            BTExpr::Cond(_, b) | BTExpr::Rep(b) => 1 + b.node_count(),
            BTExpr::Seq(cs) | BTExpr::Sel(cs) => {
                1 + cs.iter().map(BTExpr::node_count).sum::<usize>()
            }
        }
    }

    /// Child at a path of indices from the root. Cond and Rep bodies are
    /// child 0.
    pub fn node_at(&self, path: &[usize]) -> Option<&BTExpr> {
        let mut cur = self;
        for &i in path {
            cur = match cur {
                BTExpr::Cond(_, b) | BTExpr::Rep(b) if i == 0 => b,
                BTExpr::Seq(cs) | BTExpr::Sel(cs) => cs.get(i)?,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Checks op resolution, arity, and groundness against a signature.
    pub fn validate(&self, sig: &Signature) -> Result<(), TreeError> {
        self.validate_at(sig, &mut Vec::new())
    }

    fn validate_at(&self, sig: &Signature, path: &mut Vec<usize>) -> Result<(), TreeError> {
        match self {
            BTExpr::Op(name, args) => {
                let decl = sig.op(name).ok_or_else(|| TreeError {
                    kind: TreeErrorKind::UnknownOp { name: name.clone() },
                    path: path.clone(),
                })?;
                if decl.params.len() != args.len() {
                    return Err(TreeError {
                        kind: TreeErrorKind::ArityMismatch {
                            name: name.clone(),
                            expected: decl.params.len(),
                            got: args.len(),
                        },
                        path: path.clone(),
                    });
                }
                if let Some(bad) = args.iter().find(|t| !t.is_ground()) {
                    return Err(TreeError {
                        kind: TreeErrorKind::NonGroundArg {
                            name: name.clone(),
                            arg: bad.clone(),
                        },
                        path: path.clone(),
                    });
                }
                Ok(())
            }
            BTExpr::Cond(s, body) => {
                if !s.is_ground() {
                    return Err(TreeError {
                        kind: TreeErrorKind::NonGroundCondition { formula: s.clone() },
                        path: path.clone(),
                    });
                }
                path.push(0);
                let r = body.validate_at(sig, path);
                path.pop();
                r
            }
            BTExpr::Rep(body) => {
                path.push(0);
                let r = body.validate_at(sig, path);
                path.pop();
                r
            }
            BTExpr::Seq(cs) | BTExpr::Sel(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    path.push(i);
                    let r = c.validate_at(sig, path);
                    path.pop();
                    r?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{kind} at node {path:?}")]
pub struct TreeError {
    pub kind: TreeErrorKind,
    pub path: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeErrorKind {
    #[error("unknown op `{name}`")]
    UnknownOp { name: String },
    #[error("op `{name}` expects {expected} argument(s), got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("op `{name}` applied to non-ground argument `{arg}`")]
    NonGroundArg { name: String, arg: Term },
    #[error("condition payload `{formula:?}` is not ground")]
    NonGroundCondition { formula: PosFormula },
}

/// A declared operator parameter; the sort annotation is optional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub var: String,
    pub sort: Option<String>,
}

/// An operator declaration `name : xs. S -o S'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub antecedent: PosFormula,
    pub consequent: PosFormula,
}

impl OpDecl {
    /// Builds a declaration, checking the variable binding discipline:
    /// antecedent variables must be parameters, and consequent variables must
    /// occur in the parameters or the antecedent.
    pub fn new(
        name: impl Into<String>,
        params: Vec<Param>,
        antecedent: PosFormula,
        consequent: PosFormula,
    ) -> Result<OpDecl, SignatureError> {
        let name = name.into();
        let param_set: BTreeSet<&str> = params.iter().map(|p| p.var.as_str()).collect();
        for v in antecedent.vars() {
            if !param_set.contains(v.as_str()) {
                return Err(SignatureError::UnboundVariable { var: v, decl: name });
            }
        }
        let mut bound: BTreeSet<String> = param_set.iter().map(|s| s.to_string()).collect();
        bound.extend(antecedent.vars());
        for v in consequent.vars() {
            if !bound.contains(&v) {
                return Err(SignatureError::UnboundVariable { var: v, decl: name });
            }
        }
        Ok(OpDecl {
            name,
            params,
            antecedent,
            consequent,
        })
    }

    /// The substitution binding this declaration's parameters to `args`.
    pub fn bind_args(&self, args: &[Term]) -> Result<Substitution, SignatureError> {
        if args.len() != self.params.len() {
            return Err(SignatureError::ArityMismatch {
                name: self.name.clone(),
                expected: self.params.len(),
                got: args.len(),
            });
        }
        let mut sub = Substitution::new();
        for (p, a) in self.params.iter().zip(args) {
            sub.bind(p.var.clone(), a.clone());
        }
        Ok(sub)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate declaration of `{name}`")]
    DuplicateName { name: String },
    #[error("variable `{var}` in declaration `{decl}` is not bound by the parameters or antecedent")]
    UnboundVariable { var: String, decl: String },
    #[error("`{name}` expects {expected} argument(s), got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("predicate `{name}` used with arity {got}, declared/used elsewhere with {expected}")]
    PredicateArity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("sort `{name}` is empty")]
    EmptySort { name: String },
    #[error("unknown sort `{name}`")]
    UnknownSort { name: String },
}

/// A collection of operator declarations with optional sort and predicate
/// declarations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    ops: BTreeMap<String, OpDecl>,
    sorts: BTreeMap<String, BTreeSet<String>>,
    /// Declared predicate argument sorts; the vec length is the arity.
    preds: BTreeMap<String, Vec<String>>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_op(&mut self, decl: OpDecl) -> Result<(), SignatureError> {
        if self.ops.contains_key(&decl.name) {
            return Err(SignatureError::DuplicateName {
                name: decl.name.clone(),
            });
        }
        self.check_arities(&decl)?;
        self.ops.insert(decl.name.clone(), decl);
        Ok(())
    }

    pub fn add_sort(
        &mut self,
        name: impl Into<String>,
        constants: BTreeSet<String>,
    ) -> Result<(), SignatureError> {
        let name = name.into();
        if constants.is_empty() {
            return Err(SignatureError::EmptySort { name });
        }
        if self.sorts.contains_key(&name) {
            return Err(SignatureError::DuplicateName { name });
        }
        self.sorts.insert(name, constants);
        Ok(())
    }

    pub fn add_pred(
        &mut self,
        name: impl Into<String>,
        arg_sorts: Vec<String>,
    ) -> Result<(), SignatureError> {
        let name = name.into();
        if self.preds.contains_key(&name) {
            return Err(SignatureError::DuplicateName { name });
        }
        for s in &arg_sorts {
            if !self.sorts.contains_key(s) {
                return Err(SignatureError::UnknownSort { name: s.clone() });
            }
        }
        self.preds.insert(name, arg_sorts);
        Ok(())
    }

    pub fn op(&self, name: &str) -> Option<&OpDecl> {
        self.ops.get(name)
    }

    pub fn ops(&self) -> impl Iterator<Item = &OpDecl> {
        self.ops.values()
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    pub fn sort(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.sorts.get(name)
    }

    pub fn sorts(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.sorts.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn preds(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.preds.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Predicate arities as declared or inferred from the op declarations.
    pub fn predicate_arities(&self) -> BTreeMap<String, usize> {
        let mut out: BTreeMap<String, usize> = self
            .preds
            .iter()
            .map(|(k, v)| (k.clone(), v.len()))
            .collect();
        for decl in self.ops.values() {
            for a in decl
                .antecedent
                .atom_multiset()
                .into_iter()
                .chain(decl.consequent.atom_multiset())
            {
                out.entry(a.predicate).or_insert(a.args.len());
            }
        }
        out
    }

    /// Every constant mentioned by a sort or an op declaration.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.sorts.values().flatten().cloned().collect();
        for decl in self.ops.values() {
            for a in decl
                .antecedent
                .atom_multiset()
                .into_iter()
                .chain(decl.consequent.atom_multiset())
            {
                for t in a.args {
                    if let Term::Const(c) = t {
                        out.insert(c);
                    }
                }
            }
        }
        out
    }

    fn check_arities(&self, decl: &OpDecl) -> Result<(), SignatureError> {
        let known = self.predicate_arities();
        for a in decl
            .antecedent
            .atom_multiset()
            .iter()
            .chain(decl.consequent.atom_multiset().iter())
        {
            if let Some(&expected) = known.get(&a.predicate) {
                if expected != a.args.len() {
                    return Err(SignatureError::PredicateArity {
                        name: a.predicate.clone(),
                        expected,
                        got: a.args.len(),
                    });
                }
            }
        }
        // Also check consistency within this declaration itself.
        let mut local: BTreeMap<&str, usize> = BTreeMap::new();
        for a in decl
            .antecedent
            .atom_multiset()
            .iter()
            .chain(decl.consequent.atom_multiset().iter())
        {
            let arity = local.entry(a.predicate.as_str()).or_insert(a.args.len());
            if *arity != a.args.len() {
                return Err(SignatureError::PredicateArity {
                    name: a.predicate.clone(),
                    expected: *arity,
                    got: a.args.len(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Atom;

    fn p(name: &str) -> PosFormula {
        PosFormula::prop(name)
    }

    #[test]
    fn opdecl_rejects_unbound_consequent_variable() {
        // bad : 1 -o at(X)
        let err = OpDecl::new(
            "bad",
            vec![],
            PosFormula::One,
            PosFormula::atom(Atom::new("at", vec![Term::var("X")])),
        );
        assert_eq!(
            err.unwrap_err(),
            SignatureError::UnboundVariable {
                var: "X".into(),
                decl: "bad".into()
            }
        );
    }

    #[test]
    fn opdecl_rejects_unbound_antecedent_variable() {
        let err = OpDecl::new(
            "f",
            vec![],
            PosFormula::atom(Atom::new("circle", vec![Term::var("X")])),
            PosFormula::One,
        );
        assert!(err.is_err());
    }

    #[test]
    fn duplicate_op_names_rejected() {
        let mut sig = Signature::new();
        sig.add_op(OpDecl::new("pace", vec![], PosFormula::One, PosFormula::One).unwrap())
            .unwrap();
        let err = sig.add_op(OpDecl::new("pace", vec![], p("a"), p("a")).unwrap());
        assert!(matches!(err, Err(SignatureError::DuplicateName { .. })));
    }

    #[test]
    fn cross_declaration_arity_checked() {
        let mut sig = Signature::new();
        sig.add_op(
            OpDecl::new(
                "f",
                vec![],
                PosFormula::atom(Atom::new("at", vec![Term::constant("a")])),
                PosFormula::One,
            )
            .unwrap(),
        )
        .unwrap();
        let err = sig.add_op(OpDecl::new("g", vec![], p("at"), PosFormula::One).unwrap());
        assert!(matches!(err, Err(SignatureError::PredicateArity { .. })));
    }

    #[test]
    fn validate_resolves_ops() {
        let mut sig = Signature::new();
        sig.add_op(OpDecl::new("pace", vec![], PosFormula::One, PosFormula::One).unwrap())
            .unwrap();
        assert!(BTExpr::op("pace", vec![]).validate(&sig).is_ok());
        let err = BTExpr::op("sprint", vec![]).validate(&sig).unwrap_err();
        assert!(matches!(err.kind, TreeErrorKind::UnknownOp { .. }));
        let err = BTExpr::op("pace", vec![Term::constant("a")])
            .validate(&sig)
            .unwrap_err();
        assert!(matches!(err.kind, TreeErrorKind::ArityMismatch { .. }));
    }

    #[test]
    fn validate_reports_node_path() {
        let mut sig = Signature::new();
        sig.add_op(OpDecl::new("pace", vec![], PosFormula::One, PosFormula::One).unwrap())
            .unwrap();
        let tree = BTExpr::Sel(vec![
            BTExpr::op("pace", vec![]),
            BTExpr::Seq(vec![BTExpr::op("pace", vec![]), BTExpr::op("nope", vec![])]),
        ]);
        let err = tree.validate(&sig).unwrap_err();
        assert_eq!(err.path, vec![1, 1]);
    }
}
