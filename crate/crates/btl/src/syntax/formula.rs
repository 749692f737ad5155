//! Positive tensor formulas and staged interface formulas.

use super::term::{Atom, Substitution};

/// A positive formula: atoms, the unit `1`, and tensor.
///
/// These describe states, conditions, and operator antecedents/consequents.
/// Two positive formulas mean the same thing when they carry the same
/// multiset of atoms; [`PosFormula::canonical`] picks the representative with
/// units removed, tensors flattened, and atoms sorted into a right-nested
/// chain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PosFormula {
    One,
    Atom(Atom),
    Tensor(Box<PosFormula>, Box<PosFormula>),
}

impl PosFormula {
    pub fn atom(a: Atom) -> Self {
        PosFormula::Atom(a)
    }

    pub fn prop(name: &str) -> Self {
        PosFormula::Atom(Atom::prop(name))
    }

    pub fn tensor(l: PosFormula, r: PosFormula) -> Self {
        PosFormula::Tensor(Box::new(l), Box::new(r))
    }

    /// The multiset of atoms, in order of appearance.
    pub fn atom_multiset(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<Atom>) {
        match self {
            PosFormula::One => {}
            PosFormula::Atom(a) => out.push(a.clone()),
            PosFormula::Tensor(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Rebuilds a formula from an atom multiset; sorts first. The empty
    /// multiset yields `1`.
    pub fn from_sorted_atoms(mut atoms: Vec<Atom>) -> PosFormula {
        atoms.sort();
        let mut iter = atoms.into_iter().rev();
        let last = match iter.next() {
            None => return PosFormula::One,
            Some(a) => PosFormula::Atom(a),
        };
        iter.fold(last, |acc, a| PosFormula::tensor(PosFormula::Atom(a), acc))
    }

    /// Canonical form: sorted, flattened, unit-free. Idempotent, and
    /// preserves the atom multiset.
    pub fn canonical(&self) -> PosFormula {
        PosFormula::from_sorted_atoms(self.atom_multiset())
    }

    pub fn is_one(&self) -> bool {
        self.atom_multiset().is_empty()
    }

    pub fn is_ground(&self) -> bool {
        match self {
            PosFormula::One => true,
            PosFormula::Atom(a) => a.is_ground(),
            PosFormula::Tensor(l, r) => l.is_ground() && r.is_ground(),
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in self.atom_multiset() {
            for v in a.vars() {
                if !out.iter().any(|x| x == v) {
                    out.push(v.to_string());
                }
            }
        }
        out
    }

    pub fn apply(&self, sub: &Substitution) -> PosFormula {
        match self {
            PosFormula::One => PosFormula::One,
            PosFormula::Atom(a) => PosFormula::Atom(sub.apply_atom(a)),
            PosFormula::Tensor(l, r) => PosFormula::tensor(l.apply(sub), r.apply(sub)),
        }
    }

    /// Node count, used by size caps.
    pub fn size(&self) -> usize {
        match self {
            PosFormula::One | PosFormula::Atom(_) => 1,
            PosFormula::Tensor(l, r) => 1 + l.size() + r.size(),
        }
    }
}

/// An interface: the staged input/output type of a tree expression.
///
/// The grammar is `N ::= S | S -o N | S * N | N & N | top`. Keeping the left
/// side of both `-o` and `*` positive is what rules out an implication to the
/// left of another implication; the shape is enforced by construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Interface {
    Pos(PosFormula),
    Lolli(PosFormula, Box<Interface>),
    Tensor(PosFormula, Box<Interface>),
    With(Box<Interface>, Box<Interface>),
    Top,
}

impl Interface {
    pub fn one() -> Self {
        Interface::Pos(PosFormula::One)
    }

    pub fn pos(s: PosFormula) -> Self {
        Interface::Pos(s)
    }

    pub fn lolli(s: PosFormula, n: Interface) -> Self {
        Interface::Lolli(s, Box::new(n))
    }

    pub fn tensor(s: PosFormula, n: Interface) -> Self {
        Interface::Tensor(s, Box::new(n))
    }

    pub fn with(a: Interface, b: Interface) -> Self {
        Interface::With(Box::new(a), Box::new(b))
    }

    /// Canonicalizes every embedded positive formula, leaving the staging
    /// structure untouched.
    pub fn canonical_payloads(&self) -> Interface {
        match self {
            Interface::Pos(s) => Interface::Pos(s.canonical()),
            Interface::Lolli(s, n) => Interface::lolli(s.canonical(), n.canonical_payloads()),
            Interface::Tensor(s, n) => Interface::tensor(s.canonical(), n.canonical_payloads()),
            Interface::With(a, b) => {
                Interface::with(a.canonical_payloads(), b.canonical_payloads())
            }
            Interface::Top => Interface::Top,
        }
    }

    /// Full canonical form used by type synthesis: payloads canonical, unit
    /// antecedents of `-o` dropped, and `*` stagings fused so that
    /// `S * S'` collapses into a single positive formula and
    /// `S * (S' * N)` into `(S x S') * N`.
    pub fn canonical(&self) -> Interface {
        match self {
            Interface::Pos(s) => Interface::Pos(s.canonical()),
            Interface::Top => Interface::Top,
            Interface::With(a, b) => Interface::with(a.canonical(), b.canonical()),
            Interface::Lolli(s, n) => {
                let s = s.canonical();
                let n = n.canonical();
                if s.is_one() {
                    n
                } else {
                    Interface::lolli(s, n)
                }
            }
            Interface::Tensor(s, n) => {
                let s = s.canonical();
                let n = n.canonical();
                if s.is_one() {
                    return n;
                }
                match n {
                    Interface::Pos(t) => {
                        Interface::Pos(PosFormula::tensor(s, t).canonical())
                    }
                    Interface::Tensor(t, m) => {
                        Interface::tensor(PosFormula::tensor(s, t).canonical(), *m)
                    }
                    other => Interface::tensor(s, other),
                }
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Interface::Pos(s) => s.size(),
            Interface::Lolli(s, n) | Interface::Tensor(s, n) => 1 + s.size() + n.size(),
            Interface::With(a, b) => 1 + a.size() + b.size(),
            Interface::Top => 1,
        }
    }
}

/// Interface equality modulo tensor canonicalization: positive payloads are
/// canonicalized, adjacent `*` stagings fuse, and unit antecedents drop.
/// Alternatives and stagings are never reordered: `N1 & N2` and `N2 & N1`
/// are different interfaces.
pub fn equal_interface(a: &Interface, b: &Interface) -> bool {
    a.canonical() == b.canonical()
}
