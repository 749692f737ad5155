//! World states: multisets of ground atoms.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::formula::PosFormula;
use super::term::Atom;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("formula is not ground: variable occurs in {atom}")]
pub struct NonGroundError {
    pub atom: Atom,
}

/// A multiset of ground atoms, the linear context a tree evaluates against.
///
/// Stored keys always have multiplicity >= 1 and equality is multiset
/// equality. Insertion rejects non-ground atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldState {
    atoms: BTreeMap<Atom, usize>,
}

impl WorldState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, atom: Atom) -> Result<(), NonGroundError> {
        self.insert_n(atom, 1)
    }

    pub fn insert_n(&mut self, atom: Atom, n: usize) -> Result<(), NonGroundError> {
        if !atom.is_ground() {
            return Err(NonGroundError { atom });
        }
        if n > 0 {
            *self.atoms.entry(atom).or_insert(0) += n;
        }
        Ok(())
    }

    pub fn count(&self, atom: &Atom) -> usize {
        self.atoms.get(atom).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total number of atoms counting multiplicity.
    pub fn len(&self) -> usize {
        self.atoms.values().sum()
    }

    /// Number of distinct atoms.
    pub fn distinct(&self) -> usize {
        self.atoms.len()
    }

    pub fn iter_counts(&self) -> impl Iterator<Item = (&Atom, usize)> {
        self.atoms.iter().map(|(a, &n)| (a, n))
    }

    /// Iterates atoms expanded to multiplicity, in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms
            .iter()
            .flat_map(|(a, &n)| std::iter::repeat(a).take(n))
    }

    /// Multiset inclusion, counting multiplicity.
    pub fn includes(&self, other: &WorldState) -> bool {
        other.iter_counts().all(|(a, n)| self.count(a) >= n)
    }

    /// Multiset union.
    pub fn plus(&self, other: &WorldState) -> WorldState {
        let mut out = self.clone();
        for (a, n) in other.iter_counts() {
            *out.atoms.entry(a.clone()).or_insert(0) += n;
        }
        out
    }

    /// Multiset difference; `None` when `other` is not included in `self`.
    pub fn checked_minus(&self, other: &WorldState) -> Option<WorldState> {
        if !self.includes(other) {
            return None;
        }
        let mut out = self.clone();
        for (a, n) in other.iter_counts() {
            let slot = out.atoms.get_mut(a).expect("inclusion checked");
            *slot -= n;
            if *slot == 0 {
                out.atoms.remove(a);
            }
        }
        Some(out)
    }

    /// Removes up to `n` copies of `atom`, returning how many were removed.
    pub fn remove_n(&mut self, atom: &Atom, n: usize) -> usize {
        match self.atoms.get_mut(atom) {
            None => 0,
            Some(slot) => {
                let removed = n.min(*slot);
                *slot -= removed;
                if *slot == 0 {
                    self.atoms.remove(atom);
                }
                removed
            }
        }
    }
}

impl FromIterator<Atom> for WorldState {
    /// Collects ground atoms; panics on a variable, which callers rule out.
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        let mut s = WorldState::new();
        for a in iter {
            s.insert(a).expect("ground atom");
        }
        s
    }
}

impl fmt::Display for WorldState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// Reads a world state off as the tensor of its atoms; the empty state is 1.
pub fn pos_of_state(d: &WorldState) -> PosFormula {
    PosFormula::from_sorted_atoms(d.iter().cloned().collect())
}

/// Inverse of [`pos_of_state`] up to canonical form. Rejects formulas with
/// variables.
pub fn state_of_pos(s: &PosFormula) -> Result<WorldState, NonGroundError> {
    let mut out = WorldState::new();
    for a in s.atom_multiset() {
        out.insert(a)?;
    }
    Ok(out)
}
