//! Affine entailment of positive conditions.

use crate::syntax::{state_of_pos, NonGroundError, PosFormula, WorldState};

/// `d ⊩ s`: the atom multiset of `s` is included in `d`, counting
/// multiplicity. `1` holds in every state. Errors on non-ground `s`.
pub fn affine_entails(d: &WorldState, s: &PosFormula) -> Result<bool, NonGroundError> {
    let needed = state_of_pos(s)?;
    Ok(d.includes(&needed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{pos_of_state, Atom, Term};

    fn st(names: &[&str]) -> WorldState {
        names.iter().map(|n| Atom::prop(*n)).collect()
    }

    #[test]
    fn atom_in_state_entailed() {
        let d = st(&["has_target", "heard_noise"]);
        assert!(affine_entails(&d, &PosFormula::prop("heard_noise")).unwrap());
        assert!(!affine_entails(&d, &PosFormula::prop("no_target")).unwrap());
    }

    #[test]
    fn one_holds_everywhere() {
        assert!(affine_entails(&WorldState::new(), &PosFormula::One).unwrap());
        assert!(affine_entails(&st(&["p"]), &PosFormula::One).unwrap());
    }

    #[test]
    fn multiplicity_counts() {
        let d = st(&["at_door"]);
        let two = PosFormula::tensor(PosFormula::prop("at_door"), PosFormula::prop("at_door"));
        assert!(!affine_entails(&d, &two).unwrap());
        assert!(affine_entails(&st(&["at_door", "at_door"]), &two).unwrap());
    }

    #[test]
    fn non_ground_condition_rejected() {
        let s = PosFormula::atom(Atom::new("at", vec![Term::var("X")]));
        assert!(affine_entails(&st(&[]), &s).is_err());
    }

    #[test]
    fn state_entails_its_own_reading() {
        let d = st(&["a", "a", "b"]);
        assert!(affine_entails(&d, &pos_of_state(&d)).unwrap());
    }
}
