//! Built-in named instances used across the test suites and the
//! command-line examples. Derived values asserted about them elsewhere
//! are recomputed by oracles before being frozen.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::closure::{ClosureSpec, GCSpace, TauSpec};
use crate::poset::FinPoset;
use crate::set::{SubsetFamily, Universe, DEFAULT_CAP};
use crate::space::FGCSpace;

fn identity_space(universe: &Arc<Universe>) -> GCSpace {
    let table: Vec<u64> = (0..universe.subset_count()).collect();
    let gamma = ClosureSpec::from_table(universe, table).expect("identity is a closure operator");
    let tau = TauSpec::identity(universe);
    let mut space = GCSpace::new(gamma, tau).expect("same universe");
    let report = space.validate(DEFAULT_CAP).expect("within cap");
    assert!(report.ok);
    space
}

/// One point, identity operators, the singleton family.
pub fn point() -> FGCSpace {
    let u = Universe::new(["a"]).unwrap();
    let family = SubsetFamily::from_bits(&u, [1]);
    FGCSpace::validated(identity_space(&u), family, DEFAULT_CAP).unwrap()
}

/// Like [`point`] but with the empty set also in the family; the smallest
/// instance whose family is closed under all finite subsets of hulls.
pub fn point_with_empty() -> FGCSpace {
    let u = Universe::new(["a"]).unwrap();
    let family = SubsetFamily::from_bits(&u, [0, 1]);
    FGCSpace::validated(identity_space(&u), family, DEFAULT_CAP).unwrap()
}

/// Two incomparable points, identity operators, all nonempty subsets.
pub fn flat() -> FGCSpace {
    let u = Universe::new(["a", "b"]).unwrap();
    let family = SubsetFamily::from_bits(&u, [1, 2, 3]);
    FGCSpace::validated(identity_space(&u), family, DEFAULT_CAP).unwrap()
}

/// [`flat`] with the empty set adjoined to the family.
pub fn flat_with_empty() -> FGCSpace {
    let u = Universe::new(["a", "b"]).unwrap();
    let family = SubsetFamily::from_bits(&u, [0, 1, 2, 3]);
    FGCSpace::validated(identity_space(&u), family, DEFAULT_CAP).unwrap()
}

/// The two-element chain 0 <= 1.
pub fn chain2_poset() -> FinPoset {
    FinPoset::from_pairs(["0", "1"], [("0", "1")]).unwrap()
}

/// The derived space of the two-element chain, built directly: closure is
/// down-closure, tau restricts to the down-closed sets, and the family
/// holds the three nonempty subsets with a greatest element. Equality
/// with the generic poset conversion is asserted in tests.
pub fn chain2() -> FGCSpace {
    let u = Universe::new(["0", "1"]).unwrap();
    let gamma = ClosureSpec::from_table(&u, vec![0b00, 0b01, 0b11, 0b11]).unwrap();
    let tau_table: BTreeMap<u64, u64> = [(0b00, 0b00), (0b01, 0b01), (0b11, 0b11)].into();
    let tau = TauSpec::from_partial_table(&u, tau_table);
    let mut space = GCSpace::new(gamma, tau).unwrap();
    assert!(space.validate(DEFAULT_CAP).unwrap().ok);
    let family = SubsetFamily::from_bits(&u, [1, 2, 3]);
    FGCSpace::validated(space, family, DEFAULT_CAP).unwrap()
}

/// bot below two incomparable points.
pub fn v_poset() -> FinPoset {
    FinPoset::from_pairs(["bot", "a", "b"], [("bot", "a"), ("bot", "b")]).unwrap()
}

/// The four-element diamond: bot <= a,b <= top.
pub fn diamond() -> FinPoset {
    FinPoset::from_pairs(
        ["bot", "a", "b", "top"],
        [("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
    )
    .unwrap()
}

/// bot <= a,b, each below two incomparable tops. An L-domain that is not
/// bounded complete: {a,b} is bounded but has no least upper bound.
pub fn m_poset() -> FinPoset {
    FinPoset::from_pairs(
        ["bot", "a", "b", "t1", "t2"],
        [
            ("bot", "a"),
            ("bot", "b"),
            ("a", "t1"),
            ("b", "t1"),
            ("a", "t2"),
            ("b", "t2"),
        ],
    )
    .unwrap()
}

/// [`m_poset`] without the bottom; neither an L-domain nor bounded
/// complete.
pub fn two_top() -> FinPoset {
    FinPoset::from_pairs(
        ["a", "b", "t1", "t2"],
        [("a", "t1"), ("b", "t1"), ("a", "t2"), ("b", "t2")],
    )
    .unwrap()
}

/// A validated space whose family breaks the refinement axiom: tau erases
/// the only member's closure, so nothing can sit inside its hull.
pub fn broken_family_parts() -> (GCSpace, SubsetFamily) {
    let u = Universe::new(["a", "b"]).unwrap();
    let gamma = ClosureSpec::from_table(&u, (0..4).collect()).unwrap();
    let tau_table: BTreeMap<u64, u64> =
        [(0b00, 0b00), (0b01, 0b00), (0b10, 0b00), (0b11, 0b11)].into();
    let tau = TauSpec::from_partial_table(&u, tau_table);
    let mut space = GCSpace::new(gamma, tau).unwrap();
    assert!(space.validate(DEFAULT_CAP).unwrap().ok);
    let family = SubsetFamily::from_bits(&u, [0b01]);
    (space, family)
}

/// A valid space whose tau shrinks the top closed set, so it is not
/// classical.
pub fn shrinking_tau_space() -> FGCSpace {
    let u = Universe::new(["a", "b"]).unwrap();
    let gamma = ClosureSpec::from_table(&u, (0..4).collect()).unwrap();
    let tau_table: BTreeMap<u64, u64> =
        [(0b00, 0b00), (0b01, 0b01), (0b10, 0b00), (0b11, 0b01)].into();
    let tau = TauSpec::from_partial_table(&u, tau_table);
    let mut space = GCSpace::new(gamma, tau).unwrap();
    assert!(space.validate(DEFAULT_CAP).unwrap().ok);
    let family = SubsetFamily::from_bits(&u, [0b01]);
    FGCSpace::validated(space, family, DEFAULT_CAP).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_build() {
        point();
        point_with_empty();
        flat();
        flat_with_empty();
        chain2();
        chain2_poset();
        v_poset();
        diamond();
        m_poset();
        two_top();
        broken_family_parts();
        shrinking_tau_space();
    }

    #[test]
    fn chain_fixture_tau_is_partial() {
        let x = chain2();
        // tau is only promised on down-closed sets; {1} is outside.
        assert!(x.space().tau().apply_bits(0b10).is_err());
    }
}
