//! Named small structures used by tests, sweeps and the shipped fixture
//! files.

use crate::certs::ex54_truncation;
use crate::constructions::{chain_cone, zero_extension};
use crate::finsg::FiniteSemigroup;
use crate::fintop::FiniteTopology;
use crate::unocore::{canonical_uno_from_inverse, UnoStructure};

fn named(sg: FiniteSemigroup, labels: &[&str]) -> FiniteSemigroup {
    sg.with_labels(labels.iter().map(|s| s.to_string()).collect()).expect("label count")
}

fn canonical(sg: FiniteSemigroup, top: FiniteTopology) -> UnoStructure {
    canonical_uno_from_inverse(sg, top).expect("fixture is a topological inverse semigroup")
}

/// `{0, 1}` under `min`, discrete.
pub fn discrete_2() -> UnoStructure {
    canonical(FiniteSemigroup::min_chain(2), FiniteTopology::discrete(2))
}

/// `{0, 1}` under `min` on the Sierpiński space with `{1}` open.
pub fn sierp_2() -> UnoStructure {
    canonical(FiniteSemigroup::min_chain(2), FiniteTopology::sierpinski())
}

pub fn discrete_z2() -> UnoStructure {
    canonical(named(FiniteSemigroup::cyclic_group(2), &["e", "a"]), FiniteTopology::discrete(2))
}

pub fn indiscrete_z2() -> UnoStructure {
    canonical(named(FiniteSemigroup::cyclic_group(2), &["e", "a"]), FiniteTopology::indiscrete(2))
}

pub fn z3() -> UnoStructure {
    canonical(named(FiniteSemigroup::cyclic_group(3), &["e", "a", "b"]), FiniteTopology::discrete(3))
}

pub fn zeroext_z2() -> UnoStructure {
    zero_extension(&discrete_z2()).expect("group input")
}

pub fn cone_z2_2() -> UnoStructure {
    chain_cone(&discrete_z2(), 2).expect("group input")
}

/// Depth-2 truncation with the discrete topology.
pub fn ex54_2() -> UnoStructure {
    ex54_truncation(2).expect("positive depth")
}

/// Every fixture with its file stem.
pub fn all() -> Vec<(&'static str, UnoStructure)> {
    vec![
        ("discrete_2", discrete_2()),
        ("sierp_2", sierp_2()),
        ("indiscrete_z2", indiscrete_z2()),
        ("discrete_z2", discrete_z2()),
        ("z3", z3()),
        ("zeroext_z2", zeroext_z2()),
        ("cone_z2_2", cone_z2_2()),
        ("ex54_2", ex54_2()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unocore::is_ditopological;

    #[test]
    fn fixtures_are_ditopological() {
        for (name, u) in all() {
            let r = is_ditopological(&u).unwrap();
            assert!(r.passed(), "{name}");
            assert!(r.agrees_with_oracle(&u), "{name}");
        }
    }

    #[test]
    fn fixture_sizes() {
        let sizes: Vec<usize> = all().iter().map(|(_, u)| u.len()).collect();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3, 3, 5, 6]);
    }
}
