//! Exact certificate for the semigroup `S = T × H`, where
//! `T = {0} ∪ {1/n : n ≥ 1}` with `xy = x` if `x = y` and `0` otherwise, and
//! `H = {e, h}` is the two-element group.
//!
//! With the convergent-sequence topology on `T`, the canonical `λ` is not
//! dicontinuous at `(0, h)`: every basic neighborhood of `(0, e)` in `λ(S)`
//! contains some `(1/n, e)`, and then `(1/n, h)` lands in the set that must
//! be contained in `{(0, h)}`. The facts used are pure algebra indexed by
//! `n`; [`ex54_certify`] checks them exactly for every `n ≤ N`.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::finsg::FiniteSemigroup;
use crate::fintop::FiniteTopology;
use crate::hm::Q;
use crate::pointset::PointSet;
use crate::unocore::{canonical_uno_from_inverse, UnoStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum H {
    E,
    H,
}

impl H {
    fn mul(self, o: H) -> H {
        if self == o {
            H::E
        } else {
            H::H
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("t must be 0 or 1/n for a positive integer n")]
    NotInT,
    #[error("depth must be at least 1")]
    ZeroDepth,
}

/// `(t, s)` with `t ∈ T`, `s ∈ H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Ex54Element {
    #[serde(serialize_with = "ser_q")]
    t: Q,
    s: H,
}

fn ser_q<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(q)
}

impl Ex54Element {
    pub fn new(t: Q, s: H) -> Result<Self, CertError> {
        let ok = t.is_zero() || (t.numer().is_one() && *t.denom() >= 1);
        if !ok {
            return Err(CertError::NotInT);
        }
        Ok(Self { t, s })
    }

    /// `(1/n, s)`.
    pub fn tail(n: u64, s: H) -> Self {
        assert!(n >= 1);
        Self { t: Q::new(1, n as i128), s }
    }

    pub fn zero(s: H) -> Self {
        Self { t: Q::zero(), s }
    }

    pub fn t(&self) -> Q {
        self.t
    }

    pub fn s(&self) -> H {
        self.s
    }
}

pub fn ex54_mul(x: Ex54Element, y: Ex54Element) -> Ex54Element {
    let t = if x.t == y.t { x.t } else { Q::zero() };
    Ex54Element { t, s: x.s.mul(y.s) }
}

/// `x·x⁻¹` with `x⁻¹ = x`.
pub fn ex54_lambda(x: Ex54Element) -> Ex54Element {
    Ex54Element { t: x.t, s: H::E }
}

/// The three facts consumed at the basic neighborhood of index `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ex54Record {
    pub n: u64,
    /// `(0,e)·(1/n,h)`; must equal `(0,h)`.
    pub product: Ex54Element,
    /// `λ(1/n,h)`; must equal `(1/n,e)`.
    pub lambda: Ex54Element,
    /// `(1/n,h) ≠ (0,h)`.
    pub escapes: bool,
}

impl Ex54Record {
    pub fn compute(n: u64) -> Self {
        let x = Ex54Element::tail(n, H::H);
        Self {
            n,
            product: ex54_mul(Ex54Element::zero(H::E), x),
            lambda: ex54_lambda(x),
            escapes: x != Ex54Element::zero(H::H),
        }
    }

    /// Re-derives each fact from scratch.
    pub fn verify(&self) -> [bool; 3] {
        let fresh = Self::compute(self.n);
        [
            self.product == Ex54Element::zero(H::H) && fresh.product == self.product,
            self.lambda == Ex54Element::tail(self.n, H::E) && fresh.lambda == self.lambda,
            self.escapes && fresh.escapes,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ex54Certificate {
    pub depth: u64,
    pub records: Vec<Ex54Record>,
}

impl Ex54Certificate {
    pub fn facts_checked(&self) -> u64 {
        3 * self.records.len() as u64
    }

    /// Number of facts failing re-verification.
    pub fn failures(&self) -> u64 {
        self.records.par_iter().map(|r| r.verify().iter().filter(|ok| !**ok).count() as u64).sum()
    }

    pub fn verify(&self) -> bool {
        self.records.len() as u64 == self.depth
            && self.records.iter().enumerate().all(|(i, r)| r.n == i as u64 + 1)
            && self.failures() == 0
    }
}

pub fn ex54_certify(depth: u64) -> Result<Ex54Certificate, CertError> {
    if depth == 0 {
        return Err(CertError::ZeroDepth);
    }
    let records = (1..=depth).into_par_iter().map(Ex54Record::compute).collect();
    Ok(Ex54Certificate { depth, records })
}

/// `T_N = {0, 1/1, .., 1/N}` in that order.
pub fn truncated_t(depth: usize) -> Vec<Q> {
    std::iter::once(Q::zero()).chain((1..=depth).map(|n| Q::new(1, n as i128))).collect()
}

/// `T_N × H` as a semigroup; `(t_i, s)` sits at `2i + s`, labelled `"t|s"`.
pub fn ex54_semigroup(depth: usize) -> Result<FiniteSemigroup, CertError> {
    if depth == 0 {
        return Err(CertError::ZeroDepth);
    }
    let ts = truncated_t(depth);
    let elems: Vec<Ex54Element> = ts.iter().flat_map(|&t| [H::E, H::H].map(|s| Ex54Element { t, s })).collect();
    let index = |x: Ex54Element| {
        let i = ts.iter().position(|&t| t == x.t).expect("T_N is closed");
        2 * i + usize::from(x.s == H::H)
    };
    let table =
        elems.iter().flat_map(|&x| elems.iter().map(move |&y| (x, y))).map(|(x, y)| index(ex54_mul(x, y))).collect();
    let labels = elems.iter().map(|x| format!("{}|{}", x.t, if x.s == H::E { "e" } else { "h" })).collect();
    Ok(FiniteSemigroup::from_flat(table, Some(labels)).expect("restriction of an associative operation"))
}

/// The truncation with the discrete topology and canonical units.
pub fn ex54_truncation(depth: usize) -> Result<UnoStructure, CertError> {
    let sg = ex54_semigroup(depth)?;
    let n = sg.len();
    Ok(canonical_uno_from_inverse(sg, FiniteTopology::discrete(n)).expect("discrete inverse semigroup"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliffordReport {
    pub depth: usize,
    pub idempotents: usize,
    /// `E(S) = T_N × {e}`.
    pub idempotents_match: bool,
    pub idempotents_commute: bool,
    /// `x⁻¹ = x` for every element.
    pub inverse_is_identity: bool,
    /// Size of the maximal subgroup at each idempotent.
    pub subgroup_sizes: Vec<usize>,
}

impl CliffordReport {
    pub fn passed(&self) -> bool {
        self.idempotents_match
            && self.idempotents_commute
            && self.inverse_is_identity
            && self.subgroup_sizes.iter().all(|&k| k <= 2)
    }
}

/// Group of units of `eSe`, found by brute force.
fn maximal_subgroup(sg: &FiniteSemigroup, e: usize) -> PointSet {
    let local: PointSet = (0..sg.len()).map(|x| sg.mul(sg.mul(e, x), e)).collect();
    local.iter().filter(|&x| local.iter().any(|y| sg.mul(x, y) == e && sg.mul(y, x) == e)).collect()
}

pub fn ex54_clifford_checks(depth: usize) -> Result<CliffordReport, CertError> {
    let sg = ex54_semigroup(depth)?;
    let e = sg.idempotents();
    let expected: PointSet = (0..=depth).map(|i| 2 * i).collect();
    let idempotents_commute = e.iter().all(|a| e.iter().all(|b| sg.mul(a, b) == sg.mul(b, a)));
    let inverse_is_identity = sg.inverse_structure().map(|inv| (0..sg.len()).all(|x| inv.inv(x) == x)).unwrap_or(false);
    let subgroup_sizes = e.iter().map(|i| maximal_subgroup(&sg, i).len()).collect();
    Ok(CliffordReport {
        depth,
        idempotents: e.len(),
        idempotents_match: e == expected,
        idempotents_commute,
        inverse_is_identity,
        subgroup_sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unocore::is_ditopological;

    fn el(n: u64, s: H) -> Ex54Element {
        Ex54Element::tail(n, s)
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(ex54_mul(el(3, H::E), el(3, H::H)), el(3, H::H));
        assert_eq!(ex54_mul(el(3, H::H), el(4, H::H)), Ex54Element::zero(H::E));
        assert_eq!(ex54_mul(Ex54Element::zero(H::E), el(5, H::H)), Ex54Element::zero(H::H));
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(ex54_lambda(el(7, H::H)), el(7, H::E));
        assert_eq!(ex54_lambda(Ex54Element::zero(H::H)), Ex54Element::zero(H::E));
        assert_eq!(ex54_lambda(el(2, H::E)), el(2, H::E));
    }

    #[test]
    fn element_validation() {
        assert!(Ex54Element::new(Q::new(1, 9), H::H).is_ok());
        assert!(Ex54Element::new(Q::zero(), H::E).is_ok());
        assert_eq!(Ex54Element::new(Q::new(2, 3), H::E), Err(CertError::NotInT));
        assert_eq!(Ex54Element::new(Q::new(-1, 3), H::E), Err(CertError::NotInT));
        assert_eq!(Ex54Element::new(Q::new(2, 1), H::E), Err(CertError::NotInT));
    }

    #[test]
    fn certificate_small() {
        let c = ex54_certify(1).unwrap();
        assert_eq!(c.records.len(), 1);
        assert!(c.verify());
        assert_eq!(ex54_certify(0), Err(CertError::ZeroDepth));
        let c = ex54_certify(500).unwrap();
        assert_eq!(c.facts_checked(), 1500);
        assert!(c.verify());
    }

    #[test]
    fn tampered_record_is_caught() {
        let mut c = ex54_certify(3).unwrap();
        c.records[1].lambda = el(2, H::H);
        assert!(!c.verify());
        assert_eq!(c.failures(), 1);
    }

    #[test]
    fn truncation_is_commutative_and_associative() {
        for n in 1..=10 {
            let sg = ex54_semigroup(n).unwrap();
            assert!(sg.is_commutative());
            assert_eq!(sg.len(), 2 * (n + 1));
        }
    }

    #[test]
    fn clifford_checks_depth_three() {
        let r = ex54_clifford_checks(3).unwrap();
        assert_eq!(r.idempotents, 4);
        assert_eq!(r.subgroup_sizes, vec![2, 2, 2, 2]);
        assert!(r.passed());
    }

    #[test]
    fn canonical_lambda_on_truncation() {
        let u = ex54_truncation(4).unwrap();
        let lam = u.lam().unwrap();
        for (x, &l) in lam.iter().enumerate() {
            assert_eq!(l, x & !1);
        }
        assert_eq!(u.sg().label(3), "1|h");
    }

    #[test]
    fn discrete_truncation_is_ditopological() {
        for n in [1, 3, 6] {
            let u = ex54_truncation(n).unwrap();
            let r = is_ditopological(&u).unwrap();
            assert!(r.passed());
            assert!(r.agrees_with_oracle(&u));
        }
    }
}
