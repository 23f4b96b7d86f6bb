//! Topological unosemigroups and the dicontinuity decision.
//!
//! A left unit operation `λ` is dicontinuous at `x` when every neighborhood
//! `O ∋ x` admits neighborhoods `U ∋ x` and `W ∋ λ(x)` (the latter open in the
//! subspace `λ(S)`) with `(W⋋U) ∩ λ⁻¹(W) ⊆ O`. The right version uses `U⋌W`
//! and `ρ`.
//!
//! On a finite space the left-hand set only grows with `U` and `W`, and the
//! requirement is hardest for the smallest `O`, so it is enough to test the
//! three minimal neighborhoods (see [`is_dicontinuous_at`]). The literal
//! triple quantification is kept as [`is_dicontinuous_oracle`] and the two are
//! cross-checked exhaustively by the test suites.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finsg::{is_homomorphism, FiniteSemigroup, InverseStructure, SemigroupError};
use crate::fintop::{is_continuous, FiniteTopology};
use crate::pointset::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn unit_name(self) -> &'static str {
        match self {
            Side::Left => "lambda",
            Side::Right => "rho",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnoError {
    #[error("semigroup has {sg} elements but topology has {top} points")]
    CarrierMismatch { sg: usize, top: usize },
    #[error("{side} unit map has the wrong arity or an out-of-range value")]
    UnitArity { side: Side },
    #[error("{side} unit axiom fails at element {x}")]
    UnitAxiomFails { side: Side, x: usize },
    #[error("{side} unit operation is not continuous: {x} ⊑ {y} but images are unrelated")]
    UnitNotContinuous { side: Side, x: usize, y: usize },
    #[error("multiplication is not continuous at the pair ({a}, {b})")]
    MultiplicationNotContinuous { a: usize, b: usize },
    #[error("structure has no left unit operation")]
    MissingLambda,
    #[error("structure has no right unit operation")]
    MissingRho,
    #[error("structure carries no unit operations")]
    NoUnitOperations,
    #[error(transparent)]
    NotInverse(#[from] SemigroupError),
    #[error("inversion is not continuous")]
    InversionNotContinuous,
    #[error("unit operations are not the canonical ones of the inverse structure")]
    NotCanonical,
    #[error("the two structures carry different unit operations")]
    SideMismatch,
}

/// A finite semigroup, a topology on the same carrier, and optional left and
/// right unit operations, all validated together.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct UnoStructure {
    sg: Arc<FiniteSemigroup>,
    top: Arc<FiniteTopology>,
    lam: Option<Vec<usize>>,
    rho: Option<Vec<usize>>,
}

/// First pair `(a, b)` at which `min(a)·min(b) ⊄ min(ab)`.
pub fn multiplication_continuity_failure(sg: &FiniteSemigroup, top: &FiniteTopology) -> Option<(usize, usize)> {
    let n = sg.len();
    for a in 0..n {
        for b in 0..n {
            let target = top.min_nbhd(sg.mul(a, b));
            for a2 in top.min_nbhd(a).iter() {
                for b2 in top.min_nbhd(b).iter() {
                    if !target.contains(sg.mul(a2, b2)) {
                        return Some((a, b));
                    }
                }
            }
        }
    }
    None
}

/// `u(x)·x = x` (left) or `x·u(x) = x` (right) for every `x`.
pub fn unit_axiom_failure(sg: &FiniteSemigroup, side: Side, unit: &[usize]) -> Option<usize> {
    (0..sg.len()).find(|&x| match side {
        Side::Left => sg.mul(unit[x], x) != x,
        Side::Right => sg.mul(x, unit[x]) != x,
    })
}

fn continuity_failure(top: &FiniteTopology, f: &[usize]) -> Option<(usize, usize)> {
    (0..top.len()).find_map(|x| top.min_nbhd(x).iter().find(|&y| !top.min_nbhd(f[x]).contains(f[y])).map(|y| (x, y)))
}

fn check_unit(sg: &FiniteSemigroup, top: &FiniteTopology, side: Side, unit: &[usize]) -> Result<(), UnoError> {
    if unit.len() != sg.len() || unit.iter().any(|&v| v >= sg.len()) {
        return Err(UnoError::UnitArity { side });
    }
    if let Some(x) = unit_axiom_failure(sg, side, unit) {
        return Err(UnoError::UnitAxiomFails { side, x });
    }
    if let Some((x, y)) = continuity_failure(top, unit) {
        return Err(UnoError::UnitNotContinuous { side, x, y });
    }
    Ok(())
}

/// Validates every structure invariant: matching carriers, continuity of
/// multiplication, and the axiom and continuity of each present unit.
pub fn validate_uno(
    sg: impl Into<Arc<FiniteSemigroup>>,
    top: impl Into<Arc<FiniteTopology>>,
    lam: Option<Vec<usize>>,
    rho: Option<Vec<usize>>,
) -> Result<UnoStructure, UnoError> {
    let (sg, top) = (sg.into(), top.into());
    if sg.len() != top.len() {
        return Err(UnoError::CarrierMismatch { sg: sg.len(), top: top.len() });
    }
    if let Some((a, b)) = multiplication_continuity_failure(&sg, &top) {
        return Err(UnoError::MultiplicationNotContinuous { a, b });
    }
    if let Some(l) = &lam {
        check_unit(&sg, &top, Side::Left, l)?;
    }
    if let Some(r) = &rho {
        check_unit(&sg, &top, Side::Right, r)?;
    }
    Ok(UnoStructure { sg, top, lam, rho })
}

impl UnoStructure {
    /// Skips validation; callers must have checked every invariant.
    pub(crate) fn assemble(
        sg: Arc<FiniteSemigroup>,
        top: Arc<FiniteTopology>,
        lam: Option<Vec<usize>>,
        rho: Option<Vec<usize>>,
    ) -> Self {
        debug_assert!(validate_uno(sg.clone(), top.clone(), lam.clone(), rho.clone()).is_ok());
        Self { sg, top, lam, rho }
    }

    pub fn sg(&self) -> &FiniteSemigroup {
        &self.sg
    }

    pub fn top(&self) -> &FiniteTopology {
        &self.top
    }

    pub fn sg_arc(&self) -> &Arc<FiniteSemigroup> {
        &self.sg
    }

    pub fn top_arc(&self) -> &Arc<FiniteTopology> {
        &self.top
    }

    pub fn lam(&self) -> Option<&[usize]> {
        self.lam.as_deref()
    }

    pub fn rho(&self) -> Option<&[usize]> {
        self.rho.as_deref()
    }

    pub fn unit(&self, side: Side) -> Option<&[usize]> {
        match side {
            Side::Left => self.lam(),
            Side::Right => self.rho(),
        }
    }

    /// Present sides, left first.
    pub fn sides(&self) -> Vec<Side> {
        Side::BOTH.into_iter().filter(|&s| self.unit(s).is_some()).collect()
    }

    pub fn len(&self) -> usize {
        self.sg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sg.is_empty()
    }

    /// Image `u(S)` of a present unit operation.
    pub fn unit_image(&self, side: Side) -> Option<PointSet> {
        self.unit(side).map(|u| u.iter().collect())
    }

    /// Same structure with only the given sides kept.
    pub fn restrict_sides(&self, sides: &[Side]) -> UnoStructure {
        UnoStructure {
            sg: self.sg.clone(),
            top: self.top.clone(),
            lam: self.lam.clone().filter(|_| sides.contains(&Side::Left)),
            rho: self.rho.clone().filter(|_| sides.contains(&Side::Right)),
        }
    }

    /// Same structure with a relabelled semigroup.
    pub fn with_labels(&self, labels: Vec<String>) -> Result<UnoStructure, UnoError> {
        let sg = (*self.sg).clone().with_labels(labels)?;
        Ok(UnoStructure { sg: Arc::new(sg), ..self.clone() })
    }

    /// Opposite semigroup `a ∘ b = b·a` with the unit operations swapped.
    pub fn opposite(&self) -> UnoStructure {
        let n = self.len();
        let table = (0..n * n).map(|i| self.sg.mul(i % n, i / n)).collect();
        let sg = FiniteSemigroup::from_flat_unchecked(table, self.sg.labels().to_vec());
        UnoStructure { sg: Arc::new(sg), top: self.top.clone(), lam: self.rho.clone(), rho: self.lam.clone() }
    }
}

/// Data showing why the fast criterion fails at `point`: `violating` lies in
/// the left-hand set built from `u_min` and `w_min` but outside `o`, the
/// smallest neighborhood of `point`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureWitness {
    pub point: usize,
    pub u_min: PointSet,
    pub w_min: PointSet,
    pub violating: usize,
    pub o: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointVerdict {
    pub point: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SideReport {
    pub side: Side,
    pub points: Vec<PointVerdict>,
}

impl SideReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DicontinuityReport {
    pub sides: Vec<SideReport>,
}

impl DicontinuityReport {
    pub fn passed(&self) -> bool {
        self.sides.iter().all(SideReport::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = (Side, &FailureWitness)> {
        self.sides.iter().flat_map(|s| s.points.iter().filter_map(move |p| p.failure.as_ref().map(|f| (s.side, f))))
    }

    /// Every failing point must also fail the brute-force oracle.
    pub fn failures_recheck(&self, u: &UnoStructure) -> bool {
        self.failures().all(|(side, f)| is_dicontinuous_oracle(u, side, f.point) == Ok(false))
    }

    /// Every per-point verdict equals the oracle's.
    pub fn agrees_with_oracle(&self, u: &UnoStructure) -> bool {
        self.sides.iter().all(|s| s.points.iter().all(|p| is_dicontinuous_oracle(u, s.side, p.point) == Ok(p.pass)))
    }
}

/// Fast criterion on raw parts. `image` must be `unit(S)`.
pub fn dicontinuity_failure(
    sg: &FiniteSemigroup,
    top: &FiniteTopology,
    side: Side,
    unit: &[usize],
    image: &PointSet,
    x: usize,
) -> Option<FailureWitness> {
    let u_min = top.min_nbhd(x);
    // Minimal neighborhood of unit(x) in the subspace unit(S).
    let w_min = top.min_nbhd(unit[x]) & image;
    let division = match side {
        Side::Left => sg.set_left_division(&w_min, u_min),
        Side::Right => sg.set_right_division(u_min, &w_min),
    };
    let preimage: PointSet = (0..sg.len()).filter(|&y| w_min.contains(unit[y])).collect();
    let bad = &(&division & &preimage) - u_min;
    bad.first().map(|violating| FailureWitness { point: x, u_min: u_min.clone(), w_min, violating, o: u_min.clone() })
}

/// Literal definition on raw parts: every open `O ∋ x` admits open `U ∋ x`
/// and subspace-open `W ∋ unit(x)` with the inclusion.
pub fn dicontinuity_oracle(sg: &FiniteSemigroup, top: &FiniteTopology, side: Side, unit: &[usize], x: usize) -> bool {
    let image: PointSet = unit.iter().collect();
    let sub = top.subspace(&image).expect("unit image is nonempty");
    let ws: Vec<PointSet> =
        sub.topology.opens().iter().map(|w| sub.to_original(w)).filter(|w| w.contains(unit[x])).collect();
    let nbhds = top.opens_containing(x);
    let lhs = |u: &PointSet, w: &PointSet| -> PointSet {
        let division = match side {
            Side::Left => sg.set_left_division(w, u),
            Side::Right => sg.set_right_division(u, w),
        };
        let preimage: PointSet = (0..sg.len()).filter(|&y| w.contains(unit[y])).collect();
        &division & &preimage
    };
    nbhds.iter().all(|o| nbhds.iter().any(|u| ws.iter().any(|w| lhs(u, w).is_subset(o))))
}

fn require_unit(u: &UnoStructure, side: Side) -> Result<&[usize], UnoError> {
    u.unit(side).ok_or(match side {
        Side::Left => UnoError::MissingLambda,
        Side::Right => UnoError::MissingRho,
    })
}

pub fn is_dicontinuous_at(u: &UnoStructure, side: Side, x: usize) -> Result<bool, UnoError> {
    let unit = require_unit(u, side)?;
    let image = unit.iter().collect();
    Ok(dicontinuity_failure(u.sg(), u.top(), side, unit, &image, x).is_none())
}

pub fn is_dicontinuous_oracle(u: &UnoStructure, side: Side, x: usize) -> Result<bool, UnoError> {
    let unit = require_unit(u, side)?;
    Ok(dicontinuity_oracle(u.sg(), u.top(), side, unit, x))
}

pub fn is_dicontinuous_left_at(u: &UnoStructure, x: usize) -> Result<bool, UnoError> {
    is_dicontinuous_at(u, Side::Left, x)
}

pub fn is_dicontinuous_left_oracle(u: &UnoStructure, x: usize) -> Result<bool, UnoError> {
    is_dicontinuous_oracle(u, Side::Left, x)
}

pub fn is_dicontinuous_right_at(u: &UnoStructure, x: usize) -> Result<bool, UnoError> {
    is_dicontinuous_at(u, Side::Right, x)
}

pub fn is_dicontinuous_right_oracle(u: &UnoStructure, x: usize) -> Result<bool, UnoError> {
    is_dicontinuous_oracle(u, Side::Right, x)
}

/// Per-point verdicts on one side.
pub fn side_report(u: &UnoStructure, side: Side) -> Result<SideReport, UnoError> {
    let unit = require_unit(u, side)?;
    let image: PointSet = unit.iter().collect();
    let points = (0..u.len())
        .map(|x| {
            let failure = dicontinuity_failure(u.sg(), u.top(), side, unit, &image, x);
            PointVerdict { point: x, pass: failure.is_none(), failure }
        })
        .collect();
    Ok(SideReport { side, points })
}

/// Fast-criterion verdicts for every present side.
pub fn is_ditopological(u: &UnoStructure) -> Result<DicontinuityReport, UnoError> {
    let sides = u.sides();
    if sides.is_empty() {
        return Err(UnoError::NoUnitOperations);
    }
    let sides = sides.into_iter().map(|s| side_report(u, s)).collect::<Result<_, _>>()?;
    Ok(DicontinuityReport { sides })
}

/// Canonical `λ(x) = x·x⁻¹` and `ρ(x) = x⁻¹·x` of a topological inverse
/// semigroup.
pub fn canonical_uno_from_inverse(
    sg: impl Into<Arc<FiniteSemigroup>>,
    top: impl Into<Arc<FiniteTopology>>,
) -> Result<UnoStructure, UnoError> {
    let (sg, top) = (sg.into(), top.into());
    if sg.len() != top.len() {
        return Err(UnoError::CarrierMismatch { sg: sg.len(), top: top.len() });
    }
    let inv = sg.inverse_structure()?;
    if !is_continuous(&inv.inv, &top, &top).expect("arity checked") {
        return Err(UnoError::InversionNotContinuous);
    }
    let (lam, rho) = canonical_units(&sg, &inv);
    validate_uno(sg, top, Some(lam), Some(rho))
}

pub fn canonical_units(sg: &FiniteSemigroup, inv: &InverseStructure) -> (Vec<usize>, Vec<usize>) {
    let lam = (0..sg.len()).map(|x| sg.mul(x, inv.inv(x))).collect();
    let rho = (0..sg.len()).map(|x| sg.mul(inv.inv(x), x)).collect();
    (lam, rho)
}

/// `λ` dicontinuous at `x` iff `ρ` dicontinuous at `x⁻¹`. Always true on valid
/// input; `false` means an implementation bug.
pub fn check_duality(u: &UnoStructure, x: usize) -> Result<bool, UnoError> {
    let inv = u.sg().inverse_structure()?;
    let (lam, rho) = canonical_units(u.sg(), &inv);
    if u.lam() != Some(&lam[..]) || u.rho() != Some(&rho[..]) {
        return Err(UnoError::NotCanonical);
    }
    Ok(is_dicontinuous_at(u, Side::Left, x)? == is_dicontinuous_at(u, Side::Right, inv.inv(x))?)
}

/// The unique candidate uniformity of a finite partition topology: the
/// equivalence relation whose classes are the minimal neighborhoods.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteUniformity {
    classes: Vec<PointSet>,
}

impl FiniteUniformity {
    /// `B(x, E)`.
    pub fn ball(&self, x: usize) -> &PointSet {
        &self.classes[x]
    }

    pub fn related(&self, x: usize, z: usize) -> bool {
        self.classes[x].contains(z)
    }

    pub fn is_equivalence(&self) -> bool {
        let n = self.classes.len();
        (0..n).all(|x| {
            self.related(x, x)
                && (0..n).all(|y| {
                    self.related(x, y) == self.related(y, x)
                        && (0..n).all(|z| !(self.related(x, y) && self.related(y, z)) || self.related(x, z))
                })
        })
    }

    /// Distinct classes in order of their least element.
    pub fn partition(&self) -> Vec<PointSet> {
        let mut out: Vec<PointSet> = Vec::new();
        for c in &self.classes {
            if !out.contains(c) {
                out.push(c.clone());
            }
        }
        out
    }
}

fn uniformity_candidate(u: &UnoStructure) -> Option<FiniteUniformity> {
    u.top().is_partition().then(|| FiniteUniformity { classes: u.top().min_nbhds().to_vec() })
}

/// `B(x,E)·y ⊆ B(xy,E)` for all `x, y`.
pub fn right_uniformizable(u: &UnoStructure) -> Option<FiniteUniformity> {
    let e = uniformity_candidate(u)?;
    let sg = u.sg();
    (0..sg.len())
        .all(|x| (0..sg.len()).all(|y| e.ball(x).iter().all(|z| e.related(sg.mul(x, y), sg.mul(z, y)))))
        .then_some(e)
}

/// `x·B(y,E) ⊆ B(xy,E)` for all `x, y`.
pub fn left_uniformizable(u: &UnoStructure) -> Option<FiniteUniformity> {
    let e = uniformity_candidate(u)?;
    let sg = u.sg();
    (0..sg.len())
        .all(|x| (0..sg.len()).all(|y| e.ball(y).iter().all(|z| e.related(sg.mul(x, y), sg.mul(x, z)))))
        .then_some(e)
}

/// Continuous semigroup homomorphism commuting with every unit operation.
/// Both structures must carry the same sides.
pub fn is_uno_homomorphism(h: &[usize], x: &UnoStructure, y: &UnoStructure) -> Result<bool, UnoError> {
    if x.sides() != y.sides() {
        return Err(UnoError::SideMismatch);
    }
    if !is_homomorphism(h, x.sg(), y.sg()) {
        return Ok(false);
    }
    if !is_continuous(h, x.top(), y.top()).unwrap_or(false) {
        return Ok(false);
    }
    for side in x.sides() {
        let (ux, uy) = (x.unit(side).expect("side present"), y.unit(side).expect("side present"));
        if (0..x.len()).any(|p| h[ux[p]] != uy[h[p]]) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(xs: &[usize]) -> PointSet {
        xs.iter().collect()
    }

    fn id(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    fn semilattice2(top: FiniteTopology) -> UnoStructure {
        validate_uno(FiniteSemigroup::min_chain(2), top, Some(id(2)), Some(id(2))).unwrap()
    }

    #[test]
    fn validate_examples() {
        semilattice2(FiniteTopology::discrete(2));
        validate_uno(
            FiniteSemigroup::cyclic_group(2),
            FiniteTopology::indiscrete(2),
            Some(vec![0, 0]),
            Some(vec![0, 0]),
        )
        .unwrap();
        // min preserves the Sierpiński order 0 ⊑ 1 in each argument.
        let s = FiniteTopology::sierpinski();
        let m = FiniteSemigroup::min_chain(2);
        for a in 0..2 {
            for b in 0..2 {
                for a2 in s.min_nbhd(a).iter() {
                    for b2 in s.min_nbhd(b).iter() {
                        assert!(s.min_nbhd(m.mul(a, b)).contains(m.mul(a2, b2)));
                    }
                }
            }
        }
        validate_uno(m, s, Some(id(2)), None).unwrap();
    }

    #[test]
    fn validate_errors() {
        let z2 = FiniteSemigroup::cyclic_group(2);
        assert_eq!(
            validate_uno(z2.clone(), FiniteTopology::discrete(3), None, None),
            Err(UnoError::CarrierMismatch { sg: 2, top: 3 })
        );
        assert_eq!(
            validate_uno(z2.clone(), FiniteTopology::discrete(2), Some(vec![1, 1]), None),
            Err(UnoError::UnitAxiomFails { side: Side::Left, x: 0 })
        );
        // Z2 with Sierpiński: 0+1 = 1 but 1+1 = 0 escapes min(1) = {1}.
        assert!(matches!(
            validate_uno(z2, FiniteTopology::sierpinski(), None, None),
            Err(UnoError::MultiplicationNotContinuous { .. })
        ));
        // Right-zero on Sierpiński: any λ is a unit; the swap is discontinuous.
        assert!(matches!(
            validate_uno(FiniteSemigroup::right_zero(2), FiniteTopology::sierpinski(), Some(vec![1, 0]), None),
            Err(UnoError::UnitNotContinuous { side: Side::Left, .. })
        ));
        assert!(matches!(
            validate_uno(FiniteSemigroup::right_zero(2), FiniteTopology::discrete(2), Some(vec![0]), None),
            Err(UnoError::UnitArity { .. })
        ));
    }

    #[test]
    fn discrete_and_idempotent_pass() {
        let d = semilattice2(FiniteTopology::discrete(2));
        let s = semilattice2(FiniteTopology::sierpinski());
        for u in [&d, &s] {
            for x in 0..2 {
                for side in Side::BOTH {
                    assert!(is_dicontinuous_at(u, side, x).unwrap());
                    assert!(is_dicontinuous_oracle(u, side, x).unwrap());
                }
            }
        }
        assert!(is_ditopological(&s).unwrap().passed());
    }

    #[test]
    fn indiscrete_group_by_hand() {
        let u = validate_uno(
            FiniteSemigroup::cyclic_group(2),
            FiniteTopology::indiscrete(2),
            Some(vec![0, 0]),
            Some(vec![0, 0]),
        )
        .unwrap();
        // W_min = {e}; ({e}⋋S) ∩ λ⁻¹({e}) = S ∩ S = S ⊆ S.
        let w = ps(&[0]);
        let all = ps(&[0, 1]);
        assert_eq!(u.sg().set_left_division(&w, &all), all);
        for x in 0..2 {
            assert!(is_dicontinuous_left_at(&u, x).unwrap());
            assert!(is_dicontinuous_left_oracle(&u, x).unwrap());
            assert!(is_dicontinuous_right_at(&u, x).unwrap());
            assert!(is_dicontinuous_right_oracle(&u, x).unwrap());
        }
    }

    #[test]
    fn missing_sides_are_errors() {
        let u = validate_uno(FiniteSemigroup::min_chain(2), FiniteTopology::discrete(2), None, None).unwrap();
        assert_eq!(is_dicontinuous_left_at(&u, 0), Err(UnoError::MissingLambda));
        assert_eq!(is_dicontinuous_right_oracle(&u, 0), Err(UnoError::MissingRho));
        assert_eq!(is_ditopological(&u), Err(UnoError::NoUnitOperations));
    }

    #[test]
    fn one_point_structure_passes() {
        let u = validate_uno(FiniteSemigroup::min_chain(1), FiniteTopology::discrete(1), Some(vec![0]), Some(vec![0]))
            .unwrap();
        let r = is_ditopological(&u).unwrap();
        assert!(r.passed());
        assert!(r.agrees_with_oracle(&u));
        assert!(right_uniformizable(&u).is_some());
        assert!(check_duality(&u, 0).unwrap());
    }

    #[test]
    fn minimal_subspace_neighborhood_matches_subspace_op() {
        let u = semilattice2(FiniteTopology::sierpinski());
        let lam = u.lam().unwrap();
        let image: PointSet = lam.iter().collect();
        let sub = u.top().subspace(&image).unwrap();
        for &l in &lam[..2] {
            let local = sub.local_index(l).unwrap();
            let via_sub = sub.to_original(sub.topology.min_nbhd(local));
            assert_eq!(via_sub, u.top().min_nbhd(l) & &image);
        }
    }

    #[test]
    fn canonical_examples() {
        let m = canonical_uno_from_inverse(FiniteSemigroup::min_chain(2), FiniteTopology::sierpinski()).unwrap();
        assert_eq!(m.lam(), Some(&[0, 1][..]));
        assert_eq!(m.rho(), Some(&[0, 1][..]));
        let z2 = canonical_uno_from_inverse(FiniteSemigroup::cyclic_group(2), FiniteTopology::discrete(2)).unwrap();
        assert_eq!(z2.lam(), Some(&[0, 0][..]));
        assert!(is_ditopological(&z2).unwrap().passed());
        assert!(matches!(
            canonical_uno_from_inverse(FiniteSemigroup::left_zero(2), FiniteTopology::discrete(2)),
            Err(UnoError::NotInverse(_))
        ));
        // Z3 on the 3-chain: inversion 1 ↦ 2 reverses 1 ⊑ 2.
        assert!(matches!(
            canonical_uno_from_inverse(FiniteSemigroup::cyclic_group(3), FiniteTopology::chain(3)),
            Err(UnoError::InversionNotContinuous)
        ));
    }

    #[test]
    fn duality_examples() {
        let z2 = canonical_uno_from_inverse(FiniteSemigroup::cyclic_group(2), FiniteTopology::discrete(2)).unwrap();
        let s = canonical_uno_from_inverse(FiniteSemigroup::min_chain(2), FiniteTopology::sierpinski()).unwrap();
        for x in 0..2 {
            assert!(check_duality(&z2, x).unwrap());
            assert!(check_duality(&s, x).unwrap());
        }
        let not_canonical = s.restrict_sides(&[Side::Left]);
        assert_eq!(check_duality(&not_canonical, 0), Err(UnoError::NotCanonical));
    }

    #[test]
    fn uniformizability_examples() {
        let d = semilattice2(FiniteTopology::discrete(2));
        let e = right_uniformizable(&d).unwrap();
        assert_eq!(e.partition(), vec![ps(&[0]), ps(&[1])]);
        assert!(e.is_equivalence());
        assert!(left_uniformizable(&d).is_some());
        let s = semilattice2(FiniteTopology::sierpinski());
        assert!(right_uniformizable(&s).is_none());
        assert!(left_uniformizable(&s).is_none());
        let z2 = validate_uno(FiniteSemigroup::cyclic_group(2), FiniteTopology::indiscrete(2), Some(vec![0, 0]), None)
            .unwrap();
        assert_eq!(right_uniformizable(&z2).unwrap().partition(), vec![ps(&[0, 1])]);
    }

    #[test]
    fn homomorphism_examples() {
        let d = semilattice2(FiniteTopology::discrete(2));
        assert!(is_uno_homomorphism(&[0, 1], &d, &d).unwrap());
        // Collapsing to the bottom idempotent commutes with λ = id.
        assert!(is_uno_homomorphism(&[0, 0], &d, &d).unwrap());
        let left_only = d.restrict_sides(&[Side::Left]);
        assert_eq!(is_uno_homomorphism(&[0, 1], &d, &left_only), Err(UnoError::SideMismatch));

        // λ of discrete Z2 into its idempotent part {e}: a homomorphism to
        // the trivial group, commuting with the constant units.
        let z2 = canonical_uno_from_inverse(FiniteSemigroup::cyclic_group(2), FiniteTopology::discrete(2)).unwrap();
        let trivial =
            canonical_uno_from_inverse(FiniteSemigroup::cyclic_group(1), FiniteTopology::discrete(1)).unwrap();
        assert!(is_uno_homomorphism(&[0, 0], &z2, &trivial).unwrap());
        // The Sierpiński semilattice's λ = id mapped onto discrete: not continuous.
        let s = semilattice2(FiniteTopology::sierpinski());
        assert!(!is_uno_homomorphism(&[0, 1], &s, &d).unwrap());
    }

    #[test]
    fn oracle_agrees_with_fast_criterion_on_fixtures() {
        let structures = [
            semilattice2(FiniteTopology::discrete(2)),
            semilattice2(FiniteTopology::sierpinski()),
            semilattice2(FiniteTopology::indiscrete(2)),
            canonical_uno_from_inverse(FiniteSemigroup::cyclic_group(3), FiniteTopology::discrete(3)).unwrap(),
            canonical_uno_from_inverse(FiniteSemigroup::cyclic_group(3), FiniteTopology::indiscrete(3)).unwrap(),
        ];
        for u in &structures {
            let r = is_ditopological(u).unwrap();
            assert!(r.agrees_with_oracle(u));
            assert!(r.failures_recheck(u));
        }
    }
}
