//! Subunosemigroups, Tychonoff products, reduced products and semidirect
//! products.

use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::finsg::{is_closed_set, FiniteSemigroup, SemigroupError};
use crate::fintop::{generate_from_subbase, is_continuous, FiniteTopology};
use crate::pointset::PointSet;
use crate::unocore::{validate_uno, Side, UnoError, UnoStructure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("factors carry different unit operations")]
    SideMismatch,
    #[error("empty list of factors")]
    NoFactors,
    #[error("subset is not closed under multiplication")]
    NotSubsemigroup,
    #[error("subset is not closed under the {side} unit operation at element {x}")]
    NotUnitClosed { side: Side, x: usize },
    #[error("subset is not a closed two-sided ideal")]
    NotClosedIdeal,
    #[error("{side} unit operation maps ideal element {x} outside the ideal")]
    UnitLeaksIdeal { side: Side, x: usize },
    #[error("collapse map is not a homomorphism at ({p}, {q})")]
    WellDefinednessFailure { p: usize, q: usize },
    #[error("expected a group with its canonical unit operations")]
    NotAGroup,
    #[error("chain length must be positive")]
    EmptyChain,
    #[error("invalid action: {0}")]
    ActionInvalid(ActionLaw),
    #[error("action does not respect the {side} unit operation at f={f}, s={s}")]
    ActionDoesNotRespectUnit { side: Side, f: usize, s: usize },
    #[error("restriction of alpha_{f} to the right unit image is not a bijection")]
    NotInvertible { f: usize },
    #[error("inverse action is not continuous at f={f}, s={s}")]
    AlphaMinusNotContinuous { f: usize, s: usize },
    #[error("{0} unit operation required")]
    MissingUnit(Side),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Uno(#[from] UnoError),
}

/// Which action law failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ActionLaw {
    Arity,
    Endomorphism { f: usize, a: usize, b: usize },
    Composition { f: usize, g: usize, s: usize },
    NotContinuous { f: usize, s: usize },
}

impl std::fmt::Display for ActionLaw {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActionLaw::Arity => write!(fm, "table has the wrong shape"),
            ActionLaw::Endomorphism { f, a, b } => {
                write!(fm, "alpha_{f} is not a homomorphism at ({a}, {b})")
            }
            ActionLaw::Composition { f, g, s } => write!(fm, "alpha_{f}{g} != alpha_{f} o alpha_{g} at {s}"),
            ActionLaw::NotContinuous { f, s } => write!(fm, "not continuous at ({f}, {s})"),
        }
    }
}

fn require(u: &UnoStructure, side: Side) -> Result<&[usize], ConstructionError> {
    u.unit(side).ok_or(ConstructionError::MissingUnit(side))
}

fn pair_labels(a: &FiniteSemigroup, b: &FiniteSemigroup) -> Vec<String> {
    a.labels().iter().flat_map(|x| b.labels().iter().map(move |y| format!("{x}|{y}"))).collect()
}

/// Product of two structures carrying the same sides; `(x, y)` sits at
/// index `x * |Y| + y`.
fn product2(x: &UnoStructure, y: &UnoStructure) -> Result<UnoStructure, ConstructionError> {
    if x.sides() != y.sides() {
        return Err(ConstructionError::SideMismatch);
    }
    let m = y.len();
    let unit = |side: Side| {
        x.unit(side)
            .zip(y.unit(side))
            .map(|(ux, uy)| (0..x.len() * m).map(|p| ux[p / m] * m + uy[p % m]).collect::<Vec<_>>())
    };
    Ok(validate_uno(x.sg().product(y.sg()), x.top().product(y.top()), unit(Side::Left), unit(Side::Right))?)
}

/// Tychonoff product, folded left to right.
pub fn tychonoff_product(factors: &[UnoStructure]) -> Result<UnoStructure, ConstructionError> {
    let (first, rest) = factors.split_first().ok_or(ConstructionError::NoFactors)?;
    rest.iter().try_fold(first.clone(), |acc, f| product2(&acc, f))
}

/// Restriction to `a`, re-indexed densely in increasing order.
pub fn subunosemigroup(u: &UnoStructure, a: &PointSet) -> Result<UnoStructure, ConstructionError> {
    let sg = u.sg().restrict(a).ok_or(ConstructionError::NotSubsemigroup)?;
    for side in u.sides() {
        let unit = require(u, side)?;
        if let Some(x) = a.iter().find(|&x| !a.contains(unit[x])) {
            return Err(ConstructionError::NotUnitClosed { side, x });
        }
    }
    let sub = u.top().subspace(a).map_err(|_| ConstructionError::NotSubsemigroup)?;
    let restrict = |unit: &[usize]| -> Vec<usize> {
        sub.points.iter().map(|&p| sub.local_index(unit[p]).expect("closed under unit")).collect()
    };
    let (lam, rho) = (u.lam().map(restrict), u.rho().map(restrict));
    Ok(validate_uno(sg, sub.topology, lam, rho)?)
}

/// Inputs of a reduced product `X ×_I Y`.
#[derive(Debug, Clone)]
pub struct ReducedProductSpec {
    pub x: UnoStructure,
    pub y: UnoStructure,
    pub ideal: PointSet,
}

/// A reduced product with its collapse map.
#[derive(Debug, Clone)]
pub struct ReducedProduct {
    pub structure: UnoStructure,
    /// `q(x, y)` for the pair at index `x * |Y| + y`.
    pub collapse: Vec<usize>,
    /// `π`, the projection to `X`.
    pub projection: Vec<usize>,
    /// Points of the form `(x, y)`.
    pub pairs: PointSet,
}

impl ReducedProductSpec {
    pub fn check(&self) -> Result<(), ConstructionError> {
        let (x, i) = (&self.x, &self.ideal);
        if self.x.sides() != self.y.sides() {
            return Err(ConstructionError::SideMismatch);
        }
        if !i.within(x.len()) || !x.sg().is_two_sided_ideal(i) || !is_closed_set(x.top(), i) {
            return Err(ConstructionError::NotClosedIdeal);
        }
        for side in x.sides() {
            let unit = require(x, side)?;
            if let Some(z) = i.iter().find(|&z| !i.contains(unit[z])) {
                return Err(ConstructionError::UnitLeaksIdeal { side, x: z });
            }
        }
        Ok(())
    }
}

/// Carrier: the elements of `I` in increasing order, then `(x, y)` for
/// `x ∉ I` in lexicographic order. Topology generated by the preimages of
/// the opens of `X` under `π` together with the product opens of
/// `(X∖I) × Y`.
pub fn reduced_product(spec: &ReducedProductSpec) -> Result<ReducedProduct, ConstructionError> {
    spec.check()?;
    let (xs, ys, ideal) = (&spec.x, &spec.y, &spec.ideal);
    let (nx, m) = (xs.len(), ys.len());
    let k = ideal.len();
    let outside: Vec<usize> = (0..nx).filter(|z| !ideal.contains(*z)).collect();
    let size = k + outside.len() * m;

    // Index of each element of X under the collapse: ideal elements and
    // (x, y) pairs.
    let mut ideal_index = vec![usize::MAX; nx];
    for (j, z) in ideal.iter().enumerate() {
        ideal_index[z] = j;
    }
    let mut outside_index = vec![usize::MAX; nx];
    for (j, &z) in outside.iter().enumerate() {
        outside_index[z] = j;
    }
    let q = |x: usize, y: usize| -> usize {
        if ideal.contains(x) {
            ideal_index[x]
        } else {
            k + outside_index[x] * m + y
        }
    };
    // Representative (x, Some(y)) or (i, None).
    let rep: Vec<(usize, Option<usize>)> = ideal
        .iter()
        .map(|i| (i, None))
        .chain(outside.iter().flat_map(|&x| (0..m).map(move |y| (x, Some(y)))))
        .collect();
    let projection: Vec<usize> = rep.iter().map(|r| r.0).collect();

    let (sx, sy) = (xs.sg(), ys.sg());
    let mut table = Vec::with_capacity(size * size);
    for a in &rep {
        for b in &rep {
            let prod = sx.mul(a.0, b.0);
            let z = match (a.1, b.1) {
                _ if ideal.contains(prod) => ideal_index[prod],
                (Some(y1), Some(y2)) => q(prod, sy.mul(y1, y2)),
                _ => unreachable!("I is a two-sided ideal"),
            };
            table.push(z);
        }
    }
    let labels: Vec<String> = rep
        .iter()
        .map(|&(x, y)| match y {
            None => sx.label(x).to_string(),
            Some(y) => format!("{}|{}", sx.label(x), sy.label(y)),
        })
        .collect();
    let sg = FiniteSemigroup::from_flat(table, Some(labels))?;

    // q must be a homomorphism X × Y → X ×_I Y.
    let collapse: Vec<usize> = (0..nx * m).map(|p| q(p / m, p % m)).collect();
    for p in 0..nx * m {
        for r in 0..nx * m {
            let lhs = collapse[sx.mul(p / m, r / m) * m + sy.mul(p % m, r % m)];
            if lhs != sg.mul(collapse[p], collapse[r]) {
                return Err(ConstructionError::WellDefinednessFailure { p, q: r });
            }
        }
    }

    let mut subbase = Vec::new();
    for v in xs.top().min_nbhds() {
        subbase.push((0..size).filter(|&z| v.contains(projection[z])).collect::<PointSet>());
    }
    for &x in &outside {
        for y in 0..m {
            let mut set = PointSet::new();
            for x2 in xs.top().min_nbhd(x).iter().filter(|z| !ideal.contains(*z)) {
                for y2 in ys.top().min_nbhd(y).iter() {
                    set.insert(q(x2, y2));
                }
            }
            subbase.push(set);
        }
    }
    let top = generate_from_subbase(size, &subbase).expect("nonempty carrier");

    let unit = |side: Side| -> Option<Vec<usize>> {
        let (ux, uy) = (xs.unit(side)?, ys.unit(side)?);
        Some(
            rep.iter()
                .map(|&(x, y)| match y {
                    None => ideal_index[ux[x]],
                    Some(y) => q(ux[x], uy[y]),
                })
                .collect(),
        )
    };
    let structure = validate_uno(sg, top, unit(Side::Left), unit(Side::Right))?;
    let pairs = (k..size).collect();
    Ok(ReducedProduct { structure, collapse, projection, pairs })
}

fn require_group(g: &UnoStructure) -> Result<(), ConstructionError> {
    let sg = g.sg();
    let e = sg.identity().ok_or(ConstructionError::NotAGroup)?;
    if !sg.is_group() || g.sides().iter().any(|&s| g.unit(s).unwrap().iter().any(|&v| v != e)) {
        return Err(ConstructionError::NotAGroup);
    }
    Ok(())
}

/// Discrete min-chain `{0, 1/k, .., 1}` with identity units on the given
/// sides.
fn discrete_chain(k: usize, sides: &[Side]) -> Result<UnoStructure, ConstructionError> {
    let labels = (0..=k).map(|i| Ratio::new(i, k).to_string()).collect();
    let sg = FiniteSemigroup::min_chain(k + 1).with_labels(labels)?;
    let id: Vec<usize> = (0..=k).collect();
    let pick = |s: Side| sides.contains(&s).then(|| id.clone());
    Ok(validate_uno(sg, FiniteTopology::discrete(k + 1), pick(Side::Left), pick(Side::Right))?)
}

/// `2 ×_{0} G` for a group structure `G`.
pub fn zero_extension(g: &UnoStructure) -> Result<UnoStructure, ConstructionError> {
    chain_cone(g, 1)
}

/// Reduced product of the discrete chain `{0, 1/k, .., 1}` with `G` over
/// `{0}`.
pub fn chain_cone(g: &UnoStructure, k: usize) -> Result<UnoStructure, ConstructionError> {
    if k == 0 {
        return Err(ConstructionError::EmptyChain);
    }
    require_group(g)?;
    let spec = ReducedProductSpec { x: discrete_chain(k, &g.sides())?, y: g.clone(), ideal: PointSet::singleton(0) };
    Ok(reduced_product(&spec)?.structure)
}

/// A map `α: F × S → S`, stored row-major as `table[f * |S| + s]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Action {
    pub f_len: usize,
    pub s_len: usize,
    pub table: Vec<usize>,
}

impl Action {
    pub fn new(f_len: usize, s_len: usize, table: Vec<usize>) -> Self {
        Self { f_len, s_len, table }
    }

    pub fn from_fn(f_len: usize, s_len: usize, alpha: impl Fn(usize, usize) -> usize) -> Self {
        let table = (0..f_len * s_len).map(|i| alpha(i / s_len, i % s_len)).collect();
        Self { f_len, s_len, table }
    }

    /// `α(f, s) = s`.
    pub fn trivial(f_len: usize, s_len: usize) -> Self {
        Self::from_fn(f_len, s_len, |_, s| s)
    }

    pub fn apply(&self, f: usize, s: usize) -> usize {
        self.table[f * self.s_len + s]
    }
}

/// Endomorphism, composition and continuity laws.
pub fn validate_action(s: &UnoStructure, f: &UnoStructure, alpha: &Action) -> Result<(), ConstructionError> {
    let (ss, fs) = (s.sg(), f.sg());
    let (ns, nf) = (ss.len(), fs.len());
    let bad = |law| Err(ConstructionError::ActionInvalid(law));
    if alpha.s_len != ns || alpha.f_len != nf || alpha.table.len() != ns * nf || alpha.table.iter().any(|&v| v >= ns) {
        return bad(ActionLaw::Arity);
    }
    for fi in 0..nf {
        for a in 0..ns {
            for b in 0..ns {
                if alpha.apply(fi, ss.mul(a, b)) != ss.mul(alpha.apply(fi, a), alpha.apply(fi, b)) {
                    return bad(ActionLaw::Endomorphism { f: fi, a, b });
                }
            }
        }
    }
    for fi in 0..nf {
        for g in 0..nf {
            for x in 0..ns {
                if alpha.apply(fs.mul(fi, g), x) != alpha.apply(fi, alpha.apply(g, x)) {
                    return bad(ActionLaw::Composition { f: fi, g, s: x });
                }
            }
        }
    }
    for fi in 0..nf {
        for x in 0..ns {
            let target = s.top().min_nbhd(alpha.apply(fi, x));
            for f2 in f.top().min_nbhd(fi).iter() {
                if s.top().min_nbhd(x).iter().any(|x2| !target.contains(alpha.apply(f2, x2))) {
                    return bad(ActionLaw::NotContinuous { f: fi, s: x });
                }
            }
        }
    }
    Ok(())
}

/// `(s,f)·(t,g) = (s·α_f(t), f·g)` on `S × F`, index `s * |F| + f`, with the
/// product topology.
fn semidirect_base(
    s: &UnoStructure,
    f: &UnoStructure,
    alpha: &Action,
) -> Result<(FiniteSemigroup, FiniteTopology), ConstructionError> {
    validate_action(s, f, alpha)?;
    let (ss, fs) = (s.sg(), f.sg());
    let m = fs.len();
    let size = ss.len() * m;
    let mut table = Vec::with_capacity(size * size);
    for p in 0..size {
        for r in 0..size {
            let (s1, f1, t, g) = (p / m, p % m, r / m, r % m);
            table.push(ss.mul(s1, alpha.apply(f1, t)) * m + fs.mul(f1, g));
        }
    }
    let sg = FiniteSemigroup::from_flat(table, Some(pair_labels(ss, fs)))?;
    Ok((sg, s.top().product(f.top())))
}

fn check_respects_lambda_f(s: &UnoStructure, f: &UnoStructure, alpha: &Action) -> Result<(), ConstructionError> {
    let lf = require(f, Side::Left)?;
    for (fi, &l) in lf.iter().enumerate() {
        if let Some(x) = (0..s.len()).find(|&x| alpha.apply(l, x) != x) {
            return Err(ConstructionError::ActionDoesNotRespectUnit { side: Side::Left, f: fi, s: x });
        }
    }
    Ok(())
}

fn semidirect_lambda(s: &UnoStructure, f: &UnoStructure) -> Result<Vec<usize>, ConstructionError> {
    let (ls, lf) = (require(s, Side::Left)?, require(f, Side::Left)?);
    let m = f.len();
    Ok((0..s.len() * m).map(|p| ls[p / m] * m + lf[p % m]).collect())
}

/// Left semidirect product; `α` must respect `λ_F`.
pub fn semidirect_left(s: &UnoStructure, f: &UnoStructure, alpha: &Action) -> Result<UnoStructure, ConstructionError> {
    let (sg, top) = semidirect_base(s, f, alpha)?;
    check_respects_lambda_f(s, f, alpha)?;
    let lam = semidirect_lambda(s, f)?;
    Ok(validate_uno(sg, top, Some(lam), None)?)
}

/// The restrictions `ᾱ_f` to `ρ_S(S)` and their inverses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvertibleActionData {
    /// `ρ_S(S)` in increasing order.
    pub image: Vec<usize>,
    /// `inverse[f][j] = ᾱ_f⁻¹(image[j])`.
    pub inverse: Vec<Vec<usize>>,
}

impl InvertibleActionData {
    /// `α⁻(f, s)`, defined for `s ∈ ρ_S(S)`.
    pub fn alpha_minus(&self, f: usize, s: usize) -> Option<usize> {
        let j = self.image.binary_search(&s).ok()?;
        Some(self.inverse[f][j])
    }
}

pub fn check_rho_invertible(
    s: &UnoStructure,
    f: &UnoStructure,
    alpha: &Action,
) -> Result<InvertibleActionData, ConstructionError> {
    validate_action(s, f, alpha)?;
    let rs = require(s, Side::Right)?;
    let image_set: PointSet = rs.iter().collect();
    let image = image_set.to_vec();
    let mut inverse = Vec::with_capacity(f.len());
    for fi in 0..f.len() {
        let mut inv = vec![usize::MAX; image.len()];
        for &x in &image {
            let y = alpha.apply(fi, x);
            let j = image.binary_search(&y).map_err(|_| ConstructionError::NotInvertible { f: fi })?;
            if inv[j] != usize::MAX {
                return Err(ConstructionError::NotInvertible { f: fi });
            }
            inv[j] = x;
        }
        inverse.push(inv);
    }
    let data = InvertibleActionData { image, inverse };
    // Continuity on F × ρ_S(S) with the subspace topology on the image.
    for fi in 0..f.len() {
        for &x in &data.image {
            let target = s.top().min_nbhd(data.alpha_minus(fi, x).unwrap());
            for f2 in f.top().min_nbhd(fi).iter() {
                for x2 in (s.top().min_nbhd(x) & &image_set).iter() {
                    if !target.contains(data.alpha_minus(f2, x2).unwrap()) {
                        return Err(ConstructionError::AlphaMinusNotContinuous { f: fi, s: x });
                    }
                }
            }
        }
    }
    Ok(data)
}

/// The three sufficient conditions for `ρ_S`-invertibility with the given
/// unary operation on `F`. False when `inv_unary` is not a continuous map.
pub fn check_invertibility_sufficient(s: &UnoStructure, f: &UnoStructure, alpha: &Action, inv_unary: &[usize]) -> bool {
    let (Some(rs), Some(rf)) = (s.rho(), f.rho()) else {
        return false;
    };
    if validate_action(s, f, alpha).is_err() || !is_continuous(inv_unary, f.top(), f.top()).unwrap_or(false) {
        return false;
    }
    let respects_rho_f = (0..f.len()).all(|fi| (0..s.len()).all(|x| alpha.apply(rf[fi], x) == x));
    let image: PointSet = rs.iter().collect();
    let preserves_image =
        (0..f.len()).all(|fi| image.iter().map(|x| alpha.apply(fi, x)).collect::<PointSet>() == image);
    let rho_is_inverse_product = (0..f.len()).all(|fi| rf[fi] == f.sg().mul(inv_unary[fi], fi));
    respects_rho_f && preserves_image && rho_is_inverse_product
}

fn semidirect_rho(
    s: &UnoStructure,
    f: &UnoStructure,
    data: &InvertibleActionData,
) -> Result<Vec<usize>, ConstructionError> {
    let (rs, rf) = (require(s, Side::Right)?, require(f, Side::Right)?);
    let m = f.len();
    Ok((0..s.len() * m)
        .map(|p| {
            let (x, fi) = (p / m, p % m);
            data.alpha_minus(fi, rs[x]).expect("rho_S value lies in the image") * m + rf[fi]
        })
        .collect())
}

/// Right semidirect product for a `ρ_S`-invertible action.
pub fn semidirect_right(
    s: &UnoStructure,
    f: &UnoStructure,
    alpha: &Action,
    data: &InvertibleActionData,
) -> Result<UnoStructure, ConstructionError> {
    let (sg, top) = semidirect_base(s, f, alpha)?;
    let rho = semidirect_rho(s, f, data)?;
    Ok(validate_uno(sg, top, None, Some(rho))?)
}

/// Two-sided semidirect product for a `λ_F`-respecting, `ρ_S`-invertible
/// action.
pub fn semidirect_full(
    s: &UnoStructure,
    f: &UnoStructure,
    alpha: &Action,
    data: &InvertibleActionData,
) -> Result<UnoStructure, ConstructionError> {
    let (sg, top) = semidirect_base(s, f, alpha)?;
    check_respects_lambda_f(s, f, alpha)?;
    let lam = semidirect_lambda(s, f)?;
    let rho = semidirect_rho(s, f, data)?;
    Ok(validate_uno(Arc::new(sg), top, Some(lam), Some(rho))?)
}
