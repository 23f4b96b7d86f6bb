//! Finite topological spaces in minimal-neighborhood form.
//!
//! A topology on `{0, .., n-1}` is stored as the map sending each point to
//! the smallest open set containing it. The open sets are exactly the unions
//! of these minimal neighborhoods, and the topology is the same data as its
//! specialization preorder (`x ⊑ y` iff `y ∈ min_nbhd(x)`).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pointset::PointSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("listed set {set:?} has a point outside 0..{n}")]
    OutOfRange { set: Vec<usize>, n: usize },
    #[error("open-set family must contain the empty set and the whole carrier")]
    MissingEmptyOrWhole,
    #[error("union of {a:?} and {b:?} is not listed")]
    NotClosedUnderUnion { a: Vec<usize>, b: Vec<usize> },
    #[error("intersection of {a:?} and {b:?} is not listed")]
    NotClosedUnderIntersection { a: Vec<usize>, b: Vec<usize> },
    #[error("minimal neighborhood of {point} is not a valid minimal neighborhood")]
    InvalidMinNbhd { point: usize },
    #[error("empty carrier")]
    EmptyCarrier,
    #[error("map has {got} entries but the domain has {expected} points")]
    ArityMismatch { expected: usize, got: usize },
}

/// User-facing open-set list; converted to [`FiniteTopology`] by
/// [`validate_topology`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenSetFamily {
    pub n: usize,
    pub opens: Vec<PointSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteTopology {
    min_nbhd: Vec<PointSet>,
}

/// Specialization preorder: `le(x, y)` iff every open set containing `x`
/// contains `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preorder {
    up: Vec<PointSet>,
}

impl Preorder {
    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    /// All related pairs `(x, y)` with `x ⊑ y`, lexicographically.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.up.iter().enumerate().flat_map(|(x, up)| up.iter().map(move |y| (x, y))).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().into_iter().all(|(x, y)| self.le(y, x))
    }

    pub fn is_equality(&self) -> bool {
        self.up.iter().all(|u| u.len() == 1)
    }
}

/// A subspace re-indexed densely; `points[i]` is the original index of
/// subspace point `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub topology: FiniteTopology,
    pub points: Vec<usize>,
}

impl Subspace {
    /// Original index of each subspace point, inverted. `None` off the carrier.
    pub fn local_index(&self, original: usize) -> Option<usize> {
        self.points.binary_search(&original).ok()
    }

    pub fn to_original(&self, local: &PointSet) -> PointSet {
        local.iter().map(|i| self.points[i]).collect()
    }
}

impl FiniteTopology {
    /// Checks the three minimal-neighborhood invariants.
    pub fn from_min_nbhds(min_nbhd: Vec<PointSet>) -> Result<Self, TopologyError> {
        let n = min_nbhd.len();
        if n == 0 {
            return Err(TopologyError::EmptyCarrier);
        }
        for (x, m) in min_nbhd.iter().enumerate() {
            if !m.contains(x) || !m.within(n) {
                return Err(TopologyError::InvalidMinNbhd { point: x });
            }
            if m.iter().any(|y| !min_nbhd[y].is_subset(m)) {
                return Err(TopologyError::InvalidMinNbhd { point: x });
            }
        }
        Ok(Self { min_nbhd })
    }

    pub(crate) fn from_min_nbhds_unchecked(min_nbhd: Vec<PointSet>) -> Self {
        debug_assert!(Self::from_min_nbhds(min_nbhd.clone()).is_ok());
        Self { min_nbhd }
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_min_nbhds_unchecked((0..n).map(PointSet::singleton).collect())
    }

    pub fn indiscrete(n: usize) -> Self {
        Self::from_min_nbhds_unchecked(vec![PointSet::full(n); n])
    }

    /// Two points, `{1}` open: `min_nbhd(0) = {0,1}`, `min_nbhd(1) = {1}`.
    pub fn sierpinski() -> Self {
        Self::from_min_nbhds_unchecked(vec![PointSet::full(2), PointSet::singleton(1)])
    }

    /// Topology whose specialization preorder is the chain `0 ⊑ 1 ⊑ .. ⊑ n-1`.
    pub fn chain(n: usize) -> Self {
        Self::from_min_nbhds_unchecked((0..n).map(|x| (x..n).collect::<PointSet>()).collect())
    }

    pub fn len(&self) -> usize {
        self.min_nbhd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min_nbhd.is_empty()
    }

    pub fn min_nbhd(&self, x: usize) -> &PointSet {
        &self.min_nbhd[x]
    }

    pub fn min_nbhds(&self) -> &[PointSet] {
        &self.min_nbhd
    }

    /// `a` is open iff it contains the minimal neighborhood of each of its points.
    pub fn is_open(&self, a: &PointSet) -> bool {
        a.iter().all(|x| self.min_nbhd[x].is_subset(a))
    }

    pub fn is_closed(&self, a: &PointSet) -> bool {
        self.is_open(&(&PointSet::full(self.len()) - a))
    }

    /// Smallest open set containing `a`.
    pub fn open_hull(&self, a: &PointSet) -> PointSet {
        let mut out = PointSet::new();
        for x in a.iter() {
            out.union_with(&self.min_nbhd[x]);
        }
        out
    }

    /// Every open set, in `PointSet` order. Exponential in the worst case
    /// (discrete topology); intended for oracle-sized carriers.
    pub fn opens(&self) -> Vec<PointSet> {
        let mut all: BTreeSet<PointSet> = BTreeSet::new();
        all.insert(PointSet::new());
        for m in &self.min_nbhd {
            let grown: Vec<PointSet> = all.iter().map(|o| o | m).collect();
            all.extend(grown);
        }
        all.into_iter().collect()
    }

    /// Open sets containing `x`.
    pub fn opens_containing(&self, x: usize) -> Vec<PointSet> {
        self.opens().into_iter().filter(|o| o.contains(x)).collect()
    }

    pub fn to_open_family(&self) -> OpenSetFamily {
        OpenSetFamily { n: self.len(), opens: self.opens() }
    }

    pub fn specialization_preorder(&self) -> Preorder {
        Preorder { up: self.min_nbhd.clone() }
    }

    pub fn is_discrete(&self) -> bool {
        self.min_nbhd.iter().all(|m| m.len() == 1)
    }

    /// Finite spaces are Hausdorff exactly when discrete.
    pub fn is_hausdorff(&self) -> bool {
        self.specialization_preorder().is_equality()
    }

    /// Topology whose minimal neighborhoods are the classes of an
    /// equivalence relation.
    pub fn is_partition(&self) -> bool {
        self.specialization_preorder().is_symmetric()
    }

    /// Subspace on `a`, re-indexed densely in increasing order of `a`.
    pub fn subspace(&self, a: &PointSet) -> Result<Subspace, TopologyError> {
        if a.is_empty() {
            return Err(TopologyError::EmptyCarrier);
        }
        let points = a.to_vec();
        let local = |s: &PointSet| -> PointSet { s.iter().filter_map(|p| points.binary_search(&p).ok()).collect() };
        let min_nbhd = points.iter().map(|&p| local(&(&self.min_nbhd[p] & a))).collect();
        Ok(Subspace { topology: Self::from_min_nbhds_unchecked(min_nbhd), points })
    }

    /// Product topology; the pair `(x, y)` is encoded as `x * other.len() + y`.
    pub fn product(&self, other: &FiniteTopology) -> FiniteTopology {
        let m = other.len();
        let mut min_nbhd = Vec::with_capacity(self.len() * m);
        for x in 0..self.len() {
            for y in 0..m {
                let mut s = PointSet::new();
                for a in self.min_nbhd[x].iter() {
                    for b in other.min_nbhd[y].iter() {
                        s.insert(a * m + b);
                    }
                }
                min_nbhd.push(s);
            }
        }
        Self::from_min_nbhds_unchecked(min_nbhd)
    }

    /// Folds [`product`](Self::product) left to right.
    pub fn product_all(factors: &[FiniteTopology]) -> Option<FiniteTopology> {
        let (first, rest) = factors.split_first()?;
        Some(rest.iter().fold(first.clone(), |acc, t| acc.product(t)))
    }
}

pub fn validate_topology(f: &OpenSetFamily) -> Result<FiniteTopology, TopologyError> {
    let n = f.n;
    if n == 0 {
        return Err(TopologyError::EmptyCarrier);
    }
    for s in &f.opens {
        if !s.within(n) {
            return Err(TopologyError::OutOfRange { set: s.to_vec(), n });
        }
    }
    let listed: BTreeSet<&PointSet> = f.opens.iter().collect();
    let whole = PointSet::full(n);
    if !listed.contains(&PointSet::new()) || !listed.contains(&whole) {
        return Err(TopologyError::MissingEmptyOrWhole);
    }
    for a in &listed {
        for b in &listed {
            if !listed.contains(&(*a | *b)) {
                return Err(TopologyError::NotClosedUnderUnion { a: a.to_vec(), b: b.to_vec() });
            }
            if !listed.contains(&(*a & *b)) {
                return Err(TopologyError::NotClosedUnderIntersection { a: a.to_vec(), b: b.to_vec() });
            }
        }
    }
    let min_nbhd =
        (0..n).map(|x| listed.iter().filter(|o| o.contains(x)).fold(whole.clone(), |acc, o| &acc & *o)).collect();
    FiniteTopology::from_min_nbhds(min_nbhd)
}

/// Coarsest topology in which every listed set is open. Points lying in no
/// listed set get the whole carrier as minimal neighborhood.
pub fn generate_from_subbase(n: usize, sets: &[PointSet]) -> Result<FiniteTopology, TopologyError> {
    if n == 0 {
        return Err(TopologyError::EmptyCarrier);
    }
    let whole = PointSet::full(n);
    let min_nbhd =
        (0..n).map(|x| sets.iter().filter(|s| s.contains(x)).fold(whole.clone(), |acc, s| &acc & s)).collect();
    Ok(FiniteTopology::from_min_nbhds_unchecked(min_nbhd))
}

fn check_arity(f: &[usize], dom: &FiniteTopology, cod: &FiniteTopology) -> Result<(), TopologyError> {
    if f.len() != dom.len() {
        return Err(TopologyError::ArityMismatch { expected: dom.len(), got: f.len() });
    }
    if f.iter().any(|&y| y >= cod.len()) {
        return Err(TopologyError::ArityMismatch {
            expected: cod.len(),
            got: f.iter().copied().max().map_or(0, |m| m + 1),
        });
    }
    Ok(())
}

/// Preimage form: `f` is continuous iff the preimage of every minimal
/// neighborhood is open (every open set is a union of those).
pub fn is_continuous(f: &[usize], dom: &FiniteTopology, cod: &FiniteTopology) -> Result<bool, TopologyError> {
    check_arity(f, dom, cod)?;
    Ok(cod.min_nbhds().iter().all(|v| {
        let pre: PointSet = (0..dom.len()).filter(|&x| v.contains(f[x])).collect();
        dom.is_open(&pre)
    }))
}

/// Preorder form: `x ⊑ y ⇒ f(x) ⊑ f(y)`.
pub fn preserves_specialization(
    f: &[usize],
    dom: &FiniteTopology,
    cod: &FiniteTopology,
) -> Result<bool, TopologyError> {
    check_arity(f, dom, cod)?;
    Ok((0..dom.len()).all(|x| dom.min_nbhd(x).iter().all(|y| cod.min_nbhd(f[x]).contains(f[y]))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(xs: &[usize]) -> PointSet {
        xs.iter().collect()
    }

    /// All subsets of 0..n as point sets.
    fn all_subsets(n: usize) -> Vec<PointSet> {
        (0u64..1 << n).map(PointSet::from_mask).collect()
    }

    /// Every topology on 0..n, by filtering all minimal-neighborhood choices.
    fn all_topologies(n: usize) -> Vec<FiniteTopology> {
        let choices: Vec<Vec<PointSet>> =
            (0..n).map(|x| all_subsets(n).into_iter().filter(|s| s.contains(x)).collect()).collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let m: Vec<PointSet> = (0..n).map(|x| choices[x][idx[x]].clone()).collect();
            if let Ok(t) = FiniteTopology::from_min_nbhds(m) {
                out.push(t);
            }
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        out
    }

    #[test]
    fn validate_sierpinski_family() {
        let f = OpenSetFamily { n: 2, opens: vec![ps(&[]), ps(&[1]), ps(&[0, 1])] };
        let t = validate_topology(&f).unwrap();
        assert_eq!(t.min_nbhd(0), &ps(&[0, 1]));
        assert_eq!(t.min_nbhd(1), &ps(&[1]));
        assert_eq!(t, FiniteTopology::sierpinski());
    }

    #[test]
    fn validate_rejects_missing_whole() {
        let f = OpenSetFamily { n: 2, opens: vec![ps(&[]), ps(&[0]), ps(&[1])] };
        assert_eq!(validate_topology(&f), Err(TopologyError::MissingEmptyOrWhole));
    }

    #[test]
    fn validate_rejects_open_union_and_intersection_gaps() {
        let f = OpenSetFamily { n: 3, opens: vec![ps(&[]), ps(&[0]), ps(&[1]), ps(&[0, 1, 2])] };
        assert!(matches!(validate_topology(&f), Err(TopologyError::NotClosedUnderUnion { .. })));
        let g = OpenSetFamily { n: 3, opens: vec![ps(&[]), ps(&[0, 1]), ps(&[1, 2]), ps(&[0, 1, 2])] };
        assert!(matches!(validate_topology(&g), Err(TopologyError::NotClosedUnderIntersection { .. })));
        let h = OpenSetFamily { n: 2, opens: vec![ps(&[]), ps(&[0, 1]), ps(&[3])] };
        assert!(matches!(validate_topology(&h), Err(TopologyError::OutOfRange { .. })));
    }

    #[test]
    fn validate_all_subsets_is_discrete() {
        let f = OpenSetFamily { n: 3, opens: all_subsets(3) };
        let t = validate_topology(&f).unwrap();
        assert!(t.is_discrete());
        assert_eq!(t, FiniteTopology::discrete(3));
    }

    #[test]
    fn specialization_examples() {
        assert_eq!(FiniteTopology::sierpinski().specialization_preorder().pairs(), vec![(0, 0), (0, 1), (1, 1)]);
        assert_eq!(FiniteTopology::discrete(3).specialization_preorder().pairs(), vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(
            FiniteTopology::indiscrete(2).specialization_preorder().pairs(),
            vec![(0, 0), (0, 1), (1, 0), (1, 1)]
        );
    }

    #[test]
    fn preorder_is_reflexive_and_transitive_on_all_small_topologies() {
        for n in 1..=4 {
            for t in all_topologies(n) {
                let p = t.specialization_preorder();
                for x in 0..n {
                    assert!(p.le(x, x));
                    for y in 0..n {
                        for z in 0..n {
                            if p.le(x, y) && p.le(y, z) {
                                assert!(p.le(x, z));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subspace_examples() {
        let s = FiniteTopology::sierpinski().subspace(&ps(&[0])).unwrap();
        assert_eq!(s.topology, FiniteTopology::discrete(1));
        let d = FiniteTopology::discrete(4).subspace(&ps(&[1, 3])).unwrap();
        assert!(d.topology.is_discrete());
        assert_eq!(d.points, vec![1, 3]);
        assert_eq!(FiniteTopology::discrete(2).subspace(&PointSet::new()), Err(TopologyError::EmptyCarrier));
    }

    #[test]
    fn subspace_of_chain_matches_open_traces() {
        let t = FiniteTopology::chain(3);
        let a = ps(&[0, 2]);
        // Oracle: smallest trace O ∩ A over all opens O containing the point.
        let trace_min = |x: usize| -> PointSet {
            t.opens().iter().filter(|o| o.contains(x)).map(|o| o & &a).min_by_key(|s| s.len()).unwrap()
        };
        assert_eq!(trace_min(0), ps(&[0, 2]));
        assert_eq!(trace_min(2), ps(&[2]));
        let sub = t.subspace(&a).unwrap();
        assert_eq!(sub.to_original(sub.topology.min_nbhd(0)), ps(&[0, 2]));
        assert_eq!(sub.to_original(sub.topology.min_nbhd(1)), ps(&[2]));
    }

    #[test]
    fn subspace_equals_traces_exhaustively() {
        for n in 1..=4 {
            for t in all_topologies(n) {
                for a in all_subsets(n).into_iter().filter(|a| !a.is_empty()) {
                    let sub = t.subspace(&a).unwrap();
                    let traces: BTreeSet<PointSet> = t.opens().iter().map(|o| o & &a).collect();
                    let sub_opens: BTreeSet<PointSet> =
                        sub.topology.opens().iter().map(|o| sub.to_original(o)).collect();
                    assert_eq!(traces, sub_opens);
                }
            }
        }
    }

    #[test]
    fn product_examples() {
        let d = FiniteTopology::discrete(2).product(&FiniteTopology::discrete(3));
        assert!(d.is_discrete());
        let ss = FiniteTopology::sierpinski().product(&FiniteTopology::sierpinski());
        assert_eq!(ss.min_nbhd(0), &PointSet::full(4));
        // Sierpiński × indiscrete(2); oracle: intersect all open rectangles
        // containing (1, y).
        let (s, i) = (FiniteTopology::sierpinski(), FiniteTopology::indiscrete(2));
        let p = s.product(&i);
        for y in 0..2 {
            let mut rect_min = PointSet::full(4);
            for o1 in s.opens().iter().filter(|o| o.contains(1)) {
                for o2 in i.opens().iter().filter(|o| o.contains(y)) {
                    let r: PointSet = o1.iter().flat_map(|a| o2.iter().map(move |b| a * 2 + b)).collect();
                    rect_min = &rect_min & &r;
                }
            }
            assert_eq!(rect_min, ps(&[2, 3]));
            assert_eq!(p.min_nbhd(2 + y), &rect_min);
        }
    }

    #[test]
    fn product_preorder_is_componentwise() {
        let tops: Vec<FiniteTopology> = (1..=3).flat_map(all_topologies).collect();
        for a in &tops {
            for b in &tops {
                let p = a.product(b).specialization_preorder();
                let (pa, pb) = (a.specialization_preorder(), b.specialization_preorder());
                let m = b.len();
                for x in 0..a.len() * m {
                    for y in 0..a.len() * m {
                        assert_eq!(p.le(x, y), pa.le(x / m, y / m) && pb.le(x % m, y % m));
                    }
                }
            }
        }
    }

    #[test]
    fn subbase_examples() {
        let t = generate_from_subbase(2, &[ps(&[1]), ps(&[0, 1])]).unwrap();
        assert_eq!(t, FiniteTopology::sierpinski());
        assert_eq!(generate_from_subbase(2, &[]).unwrap(), FiniteTopology::indiscrete(2));

        // Oracle: close the sub-base under pairwise ∩ and ∪ until stable.
        let sub = vec![ps(&[0, 1]), ps(&[1, 2])];
        let mut fam: BTreeSet<PointSet> = sub.iter().cloned().collect();
        fam.insert(PointSet::new());
        fam.insert(PointSet::full(3));
        loop {
            let cur: Vec<PointSet> = fam.iter().cloned().collect();
            let before = fam.len();
            for a in &cur {
                for b in &cur {
                    fam.insert(a & b);
                    fam.insert(a | b);
                }
            }
            if fam.len() == before {
                break;
            }
        }
        let oracle = validate_topology(&OpenSetFamily { n: 3, opens: fam.into_iter().collect() }).unwrap();
        let t = generate_from_subbase(3, &sub).unwrap();
        assert_eq!(t, oracle);
        assert_eq!(t.min_nbhd(1), &ps(&[1]));
        assert_eq!(t.min_nbhd(0), &ps(&[0, 1]));
        assert_eq!(t.min_nbhd(2), &ps(&[1, 2]));
    }

    #[test]
    fn subbase_output_is_coarsest() {
        for n in 1..=4usize {
            let subsets = all_subsets(n);
            let tops = all_topologies(n);
            // A spread of sub-bases: every pair of subsets.
            for a in &subsets {
                for b in &subsets {
                    let sub = vec![a.clone(), b.clone()];
                    let t = generate_from_subbase(n, &sub).unwrap();
                    assert!(sub.iter().all(|s| t.is_open(s)));
                    // Every topology containing the sub-base is finer.
                    for other in tops.iter().filter(|o| sub.iter().all(|s| o.is_open(s))) {
                        assert!(t.opens().iter().all(|o| other.is_open(o)));
                    }
                }
            }
        }
    }

    #[test]
    fn open_family_round_trip() {
        for n in 1..=4 {
            for t in all_topologies(n) {
                let fam = t.to_open_family();
                let set: BTreeSet<PointSet> = fam.opens.iter().cloned().collect();
                for a in &set {
                    for b in &set {
                        assert!(set.contains(&(a | b)) && set.contains(&(a & b)));
                    }
                }
                assert_eq!(validate_topology(&fam).unwrap(), t);
            }
        }
    }

    #[test]
    fn continuity_examples() {
        let s = FiniteTopology::sierpinski();
        assert!(is_continuous(&[0, 1], &s, &s).unwrap());
        assert!(is_continuous(&[1, 1], &s, &s).unwrap());
        assert!(is_continuous(&[0, 0], &s, &FiniteTopology::discrete(2)).unwrap());
        assert!(!is_continuous(&[0, 1], &s, &FiniteTopology::discrete(2)).unwrap());
        assert_eq!(is_continuous(&[0], &s, &s), Err(TopologyError::ArityMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn continuity_forms_agree_exhaustively() {
        for n in 1..=3usize {
            let tops = all_topologies(n);
            let maps: Vec<Vec<usize>> = (0..n.pow(n as u32))
                .map(|mut k| {
                    (0..n)
                        .map(|_| {
                            let v = k % n;
                            k /= n;
                            v
                        })
                        .collect()
                })
                .collect();
            for d in &tops {
                for c in &tops {
                    for f in &maps {
                        // Literal definition: every open preimage is open.
                        let literal = c.opens().iter().all(|v| {
                            let pre: PointSet = (0..n).filter(|&x| v.contains(f[x])).collect();
                            d.is_open(&pre)
                        });
                        assert_eq!(is_continuous(f, d, c).unwrap(), literal);
                        assert_eq!(preserves_specialization(f, d, c).unwrap(), literal);
                    }
                }
            }
        }
    }

    #[test]
    fn continuity_forms_agree_at_four_points() {
        let tops = all_topologies(4);
        assert_eq!(tops.len(), 355);
        let maps: Vec<Vec<usize>> = vec![
            vec![0, 1, 2, 3],
            vec![0, 0, 0, 0],
            vec![1, 0, 3, 2],
            vec![0, 0, 1, 1],
            vec![3, 2, 1, 0],
            vec![0, 1, 1, 2],
        ];
        for d in &tops {
            for c in &tops {
                for f in &maps {
                    assert_eq!(is_continuous(f, d, c).unwrap(), preserves_specialization(f, d, c).unwrap());
                }
            }
        }
    }

    #[test]
    fn hausdorff_is_discrete() {
        for n in 1..=4 {
            for t in all_topologies(n) {
                assert_eq!(t.is_hausdorff(), t.is_discrete());
            }
        }
    }
}
