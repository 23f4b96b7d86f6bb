//! Exhaustive enumeration of small models, isomorphism keys, the hunt for a
//! finite non-ditopological structure, and theorem sweeps.
//!
//! Every stream here is deterministic: topologies outermost, semigroups
//! next, unit maps innermost, each in a fixed backtracking order. Parallel
//! stages collect in input order, so results never depend on the number of
//! workers.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::finsg::{default_labels, FiniteSemigroup};
use crate::fintop::{is_continuous, FiniteTopology};
use crate::pointset::PointSet;
use crate::unocore::{
    canonical_units, dicontinuity_failure, dicontinuity_oracle, is_ditopological, multiplication_continuity_failure,
    DicontinuityReport, Side, UnoError, UnoStructure,
};

mod sweeps;

pub use sweeps::{hm_bases, known_witnesses, theorem_sweep, SweepConfig, SweepException, SweepReport, TheoremId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("fast criterion and oracle disagree on the {side} side at point {point}")]
    OracleDisagreement { side: Side, point: usize, structure: Box<UnoStructure> },
    #[error("budget of {budget} structures exceeded")]
    BudgetExceeded { budget: u64, partial: Box<HuntReport> },
    #[error("unknown theorem id {0:?}")]
    UnknownTheoremId(String),
    #[error("unknown filter {0:?}")]
    UnknownFilter(String),
    #[error("invalid shard {index}/{count}")]
    BadShard { index: usize, count: usize },
    #[error("carrier size must be between 1 and {max}")]
    BadSize { max: usize },
    #[error(transparent)]
    Uno(#[from] UnoError),
}

/// Largest carrier handled by the enumerators.
pub const MAX_N: usize = 6;

/// All labeled associative tables on `n` points, by row-major backtracking
/// with associativity checked on every fully defined triple.
pub fn enumerate_semigroups(n: usize) -> Vec<FiniteSemigroup> {
    fn consistent(n: usize, t: &[usize]) -> bool {
        const U: usize = usize::MAX;
        for a in 0..n {
            for b in 0..n {
                let ab = t[a * n + b];
                if ab == U {
                    continue;
                }
                for c in 0..n {
                    let bc = t[b * n + c];
                    if bc == U {
                        continue;
                    }
                    let (l, r) = (t[ab * n + c], t[a * n + bc]);
                    if l != U && r != U && l != r {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn rec(pos: usize, n: usize, t: &mut Vec<usize>, out: &mut Vec<FiniteSemigroup>) {
        if pos == n * n {
            out.push(FiniteSemigroup::from_flat_unchecked(t.clone(), default_labels(n)));
            return;
        }
        for v in 0..n {
            t[pos] = v;
            if consistent(n, t) {
                rec(pos + 1, n, t, out);
            }
        }
        t[pos] = usize::MAX;
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(0, n, &mut vec![usize::MAX; n * n], &mut out);
    }
    out
}

/// All labeled topologies on `n` points as minimal-neighborhood maps,
/// choosing `min(x)` for `x = 0, 1, ..` in increasing mask order.
pub fn enumerate_topologies(n: usize) -> Vec<FiniteTopology> {
    fn rec(x: usize, n: usize, mins: &mut Vec<u64>, out: &mut Vec<FiniteTopology>) {
        if x == n {
            let (ok, sets) = (
                (0..n).all(|p| (0..n).all(|q| mins[p] >> q & 1 == 0 || mins[q] & !mins[p] == 0)),
                mins.iter().map(|&m| PointSet::from_mask(m)).collect(),
            );
            if ok {
                out.push(FiniteTopology::from_min_nbhds_unchecked(sets));
            }
            return;
        }
        for mask in 0u64..1 << n {
            if mask >> x & 1 == 0 {
                continue;
            }
            // Already fixed neighbors must be compatible both ways.
            let ok = (0..x).all(|y| {
                (mask >> y & 1 == 0 || mins[y] & !mask == 0) && (mins[y] >> x & 1 == 0 || mask & !mins[y] == 0)
            });
            if ok {
                mins[x] = mask;
                rec(x + 1, n, mins, out);
            }
        }
    }
    let mut out = Vec::new();
    if (1..=MAX_N).contains(&n) {
        rec(0, n, &mut vec![0; n], &mut out);
    }
    out
}

/// All continuous unit maps for `side`, by backtracking over elements with
/// the unit axiom and continuity checked as soon as both ends are fixed.
pub fn unit_maps(sg: &FiniteSemigroup, top: &FiniteTopology, side: Side) -> Vec<Vec<usize>> {
    let n = sg.len();
    let cands: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            (0..n)
                .filter(|&u| match side {
                    Side::Left => sg.mul(u, x) == x,
                    Side::Right => sg.mul(x, u) == x,
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut map = vec![0; n];
    fn rec(x: usize, cands: &[Vec<usize>], top: &FiniteTopology, map: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if x == cands.len() {
            out.push(map.clone());
            return;
        }
        for &u in &cands[x] {
            let ok = (0..x).all(|y| {
                (!top.min_nbhd(x).contains(y) || top.min_nbhd(u).contains(map[y]))
                    && (!top.min_nbhd(y).contains(x) || top.min_nbhd(map[y]).contains(u))
            });
            if ok {
                map[x] = u;
                rec(x + 1, cands, top, map, out);
            }
        }
    }
    rec(0, &cands, top, &mut map, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum What {
    Semigroups,
    Topologies,
    LeftUnos,
    RightUnos,
    Unos,
    InverseUnos,
}

impl What {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "semigroups" => What::Semigroups,
            "topologies" => What::Topologies,
            "left-unos" => What::LeftUnos,
            "right-unos" => What::RightUnos,
            "unos" => What::Unos,
            "inverse-unos" => What::InverseUnos,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filter {
    /// Every present unit is the identity.
    Idempotent,
    Inverse,
    Group,
    Semilattice,
    Discrete,
    LeftUniformizable,
    RightUniformizable,
}

impl Filter {
    pub fn parse(s: &str) -> Result<Self, SearchError> {
        Ok(match s {
            "idempotent" => Filter::Idempotent,
            "inverse" => Filter::Inverse,
            "group" => Filter::Group,
            "semilattice" => Filter::Semilattice,
            "discrete" => Filter::Discrete,
            "left-uniformizable" => Filter::LeftUniformizable,
            "right-uniformizable" => Filter::RightUniformizable,
            _ => return Err(SearchError::UnknownFilter(s.to_string())),
        })
    }

    pub fn accepts(self, u: &UnoStructure) -> bool {
        match self {
            Filter::Idempotent => {
                u.sides().iter().all(|&s| u.unit(s).unwrap().iter().enumerate().all(|(i, &v)| i == v))
            }
            Filter::Inverse => u.sg().inverse_structure().is_ok(),
            Filter::Group => u.sg().is_group(),
            Filter::Semilattice => u.sg().is_semilattice(),
            Filter::Discrete => u.top().is_discrete(),
            Filter::LeftUniformizable => crate::unocore::left_uniformizable(u).is_some(),
            Filter::RightUniformizable => crate::unocore::right_uniformizable(u).is_some(),
        }
    }
}

/// `(index, count)`: this shard keeps the items whose position in the
/// outer stream is `index` mod `count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Shard {
    pub index: usize,
    pub count: usize,
}

impl Shard {
    pub const ALL: Shard = Shard { index: 0, count: 1 };

    pub fn new(index: usize, count: usize) -> Result<Self, SearchError> {
        if count == 0 || index >= count {
            return Err(SearchError::BadShard { index, count });
        }
        Ok(Self { index, count })
    }

    pub fn keeps(self, i: usize) -> bool {
        i % self.count == self.index
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationTask {
    pub n: usize,
    pub what: What,
    pub filters: Vec<Filter>,
    pub shard: Shard,
}

impl EnumerationTask {
    pub fn new(n: usize, what: What) -> Self {
        Self { n, what, filters: Vec::new(), shard: Shard::ALL }
    }

    pub fn with_filters(mut self, filters: &[Filter]) -> Self {
        self.filters = filters.to_vec();
        self
    }

    pub fn with_shard(mut self, shard: Shard) -> Self {
        self.shard = shard;
        self
    }
}

/// Topology and semigroup with continuous multiplication.
pub type Pair = (Arc<FiniteTopology>, Arc<FiniteSemigroup>);

/// Shared enumerator output for one carrier size.
pub struct Substrate {
    pub topologies: Vec<Arc<FiniteTopology>>,
    pub semigroups: Vec<Arc<FiniteSemigroup>>,
}

impl Substrate {
    pub fn new(n: usize) -> Self {
        let topologies = enumerate_topologies(n).into_iter().map(Arc::new).collect();
        let semigroups = enumerate_semigroups(n).into_iter().map(Arc::new).collect();
        Self { topologies, semigroups }
    }

    /// Continuous pairs in order (topology outer), restricted to a shard of
    /// the full `topology × semigroup` index.
    pub fn pairs(&self, shard: Shard) -> Vec<Pair> {
        let m = self.semigroups.len();
        (0..self.topologies.len() * m)
            .into_par_iter()
            .filter(|&i| shard.keeps(i))
            .filter_map(|i| {
                let (t, s) = (&self.topologies[i / m], &self.semigroups[i % m]);
                multiplication_continuity_failure(s, t).is_none().then(|| (t.clone(), s.clone()))
            })
            .collect()
    }
}

fn structures_for_pair(what: What, (t, s): &Pair) -> Vec<UnoStructure> {
    match what {
        What::LeftUnos => unit_maps(s, t, Side::Left)
            .into_iter()
            .map(|l| UnoStructure::assemble(s.clone(), t.clone(), Some(l), None))
            .collect(),
        What::RightUnos => unit_maps(s, t, Side::Right)
            .into_iter()
            .map(|r| UnoStructure::assemble(s.clone(), t.clone(), None, Some(r)))
            .collect(),
        What::Unos => {
            let (ls, rs) = (unit_maps(s, t, Side::Left), unit_maps(s, t, Side::Right));
            ls.iter()
                .flat_map(|l| {
                    rs.iter().map(|r| UnoStructure::assemble(s.clone(), t.clone(), Some(l.clone()), Some(r.clone())))
                })
                .collect()
        }
        What::InverseUnos => match s.inverse_structure() {
            Ok(inv) if is_continuous(&inv.inv, t, t).unwrap_or(false) => {
                let (l, r) = canonical_units(s, &inv);
                vec![UnoStructure::assemble(s.clone(), t.clone(), Some(l), Some(r))]
            }
            _ => Vec::new(),
        },
        What::Semigroups | What::Topologies => Vec::new(),
    }
}

/// Structures of the task's kind, in stream order. Semigroup and topology
/// tasks yield bare structures with no units (the semigroup over the
/// discrete space, or the topology carrying a left-zero band).
pub fn enumerate_unostructures(task: &EnumerationTask) -> Result<Vec<UnoStructure>, SearchError> {
    if !(1..=MAX_N).contains(&task.n) {
        return Err(SearchError::BadSize { max: MAX_N });
    }
    let n = task.n;
    let out: Vec<UnoStructure> = match task.what {
        What::Semigroups => enumerate_semigroups(n)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| task.shard.keeps(*i))
            .map(|(_, s)| UnoStructure::assemble(Arc::new(s), Arc::new(FiniteTopology::discrete(n)), None, None))
            .collect(),
        What::Topologies => enumerate_topologies(n)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| task.shard.keeps(*i))
            .map(|(_, t)| UnoStructure::assemble(Arc::new(FiniteSemigroup::left_zero(n)), Arc::new(t), None, None))
            .collect(),
        what => {
            let pairs = Substrate::new(n).pairs(task.shard);
            pairs.par_iter().flat_map_iter(|p| structures_for_pair(what, p)).collect()
        }
    };
    Ok(out.into_iter().filter(|u| task.filters.iter().all(|f| f.accepts(u))).collect())
}

/// `count` distinct structures drawn uniformly from the task's stream,
/// returned in stream order.
pub fn sample_unostructures(task: &EnumerationTask, count: usize, seed: u64) -> Result<Vec<UnoStructure>, SearchError> {
    let all = enumerate_unostructures(task)?;
    let mut picks =
        rand::seq::index::sample(&mut ChaCha8Rng::seed_from_u64(seed), all.len(), count.min(all.len())).into_vec();
    picks.sort_unstable();
    let mut keep = vec![false; all.len()];
    picks.into_iter().for_each(|i| keep[i] = true);
    Ok(all.into_iter().zip(keep).filter_map(|(u, k)| k.then_some(u)).collect())
}

/// Lexicographically least serialization over all carrier permutations.
/// Labels are ignored.
pub fn canonical_key(u: &UnoStructure) -> Vec<u8> {
    let n = u.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<u8>> = None;
    let mut buf = Vec::new();
    loop {
        encode(u, &perm, &mut buf);
        if best.as_ref().is_none_or(|b| buf < *b) {
            best = Some(buf.clone());
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

/// Serializes the image of `u` under `x ↦ perm[x]`.
fn encode(u: &UnoStructure, perm: &[usize], buf: &mut Vec<u8>) {
    let n = u.len();
    let mut inv = vec![0; n];
    for (x, &p) in perm.iter().enumerate() {
        inv[p] = x;
    }
    buf.clear();
    buf.push(n as u8);
    for a in 0..n {
        for b in 0..n {
            buf.push(perm[u.sg().mul(inv[a], inv[b])] as u8);
        }
    }
    for &a in &inv {
        let mask: u64 = u.top().min_nbhd(a).iter().map(|y| 1u64 << perm[y]).sum();
        buf.extend_from_slice(&mask.to_be_bytes());
    }
    for side in Side::BOTH {
        match u.unit(side) {
            None => buf.push(0),
            Some(unit) => {
                buf.push(1);
                buf.extend((0..n).map(|a| perm[unit[inv[a]]] as u8));
            }
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Per-`n` structure counts examined by the hunt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HuntCount {
    pub n: usize,
    pub left: u64,
    pub right: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HuntOutcome {
    Witness { n: usize, side: Side, structure: Box<UnoStructure>, report: DicontinuityReport, oracle_confirms: bool },
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HuntReport {
    pub max_n: usize,
    pub budget: u64,
    pub outcome: HuntOutcome,
    pub counts: Vec<HuntCount>,
}

/// Number of continuous pairs evaluated in parallel between budget checks.
const BATCH: usize = 2048;

/// First failing unit map for a pair, and how many maps precede it.
fn first_failure_in_pair(side: Side, (t, s): &Pair) -> Result<(u64, Option<Vec<usize>>), SearchError> {
    let maps = unit_maps(s, t, side);
    for (i, unit) in maps.iter().enumerate() {
        let image: PointSet = unit.iter().collect();
        if let Some(x) = (0..s.len()).find(|&x| dicontinuity_failure(s, t, side, unit, &image, x).is_some()) {
            if dicontinuity_oracle(s, t, side, unit, x) {
                let (lam, rho) = match side {
                    Side::Left => (Some(unit.clone()), None),
                    Side::Right => (None, Some(unit.clone())),
                };
                return Err(SearchError::OracleDisagreement {
                    side,
                    point: x,
                    structure: Box::new(UnoStructure::assemble(s.clone(), t.clone(), lam, rho)),
                });
            }
            return Ok((i as u64 + 1, Some(unit.clone())));
        }
    }
    Ok((maps.len() as u64, None))
}

/// Searches one-sided structures on `1..=max_n` points, left before right
/// for each `n`, for a point where the fast criterion fails; every failure
/// is confirmed by the oracle. A one-sided witness suffices: dropping a
/// side keeps the other unit valid. `budget` bounds the number of
/// structures examined.
pub fn hunt_non_ditopological(max_n: usize, budget: u64) -> Result<HuntReport, SearchError> {
    if !(1..=MAX_N).contains(&max_n) {
        return Err(SearchError::BadSize { max: MAX_N });
    }
    let mut counts = Vec::new();
    let mut total = 0u64;
    let report = |counts: &Vec<HuntCount>, outcome| HuntReport { max_n, budget, outcome, counts: counts.clone() };
    for n in 1..=max_n {
        let pairs = Substrate::new(n).pairs(Shard::ALL);
        counts.push(HuntCount { n, left: 0, right: 0 });
        for side in Side::BOTH {
            for batch in pairs.chunks(BATCH) {
                let results: Vec<_> = batch.par_iter().map(|p| first_failure_in_pair(side, p)).collect();
                for (pair, r) in batch.iter().zip(results) {
                    let (examined, failure) = r?;
                    let c = counts.last_mut().unwrap();
                    match side {
                        Side::Left => c.left += examined,
                        Side::Right => c.right += examined,
                    }
                    total += examined;
                    if total > budget {
                        return Err(SearchError::BudgetExceeded {
                            budget,
                            partial: Box::new(report(&counts, HuntOutcome::Exhausted)),
                        });
                    }
                    if let Some(unit) = failure {
                        let (lam, rho) = match side {
                            Side::Left => (Some(unit), None),
                            Side::Right => (None, Some(unit)),
                        };
                        let u = crate::unocore::validate_uno(pair.1.clone(), pair.0.clone(), lam, rho)?;
                        let rep = is_ditopological(&u)?;
                        let oracle_confirms = rep.failures_recheck(&u) && !rep.passed();
                        return Ok(report(
                            &counts,
                            HuntOutcome::Witness { n, side, structure: Box::new(u), report: rep, oracle_confirms },
                        ));
                    }
                }
            }
        }
    }
    Ok(report(&counts, HuntOutcome::Exhausted))
}
