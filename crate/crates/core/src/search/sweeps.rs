//! Corpus-wide checks of the structural theorems. Each run builds its input
//! list deterministically, keeps the items of its shard, evaluates them in
//! parallel and aggregates in item order.

use std::collections::HashSet;

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{canonical_key, enumerate_unostructures, EnumerationTask, Filter, SearchError, Shard, What};
use crate::constructions::{
    check_invertibility_sufficient, check_rho_invertible, reduced_product, semidirect_left, semidirect_right,
    subunosemigroup, tychonoff_product, Action, ReducedProductSpec,
};
use crate::finsg::is_homomorphism;
use crate::fintop::is_continuous;
use crate::fixtures;
use crate::hm::{hm_property_trial, random_step_function, unit_axiom_trial, StepFunction, Q};
use crate::pointset::PointSet;
use crate::unocore::{
    check_duality, is_dicontinuous_oracle, is_ditopological, left_uniformizable, right_uniformizable, Side,
    UnoStructure,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TheoremId {
    #[serde(rename = "IDEMPOTENT-L")]
    IdempotentL,
    #[serde(rename = "IDEMPOTENT-R")]
    IdempotentR,
    #[serde(rename = "UNIF-L")]
    UnifL,
    #[serde(rename = "UNIF-R")]
    UnifR,
    #[serde(rename = "DISCRETE")]
    Discrete,
    #[serde(rename = "GROUPS")]
    Groups,
    #[serde(rename = "SEMILATTICES")]
    Semilattices,
    #[serde(rename = "DUALITY")]
    Duality,
    #[serde(rename = "SUB")]
    Sub,
    #[serde(rename = "PROD")]
    Prod,
    #[serde(rename = "REDPROD")]
    Redprod,
    #[serde(rename = "SDL")]
    Sdl,
    #[serde(rename = "SDR")]
    Sdr,
    #[serde(rename = "SD-SUFF")]
    SdSuff,
    #[serde(rename = "HM")]
    Hm,
}

impl TheoremId {
    pub const ALL: [TheoremId; 15] = [
        TheoremId::IdempotentL,
        TheoremId::IdempotentR,
        TheoremId::UnifL,
        TheoremId::UnifR,
        TheoremId::Discrete,
        TheoremId::Groups,
        TheoremId::Semilattices,
        TheoremId::Duality,
        TheoremId::Sub,
        TheoremId::Prod,
        TheoremId::Redprod,
        TheoremId::Sdl,
        TheoremId::Sdr,
        TheoremId::SdSuff,
        TheoremId::Hm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::IdempotentL => "IDEMPOTENT-L",
            TheoremId::IdempotentR => "IDEMPOTENT-R",
            TheoremId::UnifL => "UNIF-L",
            TheoremId::UnifR => "UNIF-R",
            TheoremId::Discrete => "DISCRETE",
            TheoremId::Groups => "GROUPS",
            TheoremId::Semilattices => "SEMILATTICES",
            TheoremId::Duality => "DUALITY",
            TheoremId::Sub => "SUB",
            TheoremId::Prod => "PROD",
            TheoremId::Redprod => "REDPROD",
            TheoremId::Sdl => "SDL",
            TheoremId::Sdr => "SDR",
            TheoremId::SdSuff => "SD-SUFF",
            TheoremId::Hm => "HM",
        }
    }

    pub fn parse(s: &str) -> Result<Self, SearchError> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| SearchError::UnknownTheoremId(s.to_string()))
    }

    /// One-line statement of the checked result.
    pub fn statement(self) -> &'static str {
        match self {
            TheoremId::IdempotentL => "idempotent left unosemigroups are ditopological",
            TheoremId::IdempotentR => "idempotent right unosemigroups are ditopological",
            TheoremId::UnifL => "a continuous left unit on a right-uniformizable semigroup is dicontinuous",
            TheoremId::UnifR => "a continuous right unit on a left-uniformizable semigroup is dicontinuous",
            TheoremId::Discrete => "discrete unosemigroups are ditopological",
            TheoremId::Groups => "topological groups are ditopological",
            TheoremId::Semilattices => "topological semilattices are ditopological",
            TheoremId::Duality => "left dicontinuity at x matches right dicontinuity at the inverse of x",
            TheoremId::Sub => "unit-closed subsemigroups of ditopological structures are ditopological",
            TheoremId::Prod => "products of ditopological structures are ditopological",
            TheoremId::Redprod => "reduced products of ditopological structures are ditopological",
            TheoremId::Sdl => "a left semidirect product is ditopological iff both factors are",
            TheoremId::Sdr => "a right semidirect product is ditopological iff both factors are",
            TheoremId::SdSuff => "the sufficient conditions imply the action is invertible on the right unit image",
            TheoremId::Hm => "the Hartman-Mycielski extension of a ditopological structure is ditopological",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepConfig {
    pub n_max: usize,
    pub shard: Shard,
    pub seed: u64,
    /// Random trials per case, used by HM only.
    pub trials: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { n_max: 3, shard: Shard::ALL, seed: 0, trials: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepException {
    /// Position of the input item in the sweep's corpus.
    pub item: usize,
    pub instance: String,
    pub detail: String,
    pub structure: Option<Box<UnoStructure>>,
    /// The oracle agrees with the failing verdict.
    pub oracle_confirms: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub id: TheoremId,
    pub statement: &'static str,
    pub n_max: usize,
    pub seed: u64,
    pub trials: u64,
    pub shards: usize,
    /// Input items in the whole corpus, before sharding.
    pub items: usize,
    pub instances: u64,
    pub exceptions: Vec<SweepException>,
    pub note: Option<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.exceptions.is_empty()
    }

    /// Combines the reports of all shards of one configuration.
    pub fn merge(mut parts: Vec<SweepReport>) -> Option<SweepReport> {
        let mut first = parts.pop()?;
        for p in parts {
            first.instances += p.instances;
            first.exceptions.extend(p.exceptions);
        }
        first.exceptions.sort_by_key(|e| e.item);
        first.shards = 1;
        Some(first)
    }
}

#[derive(Default)]
struct Tally {
    instances: u64,
    /// Instances with a non-ditopological input.
    converse: u64,
    exceptions: Vec<SweepException>,
}

impl Tally {
    fn pass() -> Self {
        Tally { instances: 1, ..Tally::default() }
    }

    fn add(&mut self, other: Tally) {
        self.instances += other.instances;
        self.converse += other.converse;
        self.exceptions.extend(other.exceptions);
    }

    fn fail(&mut self, item: usize, instance: String, detail: impl Into<String>, u: Option<&UnoStructure>) {
        self.instances += 1;
        self.exceptions.push(SweepException {
            item,
            instance,
            detail: detail.into(),
            structure: u.map(|u| Box::new(u.clone())),
            oracle_confirms: true,
        });
    }
}

/// Fast verdict, cross-checked point by point against the oracle.
fn verified(u: &UnoStructure) -> Result<bool, SearchError> {
    let rep = is_ditopological(u)?;
    for s in &rep.sides {
        for p in &s.points {
            if is_dicontinuous_oracle(u, s.side, p.point)? != p.pass {
                return Err(SearchError::OracleDisagreement {
                    side: s.side,
                    point: p.point,
                    structure: Box::new(u.clone()),
                });
            }
        }
    }
    Ok(rep.passed())
}

fn run<T: Sync>(
    items: &[T],
    shard: Shard,
    eval: impl Fn(usize, &T) -> Result<Tally, SearchError> + Sync,
) -> Result<Tally, SearchError> {
    let parts: Vec<Result<Tally, SearchError>> =
        items.par_iter().enumerate().filter(|(i, _)| shard.keeps(*i)).map(|(i, t)| eval(i, t)).collect();
    let mut total = Tally::default();
    for p in parts {
        total.add(p?);
    }
    Ok(total)
}

fn exhaustive(n_max: usize, what: What, filters: &[Filter]) -> Result<Vec<UnoStructure>, SearchError> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        out.extend(enumerate_unostructures(&EnumerationTask::new(n, what).with_filters(filters))?);
    }
    Ok(out)
}

fn dedup(us: impl IntoIterator<Item = UnoStructure>) -> Vec<UnoStructure> {
    let mut seen = HashSet::new();
    us.into_iter().filter(|u| seen.insert(canonical_key(u))).collect()
}

/// Every structure on at most `n_max` points up to isomorphism, followed by
/// the fixtures and their one-sided restrictions.
fn construction_corpus(n_max: usize) -> Result<Vec<UnoStructure>, SearchError> {
    let mut all = Vec::new();
    for what in [What::LeftUnos, What::RightUnos, What::Unos] {
        all.extend(exhaustive(n_max, what, &[])?);
    }
    for (_, u) in fixtures::all() {
        for sides in [&[Side::Left, Side::Right][..], &[Side::Left], &[Side::Right]] {
            if sides.iter().all(|s| u.unit(*s).is_some()) {
                all.push(u.restrict_sides(sides));
            }
        }
    }
    Ok(dedup(all))
}

/// Non-ditopological structures found by the hunt on at most three points,
/// with their mirror images.
pub fn known_witnesses() -> Result<Vec<UnoStructure>, SearchError> {
    Ok(match super::hunt_non_ditopological(3, u64::MAX)?.outcome {
        super::HuntOutcome::Witness { structure, .. } => vec![structure.opposite(), *structure],
        super::HuntOutcome::Exhausted => Vec::new(),
    })
}

fn one_sided(corpus: &[UnoStructure], side: Side) -> Vec<UnoStructure> {
    dedup(corpus.iter().filter(|u| u.unit(side).is_some()).map(|u| u.restrict_sides(&[side])))
}

fn describe(u: &UnoStructure) -> String {
    let sides: Vec<String> = u.sides().iter().map(|s| s.to_string()).collect();
    format!("n={} sides={}", u.len(), sides.join("+"))
}

/// Continuous endomorphisms of `u`'s semigroup.
fn endomorphisms(u: &UnoStructure) -> Vec<Vec<usize>> {
    let n = u.len();
    let mut out = Vec::new();
    let mut map = vec![0; n];
    loop {
        if is_homomorphism(&map, u.sg(), u.sg()) && is_continuous(&map, u.top(), u.top()).unwrap_or(false) {
            out.push(map.clone());
        }
        let Some(i) = (0..n).find(|&i| map[i] + 1 < n) else {
            return out;
        };
        map[i] += 1;
        map[..i].iter_mut().for_each(|v| *v = 0);
    }
}

/// Actions of `f` on `s` assembled from one endomorphism per element of `f`,
/// keeping those that pass action validation.
fn actions(s: &UnoStructure, f: &UnoStructure) -> Vec<Action> {
    let ends = endomorphisms(s);
    let (m, k) = (f.len(), ends.len());
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut choice = vec![0; m];
    loop {
        let table = choice.iter().flat_map(|&c| ends[c].iter().copied()).collect();
        let a = Action::new(m, s.len(), table);
        if crate::constructions::validate_action(s, f, &a).is_ok() {
            out.push(a);
        }
        let Some(i) = (0..m).find(|&i| choice[i] + 1 < k) else {
            return out;
        };
        choice[i] += 1;
        choice[..i].iter_mut().for_each(|v| *v = 0);
    }
}

fn all_maps(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n.pow(n as u32)).map(move |mut c| {
        (0..n)
            .map(|_| {
                let v = c % n;
                c /= n;
                v
            })
            .collect()
    })
}

/// Runs one theorem sweep.
pub fn theorem_sweep(id: TheoremId, cfg: &SweepConfig) -> Result<SweepReport, SearchError> {
    let shard = cfg.shard;
    let mut note = None;
    let (items, tally) = match id {
        TheoremId::IdempotentL | TheoremId::IdempotentR | TheoremId::Groups | TheoremId::Semilattices => {
            let (what, filter) = match id {
                TheoremId::IdempotentL => (What::LeftUnos, Filter::Idempotent),
                TheoremId::IdempotentR => (What::RightUnos, Filter::Idempotent),
                TheoremId::Groups => (What::InverseUnos, Filter::Group),
                _ => (What::InverseUnos, Filter::Semilattice),
            };
            let corpus = exhaustive(cfg.n_max, what, &[filter])?;
            let t = run(&corpus, shard, |i, u| {
                let mut t = Tally::default();
                if verified(u)? {
                    t.add(Tally::pass());
                } else {
                    t.fail(i, describe(u), "not ditopological", Some(u));
                }
                Ok(t)
            })?;
            (corpus.len(), t)
        }
        TheoremId::UnifL | TheoremId::UnifR => {
            let (what, premise): (_, fn(&UnoStructure) -> bool) = match id {
                TheoremId::UnifL => (What::LeftUnos, |u| right_uniformizable(u).is_some()),
                _ => (What::RightUnos, |u| left_uniformizable(u).is_some()),
            };
            let corpus = exhaustive(cfg.n_max, what, &[])?;
            let t = run(&corpus, shard, |i, u| {
                let mut t = Tally::default();
                let pass = verified(u)?;
                if premise(u) {
                    if pass {
                        t.add(Tally::pass());
                    } else {
                        t.fail(i, describe(u), "uniformizable but not dicontinuous", Some(u));
                    }
                }
                Ok(t)
            })?;
            (corpus.len(), t)
        }
        TheoremId::Discrete => {
            note = Some("finite Hausdorff spaces are discrete, so this also covers the compact Hausdorff case".into());
            let mut corpus = Vec::new();
            for what in [What::LeftUnos, What::RightUnos, What::Unos] {
                corpus.extend(exhaustive(cfg.n_max, what, &[Filter::Discrete])?);
            }
            let t = run(&corpus, shard, |i, u| {
                let mut t = Tally::default();
                if verified(u)? {
                    t.add(Tally::pass());
                } else {
                    t.fail(i, describe(u), "not ditopological", Some(u));
                }
                Ok(t)
            })?;
            (corpus.len(), t)
        }
        TheoremId::Duality => {
            let corpus = exhaustive(cfg.n_max, What::InverseUnos, &[])?;
            let t = run(&corpus, shard, |i, u| {
                let mut t = Tally::default();
                verified(u)?;
                match (0..u.len()).find(|&x| !check_duality(u, x).unwrap_or(false)) {
                    None => t.add(Tally::pass()),
                    Some(x) => t.fail(i, describe(u), format!("duality fails at point {x}"), Some(u)),
                }
                Ok(t)
            })?;
            (corpus.len(), t)
        }
        TheoremId::Sub => {
            let corpus = construction_corpus(cfg.n_max)?;
            let t = run(&corpus, shard, |i, u| {
                let mut t = Tally::default();
                if !verified(u)? {
                    return Ok(t);
                }
                for mask in 1u64..1 << u.len() {
                    let a = PointSet::from_mask(mask);
                    if let Ok(sub) = subunosemigroup(u, &a) {
                        if verified(&sub)? {
                            t.add(Tally::pass());
                        } else {
                            t.fail(i, format!("{} A={a:?}", describe(u)), "subunosemigroup fails", Some(&sub));
                        }
                    }
                }
                Ok(t)
            })?;
            (corpus.len(), t)
        }
        TheoremId::Prod | TheoremId::Redprod => {
            let corpus = construction_corpus(cfg.n_max)?;
            let good: Vec<bool> = corpus.par_iter().map(verified).collect::<Result<_, _>>()?;
            let pairs: Vec<(usize, usize)> = (0..corpus.len())
                .flat_map(|a| (0..corpus.len()).map(move |b| (a, b)))
                .filter(|&(a, b)| good[a] && good[b] && corpus[a].sides() == corpus[b].sides())
                .filter(|&(a, b)| corpus[a].len() * corpus[b].len() <= 6 || id == TheoremId::Redprod)
                .collect();
            let t = run(&pairs, shard, |i, &(a, b)| {
                let (x, y) = (&corpus[a], &corpus[b]);
                let mut t = Tally::default();
                let label = |extra: &str| format!("X#{a} ({}) Y#{b} ({}){extra}", describe(x), describe(y));
                if id == TheoremId::Prod {
                    let p = tychonoff_product(&[x.clone(), y.clone()]).expect("same sides");
                    if verified(&p)? {
                        t.add(Tally::pass());
                    } else {
                        t.fail(i, label(""), "product fails", Some(&p));
                    }
                    return Ok(t);
                }
                for mask in 0u64..1 << x.len() {
                    let ideal = PointSet::from_mask(mask);
                    let size = ideal.len() + (x.len() - ideal.len()) * y.len();
                    if size > 6 {
                        continue;
                    }
                    let spec = ReducedProductSpec { x: x.clone(), y: y.clone(), ideal: ideal.clone() };
                    if spec.check().is_err() {
                        continue;
                    }
                    let r = reduced_product(&spec).expect("checked spec");
                    if verified(&r.structure)? {
                        t.add(Tally::pass());
                    } else {
                        t.fail(i, label(&format!(" I={ideal:?}")), "reduced product fails", Some(&r.structure));
                    }
                }
                Ok(t)
            })?;
            (pairs.len(), t)
        }
        TheoremId::Sdl | TheoremId::Sdr | TheoremId::SdSuff => {
            let side = if id == TheoremId::Sdl { Side::Left } else { Side::Right };
            let mut base = construction_corpus(cfg.n_max)?;
            base.extend(known_witnesses()?);
            let corpus = one_sided(&base, side);
            let good: Vec<bool> = corpus.par_iter().map(verified).collect::<Result<_, _>>()?;
            let pairs: Vec<(usize, usize)> = (0..corpus.len())
                .flat_map(|a| (0..corpus.len()).map(move |b| (a, b)))
                .filter(|&(a, b)| corpus[a].len() * corpus[b].len() <= 6)
                .collect();
            let t = run(&pairs, shard, |i, &(a, b)| {
                let (s, f) = (&corpus[a], &corpus[b]);
                let factors_ok = good[a] && good[b];
                let mut t = Tally::default();
                for (k, alpha) in actions(s, f).iter().enumerate() {
                    let label = || format!("S#{a} ({}) F#{b} ({}) action#{k}", describe(s), describe(f));
                    match id {
                        TheoremId::Sdl | TheoremId::Sdr => {
                            let product = if id == TheoremId::Sdl {
                                semidirect_left(s, f, alpha).ok()
                            } else {
                                check_rho_invertible(s, f, alpha)
                                    .ok()
                                    .and_then(|data| semidirect_right(s, f, alpha, &data).ok())
                            };
                            let Some(p) = product else { continue };
                            t.converse += u64::from(!factors_ok);
                            if verified(&p)? == factors_ok {
                                t.add(Tally::pass());
                            } else {
                                t.fail(
                                    i,
                                    label(),
                                    format!("factors ditopological: {factors_ok}; product disagrees"),
                                    Some(&p),
                                );
                            }
                        }
                        _ => {
                            for inv in all_maps(f.len()) {
                                if !check_invertibility_sufficient(s, f, alpha, &inv) {
                                    continue;
                                }
                                match check_rho_invertible(s, f, alpha) {
                                    Ok(data) => {
                                        let p = semidirect_right(s, f, alpha, &data).expect("invertible action");
                                        verified(&p)?;
                                        t.add(Tally::pass());
                                    }
                                    Err(e) => t.fail(i, format!("{} inv={inv:?}", label()), e.to_string(), None),
                                }
                            }
                        }
                    }
                }
                Ok(t)
            })?;
            if id != TheoremId::SdSuff {
                note = Some(format!("{} instance(s) have a non-ditopological factor", t.converse));
            }
            (pairs.len(), t)
        }
        TheoremId::Hm => {
            let cases = hm_cases(cfg.seed);
            let t = run(&cases, shard, |i, case| {
                let mut t = Tally::default();
                let base = &case.base;
                let label = format!("{} {} side {}", case.name, case.side, case.what());
                if !verified(base)? {
                    t.fail(i, label, "base not ditopological", Some(base));
                    return Ok(t);
                }
                let seed = cfg.seed.wrapping_add(i as u64);
                match &case.kind {
                    HmKind::UnitAxiom => {
                        let bad = unit_axiom_trial(base, case.side, cfg.trials, seed).expect("unit present");
                        if bad == 0 {
                            t.add(Tally::pass());
                        } else {
                            t.fail(i, label, format!("{bad} unit axiom failures"), None);
                        }
                    }
                    HmKind::Property { f, a, b, eps } => {
                        let r = hm_property_trial(base, case.side, f, *a, *b, *eps, cfg.trials, seed)
                            .expect("valid witness inputs");
                        if r.violations == 0 {
                            t.add(Tally::pass());
                        } else {
                            t.fail(i, label, format!("{} violations in {} trials", r.violations, r.trials), None);
                        }
                    }
                }
                Ok(t)
            })?;
            (cases.len(), t)
        }
    };
    Ok(SweepReport {
        id,
        statement: id.statement(),
        n_max: cfg.n_max,
        seed: cfg.seed,
        trials: cfg.trials,
        shards: shard.count,
        items,
        instances: tally.instances,
        exceptions: tally.exceptions,
        note,
    })
}

enum HmKind {
    UnitAxiom,
    Property { f: StepFunction, a: Q, b: Q, eps: Q },
}

struct HmCase {
    name: &'static str,
    base: UnoStructure,
    side: Side,
    kind: HmKind,
}

impl HmCase {
    fn what(&self) -> String {
        match &self.kind {
            HmKind::UnitAxiom => "unit axiom".into(),
            HmKind::Property { f, a, b, eps } => format!("f with {} pieces on [{a},{b}] eps {eps}", f.pieces()),
        }
    }
}

/// The three fixture bases of the HM checks.
pub fn hm_bases() -> Vec<(&'static str, UnoStructure)> {
    vec![
        ("discrete_z2", fixtures::discrete_z2()),
        ("sierp_2", fixtures::sierp_2()),
        ("zeroext_z2", fixtures::zeroext_z2()),
    ]
}

/// Per base and side: the unit axiom, every constant function on `[0,1]`,
/// and one seeded random function on its first piece.
fn hm_cases(seed: u64) -> Vec<HmCase> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, base) in hm_bases() {
        let n = base.len();
        let all: Vec<usize> = (0..n).collect();
        for side in base.sides() {
            out.push(HmCase { name, base: base.clone(), side, kind: HmKind::UnitAxiom });
            for x in 0..n {
                let kind = HmKind::Property {
                    f: StepFunction::constant(x, n),
                    a: Ratio::from_integer(0),
                    b: Ratio::from_integer(1),
                    eps: Ratio::new(3, 10),
                };
                out.push(HmCase { name, base: base.clone(), side, kind });
            }
            let f = random_step_function(&mut rng, n, &all);
            let (a, b, _) = f.iter_pieces().next().expect("at least one piece");
            let kind = HmKind::Property { f, a, b, eps: Ratio::new(1, 3) };
            out.push(HmCase { name, base: base.clone(), side, kind });
        }
    }
    out
}
