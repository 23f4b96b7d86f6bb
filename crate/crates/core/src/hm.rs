//! Step functions `[0,1) → X` over a finite base and the sub-basic
//! neighborhoods `N(a, b, V, ε)` of the Hartman–Mycielski extension.
//!
//! All arithmetic is exact. Breakpoints of sampled functions have
//! denominators at most 64, so every length that occurs has a denominator
//! dividing `lcm(1..=64)·3·q` for the neighborhood parameters, well inside
//! `i128`.

use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::finsg::FiniteSemigroup;
use crate::fintop::FiniteTopology;
use crate::pointset::PointSet;
use crate::unocore::{dicontinuity_failure, side_report, Side, UnoStructure};

pub type Q = Ratio<i128>;

/// Trials per deterministic random stream.
const CHUNK: u64 = 4096;
const MAX_PIECES: usize = 8;
const MAX_DENOMINATOR: i128 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HmError {
    #[error("breakpoints must run strictly from 0 to 1 with one value per piece")]
    BadPartition,
    #[error("value outside the base carrier")]
    ValueOutOfRange,
    #[error("functions over different bases")]
    BaseMismatch,
    #[error("need 0 <= a < b <= 1, eps > 0 and an open V")]
    BadNeighborhood,
    #[error("function is not constant on [a, b)")]
    FNotConstantOnInterval,
    #[error("base structure is not ditopological on the {0} side")]
    BaseNotDitopological(Side),
    #[error("base structure has no {0} unit operation")]
    MissingUnit(Side),
}

fn ser_q<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(q)
}

fn ser_qs<S: Serializer>(qs: &[Q], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(qs.iter().map(|q| q.to_string()))
}

/// A function constant on each `[a_i, a_{i+1})`, in normal form: adjacent
/// pieces carry different values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StepFunction {
    #[serde(serialize_with = "ser_qs")]
    breakpoints: Vec<Q>,
    values: Vec<usize>,
    base: usize,
}

/// Serialized form with rationals as `"p/q"` strings.
#[derive(Debug, Clone, Deserialize)]
pub struct StepFunctionFile {
    pub breakpoints: Vec<String>,
    pub values: Vec<usize>,
}

pub fn parse_rational(s: &str) -> Option<Q> {
    s.trim().parse().ok()
}

/// Merges adjacent equal values. `base` is the size of the base carrier.
pub fn hm_normalize(breakpoints: Vec<Q>, values: Vec<usize>, base: usize) -> Result<StepFunction, HmError> {
    let ok = !values.is_empty()
        && breakpoints.len() == values.len() + 1
        && breakpoints[0].is_zero()
        && breakpoints.last().is_some_and(|b| b.is_one())
        && breakpoints.windows(2).all(|w| w[0] < w[1]);
    if !ok {
        return Err(HmError::BadPartition);
    }
    if values.iter().any(|&v| v >= base) {
        return Err(HmError::ValueOutOfRange);
    }
    let mut bp = vec![breakpoints[0]];
    let mut vals: Vec<usize> = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        if vals.last() == Some(&v) {
            *bp.last_mut().unwrap() = breakpoints[i + 1];
        } else {
            vals.push(v);
            bp.push(breakpoints[i + 1]);
        }
    }
    Ok(StepFunction { breakpoints: bp, values: vals, base })
}

impl StepFunction {
    pub fn constant(x: usize, base: usize) -> Self {
        assert!(x < base);
        Self { breakpoints: vec![Q::zero(), Q::one()], values: vec![x], base }
    }

    pub fn from_file(file: &StepFunctionFile, base: usize) -> Result<Self, HmError> {
        let bp = file
            .breakpoints
            .iter()
            .map(|s| parse_rational(s).ok_or(HmError::BadPartition))
            .collect::<Result<Vec<_>, _>>()?;
        hm_normalize(bp, file.values.clone(), base)
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn pieces(&self) -> usize {
        self.values.len()
    }

    /// `(start, end, value)` triples.
    pub fn iter_pieces(&self) -> impl Iterator<Item = (Q, Q, usize)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.breakpoints[i], self.breakpoints[i + 1], v))
    }

    /// Value at `t ∈ [0, 1)`.
    pub fn at(&self, t: Q) -> usize {
        let i = self.breakpoints.partition_point(|b| *b <= t) - 1;
        self.values[i.min(self.values.len() - 1)]
    }

    pub fn is_constant_on(&self, a: Q, b: Q) -> bool {
        let v = self.at(a);
        self.iter_pieces().all(|(s, e, x)| x == v || e <= a || s >= b)
    }

    /// Image set.
    pub fn value_set(&self) -> PointSet {
        self.values.iter().collect()
    }

    /// Pointwise combination on the common refinement.
    fn zip_with(&self, other: &StepFunction, op: impl Fn(usize, usize) -> usize) -> StepFunction {
        let mut bp: Vec<Q> = self.breakpoints.iter().chain(other.breakpoints.iter()).copied().collect();
        bp.sort();
        bp.dedup();
        let values = bp.windows(2).map(|w| op(self.at(w[0]), other.at(w[0]))).collect();
        hm_normalize(bp, values, self.base).expect("refinement of valid partitions")
    }

    fn map(&self, op: impl Fn(usize) -> usize) -> StepFunction {
        let values = self.values.iter().map(|&v| op(v)).collect();
        hm_normalize(self.breakpoints.clone(), values, self.base).expect("same partition")
    }
}

/// Pointwise product.
pub fn hm_mul(base: &FiniteSemigroup, f: &StepFunction, g: &StepFunction) -> Result<StepFunction, HmError> {
    if f.base != base.len() || g.base != base.len() {
        return Err(HmError::BaseMismatch);
    }
    Ok(f.zip_with(g, |x, y| base.mul(x, y)))
}

/// `u ∘ f`.
pub fn hm_apply_unit(unit: &[usize], f: &StepFunction) -> StepFunction {
    f.map(|x| unit[x])
}

/// Length of `{t ∈ [a, b) : f(t) ∉ V}`.
pub fn violation_measure(f: &StepFunction, a: Q, b: Q, v: &PointSet) -> Q {
    f.iter_pieces()
        .filter(|&(_, _, x)| !v.contains(x))
        .map(|(s, e, _)| {
            let (lo, hi) = (s.max(a), e.min(b));
            if lo < hi {
                hi - lo
            } else {
                Q::zero()
            }
        })
        .sum()
}

/// `N(a, b, V, ε)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubbasicNbhd {
    #[serde(serialize_with = "ser_q")]
    pub a: Q,
    #[serde(serialize_with = "ser_q")]
    pub b: Q,
    pub v: PointSet,
    #[serde(serialize_with = "ser_q")]
    pub eps: Q,
}

impl SubbasicNbhd {
    /// `v` must be open in `top`.
    pub fn new(top: &FiniteTopology, a: Q, b: Q, v: PointSet, eps: Q) -> Result<Self, HmError> {
        if !(Q::zero() <= a && a < b && b <= Q::one()) || eps <= Q::zero() || !top.is_open(&v) {
            return Err(HmError::BadNeighborhood);
        }
        Ok(Self { a, b, v, eps })
    }
}

pub fn in_nbhd(f: &StepFunction, n: &SubbasicNbhd) -> bool {
    violation_measure(f, n.a, n.b, &n.v) < n.eps
}

/// `f ∈ u(HM(X))` iff every value of `f` lies in `u(X)`: lift each value
/// through the unit and compose.
pub fn in_unit_image(unit: &[usize], f: &StepFunction) -> bool {
    let image: PointSet = unit.iter().collect();
    f.value_set().is_subset(&image)
}

/// Some `g` with `u ∘ g = f`, or `None` when `f` leaves `u(X)`.
pub fn lift_through_unit(unit: &[usize], f: &StepFunction) -> Option<StepFunction> {
    let mut pre = vec![None; f.base];
    for (x, &ux) in unit.iter().enumerate() {
        pre[ux].get_or_insert(x);
    }
    if f.values.iter().any(|&v| pre[v].is_none()) {
        return None;
    }
    Some(f.map(|v| pre[v].unwrap()))
}

/// The two neighborhoods from the preservation argument: `U_f` around `f`
/// and `W` around `u(f)` inside `u(HM(X))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HmWitness {
    pub side: Side,
    pub x: usize,
    pub u_min: PointSet,
    pub w_min: PointSet,
    pub u_f: SubbasicNbhd,
    /// Lies in the unit image as well; `w.v` is open in the subspace `u(X)`.
    pub w: SubbasicNbhd,
    /// The target `N(a, b, U_min, ε)`.
    pub target: SubbasicNbhd,
}

pub fn hm_witness(base: &UnoStructure, side: Side, f: &StepFunction, a: Q, b: Q, eps: Q) -> Result<HmWitness, HmError> {
    let unit = base.unit(side).ok_or(HmError::MissingUnit(side))?;
    if f.base != base.len() {
        return Err(HmError::BaseMismatch);
    }
    let target = SubbasicNbhd::new(base.top(), a, b, base.top().min_nbhd(f.at(a)).clone(), eps)?;
    if !f.is_constant_on(a, b) {
        return Err(HmError::FNotConstantOnInterval);
    }
    let report = side_report(base, side).map_err(|_| HmError::MissingUnit(side))?;
    if !report.passed() {
        return Err(HmError::BaseNotDitopological(side));
    }
    let x = f.at(a);
    let image: PointSet = unit.iter().collect();
    debug_assert!(dicontinuity_failure(base.sg(), base.top(), side, unit, &image, x).is_none());
    let u_min = base.top().min_nbhd(x).clone();
    let w_min = base.top().min_nbhd(unit[x]) & &image;
    let third = eps / Q::from_integer(3);
    Ok(HmWitness {
        side,
        x,
        u_f: SubbasicNbhd { a, b, v: u_min.clone(), eps: third },
        w: SubbasicNbhd { a, b, v: w_min.clone(), eps: third },
        target,
        u_min,
        w_min,
    })
}

/// Random rational in `(0, 1)` with denominator at most 64.
fn random_breakpoint(rng: &mut impl Rng) -> Q {
    let d: i128 = rng.gen_range(2..=MAX_DENOMINATOR);
    Q::new(rng.gen_range(1..d), d)
}

/// Piece count geometric with parameter 1/2 capped at 8; distinct
/// breakpoints; values uniform over `values`.
pub fn random_step_function(rng: &mut impl Rng, base: usize, values: &[usize]) -> StepFunction {
    let mut pieces = 1;
    while pieces < MAX_PIECES && rng.gen_bool(0.5) {
        pieces += 1;
    }
    let mut cuts: Vec<Q> = Vec::with_capacity(pieces + 1);
    while cuts.len() < pieces - 1 {
        let c = random_breakpoint(rng);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.push(Q::zero());
    cuts.push(Q::one());
    cuts.sort();
    let vals = (0..pieces).map(|_| values[rng.gen_range(0..values.len())]).collect();
    hm_normalize(cuts, vals, base).expect("valid partition")
}

/// Deterministic stream for chunk `i` of a seeded run.
fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn run_chunked<T: Send + Default>(
    trials: u64,
    seed: u64,
    per_trial: impl Fn(&mut ChaCha8Rng, &mut T) + Sync,
    merge: impl Fn(T, T) -> T + Sync + Send,
) -> T {
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let mut acc = T::default();
            for _ in 0..CHUNK.min(trials - c * CHUNK) {
                per_trial(&mut rng, &mut acc);
            }
            acc
        })
        .reduce(T::default, merge)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TrialReport {
    pub trials: u64,
    /// Pairs `(w, g)` satisfying all three premises.
    pub premises_met: u64,
    pub violations: u64,
}

impl TrialReport {
    fn merge(self, o: TrialReport) -> TrialReport {
        TrialReport {
            trials: self.trials + o.trials,
            premises_met: self.premises_met + o.premises_met,
            violations: self.violations + o.violations,
        }
    }
}

/// Samples pairs `(w, g)` with `w` valued in `u(X)`; whenever `w ∈ W`,
/// `w·g ∈ U_f` (left; `g·w` on the right) and `u(g) ∈ W`, checks
/// `g ∈ N(a, b, U_min, ε)`. Deterministic in `seed` regardless of the
/// worker count.
#[allow(clippy::too_many_arguments)]
pub fn hm_property_trial(
    base: &UnoStructure,
    side: Side,
    f: &StepFunction,
    a: Q,
    b: Q,
    eps: Q,
    trials: u64,
    seed: u64,
) -> Result<TrialReport, HmError> {
    let wit = hm_witness(base, side, f, a, b, eps)?;
    let unit = base.unit(side).expect("checked by hm_witness");
    let image: Vec<usize> = unit.iter().collect::<PointSet>().to_vec();
    let all: Vec<usize> = (0..base.len()).collect();
    let sg = base.sg();
    let n = base.len();
    Ok(run_chunked(
        trials,
        seed,
        |rng, acc: &mut TrialReport| {
            acc.trials += 1;
            let w = random_step_function(rng, n, &image);
            let g = random_step_function(rng, n, &all);
            let prod = match side {
                Side::Left => hm_mul(sg, &w, &g),
                Side::Right => hm_mul(sg, &g, &w),
            }
            .expect("same base");
            let ug = hm_apply_unit(unit, &g);
            if in_nbhd(&w, &wit.w) && in_nbhd(&prod, &wit.u_f) && in_unit_image(unit, &ug) && in_nbhd(&ug, &wit.w) {
                acc.premises_met += 1;
                if !in_nbhd(&g, &wit.target) {
                    acc.violations += 1;
                }
            }
        },
        TrialReport::merge,
    ))
}

/// Counts random `f` with `u(f)·f ≠ f` (left) or `f·u(f) ≠ f` (right).
pub fn unit_axiom_trial(base: &UnoStructure, side: Side, trials: u64, seed: u64) -> Result<u64, HmError> {
    let unit = base.unit(side).ok_or(HmError::MissingUnit(side))?;
    let all: Vec<usize> = (0..base.len()).collect();
    let sg = base.sg();
    Ok(run_chunked(
        trials,
        seed,
        |rng, acc: &mut u64| {
            let f = random_step_function(rng, base.len(), &all);
            let uf = hm_apply_unit(unit, &f);
            let p = match side {
                Side::Left => hm_mul(sg, &uf, &f),
                Side::Right => hm_mul(sg, &f, &uf),
            }
            .expect("same base");
            if p != f {
                *acc += 1;
            }
        },
        |a, b| a + b,
    ))
}

/// Counts sampled triples with `(fg)h ≠ f(gh)`.
pub fn associativity_trial(base: &FiniteSemigroup, trials: u64, seed: u64) -> u64 {
    let all: Vec<usize> = (0..base.len()).collect();
    run_chunked(
        trials,
        seed,
        |rng, acc: &mut u64| {
            let f = random_step_function(rng, base.len(), &all);
            let g = random_step_function(rng, base.len(), &all);
            let h = random_step_function(rng, base.len(), &all);
            let l = hm_mul(base, &hm_mul(base, &f, &g).unwrap(), &h).unwrap();
            let r = hm_mul(base, &f, &hm_mul(base, &g, &h).unwrap()).unwrap();
            if l != r {
                *acc += 1;
            }
        },
        |a, b| a + b,
    )
}
