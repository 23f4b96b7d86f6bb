//! Finite semigroups given by Cayley tables.

use num_integer::Roots;
use serde::Serialize;
use thiserror::Error;

use crate::fintop::FiniteTopology;
use crate::pointset::PointSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("empty carrier")]
    EmptyCarrier,
    #[error("table is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("table entry at ({a}, {b}) is {value}, outside 0..{n}")]
    OutOfRange { a: usize, b: usize, value: usize, n: usize },
    #[error("{labels} labels for {n} elements")]
    LabelMismatch { labels: usize, n: usize },
    #[error("not associative: ({a}·{b})·{c} != {a}·({b}·{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("not an inverse semigroup: element {x} has inverse candidates {candidates:?}")]
    NotInverse { x: usize, candidates: Vec<usize> },
}

/// Cayley table with display labels. `mul(a, b)` is `a·b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FiniteSemigroup {
    labels: Vec<String>,
    n: usize,
    table: Vec<usize>,
}

/// Unique inverses of an inverse semigroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InverseStructure {
    pub inv: Vec<usize>,
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn first_associativity_failure(n: usize, table: &[usize]) -> Option<(usize, usize, usize)> {
    for a in 0..n {
        for b in 0..n {
            let ab = table[a * n + b];
            for c in 0..n {
                if table[ab * n + c] != table[a * n + table[b * n + c]] {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// Checks shape, range and associativity over all `n³` triples. The witness of
/// a failure is the lexicographically first bad triple.
pub fn validate_semigroup(
    table: &[Vec<usize>],
    labels: Option<Vec<String>>,
) -> Result<FiniteSemigroup, SemigroupError> {
    let n = table.len();
    if n == 0 {
        return Err(SemigroupError::EmptyCarrier);
    }
    let mut flat = Vec::with_capacity(n * n);
    for (a, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(SemigroupError::NotSquare { row: a, len: row.len(), n });
        }
        for (b, &value) in row.iter().enumerate() {
            if value >= n {
                return Err(SemigroupError::OutOfRange { a, b, value, n });
            }
            flat.push(value);
        }
    }
    FiniteSemigroup::from_flat(flat, labels)
}

impl FiniteSemigroup {
    /// Flat row-major table; validated like [`validate_semigroup`].
    pub fn from_flat(table: Vec<usize>, labels: Option<Vec<String>>) -> Result<Self, SemigroupError> {
        let n = table.len().sqrt();
        if n == 0 {
            return Err(SemigroupError::EmptyCarrier);
        }
        if n * n != table.len() {
            return Err(SemigroupError::NotSquare { row: 0, len: table.len(), n });
        }
        if let Some((i, &value)) = table.iter().enumerate().find(|(_, &v)| v >= n) {
            return Err(SemigroupError::OutOfRange { a: i / n, b: i % n, value, n });
        }
        let labels = labels.unwrap_or_else(|| default_labels(n));
        if labels.len() != n {
            return Err(SemigroupError::LabelMismatch { labels: labels.len(), n });
        }
        if let Some((a, b, c)) = first_associativity_failure(n, &table) {
            return Err(SemigroupError::NotAssociative { a, b, c });
        }
        Ok(Self { labels, n, table })
    }

    /// For tables already known to be associative (enumerator output,
    /// constructions that re-verify afterwards).
    pub(crate) fn from_flat_unchecked(table: Vec<usize>, labels: Vec<String>) -> Self {
        let n = labels.len();
        debug_assert_eq!(n * n, table.len());
        Self { labels, n, table }
    }

    /// `{0, .., n-1}` under `min`.
    pub fn min_chain(n: usize) -> Self {
        let table = (0..n * n).map(|i| (i / n).min(i % n)).collect();
        Self::from_flat_unchecked(table, default_labels(n))
    }

    /// Cyclic group `Z_n` under addition mod `n`; identity is `0`.
    pub fn cyclic_group(n: usize) -> Self {
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        Self::from_flat_unchecked(table, default_labels(n))
    }

    /// `a·b = a`.
    pub fn left_zero(n: usize) -> Self {
        let table = (0..n * n).map(|i| i / n).collect();
        Self::from_flat_unchecked(table, default_labels(n))
    }

    /// `a·b = b`.
    pub fn right_zero(n: usize) -> Self {
        let table = (0..n * n).map(|i| i % n).collect();
        Self::from_flat_unchecked(table, default_labels(n))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, SemigroupError> {
        if labels.len() != self.n {
            return Err(SemigroupError::LabelMismatch { labels: labels.len(), n: self.n });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    pub fn flat_table(&self) -> &[usize] {
        &self.table
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn carrier(&self) -> PointSet {
        PointSet::full(self.n)
    }

    /// `a⋋b = {x : a·x = b}`.
    pub fn left_division(&self, a: usize, b: usize) -> PointSet {
        (0..self.n).filter(|&x| self.mul(a, x) == b).collect()
    }

    /// `b⋌a = {x : x·a = b}`.
    pub fn right_division(&self, b: usize, a: usize) -> PointSet {
        (0..self.n).filter(|&x| self.mul(x, a) == b).collect()
    }

    /// `A⋋B`, the union of `a⋋b` over `A × B`.
    pub fn set_left_division(&self, a: &PointSet, b: &PointSet) -> PointSet {
        (0..self.n).filter(|&x| a.iter().any(|ai| b.contains(self.mul(ai, x)))).collect()
    }

    /// `B⋌A`, the union of `b⋌a` over `A × B`.
    pub fn set_right_division(&self, b: &PointSet, a: &PointSet) -> PointSet {
        (0..self.n).filter(|&x| a.iter().any(|ai| b.contains(self.mul(x, ai)))).collect()
    }

    /// `A·B`.
    pub fn set_product(&self, a: &PointSet, b: &PointSet) -> PointSet {
        let mut out = PointSet::new();
        for x in a.iter() {
            for y in b.iter() {
                out.insert(self.mul(x, y));
            }
        }
        out
    }

    pub fn idempotents(&self) -> PointSet {
        (0..self.n).filter(|&x| self.mul(x, x) == x).collect()
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_band(&self) -> bool {
        self.idempotents().len() == self.n
    }

    pub fn is_semilattice(&self) -> bool {
        self.is_band() && self.is_commutative()
    }

    /// Two-sided identity, if any.
    pub fn identity(&self) -> Option<usize> {
        (0..self.n).find(|&e| (0..self.n).all(|x| self.mul(e, x) == x && self.mul(x, e) == x))
    }

    /// A finite monoid in which every element has a two-sided inverse.
    pub fn is_group(&self) -> bool {
        match self.identity() {
            Some(e) => (0..self.n).all(|x| (0..self.n).any(|y| self.mul(x, y) == e)),
            None => false,
        }
    }

    pub fn inverse_structure(&self) -> Result<InverseStructure, SemigroupError> {
        let mut inv = Vec::with_capacity(self.n);
        for x in 0..self.n {
            let candidates: Vec<usize> =
                (0..self.n).filter(|&y| self.mul(self.mul(x, y), x) == x && self.mul(self.mul(y, x), y) == y).collect();
            if candidates.len() != 1 {
                return Err(SemigroupError::NotInverse { x, candidates });
            }
            inv.push(candidates[0]);
        }
        Ok(InverseStructure { inv })
    }

    pub fn is_two_sided_ideal(&self, ideal: &PointSet) -> bool {
        ideal.iter().all(|i| (0..self.n).all(|s| ideal.contains(self.mul(s, i)) && ideal.contains(self.mul(i, s))))
    }

    pub fn is_subsemigroup(&self, a: &PointSet) -> bool {
        !a.is_empty() && self.set_product(a, a).is_subset(a)
    }

    /// Restriction to a subsemigroup, re-indexed densely; labels carried over.
    pub fn restrict(&self, a: &PointSet) -> Option<FiniteSemigroup> {
        if !self.is_subsemigroup(a) {
            return None;
        }
        let points = a.to_vec();
        let k = points.len();
        let mut table = Vec::with_capacity(k * k);
        for &x in &points {
            for &y in &points {
                table.push(points.binary_search(&self.mul(x, y)).ok()?);
            }
        }
        let labels = points.iter().map(|&p| self.labels[p].clone()).collect();
        Some(Self::from_flat_unchecked(table, labels))
    }

    /// Direct product; `(x, y)` is encoded as `x * other.len() + y` and
    /// labelled `"x|y"`.
    pub fn product(&self, other: &FiniteSemigroup) -> FiniteSemigroup {
        let m = other.n;
        let k = self.n * m;
        let mut table = Vec::with_capacity(k * k);
        for p in 0..k {
            for q in 0..k {
                table.push(self.mul(p / m, q / m) * m + other.mul(p % m, q % m));
            }
        }
        let labels = (0..k).map(|p| format!("{}|{}", self.labels[p / m], other.labels[p % m])).collect();
        Self::from_flat_unchecked(table, labels)
    }
}

impl InverseStructure {
    pub fn inv(&self, x: usize) -> usize {
        self.inv[x]
    }
}

/// True iff the complement of `set` is open.
pub fn is_closed_set(top: &FiniteTopology, set: &PointSet) -> bool {
    top.is_closed(set)
}

/// `h(ab) = h(a)h(b)` for all pairs.
pub fn is_homomorphism(h: &[usize], from: &FiniteSemigroup, to: &FiniteSemigroup) -> bool {
    h.len() == from.len()
        && h.iter().all(|&y| y < to.len())
        && (0..from.len()).all(|a| (0..from.len()).all(|b| h[from.mul(a, b)] == to.mul(h[a], h[b])))
}
