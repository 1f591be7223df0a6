//! Ground sets, element sets and value oracles for non-negative submodular
//! functions.
//!
//! Every oracle counts the evaluation requests it serves and memoizes values
//! by canonical set encoding. Two counters are kept: `requests` counts every
//! call to [`SubmodularOracle::evaluate`], `distinct` counts cache misses,
//! i.e. the number of different sets the oracle actually had to compute.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multilinear;

/// Largest ground set an [`ElementSet`] can address.
pub const MAX_ELEMENTS: usize = 64;
/// Largest ground set accepted by the explicit table builder.
pub const TABLE_CAP: usize = 20;
/// Largest ground set accepted by [`validate_submodular`].
pub const VALIDATE_CAP: usize = 16;
/// Up to this size the validator checks every pair `(S, T)` directly.
pub const PAIR_CHECK_CAP: usize = 12;

const VALUE_TOL: f64 = 1e-9;

/// The ground set `{0, .., n-1}` with optional display labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_ELEMENTS {
            return Err(Error::BadGroundSize {
                got: n,
                max: MAX_ELEMENTS,
            });
        }
        Ok(Self { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut g = Self::new(labels.len())?;
        g.labels = Some(labels);
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn full(&self) -> ElementSet {
        ElementSet::full(self.n)
    }

    pub fn label(&self, e: usize) -> String {
        match &self.labels {
            Some(l) => l[e].clone(),
            None => e.to_string(),
        }
    }
}

/// A subset of a ground set of at most [`MAX_ELEMENTS`] elements, stored as a
/// bit mask. Equal sets are bit-equal.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct ElementSet(u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ElementSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(e: usize) -> Self {
        ElementSet(1u64 << e)
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        ids.into_iter().fold(ElementSet::EMPTY, |s, e| s.with(e))
    }

    pub fn contains(self, e: usize) -> bool {
        e < 64 && self.0 >> e & 1 == 1
    }

    pub fn insert(&mut self, e: usize) {
        self.0 |= 1u64 << e;
    }

    pub fn remove(&mut self, e: usize) {
        self.0 &= !(1u64 << e);
    }

    #[must_use]
    pub fn with(self, e: usize) -> Self {
        ElementSet(self.0 | 1u64 << e)
    }

    #[must_use]
    pub fn without(self, e: usize) -> Self {
        ElementSet(self.0 & !(1u64 << e))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[must_use]
    pub fn union(self, other: Self) -> Self {
        ElementSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersection(self, other: Self) -> Self {
        ElementSet(self.0 & other.0)
    }

    #[must_use]
    pub fn difference(self, other: Self) -> Self {
        ElementSet(self.0 & !other.0)
    }

    #[must_use]
    pub fn complement(self, n: usize) -> Self {
        ElementSet(!self.0 & ElementSet::full(n).0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Largest element id plus one, or 0 for the empty set.
    pub fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Lexicographic order on the sorted element lists (`{} < {0} < {0,1} < {1}`).
    pub fn lex_cmp(self, other: Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl From<ElementSet> for Vec<usize> {
    fn from(s: ElementSet) -> Self {
        s.to_vec()
    }
}

impl TryFrom<Vec<usize>> for ElementSet {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        let mut s = ElementSet::EMPTY;
        for e in v {
            if e >= MAX_ELEMENTS {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    n: MAX_ELEMENTS,
                });
            }
            s.insert(e);
        }
        Ok(s)
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ElementSet::from_ids(iter)
    }
}

/// Ascending iterator over the members of an [`ElementSet`].
#[derive(Clone)]
pub struct Elements(u64);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Elements {}

/// Iterates all subsets of `within` (including the empty set and `within`).
pub fn subsets(within: ElementSet) -> impl Iterator<Item = ElementSet> {
    let mask = within.bits();
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask {
            None
        } else {
            Some((cur.wrapping_sub(mask)) & mask)
        };
        Some(ElementSet(cur))
    })
}

/// Weighted edge of a cut function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(from: usize, to: usize, weight: f64) -> Self {
        Self { from, to, weight }
    }
}

/// Concrete families of submodular functions and their payloads.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionKind {
    /// Total weight of edges leaving `S` (directed) or crossing `S` (undirected).
    Cut {
        directed: bool,
        edges: Vec<Edge>,
    },
    /// Weight of the union of the chosen family members.
    Coverage {
        universe_weights: Vec<f64>,
        sets: Vec<Vec<usize>>,
    },
    /// `profits[client][facility]`; ground elements are facilities.
    FacilityLocation {
        profits: Vec<Vec<f64>>,
    },
    Modular {
        weights: Vec<f64>,
    },
    /// `g(T) = f(V \ T)`.
    Complement {
        inner: Box<FunctionKind>,
    },
    /// `values[mask]` for every subset of the ground set.
    Table {
        values: Vec<f64>,
    },
    /// Multilinear extension on a ground set with `multiplicities[i]` copies of
    /// element `i` of `base`, laid out in consecutive blocks.
    Scaled {
        base: Box<FunctionKind>,
        multiplicities: Vec<u32>,
    },
}

impl FunctionKind {
    /// Evaluates the function on `s` over a ground set of size `n` without
    /// touching any counters.
    pub fn value(&self, n: usize, s: ElementSet) -> f64 {
        match self {
            FunctionKind::Cut { directed, edges } => edges
                .iter()
                .filter(|e| {
                    let a = s.contains(e.from);
                    let b = s.contains(e.to);
                    if *directed {
                        a && !b
                    } else {
                        a != b
                    }
                })
                .map(|e| e.weight)
                .sum(),
            FunctionKind::Coverage { universe_weights, sets } => {
                let mut covered = vec![false; universe_weights.len()];
                for i in s.iter() {
                    for &u in &sets[i] {
                        covered[u] = true;
                    }
                }
                covered
                    .iter()
                    .zip(universe_weights)
                    .filter(|(c, _)| **c)
                    .map(|(_, w)| w)
                    .sum()
            }
            FunctionKind::FacilityLocation { profits } => profits
                .iter()
                .map(|row| s.iter().map(|j| row[j]).fold(0.0, f64::max))
                .sum(),
            FunctionKind::Modular { weights } => s.iter().map(|i| weights[i]).sum(),
            FunctionKind::Complement { inner } => inner.value(n, s.complement(n)),
            FunctionKind::Table { values } => values[s.bits() as usize],
            FunctionKind::Scaled { base, multiplicities } => {
                let base_n = multiplicities.len();
                let mut offset = 0usize;
                let coords: Vec<f64> = multiplicities
                    .iter()
                    .map(|&m| {
                        let block = ElementSet::full(m as usize).bits() << offset;
                        let taken = (s.bits() & block).count_ones();
                        offset += m as usize;
                        f64::from(taken) / f64::from(m)
                    })
                    .collect();
                multilinear::expectation(&coords, |t| base.value(base_n, t))
                    .expect("scaled oracle fractional support within cap")
            }
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let finite_nonneg = |w: f64| -> Result<()> {
            if !w.is_finite() || w < 0.0 {
                Err(Error::NegativeWeight(w))
            } else {
                Ok(())
            }
        };
        match self {
            FunctionKind::Cut { edges, .. } => {
                for e in edges {
                    if e.from >= n || e.to >= n {
                        return Err(Error::BadEdge {
                            from: e.from,
                            to: e.to,
                            n,
                        });
                    }
                    finite_nonneg(e.weight)?;
                }
            }
            FunctionKind::Coverage { universe_weights, sets } => {
                if sets.len() != n {
                    return Err(Error::SizeMismatch {
                        left: sets.len(),
                        right: n,
                    });
                }
                for &w in universe_weights {
                    finite_nonneg(w)?;
                }
                let universe = universe_weights.len();
                for set in sets {
                    if let Some(&id) = set.iter().find(|&&u| u >= universe) {
                        return Err(Error::BadUniverseId { id, universe });
                    }
                }
            }
            FunctionKind::FacilityLocation { profits } => {
                for (client, row) in profits.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::SizeMismatch {
                            left: row.len(),
                            right: n,
                        });
                    }
                    for (facility, &value) in row.iter().enumerate() {
                        if !value.is_finite() || value < 0.0 {
                            return Err(Error::NegativeEntry {
                                client,
                                facility,
                                value,
                            });
                        }
                    }
                }
            }
            FunctionKind::Modular { weights } => {
                if weights.len() != n {
                    return Err(Error::SizeMismatch {
                        left: weights.len(),
                        right: n,
                    });
                }
                for &w in weights {
                    finite_nonneg(w)?;
                }
            }
            FunctionKind::Complement { inner } => inner.check(n)?,
            FunctionKind::Table { values } => {
                if n > TABLE_CAP {
                    return Err(Error::TooLarge {
                        size: n,
                        cap: TABLE_CAP,
                    });
                }
                if values.len() != 1 << n {
                    return Err(Error::BadTable {
                        got: values.len(),
                        expected: 1 << n,
                    });
                }
                if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
                    return Err(Error::NegativeValue {
                        value: v,
                        set: "table".into(),
                    });
                }
            }
            FunctionKind::Scaled { base, multiplicities } => {
                let total: usize = multiplicities.iter().map(|&m| m as usize).sum();
                if total != n {
                    return Err(Error::SizeMismatch { left: total, right: n });
                }
                if multiplicities.contains(&0) {
                    return Err(Error::BadParams("multiplicities must be positive".into()));
                }
                base.check(multiplicities.len())?;
            }
        }
        Ok(())
    }
}

/// Evaluation counters of an oracle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCalls {
    /// Every evaluation request, cached or not.
    pub requests: u64,
    /// Requests that missed the cache.
    pub distinct: u64,
}

/// Value oracle with evaluation counting and memoization. Safe to share
/// across threads; concurrent misses on the same set may compute it twice.
pub struct SubmodularOracle {
    n: usize,
    kind: FunctionKind,
    requests: AtomicU64,
    distinct: AtomicU64,
    cache: RwLock<HashMap<u64, f64>>,
}

impl fmt::Debug for SubmodularOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubmodularOracle")
            .field("n", &self.n)
            .field("kind", &self.kind)
            .field("calls", &self.calls())
            .finish()
    }
}

/// Clones share the function but start with fresh counters and an empty cache.
impl Clone for SubmodularOracle {
    fn clone(&self) -> Self {
        Self::new_unchecked(self.n, self.kind.clone())
    }
}

impl SubmodularOracle {
    /// Builds an oracle from a payload, validating it against the ground size.
    pub fn new(n: usize, kind: FunctionKind) -> Result<Self> {
        GroundSet::new(n)?;
        kind.check(n)?;
        Ok(Self::new_unchecked(n, kind))
    }

    fn new_unchecked(n: usize, kind: FunctionKind) -> Self {
        Self {
            n,
            kind,
            requests: AtomicU64::new(0),
            distinct: AtomicU64::new(0),
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ground(&self) -> ElementSet {
        ElementSet::full(self.n)
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    fn check_set(&self, s: ElementSet) -> Result<()> {
        if s.span() > self.n {
            return Err(Error::ElementOutOfRange {
                element: s.span() - 1,
                n: self.n,
            });
        }
        Ok(())
    }

    /// Counted, memoized evaluation of `f(s)`.
    pub fn evaluate(&self, s: ElementSet) -> Result<f64> {
        self.check_set(s)?;
        self.requests.fetch_add(1, Ordering::Relaxed);
        if let Some(&v) = self.cache.read().expect("oracle cache poisoned").get(&s.bits()) {
            return Ok(v);
        }
        let v = self.compute_checked(s)?;
        let fresh = self
            .cache
            .write()
            .expect("oracle cache poisoned")
            .insert(s.bits(), v)
            .is_none();
        if fresh {
            self.distinct.fetch_add(1, Ordering::Relaxed);
        }
        Ok(v)
    }

    /// Uncounted, uncached evaluation. Used by brute-force checkers so that
    /// ground-truth computations never show up in algorithm cost.
    pub fn compute(&self, s: ElementSet) -> Result<f64> {
        self.check_set(s)?;
        self.compute_checked(s)
    }

    fn compute_checked(&self, s: ElementSet) -> Result<f64> {
        let v = self.kind.value(self.n, s);
        if !(v >= 0.0) {
            return Err(Error::NegativeValue {
                value: v,
                set: s.to_string(),
            });
        }
        // empty float sums are -0.0
        Ok(v + 0.0)
    }

    /// `f(s ∪ {e}) - f(s)`; negative values are possible.
    pub fn marginal(&self, s: ElementSet, e: usize) -> Result<f64> {
        if e >= self.n {
            return Err(Error::ElementOutOfRange { element: e, n: self.n });
        }
        if s.contains(e) {
            return Err(Error::ElementPresent(e));
        }
        Ok(self.evaluate(s.with(e))? - self.evaluate(s)?)
    }

    /// Largest singleton value.
    pub fn f_max(&self) -> Result<f64> {
        (0..self.n).try_fold(0.0f64, |m, i| Ok(m.max(self.evaluate(ElementSet::singleton(i))?)))
    }

    pub fn calls(&self) -> OracleCalls {
        OracleCalls {
            requests: self.requests.load(Ordering::Relaxed),
            distinct: self.distinct.load(Ordering::Relaxed),
        }
    }

    pub fn reset_counters(&self) {
        self.requests.store(0, Ordering::Relaxed);
        self.distinct.store(0, Ordering::Relaxed);
        self.cache.write().expect("oracle cache poisoned").clear();
    }
}

pub fn build_cut(n: usize, edges: Vec<Edge>, directed: bool) -> Result<SubmodularOracle> {
    SubmodularOracle::new(n, FunctionKind::Cut { directed, edges })
}

/// Coverage function over a weighted universe; ground element `i` picks `sets[i]`.
pub fn build_coverage(sets: Vec<Vec<usize>>, universe_weights: Vec<f64>) -> Result<SubmodularOracle> {
    SubmodularOracle::new(sets.len(), FunctionKind::Coverage { universe_weights, sets })
}

/// Facility location with `profits[client][facility]`.
pub fn build_facility_location(profits: Vec<Vec<f64>>) -> Result<SubmodularOracle> {
    let n = profits.first().map_or(0, Vec::len);
    SubmodularOracle::new(n, FunctionKind::FacilityLocation { profits })
}

pub fn build_modular(weights: Vec<f64>) -> Result<SubmodularOracle> {
    SubmodularOracle::new(weights.len(), FunctionKind::Modular { weights })
}

/// Explicit value table indexed by bit mask; `n <= TABLE_CAP`.
pub fn build_table(n: usize, values: Vec<f64>) -> Result<SubmodularOracle> {
    SubmodularOracle::new(n, FunctionKind::Table { values })
}

/// `g(T) = f(V \ T)`.
pub fn complement_oracle(f: &SubmodularOracle) -> SubmodularOracle {
    SubmodularOracle::new_unchecked(
        f.n,
        FunctionKind::Complement {
            inner: Box::new(f.kind.clone()),
        },
    )
}

/// Outcome of an exhaustive structural check.
#[derive(Clone, Debug, PartialEq)]
pub struct SubmodularityReport {
    pub submodular: bool,
    pub monotone: bool,
    pub symmetric: bool,
    /// First violating pair `(S, T)` and its excess
    /// `f(S∪T) + f(S∩T) - f(S) - f(T)`.
    pub violation: Option<(ElementSet, ElementSet, f64)>,
}

/// Exhaustively checks submodularity, monotonicity and symmetry.
///
/// Up to [`PAIR_CHECK_CAP`] elements every pair `(S, T)` is tested; above it
/// the equivalent local form `f(S+i) + f(S+j) >= f(S+i+j) + f(S)` is used.
pub fn validate_submodular(f: &SubmodularOracle) -> Result<SubmodularityReport> {
    let n = f.n();
    if n > VALIDATE_CAP {
        return Err(Error::TooLarge {
            size: n,
            cap: VALIDATE_CAP,
        });
    }
    let size = 1usize << n;
    let values = (0..size)
        .map(|m| f.compute(ElementSet::from_bits(m as u64)))
        .collect::<Result<Vec<f64>>>()?;
    let tol = |a: f64, b: f64| VALUE_TOL * (1.0 + a.abs() + b.abs());

    let mut violation = None;
    if n <= PAIR_CHECK_CAP {
        'outer: for s in 0..size {
            for t in 0..size {
                let lhs = values[s | t] + values[s & t];
                let rhs = values[s] + values[t];
                if lhs > rhs + tol(lhs, rhs) {
                    violation = Some((
                        ElementSet::from_bits(s as u64),
                        ElementSet::from_bits(t as u64),
                        lhs - rhs,
                    ));
                    break 'outer;
                }
            }
        }
    } else {
        'local: for s in 0..size {
            for i in 0..n {
                if s >> i & 1 == 1 {
                    continue;
                }
                for j in i + 1..n {
                    if s >> j & 1 == 1 {
                        continue;
                    }
                    let (si, sj) = (s | 1 << i, s | 1 << j);
                    let lhs = values[si | sj] + values[s];
                    let rhs = values[si] + values[sj];
                    if lhs > rhs + tol(lhs, rhs) {
                        violation = Some((
                            ElementSet::from_bits(si as u64),
                            ElementSet::from_bits(sj as u64),
                            lhs - rhs,
                        ));
                        break 'local;
                    }
                }
            }
        }
    }

    let monotone =
        (0..size).all(|s| (0..n).all(|i| s >> i & 1 == 1 || values[s | 1 << i] + tol(values[s], 0.0) >= values[s]));
    let full = size - 1;
    let symmetric = (0..size).all(|s| (values[s] - values[full ^ s]).abs() <= tol(values[s], 0.0));

    Ok(SubmodularityReport {
        submodular: violation.is_none(),
        monotone,
        symmetric,
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn c4() -> SubmodularOracle {
        let edges = (0..4).map(|i| Edge::new(i, (i + 1) % 4, 1.0)).collect();
        build_cut(4, edges, false).unwrap()
    }

    fn set(ids: &[usize]) -> ElementSet {
        ElementSet::from_ids(ids.iter().copied())
    }

    // Independent of the oracle: count crossing edges of a->b->c->d->a.
    fn c4_crossing(s: ElementSet) -> f64 {
        (0..4).filter(|&i| s.contains(i) != s.contains((i + 1) % 4)).count() as f64
    }

    #[test]
    fn c4_cut_values() {
        let f = c4();
        assert_eq!(f.evaluate(ElementSet::EMPTY).unwrap(), 0.0);
        assert_eq!(f.evaluate(set(&[0])).unwrap(), c4_crossing(set(&[0])));
        assert_eq!(f.evaluate(set(&[0])).unwrap(), 2.0);
        assert_eq!(f.evaluate(set(&[0, 2])).unwrap(), 4.0);
        assert_eq!(f.evaluate(set(&[0, 1])).unwrap(), 2.0);
        for s in subsets(f.ground()) {
            assert_eq!(f.compute(s).unwrap(), c4_crossing(s));
        }
    }

    #[test]
    fn marginals() {
        let f = c4();
        assert_eq!(f.marginal(ElementSet::EMPTY, 0).unwrap(), 2.0);
        assert_eq!(f.marginal(set(&[1, 3]), 0).unwrap(), -2.0);
        assert_eq!(f.marginal(set(&[0]), 0), Err(Error::ElementPresent(0)));
        let m = build_modular(vec![5.0, 1.0, 2.0]).unwrap();
        for s in subsets(set(&[1, 2])) {
            assert_eq!(m.marginal(s, 0).unwrap(), 5.0);
        }
    }

    #[test]
    fn cut_builder_cases() {
        let u = build_cut(2, vec![Edge::new(0, 1, 3.0)], false).unwrap();
        assert_eq!(u.evaluate(set(&[0])).unwrap(), 3.0);
        let d = build_cut(2, vec![Edge::new(0, 1, 3.0)], true).unwrap();
        assert_eq!(d.evaluate(set(&[1])).unwrap(), 0.0);
        assert_eq!(d.evaluate(set(&[0])).unwrap(), 3.0);
        assert!(matches!(
            build_cut(2, vec![Edge::new(0, 2, 1.0)], false),
            Err(Error::BadEdge { .. })
        ));
        assert!(matches!(
            build_cut(2, vec![Edge::new(0, 1, -1.0)], false),
            Err(Error::NegativeWeight(_))
        ));
    }

    #[test]
    fn coverage_builder_cases() {
        let f = build_coverage(vec![vec![0, 1], vec![1, 2]], vec![1.0; 3]).unwrap();
        assert_eq!(f.evaluate(ElementSet::EMPTY).unwrap(), 0.0);
        assert_eq!(f.evaluate(set(&[0, 1])).unwrap(), 3.0);
        assert!(matches!(
            build_coverage(vec![vec![0, 5]], vec![1.0; 3]),
            Err(Error::BadUniverseId { id: 5, universe: 3 })
        ));
        let r = validate_submodular(&f).unwrap();
        assert!(r.submodular && r.monotone);
    }

    #[test]
    fn facility_location_cases() {
        let f = build_facility_location(vec![vec![2.0, 5.0]]).unwrap();
        assert_eq!(f.evaluate(set(&[1])).unwrap(), 5.0);
        assert_eq!(f.evaluate(set(&[0, 1])).unwrap(), 5.0);
        assert_eq!(f.evaluate(ElementSet::EMPTY).unwrap(), 0.0);
        let g = build_facility_location(vec![vec![1.0, 4.0], vec![3.0, 2.0]]).unwrap();
        assert_eq!(g.evaluate(set(&[0])).unwrap(), 4.0);
        assert!(matches!(
            build_facility_location(vec![vec![1.0, -4.0]]),
            Err(Error::NegativeEntry {
                client: 0,
                facility: 1,
                ..
            })
        ));
    }

    #[test]
    fn complement_cases() {
        let f = c4();
        let g = complement_oracle(&f);
        for s in subsets(f.ground()) {
            assert_eq!(g.evaluate(s).unwrap(), f.evaluate(s).unwrap());
        }
        let m = build_modular(vec![1.0, 2.0]).unwrap();
        assert_eq!(complement_oracle(&m).evaluate(set(&[0])).unwrap(), 2.0);
        let d = build_cut(2, vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 1.0)], true).unwrap();
        assert_eq!(complement_oracle(&d).evaluate(ElementSet::EMPTY).unwrap(), 0.0);
    }

    #[test]
    fn cache_counts_distinct_sets_once() {
        let f = c4();
        let a = f.evaluate(set(&[0, 2])).unwrap();
        let b = f.evaluate(set(&[0, 2])).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(
            f.calls(),
            OracleCalls {
                requests: 2,
                distinct: 1
            }
        );
        f.compute(set(&[1])).unwrap();
        assert_eq!(f.calls().requests, 2);
        let g = f.clone();
        assert_eq!(g.calls(), OracleCalls::default());
    }

    #[test]
    fn negative_values_are_rejected() {
        let f = build_table(1, vec![0.0, -1.0]).unwrap();
        assert!(matches!(f.evaluate(set(&[0])), Err(Error::NegativeValue { .. })));
    }

    #[test]
    fn out_of_range_sets_are_rejected() {
        let f = c4();
        assert!(matches!(f.evaluate(set(&[4])), Err(Error::ElementOutOfRange { .. })));
    }

    #[test]
    fn validator_flags_table_violation() {
        // f({0}) = 0, f({1}) = 0, f({0,1}) = 5
        let f = build_table(2, vec![0.0, 0.0, 0.0, 5.0]).unwrap();
        let r = validate_submodular(&f).unwrap();
        assert!(!r.submodular);
        let (s, t, _) = r.violation.unwrap();
        assert_eq!((s, t), (set(&[0]), set(&[1])));
    }

    #[test]
    fn validator_on_cuts() {
        let r = validate_submodular(&c4()).unwrap();
        assert!(r.submodular && r.symmetric && !r.monotone);
        let d = build_cut(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)], true).unwrap();
        let r = validate_submodular(&d).unwrap();
        assert!(r.submodular && !r.symmetric);
    }

    #[test]
    fn validator_local_form_above_pair_cap() {
        let n = 13;
        let edges = (0..n).map(|i| Edge::new(i, (i + 1) % n, 1.0)).collect();
        let f = build_cut(n, edges, false).unwrap();
        assert!(validate_submodular(&f).unwrap().submodular);
        let mut values: Vec<f64> = (0..1u64 << n).map(|m| m.count_ones() as f64).collect();
        values[0b11] = 3.0;
        let g = build_table(n, values).unwrap();
        assert!(!validate_submodular(&g).unwrap().submodular);
        let big = build_modular(vec![1.0; 17]).unwrap();
        assert!(matches!(validate_submodular(&big), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn table_size_limits() {
        assert!(matches!(build_table(2, vec![0.0; 3]), Err(Error::BadTable { .. })));
        assert!(matches!(build_table(21, vec![]), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn subsets_enumerates_all() {
        let within = set(&[1, 3, 4]);
        let all: Vec<_> = subsets(within).collect();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|s| s.is_subset(within)));
        assert_eq!(subsets(ElementSet::EMPTY).count(), 1);
    }

    #[test]
    fn lex_order() {
        assert!(set(&[]).lex_cmp(set(&[0])).is_lt());
        assert!(set(&[0, 2]).lex_cmp(set(&[1, 3])).is_lt());
        assert!(set(&[0, 1]).lex_cmp(set(&[1])).is_lt());
    }
}
