//! Matroid independence oracles.
//!
//! A [`MatroidOracle`] lives on the ids `0..n` but only the elements of its
//! `ground` mask belong to the matroid; contraction removes elements from the
//! ground instead of renumbering the rest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{subsets, ElementSet, GroundSet};

/// Exhaustive axiom checks for explicit families stop here.
pub const EXPLICIT_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatroidKind {
    Uniform {
        rank: usize,
    },
    /// `part_of[e]` is the part of element `e`; at most `capacities[p]` elements
    /// of part `p` may be chosen.
    Partition {
        part_of: Vec<usize>,
        capacities: Vec<usize>,
    },
    /// Element `e` is the edge `edges[e]` between two of `vertices` vertices.
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    /// All independent sets, listed explicitly.
    Explicit {
        independent: Vec<ElementSet>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatroidOracle {
    n: usize,
    ground: ElementSet,
    kind: MatroidKind,
}

impl MatroidOracle {
    pub fn new(n: usize, kind: MatroidKind) -> Result<Self> {
        GroundSet::new(n)?;
        let kind = match kind {
            MatroidKind::Partition { part_of, capacities } => {
                if part_of.len() != n {
                    return Err(Error::SizeMismatch {
                        left: part_of.len(),
                        right: n,
                    });
                }
                if let Some(&p) = part_of.iter().find(|&&p| p >= capacities.len()) {
                    return Err(Error::BadParams(format!("part {p} has no capacity")));
                }
                MatroidKind::Partition { part_of, capacities }
            }
            MatroidKind::Graphic { vertices, edges } => {
                if edges.len() != n {
                    return Err(Error::SizeMismatch {
                        left: edges.len(),
                        right: n,
                    });
                }
                if let Some(&(a, b)) = edges.iter().find(|(a, b)| *a >= vertices || *b >= vertices) {
                    return Err(Error::BadEdge {
                        from: a,
                        to: b,
                        n: vertices,
                    });
                }
                MatroidKind::Graphic { vertices, edges }
            }
            MatroidKind::Explicit { independent } => {
                let family = canonical_family(independent);
                validate_explicit(n, &family)?;
                MatroidKind::Explicit { independent: family }
            }
            uniform => uniform,
        };
        Ok(Self {
            n,
            ground: ElementSet::full(n),
            kind,
        })
    }

    pub fn uniform(n: usize, rank: usize) -> Result<Self> {
        Self::new(n, MatroidKind::Uniform { rank })
    }

    pub fn partition(part_of: Vec<usize>, capacities: Vec<usize>) -> Result<Self> {
        Self::new(part_of.len(), MatroidKind::Partition { part_of, capacities })
    }

    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(edges.len(), MatroidKind::Graphic { vertices, edges })
    }

    pub fn explicit(n: usize, independent: Vec<ElementSet>) -> Result<Self> {
        Self::new(n, MatroidKind::Explicit { independent })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ground(&self) -> ElementSet {
        self.ground
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    pub fn is_partition(&self) -> bool {
        matches!(self.kind, MatroidKind::Partition { .. })
    }

    pub fn is_independent(&self, s: ElementSet) -> bool {
        if !s.is_subset(self.ground) {
            return false;
        }
        match &self.kind {
            MatroidKind::Uniform { rank } => s.len() <= *rank,
            MatroidKind::Partition { part_of, capacities } => {
                let mut used = vec![0usize; capacities.len()];
                s.iter().all(|e| {
                    let p = part_of[e];
                    used[p] += 1;
                    used[p] <= capacities[p]
                })
            }
            MatroidKind::Graphic { vertices, edges } => {
                let mut uf = UnionFind::new(*vertices);
                s.iter().all(|e| uf.union(edges[e].0, edges[e].1))
            }
            MatroidKind::Explicit { independent } => independent.binary_search_by_key(&s.bits(), |t| t.bits()).is_ok(),
        }
    }

    /// Size of a largest independent subset of `s`.
    pub fn rank(&self, s: ElementSet) -> usize {
        let s = s.intersection(self.ground);
        match &self.kind {
            MatroidKind::Uniform { rank } => s.len().min(*rank),
            MatroidKind::Partition { part_of, capacities } => {
                let mut count = vec![0usize; capacities.len()];
                for e in s.iter() {
                    count[part_of[e]] += 1;
                }
                count.iter().zip(capacities).map(|(c, cap)| (*c).min(*cap)).sum()
            }
            _ => self.greedy_basis(s.iter()).len(),
        }
    }

    pub fn full_rank(&self) -> usize {
        self.rank(self.ground)
    }

    /// Matroid greedy: scans `order`, keeping every element that preserves
    /// independence.
    pub fn greedy_basis<I: IntoIterator<Item = usize>>(&self, order: I) -> ElementSet {
        let mut b = ElementSet::EMPTY;
        for e in order {
            if self.ground.contains(e) && !b.contains(e) && self.is_independent(b.with(e)) {
                b.insert(e);
            }
        }
        b
    }

    pub fn is_base(&self, s: ElementSet) -> bool {
        self.is_independent(s) && s.len() == self.full_rank()
    }

    /// Contracts the independent set `s`: `T` is independent in the result
    /// iff `T ∪ s` is independent here, and the ground loses `s`.
    pub fn contract(&self, s: ElementSet) -> Result<MatroidOracle> {
        if !self.is_independent(s) {
            return Err(Error::DependentContraction);
        }
        let ground = self.ground.difference(s);
        let kind = match &self.kind {
            MatroidKind::Uniform { rank } => MatroidKind::Uniform { rank: rank - s.len() },
            MatroidKind::Partition { part_of, capacities } => {
                let mut capacities = capacities.clone();
                for e in s.iter() {
                    capacities[part_of[e]] -= 1;
                }
                MatroidKind::Partition {
                    part_of: part_of.clone(),
                    capacities,
                }
            }
            MatroidKind::Graphic { vertices, edges } => {
                let mut uf = UnionFind::new(*vertices);
                for e in s.iter() {
                    uf.union(edges[e].0, edges[e].1);
                }
                let edges = edges.iter().map(|&(a, b)| (uf.find(a), uf.find(b))).collect();
                MatroidKind::Graphic {
                    vertices: *vertices,
                    edges,
                }
            }
            MatroidKind::Explicit { independent } => MatroidKind::Explicit {
                independent: canonical_family(
                    independent
                        .iter()
                        .filter(|t| s.is_subset(**t))
                        .map(|t| t.difference(s))
                        .collect(),
                ),
            },
        };
        Ok(MatroidOracle {
            n: self.n,
            ground,
            kind,
        })
    }
}

fn canonical_family(mut family: Vec<ElementSet>) -> Vec<ElementSet> {
    family.sort_by_key(|s| s.bits());
    family.dedup();
    family
}

fn validate_explicit(n: usize, family: &[ElementSet]) -> Result<()> {
    if n > EXPLICIT_CAP {
        return Err(Error::TooLarge {
            size: n,
            cap: EXPLICIT_CAP,
        });
    }
    let contains = |s: ElementSet| family.binary_search_by_key(&s.bits(), |t| t.bits()).is_ok();
    if !contains(ElementSet::EMPTY) {
        return Err(Error::NotAMatroid("empty set is not independent".into()));
    }
    for &s in family {
        if s.span() > n {
            return Err(Error::ElementOutOfRange {
                element: s.span() - 1,
                n,
            });
        }
        if let Some(e) = s.iter().find(|&e| !contains(s.without(e))) {
            return Err(Error::NotAMatroid(format!(
                "{} independent but {} is not",
                s,
                s.without(e)
            )));
        }
    }
    // With downward closure, the exchange axiom only needs |J| = |I| + 1.
    for &i in family {
        for &j in family.iter().filter(|j| j.len() == i.len() + 1) {
            if !j.difference(i).iter().any(|e| contains(i.with(e))) {
                return Err(Error::NotAMatroid(format!("cannot extend {i} from {j}")));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Assignment `π: J \ I → (I \ J) ∪ {φ}` with `(I \ π(b)) ∪ {b}` independent
/// for every `b` and every `e ∈ I \ J` hit at most once. `None` stands for φ.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExchangeMap {
    assignments: Vec<(usize, Option<usize>)>,
}

impl ExchangeMap {
    pub fn assignments(&self) -> &[(usize, Option<usize>)] {
        &self.assignments
    }

    pub fn image(&self, b: usize) -> Option<Option<usize>> {
        self.assignments.iter().find(|(x, _)| *x == b).map(|(_, e)| *e)
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    /// True if no element maps to φ.
    pub fn is_bijection(&self) -> bool {
        self.assignments.iter().all(|(_, e)| e.is_some())
    }

    /// Checks both exchange conditions against `m`.
    pub fn satisfies(&self, m: &MatroidOracle, i_set: ElementSet, j_set: ElementSet) -> bool {
        let domain: ElementSet = self.assignments.iter().map(|(b, _)| *b).collect();
        if domain != j_set.difference(i_set) || domain.len() != self.assignments.len() {
            return false;
        }
        let targets = i_set.difference(j_set);
        let mut used = ElementSet::EMPTY;
        for &(b, e) in &self.assignments {
            let swapped = match e {
                None => i_set.with(b),
                Some(e) => {
                    if !targets.contains(e) || used.contains(e) {
                        return false;
                    }
                    used.insert(e);
                    i_set.without(e).with(b)
                }
            };
            if !m.is_independent(swapped) {
                return false;
            }
        }
        true
    }
}

/// Builds an exchange map between two independent sets.
///
/// Elements `b` with `I + b` independent map to φ, the rest are matched into
/// `I \ J` by augmenting paths scanning candidates in ascending id order. When
/// `|I| = |J|` a perfect matching without φ is built instead.
pub fn exchange_map(m: &MatroidOracle, i_set: ElementSet, j_set: ElementSet) -> Result<ExchangeMap> {
    if !m.is_independent(i_set) || !m.is_independent(j_set) {
        return Err(Error::DependentInput);
    }
    let domain: Vec<usize> = j_set.difference(i_set).to_vec();
    let targets: Vec<usize> = i_set.difference(j_set).to_vec();
    let bijective = i_set.len() == j_set.len();

    let mut image: Vec<Option<usize>> = vec![None; domain.len()];
    let mut to_match = Vec::new();
    for (bi, &b) in domain.iter().enumerate() {
        if !bijective && m.is_independent(i_set.with(b)) {
            continue;
        }
        to_match.push(bi);
    }

    let adj: Vec<Vec<usize>> = domain
        .iter()
        .map(|&b| {
            (0..targets.len())
                .filter(|&ti| m.is_independent(i_set.without(targets[ti]).with(b)))
                .collect()
        })
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; targets.len()];

    fn augment(bi: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        // a free partner wins over displacing an earlier match
        if let Some(&ti) = adj[bi].iter().find(|&&ti| owner[ti].is_none() && !seen[ti]) {
            seen[ti] = true;
            owner[ti] = Some(bi);
            return true;
        }
        for &ti in &adj[bi] {
            if seen[ti] {
                continue;
            }
            seen[ti] = true;
            if owner[ti].is_none() || augment(owner[ti].unwrap(), adj, owner, seen) {
                owner[ti] = Some(bi);
                return true;
            }
        }
        false
    }

    for &bi in &to_match {
        let mut seen = vec![false; targets.len()];
        if !augment(bi, &adj, &mut owner, &mut seen) {
            return Err(Error::InternalContradiction(format!(
                "no exchange partner for {} between {} and {}",
                domain[bi], i_set, j_set
            )));
        }
    }
    for (ti, o) in owner.iter().enumerate() {
        if let Some(bi) = o {
            image[*bi] = Some(targets[ti]);
        }
    }
    let map = ExchangeMap {
        assignments: domain.into_iter().zip(image).collect(),
    };
    debug_assert!(map.satisfies(m, i_set, j_set));
    Ok(map)
}

/// Two disjoint bases of `m`, if any exist.
pub fn find_two_disjoint_bases(m: &MatroidOracle) -> Result<Option<(ElementSet, ElementSet)>> {
    let live = m.ground.to_vec();
    match &m.kind {
        MatroidKind::Uniform { rank } => {
            if 2 * rank > live.len() {
                return Ok(None);
            }
            let b1 = live[..*rank].iter().copied().collect();
            let b2 = live[*rank..2 * rank].iter().copied().collect();
            Ok(Some((b1, b2)))
        }
        MatroidKind::Partition { part_of, capacities } => {
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); capacities.len()];
            for &e in &live {
                members[part_of[e]].push(e);
            }
            let (mut b1, mut b2) = (ElementSet::EMPTY, ElementSet::EMPTY);
            for (p, elems) in members.iter().enumerate() {
                let take = capacities[p].min(elems.len());
                if 2 * take > elems.len() {
                    return Ok(None);
                }
                b1 = b1.union(elems[..take].iter().copied().collect());
                b2 = b2.union(elems[take..2 * take].iter().copied().collect());
            }
            Ok(Some((b1, b2)))
        }
        _ => disjoint_bases_by_union(m),
    }
}

/// Matroid-union augmentation over two copies of `m`, BFS shortest paths.
fn disjoint_bases_by_union(m: &MatroidOracle) -> Result<Option<(ElementSet, ElementSet)>> {
    let r = m.full_rank();
    let n = m.n;
    let mut parts = [ElementSet::EMPTY, ElementSet::EMPTY];
    let cap = n * n;
    let mut rounds = 0usize;

    for x in m.ground.iter() {
        rounds += 1;
        if rounds > cap.max(1) {
            return Err(Error::InternalContradiction(
                "disjoint-base search did not converge".into(),
            ));
        }
        // prev[y] = (predecessor, label of the part y leaves)
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut visited = ElementSet::singleton(x);
        let mut queue = std::collections::VecDeque::from([x]);
        let mut sink: Option<(usize, usize)> = None;
        'bfs: while let Some(y) = queue.pop_front() {
            for (label, part) in parts.iter().enumerate() {
                if part.contains(y) {
                    continue;
                }
                if m.is_independent(part.with(y)) {
                    sink = Some((y, label));
                    break 'bfs;
                }
                for z in part.iter() {
                    if !visited.contains(z) && m.is_independent(part.without(z).with(y)) {
                        visited.insert(z);
                        prev[z] = Some((y, label));
                        queue.push_back(z);
                    }
                }
            }
        }
        let Some((mut y, label)) = sink else { continue };
        parts[label].insert(y);
        while let Some((p, label)) = prev[y] {
            parts[label].remove(y);
            parts[label].insert(p);
            y = p;
        }
        if !parts.iter().all(|p| m.is_independent(*p)) || !parts[0].is_disjoint(parts[1]) {
            return Err(Error::InternalContradiction("augmentation broke independence".into()));
        }
    }
    if parts[0].len() == r && parts[1].len() == r {
        Ok(Some((parts[0], parts[1])))
    } else {
        Ok(None)
    }
}

/// All independent sets of `m` (exhaustive; `m.n()` small).
pub fn independent_sets(m: &MatroidOracle) -> impl Iterator<Item = ElementSet> + '_ {
    subsets(m.ground).filter(move |s| m.is_independent(*s))
}
