//! Approximate local search under `k` matroid constraints.
//!
//! Moves are accepted only when they raise `f` by a factor of at least
//! `1 + ε / n^d`. The pivot rule is best improvement over the whole
//! neighborhood; ties go to the lexicographically smallest
//! `(added elements, removed elements)` pair, with deletions ordered first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{subsets, ElementSet, OracleCalls, SubmodularOracle};
use crate::matroid::MatroidOracle;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Improvement slack ε > 0.
    pub epsilon: f64,
    /// Exponent `d` of the improvement factor `1 + ε / n^d`.
    pub scaling_exponent: u32,
    /// Exchange width for the partition-matroid search.
    pub p: usize,
    /// Hard cap on applied moves per search.
    pub move_cap: usize,
    /// Scan every removal combination instead of the per-matroid conflict
    /// elements only.
    pub full_neighborhood: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            scaling_exponent: 4,
            p: 2,
            move_cap: 1_000_000,
            full_neighborhood: false,
        }
    }
}

impl SearchConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::BadParams(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.p == 0 {
            return Err(Error::BadParams("p must be at least 1".into()));
        }
        Ok(())
    }

    /// `1 + ε / n^d` for a ground set of `n` elements.
    pub fn improvement_factor(&self, n: usize) -> f64 {
        1.0 + self.epsilon / (n as f64).powi(self.scaling_exponent as i32)
    }

    /// Upper bound `⌈ln n / ln(1 + ε/n^d)⌉ + 1` on the improving moves of one
    /// search started from the best singleton.
    pub fn move_bound(&self, n: usize) -> usize {
        let factor = self.improvement_factor(n);
        ((n as f64).ln() / factor.ln()).ceil() as usize + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Move {
    Delete { element: usize },
    Exchange { added: Vec<usize>, removed: Vec<usize> },
}

impl Move {
    pub fn apply(&self, s: ElementSet) -> ElementSet {
        match self {
            Move::Delete { element } => s.without(*element),
            Move::Exchange { added, removed } => {
                let r: ElementSet = removed.iter().copied().collect();
                s.difference(r).union(added.iter().copied().collect())
            }
        }
    }

    fn order_key(&self) -> (u8, &[usize], &[usize]) {
        match self {
            Move::Delete { element } => (0, std::slice::from_ref(element), &[]),
            Move::Exchange { added, removed } => (1, added, removed),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveRecord {
    #[serde(flatten)]
    pub mv: Move,
    pub before: f64,
    pub after: f64,
}

/// Result of any solver in this crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub solution: ElementSet,
    pub value: f64,
    pub oracle_calls: OracleCalls,
    /// Ground set the search ran on.
    pub ground: ElementSet,
    /// Improvement factor the local search used (1 when not a local search).
    pub factor: f64,
    pub moves: Vec<MoveRecord>,
    /// Sub-runs, e.g. the restarts of Algorithm A.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iterations: Vec<SolutionReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SolutionReport {
    pub(crate) fn plain(solution: ElementSet, value: f64, ground: ElementSet) -> Self {
        Self {
            solution,
            value,
            oracle_calls: OracleCalls::default(),
            ground,
            factor: 1.0,
            moves: Vec::new(),
            iterations: Vec::new(),
            notes: Vec::new(),
        }
    }
}

pub(crate) fn calls_since(f: &SubmodularOracle, start: OracleCalls) -> OracleCalls {
    let now = f.calls();
    OracleCalls {
        requests: now.requests - start.requests,
        distinct: now.distinct - start.distinct,
    }
}

fn check_matroids(f: &SubmodularOracle, matroids: &[MatroidOracle]) -> Result<()> {
    if matroids.is_empty() {
        return Err(Error::BadParams("at least one matroid is required".into()));
    }
    for m in matroids {
        if m.n() != f.n() {
            return Err(Error::SizeMismatch {
                left: m.n(),
                right: f.n(),
            });
        }
    }
    Ok(())
}

pub(crate) fn feasible_all(matroids: &[MatroidOracle], s: ElementSet) -> bool {
    matroids.iter().all(|m| m.is_independent(s))
}

/// Elements of `ground` whose singleton is independent in every matroid.
pub fn usable_elements(ground: ElementSet, matroids: &[MatroidOracle]) -> ElementSet {
    ground
        .iter()
        .filter(|&e| feasible_all(matroids, ElementSet::singleton(e)))
        .collect()
}

/// Start of every local search: the best feasible singleton, or `None` when
/// no singleton has positive value.
fn best_singleton(f: &SubmodularOracle, usable: ElementSet) -> Result<Option<(usize, f64)>> {
    let mut best: Option<(usize, f64)> = None;
    for v in usable.iter() {
        let val = f.evaluate(ElementSet::singleton(v))?;
        if val > 0.0 && best.is_none_or(|(_, b)| val > b) {
            best = Some((v, val));
        }
    }
    Ok(best)
}

struct Candidate {
    mv: Move,
    value: f64,
}

fn consider(best: &mut Option<Candidate>, mv: Move, value: f64) {
    let better = match best {
        None => true,
        Some(b) => value > b.value || (value == b.value && mv.order_key() < b.mv.order_key()),
    };
    if better {
        *best = Some(Candidate { mv, value });
    }
}

/// Runs a local search from `start`, with the neighborhood produced by
/// `scan`. `scan(S, cur, threshold, best)` must offer every improving move.
fn run_local_search<F>(
    f: &SubmodularOracle,
    ground: ElementSet,
    start: ElementSet,
    cfg: &SearchConfig,
    mut scan: F,
) -> Result<SolutionReport>
where
    F: FnMut(ElementSet, f64, f64, &mut Option<Candidate>) -> Result<()>,
{
    let calls = f.calls();
    let factor = cfg.improvement_factor(f.n());
    let mut s = start;
    let mut cur = f.evaluate(s)?;
    let mut moves = Vec::new();
    loop {
        let mut best = None;
        scan(s, cur, factor * cur, &mut best)?;
        let Some(c) = best else { break };
        if moves.len() >= cfg.move_cap {
            return Err(Error::BadParams(format!("move cap {} reached", cfg.move_cap)));
        }
        s = c.mv.apply(s);
        moves.push(MoveRecord {
            mv: c.mv,
            before: cur,
            after: c.value,
        });
        cur = c.value;
    }
    Ok(SolutionReport {
        solution: s,
        value: cur,
        oracle_calls: calls_since(f, calls),
        ground,
        factor,
        moves,
        iterations: Vec::new(),
        notes: Vec::new(),
    })
}

/// Offers every delete move of `s`: `f(S - e) >= threshold` and `> cur`.
fn scan_deletes(
    f: &SubmodularOracle,
    s: ElementSet,
    cur: f64,
    threshold: f64,
    best: &mut Option<Candidate>,
) -> Result<()> {
    for e in s.iter() {
        let v = f.evaluate(s.without(e))?;
        if v >= threshold && v > cur {
            consider(best, Move::Delete { element: e }, v);
        }
    }
    Ok(())
}

/// Removal sets `{e_1, .., e_k}` for adding `d` to `s`: one choice per matroid,
/// φ (none) when `s + d` is already independent there.
fn removal_sets(matroids: &[MatroidOracle], s: ElementSet, d: usize, full: bool) -> Vec<ElementSet> {
    let mut combos = vec![ElementSet::EMPTY];
    for m in matroids {
        let addable = m.is_independent(s.with(d));
        let mut options: Vec<Option<usize>> = Vec::new();
        if addable {
            options.push(None);
        }
        if !addable || full {
            options.extend(s.iter().filter(|&e| m.is_independent(s.without(e).with(d))).map(Some));
        }
        if options.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(combos.len() * options.len());
        for c in &combos {
            for o in &options {
                next.push(o.map_or(*c, |e| c.with(e)));
            }
        }
        next.sort_by(|a, b| a.lex_cmp(*b));
        next.dedup();
        combos = next;
    }
    combos
}

/// Procedure B: approximate local search with delete and `(1, <=k)` exchange
/// moves over `ground`, started from the best feasible singleton.
pub fn procedure_b(
    f: &SubmodularOracle,
    ground: ElementSet,
    matroids: &[MatroidOracle],
    cfg: &SearchConfig,
) -> Result<SolutionReport> {
    cfg.validate()?;
    check_matroids(f, matroids)?;
    let usable = usable_elements(ground.intersection(f.ground()), matroids);
    let calls = f.calls();
    let Some((v, _)) = best_singleton(f, usable)? else {
        let mut r = SolutionReport::plain(ElementSet::EMPTY, f.evaluate(ElementSet::EMPTY)?, ground);
        r.factor = cfg.improvement_factor(f.n());
        r.oracle_calls = calls_since(f, calls);
        return Ok(r);
    };
    let mut report = run_local_search(f, ground, ElementSet::singleton(v), cfg, |s, cur, threshold, best| {
        scan_deletes(f, s, cur, threshold, best)?;
        for d in usable.difference(s).iter() {
            for r in removal_sets(matroids, s, d, cfg.full_neighborhood) {
                let t = s.difference(r).with(d);
                debug_assert!(feasible_all(matroids, t));
                let val = f.evaluate(t)?;
                if val > threshold && val > cur {
                    consider(
                        best,
                        Move::Exchange {
                            added: vec![d],
                            removed: r.to_vec(),
                        },
                        val,
                    );
                }
            }
        }
        Ok(())
    })?;
    report.oracle_calls = calls_since(f, calls);
    Ok(report)
}

/// Algorithm A: `k + 1` rounds of Procedure B on shrinking ground sets
/// `V_{i+1} = V_i \ S_i`; returns the best round.
pub fn algorithm_a(f: &SubmodularOracle, matroids: &[MatroidOracle], cfg: &SearchConfig) -> Result<SolutionReport> {
    check_matroids(f, matroids)?;
    repeated_search(f, matroids.len() + 1, |ground| procedure_b(f, ground, matroids, cfg))
}

fn repeated_search<F>(f: &SubmodularOracle, rounds: usize, mut search: F) -> Result<SolutionReport>
where
    F: FnMut(ElementSet) -> Result<SolutionReport>,
{
    let calls = f.calls();
    let mut ground = f.ground();
    let mut iterations: Vec<SolutionReport> = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let r = search(ground)?;
        ground = ground.difference(r.solution);
        iterations.push(r);
    }
    let best = iterations
        .iter()
        .enumerate()
        .fold(0, |b, (i, r)| if r.value > iterations[b].value { i } else { b });
    let chosen = &iterations[best];
    Ok(SolutionReport {
        solution: chosen.solution,
        value: chosen.value,
        oracle_calls: calls_since(f, calls),
        ground: f.ground(),
        factor: chosen.factor,
        moves: Vec::new(),
        notes: vec![format!("best round {}", best + 1)],
        iterations,
    })
}

/// One pass of Procedure B on the whole ground set, for symmetric `f`.
pub fn symmetric_algorithm(
    f: &SubmodularOracle,
    matroids: &[MatroidOracle],
    cfg: &SearchConfig,
) -> Result<SolutionReport> {
    procedure_b(f, f.ground(), matroids, cfg)
}

struct PartitionView {
    part_of: Vec<Vec<usize>>,
}

impl PartitionView {
    fn new(matroids: &[MatroidOracle]) -> Result<Self> {
        let mut part_of = Vec::with_capacity(matroids.len());
        for (i, m) in matroids.iter().enumerate() {
            match m.kind() {
                crate::matroid::MatroidKind::Partition { part_of: p, .. } => part_of.push(p.clone()),
                _ => return Err(Error::NotPartition(i)),
            }
        }
        Ok(Self { part_of })
    }

    /// Elements of `s` sharing a part with some element of `added` in some matroid.
    fn conflicts(&self, s: ElementSet, added: ElementSet) -> ElementSet {
        s.iter()
            .filter(|&e| self.part_of.iter().any(|p| added.iter().any(|d| p[d] == p[e])))
            .collect()
    }
}

/// Local search with deletes and exchanges adding `q <= p` elements while
/// dropping up to `(k - 1) q`, under `k >= 2` partition matroids.
pub fn p_exchange_search(
    f: &SubmodularOracle,
    ground: ElementSet,
    matroids: &[MatroidOracle],
    cfg: &SearchConfig,
) -> Result<SolutionReport> {
    cfg.validate()?;
    check_matroids(f, matroids)?;
    let view = PartitionView::new(matroids)?;
    let k = matroids.len();
    if k < 2 {
        return Err(Error::BadParams(
            "p-exchange search needs k >= 2 partition matroids".into(),
        ));
    }
    let usable = usable_elements(ground.intersection(f.ground()), matroids);
    let calls = f.calls();
    let Some((v, _)) = best_singleton(f, usable)? else {
        let mut r = SolutionReport::plain(ElementSet::EMPTY, f.evaluate(ElementSet::EMPTY)?, ground);
        r.factor = cfg.improvement_factor(f.n());
        r.oracle_calls = calls_since(f, calls);
        return Ok(r);
    };
    let p = cfg.p;
    let mut report = run_local_search(f, ground, ElementSet::singleton(v), cfg, |s, cur, threshold, best| {
        scan_deletes(f, s, cur, threshold, best)?;
        for added in subsets(usable.difference(s)) {
            let q = added.len();
            if q == 0 || q > p {
                continue;
            }
            let pool = if cfg.full_neighborhood {
                s
            } else {
                view.conflicts(s, added)
            };
            let with_added = s.union(added);
            for removed in subsets(pool) {
                if removed.len() > (k - 1) * q {
                    continue;
                }
                let t = with_added.difference(removed);
                if !feasible_all(matroids, t) {
                    continue;
                }
                let val = f.evaluate(t)?;
                if val > threshold && val > cur {
                    consider(
                        best,
                        Move::Exchange {
                            added: added.to_vec(),
                            removed: removed.to_vec(),
                        },
                        val,
                    );
                }
            }
        }
        Ok(())
    })?;
    report.oracle_calls = calls_since(f, calls);
    Ok(report)
}

/// `p = 1 + ⌈2k / ε⌉`.
pub fn partition_width(k: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0) {
        return Err(Error::BadParams(format!("epsilon must be positive, got {epsilon}")));
    }
    let ratio = 2.0 * k as f64 / epsilon;
    // absorb representation error such as 4 / (4/3) = 3.0000000000000004
    Ok(1 + (ratio - 1e-9).ceil().max(0.0) as usize)
}

/// Partition-matroid algorithm: a single p-exchange search for monotone `f`,
/// `k` rounds on shrinking ground sets otherwise.
pub fn partition_algorithm(
    f: &SubmodularOracle,
    matroids: &[MatroidOracle],
    epsilon: f64,
    monotone: bool,
    cfg: &SearchConfig,
) -> Result<SolutionReport> {
    let k = matroids.len();
    if k < 2 {
        return Err(Error::BadParams("partition algorithm needs k >= 2".into()));
    }
    let p = partition_width(k, epsilon)?;
    let cfg = SearchConfig {
        p: p.min(f.n()).max(1),
        ..*cfg
    };
    let mut report = if monotone {
        p_exchange_search(f, f.ground(), matroids, &cfg)?
    } else {
        repeated_search(f, k, |ground| p_exchange_search(f, ground, matroids, &cfg))?
    };
    report.notes.push(format!("p = {p}"));
    Ok(report)
}

/// Greedy: repeatedly add the feasible element of largest positive marginal
/// gain (ties to the lowest id).
pub fn greedy_baseline(f: &SubmodularOracle, matroids: &[MatroidOracle]) -> Result<SolutionReport> {
    check_matroids(f, matroids)?;
    let calls = f.calls();
    let mut s = ElementSet::EMPTY;
    let mut cur = f.evaluate(s)?;
    let mut moves = Vec::new();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for e in f.ground().difference(s).iter() {
            let t = s.with(e);
            if !feasible_all(matroids, t) {
                continue;
            }
            let v = f.evaluate(t)?;
            if v > cur && best.is_none_or(|(_, b)| v > b) {
                best = Some((e, v));
            }
        }
        let Some((e, v)) = best else { break };
        moves.push(MoveRecord {
            mv: Move::Exchange {
                added: vec![e],
                removed: vec![],
            },
            before: cur,
            after: v,
        });
        s.insert(e);
        cur = v;
    }
    Ok(SolutionReport {
        solution: s,
        value: cur,
        oracle_calls: calls_since(f, calls),
        ground: f.ground(),
        factor: 1.0,
        moves,
        iterations: Vec::new(),
        notes: Vec::new(),
    })
}
