//! Maximization over the bases of a matroid.

use crate::error::{Error, Result};
use crate::ground::{complement_oracle, ElementSet, SubmodularOracle};
use crate::matroid::{find_two_disjoint_bases, MatroidOracle};
use crate::matroid_search::{calls_since, procedure_b, Move, MoveRecord, SearchConfig, SolutionReport};

/// Feasible sets are the bases of `matroid`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseConstraint {
    matroid: MatroidOracle,
    full_rank: usize,
}

impl BaseConstraint {
    pub fn new(matroid: MatroidOracle) -> Self {
        let full_rank = matroid.full_rank();
        Self { matroid, full_rank }
    }

    pub fn matroid(&self) -> &MatroidOracle {
        &self.matroid
    }

    pub fn full_rank(&self) -> usize {
        self.full_rank
    }

    pub fn is_feasible(&self, s: ElementSet) -> bool {
        s.len() == self.full_rank && self.matroid.is_independent(s)
    }
}

fn check_size(f: &SubmodularOracle, bc: &BaseConstraint) -> Result<()> {
    if bc.matroid.n() != f.n() {
        return Err(Error::SizeMismatch {
            left: bc.matroid.n(),
            right: f.n(),
        });
    }
    Ok(())
}

/// Matroid greedy by singleton value, highest first (ties to the lowest id).
fn greedy_start(f: &SubmodularOracle, bc: &BaseConstraint) -> Result<ElementSet> {
    let mut order = Vec::with_capacity(f.n());
    for e in bc.matroid.ground().iter() {
        order.push((e, f.evaluate(ElementSet::singleton(e))?));
    }
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(bc.matroid.greedy_basis(order.into_iter().map(|(e, _)| e)))
}

/// Swap-only local search over bases, started from a value-greedy base.
pub fn swap_base_search(f: &SubmodularOracle, bc: &BaseConstraint, cfg: &SearchConfig) -> Result<SolutionReport> {
    check_size(f, bc)?;
    cfg.validate()?;
    let calls = f.calls();
    let start = greedy_start(f, bc)?;
    let mut report = swap_base_search_from(f, bc, start, cfg)?;
    report.oracle_calls = calls_since(f, calls);
    Ok(report)
}

/// Swap-only local search from the given base: replace `e ∈ S` by `d ∉ S`
/// while the result stays a base and `f` grows by the improvement factor.
pub fn swap_base_search_from(
    f: &SubmodularOracle,
    bc: &BaseConstraint,
    start: ElementSet,
    cfg: &SearchConfig,
) -> Result<SolutionReport> {
    check_size(f, bc)?;
    cfg.validate()?;
    if !bc.is_feasible(start) {
        return Err(Error::BadParams(format!("start {start} is not a base")));
    }
    let calls = f.calls();
    let factor = cfg.improvement_factor(f.n());
    let outside = bc.matroid.ground();
    let mut s = start;
    let mut cur = f.evaluate(s)?;
    let mut moves = Vec::new();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for d in outside.difference(s).iter() {
            for e in s.iter() {
                let t = s.without(e).with(d);
                if !bc.matroid.is_independent(t) {
                    continue;
                }
                let v = f.evaluate(t)?;
                // scan order (d, e) ascending gives the lexicographic tie-break
                if v > factor * cur && v > cur && best.is_none_or(|(_, _, b)| v > b) {
                    best = Some((d, e, v));
                }
            }
        }
        let Some((d, e, v)) = best else { break };
        if moves.len() >= cfg.move_cap {
            return Err(Error::BadParams(format!("move cap {} reached", cfg.move_cap)));
        }
        moves.push(MoveRecord {
            mv: Move::Exchange {
                added: vec![d],
                removed: vec![e],
            },
            before: cur,
            after: v,
        });
        s = s.without(e).with(d);
        cur = v;
    }
    Ok(SolutionReport {
        solution: s,
        value: cur,
        oracle_calls: calls_since(f, calls),
        ground: f.ground(),
        factor,
        moves,
        iterations: Vec::new(),
        notes: Vec::new(),
    })
}

/// Best of the swap optimum `S1` and `S2 ∪ B1`, `S2 ∪ B2`, where `S2` is a
/// delete/exchange local optimum on `V \ S1` and `B1`, `B2` are disjoint
/// bases of the matroid with `S2` contracted.
///
/// `iterations` holds the four candidate reports in that order.
pub fn two_base_algorithm(f: &SubmodularOracle, bc: &BaseConstraint, cfg: &SearchConfig) -> Result<SolutionReport> {
    check_size(f, bc)?;
    cfg.validate()?;
    let m = &bc.matroid;
    if find_two_disjoint_bases(m)?.is_none() {
        return Err(Error::NoTwoBases);
    }
    let calls = f.calls();
    let s1 = swap_base_search(f, bc, cfg)?;
    let rest = m.ground().difference(s1.solution);
    let s2 = procedure_b(f, rest, std::slice::from_ref(m), cfg)?;
    let contracted = m.contract(s2.solution)?;
    let (b1, b2) = find_two_disjoint_bases(&contracted)?.ok_or_else(|| {
        Error::InternalContradiction(format!("contracting {} lost the two disjoint bases", s2.solution))
    })?;
    let mut candidates = vec![s1, s2.clone()];
    for b in [b1, b2] {
        let t = s2.solution.union(b);
        if !bc.is_feasible(t) {
            return Err(Error::InternalContradiction(format!("{t} is not a base")));
        }
        candidates.push(SolutionReport::plain(t, f.evaluate(t)?, m.ground()));
    }
    // S2 alone is not a base; it only seeds the last two candidates
    let pick = [0, 2, 3].into_iter().fold(0, |b, i| {
        if candidates[i].value > candidates[b].value {
            i
        } else {
            b
        }
    });
    let chosen = &candidates[pick];
    Ok(SolutionReport {
        solution: chosen.solution,
        value: chosen.value,
        oracle_calls: calls_since(f, calls),
        ground: f.ground(),
        factor: cfg.improvement_factor(f.n()),
        moves: Vec::new(),
        notes: vec![["S1", "S2", "S2+B1", "S2+B2"][pick].to_string()],
        iterations: candidates,
    })
}

/// Maximize `f` over sets of size exactly `c`, via the uniform matroid of
/// rank `c` or, when `c > n/2`, via the complement function at rank `n - c`.
pub fn exact_cardinality(f: &SubmodularOracle, c: usize, cfg: &SearchConfig) -> Result<SolutionReport> {
    let n = f.n();
    if c > n {
        return Err(Error::BadParams(format!("cardinality {c} exceeds n = {n}")));
    }
    let calls = f.calls();
    if c == 0 {
        let mut r = SolutionReport::plain(ElementSet::EMPTY, f.evaluate(ElementSet::EMPTY)?, f.ground());
        r.oracle_calls = calls_since(f, calls);
        return Ok(r);
    }
    if 2 * c <= n {
        return two_base_algorithm(f, &BaseConstraint::new(MatroidOracle::uniform(n, c)?), cfg);
    }
    let g = complement_oracle(f);
    let inner = two_base_algorithm(&g, &BaseConstraint::new(MatroidOracle::uniform(n, n - c)?), cfg)?;
    let solution = inner.solution.complement(n);
    let value = f.evaluate(solution)?;
    let mut calls = calls_since(f, calls);
    calls.requests += inner.oracle_calls.requests;
    calls.distinct += inner.oracle_calls.distinct;
    Ok(SolutionReport {
        solution,
        value,
        oracle_calls: calls,
        ground: f.ground(),
        factor: inner.factor,
        moves: Vec::new(),
        notes: vec!["complement".into()],
        iterations: vec![inner],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::{build_cut, build_table, Edge};

    fn c4() -> SubmodularOracle {
        build_cut(4, (0..4).map(|i| Edge::new(i, (i + 1) % 4, 1.0)).collect(), false).unwrap()
    }

    fn bc(n: usize, r: usize) -> BaseConstraint {
        BaseConstraint::new(MatroidOracle::uniform(n, r).unwrap())
    }

    #[test]
    fn swap_on_c4() {
        let f = c4();
        let cfg = SearchConfig::default();
        assert_eq!(swap_base_search(&f, &bc(4, 2), &cfg).unwrap().value, 4.0);
        assert_eq!(swap_base_search(&f, &bc(4, 1), &cfg).unwrap().value, 2.0);
    }

    #[test]
    fn swap_improves_a_bad_start() {
        let f = c4();
        let r = swap_base_search_from(&f, &bc(4, 2), ElementSet::from_ids([0, 1]), &SearchConfig::default()).unwrap();
        assert_eq!(r.value, 4.0);
        assert_eq!(r.moves.len(), 1);
        assert!(swap_base_search_from(&f, &bc(4, 2), ElementSet::singleton(0), &SearchConfig::default()).is_err());
    }

    #[test]
    fn two_base_on_c4() {
        let f = c4();
        let r = two_base_algorithm(&f, &bc(4, 2), &SearchConfig::default()).unwrap();
        assert_eq!(r.value, 4.0);
        assert_eq!(r.iterations.len(), 4);
        let (s1, s2) = (r.iterations[0].solution, r.iterations[1].solution);
        assert!(s1.is_disjoint(s2));
        for c in &r.iterations[2..] {
            assert!(s2.is_subset(c.solution));
            assert_eq!(c.solution.len(), 2);
        }
    }

    #[test]
    fn two_base_needs_two_bases() {
        let f = c4();
        assert_eq!(
            two_base_algorithm(&f, &bc(4, 3), &SearchConfig::default()).unwrap_err(),
            Error::NoTwoBases
        );
    }

    #[test]
    fn zero_function() {
        let f = build_table(4, vec![0.0; 16]).unwrap();
        let r = two_base_algorithm(&f, &bc(4, 2), &SearchConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.solution.len(), 2);
    }

    #[test]
    fn exact_cardinality_cases() {
        let f = c4();
        let cfg = SearchConfig::default();
        let r = exact_cardinality(&f, 0, &cfg).unwrap();
        assert_eq!((r.solution, r.value), (ElementSet::EMPTY, 0.0));
        let r = exact_cardinality(&f, 2, &cfg).unwrap();
        assert_eq!((r.solution.len(), r.value), (2, 4.0));
        let r = exact_cardinality(&f, 3, &cfg).unwrap();
        assert_eq!((r.solution.len(), r.value), (3, 2.0));
        let r = exact_cardinality(&f, 4, &cfg).unwrap();
        assert_eq!(r.solution, f.ground());
        assert!(exact_cardinality(&f, 5, &cfg).is_err());
    }
}
