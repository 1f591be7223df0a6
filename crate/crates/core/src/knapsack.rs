//! Submodular maximization under `k` knapsack constraints: grid local search
//! on the multilinear extension, heavy enumeration and randomized rounding.
//!
//! Fractional points are handled as integer grid levels `l_i`, with
//! `y_i = l_i / steps` and `steps = 1 / ζ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{subsets, ElementSet, SubmodularOracle};
use crate::matroid_search::{calls_since, SolutionReport};
use crate::multilinear::{eval_exact, expectation, sample_set, Evaluator, FractionalPoint};

/// Slack for comparing knapsack loads of grid points.
pub const LOAD_TOLERANCE: f64 = 1e-9;
/// Largest `n` for the full-grid neighborhood.
pub const FULL_GRID_CAP: usize = 6;

/// `k` knapsacks scaled to capacity 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackSystem {
    weights: Vec<Vec<f64>>,
}

impl KnapsackSystem {
    /// `weights[s][i]` is the weight of element `i` in knapsack `s`, capacity 1.
    pub fn new(weights: Vec<Vec<f64>>) -> Result<Self> {
        let n = weights.first().map_or(0, Vec::len);
        if weights.is_empty() {
            return Err(Error::BadParams("at least one knapsack is required".into()));
        }
        for (s, row) in weights.iter().enumerate() {
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    left: row.len(),
                    right: n,
                });
            }
            for (i, &w) in row.iter().enumerate() {
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(Error::NegativeWeight(w));
                }
                if w > 1.0 {
                    return Err(Error::SingletonInfeasible {
                        element: i,
                        knapsack: s,
                    });
                }
            }
        }
        Ok(Self { weights })
    }

    /// Divides each knapsack by its capacity.
    pub fn from_capacities(weights: Vec<Vec<f64>>, capacities: &[f64]) -> Result<Self> {
        if weights.len() != capacities.len() {
            return Err(Error::SizeMismatch {
                left: weights.len(),
                right: capacities.len(),
            });
        }
        let mut scaled = weights;
        for (row, &c) in scaled.iter_mut().zip(capacities) {
            if !(c > 0.0) {
                return Err(Error::BadParams(format!("capacity must be positive, got {c}")));
            }
            row.iter_mut().for_each(|w| *w /= c);
        }
        Self::new(scaled)
    }

    pub fn n(&self) -> usize {
        self.weights[0].len()
    }

    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn weight(&self, knapsack: usize, e: usize) -> f64 {
        self.weights[knapsack][e]
    }

    pub fn load(&self, knapsack: usize, s: ElementSet) -> f64 {
        s.iter().fold(0.0, |acc, e| acc + self.weights[knapsack][e])
    }

    /// `α(S) = max_s w^s(S)`.
    pub fn alpha(&self, s: ElementSet) -> f64 {
        (0..self.k()).map(|j| self.load(j, s)).fold(0.0, f64::max)
    }

    pub fn is_feasible(&self, s: ElementSet) -> bool {
        (0..self.k()).all(|j| self.load(j, s) <= 1.0)
    }

    pub fn point_loads(&self, y: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|row| row.iter().zip(y).map(|(w, v)| w * v).sum())
            .collect()
    }

    pub fn is_feasible_point(&self, y: &[f64]) -> bool {
        self.point_loads(y).iter().all(|&l| l <= 1.0 + LOAD_TOLERANCE)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Neighborhood {
    /// Decreased coordinates drop to 0 or one step, increased ones jump to
    /// their bound or the largest level that still fits.
    Menu,
    /// Every grid value for every coordinate of `A ∪ D`.
    FullGrid,
    /// Full grid when `n <= 6` and the grid has at most 16 steps, else the menu.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracSearchConfig {
    /// Grid resolution ζ; `None` picks `1/(4n²)`, or `1/(8n⁴)` when `faithful`.
    pub zeta: Option<f64>,
    pub faithful: bool,
    pub neighborhood: Neighborhood,
    /// Improvement slack; `None` picks `δ_outer / n²`.
    pub epsilon: Option<f64>,
    pub delta_outer: f64,
    /// Target loss η of the knapsack algorithm.
    pub eta: f64,
    /// Overrides `c = 16/η`.
    pub c: Option<f64>,
    /// Overrides the heavy threshold `1/(4c³k⁴)`.
    pub delta_heavy: Option<f64>,
    /// Overrides the rounding slack `1/(ck)`.
    pub eps_round: Option<f64>,
    pub trials: usize,
    pub heavy_cap: usize,
    pub seed: u64,
    pub evaluator: Evaluator,
}

impl Default for FracSearchConfig {
    fn default() -> Self {
        Self {
            zeta: None,
            faithful: false,
            neighborhood: Neighborhood::Auto,
            epsilon: None,
            delta_outer: 0.1,
            eta: 0.5,
            c: None,
            delta_heavy: None,
            eps_round: None,
            trials: 200,
            heavy_cap: 4,
            seed: 0,
            evaluator: Evaluator::default(),
        }
    }
}

impl FracSearchConfig {
    /// Number of grid steps `1/ζ` for ground size `n`.
    pub fn grid_steps(&self, n: usize) -> Result<u32> {
        let zeta = match self.zeta {
            Some(z) => z,
            None if self.faithful => {
                if n > 4 {
                    return Err(Error::BadParams(format!("faithful grid needs n <= 4, got {n}")));
                }
                1.0 / (8.0 * (n as f64).powi(4))
            }
            None => 1.0 / (4.0 * (n as f64).powi(2)),
        };
        if !(zeta > 0.0 && zeta <= 1.0) {
            return Err(Error::BadGrid(zeta));
        }
        let steps = (1.0 / zeta).round();
        if (steps * zeta - 1.0).abs() > 1e-9 || steps > f64::from(u32::MAX) {
            return Err(Error::BadGrid(zeta));
        }
        Ok(steps as u32)
    }

    pub fn epsilon_for(&self, n: usize) -> f64 {
        self.epsilon.unwrap_or(self.delta_outer / (n as f64).powi(2))
    }

    pub fn c(&self) -> f64 {
        self.c.unwrap_or(16.0 / self.eta)
    }

    pub fn delta_heavy(&self, k: usize) -> f64 {
        self.delta_heavy
            .unwrap_or_else(|| 1.0 / (4.0 * self.c().powi(3) * (k as f64).powi(4)))
    }

    pub fn eps_round(&self, k: usize) -> f64 {
        self.eps_round
            .unwrap_or_else(|| 1.0 / (self.c() * k as f64))
            .clamp(0.0, 1.0)
    }

    fn validate(&self) -> Result<()> {
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return Err(Error::BadParams(format!("epsilon must be positive, got {e}")));
            }
        }
        if !(self.eta > 0.0) {
            return Err(Error::BadParams(format!("eta must be positive, got {}", self.eta)));
        }
        if self.trials == 0 {
            return Err(Error::BadParams("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// A grid local optimum of `F` under the knapsacks and upper bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracOutcome {
    pub point: FractionalPoint,
    pub value: f64,
    pub moves: usize,
    pub steps: u32,
    pub epsilon: f64,
    /// Whether every accepted value came from exact evaluation.
    pub exact: bool,
    /// Set when the move budget `⌈ln n / ln(1+ε)⌉ + 1` ran out.
    pub capped: bool,
}

struct GridSearch<'a> {
    f: &'a SubmodularOracle,
    ks: &'a KnapsackSystem,
    ub: Vec<u32>,
    steps: u32,
    k: usize,
    evaluator: Evaluator,
}

impl GridSearch<'_> {
    fn point(&self, levels: &[u32]) -> FractionalPoint {
        FractionalPoint::from_levels(levels, self.steps).expect("levels stay within the grid")
    }

    fn level_loads(&self, levels: &[u32]) -> Vec<f64> {
        let steps = f64::from(self.steps);
        self.ks
            .weights
            .iter()
            .map(|row| row.iter().zip(levels).map(|(w, &l)| w * f64::from(l) / steps).sum())
            .collect()
    }

    fn fits(&self, levels: &[u32]) -> bool {
        self.level_loads(levels).iter().all(|&l| l <= 1.0 + LOAD_TOLERANCE)
    }

    /// Largest level of `e` that keeps every knapsack within capacity, given
    /// the other coordinates of `levels`.
    fn max_fit(&self, levels: &[u32], e: usize) -> u32 {
        let steps = f64::from(self.steps);
        let loads = self.level_loads(levels);
        let mut best = self.ub[e];
        for (s, row) in self.ks.weights.iter().enumerate() {
            let w = row[e];
            if w > 0.0 {
                let others = loads[s] - w * f64::from(levels[e]) / steps;
                let room = ((1.0 - others + LOAD_TOLERANCE) * steps / w).floor().max(0.0);
                best = best.min(room.min(f64::from(u32::MAX)) as u32);
            }
        }
        best
    }

    fn move_pairs(&self, levels: &[u32]) -> Vec<(ElementSet, ElementSet)> {
        let support: ElementSet = (0..levels.len()).filter(|&i| levels[i] > 0).collect();
        let raisable: ElementSet = (0..levels.len()).filter(|&i| levels[i] < self.ub[i]).collect();
        let mut pairs = Vec::new();
        for d in subsets(support).filter(|d| d.len() <= self.k) {
            for a in subsets(raisable.difference(d)).filter(|a| a.len() <= self.k) {
                if !(a.is_empty() && d.is_empty()) {
                    pairs.push((d, a));
                }
            }
        }
        pairs
    }

    /// Best move from the restricted menu with value above `threshold`.
    fn scan_menu(&self, levels: &[u32], threshold: f64) -> Result<Option<(Vec<u32>, f64)>> {
        let mut best: Option<(Vec<u32>, f64)> = None;
        for (d, a) in self.move_pairs(levels) {
            let mut lowered = vec![levels.to_vec()];
            for e in d.iter() {
                let mut next = Vec::new();
                for base in &lowered {
                    for v in [0, levels[e] - 1] {
                        let mut t = base.clone();
                        t[e] = v;
                        if !next.contains(&t) {
                            next.push(t);
                        }
                    }
                }
                lowered = next;
            }
            let mut candidates = lowered;
            for e in a.iter() {
                let mut next = Vec::new();
                for base in &candidates {
                    let fit = self.max_fit(base, e);
                    for v in [self.ub[e], fit] {
                        if v <= levels[e] {
                            continue;
                        }
                        let mut t = base.clone();
                        t[e] = v;
                        if !next.contains(&t) {
                            next.push(t);
                        }
                    }
                }
                candidates = next;
            }
            for t in candidates {
                if !self.fits(&t) {
                    continue;
                }
                let v = self.evaluator.value(self.f, &self.point(&t))?;
                if v > threshold && best.as_ref().is_none_or(|(_, b)| v > *b) {
                    best = Some((t, v));
                }
            }
        }
        Ok(best)
    }

    /// Best move over all grid values of `A ∪ D`. `F` is multilinear, so on
    /// each `(A, D)` pair it is interpolated from its `2^|A∪D|` corners.
    fn scan_full(&self, levels: &[u32], threshold: f64) -> Result<Option<(Vec<u32>, f64)>> {
        let steps = f64::from(self.steps);
        let y = self.point(levels);
        let mut best: Option<(Vec<u32>, f64)> = None;
        for (d, a) in self.move_pairs(levels) {
            let q: Vec<usize> = d.union(a).to_vec();
            let ranges: Vec<(u32, u32)> = q
                .iter()
                .map(|&e| {
                    if d.contains(e) {
                        (0, levels[e] - 1)
                    } else {
                        (levels[e] + 1, self.ub[e])
                    }
                })
                .collect();
            let mut corners = Vec::with_capacity(1 << q.len());
            for bits in 0u64..(1 << q.len()) {
                let mut c = y.coords().to_vec();
                for (j, &e) in q.iter().enumerate() {
                    c[e] = if bits >> j & 1 == 1 { 1.0 } else { 0.0 };
                }
                corners.push(eval_exact(self.f, &FractionalPoint::new(c)?)?);
            }
            let mut rest = levels.to_vec();
            q.iter().for_each(|&e| rest[e] = 0);
            let base_loads = self.level_loads(&rest);

            let mut cur: Vec<u32> = ranges.iter().map(|r| r.0).collect();
            'odometer: loop {
                let feasible = base_loads.iter().enumerate().all(|(s, &l)| {
                    let extra: f64 = q
                        .iter()
                        .zip(&cur)
                        .map(|(&e, &v)| self.ks.weights[s][e] * f64::from(v))
                        .sum();
                    l + extra / steps <= 1.0 + LOAD_TOLERANCE
                });
                if feasible {
                    let qy: Vec<f64> = cur.iter().map(|&v| f64::from(v) / steps).collect();
                    let v = expectation(&qy, |t| corners[t.bits() as usize])?;
                    if v > threshold && best.as_ref().is_none_or(|(_, b)| v > *b) {
                        let mut t = levels.to_vec();
                        q.iter().zip(&cur).for_each(|(&e, &l)| t[e] = l);
                        best = Some((t, v));
                    }
                }
                for j in 0..cur.len() {
                    if cur[j] < ranges[j].1 {
                        cur[j] += 1;
                        continue 'odometer;
                    }
                    cur[j] = ranges[j].0;
                }
                break;
            }
        }
        Ok(best)
    }
}

fn check_sizes(f: &SubmodularOracle, ks: &KnapsackSystem) -> Result<()> {
    if ks.n() != f.n() {
        return Err(Error::SizeMismatch {
            left: ks.n(),
            right: f.n(),
        });
    }
    Ok(())
}

/// Grid local search for `max F(y)` subject to `w^s · y <= 1` and `y <= u`.
///
/// Starts from `u_a` on `a = argmax u_i f({i})` and takes the best move while
/// it beats `(1+ε) F(y)`.
pub fn fractional_local_search(
    f: &SubmodularOracle,
    ks: &KnapsackSystem,
    upper: &[f64],
    cfg: &FracSearchConfig,
) -> Result<FracOutcome> {
    check_sizes(f, ks)?;
    cfg.validate()?;
    let n = f.n();
    if upper.len() != n {
        return Err(Error::SizeMismatch {
            left: upper.len(),
            right: n,
        });
    }
    let steps = cfg.grid_steps(n)?;
    let epsilon = cfg.epsilon_for(n);
    let mut ub = Vec::with_capacity(n);
    for (index, &u) in upper.iter().enumerate() {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::BadPoint {
                index,
                value: u,
                upper: 1.0,
            });
        }
        ub.push(((u * f64::from(steps)) + 1e-9).floor() as u32);
    }
    let full = match cfg.neighborhood {
        Neighborhood::FullGrid => {
            if n > FULL_GRID_CAP {
                return Err(Error::TooLarge {
                    size: n,
                    cap: FULL_GRID_CAP,
                });
            }
            true
        }
        Neighborhood::Menu => false,
        Neighborhood::Auto => n <= FULL_GRID_CAP && steps <= 16,
    };
    let search = GridSearch {
        f,
        ks,
        ub,
        steps,
        k: ks.k(),
        evaluator: if full { Evaluator::Exact } else { cfg.evaluator },
    };
    let upper_point: Vec<f64> = search.ub.iter().map(|&l| f64::from(l) / f64::from(steps)).collect();

    let mut start: Option<(usize, f64)> = None;
    for i in 0..n {
        let score = f64::from(search.ub[i]) / f64::from(steps) * f.evaluate(ElementSet::singleton(i))?;
        if score > 0.0 && start.is_none_or(|(_, b)| score > b) {
            start = Some((i, score));
        }
    }
    let mut levels = vec![0u32; n];
    if let Some((a, _)) = start {
        levels[a] = search.ub[a];
    }
    let mut value = search.evaluator.value(f, &search.point(&levels))?;
    let mut exact = search.evaluator.is_exact_for(&search.point(&levels));
    let budget = ((n as f64).ln() / epsilon.ln_1p()).ceil().max(0.0) as usize + 1;
    let mut moves = 0;
    let mut capped = false;
    if start.is_some() {
        loop {
            let threshold = (1.0 + epsilon) * value;
            let found = if full {
                search.scan_full(&levels, threshold)?
            } else {
                search.scan_menu(&levels, threshold)?
            };
            let Some((next, v)) = found else { break };
            if moves == budget {
                capped = true;
                break;
            }
            levels = next;
            value = v;
            exact &= search.evaluator.is_exact_for(&search.point(&levels));
            moves += 1;
        }
    }
    let point = search.point(&levels).with_upper(upper_point)?;
    debug_assert!(ks.is_feasible_point(point.coords()));
    Ok(FracOutcome {
        point,
        value,
        moves,
        steps,
        epsilon,
        exact,
        capped,
    })
}

/// Whether some admissible grid move beats `(1+ε) F(y)`; scans the full grid.
pub fn find_grid_improvement(
    f: &SubmodularOracle,
    ks: &KnapsackSystem,
    y: &FractionalPoint,
    epsilon: f64,
) -> Result<Option<(FractionalPoint, f64)>> {
    check_sizes(f, ks)?;
    let steps = y
        .grid_steps()
        .ok_or_else(|| Error::BadParams("point is not grid tagged".into()))?;
    let levels = y.levels().expect("grid tagged");
    let ub: Vec<u32> = match y.upper() {
        Some(u) => u
            .iter()
            .map(|&u| (u * f64::from(steps) + 1e-9).floor() as u32)
            .collect(),
        None => vec![steps; y.len()],
    };
    let search = GridSearch {
        f,
        ks,
        ub,
        steps,
        k: ks.k(),
        evaluator: Evaluator::Exact,
    };
    let value = eval_exact(f, y)?;
    Ok(search
        .scan_full(&levels, (1.0 + epsilon) * value)?
        .map(|(l, v)| (search.point(&l), v)))
}

/// Output of [`solve_fractional`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalSolution {
    pub point: FractionalPoint,
    pub value: f64,
    pub first: FracOutcome,
    pub second: FracOutcome,
    /// Best allowed singleton and its value.
    pub best_singleton: Option<(usize, f64)>,
}

/// Two grid local searches, the second under bounds `u = 1 - y_1`, and the
/// best singleton; returns the best of the three.
pub fn solve_fractional(
    f: &SubmodularOracle,
    ks: &KnapsackSystem,
    cfg: &FracSearchConfig,
) -> Result<FractionalSolution> {
    solve_fractional_within(f, ks, f.ground(), cfg)
}

/// [`solve_fractional`] with elements outside `allowed` held at 0.
pub fn solve_fractional_within(
    f: &SubmodularOracle,
    ks: &KnapsackSystem,
    allowed: ElementSet,
    cfg: &FracSearchConfig,
) -> Result<FractionalSolution> {
    let n = f.n();
    let upper: Vec<f64> = (0..n).map(|i| if allowed.contains(i) { 1.0 } else { 0.0 }).collect();
    let first = fractional_local_search(f, ks, &upper, cfg)?;
    let upper2: Vec<f64> = first
        .point
        .coords()
        .iter()
        .zip(&upper)
        .map(|(&y, &u)| (u - y).max(0.0))
        .collect();
    let second = fractional_local_search(f, ks, &upper2, cfg)?;

    let mut best_singleton: Option<(usize, f64)> = None;
    for i in allowed.intersection(f.ground()).iter() {
        let v = f.evaluate(ElementSet::singleton(i))?;
        if best_singleton.is_none_or(|(_, b)| v > b) {
            best_singleton = Some((i, v));
        }
    }
    let (mut point, mut value) = (first.point.clone(), first.value);
    if second.value > value {
        (point, value) = (second.point.clone(), second.value);
    }
    if let Some((i, v)) = best_singleton {
        if v > value {
            (point, value) = (FractionalPoint::indicator(n, ElementSet::singleton(i)), v);
        }
    }
    Ok(FractionalSolution {
        point,
        value,
        first,
        second,
        best_singleton,
    })
}

/// Splits the ground set into heavy elements (weight `>= δ` in some
/// knapsack) and light ones.
pub fn classify_heavy_light(ks: &KnapsackSystem, delta: f64) -> Result<(ElementSet, ElementSet)> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::BadParams(format!(
            "heavy threshold must lie in (0, 1], got {delta}"
        )));
    }
    let heavy: ElementSet = (0..ks.n())
        .filter(|&e| (0..ks.k()).any(|s| ks.weight(s, e) >= delta))
        .collect();
    Ok((heavy, ElementSet::full(ks.n()).difference(heavy)))
}

/// Best feasible subset of `heavy` with at most `cap` elements.
pub fn enumerate_heavy(
    f: &SubmodularOracle,
    ks: &KnapsackSystem,
    heavy: ElementSet,
    cap: usize,
) -> Result<SolutionReport> {
    check_sizes(f, ks)?;
    let calls = f.calls();
    let mut best = (ElementSet::EMPTY, f.evaluate(ElementSet::EMPTY)?);
    for s in subsets(heavy) {
        if s.is_empty() || s.len() > cap || !ks.is_feasible(s) {
            continue;
        }
        let v = f.evaluate(s)?;
        if v > best.1 || (v == best.1 && s.lex_cmp(best.0).is_lt()) {
            best = (s, v);
        }
    }
    let mut r = SolutionReport::plain(best.0, best.1, heavy);
    r.oracle_calls = calls_since(f, calls);
    Ok(r)
}

/// Per-trial outcome of [`randomized_round`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingReport {
    pub best: SolutionReport,
    /// `f(S)` per trial, 0 for a trial that overflowed a knapsack.
    pub trial_values: Vec<f64>,
    /// `α(S)` per trial.
    pub alphas: Vec<f64>,
    pub failures: usize,
}

impl RoundingReport {
    pub fn mean_value(&self) -> f64 {
        self.trial_values.iter().sum::<f64>() / self.trial_values.len() as f64
    }

    /// Fraction of trials with `α(S) >= a`.
    pub fn overflow_frequency(&self, a: f64) -> f64 {
        self.alphas.iter().filter(|&&x| x >= a).count() as f64 / self.alphas.len() as f64
    }
}

/// Includes each `e` with probability `(1-ε) x_e`, `trials` times; trial `t`
/// draws from stream `t` of `seed`. Returns the best feasible draw.
pub fn randomized_round(
    f: &SubmodularOracle,
    x: &FractionalPoint,
    ks: &KnapsackSystem,
    eps_round: f64,
    trials: usize,
    seed: u64,
) -> Result<RoundingReport> {
    check_sizes(f, ks)?;
    if x.len() != f.n() {
        return Err(Error::SizeMismatch {
            left: x.len(),
            right: f.n(),
        });
    }
    if !(0.0..=1.0).contains(&eps_round) {
        return Err(Error::BadParams(format!(
            "rounding slack must lie in [0, 1], got {eps_round}"
        )));
    }
    if trials == 0 {
        return Err(Error::BadParams("trials must be at least 1".into()));
    }
    let calls = f.calls();
    let scaled: Vec<f64> = x.coords().iter().map(|&v| (1.0 - eps_round) * v).collect();
    let draws = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = sample_set(&scaled, seed, t);
            let alpha = ks.alpha(s);
            let value = if ks.is_feasible(s) { Some(f.evaluate(s)?) } else { None };
            Ok((s, alpha, value))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = (ElementSet::EMPTY, f.evaluate(ElementSet::EMPTY)?);
    let mut trial_values = Vec::with_capacity(trials);
    let mut alphas = Vec::with_capacity(trials);
    let mut failures = 0;
    for (s, alpha, value) in draws {
        alphas.push(alpha);
        match value {
            Some(v) => {
                trial_values.push(v);
                if v > best.1 {
                    best = (s, v);
                }
            }
            None => {
                failures += 1;
                trial_values.push(0.0);
            }
        }
    }
    let mut report = SolutionReport::plain(best.0, best.1, f.ground());
    report.oracle_calls = calls_since(f, calls);
    Ok(RoundingReport {
        best: report,
        trial_values,
        alphas,
        failures,
    })
}

/// Better of the heavy enumeration and the rounded fractional solution on
/// the light elements. `iterations` holds the two branches.
pub fn knapsack_algorithm(f: &SubmodularOracle, ks: &KnapsackSystem, cfg: &FracSearchConfig) -> Result<SolutionReport> {
    check_sizes(f, ks)?;
    cfg.validate()?;
    let calls = f.calls();
    let k = ks.k();
    let delta = cfg.delta_heavy(k);
    let (heavy, light) = classify_heavy_light(ks, delta.min(1.0))?;
    let full_cap = (k as f64 / delta).floor();
    let cap = if full_cap < cfg.heavy_cap as f64 {
        full_cap as usize
    } else {
        cfg.heavy_cap
    };
    let mut notes = vec![format!("delta = {delta}"), format!("heavy = {heavy}")];
    if full_cap > cfg.heavy_cap as f64 && heavy.len() > cfg.heavy_cap {
        notes.push(format!("heavy enumeration capped at {cap}; guarantee is conditional"));
    }
    let heavy_branch = enumerate_heavy(f, ks, heavy, cap)?;

    let light_branch = if light.is_empty() {
        SolutionReport::plain(ElementSet::EMPTY, f.evaluate(ElementSet::EMPTY)?, light)
    } else {
        let frac = solve_fractional_within(f, ks, light, cfg)?;
        notes.push(format!("F(x) = {}", frac.value));
        let mut r = randomized_round(f, &frac.point, ks, cfg.eps_round(k), cfg.trials, cfg.seed)?.best;
        r.ground = light;
        r
    };
    let pick_light = light_branch.value > heavy_branch.value;
    let chosen = if pick_light { &light_branch } else { &heavy_branch };
    if !ks.is_feasible(chosen.solution) {
        return Err(Error::InternalContradiction(format!(
            "{} violates a knapsack",
            chosen.solution
        )));
    }
    notes.push(if pick_light { "light".into() } else { "heavy".into() });
    Ok(SolutionReport {
        solution: chosen.solution,
        value: chosen.value,
        oracle_calls: calls_since(f, calls),
        ground: f.ground(),
        factor: 1.0,
        moves: Vec::new(),
        iterations: vec![heavy_branch, light_branch],
        notes,
    })
}
