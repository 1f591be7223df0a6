//! Exhaustive ground truth: brute-force optima, local-optimality
//! inequality certificates and approximation ratios.
//!
//! Everything here evaluates through [`SubmodularOracle::compute`], so
//! checking a solution never changes its reported oracle cost.

use serde::{Deserialize, Serialize};

use crate::base_search::BaseConstraint;
use crate::error::{Error, Result};
use crate::ground::{subsets, ElementSet, SubmodularOracle};
use crate::knapsack::KnapsackSystem;
use crate::matroid::MatroidOracle;
use crate::multilinear::{expectation, FractionalPoint};

/// Largest ground set for [`brute_force_opt`].
pub const BRUTE_FORCE_CAP: usize = 22;
/// Largest ground set for the set-inequality certificates.
pub const CERTIFY_CAP: usize = 14;
/// Largest ground set for the fractional certificate.
pub const FRACTIONAL_CERTIFY_CAP: usize = 12;
/// Relative slack for floating-point comparisons in certificates and ratios.
pub const TOLERANCE: f64 = 1e-9;

/// The feasible family of an instance.
#[derive(Clone, Debug, PartialEq)]
pub enum FeasibilityPredicate {
    Matroids(Vec<MatroidOracle>),
    Knapsacks(KnapsackSystem),
    Base(BaseConstraint),
    Cardinality { n: usize, c: usize },
}

impl FeasibilityPredicate {
    pub fn is_feasible(&self, s: ElementSet) -> bool {
        match self {
            Self::Matroids(ms) => ms.iter().all(|m| m.is_independent(s)),
            Self::Knapsacks(ks) => ks.is_feasible(s),
            Self::Base(bc) => bc.is_feasible(s),
            Self::Cardinality { c, .. } => s.len() == *c,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Matroids(_) => "matroids",
            Self::Knapsacks(_) => "knapsacks",
            Self::Base(_) => "base",
            Self::Cardinality { .. } => "cardinality",
        }
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::TooLarge { size: n, cap });
    }
    Ok(())
}

/// Maximum of `f` over feasible sets, ties to the lexicographically smallest
/// set. `None` when nothing is feasible.
pub fn brute_force_opt(f: &SubmodularOracle, feas: &FeasibilityPredicate) -> Result<Option<(ElementSet, f64)>> {
    check_cap(f.n(), BRUTE_FORCE_CAP)?;
    let mut best: Option<(ElementSet, f64)> = None;
    for s in subsets(f.ground()) {
        if !feas.is_feasible(s) {
            continue;
        }
        let v = f.compute(s)?;
        let better = match best {
            None => true,
            Some((b, bv)) => v > bv || (v == bv && s.lex_cmp(b).is_lt()),
        };
        if better {
            best = Some((s, v));
        }
    }
    Ok(best)
}

/// Outcome of an inequality scan over comparison sets `C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub pass: bool,
    /// Smallest `lhs - rhs` seen.
    pub worst_slack: f64,
    /// The `C` attaining `worst_slack` when it is a violation.
    pub violation: Option<ElementSet>,
    pub checked: usize,
}

impl Certificate {
    fn new() -> Self {
        Self {
            pass: true,
            worst_slack: f64::INFINITY,
            violation: None,
            checked: 0,
        }
    }

    fn record(&mut self, lhs: f64, rhs: f64, c: ElementSet) {
        self.checked += 1;
        let slack = lhs - rhs;
        let violated = slack < -TOLERANCE * lhs.abs().max(rhs.abs()).max(1.0);
        if slack < self.worst_slack {
            self.worst_slack = slack;
            if violated {
                self.violation = Some(c);
            }
        }
        if violated {
            self.pass = false;
        }
    }
}

/// `(1+ε)(k+1) f(S) >= f(S ∪ C) + k f(S ∩ C)` for every `C` independent in
/// all `k` matroids.
pub fn certify_matroid_local_lemma(
    f: &SubmodularOracle,
    s: ElementSet,
    matroids: &[MatroidOracle],
    epsilon: f64,
) -> Result<Certificate> {
    certify_matroid_local_lemma_within(f, s, matroids, epsilon, f.ground())
}

/// [`certify_matroid_local_lemma`] for a search run on `ground`: only
/// `C ⊆ ground` are compared.
pub fn certify_matroid_local_lemma_within(
    f: &SubmodularOracle,
    s: ElementSet,
    matroids: &[MatroidOracle],
    epsilon: f64,
    ground: ElementSet,
) -> Result<Certificate> {
    check_cap(f.n(), CERTIFY_CAP)?;
    let k = matroids.len() as f64;
    let lhs = (1.0 + epsilon) * (k + 1.0) * f.compute(s)?;
    let mut cert = Certificate::new();
    for c in subsets(ground.intersection(f.ground())) {
        if matroids.iter().all(|m| m.is_independent(c)) {
            cert.record(lhs, f.compute(s.union(c))? + k * f.compute(s.intersection(c))?, c);
        }
    }
    Ok(cert)
}

/// `2(1+ε) f(S) >= f(S ∪ C) + f(S ∩ C)` for every independent `C` with
/// `|C| = |S|`.
pub fn certify_swap_lemma(
    f: &SubmodularOracle,
    s: ElementSet,
    matroid: &MatroidOracle,
    epsilon: f64,
) -> Result<Certificate> {
    check_cap(f.n(), CERTIFY_CAP)?;
    let lhs = 2.0 * (1.0 + epsilon) * f.compute(s)?;
    let mut cert = Certificate::new();
    for c in subsets(f.ground()) {
        if c.len() == s.len() && matroid.is_independent(c) {
            cert.record(lhs, f.compute(s.union(c))? + f.compute(s.intersection(c))?, c);
        }
    }
    Ok(cert)
}

/// `(1+ε) k f(S) >= (1 - 1/p) f(S ∪ C) + (k-1) f(S ∩ C)` for every `C`
/// independent in all `k` partition matroids.
pub fn certify_partition_lemma(
    f: &SubmodularOracle,
    s: ElementSet,
    matroids: &[MatroidOracle],
    p: usize,
    epsilon: f64,
) -> Result<Certificate> {
    certify_partition_lemma_within(f, s, matroids, p, epsilon, f.ground())
}

/// [`certify_partition_lemma`] restricted to `C ⊆ ground`.
pub fn certify_partition_lemma_within(
    f: &SubmodularOracle,
    s: ElementSet,
    matroids: &[MatroidOracle],
    p: usize,
    epsilon: f64,
    ground: ElementSet,
) -> Result<Certificate> {
    check_cap(f.n(), CERTIFY_CAP)?;
    if p == 0 {
        return Err(Error::BadParams("p must be at least 1".into()));
    }
    if let Some(i) = matroids.iter().position(|m| !m.is_partition()) {
        return Err(Error::NotPartition(i));
    }
    let k = matroids.len() as f64;
    let lhs = (1.0 + epsilon) * k * f.compute(s)?;
    let shrink = 1.0 - 1.0 / p as f64;
    let mut cert = Certificate::new();
    for c in subsets(ground.intersection(f.ground())) {
        if matroids.iter().all(|m| m.is_independent(c)) {
            cert.record(
                lhs,
                shrink * f.compute(s.union(c))? + (k - 1.0) * f.compute(s.intersection(c))?,
                c,
            );
        }
    }
    Ok(cert)
}

fn exact_value(f: &SubmodularOracle, y: &FractionalPoint) -> Result<f64> {
    expectation(y.coords(), |s| f.compute(s).expect("set within the ground set"))
}

/// `(2 + 2nε) F(y) >= F(y ∧ x) + F(y ∨ x) - f_max/(2n)` for every feasible
/// integral `x` within the upper bounds of `y`, plus the `extra` points.
///
/// The reported `violation` is the support of the offending `x`.
pub fn certify_fractional_lemma(
    f: &SubmodularOracle,
    y: &FractionalPoint,
    ks: &KnapsackSystem,
    epsilon: f64,
    extra: &[FractionalPoint],
) -> Result<Certificate> {
    let n = f.n();
    check_cap(n, FRACTIONAL_CERTIFY_CAP)?;
    if y.len() != n {
        return Err(Error::SizeMismatch {
            left: y.len(),
            right: n,
        });
    }
    let f_max = (0..n).try_fold(0.0f64, |m, i| {
        Ok::<_, Error>(m.max(f.compute(ElementSet::singleton(i))?))
    })?;
    let lhs = (2.0 + 2.0 * n as f64 * epsilon) * exact_value(f, y)?;
    let upper = y.upper().map(<[f64]>::to_vec).unwrap_or_else(|| vec![1.0; n]);
    let within = |x: &FractionalPoint| x.coords().iter().zip(&upper).all(|(&a, &u)| a <= u + TOLERANCE);

    let mut cert = Certificate::new();
    let integral = subsets(f.ground())
        .filter(|&s| ks.is_feasible(s))
        .map(|s| FractionalPoint::indicator(n, s));
    for x in integral.chain(extra.iter().cloned()) {
        if !within(&x) || !ks.is_feasible_point(x.coords()) {
            continue;
        }
        let rhs = exact_value(f, &y.meet(&x))? + exact_value(f, &y.join(&x))? - f_max / (2.0 * n as f64);
        let support: ElementSet = (0..n).filter(|&i| x.coords()[i] > 0.0).collect();
        cert.record(lhs, rhs, support);
    }
    Ok(cert)
}

/// Algorithm value against the brute-force optimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub value: f64,
    pub opt: f64,
    pub ratio: f64,
    pub threshold: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RatioReport {
    /// `ratio = value / opt` (1 when both are 0); passes when
    /// `ratio >= threshold - tolerance`.
    pub fn new(value: f64, opt: f64, threshold: f64, tolerance: f64) -> Self {
        let (ratio, pass) = if opt > 0.0 {
            let r = value / opt;
            (r, r >= threshold - tolerance)
        } else {
            let zero = value <= TOLERANCE;
            (if zero { 1.0 } else { f64::INFINITY }, zero)
        };
        Self {
            value,
            opt,
            ratio,
            threshold,
            pass,
            fingerprint: None,
            seed: None,
        }
    }

    pub fn with_origin(mut self, fingerprint: impl Into<String>, seed: u64) -> Self {
        self.fingerprint = Some(fingerprint.into());
        self.seed = Some(seed);
        self
    }
}

/// Compares `value` with the brute-force optimum of `f` over `feas`.
pub fn measure_ratio(
    value: f64,
    f: &SubmodularOracle,
    feas: &FeasibilityPredicate,
    threshold: f64,
    tolerance: f64,
) -> Result<RatioReport> {
    let opt = brute_force_opt(f, feas)?.map_or(0.0, |(_, v)| v);
    Ok(RatioReport::new(value, opt, threshold, tolerance))
}
