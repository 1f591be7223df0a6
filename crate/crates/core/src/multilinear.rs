//! The multilinear extension `F(y) = E[f(R)]`, where `R` contains each
//! element `i` independently with probability `y_i`.
//!
//! Exact evaluation enumerates subsets of the fractional coordinates in
//! Gray-code order. Inclusion probabilities are read from two precomputed
//! half tables (low and high halves of the fractional coordinates), so each
//! step costs one multiplication and the weights never accumulate drift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{ElementSet, FunctionKind, SubmodularOracle};

/// Maximum number of strictly fractional coordinates for exact evaluation.
pub const FRACTIONAL_CAP: usize = 24;
/// Maximum total number of copies in a lifted ground set.
pub const LIFT_CAP: usize = 20;

/// A point of `[0,1]^n`, optionally aligned to a grid of step `1/steps` and
/// carrying per-coordinate upper bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionalPoint {
    coords: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid_steps: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<Vec<f64>>,
}

impl FractionalPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for (index, &value) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::BadPoint {
                    index,
                    value,
                    upper: 1.0,
                });
            }
        }
        Ok(Self {
            coords,
            grid_steps: None,
            upper: None,
        })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            coords: vec![0.0; n],
            grid_steps: None,
            upper: None,
        }
    }

    pub fn indicator(n: usize, s: ElementSet) -> Self {
        Self {
            coords: (0..n).map(|i| if s.contains(i) { 1.0 } else { 0.0 }).collect(),
            grid_steps: None,
            upper: None,
        }
    }

    /// Point with `coords[i] = levels[i] / steps`.
    pub fn from_levels(levels: &[u32], steps: u32) -> Result<Self> {
        if steps == 0 {
            return Err(Error::BadGrid(f64::INFINITY));
        }
        let coords = levels
            .iter()
            .enumerate()
            .map(|(index, &l)| {
                if l > steps {
                    Err(Error::BadPoint {
                        index,
                        value: f64::from(l) / f64::from(steps),
                        upper: 1.0,
                    })
                } else {
                    Ok(f64::from(l) / f64::from(steps))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            coords,
            grid_steps: Some(steps),
            upper: None,
        })
    }

    pub fn with_upper(mut self, upper: Vec<f64>) -> Result<Self> {
        if upper.len() != self.coords.len() {
            return Err(Error::SizeMismatch {
                left: upper.len(),
                right: self.coords.len(),
            });
        }
        for (index, (&y, &u)) in self.coords.iter().zip(&upper).enumerate() {
            if !(0.0..=1.0).contains(&u) || y > u + 1e-12 {
                return Err(Error::BadPoint {
                    index,
                    value: y,
                    upper: u,
                });
            }
        }
        self.upper = Some(upper);
        Ok(self)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn grid_steps(&self) -> Option<u32> {
        self.grid_steps
    }

    pub fn upper(&self) -> Option<&[f64]> {
        self.upper.as_deref()
    }

    /// Grid levels, if the point is grid tagged.
    pub fn levels(&self) -> Option<Vec<u32>> {
        let steps = self.grid_steps?;
        Some(
            self.coords
                .iter()
                .map(|&c| (c * f64::from(steps)).round() as u32)
                .collect(),
        )
    }

    /// Coordinate-wise minimum.
    pub fn meet(&self, other: &Self) -> Self {
        Self::zip_with(self, other, f64::min)
    }

    /// Coordinate-wise maximum.
    pub fn join(&self, other: &Self) -> Self {
        Self::zip_with(self, other, f64::max)
    }

    fn zip_with(a: &Self, b: &Self, op: fn(f64, f64) -> f64) -> Self {
        Self {
            coords: a.coords.iter().zip(&b.coords).map(|(&x, &y)| op(x, y)).collect(),
            grid_steps: None,
            upper: None,
        }
    }

    /// Elements with coordinate exactly 1.
    pub fn ones(&self) -> ElementSet {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, &c)| c >= 1.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Elements with a strictly fractional coordinate.
    pub fn fractional_support(&self) -> ElementSet {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0.0 && c < 1.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// `Σ_S f(S) Π_{i∈S} y_i Π_{j∉S} (1 - y_j)`, enumerating only subsets of the
/// strictly fractional coordinates. Coordinates equal to 1 are always included.
pub fn expectation<F: FnMut(ElementSet) -> f64>(coords: &[f64], mut f: F) -> Result<f64> {
    let mut base = ElementSet::EMPTY;
    let mut frac: Vec<usize> = Vec::new();
    for (i, &y) in coords.iter().enumerate() {
        if y >= 1.0 {
            base.insert(i);
        } else if y > 0.0 {
            frac.push(i);
        }
    }
    let m = frac.len();
    if m > FRACTIONAL_CAP {
        return Err(Error::TooManyFractional {
            got: m,
            cap: FRACTIONAL_CAP,
        });
    }
    if m == 0 {
        return Ok(f(base));
    }

    let half = m / 2;
    let table = |idx: &[usize]| -> Vec<f64> {
        let mut t = vec![1.0f64];
        for &i in idx {
            let y = coords[i];
            let mut next = Vec::with_capacity(t.len() * 2);
            next.extend(t.iter().map(|w| w * (1.0 - y)));
            next.extend(t.iter().map(|w| w * y));
            t = next;
        }
        t
    };
    let lo = table(&frac[..half]);
    let hi = table(&frac[half..]);
    let lo_mask = (1usize << half) - 1;

    // Neumaier-compensated sum over the Gray-code walk.
    let mut set = base;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for g in 0usize..1 << m {
        if g > 0 {
            let flip = frac[g.trailing_zeros() as usize];
            if set.contains(flip) {
                set.remove(flip);
            } else {
                set.insert(flip);
            }
        }
        let code = g ^ (g >> 1);
        let term = f(set) * lo[code & lo_mask] * hi[code >> half];
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}

/// Exact `F(y)` through the counted oracle.
pub fn eval_exact(f: &SubmodularOracle, y: &FractionalPoint) -> Result<f64> {
    check_len(f, y)?;
    let mut err = None;
    let v = expectation(&y.coords, |s| match f.evaluate(s) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            0.0
        }
    })?;
    err.map_or(Ok(v), Err)
}

fn check_len(f: &SubmodularOracle, y: &FractionalPoint) -> Result<()> {
    if y.len() != f.n() {
        return Err(Error::SizeMismatch {
            left: y.len(),
            right: f.n(),
        });
    }
    Ok(())
}

/// Monte Carlo estimate of `F(y)` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Random set drawn for `(seed, index)`: element `i` is included with
/// probability `coords[i]`. The draw depends on nothing else.
pub fn sample_set(coords: &[f64], seed: u64, index: u64) -> ElementSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut s = ElementSet::EMPTY;
    for (i, &y) in coords.iter().enumerate() {
        let u: f64 = rng.random();
        if u < y {
            s.insert(i);
        }
    }
    s
}

/// Unbiased estimate of `F(y)` from `samples` independent draws.
pub fn eval_mc(f: &SubmodularOracle, y: &FractionalPoint, samples: usize, seed: u64) -> Result<McEstimate> {
    check_len(f, y)?;
    if samples == 0 {
        return Err(Error::BadParams("samples must be at least 1".into()));
    }
    let values = (0..samples as u64)
        .into_par_iter()
        .map(|i| f.evaluate(sample_set(&y.coords, seed, i)))
        .collect::<Result<Vec<f64>>>()?;
    let n = samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stderr = if samples > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate { mean, stderr, samples })
}

/// `∂F/∂y_i = F(y | y_i = 1) - F(y | y_i = 0)`.
pub fn partial_derivative(f: &SubmodularOracle, y: &FractionalPoint, i: usize) -> Result<f64> {
    check_len(f, y)?;
    if i >= y.len() {
        return Err(Error::ElementOutOfRange { element: i, n: y.len() });
    }
    let mut hi = y.coords.clone();
    hi[i] = 1.0;
    let mut lo = y.coords.clone();
    lo[i] = 0.0;
    let fh = eval_exact(
        f,
        &FractionalPoint {
            coords: hi,
            grid_steps: None,
            upper: None,
        },
    )?;
    let fl = eval_exact(
        f,
        &FractionalPoint {
            coords: lo,
            grid_steps: None,
            upper: None,
        },
    )?;
    Ok(fh - fl)
}

/// How the fractional search evaluates `F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Evaluator {
    Exact,
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
    /// Exact up to `exact_cap` fractional coordinates, Monte Carlo above.
    Auto {
        exact_cap: usize,
        samples: usize,
        seed: u64,
    },
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::Auto {
            exact_cap: 18,
            samples: 20_000,
            seed: 0,
        }
    }
}

impl Evaluator {
    pub fn value(&self, f: &SubmodularOracle, y: &FractionalPoint) -> Result<f64> {
        match *self {
            Evaluator::Exact => eval_exact(f, y),
            Evaluator::MonteCarlo { samples, seed } => Ok(eval_mc(f, y, samples, seed)?.mean),
            Evaluator::Auto {
                exact_cap,
                samples,
                seed,
            } => {
                if y.fractional_support().len() <= exact_cap {
                    eval_exact(f, y)
                } else {
                    Ok(eval_mc(f, y, samples, seed)?.mean)
                }
            }
        }
    }

    pub fn is_exact_for(&self, y: &FractionalPoint) -> bool {
        match *self {
            Evaluator::Exact => true,
            Evaluator::MonteCarlo { .. } => false,
            Evaluator::Auto { exact_cap, .. } => y.fractional_support().len() <= exact_cap,
        }
    }
}

/// `g(∪ T_i) = F(.., |T_i| / s_i, ..)` over a ground set with `s_i` copies of
/// each element `i`.
#[derive(Clone, Debug)]
pub struct ScaledOracle {
    oracle: SubmodularOracle,
    multiplicities: Vec<u32>,
    offsets: Vec<usize>,
}

impl ScaledOracle {
    pub fn oracle(&self) -> &SubmodularOracle {
        &self.oracle
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.multiplicities
    }

    /// Copies of element `i` occupy ids `offsets[i] .. offsets[i] + s_i`.
    pub fn copies(&self, i: usize) -> ElementSet {
        ElementSet::from_bits(ElementSet::full(self.multiplicities[i] as usize).bits() << self.offsets[i])
    }

    /// The set holding the first `counts[i]` copies of each element.
    pub fn set_for_counts(&self, counts: &[u32]) -> Result<ElementSet> {
        if counts.len() != self.multiplicities.len() {
            return Err(Error::SizeMismatch {
                left: counts.len(),
                right: self.multiplicities.len(),
            });
        }
        let mut s = ElementSet::EMPTY;
        for (i, (&c, &m)) in counts.iter().zip(&self.multiplicities).enumerate() {
            if c > m {
                return Err(Error::BadParams(format!("count {c} exceeds multiplicity {m}")));
            }
            s = s.union(ElementSet::from_bits(
                ElementSet::full(c as usize).bits() << self.offsets[i],
            ));
        }
        Ok(s)
    }
}

pub fn lift_scaled(f: &SubmodularOracle, multiplicities: &[u32]) -> Result<ScaledOracle> {
    if multiplicities.len() != f.n() {
        return Err(Error::SizeMismatch {
            left: multiplicities.len(),
            right: f.n(),
        });
    }
    let total: usize = multiplicities.iter().map(|&m| m as usize).sum();
    if total > LIFT_CAP {
        return Err(Error::TooLarge {
            size: total,
            cap: LIFT_CAP,
        });
    }
    let mut offsets = Vec::with_capacity(multiplicities.len());
    let mut acc = 0;
    for &m in multiplicities {
        offsets.push(acc);
        acc += m as usize;
    }
    let oracle = SubmodularOracle::new(
        total,
        FunctionKind::Scaled {
            base: Box::new(f.kind().clone()),
            multiplicities: multiplicities.to_vec(),
        },
    )?;
    Ok(ScaledOracle {
        oracle,
        multiplicities: multiplicities.to_vec(),
        offsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::{build_coverage, build_cut, build_modular, subsets, validate_submodular, Edge};

    fn c4() -> SubmodularOracle {
        build_cut(4, (0..4).map(|i| Edge::new(i, (i + 1) % 4, 1.0)).collect(), false).unwrap()
    }

    // Direct sum over all 2^n subsets, no Gray code, no half tables.
    fn naive(f: &SubmodularOracle, y: &[f64]) -> f64 {
        subsets(f.ground())
            .map(|s| {
                let p: f64 = (0..y.len())
                    .map(|i| if s.contains(i) { y[i] } else { 1.0 - y[i] })
                    .product();
                f.compute(s).unwrap() * p
            })
            .sum()
    }

    #[test]
    fn indicator_points_recover_f() {
        let f = c4();
        for s in subsets(f.ground()) {
            let y = FractionalPoint::indicator(4, s);
            assert_eq!(eval_exact(&f, &y).unwrap(), f.compute(s).unwrap());
        }
        assert_eq!(eval_exact(&f, &FractionalPoint::zeros(4)).unwrap(), 0.0);
    }

    #[test]
    fn c4_at_half_is_two() {
        let f = c4();
        let y = FractionalPoint::new(vec![0.5; 4]).unwrap();
        assert!((naive(&f, &[0.5; 4]) - 2.0).abs() < 1e-12);
        assert!((eval_exact(&f, &y).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn matches_naive_sum() {
        let f = c4();
        let y = [0.1, 0.0, 0.7, 1.0];
        let got = eval_exact(&f, &FractionalPoint::new(y.to_vec()).unwrap()).unwrap();
        assert!((got - naive(&f, &y)).abs() < 1e-12);
    }

    #[test]
    fn mc_degenerate_and_reproducible() {
        let f = c4();
        let s = ElementSet::from_ids([0, 2]);
        let y = FractionalPoint::indicator(4, s);
        let est = eval_mc(&f, &y, 50, 3).unwrap();
        assert_eq!(est.mean, 4.0);
        assert_eq!(est.stderr, 0.0);
        let half = FractionalPoint::new(vec![0.5; 4]).unwrap();
        let a = eval_mc(&f, &half, 1, 11).unwrap();
        let b = eval_mc(&f, &half, 1, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.stderr, 0.0);
    }

    #[test]
    fn mc_close_to_exact() {
        let f = c4();
        let half = FractionalPoint::new(vec![0.5; 4]).unwrap();
        let est = eval_mc(&f, &half, 100_000, 7).unwrap();
        assert!((est.mean - 2.0).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn derivatives() {
        let m = build_modular(vec![3.0, 1.5, 2.0]).unwrap();
        let y = FractionalPoint::new(vec![0.3, 0.9, 0.2]).unwrap();
        for (i, w) in [3.0, 1.5, 2.0].into_iter().enumerate() {
            assert!((partial_derivative(&m, &y, i).unwrap() - w).abs() < 1e-12);
        }
        let f = c4();
        let half = FractionalPoint::new(vec![0.5; 4]).unwrap();
        for i in 0..4 {
            assert!(partial_derivative(&f, &half, i).unwrap().abs() < 1e-12);
        }
        let cov = build_coverage(vec![vec![0], vec![0]], vec![1.0]).unwrap();
        let y = FractionalPoint::new(vec![0.4, 1.0]).unwrap();
        assert_eq!(partial_derivative(&cov, &y, 0).unwrap(), 0.0);
    }

    #[test]
    fn too_many_fractional() {
        let f = build_modular(vec![1.0; 25]).unwrap();
        let y = FractionalPoint::new(vec![0.5; 25]).unwrap();
        assert!(matches!(
            eval_exact(&f, &y),
            Err(Error::TooManyFractional { got: 25, .. })
        ));
    }

    #[test]
    fn lift_cases() {
        let f = c4();
        let g = lift_scaled(&f, &[1, 1, 1, 1]).unwrap();
        for s in subsets(f.ground()) {
            assert!((g.oracle().compute(s).unwrap() - f.compute(s).unwrap()).abs() < 1e-12);
        }
        let m = build_modular(vec![3.0]).unwrap();
        let g = lift_scaled(&m, &[2]).unwrap();
        assert!((g.oracle().compute(ElementSet::singleton(0)).unwrap() - 1.5).abs() < 1e-12);
        assert!((g.oracle().compute(ElementSet::singleton(1)).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(g.oracle().compute(ElementSet::EMPTY).unwrap(), 0.0);
        assert!(matches!(lift_scaled(&f, &[6, 6, 6, 6]), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn lifted_cut_is_submodular() {
        let f = c4();
        let g = lift_scaled(&f, &[3, 2, 2, 3]).unwrap();
        assert!(validate_submodular(g.oracle()).unwrap().submodular);
        let s = g.set_for_counts(&[1, 2, 0, 3]).unwrap();
        let y = FractionalPoint::new(vec![1.0 / 3.0, 1.0, 0.0, 1.0]).unwrap();
        assert!((g.oracle().compute(s).unwrap() - eval_exact(&f, &y).unwrap()).abs() < 1e-12);
        assert_eq!(g.copies(1), ElementSet::from_ids([3, 4]));
    }

    #[test]
    fn meet_and_join() {
        let a = FractionalPoint::new(vec![0.2, 0.8]).unwrap();
        let b = FractionalPoint::new(vec![0.5, 0.1]).unwrap();
        assert_eq!(a.meet(&b).coords(), &[0.2, 0.1]);
        assert_eq!(a.join(&b).coords(), &[0.5, 0.8]);
    }
}
