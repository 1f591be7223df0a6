//! Instance files, generators, algorithm dispatch and run records.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::base_search::{exact_cardinality, swap_base_search, two_base_algorithm, BaseConstraint};
use crate::error::{Error, Result};
use crate::ground::{Edge, ElementSet, FunctionKind, GroundSet, OracleCalls, SubmodularOracle};
use crate::knapsack::{knapsack_algorithm, FracSearchConfig, KnapsackSystem};
use crate::matroid::{MatroidKind, MatroidOracle};
use crate::matroid_search::{
    algorithm_a, greedy_baseline, partition_algorithm, partition_width, procedure_b, symmetric_algorithm, SearchConfig,
    SolutionReport,
};
use crate::multilinear::Evaluator;
use crate::verify::{
    certify_matroid_local_lemma_within, certify_partition_lemma_within, certify_swap_lemma, Certificate,
    FeasibilityPredicate, CERTIFY_CAP,
};

/// Feasible region of an instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Constraints {
    /// Independent in every matroid.
    Matroids { matroids: Vec<MatroidKind> },
    /// `weights[s]` against `capacities[s]` for each knapsack `s`.
    Knapsacks {
        weights: Vec<Vec<f64>>,
        capacities: Vec<f64>,
    },
    /// A base of the matroid.
    Base { matroid: MatroidKind },
    /// Exactly `c` elements.
    Cardinality { c: usize },
}

impl Constraints {
    pub fn name(&self) -> &'static str {
        match self {
            Constraints::Matroids { .. } => "matroids",
            Constraints::Knapsacks { .. } => "knapsacks",
            Constraints::Base { .. } => "base",
            Constraints::Cardinality { .. } => "cardinality",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, serde_json::Value>,
}

/// A self-contained problem instance. Field order is the canonical order
/// used for fingerprints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    pub function: FunctionKind,
    pub constraints: Constraints,
    #[serde(default)]
    pub metadata: Metadata,
}

impl InstanceFile {
    pub fn new(n: usize, function: FunctionKind, constraints: Constraints, name: impl Into<String>) -> Result<Self> {
        let inst = Self {
            n,
            labels: Vec::new(),
            function,
            constraints,
            metadata: Metadata {
                name: name.into(),
                ..Metadata::default()
            },
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Checks every id against `n` by building the oracles.
    pub fn validate(&self) -> Result<()> {
        if !self.labels.is_empty() {
            GroundSet::with_labels(self.labels.clone())?;
            if self.labels.len() != self.n {
                return Err(Error::SizeMismatch {
                    left: self.labels.len(),
                    right: self.n,
                });
            }
        }
        self.oracle()?;
        match &self.constraints {
            Constraints::Matroids { .. } | Constraints::Base { .. } => {
                self.matroids()?;
            }
            Constraints::Knapsacks { .. } => {
                self.knapsacks()?;
            }
            Constraints::Cardinality { c } => {
                if *c > self.n {
                    return Err(Error::BadParams(format!("cardinality {c} exceeds n = {}", self.n)));
                }
            }
        }
        Ok(())
    }

    /// A fresh oracle with zeroed counters.
    pub fn oracle(&self) -> Result<SubmodularOracle> {
        SubmodularOracle::new(self.n, self.function.clone())
    }

    pub fn matroids(&self) -> Result<Vec<MatroidOracle>> {
        match &self.constraints {
            Constraints::Matroids { matroids } => {
                matroids.iter().map(|m| MatroidOracle::new(self.n, m.clone())).collect()
            }
            Constraints::Base { matroid } => Ok(vec![MatroidOracle::new(self.n, matroid.clone())?]),
            other => Err(Error::BadParams(format!("{} instance has no matroids", other.name()))),
        }
    }

    pub fn knapsacks(&self) -> Result<KnapsackSystem> {
        match &self.constraints {
            Constraints::Knapsacks { weights, capacities } => {
                if let Some(row) = weights.iter().find(|r| r.len() != self.n) {
                    return Err(Error::SizeMismatch {
                        left: row.len(),
                        right: self.n,
                    });
                }
                KnapsackSystem::from_capacities(weights.clone(), capacities)
            }
            other => Err(Error::BadParams(format!("{} instance has no knapsacks", other.name()))),
        }
    }

    pub fn feasibility(&self) -> Result<FeasibilityPredicate> {
        Ok(match &self.constraints {
            Constraints::Matroids { .. } => FeasibilityPredicate::Matroids(self.matroids()?),
            Constraints::Knapsacks { .. } => FeasibilityPredicate::Knapsacks(self.knapsacks()?),
            Constraints::Base { matroid } => {
                FeasibilityPredicate::Base(BaseConstraint::new(MatroidOracle::new(self.n, matroid.clone())?))
            }
            Constraints::Cardinality { c } => FeasibilityPredicate::Cardinality { n: self.n, c: *c },
        })
    }

    /// Compact canonical serialization.
    pub fn to_canonical(&self) -> String {
        serde_json::to_string(self).expect("instances always serialize")
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances always serialize")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        inst.validate()?;
        Ok(inst)
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical().as_bytes()))
    }

    fn with_generator(mut self, generator: &str, seed: Option<u64>, params: &[(&str, serde_json::Value)]) -> Self {
        self.metadata.generator = Some(generator.into());
        self.metadata.seed = seed;
        self.metadata.params = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        self
    }
}

/// Coverage instance on which greedy gets `p + 1` against an optimum of
/// `p(k+1) + 1` under `k` partition matroids.
///
/// Ground elements are the sets `S_0, S_1, .., S_k, T_1, T_2` in that order,
/// over a universe of `p(k+1) + 2` unit-weight items of which the last is
/// covered by no set. Matroid `j` allows at most one of `S_0` and `S_j`.
pub fn gen_greedy_tight(k: usize, p: usize) -> Result<InstanceFile> {
    if k < 1 || p < 2 {
        return Err(Error::BadParams(format!(
            "need k >= 1 and p >= 2, got k = {k}, p = {p}"
        )));
    }
    let n = k + 3;
    let universe = p * (k + 1) + 2;
    let mut sets = vec![(0..=p).collect::<Vec<_>>()];
    for i in 1..=k {
        sets.push((p * i + 1..=p * (i + 1)).collect());
    }
    sets.push((0..p).collect());
    sets.push(vec![p]);
    let matroids = (1..=k)
        .map(|j| {
            // part 0 holds S_0 and S_j, every other set is alone
            let mut part_of = Vec::with_capacity(n);
            let mut next = 1;
            for e in 0..n {
                if e == 0 || e == j {
                    part_of.push(0);
                } else {
                    part_of.push(next);
                    next += 1;
                }
            }
            MatroidKind::Partition {
                part_of,
                capacities: vec![1; next],
            }
        })
        .collect();
    let mut inst = InstanceFile::new(
        n,
        FunctionKind::Coverage {
            universe_weights: vec![1.0; universe],
            sets,
        },
        Constraints::Matroids { matroids },
        format!("greedy-tight-k{k}-p{p}"),
    )?;
    inst.labels = std::iter::once("S0".to_string())
        .chain((1..=k).map(|i| format!("S{i}")))
        .chain(["T1".to_string(), "T2".to_string()])
        .collect();
    Ok(inst.with_generator("greedy_tight", None, &[("k", k.into()), ("p", p.into())]))
}

/// Directed cut on sides `U = {0..n_side}` and `V = {n_side..2 n_side}`
/// under the uniform base constraint of rank `n_side`.
///
/// `u_i` has `t` unit edges to `v_{i+1}, v_{i+2}, ..` (indices mod `n_side`,
/// wrapping as often as needed) and `v_i` one unit edge back to `u_i`. So
/// `f(U) = t n_side`, `f(V) = n_side`, and for `t <= 2 n_side - 1` no swap
/// improves on `V`.
pub fn gen_base_counterexample(n_side: usize, t: usize) -> Result<InstanceFile> {
    if n_side < 1 || t < 2 {
        return Err(Error::BadParams(format!(
            "need n_side >= 1 and t >= 2, got {n_side}, {t}"
        )));
    }
    let n = 2 * n_side;
    let mut edges = Vec::with_capacity(n_side * (t + 1));
    for i in 0..n_side {
        for s in 1..=t {
            edges.push(Edge::new(i, n_side + (i + s) % n_side, 1.0));
        }
    }
    for i in 0..n_side {
        edges.push(Edge::new(n_side + i, i, 1.0));
    }
    let mut inst = InstanceFile::new(
        n,
        FunctionKind::Cut { directed: true, edges },
        Constraints::Base {
            matroid: MatroidKind::Uniform { rank: n_side },
        },
        format!("base-counterexample-{n_side}-{t}"),
    )?;
    inst.labels = (0..n_side)
        .map(|i| format!("u{i}"))
        .chain((0..n_side).map(|i| format!("v{i}")))
        .collect();
    Ok(inst.with_generator(
        "base_counterexample",
        None,
        &[("n_side", n_side.into()), ("t", t.into())],
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomFunction {
    CutUndirected,
    CutDirected,
    Coverage,
    Facility,
    Modular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomConstraint {
    /// `k` uniform matroids.
    Uniform,
    /// `k` partition matroids.
    Partition,
    /// `k` matroids of mixed kinds (uniform, partition, graphic).
    Mixed,
    /// `k` knapsacks of capacity 1.
    Knapsack,
    /// Bases of a matroid with two disjoint bases.
    Base,
    /// A random exact cardinality.
    Cardinality,
}

macro_rules! name_enum {
    ($ty:ty { $($variant:ident => $name:literal),* $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$(<$ty>::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(<$ty>::$variant => $name),* }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s.replace('-', "_").as_str() {
                    $($name => Ok(<$ty>::$variant),)*
                    _ => Err(Error::BadParams(format!("unknown name {s:?}"))),
                }
            }
        }
    };
}

name_enum!(RandomFunction {
    CutUndirected => "cut_undirected",
    CutDirected => "cut_directed",
    Coverage => "coverage",
    Facility => "facility",
    Modular => "modular",
});

name_enum!(RandomConstraint {
    Uniform => "uniform",
    Partition => "partition",
    Mixed => "mixed",
    Knapsack => "knapsack",
    Base => "base",
    Cardinality => "cardinality",
});

/// Parameters of [`gen_random`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub function: RandomFunction,
    pub constraint: RandomConstraint,
    pub n: usize,
    pub k: usize,
    /// Edge, membership or profit probability in `(0, 1]`.
    pub density: f64,
    pub seed: u64,
}

impl RandomSpec {
    pub fn new(function: RandomFunction, constraint: RandomConstraint, n: usize, k: usize, seed: u64) -> Self {
        Self {
            function,
            constraint,
            n,
            k,
            density: 0.5,
            seed,
        }
    }
}

fn random_function(rng: &mut ChaCha8Rng, kind: RandomFunction, n: usize, density: f64) -> FunctionKind {
    let small_int = |rng: &mut ChaCha8Rng, hi: u32| f64::from(rng.random_range(1..=hi));
    match kind {
        RandomFunction::CutUndirected | RandomFunction::CutDirected => {
            let directed = kind == RandomFunction::CutDirected;
            let mut edges = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    if a == b || (!directed && b < a) {
                        continue;
                    }
                    if rng.random_bool(density) {
                        edges.push(Edge::new(a, b, small_int(rng, 5)));
                    }
                }
            }
            FunctionKind::Cut { directed, edges }
        }
        RandomFunction::Coverage => {
            let universe = 2 * n;
            let universe_weights = (0..universe).map(|_| small_int(rng, 3)).collect();
            let sets = (0..n)
                .map(|_| (0..universe).filter(|_| rng.random_bool(density / 2.0)).collect())
                .collect();
            FunctionKind::Coverage { universe_weights, sets }
        }
        RandomFunction::Facility => {
            let profits = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            if rng.random_bool(density) {
                                f64::from(rng.random_range(0..10u32))
                            } else {
                                0.0
                            }
                        })
                        .collect()
                })
                .collect();
            FunctionKind::FacilityLocation { profits }
        }
        RandomFunction::Modular => FunctionKind::Modular {
            weights: (0..n).map(|_| small_int(rng, 9)).collect(),
        },
    }
}

fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> MatroidKind {
    let parts = rng.random_range(1..=(n / 2).max(1));
    let part_of: Vec<usize> = (0..n)
        .map(|e| if e < parts { e } else { rng.random_range(0..parts) })
        .collect();
    let capacities = (0..parts).map(|_| rng.random_range(1..=2)).collect();
    MatroidKind::Partition { part_of, capacities }
}

fn random_matroid(rng: &mut ChaCha8Rng, n: usize, kind: RandomConstraint) -> MatroidKind {
    let pick = match kind {
        RandomConstraint::Uniform => 0,
        RandomConstraint::Partition => 1,
        _ => rng.random_range(0..3),
    };
    match pick {
        0 => MatroidKind::Uniform {
            rank: rng.random_range(1..=(n / 2 + 1).min(n)),
        },
        1 => random_partition(rng, n),
        _ => {
            let vertices = (n / 2 + 1).max(2);
            let edges = (0..n)
                .map(|_| {
                    let a = rng.random_range(0..vertices);
                    let b = (a + rng.random_range(1..vertices)) % vertices;
                    (a, b)
                })
                .collect();
            MatroidKind::Graphic { vertices, edges }
        }
    }
}

/// Base matroid with two disjoint bases: a uniform matroid of rank at most
/// `n/2`, or a partition matroid whose capacities are at most half of each part.
fn random_base_matroid(rng: &mut ChaCha8Rng, n: usize) -> MatroidKind {
    if n < 2 || rng.random_bool(0.5) {
        return MatroidKind::Uniform {
            rank: rng.random_range(0..=n / 2),
        };
    }
    let parts = rng.random_range(1..=n / 2);
    // every part gets at least two elements
    let part_of: Vec<usize> = (0..n)
        .map(|e| {
            if e < 2 * parts {
                e / 2
            } else {
                rng.random_range(0..parts)
            }
        })
        .collect();
    let capacities = (0..parts)
        .map(|p| {
            let size = part_of.iter().filter(|&&q| q == p).count();
            rng.random_range(1..=size / 2)
        })
        .collect();
    MatroidKind::Partition { part_of, capacities }
}

/// Seeded random instance; the same spec always yields the same file.
pub fn gen_random(spec: &RandomSpec) -> Result<InstanceFile> {
    let RandomSpec {
        function,
        constraint,
        n,
        k,
        density,
        seed,
    } = *spec;
    GroundSet::new(n)?;
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::BadParams(format!("density must lie in (0, 1], got {density}")));
    }
    if k == 0
        && matches!(
            constraint,
            RandomConstraint::Uniform
                | RandomConstraint::Partition
                | RandomConstraint::Mixed
                | RandomConstraint::Knapsack
        )
    {
        return Err(Error::BadParams("k must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_function(&mut rng, function, n, density);
    let constraints = match constraint {
        RandomConstraint::Uniform | RandomConstraint::Partition | RandomConstraint::Mixed => Constraints::Matroids {
            matroids: (0..k).map(|_| random_matroid(&mut rng, n, constraint)).collect(),
        },
        RandomConstraint::Knapsack => Constraints::Knapsacks {
            // hundredths keep the files exact and every singleton feasible
            weights: (0..k)
                .map(|_| (0..n).map(|_| f64::from(rng.random_range(5..=60u32)) / 100.0).collect())
                .collect(),
            capacities: vec![1.0; k],
        },
        RandomConstraint::Base => Constraints::Base {
            matroid: random_base_matroid(&mut rng, n),
        },
        RandomConstraint::Cardinality => Constraints::Cardinality {
            c: rng.random_range(0..=n),
        },
    };
    let inst = InstanceFile::new(
        n,
        f,
        constraints,
        format!("random-{function}-{constraint}-n{n}-k{k}-s{seed}"),
    )?;
    Ok(inst.with_generator(
        "random",
        Some(seed),
        &[
            ("function", function.name().into()),
            ("constraint", constraint.name().into()),
            ("n", n.into()),
            ("k", k.into()),
            ("density", density.into()),
        ],
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    ProcedureB,
    AlgorithmA,
    Symmetric,
    Greedy,
    /// p-exchange search for monotone `f` (single run).
    PartitionMonotone,
    /// p-exchange search repeated on shrinking ground sets.
    Partition,
    SwapBase,
    TwoBase,
    ExactCardinality,
    Knapsack,
}

name_enum!(Algorithm {
    ProcedureB => "procedure_b",
    AlgorithmA => "algorithm_a",
    Symmetric => "symmetric",
    Greedy => "greedy",
    PartitionMonotone => "partition_monotone",
    Partition => "partition",
    SwapBase => "swap_base",
    TwoBase => "two_base",
    ExactCardinality => "exact_cardinality",
    Knapsack => "knapsack",
});

impl Algorithm {
    pub fn applies_to(self, c: &Constraints) -> bool {
        match self {
            Algorithm::ProcedureB | Algorithm::AlgorithmA | Algorithm::Symmetric | Algorithm::Greedy => {
                matches!(c, Constraints::Matroids { .. })
            }
            Algorithm::PartitionMonotone | Algorithm::Partition => match c {
                Constraints::Matroids { matroids } => {
                    matroids.len() >= 2 && matroids.iter().all(|m| matches!(m, MatroidKind::Partition { .. }))
                }
                _ => false,
            },
            Algorithm::SwapBase | Algorithm::TwoBase => matches!(c, Constraints::Base { .. }),
            Algorithm::ExactCardinality => matches!(c, Constraints::Cardinality { .. }),
            Algorithm::Knapsack => matches!(c, Constraints::Knapsacks { .. }),
        }
    }
}

/// Knobs shared by every algorithm of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub epsilon: f64,
    pub scaling_exponent: u32,
    /// Exchange width of the partition algorithms; derived from `epsilon`
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    pub eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    /// Heavy threshold override for the knapsack algorithm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub certify: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            scaling_exponent: 4,
            p: None,
            eta: 0.5,
            zeta: None,
            delta: None,
            trials: 200,
            seed: 0,
            certify: true,
        }
    }
}

impl RunConfig {
    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            epsilon: self.epsilon,
            scaling_exponent: self.scaling_exponent,
            ..SearchConfig::default()
        }
    }

    pub fn knapsack(&self) -> FracSearchConfig {
        FracSearchConfig {
            zeta: self.zeta,
            eta: self.eta,
            delta_heavy: self.delta,
            trials: self.trials,
            seed: self.seed,
            evaluator: Evaluator::Auto {
                exact_cap: 18,
                samples: 20_000,
                seed: self.seed,
            },
            ..FracSearchConfig::default()
        }
    }

    /// Approximation slack handed to the partition algorithm: `ε = 2k/(p-1)`
    /// when `p` is fixed, so that `p = 1 + ⌈2k/ε⌉` gives `p` back.
    fn partition_epsilon(&self, k: usize) -> Result<f64> {
        match self.p {
            Some(p) if p >= 2 => Ok(2.0 * k as f64 / (p - 1) as f64),
            Some(p) => Err(Error::BadParams(format!("partition search needs p >= 2, got {p}"))),
            None => Ok(self.epsilon),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedCertificate {
    pub name: String,
    #[serde(flatten)]
    pub certificate: Certificate,
}

/// Outcome of one (instance, algorithm) run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub fingerprint: String,
    pub instance: String,
    pub algorithm: Algorithm,
    pub config: RunConfig,
    pub seed: u64,
    pub solution: ElementSet,
    pub value: f64,
    pub oracle_calls: OracleCalls,
    /// Improving moves of each local search in the run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub moves: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<NamedCertificate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall time in milliseconds; not part of the replay bytes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl RunRecord {
    /// The record without wall time, serialized. Replaying the same
    /// instance, algorithm and config reproduces these bytes exactly.
    pub fn replay_bytes(&self) -> String {
        let mut r = self.clone();
        r.wall_ms = None;
        serde_json::to_string(&r).expect("records always serialize")
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }

    pub fn certified(&self) -> bool {
        self.certificates.iter().all(|c| c.certificate.pass)
    }
}

fn run_algorithm(
    inst: &InstanceFile,
    f: &SubmodularOracle,
    algorithm: Algorithm,
    cfg: &RunConfig,
) -> Result<SolutionReport> {
    let search = cfg.search();
    match algorithm {
        Algorithm::ProcedureB => procedure_b(f, f.ground(), &inst.matroids()?, &search),
        Algorithm::AlgorithmA => algorithm_a(f, &inst.matroids()?, &search),
        Algorithm::Symmetric => symmetric_algorithm(f, &inst.matroids()?, &search),
        Algorithm::Greedy => greedy_baseline(f, &inst.matroids()?),
        Algorithm::PartitionMonotone | Algorithm::Partition => {
            let ms = inst.matroids()?;
            let eps = cfg.partition_epsilon(ms.len())?;
            partition_algorithm(f, &ms, eps, algorithm == Algorithm::PartitionMonotone, &search)
        }
        Algorithm::SwapBase => swap_base_search(f, &BaseConstraint::new(inst.matroids()?.remove(0)), &search),
        Algorithm::TwoBase => two_base_algorithm(f, &BaseConstraint::new(inst.matroids()?.remove(0)), &search),
        Algorithm::ExactCardinality => match inst.constraints {
            Constraints::Cardinality { c } => exact_cardinality(f, c, &search),
            _ => unreachable!("checked by applies_to"),
        },
        Algorithm::Knapsack => knapsack_algorithm(f, &inst.knapsacks()?, &cfg.knapsack()),
    }
}

fn certificates(
    inst: &InstanceFile,
    f: &SubmodularOracle,
    algorithm: Algorithm,
    cfg: &RunConfig,
    report: &SolutionReport,
) -> Result<Vec<NamedCertificate>> {
    if inst.n > CERTIFY_CAP {
        return Ok(Vec::new());
    }
    let named = |name: String, certificate| NamedCertificate { name, certificate };
    let mut out = Vec::new();
    match algorithm {
        Algorithm::ProcedureB | Algorithm::Symmetric => {
            let ms = inst.matroids()?;
            let c = certify_matroid_local_lemma_within(f, report.solution, &ms, cfg.epsilon, report.ground)?;
            out.push(named("matroid_local_lemma".into(), c));
        }
        Algorithm::AlgorithmA => {
            let ms = inst.matroids()?;
            for (i, it) in report.iterations.iter().enumerate() {
                let c = certify_matroid_local_lemma_within(f, it.solution, &ms, cfg.epsilon, it.ground)?;
                out.push(named(format!("matroid_local_lemma[{}]", i + 1), c));
            }
        }
        Algorithm::PartitionMonotone | Algorithm::Partition => {
            let ms = inst.matroids()?;
            let p = partition_width(ms.len(), cfg.partition_epsilon(ms.len())?)?;
            let runs = if report.iterations.is_empty() {
                std::slice::from_ref(report)
            } else {
                &report.iterations[..]
            };
            for (i, it) in runs.iter().enumerate() {
                let c = certify_partition_lemma_within(f, it.solution, &ms, p, cfg.epsilon, it.ground)?;
                out.push(named(format!("partition_lemma[{}]", i + 1), c));
            }
        }
        Algorithm::SwapBase => {
            let m = inst.matroids()?.remove(0);
            out.push(named(
                "swap_lemma".into(),
                certify_swap_lemma(f, report.solution, &m, cfg.epsilon)?,
            ));
        }
        Algorithm::TwoBase => {
            let m = inst.matroids()?.remove(0);
            let s1 = report.iterations[0].solution;
            out.push(named(
                "swap_lemma[S1]".into(),
                certify_swap_lemma(f, s1, &m, cfg.epsilon)?,
            ));
        }
        Algorithm::Greedy | Algorithm::ExactCardinality | Algorithm::Knapsack => {}
    }
    Ok(out)
}

/// Runs `algorithm` on a fresh oracle for `inst`.
pub fn run_one(inst: &InstanceFile, algorithm: Algorithm, cfg: &RunConfig) -> Result<RunRecord> {
    if !algorithm.applies_to(&inst.constraints) {
        return Err(Error::KindMismatch {
            algorithm: algorithm.name().into(),
            constraint: inst.constraints.name().into(),
        });
    }
    let f = inst.oracle()?;
    let start = Instant::now();
    let report = run_algorithm(inst, &f, algorithm, cfg)?;
    let wall = start.elapsed().as_secs_f64() * 1e3;
    if !inst.feasibility()?.is_feasible(report.solution) {
        return Err(Error::InternalContradiction(format!(
            "{} returned infeasible {}",
            algorithm, report.solution
        )));
    }
    let certificates = if cfg.certify {
        certificates(inst, &f, algorithm, cfg, &report)?
    } else {
        Vec::new()
    };
    Ok(RunRecord {
        fingerprint: inst.fingerprint(),
        instance: inst.metadata.name.clone(),
        algorithm,
        config: *cfg,
        seed: cfg.seed,
        solution: report.solution,
        value: report.value,
        oracle_calls: report.oracle_calls,
        moves: if report.iterations.is_empty() {
            vec![report.moves.len()]
        } else {
            report.iterations.iter().map(|r| r.moves.len()).collect()
        },
        certificates,
        notes: report.notes,
        wall_ms: Some(wall),
    })
}

/// Runs every (instance, algorithm) pair in parallel; records come back in
/// task order (instances outer, algorithms inner).
pub fn run_experiment(instances: &[InstanceFile], algorithms: &[Algorithm], cfg: &RunConfig) -> Result<Vec<RunRecord>> {
    let tasks: Vec<(&InstanceFile, Algorithm)> = instances
        .iter()
        .flat_map(|i| algorithms.iter().map(move |&a| (i, a)))
        .collect();
    tasks.into_par_iter().map(|(inst, a)| run_one(inst, a, cfg)).collect()
}
