//! Local search and rounding algorithms for maximizing non-negative
//! submodular functions under matroid and knapsack constraints.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod base_search;
pub mod error;
pub mod ground;
pub mod harness;
pub mod knapsack;
pub mod matroid;
pub mod matroid_search;
pub mod multilinear;
pub mod verify;

pub use base_search::{exact_cardinality, swap_base_search, swap_base_search_from, two_base_algorithm, BaseConstraint};
pub use error::{Error, Result};
pub use ground::{
    build_coverage, build_cut, build_facility_location, build_modular, build_table, complement_oracle,
    validate_submodular, Edge, ElementSet, FunctionKind, GroundSet, OracleCalls, SubmodularOracle, SubmodularityReport,
};
pub use harness::{
    gen_base_counterexample, gen_greedy_tight, gen_random, run_experiment, run_one, Algorithm, Constraints,
    InstanceFile, Metadata, RandomConstraint, RandomFunction, RandomSpec, RunConfig, RunRecord,
};
pub use knapsack::{
    classify_heavy_light, enumerate_heavy, fractional_local_search, knapsack_algorithm, randomized_round,
    solve_fractional, FracOutcome, FracSearchConfig, FractionalSolution, KnapsackSystem, Neighborhood, RoundingReport,
};
pub use matroid::{exchange_map, find_two_disjoint_bases, ExchangeMap, MatroidKind, MatroidOracle};
pub use matroid_search::{
    algorithm_a, greedy_baseline, p_exchange_search, partition_algorithm, procedure_b, symmetric_algorithm, Move,
    MoveRecord, SearchConfig, SolutionReport,
};
pub use multilinear::{eval_exact, eval_mc, lift_scaled, Evaluator, FractionalPoint, McEstimate, ScaledOracle};
pub use verify::{
    brute_force_opt, certify_fractional_lemma, certify_matroid_local_lemma, certify_matroid_local_lemma_within,
    certify_partition_lemma, certify_partition_lemma_within, certify_swap_lemma, measure_ratio, Certificate,
    FeasibilityPredicate, RatioReport,
};
