//! Fixed instances shared by the benchmarks.

use submax::{gen_random, InstanceFile, RandomConstraint, RandomFunction, RandomSpec};

pub fn instance(function: RandomFunction, constraint: RandomConstraint, n: usize, k: usize) -> InstanceFile {
    gen_random(&RandomSpec::new(function, constraint, n, k, 17)).expect("benchmark specs are valid")
}
