//! The six-instance, three-solver runtime table used throughout the docs and
//! tests (cutoff 10 s, timeouts written as `timeout`), and a seeded random
//! table generator for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{parse_runtimes, RuntimeMatrix};

pub const EXAMPLE_CSV: &str = "instance,solver,time
i1,s1,1
i1,s2,timeout
i1,s3,3
i2,s1,5
i2,s2,timeout
i2,s3,2
i3,s1,8
i3,s2,1
i3,s3,timeout
i4,s1,timeout
i4,s2,timeout
i4,s3,2
i5,s1,timeout
i5,s2,6
i5,s3,timeout
i6,s1,timeout
i6,s2,8
i6,s3,timeout
";

pub const EXAMPLE_CUTOFF: u64 = 10;

pub fn example_table() -> RuntimeMatrix {
    parse_runtimes(EXAMPLE_CSV.as_bytes(), EXAMPLE_CUTOFF, 1).expect("fixture parses")
}

/// Table with runtimes drawn uniformly from `1..=cutoff + 3`; draws at or
/// above the cutoff become timeouts. Solvers are named `s1..`, instances
/// `i1..`.
pub fn random_matrix(seed: u64, solvers: usize, instances: usize, cutoff: u64) -> RuntimeMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let runtime = (0..solvers * instances)
        .map(|_| rng.random_range(1..=cutoff + 3))
        .collect();
    RuntimeMatrix::new(
        (1..=instances).map(|i| format!("i{i}")).collect(),
        (1..=solvers).map(|s| format!("s{s}")).collect(),
        runtime,
        cutoff,
        1,
    )
    .expect("generated names are unique")
}
