#![allow(dead_code)]

use proptest::prelude::*;

use portsched::{RuntimeMatrix, Schedule};

pub fn matrix(max_solvers: usize, max_instances: usize) -> impl Strategy<Value = RuntimeMatrix> {
    (
        1..=max_solvers,
        1..=max_instances,
        prop_oneof![Just(10u64), Just(20u64)],
    )
        .prop_flat_map(|(s, i, k)| (Just(s), Just(i), Just(k), prop::collection::vec(1..=k + 3, s * i)))
        .prop_map(|(s, i, k, runtime)| {
            RuntimeMatrix::new(
                (1..=i).map(|j| format!("i{j}")).collect(),
                (1..=s).map(|j| format!("s{j}")).collect(),
                runtime,
                k,
                1,
            )
            .unwrap()
        })
}

/// A matrix with an arbitrary single-unit schedule over it: raw weights are
/// scaled down until the slices fit the cutoff.
pub fn matrix_and_schedule() -> impl Strategy<Value = (RuntimeMatrix, Schedule)> {
    matrix(5, 8)
        .prop_flat_map(|m| {
            let n = m.num_solvers();
            (Just(m), prop::collection::vec(0u64..=12, n))
        })
        .prop_map(|(m, raw)| {
            let s = fit_schedule(&m, raw);
            (m, s)
        })
}

pub fn fit_schedule(m: &RuntimeMatrix, mut raw: Vec<u64>) -> Schedule {
    while raw.iter().sum::<u64>() > m.cutoff() {
        let j = raw.iter().enumerate().max_by_key(|&(_, &v)| v).unwrap().0;
        raw[j] -= 1;
    }
    let unit_of = raw.iter().map(|&t| (t > 0).then_some(0)).collect();
    Schedule::new(m.solvers().to_vec(), raw, unit_of, 1, m.cutoff()).unwrap()
}

/// Deterministic problem shape for case `k`: 3 to 5 solvers, 4 to 8
/// instances, cutoff 10 or 20 and one or two units.
pub fn shape(k: u64) -> (usize, usize, u64, usize) {
    let solvers = 3 + (k % 3) as usize;
    let instances = 4 + ((k / 3) % 5) as usize;
    let cutoff = if (k / 15).is_multiple_of(2) { 10 } else { 20 };
    let units = 1 + ((k / 30) % 2) as usize;
    (solvers, instances, cutoff, units)
}
