//! Seeded benchmark workloads shared by the criterion benches.

use portsched::fixtures::random_matrix;
use portsched::{optimize, OptimizerConfig, RuntimeMatrix, Schedule};

/// A named runtime table together with the unit count to optimize for.
pub struct Workload {
    pub name: String,
    pub matrix: RuntimeMatrix,
    pub units: usize,
}

impl Workload {
    pub fn new(seed: u64, solvers: usize, instances: usize, cutoff: u64, units: usize) -> Self {
        Self {
            name: format!("{solvers}x{instances}/k{cutoff}/u{units}"),
            matrix: random_matrix(seed, solvers, instances, cutoff),
            units,
        }
    }

    pub fn config(&self) -> OptimizerConfig {
        OptimizerConfig::with_units(self.units)
    }

    /// The optimal schedule, as input for the alignment benches.
    pub fn schedule(&self) -> Schedule {
        optimize(&self.matrix, &self.config())
            .expect("workload optimizes")
            .schedule
    }
}

/// Slice optimization workloads of growing size.
pub fn optimizer_workloads() -> Vec<Workload> {
    vec![
        Workload::new(1, 4, 20, 20, 1),
        Workload::new(2, 6, 40, 30, 1),
        Workload::new(3, 8, 60, 30, 1),
        Workload::new(4, 6, 40, 30, 2),
    ]
}

/// Workloads whose uniform schedules have enough solvers per unit to make
/// ordering non-trivial.
pub fn alignment_workloads() -> Vec<Workload> {
    vec![
        Workload::new(11, 6, 40, 30, 1),
        Workload::new(12, 8, 60, 40, 1),
        Workload::new(13, 8, 60, 40, 2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_are_reproducible() {
        for (a, b) in optimizer_workloads().iter().zip(optimizer_workloads()) {
            assert_eq!(a.matrix, b.matrix);
            assert_eq!(a.name, b.name);
        }
        let w = &alignment_workloads()[0];
        assert_eq!(w.matrix.num_solvers(), 6);
        assert_eq!(w.schedule().units(), 1);
    }
}
