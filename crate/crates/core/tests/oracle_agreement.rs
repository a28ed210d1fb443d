mod common;

use common::shape;
use portsched::fixtures::random_matrix;
use portsched::{
    enumerate_alignments, enumerate_schedules, optimal_alignment, optimize, AlignConfig, NormDirection, OptimizerConfig,
};

#[test]
fn optimizers_match_exhaustive_search() {
    for k in 0..200u64 {
        let (solvers, instances, cutoff, units) = shape(k);
        let m = random_matrix(1000 + k, solvers, instances, cutoff);
        let cfg = OptimizerConfig::with_units(units);
        let fast = optimize(&m, &cfg).unwrap();
        let slow = enumerate_schedules(&m, units, 2, NormDirection::Minimize).unwrap();
        assert!(fast.optimal);
        assert_eq!((fast.solved, fast.norm), (slow.solved, slow.norm), "case {k}");
        assert_eq!(fast.schedule, slow.schedule, "case {k}");

        let exact = optimal_alignment(&m, &fast.schedule, &AlignConfig::default()).unwrap();
        let (total, alignment) = enumerate_alignments(&m, &fast.schedule).unwrap();
        assert_eq!(exact.total_time, total, "case {k}");
        assert_eq!(exact.alignment, alignment, "case {k}");
    }
}

#[test]
fn maximized_norm_matches_exhaustive_search() {
    for k in 0..60u64 {
        let (solvers, instances, cutoff, units) = shape(k * 7 + 3);
        let m = random_matrix(5000 + k, solvers, instances, cutoff);
        let cfg = OptimizerConfig {
            norm_direction: NormDirection::Maximize,
            ..OptimizerConfig::with_units(units)
        };
        let fast = optimize(&m, &cfg).unwrap();
        let slow = enumerate_schedules(&m, units, 2, NormDirection::Maximize).unwrap();
        assert_eq!((fast.solved, fast.norm), (slow.solved, slow.norm), "case {k}");
        assert_eq!(fast.schedule, slow.schedule, "case {k}");
    }
}

#[test]
fn other_exponents_match_exhaustive_search() {
    for k in 0..60u64 {
        let n = (k % 4) as u32;
        let (solvers, instances, cutoff, units) = shape(k * 11 + 5);
        let m = random_matrix(9000 + k, solvers, instances, cutoff);
        let cfg = OptimizerConfig {
            norm_exponent: n,
            ..OptimizerConfig::with_units(units)
        };
        let fast = optimize(&m, &cfg).unwrap();
        let slow = enumerate_schedules(&m, units, n, NormDirection::Minimize).unwrap();
        assert_eq!((fast.solved, fast.norm), (slow.solved, slow.norm), "case {k} n={n}");
        assert_eq!(fast.schedule, slow.schedule, "case {k} n={n}");
    }
}

#[test]
fn alignment_matches_on_arbitrary_schedules() {
    for k in 0..100u64 {
        let (solvers, instances, cutoff, units) = shape(k);
        let m = random_matrix(20_000 + k, solvers + 1, instances, cutoff);
        let s = portsched::uniform_schedule(&m, units).unwrap();
        let exact = optimal_alignment(&m, &s, &AlignConfig::default()).unwrap();
        let (total, alignment) = enumerate_alignments(&m, &s).unwrap();
        assert_eq!(exact.total_time, total, "case {k}");
        assert_eq!(exact.alignment, alignment, "case {k}");
    }
}
