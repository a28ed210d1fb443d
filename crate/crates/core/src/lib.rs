//! Solver-portfolio scheduling: compute timeout-minimal time slices and
//! solver orderings from a runtime table, evaluate them against baselines,
//! export them as ASP facts, and run them against real solver processes.

pub mod alignment;
pub mod asp;
pub mod baselines;
pub mod brute_force;
pub mod error;
pub mod evaluation;
pub mod executor;
pub mod fixtures;
pub mod matrix;
pub mod optimizer;
pub mod schedule;

pub use alignment::{
    combined_optimize, heu_min, heu_opt, optimal_alignment, random_alignment_expectation, AlignConfig, AlignmentResult,
    Combined,
};
pub use asp::{
    bundled_encodings, export_facts, export_schedule_facts, parse_facts, sanitize, Encodings, IdentifierMap,
    ParsedFacts,
};
pub use baselines::{ppfolio_constraints, ppfolio_like, single_best_schedule, uniform_schedule};
pub use brute_force::{enumerate_alignments, enumerate_schedules, BruteSchedule};
pub use error::{Error, Result};
pub use evaluation::{
    cross_validate, geometric_ratios, k_fold, par10, reduced_cutoff, reduced_cutoff_study, AlignMode, EvalConfig,
    FoldSpec, Report, Row, System,
};
pub use executor::{
    load_commands, parse_commands, run, Attempt, AttemptStatus, RunOptions, RunResult, SolverCommand, Winner,
};
pub use matrix::{parse_runtimes, OracleReport, RuntimeMatrix};
pub use optimizer::{
    candidate_slices, optimize, optimize_constrained, Constraints, Incumbent, NormDirection, Optimized,
    OptimizerConfig, UnitPolicy,
};
pub use schedule::{evaluate, tau, total_time, Alignment, Outcome, Schedule, ScheduleDocument};
