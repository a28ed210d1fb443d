//! Comparison schedules for judging optimized portfolios.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::RuntimeMatrix;
use crate::optimizer::{optimize_constrained, Constraints, OptimizerConfig, UnitPolicy};
use crate::schedule::Schedule;

/// Solvers dealt round-robin in name order to the units; a unit with `k`
/// solvers gives each `floor(cutoff / k)`, and leftover time is spread as
/// slack.
pub fn uniform_schedule(m: &RuntimeMatrix, units: usize) -> Result<Schedule> {
    if units == 0 {
        return Err(Error::InvalidArgument("units must be at least 1".into()));
    }
    let names = m.solvers_by_name();
    let mut unit_of = vec![None; m.num_solvers()];
    let mut counts = vec![0u64; units];
    for (j, &s) in names.iter().enumerate() {
        unit_of[s] = Some(j % units);
        counts[j % units] += 1;
    }
    let slices = unit_of
        .iter()
        .map(|u| u.map_or(0, |u| m.cutoff() / counts[u]))
        .collect();
    let unit_of = unit_of
        .into_iter()
        .zip(&slices)
        .map(|(u, &t): (Option<usize>, &u64)| u.filter(|_| t > 0))
        .collect();
    let schedule = Schedule::new(m.solvers().to_vec(), slices, unit_of, units, m.cutoff())?;
    Ok(schedule.redistribute_slack())
}

/// Constraints of the ppfolio-style portfolio: up to three solvers sharing
/// the first unit evenly, and at most one solver running the whole cutoff on
/// every other unit.
pub fn ppfolio_constraints(units: usize) -> Constraints {
    let per_unit: BTreeMap<usize, UnitPolicy> = (0..units)
        .map(|u| {
            let max = if u == 0 { 3 } else { 1 };
            (
                u,
                UnitPolicy {
                    max_solvers: Some(max),
                    uniform: true,
                },
            )
        })
        .collect();
    Constraints {
        per_unit,
        ..Constraints::default()
    }
}

/// Coverage-optimal schedule under [`ppfolio_constraints`], using the norm
/// settings of `cfg`.
pub fn ppfolio_like(m: &RuntimeMatrix, cfg: &OptimizerConfig) -> Result<Schedule> {
    Ok(optimize_constrained(m, cfg, &ppfolio_constraints(cfg.units))?.schedule)
}

/// The single best solver alone with the full cutoff on the first unit.
pub fn single_best_schedule(m: &RuntimeMatrix, units: usize) -> Result<Schedule> {
    if units == 0 {
        return Err(Error::InvalidArgument("units must be at least 1".into()));
    }
    let mut schedule = Schedule::empty(m.solvers(), units, m.cutoff());
    if let Some(name) = m.single_best() {
        schedule = Schedule::from_assignments(m, units, &[(name, m.cutoff(), 0)])?;
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_table;

    #[test]
    fn uniform_example() {
        let m = example_table();
        let s = uniform_schedule(&m, 1).unwrap();
        assert_eq!(s.slices(), &[4, 3, 3]);
        let raw = Schedule::sequential(&m, &[("s1", 3), ("s2", 3), ("s3", 3)]).unwrap();
        assert_eq!(raw.coverage(&m), 4);
    }

    #[test]
    fn uniform_two_units() {
        let m = example_table();
        let s = uniform_schedule(&m, 2).unwrap();
        assert_eq!(s.slices(), &[5, 10, 5]);
        assert_eq!(s.unit_members(0), vec![0, 2]);
        assert_eq!(s.unit_members(1), vec![1]);
    }

    #[test]
    fn uniform_single_solver() {
        let m = example_table().restrict_solvers(&["s2"]).unwrap();
        assert_eq!(uniform_schedule(&m, 1).unwrap().slices(), &[10]);
        assert_eq!(uniform_schedule(&m, 1).unwrap(), single_best_schedule(&m, 1).unwrap());
    }

    #[test]
    fn ppfolio_example() {
        let m = example_table();
        let seq = ppfolio_like(&m, &OptimizerConfig::default()).unwrap();
        assert_eq!(seq.slices(), &[3, 3, 3]);
        assert_eq!(seq.coverage(&m), 4);
        let par = ppfolio_like(&m, &OptimizerConfig::with_units(2)).unwrap();
        let second = par.unit_members(1);
        assert_eq!(second.len(), 1);
        assert_eq!(par.slice(second[0]), 10);
        assert!(par.unit_members(0).len() <= 3);
        assert!(par.coverage(&m) >= seq.coverage(&m));
    }

    #[test]
    fn ppfolio_two_solvers() {
        let m = example_table().restrict_solvers(&["s2", "s3"]).unwrap();
        let s = ppfolio_like(&m, &OptimizerConfig::default()).unwrap();
        assert_eq!(s.num_scheduled(), 2);
    }

    #[test]
    fn single_best_example() {
        let m = example_table();
        let s = single_best_schedule(&m, 1).unwrap();
        assert_eq!(s.slices(), &[0, 0, 10]);
        assert_eq!(m.num_instances() - s.coverage(&m), 3);
    }
}
