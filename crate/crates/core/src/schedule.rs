//! Schedules and alignments, with their effective-time evaluation.
//!
//! A [`Schedule`] gives every solver a time slice and binds each solver with
//! a positive slice to one processing unit. An [`Alignment`] fixes the order
//! in which each unit runs its solvers. Unit indices are zero-based in the
//! Rust API and one-based in every serialized form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RuntimeMatrix;

/// Per-solver time slices and unit assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    solvers: Vec<String>,
    slices: Vec<u64>,
    unit_of: Vec<Option<usize>>,
    units: usize,
    cutoff: u64,
}

impl Schedule {
    /// A schedule with every slice at zero.
    pub fn empty(solvers: &[String], units: usize, cutoff: u64) -> Self {
        Self {
            solvers: solvers.to_vec(),
            slices: vec![0; solvers.len()],
            unit_of: vec![None; solvers.len()],
            units: units.max(1),
            cutoff,
        }
    }

    /// Validating constructor.
    pub fn new(
        solvers: Vec<String>,
        slices: Vec<u64>,
        unit_of: Vec<Option<usize>>,
        units: usize,
        cutoff: u64,
    ) -> Result<Self> {
        if units == 0 {
            return Err(Error::InvalidArgument("units must be at least 1".into()));
        }
        if slices.len() != solvers.len() || unit_of.len() != solvers.len() {
            return Err(Error::InvalidArgument(
                "slice/unit vectors do not match solver count".into(),
            ));
        }
        let schedule = Self {
            solvers,
            slices,
            unit_of,
            units,
            cutoff,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    /// Builds a schedule for `m` from `(solver, slice, unit)` triples;
    /// unlisted solvers get no slice.
    pub fn from_assignments(m: &RuntimeMatrix, units: usize, entries: &[(&str, u64, usize)]) -> Result<Self> {
        let mut schedule = Self::empty(m.solvers(), units, m.cutoff());
        for &(name, slice, unit) in entries {
            let s = m
                .solver_index(name)
                .ok_or_else(|| Error::UnknownSolver(name.to_string()))?;
            schedule.slices[s] = slice;
            schedule.unit_of[s] = (slice > 0).then_some(unit);
        }
        schedule.validate()?;
        Ok(schedule)
    }

    /// Single-unit schedule from `(solver, slice)` pairs.
    pub fn sequential(m: &RuntimeMatrix, entries: &[(&str, u64)]) -> Result<Self> {
        let triples: Vec<(&str, u64, usize)> = entries.iter().map(|&(n, t)| (n, t, 0)).collect();
        Self::from_assignments(m, 1, &triples)
    }

    fn validate(&self) -> Result<()> {
        for s in 0..self.solvers.len() {
            match (self.slices[s], self.unit_of[s]) {
                (0, Some(_)) => {
                    return Err(Error::InvalidArgument(format!(
                        "solver `{}` has a unit but no slice",
                        self.solvers[s]
                    )))
                }
                (t, None) if t > 0 => {
                    return Err(Error::InvalidArgument(format!(
                        "solver `{}` has a slice but no unit",
                        self.solvers[s]
                    )))
                }
                (t, _) if t > self.cutoff => {
                    return Err(Error::InvalidArgument(format!(
                        "slice {t} of `{}` exceeds cutoff {}",
                        self.solvers[s], self.cutoff
                    )))
                }
                (_, Some(u)) if u >= self.units => {
                    return Err(Error::InvalidArgument(format!(
                        "solver `{}` assigned to unit {} of {}",
                        self.solvers[s],
                        u + 1,
                        self.units
                    )))
                }
                _ => {}
            }
        }
        for u in 0..self.units {
            if self.load(u) > self.cutoff {
                return Err(Error::InvalidArgument(format!(
                    "unit {} uses {} time units, cutoff is {}",
                    u + 1,
                    self.load(u),
                    self.cutoff
                )));
            }
        }
        Ok(())
    }

    pub fn solvers(&self) -> &[String] {
        &self.solvers
    }

    pub fn slices(&self) -> &[u64] {
        &self.slices
    }

    pub fn slice(&self, s: usize) -> u64 {
        self.slices[s]
    }

    pub fn slice_of(&self, name: &str) -> Option<u64> {
        self.solvers.iter().position(|n| n == name).map(|s| self.slices[s])
    }

    pub fn unit_of(&self, s: usize) -> Option<usize> {
        self.unit_of[s]
    }

    pub fn units(&self) -> usize {
        self.units
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// Solvers on unit `u`, in solver-index order.
    pub fn unit_members(&self, u: usize) -> Vec<usize> {
        (0..self.solvers.len())
            .filter(|&s| self.unit_of[s] == Some(u))
            .collect()
    }

    /// Solvers with a positive slice.
    pub fn scheduled(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.solvers.len()).filter(move |&s| self.slices[s] > 0)
    }

    pub fn num_scheduled(&self) -> usize {
        self.scheduled().count()
    }

    pub fn load(&self, u: usize) -> u64 {
        (0..self.solvers.len())
            .filter(|&s| self.unit_of[s] == Some(u))
            .map(|s| self.slices[s])
            .sum()
    }

    /// Simplified L^n norm: sum of `slice^n` over nonzero slices.
    pub fn l_norm(&self, n: u32) -> u128 {
        l_norm(&self.slices, n)
    }

    /// Instances some solver finishes within its slice.
    pub fn solved_instances(&self, m: &RuntimeMatrix) -> Vec<usize> {
        (0..m.num_instances())
            .filter(|&i| self.scheduled().any(|s| m.solves(i, s, self.slices[s])))
            .collect()
    }

    pub fn coverage(&self, m: &RuntimeMatrix) -> usize {
        self.solved_instances(m).len()
    }

    /// Errors unless the schedule was built over the same solvers as `m`.
    pub fn check_solvers(&self, m: &RuntimeMatrix) -> Result<()> {
        if self.solvers != m.solvers() {
            return Err(Error::Mismatch("solver lists differ".into()));
        }
        Ok(())
    }

    /// Spreads each unit's unused time evenly over its scheduled solvers.
    /// Remainders go one unit at a time to solvers in name order.
    pub fn redistribute_slack(&self) -> Schedule {
        let mut out = self.clone();
        for u in 0..self.units {
            let mut members: Vec<usize> = self.unit_members(u);
            if members.is_empty() {
                continue;
            }
            members.sort_by(|&a, &b| self.solvers[a].cmp(&self.solvers[b]));
            let slack = self.cutoff.saturating_sub(self.load(u));
            let k = members.len() as u64;
            let (share, remainder) = (slack / k, slack % k);
            for (j, &s) in members.iter().enumerate() {
                out.slices[s] += share + u64::from((j as u64) < remainder);
            }
        }
        out
    }

    /// Same slices under a new (not smaller) per-unit budget, with the added
    /// time redistributed as slack.
    pub fn retarget(&self, cutoff: u64) -> Result<Schedule> {
        if cutoff < self.cutoff {
            return Err(Error::InvalidArgument(format!(
                "cannot shrink schedule cutoff from {} to {cutoff}",
                self.cutoff
            )));
        }
        let mut out = self.clone();
        out.cutoff = cutoff;
        Ok(out.redistribute_slack())
    }
}

/// Sum of `x^n` over the nonzero entries; saturates instead of overflowing.
pub fn l_norm(slices: &[u64], n: u32) -> u128 {
    slices
        .iter()
        .filter(|&&t| t > 0)
        .fold(0u128, |acc, &t| acc.saturating_add((t as u128).saturating_pow(n)))
}

/// Execution order of the scheduled solvers on every unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alignment {
    order: Vec<Vec<usize>>,
}

impl Alignment {
    /// Wraps per-unit orders after checking that each is a permutation of
    /// that unit's scheduled solvers.
    pub fn new(schedule: &Schedule, order: Vec<Vec<usize>>) -> Result<Self> {
        let alignment = Self { order };
        alignment.validate(schedule)?;
        Ok(alignment)
    }

    pub(crate) fn from_parts_unchecked(order: Vec<Vec<usize>>) -> Self {
        Self { order }
    }

    /// Alignment from solver names per unit.
    pub fn from_names(schedule: &Schedule, order: &[&[&str]]) -> Result<Self> {
        let mut units = Vec::with_capacity(order.len());
        for names in order {
            let mut unit = Vec::with_capacity(names.len());
            for name in *names {
                let s = schedule
                    .solvers()
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::UnknownSolver(name.to_string()))?;
                unit.push(s);
            }
            units.push(unit);
        }
        Self::new(schedule, units)
    }

    /// Units in solver-name order.
    pub fn name_order(schedule: &Schedule) -> Self {
        let order = (0..schedule.units())
            .map(|u| {
                let mut members = schedule.unit_members(u);
                members.sort_by(|&a, &b| schedule.solvers()[a].cmp(&schedule.solvers()[b]));
                members
            })
            .collect();
        Self { order }
    }

    pub fn validate(&self, schedule: &Schedule) -> Result<()> {
        if self.order.len() != schedule.units() {
            return Err(Error::InvalidArgument(format!(
                "alignment has {} units, schedule has {}",
                self.order.len(),
                schedule.units()
            )));
        }
        for (u, unit) in self.order.iter().enumerate() {
            let mut got = unit.clone();
            got.sort_unstable();
            if got != schedule.unit_members(u) {
                return Err(Error::InvalidArgument(format!(
                    "alignment of unit {} is not a permutation of its scheduled solvers",
                    u + 1
                )));
            }
        }
        Ok(())
    }

    pub fn units(&self) -> &[Vec<usize>] {
        &self.order
    }

    pub fn unit(&self, u: usize) -> &[usize] {
        &self.order[u]
    }

    /// Solver names per unit.
    pub fn names<'a>(&self, schedule: &'a Schedule) -> Vec<Vec<&'a str>> {
        self.order
            .iter()
            .map(|unit| unit.iter().map(|&s| schedule.solvers()[s].as_str()).collect())
            .collect()
    }
}

/// Effective time of a schedule on one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub tau: u64,
    pub solved: bool,
    pub unit: Option<usize>,
    pub solver: Option<usize>,
}

/// Time spent on unit-local order `order` until instance `i` is solved, and
/// the solver that solved it. `None` if no solver of the unit covers `i`.
pub fn unit_tau(m: &RuntimeMatrix, schedule: &Schedule, order: &[usize], i: usize) -> Option<(u64, usize)> {
    let mut elapsed = 0u64;
    for &s in order {
        let slice = schedule.slice(s);
        if m.solves(i, s, slice) {
            return Some((elapsed + m.runtime(i, s), s));
        }
        elapsed += slice;
    }
    None
}

/// Single-unit effective time written directly as the first solving position
/// plus the slices before it; the cutoff when no position solves `i`.
pub fn sequential_tau(m: &RuntimeMatrix, schedule: &Schedule, order: &[usize], i: usize) -> Outcome {
    let positions: Vec<usize> = (0..order.len())
        .filter(|&l| m.solves(i, order[l], schedule.slice(order[l])))
        .collect();
    match positions.first() {
        Some(&first) => {
            let before: u64 = order[..first].iter().map(|&s| schedule.slice(s)).sum();
            Outcome {
                tau: before + m.runtime(i, order[first]),
                solved: true,
                unit: Some(0),
                solver: Some(order[first]),
            }
        }
        None => Outcome {
            tau: m.cutoff(),
            solved: false,
            unit: None,
            solver: None,
        },
    }
}

/// Wall-clock effective time: the fastest unit, or the cutoff if no unit
/// solves the instance. Ties between units go to the lower index.
pub fn tau(m: &RuntimeMatrix, schedule: &Schedule, alignment: &Alignment, i: usize) -> Outcome {
    let mut best: Option<(u64, usize, usize)> = None;
    for (u, order) in alignment.units().iter().enumerate() {
        if let Some((t, s)) = unit_tau(m, schedule, order, i) {
            if best.is_none_or(|(bt, _, _)| t < bt) {
                best = Some((t, u, s));
            }
        }
    }
    match best {
        Some((t, u, s)) => Outcome {
            tau: t,
            solved: true,
            unit: Some(u),
            solver: Some(s),
        },
        None => Outcome {
            tau: m.cutoff(),
            solved: false,
            unit: None,
            solver: None,
        },
    }
}

pub fn evaluate(m: &RuntimeMatrix, schedule: &Schedule, alignment: &Alignment) -> Vec<Outcome> {
    (0..m.num_instances()).map(|i| tau(m, schedule, alignment, i)).collect()
}

/// Sum over instances of the effective time.
pub fn total_time(m: &RuntimeMatrix, schedule: &Schedule, alignment: &Alignment) -> u64 {
    (0..m.num_instances()).map(|i| tau(m, schedule, alignment, i).tau).sum()
}

/// Serialized schedule: `{"cutoff":K,"units":[{"unit":1,"entries":[...]}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDocument {
    pub cutoff: u64,
    pub units: Vec<UnitDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitDocument {
    pub unit: usize,
    pub entries: Vec<EntryDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryDocument {
    pub solver: String,
    pub slice: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
}

impl ScheduleDocument {
    pub fn new(schedule: &Schedule, alignment: Option<&Alignment>) -> Self {
        let units = (0..schedule.units())
            .map(|u| {
                let entries = match alignment {
                    Some(a) => a
                        .unit(u)
                        .iter()
                        .enumerate()
                        .map(|(pos, &s)| EntryDocument {
                            solver: schedule.solvers()[s].clone(),
                            slice: schedule.slice(s),
                            position: Some(pos + 1),
                        })
                        .collect(),
                    None => schedule
                        .unit_members(u)
                        .into_iter()
                        .map(|s| EntryDocument {
                            solver: schedule.solvers()[s].clone(),
                            slice: schedule.slice(s),
                            position: None,
                        })
                        .collect(),
                };
                UnitDocument { unit: u + 1, entries }
            })
            .collect();
        Self {
            cutoff: schedule.cutoff(),
            units,
        }
    }

    /// Scheduled solver names in document order.
    pub fn solver_names(&self) -> Vec<String> {
        self.units
            .iter()
            .flat_map(|u| u.entries.iter().map(|e| e.solver.clone()))
            .collect()
    }

    /// Rebuilds the schedule over `solvers` (solvers absent from the document
    /// get no slice) and the alignment, if every entry carries a position
    /// or there are no entries at all.
    pub fn to_schedule(&self, solvers: &[String]) -> Result<(Schedule, Option<Alignment>)> {
        let units = self.units.iter().map(|u| u.unit).max().unwrap_or(1).max(1);
        let mut schedule = Schedule::empty(solvers, units, self.cutoff);
        let mut seen = vec![false; solvers.len()];
        let with_pos = self
            .units
            .iter()
            .flat_map(|u| &u.entries)
            .filter(|e| e.position.is_some())
            .count();
        let total = self.units.iter().map(|u| u.entries.len()).sum::<usize>();
        if with_pos != 0 && with_pos != total {
            return Err(Error::InvalidArgument(
                "either all entries or none may carry a position".into(),
            ));
        }
        let mut order: Vec<Vec<(usize, usize)>> = vec![Vec::new(); units];
        for unit in &self.units {
            if unit.unit == 0 {
                return Err(Error::InvalidArgument("unit numbers start at 1".into()));
            }
            for entry in &unit.entries {
                let s = solvers
                    .iter()
                    .position(|n| *n == entry.solver)
                    .ok_or_else(|| Error::UnknownSolver(entry.solver.clone()))?;
                if std::mem::replace(&mut seen[s], true) {
                    return Err(Error::InvalidArgument(format!(
                        "solver `{}` listed twice",
                        entry.solver
                    )));
                }
                if entry.slice == 0 {
                    continue;
                }
                schedule.slices[s] = entry.slice;
                schedule.unit_of[s] = Some(unit.unit - 1);
                if let Some(p) = entry.position {
                    order[unit.unit - 1].push((p, s));
                }
            }
        }
        schedule.validate()?;
        if with_pos == 0 && total > 0 {
            return Ok((schedule, None));
        }
        let mut units_order = Vec::with_capacity(units);
        for mut unit in order {
            unit.sort_unstable();
            if unit.iter().enumerate().any(|(k, &(p, _))| p != k + 1) {
                return Err(Error::InvalidArgument("positions must be 1..n on every unit".into()));
            }
            units_order.push(unit.into_iter().map(|(_, s)| s).collect());
        }
        let alignment = Alignment::new(&schedule, units_order)?;
        Ok((schedule, Some(alignment)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_table;

    #[test]
    fn solved_instances_example() {
        let m = example_table();
        let good = Schedule::sequential(&m, &[("s1", 1), ("s2", 6), ("s3", 2)]).unwrap();
        assert_eq!(good.solved_instances(&m), vec![0, 1, 2, 3, 4]);
        let uniform = Schedule::sequential(&m, &[("s1", 3), ("s2", 3), ("s3", 3)]).unwrap();
        assert_eq!(uniform.solved_instances(&m), vec![0, 1, 2, 3]);
        let empty = Schedule::empty(m.solvers(), 1, m.cutoff());
        assert!(empty.solved_instances(&m).is_empty());
    }

    #[test]
    fn full_slice_never_covers_a_timeout() {
        let m = example_table();
        let s2 = Schedule::sequential(&m, &[("s2", 10)]).unwrap();
        // s2 times out on i1, i2, i4
        assert_eq!(s2.solved_instances(&m), vec![2, 4, 5]);
    }

    #[test]
    fn norms_from_worked_example() {
        let m = example_table();
        let good = Schedule::sequential(&m, &[("s1", 1), ("s2", 6), ("s3", 2)]).unwrap();
        assert_eq!([good.l_norm(0), good.l_norm(1), good.l_norm(2)], [3, 9, 41]);
        let uniform = Schedule::sequential(&m, &[("s1", 3), ("s2", 3), ("s3", 3)]).unwrap();
        assert_eq!(uniform.l_norm(2), 27);
        let single = Schedule::sequential(&m, &[("s3", 9)]).unwrap();
        assert_eq!([single.l_norm(0), single.l_norm(1), single.l_norm(2)], [1, 9, 81]);
    }

    #[test]
    fn tau_sequential_example() {
        let m = example_table();
        let sigma = Schedule::sequential(&m, &[("s1", 1), ("s2", 6), ("s3", 2)]).unwrap();
        let pi = Alignment::from_names(&sigma, &[&["s1", "s3", "s2"]]).unwrap();
        let i3 = tau(&m, &sigma, &pi, 2);
        assert_eq!(i3.tau, 4);
        assert_eq!(i3.solver, Some(1));
        let i6 = tau(&m, &sigma, &pi, 5);
        assert_eq!((i6.tau, i6.solved), (10, false));
        assert_eq!(total_time(&m, &sigma, &pi), 30);
    }

    #[test]
    fn tau_parallel_example() {
        let m = example_table();
        let sigma = Schedule::from_assignments(&m, 2, &[("s2", 8, 0), ("s1", 1, 1), ("s3", 2, 1)]).unwrap();
        let pi = Alignment::from_names(&sigma, &[&["s2"], &["s1", "s3"]]).unwrap();
        let out = evaluate(&m, &sigma, &pi);
        let taus: Vec<u64> = out.iter().map(|o| o.tau).collect();
        assert_eq!(taus, vec![1, 3, 1, 3, 6, 8]);
        assert_eq!(out[1].unit, Some(1));
        assert_eq!(out[5].unit, Some(0));
        assert_eq!(total_time(&m, &sigma, &pi), 22);
    }

    #[test]
    fn single_solver_total_is_its_column() {
        let m = example_table();
        let sigma = Schedule::sequential(&m, &[("s3", 10)]).unwrap();
        let pi = Alignment::name_order(&sigma);
        assert_eq!(total_time(&m, &sigma, &pi), m.total_runtime(2));
    }

    #[test]
    fn slack_redistribution() {
        let m = example_table();
        let sigma = Schedule::sequential(&m, &[("s1", 1), ("s2", 6), ("s3", 2)]).unwrap();
        let filled = sigma.redistribute_slack();
        assert_eq!(filled.slices(), &[2, 6, 2]);
        assert_eq!(filled.redistribute_slack(), filled);
        let one = Schedule::sequential(&m, &[("s2", 4)]).unwrap();
        assert_eq!(one.redistribute_slack().slice_of("s2"), Some(10));
    }

    #[test]
    fn retarget_spreads_new_budget() {
        let m = example_table().with_cutoff(7).unwrap();
        let sigma = Schedule::sequential(&m, &[("s1", 2), ("s3", 5)]).unwrap();
        let wide = sigma.retarget(10).unwrap();
        assert_eq!(wide.cutoff(), 10);
        assert_eq!(wide.slices(), &[4, 0, 6]);
        assert!(sigma.retarget(5).is_err());
    }

    #[test]
    fn invalid_schedules_rejected() {
        let m = example_table();
        assert!(Schedule::sequential(&m, &[("s1", 6), ("s2", 6)]).is_err());
        assert!(Schedule::sequential(&m, &[("s1", 11)]).is_err());
        assert!(Schedule::from_assignments(&m, 1, &[("s1", 1, 1)]).is_err());
        assert!(Schedule::sequential(&m, &[("zz", 1)]).is_err());
    }

    #[test]
    fn invalid_alignments_rejected() {
        let m = example_table();
        let sigma = Schedule::sequential(&m, &[("s1", 1), ("s2", 6)]).unwrap();
        assert!(Alignment::new(&sigma, vec![vec![0]]).is_err());
        assert!(Alignment::new(&sigma, vec![vec![0, 0]]).is_err());
        assert!(Alignment::new(&sigma, vec![vec![0, 1], vec![]]).is_err());
        assert!(Alignment::new(&sigma, vec![vec![1, 0]]).is_ok());
    }

    #[test]
    fn document_round_trip_and_shape() {
        let m = example_table();
        let sigma = Schedule::from_assignments(&m, 2, &[("s2", 8, 0), ("s1", 1, 1), ("s3", 2, 1)]).unwrap();
        let pi = Alignment::from_names(&sigma, &[&["s2"], &["s3", "s1"]]).unwrap();
        let doc = ScheduleDocument::new(&sigma, Some(&pi));
        let json = serde_json::to_string(&doc).unwrap();
        assert!(
            json.starts_with(r#"{"cutoff":10,"units":[{"unit":1,"entries":[{"solver":"s2","slice":8,"position":1}]}"#)
        );
        let back = ScheduleDocument::from_json(&json).unwrap();
        let (s2, p2) = back.to_schedule(m.solvers()).unwrap();
        assert_eq!(s2, sigma);
        assert_eq!(p2, Some(pi));

        let bare = serde_json::to_string(&ScheduleDocument::new(&sigma, None)).unwrap();
        assert!(!bare.contains("position"));
        let (s3, p3) = ScheduleDocument::from_json(&bare)
            .unwrap()
            .to_schedule(m.solvers())
            .unwrap();
        assert_eq!(s3, sigma);
        assert!(p3.is_none());
    }

    #[test]
    fn document_rejects_bad_positions() {
        let m = example_table();
        let json = r#"{"cutoff":10,"units":[{"unit":1,"entries":[{"solver":"s1","slice":1,"position":1},{"solver":"s2","slice":2,"position":3}]}]}"#;
        assert!(ScheduleDocument::from_json(json)
            .unwrap()
            .to_schedule(m.solvers())
            .is_err());
        let json = r#"{"cutoff":10,"units":[{"unit":1,"entries":[{"solver":"s1","slice":1,"position":1},{"solver":"s2","slice":2}]}]}"#;
        assert!(ScheduleDocument::from_json(json)
            .unwrap()
            .to_schedule(m.solvers())
            .is_err());
    }
}
