//! Time-minimal alignments, ordering heuristics, the random-order baseline
//! and joint schedule/alignment optimization.
//!
//! The exact search walks the units one after another and extends each
//! unit's permutation with the remaining solvers in name order, so leaves are
//! visited in lexicographic order. Per instance, the lower bound is the
//! smallest optimistic finishing time over all units. A finished unit
//! contributes its exact time. A partial unit contributes its elapsed prefix
//! plus its fastest remaining solver, and an untouched unit its fastest
//! member.

use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::RuntimeMatrix;
use crate::optimizer::{candidate_slices, optimize, OptimizerConfig};
use crate::schedule::{total_time, Alignment, Schedule};

/// Alignment counts up to this bound are averaged exactly.
pub const EXACT_EXPECTATION_LIMIT: u128 = 10_000;
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignConfig {
    /// Ignored while the number of alignments is at most `exhaustive_limit`.
    pub time_budget: Option<Duration>,
    pub exhaustive_limit: u128,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            time_budget: None,
            exhaustive_limit: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentResult {
    pub alignment: Alignment,
    pub total_time: u64,
    pub optimal: bool,
    pub nodes: u64,
}

/// Number of alignments of `schedule`: the product of the unit factorials,
/// or `None` on overflow.
pub fn alignment_count(schedule: &Schedule) -> Option<u128> {
    let mut count: u128 = 1;
    for u in 0..schedule.units() {
        for k in 1..=schedule.unit_members(u).len() as u128 {
            count = count.checked_mul(k)?;
        }
    }
    Some(count)
}

fn sorted_units(schedule: &Schedule, key: impl Fn(usize) -> (usize, u64)) -> Alignment {
    let order = (0..schedule.units())
        .map(|u| {
            let mut members = schedule.unit_members(u);
            members.sort_by(|&a, &b| {
                key(a)
                    .cmp(&key(b))
                    .then_with(|| schedule.solvers()[a].cmp(&schedule.solvers()[b]))
            });
            members
        })
        .collect();
    Alignment::from_parts_unchecked(order)
}

/// Ascending by the key `(timeouts at the full cutoff, slice, name)`.
pub fn heu_opt(m: &RuntimeMatrix, schedule: &Schedule) -> Result<Alignment> {
    schedule.check_solvers(m)?;
    Ok(sorted_units(schedule, |s| (m.timeouts(s), schedule.slice(s))))
}

/// Smaller slice first, then name.
pub fn heu_min(schedule: &Schedule) -> Alignment {
    sorted_units(schedule, |s| (0, schedule.slice(s)))
}

/// Alignment minimizing the total effective time; ties go to the
/// lexicographically smallest orders by solver name, unit by unit.
pub fn optimal_alignment(m: &RuntimeMatrix, schedule: &Schedule, cfg: &AlignConfig) -> Result<AlignmentResult> {
    schedule.check_solvers(m)?;
    let exhaustive = alignment_count(schedule).is_some_and(|c| c <= cfg.exhaustive_limit);
    let deadline = if exhaustive {
        None
    } else {
        cfg.time_budget.map(|d| Instant::now() + d)
    };
    Ok(AlignSearch::new(m, schedule, deadline).run())
}

struct AlignSearch<'a> {
    m: &'a RuntimeMatrix,
    schedule: &'a Schedule,
    deadline: Option<Instant>,
    kappa: u64,
    /// Unit members in name order.
    members: Vec<Vec<usize>>,
    order: Vec<Vec<usize>>,
    used: Vec<Vec<bool>>,
    elapsed: Vec<u64>,
    /// `done[u][i]`: time at which unit `u` solved instance `i` so far.
    done: Vec<Vec<Option<u64>>>,
    best_total: u64,
    best: Alignment,
    found: bool,
    nodes: u64,
    expired: bool,
}

impl<'a> AlignSearch<'a> {
    fn new(m: &'a RuntimeMatrix, schedule: &'a Schedule, deadline: Option<Instant>) -> Self {
        let incumbent = heu_min(schedule);
        let best_total = total_time(m, schedule, &incumbent);
        let members = Alignment::name_order(schedule).units().to_vec();
        let units = schedule.units();
        Self {
            m,
            schedule,
            deadline,
            kappa: m.cutoff(),
            used: members.iter().map(|mm| vec![false; mm.len()]).collect(),
            members,
            order: vec![Vec::new(); units],
            elapsed: vec![0; units],
            done: vec![vec![None; m.num_instances()]; units],
            best_total,
            best: incumbent,
            found: false,
            nodes: 0,
            expired: false,
        }
    }

    fn run(mut self) -> AlignmentResult {
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.expired = true;
        } else {
            self.dfs(0);
        }
        AlignmentResult {
            alignment: self.best,
            total_time: self.best_total,
            optimal: !self.expired,
            nodes: self.nodes,
        }
    }

    fn bound(&self) -> u64 {
        let mut total = 0u64;
        for i in 0..self.m.num_instances() {
            let mut best = self.kappa;
            for u in 0..self.members.len() {
                let t = match self.done[u][i] {
                    Some(t) => t,
                    None => self.members[u]
                        .iter()
                        .zip(&self.used[u])
                        .filter(|&(&s, &used)| !used && self.m.solves(i, s, self.schedule.slice(s)))
                        .map(|(&s, _)| self.elapsed[u] + self.m.runtime(i, s))
                        .min()
                        .unwrap_or(self.kappa),
                };
                best = best.min(t);
            }
            total += best;
        }
        total
    }

    fn dfs(&mut self, unit: usize) {
        if self.expired {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.expired = true;
            return;
        }
        let mut unit = unit;
        while unit < self.members.len() && self.order[unit].len() == self.members[unit].len() {
            unit += 1;
        }
        let lb = self.bound();
        if unit == self.members.len() {
            if lb < self.best_total || (lb == self.best_total && !self.found) {
                self.best_total = lb;
                self.best = Alignment::from_parts_unchecked(self.order.clone());
                self.found = true;
            }
            return;
        }
        if lb > self.best_total || (lb == self.best_total && self.found) {
            return;
        }
        for j in 0..self.members[unit].len() {
            if self.used[unit][j] {
                continue;
            }
            let s = self.members[unit][j];
            let slice = self.schedule.slice(s);
            let start = self.elapsed[unit];
            let mut newly = Vec::new();
            for i in 0..self.m.num_instances() {
                if self.done[unit][i].is_none() && self.m.solves(i, s, slice) {
                    self.done[unit][i] = Some(start + self.m.runtime(i, s));
                    newly.push(i);
                }
            }
            self.used[unit][j] = true;
            self.order[unit].push(s);
            self.elapsed[unit] += slice;
            self.dfs(unit);
            self.elapsed[unit] -= slice;
            self.order[unit].pop();
            self.used[unit][j] = false;
            for i in newly {
                self.done[unit][i] = None;
            }
            if self.expired {
                return;
            }
        }
    }
}

/// Visits every alignment of `schedule` in lexicographic name order.
pub(crate) fn for_each_alignment(schedule: &Schedule, mut visit: impl FnMut(&Alignment)) {
    fn rec(
        members: &[Vec<usize>],
        unit: usize,
        used: &mut [Vec<bool>],
        order: &mut Vec<Vec<usize>>,
        visit: &mut dyn FnMut(&Alignment),
    ) {
        if unit == members.len() {
            visit(&Alignment::from_parts_unchecked(order.clone()));
            return;
        }
        if order[unit].len() == members[unit].len() {
            rec(members, unit + 1, used, order, visit);
            return;
        }
        for j in 0..members[unit].len() {
            if used[unit][j] {
                continue;
            }
            used[unit][j] = true;
            order[unit].push(members[unit][j]);
            rec(members, unit, used, order, visit);
            order[unit].pop();
            used[unit][j] = false;
        }
    }
    let members = Alignment::name_order(schedule).units().to_vec();
    let mut used: Vec<Vec<bool>> = members.iter().map(|m| vec![false; m.len()]).collect();
    let mut order = vec![Vec::new(); members.len()];
    rec(&members, 0, &mut used, &mut order, &mut visit);
}

/// Mean total time of a uniformly random alignment: exact when there are
/// at most [`EXACT_EXPECTATION_LIMIT`] alignments, otherwise estimated from
/// `samples` seeded draws.
pub fn random_alignment_expectation(
    m: &RuntimeMatrix,
    schedule: &Schedule,
    samples: usize,
    seed: u64,
) -> Result<Ratio<u128>> {
    schedule.check_solvers(m)?;
    if samples == 0 {
        return Err(crate::Error::InvalidArgument("samples must be positive".into()));
    }
    match alignment_count(schedule) {
        Some(count) if count <= EXACT_EXPECTATION_LIMIT => {
            let mut sum: u128 = 0;
            for_each_alignment(schedule, |a| sum += total_time(m, schedule, a) as u128);
            Ok(Ratio::new(sum, count))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base = Alignment::name_order(schedule).units().to_vec();
            let mut sum: u128 = 0;
            for _ in 0..samples {
                let mut order = base.clone();
                for unit in &mut order {
                    unit.shuffle(&mut rng);
                }
                sum += total_time(m, schedule, &Alignment::from_parts_unchecked(order)) as u128;
            }
            Ok(Ratio::new(sum, samples as u128))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combined {
    pub schedule: Schedule,
    pub alignment: Alignment,
    pub solved: usize,
    pub total_time: u64,
    pub optimal: bool,
}

/// Joint optimum of coverage first and total time second, over all
/// candidate-slice schedules and all their alignments. Starts from the
/// two-phase result and only replaces it by strictly faster schedules.
pub fn combined_optimize(m: &RuntimeMatrix, cfg: &OptimizerConfig) -> Result<Combined> {
    let start = Instant::now();
    let deadline = cfg.time_budget.map(|d| start + d);
    let phase_one = optimize(m, cfg)?;
    let remaining = deadline.map(|d| d.saturating_duration_since(Instant::now()));
    let phase_two = optimal_alignment(
        m,
        &phase_one.schedule,
        &AlignConfig {
            time_budget: remaining,
            ..AlignConfig::default()
        },
    )?;
    let mut joint = Joint {
        m,
        units: cfg.units,
        kappa: m.cutoff(),
        target: phase_one.solved,
        deadline,
        cands: (0..m.num_solvers()).map(|s| candidate_slices(m, s)).collect(),
        slices: vec![0; m.num_solvers()],
        best: Combined {
            solved: phase_one.solved,
            total_time: phase_two.total_time,
            schedule: phase_one.schedule,
            alignment: phase_two.alignment,
            optimal: phase_one.optimal && phase_two.optimal,
        },
        expired: false,
        nodes: 0,
    };
    if !joint.best.optimal || deadline.is_some_and(|d| Instant::now() >= d) {
        joint.best.optimal = false;
        return Ok(joint.best);
    }
    joint.slice_dfs(0, 0);
    let mut best = joint.best;
    best.optimal = !joint.expired;
    Ok(best)
}

struct Joint<'a> {
    m: &'a RuntimeMatrix,
    units: usize,
    kappa: u64,
    target: usize,
    deadline: Option<Instant>,
    cands: Vec<Vec<u64>>,
    slices: Vec<u64>,
    best: Combined,
    expired: bool,
    nodes: u64,
}

impl Joint<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes.is_multiple_of(256) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.expired = true;
        }
        self.expired
    }

    fn coverage_bound(&self, depth: usize) -> usize {
        (0..self.m.num_instances())
            .filter(|&i| {
                (0..depth).any(|s| self.slices[s] > 0 && self.m.solves(i, s, self.slices[s]))
                    || (depth..self.m.num_solvers()).any(|s| self.m.solves(i, s, self.kappa))
            })
            .count()
    }

    fn slice_dfs(&mut self, depth: usize, used: u64) {
        if self.tick() {
            return;
        }
        if self.coverage_bound(depth) < self.target {
            return;
        }
        if depth == self.m.num_solvers() {
            self.pack();
            return;
        }
        for k in 0..self.cands[depth].len() {
            let c = self.cands[depth][k];
            if used + c > self.kappa * self.units as u64 || c > self.kappa {
                continue;
            }
            self.slices[depth] = c;
            self.slice_dfs(depth + 1, used + c);
            self.slices[depth] = 0;
            if self.expired {
                return;
            }
        }
    }

    fn pack(&mut self) {
        let mut items: Vec<usize> = (0..self.slices.len()).filter(|&s| self.slices[s] > 0).collect();
        let solvers = self.m.solvers();
        items.sort_by(|&a, &b| solvers[a].cmp(&solvers[b]));
        let mut load = vec![0u64; self.units];
        let mut unit_of = vec![None; self.slices.len()];
        self.pack_rec(&items, 0, 0, &mut load, &mut unit_of);
    }

    fn pack_rec(
        &mut self,
        items: &[usize],
        j: usize,
        opened: usize,
        load: &mut [u64],
        unit_of: &mut Vec<Option<usize>>,
    ) {
        if self.expired {
            return;
        }
        if j == items.len() {
            self.consider(unit_of.clone());
            return;
        }
        let s = items[j];
        let t = self.slices[s];
        for u in 0..(opened + 1).min(self.units) {
            if load[u] + t > self.kappa {
                continue;
            }
            load[u] += t;
            unit_of[s] = Some(u);
            self.pack_rec(items, j + 1, opened.max(u + 1), load, unit_of);
            unit_of[s] = None;
            load[u] -= t;
        }
    }

    fn consider(&mut self, unit_of: Vec<Option<usize>>) {
        if self.tick() {
            return;
        }
        let schedule = Schedule::new(
            self.m.solvers().to_vec(),
            self.slices.clone(),
            unit_of,
            self.units,
            self.kappa,
        )
        .expect("packing respects unit capacity");
        let solved = schedule.coverage(self.m);
        if solved < self.target {
            return;
        }
        let remaining = self.deadline.map(|d| d.saturating_duration_since(Instant::now()));
        let result = optimal_alignment(
            self.m,
            &schedule,
            &AlignConfig {
                time_budget: remaining,
                ..AlignConfig::default()
            },
        )
        .expect("schedule built over the matrix solvers");
        if !result.optimal {
            self.expired = true;
        }
        if solved > self.best.solved || result.total_time < self.best.total_time {
            self.best = Combined {
                schedule,
                alignment: result.alignment,
                solved,
                total_time: result.total_time,
                optimal: false,
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_table;

    fn example_sequential() -> (RuntimeMatrix, Schedule) {
        let m = example_table();
        let s = Schedule::sequential(&m, &[("s1", 1), ("s2", 6), ("s3", 2)]).unwrap();
        (m, s)
    }

    #[test]
    fn exact_alignment_example() {
        let (m, s) = example_sequential();
        let r = optimal_alignment(&m, &s, &AlignConfig::default()).unwrap();
        assert!(r.optimal);
        assert_eq!(r.total_time, 30);
        assert_eq!(r.alignment.names(&s), vec![vec!["s1", "s3", "s2"]]);
    }

    #[test]
    fn exactly_two_orders_are_optimal() {
        let (m, s) = example_sequential();
        let mut optimal = Vec::new();
        for_each_alignment(&s, |a| {
            if total_time(&m, &s, a) == 30 {
                optimal.push(a.names(&s)[0].join(","));
            }
        });
        assert_eq!(optimal, vec!["s1,s3,s2", "s3,s1,s2"]);
    }

    #[test]
    fn parallel_example() {
        let m = example_table();
        let s = Schedule::from_assignments(&m, 2, &[("s2", 8, 0), ("s1", 1, 1), ("s3", 2, 1)]).unwrap();
        let r = optimal_alignment(&m, &s, &AlignConfig::default()).unwrap();
        assert_eq!(r.total_time, 22);
        assert_eq!(r.alignment.names(&s), vec![vec!["s2"], vec!["s1", "s3"]]);
    }

    #[test]
    fn heuristics_example() {
        let (m, s) = example_sequential();
        assert_eq!(heu_min(&s).names(&s), vec![vec!["s1", "s3", "s2"]]);
        assert_eq!(heu_opt(&m, &s).unwrap().names(&s), vec![vec!["s1", "s3", "s2"]]);
        let uniform = Schedule::sequential(&m, &[("s3", 3), ("s2", 3), ("s1", 3)]).unwrap();
        assert_eq!(heu_min(&uniform).names(&uniform), vec![vec!["s1", "s2", "s3"]]);
    }

    #[test]
    fn heu_opt_prefers_robust_solver() {
        let m = crate::matrix::parse_runtimes(
            "instance,solver,time\na,s1,1\na,s2,4\nb,s1,timeout\nb,s2,4\n".as_bytes(),
            10,
            1,
        )
        .unwrap();
        let s = Schedule::sequential(&m, &[("s1", 1), ("s2", 5)]).unwrap();
        assert_eq!(heu_opt(&m, &s).unwrap().names(&s), vec![vec!["s2", "s1"]]);
    }

    #[test]
    fn empty_unit_gives_empty_permutation() {
        let m = example_table();
        let s = Schedule::from_assignments(&m, 2, &[("s1", 5, 0)]).unwrap();
        assert_eq!(heu_opt(&m, &s).unwrap().units()[1], Vec::<usize>::new());
    }

    #[test]
    fn random_expectation_example() {
        let (m, s) = example_sequential();
        assert_eq!(
            random_alignment_expectation(&m, &s, 10, 1).unwrap(),
            Ratio::from_integer(36)
        );
        let single = Schedule::sequential(&m, &[("s3", 10)]).unwrap();
        let total = total_time(&m, &single, &heu_min(&single)) as u128;
        assert_eq!(
            random_alignment_expectation(&m, &single, 5, 0).unwrap(),
            Ratio::from_integer(total)
        );
    }

    #[test]
    fn combined_example() {
        let m = example_table();
        let r = combined_optimize(&m, &OptimizerConfig::default()).unwrap();
        assert!(r.optimal);
        assert_eq!(r.solved, 5);
        assert!(r.total_time <= 30);
        assert_eq!(r.total_time, total_time(&m, &r.schedule, &r.alignment));
    }

    #[test]
    fn combined_zero_budget() {
        let m = example_table();
        let cfg = OptimizerConfig {
            time_budget: Some(Duration::ZERO),
            ..OptimizerConfig::default()
        };
        let r = combined_optimize(&m, &cfg).unwrap();
        assert!(!r.optimal);
    }
}
