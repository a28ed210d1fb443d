//! Timeout-minimal schedule search.
//!
//! Depth-first branch and bound over the solvers. Each solver either stays
//! out of the schedule or receives a slice from its candidate set (the
//! distinct sub-cutoff runtimes it recorded) on some unit. Solutions are
//! ranked lexicographically:
//!
//! 1. number of solved instances, larger first;
//! 2. the L^n norm of the slices, minimized or maximized;
//! 3. the slice vector in solver-name order, lexicographically smaller first.
//!
//! The coverage bound is the current solved set joined with everything the
//! remaining solvers could solve with the largest capacity still free.
//! Identical units are interchangeable, so only one unit per distinct load is
//! branched on, and the final unit assignment is canonicalized.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RuntimeMatrix;
use crate::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormDirection {
    #[default]
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub units: usize,
    /// Wall-clock cap; when it expires the best schedule found so far is
    /// returned and flagged as not proven optimal.
    pub time_budget: Option<Duration>,
    pub norm_exponent: u32,
    pub norm_direction: NormDirection,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            units: 1,
            time_budget: None,
            norm_exponent: 2,
            norm_direction: NormDirection::Minimize,
        }
    }
}

impl OptimizerConfig {
    pub fn with_units(units: usize) -> Self {
        Self {
            units,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<()> {
        if self.units == 0 {
            return Err(Error::InvalidArgument("units must be at least 1".into()));
        }
        Ok(())
    }
}

/// Rule applied to the solvers placed on one unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct UnitPolicy {
    pub max_solvers: Option<usize>,
    /// Every solver on the unit gets `floor(cutoff / k)` for `k` solvers.
    pub uniform: bool,
}

/// Extra restrictions for [`optimize_constrained`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    /// Policy for units without an override.
    pub default: UnitPolicy,
    /// Zero-based unit index to policy.
    pub per_unit: BTreeMap<usize, UnitPolicy>,
    /// Solver name to the only (zero-based) unit it may run on.
    pub pins: BTreeMap<String, usize>,
    /// Fail with [`Error::Infeasible`] below this many solved instances.
    pub min_solved: Option<usize>,
}

/// A point on the anytime trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incumbent {
    pub solved: usize,
    pub norm: u128,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Optimized {
    pub schedule: Schedule,
    pub solved: usize,
    pub norm: u128,
    /// False iff the time budget ran out before the search completed.
    pub optimal: bool,
    /// Every improvement of the incumbent, in discovery order.
    pub trace: Vec<Incumbent>,
    pub nodes: u64,
}

/// `{0}` plus every distinct sub-cutoff runtime of solver `s`, ascending.
pub fn candidate_slices(m: &RuntimeMatrix, s: usize) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::once(0)
        .chain(
            (0..m.num_instances())
                .map(|i| m.runtime(i, s))
                .filter(|&t| t < m.cutoff()),
        )
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Lexicographically optimal schedule under the ranking in the module docs.
pub fn optimize(m: &RuntimeMatrix, cfg: &OptimizerConfig) -> Result<Optimized> {
    Ok(Problem::new(m, cfg, &Constraints::default())?.solve())
}

/// [`optimize`] restricted to schedules meeting `constraints`.
pub fn optimize_constrained(m: &RuntimeMatrix, cfg: &OptimizerConfig, constraints: &Constraints) -> Result<Optimized> {
    let problem = Problem::new(m, cfg, constraints)?;
    let result = problem.solve();
    if let Some(min) = constraints.min_solved {
        if result.solved < min {
            return Err(Error::Infeasible(format!(
                "best schedule solves {} instances, {} required",
                result.solved, min
            )));
        }
    }
    Ok(result)
}

struct Problem<'a> {
    m: &'a RuntimeMatrix,
    kappa: u64,
    units: usize,
    exponent: u32,
    direction: NormDirection,
    deadline: Option<Instant>,
    policies: Vec<UnitPolicy>,
    /// Units no pin refers to; only these take part in symmetry breaking.
    unpinned: Vec<bool>,
    allowed: Vec<Vec<usize>>,
    interchangeable: bool,
    order: Vec<usize>,
    cands: Vec<Vec<u64>>,
    cover: Vec<Vec<FixedBitSet>>,
    name_rank: Vec<usize>,
}

#[derive(Clone)]
struct Best {
    solved: usize,
    norm: u128,
    key: Vec<u64>,
    slices: Vec<u64>,
    unit_of: Vec<Option<usize>>,
}

struct Search<'p, 'a> {
    p: &'p Problem<'a>,
    slice: Vec<u64>,
    unit_of: Vec<Option<usize>>,
    load: Vec<u64>,
    count: Vec<usize>,
    members: Vec<Vec<usize>>,
    levels: Vec<FixedBitSet>,
    scratch: FixedBitSet,
    norm_free: u128,
    best: Option<Best>,
    trace: Vec<Incumbent>,
    nodes: u64,
    expired: bool,
}

impl<'a> Problem<'a> {
    fn new(m: &'a RuntimeMatrix, cfg: &OptimizerConfig, constraints: &Constraints) -> Result<Self> {
        cfg.check()?;
        let units = cfg.units;
        let n_solvers = m.num_solvers();
        let n_inst = m.num_instances();

        let mut policies = vec![constraints.default; units];
        for (&u, &policy) in &constraints.per_unit {
            if u >= units {
                return Err(Error::Infeasible(format!(
                    "policy for unit {} but only {units} units",
                    u + 1
                )));
            }
            policies[u] = policy;
        }
        let mut allowed: Vec<Vec<usize>> = vec![(0..units).collect(); n_solvers];
        let mut unpinned = vec![true; units];
        for (name, &u) in &constraints.pins {
            let s = m.solver_index(name).ok_or_else(|| Error::UnknownSolver(name.clone()))?;
            if u >= units {
                return Err(Error::Infeasible(format!(
                    "`{name}` pinned to unit {} but only {units} units",
                    u + 1
                )));
            }
            allowed[s] = vec![u];
            unpinned[u] = false;
        }
        let interchangeable = constraints.pins.is_empty() && policies.iter().all(|p| *p == policies[0]);

        let cands: Vec<Vec<u64>> = (0..n_solvers).map(|s| candidate_slices(m, s)).collect();
        let cover: Vec<Vec<FixedBitSet>> = (0..n_solvers)
            .map(|s| {
                cands[s]
                    .iter()
                    .map(|&c| {
                        let mut set = FixedBitSet::with_capacity(n_inst);
                        for i in 0..n_inst {
                            if m.solves(i, s, c) {
                                set.insert(i);
                            }
                        }
                        set
                    })
                    .collect()
            })
            .collect();

        let by_name = m.solvers_by_name();
        let mut name_rank = vec![0; n_solvers];
        for (rank, &s) in by_name.iter().enumerate() {
            name_rank[s] = rank;
        }
        let mut order: Vec<usize> = (0..n_solvers).collect();
        order.sort_by(|&a, &b| {
            let ca = cover[a].last().map_or(0, |c| c.count_ones(..));
            let cb = cover[b].last().map_or(0, |c| c.count_ones(..));
            cb.cmp(&ca).then(name_rank[a].cmp(&name_rank[b]))
        });

        Ok(Self {
            m,
            kappa: m.cutoff(),
            units,
            exponent: cfg.norm_exponent,
            direction: cfg.norm_direction,
            deadline: cfg.time_budget.map(|d| Instant::now() + d),
            policies,
            unpinned,
            allowed,
            interchangeable,
            order,
            cands,
            cover,
            name_rank,
        })
    }

    fn pow(&self, t: u64) -> u128 {
        if t == 0 {
            0
        } else {
            (t as u128).saturating_pow(self.exponent)
        }
    }

    /// Largest candidate index of `s` not above `cap`.
    fn cand_at(&self, s: usize, cap: u64) -> usize {
        self.cands[s].partition_point(|&c| c <= cap) - 1
    }

    fn any_uniform(&self) -> bool {
        self.policies.iter().any(|p| p.uniform)
    }

    fn solve(&self) -> Optimized {
        let n_solvers = self.m.num_solvers();
        let n_inst = self.m.num_instances();
        let mut search = Search {
            p: self,
            slice: vec![0; n_solvers],
            unit_of: vec![None; n_solvers],
            load: vec![0; self.units],
            count: vec![0; self.units],
            members: vec![Vec::new(); self.units],
            levels: vec![FixedBitSet::with_capacity(n_inst); n_solvers + 1],
            scratch: FixedBitSet::with_capacity(n_inst),
            norm_free: 0,
            best: None,
            trace: Vec::new(),
            nodes: 0,
            expired: false,
        };
        // The empty schedule is always feasible.
        search.offer(0, 0, vec![0; n_solvers], vec![None; n_solvers]);
        if !self.any_uniform()
            && self.allowed.iter().all(|a| a.len() == self.units)
            && self.policies.iter().all(|p| p.max_solvers.is_none())
        {
            if let Some((slices, unit_of)) = self.greedy() {
                let solved = self.coverage_of(&slices);
                let norm = slices.iter().map(|&t| self.pow(t)).sum();
                search.offer(solved, norm, slices, unit_of);
            }
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            search.expired = true;
        } else {
            search.dfs(0);
        }

        let best = search.best.expect("empty schedule offered");
        let unit_of = if self.interchangeable {
            self.canonical_units(&best.slices).unwrap_or(best.unit_of.clone())
        } else {
            best.unit_of.clone()
        };
        let schedule = Schedule::new(self.m.solvers().to_vec(), best.slices, unit_of, self.units, self.kappa)
            .expect("search only produces feasible schedules");
        Optimized {
            schedule,
            solved: best.solved,
            norm: best.norm,
            optimal: !search.expired,
            trace: search.trace,
            nodes: search.nodes,
        }
    }

    fn coverage_of(&self, slices: &[u64]) -> usize {
        (0..self.m.num_instances())
            .filter(|&i| (0..slices.len()).any(|s| slices[s] > 0 && self.m.solves(i, s, slices[s])))
            .count()
    }

    /// Best-ratio greedy: repeatedly add the (solver, slice) with the most
    /// newly solved instances per time unit that still fits on some unit.
    fn greedy(&self) -> Option<(Vec<u64>, Vec<Option<usize>>)> {
        let n_solvers = self.m.num_solvers();
        let mut slices = vec![0u64; n_solvers];
        let mut unit_of = vec![None; n_solvers];
        let mut load = vec![0u64; self.units];
        let mut covered = FixedBitSet::with_capacity(self.m.num_instances());
        loop {
            // (gain, cost, solver, cand index)
            let mut pick: Option<(usize, u64, usize, usize)> = None;
            let cap = load.iter().map(|&l| self.kappa - l).max().unwrap_or(0);
            for s in (0..n_solvers).filter(|&s| slices[s] == 0) {
                for k in 1..self.cands[s].len() {
                    let cost = self.cands[s][k];
                    if cost > cap {
                        break;
                    }
                    let gain = self.cover[s][k].difference(&covered).count();
                    if gain == 0 {
                        continue;
                    }
                    let better = match pick {
                        None => true,
                        Some((g, c, ps, _)) => {
                            let lhs = gain as u128 * c as u128;
                            let rhs = g as u128 * cost as u128;
                            lhs > rhs
                                || (lhs == rhs && (gain > g || (gain == g && self.name_rank[s] < self.name_rank[ps])))
                        }
                    };
                    if better {
                        pick = Some((gain, cost, s, k));
                    }
                }
            }
            let Some((_, cost, s, k)) = pick else { break };
            // best fit: the fullest unit that still has room
            let u = (0..self.units)
                .filter(|&u| load[u] + cost <= self.kappa)
                .max_by_key(|&u| (load[u], std::cmp::Reverse(u)))
                .expect("cost fits the largest capacity");
            slices[s] = cost;
            unit_of[s] = Some(u);
            load[u] += cost;
            covered.union_with(&self.cover[s][k]);
            if covered.count_ones(..) == self.m.num_instances() {
                break;
            }
            if slices.iter().all(|&t| t > 0) {
                break;
            }
        }
        Some((slices, unit_of)).filter(|(s, _)| s.iter().any(|&t| t > 0))
    }

    /// Restricted-growth packing of the scheduled solvers (in name order)
    /// into units; the first feasible assignment found is the canonical one.
    fn canonical_units(&self, slices: &[u64]) -> Option<Vec<Option<usize>>> {
        let mut items: Vec<usize> = (0..slices.len()).filter(|&s| slices[s] > 0).collect();
        items.sort_by_key(|&s| self.name_rank[s]);
        let mut packing = Packing {
            sizes: items.iter().map(|&s| slices[s]).collect(),
            kappa: self.kappa,
            load: vec![0; self.units],
            assign: vec![0; items.len()],
            budget: 1_000_000,
        };
        if !packing.place(0, 0) {
            return None;
        }
        let assign = packing.assign;
        let mut unit_of = vec![None; slices.len()];
        for (j, &s) in items.iter().enumerate() {
            unit_of[s] = Some(assign[j]);
        }
        Some(unit_of)
    }
}

/// Depth-first restricted-growth assignment of item sizes to bins of
/// capacity `kappa`, giving up after `budget` placements.
struct Packing {
    sizes: Vec<u64>,
    kappa: u64,
    load: Vec<u64>,
    assign: Vec<usize>,
    budget: u64,
}

impl Packing {
    fn place(&mut self, j: usize, used: usize) -> bool {
        if j == self.sizes.len() {
            return true;
        }
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let t = self.sizes[j];
        let limit = (used + 1).min(self.load.len());
        for u in 0..limit {
            if self.load[u] + t <= self.kappa {
                self.load[u] += t;
                self.assign[j] = u;
                if self.place(j + 1, used.max(u + 1)) {
                    return true;
                }
                self.load[u] -= t;
            }
        }
        false
    }
}

impl Search<'_, '_> {
    fn better(&self, solved: usize, norm: u128, key: &[u64]) -> bool {
        let Some(best) = &self.best else { return true };
        if solved != best.solved {
            return solved > best.solved;
        }
        if norm != best.norm {
            return match self.p.direction {
                NormDirection::Minimize => norm < best.norm,
                NormDirection::Maximize => norm > best.norm,
            };
        }
        key < best.key.as_slice()
    }

    fn offer(&mut self, solved: usize, norm: u128, slices: Vec<u64>, unit_of: Vec<Option<usize>>) {
        let mut key = vec![0u64; slices.len()];
        for s in 0..slices.len() {
            key[self.p.name_rank[s]] = slices[s];
        }
        if self.better(solved, norm, &key) {
            let improves_objective = self.best.as_ref().is_none_or(|b| b.solved != solved || b.norm != norm);
            self.best = Some(Best {
                solved,
                norm,
                key,
                slices,
                unit_of,
            });
            if improves_objective {
                self.trace.push(Incumbent {
                    solved,
                    norm,
                    nodes: self.nodes,
                });
            }
        }
    }

    fn uniform_slice(&self, u: usize) -> u64 {
        match self.count[u] {
            0 => 0,
            k => self.p.kappa / k as u64,
        }
    }

    /// Optimistic coverage from `depth` on.
    fn coverage_bound(&mut self, depth: usize) -> usize {
        let p = self.p;
        self.scratch.clone_from(&self.levels[depth]);
        for u in 0..p.units {
            if p.policies[u].uniform && self.count[u] > 0 {
                let t = self.uniform_slice(u);
                for &s in &self.members[u] {
                    self.scratch.union_with(&p.cover[s][p.cand_at(s, t)]);
                }
            }
        }
        for &s in &p.order[depth..] {
            let mut cap = 0u64;
            for &u in &p.allowed[s] {
                if p.policies[u].max_solvers.is_some_and(|mx| self.count[u] >= mx) {
                    continue;
                }
                let c = if p.policies[u].uniform {
                    p.kappa / (self.count[u] as u64 + 1)
                } else {
                    p.kappa - self.load[u]
                };
                cap = cap.max(c);
            }
            if cap > 0 {
                self.scratch.union_with(&p.cover[s][p.cand_at(s, cap)]);
            }
        }
        self.scratch.count_ones(..)
    }

    /// Bound on the final norm in the optimizing direction.
    fn norm_bound(&self, depth: usize) -> u128 {
        let p = self.p;
        let remaining = p.order.len() - depth;
        match p.direction {
            NormDirection::Minimize => {
                let mut lb = self.norm_free;
                for u in 0..p.units {
                    if p.policies[u].uniform && self.count[u] > 0 {
                        let hi = p.policies[u]
                            .max_solvers
                            .unwrap_or(usize::MAX)
                            .min(self.count[u] + remaining);
                        let contribution = (self.count[u]..=hi.max(self.count[u]))
                            .map(|k| k as u128 * p.pow(p.kappa / k as u64))
                            .min()
                            .unwrap_or(0);
                        lb = lb.saturating_add(contribution);
                    }
                }
                lb
            }
            NormDirection::Maximize => {
                if p.any_uniform() {
                    return u128::MAX;
                }
                let mut ub = self.norm_free;
                if p.exponent == 0 {
                    return ub + remaining as u128;
                }
                for u in 0..p.units {
                    if p.policies[u].max_solvers.is_some_and(|mx| self.count[u] >= mx) {
                        continue;
                    }
                    ub = ub.saturating_add(p.pow(p.kappa - self.load[u]));
                }
                ub
            }
        }
    }

    fn prune(&mut self, depth: usize) -> bool {
        let Some((best_solved, best_norm)) = self.best.as_ref().map(|b| (b.solved, b.norm)) else {
            return false;
        };
        let ub = self.coverage_bound(depth);
        if ub != best_solved {
            return ub < best_solved;
        }
        let bound = self.norm_bound(depth);
        match self.p.direction {
            NormDirection::Minimize => bound > best_norm,
            NormDirection::Maximize => bound < best_norm,
        }
    }

    fn leaf(&mut self) {
        let p = self.p;
        let depth = p.order.len();
        let mut slices = self.slice.clone();
        let mut covered = self.levels[depth].clone();
        let mut norm = self.norm_free;
        for u in 0..p.units {
            if p.policies[u].uniform && self.count[u] > 0 {
                let t = self.uniform_slice(u);
                for &s in &self.members[u] {
                    slices[s] = t;
                    covered.union_with(&p.cover[s][p.cand_at(s, t)]);
                    norm = norm.saturating_add(p.pow(t));
                }
            }
        }
        let solved = covered.count_ones(..);
        self.offer(solved, norm, slices, self.unit_of.clone());
    }

    /// Whether unit `u` duplicates an earlier unit in the current state.
    fn symmetric_to_earlier(&self, u: usize) -> bool {
        let p = self.p;
        if !p.unpinned[u] {
            return false;
        }
        (0..u).any(|v| {
            p.unpinned[v]
                && p.policies[v] == p.policies[u]
                && if p.policies[u].uniform {
                    self.count[u] == 0 && self.count[v] == 0
                } else {
                    self.load[u] == self.load[v]
                        && (p.policies[u].max_solvers.is_none() || self.count[u] == self.count[v])
                }
        })
    }

    fn dfs(&mut self, depth: usize) {
        if self.expired {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(2048) {
            if let Some(deadline) = self.p.deadline {
                if Instant::now() >= deadline {
                    self.expired = true;
                    return;
                }
            }
        }
        if depth == self.p.order.len() {
            self.leaf();
            return;
        }
        if self.prune(depth) {
            return;
        }
        let p = self.p;
        let s = p.order[depth];

        for &u in &p.allowed[s] {
            let policy = p.policies[u];
            if policy.max_solvers.is_some_and(|mx| self.count[u] >= mx) || self.symmetric_to_earlier(u) {
                continue;
            }
            if !policy.uniform {
                continue;
            }
            self.count[u] += 1;
            self.members[u].push(s);
            self.unit_of[s] = Some(u);
            let (lo, hi) = self.levels.split_at_mut(depth + 1);
            hi[0].clone_from(&lo[depth]);
            self.dfs(depth + 1);
            self.unit_of[s] = None;
            self.members[u].pop();
            self.count[u] -= 1;
            if self.expired {
                return;
            }
        }

        for k in (1..p.cands[s].len()).rev() {
            let c = p.cands[s][k];
            // A slice whose extra instances are already solved is dominated
            // by the next smaller candidate when the norm is minimized.
            if p.direction == NormDirection::Minimize
                && p.cover[s][k]
                    .difference(&p.cover[s][k - 1])
                    .all(|i| self.levels[depth].contains(i))
            {
                continue;
            }
            for &u in &p.allowed[s] {
                let policy = p.policies[u];
                if policy.uniform
                    || self.load[u] + c > p.kappa
                    || policy.max_solvers.is_some_and(|mx| self.count[u] >= mx)
                    || self.symmetric_to_earlier(u)
                {
                    continue;
                }
                self.slice[s] = c;
                self.unit_of[s] = Some(u);
                self.load[u] += c;
                self.count[u] += 1;
                let added = p.pow(c);
                self.norm_free += added;
                let (lo, hi) = self.levels.split_at_mut(depth + 1);
                hi[0].clone_from(&lo[depth]);
                hi[0].union_with(&p.cover[s][k]);
                self.dfs(depth + 1);
                self.norm_free -= added;
                self.count[u] -= 1;
                self.load[u] -= c;
                self.unit_of[s] = None;
                self.slice[s] = 0;
                if self.expired {
                    return;
                }
            }
        }

        let (lo, hi) = self.levels.split_at_mut(depth + 1);
        hi[0].clone_from(&lo[depth]);
        self.dfs(depth + 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_table;
    use crate::matrix::parse_runtimes;

    #[test]
    fn candidate_slices_example() {
        let m = example_table();
        assert_eq!(candidate_slices(&m, 0), vec![0, 1, 5, 8]);
        assert_eq!(candidate_slices(&m, 1), vec![0, 1, 6, 8]);
        assert_eq!(candidate_slices(&m, 2), vec![0, 2, 3]);
        let dead = parse_runtimes("instance,solver,time\ni1,s1,timeout\ni2,s1,20\n".as_bytes(), 10, 1).unwrap();
        assert_eq!(candidate_slices(&dead, 0), vec![0]);
    }

    #[test]
    fn sequential_optimum_example() {
        let m = example_table();
        let r = optimize(&m, &OptimizerConfig::default()).unwrap();
        assert!(r.optimal);
        assert_eq!(r.solved, 5);
        assert_eq!(r.norm, 41);
        assert_eq!(r.schedule.slices(), &[1, 6, 2]);
    }

    #[test]
    fn parallel_optimum_example() {
        let m = example_table();
        let r = optimize(&m, &OptimizerConfig::with_units(2)).unwrap();
        assert!(r.optimal);
        assert_eq!(r.solved, 6);
        assert_eq!(r.schedule.slices(), &[1, 8, 2]);
        // canonical packing: s1 opens unit 0, s2 still fits next to it
        assert_eq!(r.schedule.unit_of(0), Some(0));
        assert_eq!(r.schedule.unit_of(1), Some(0));
        assert_eq!(r.schedule.unit_of(2), Some(1));
    }

    #[test]
    fn dominant_solver() {
        let m = parse_runtimes(
            "instance,solver,time\ni1,a,1\ni1,b,timeout\ni2,a,2\ni2,b,timeout\ni3,a,3\ni3,b,9\n".as_bytes(),
            10,
            1,
        )
        .unwrap();
        let r = optimize(&m, &OptimizerConfig::default()).unwrap();
        assert_eq!(r.solved, 3);
        assert_eq!(r.schedule.slices(), &[3, 0]);
    }

    #[test]
    fn empty_inputs() {
        let m = RuntimeMatrix::new(vec![], vec!["a".into()], vec![], 10, 1).unwrap();
        let r = optimize(&m, &OptimizerConfig::default()).unwrap();
        assert_eq!(r.solved, 0);
        assert_eq!(r.schedule.num_scheduled(), 0);
        let m = RuntimeMatrix::new(vec!["i".into()], vec![], vec![], 10, 1).unwrap();
        assert_eq!(optimize(&m, &OptimizerConfig::default()).unwrap().solved, 0);
    }

    #[test]
    fn maximize_prefers_few_long_slices() {
        let m = example_table();
        let cfg = OptimizerConfig {
            norm_direction: NormDirection::Maximize,
            ..OptimizerConfig::default()
        };
        let r = optimize(&m, &cfg).unwrap();
        assert_eq!(r.solved, 5);
        // {s2: 8, s3: 2} also solves five instances with the largest L2
        assert_eq!(r.schedule.slices(), &[0, 8, 2]);
        assert_eq!(r.norm, 68);
    }

    #[test]
    fn zero_budget_returns_incumbent() {
        let m = example_table();
        let cfg = OptimizerConfig {
            time_budget: Some(Duration::ZERO),
            ..OptimizerConfig::default()
        };
        let r = optimize(&m, &cfg).unwrap();
        assert!(!r.optimal);
        assert!(r.solved <= 5);
        assert!(r.solved > 0, "the greedy start is kept");
        assert_eq!(r.schedule.coverage(&m), r.solved);
    }

    #[test]
    fn ppfolio_style_constraints() {
        let m = example_table();
        let constraints = Constraints {
            default: UnitPolicy {
                max_solvers: Some(3),
                uniform: true,
            },
            ..Constraints::default()
        };
        let r = optimize_constrained(&m, &OptimizerConfig::default(), &constraints).unwrap();
        assert_eq!(r.schedule.slices(), &[3, 3, 3]);
        assert_eq!(r.solved, 4);
    }

    #[test]
    fn pin_respected() {
        let m = example_table();
        let mut constraints = Constraints::default();
        constraints.pins.insert("s2".into(), 0);
        constraints.per_unit.insert(
            0,
            UnitPolicy {
                max_solvers: Some(1),
                uniform: false,
            },
        );
        let r = optimize_constrained(&m, &OptimizerConfig::with_units(2), &constraints).unwrap();
        assert_eq!(r.schedule.unit_members(0), vec![1]);
        assert_eq!(r.solved, 6);
    }

    #[test]
    fn zero_solvers_per_unit() {
        let m = example_table();
        let constraints = Constraints {
            default: UnitPolicy {
                max_solvers: Some(0),
                uniform: false,
            },
            ..Constraints::default()
        };
        let r = optimize_constrained(&m, &OptimizerConfig::default(), &constraints).unwrap();
        assert_eq!(r.solved, 0);
        assert_eq!(r.schedule.num_scheduled(), 0);
        let demanding = Constraints {
            min_solved: Some(1),
            ..constraints
        };
        assert!(matches!(
            optimize_constrained(&m, &OptimizerConfig::default(), &demanding),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn bad_pins_are_infeasible() {
        let m = example_table();
        let mut constraints = Constraints::default();
        constraints.pins.insert("s2".into(), 3);
        assert!(matches!(
            optimize_constrained(&m, &OptimizerConfig::with_units(2), &constraints),
            Err(Error::Infeasible(_))
        ));
        let mut constraints = Constraints::default();
        constraints.pins.insert("nobody".into(), 0);
        assert!(matches!(
            optimize_constrained(&m, &OptimizerConfig::default(), &constraints),
            Err(Error::UnknownSolver(_))
        ));
    }

    #[test]
    fn trace_is_monotone() {
        let m = example_table();
        let r = optimize(&m, &OptimizerConfig::default()).unwrap();
        for pair in r.trace.windows(2) {
            assert!(
                pair[1].solved > pair[0].solved || (pair[1].solved == pair[0].solved && pair[1].norm < pair[0].norm)
            );
        }
        assert_eq!(r.trace.last().map(|t| (t.solved, t.norm)), Some((5, 41)));
    }
}
