//! Exhaustive reference searches for small problems. They share the
//! objectives and tie-breaks of the real optimizers and exist to check them.

use crate::error::{Error, Result};
use crate::matrix::RuntimeMatrix;
use crate::optimizer::{candidate_slices, NormDirection};
use crate::schedule::{l_norm, total_time, Alignment, Schedule};

pub const MAX_SOLVERS: usize = 6;
pub const MAX_CANDIDATES: usize = 12;
pub const MAX_UNITS: usize = 2;
pub const MAX_ALIGNED_SOLVERS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteSchedule {
    pub solved: usize,
    pub norm: u128,
    pub schedule: Schedule,
}

struct Incumbent {
    solved: usize,
    norm: u128,
    /// Slices in solver-name order.
    key: Vec<u64>,
    slices: Vec<u64>,
    unit_of: Vec<Option<usize>>,
}

/// Best schedule over every candidate-slice vector and unit assignment.
pub fn enumerate_schedules(m: &RuntimeMatrix, units: usize, n: u32, direction: NormDirection) -> Result<BruteSchedule> {
    if m.num_solvers() > MAX_SOLVERS {
        return Err(Error::TooLarge(format!(
            "{} solvers, at most {MAX_SOLVERS}",
            m.num_solvers()
        )));
    }
    if units == 0 || units > MAX_UNITS {
        return Err(Error::TooLarge(format!(
            "{units} units, between 1 and {MAX_UNITS} supported"
        )));
    }
    let cands: Vec<Vec<u64>> = (0..m.num_solvers()).map(|s| candidate_slices(m, s)).collect();
    if let Some(c) = cands.iter().find(|c| c.len() > MAX_CANDIDATES) {
        return Err(Error::TooLarge(format!(
            "{} candidate slices, at most {MAX_CANDIDATES}",
            c.len()
        )));
    }
    let names = m.solvers_by_name();
    let kappa = m.cutoff();

    let mut best: Option<Incumbent> = None;
    let mut digits = vec![0usize; m.num_solvers()];
    loop {
        let slices: Vec<u64> = digits.iter().enumerate().map(|(s, &d)| cands[s][d]).collect();
        let solved = (0..m.num_instances())
            .filter(|&i| (0..slices.len()).any(|s| slices[s] > 0 && m.solves(i, s, slices[s])))
            .count();
        let norm = l_norm(&slices, n);
        let key: Vec<u64> = names.iter().map(|&s| slices[s]).collect();
        let improves = match &best {
            None => true,
            Some(b) => {
                solved > b.solved
                    || (solved == b.solved
                        && match direction {
                            NormDirection::Minimize => norm < b.norm,
                            NormDirection::Maximize => norm > b.norm,
                        })
                    || (solved == b.solved && norm == b.norm && key < b.key)
            }
        };
        if improves {
            if let Some(unit_of) = assign_units(&slices, &names, units, kappa) {
                best = Some(Incumbent {
                    solved,
                    norm,
                    key,
                    slices,
                    unit_of,
                });
            }
        }

        let mut pos = 0;
        loop {
            if pos == digits.len() {
                let Incumbent {
                    solved,
                    norm,
                    slices,
                    unit_of,
                    ..
                } = best.expect("all-zero vector is feasible");
                let schedule = Schedule::new(m.solvers().to_vec(), slices, unit_of, units, kappa)?;
                return Ok(BruteSchedule { solved, norm, schedule });
            }
            digits[pos] += 1;
            if digits[pos] < cands[pos].len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// First feasible assignment of the scheduled solvers (in name order) to
/// units, counting masks upward with the first solver as the top bit.
fn assign_units(slices: &[u64], names: &[usize], units: usize, kappa: u64) -> Option<Vec<Option<usize>>> {
    let items: Vec<usize> = names.iter().copied().filter(|&s| slices[s] > 0).collect();
    let mut unit_of = vec![None; slices.len()];
    if units == 1 {
        if items.iter().map(|&s| slices[s]).sum::<u64>() > kappa {
            return None;
        }
        for &s in &items {
            unit_of[s] = Some(0);
        }
        return Some(unit_of);
    }
    if items.is_empty() {
        return Some(unit_of);
    }
    let k = items.len();
    for mask in 0u64..(1u64 << (k - 1)) {
        let mut load = [0u64; 2];
        for (j, &s) in items.iter().enumerate() {
            let u = ((mask >> (k - 1 - j)) & 1) as usize;
            load[u] += slices[s];
            unit_of[s] = Some(u);
        }
        if load[0] <= kappa && load[1] <= kappa {
            return Some(unit_of);
        }
    }
    None
}

/// Fastest alignment by full sweep; ties go to the first order in
/// lexicographic name order.
pub fn enumerate_alignments(m: &RuntimeMatrix, schedule: &Schedule) -> Result<(u64, Alignment)> {
    schedule.check_solvers(m)?;
    if schedule.num_scheduled() > MAX_ALIGNED_SOLVERS {
        return Err(Error::TooLarge(format!(
            "{} scheduled solvers, at most {MAX_ALIGNED_SOLVERS}",
            schedule.num_scheduled()
        )));
    }
    let units: Vec<Vec<usize>> = Alignment::name_order(schedule).units().to_vec();
    let per_unit: Vec<Vec<Vec<usize>>> = units.iter().map(|u| permutations(u)).collect();
    let mut best: Option<(u64, Alignment)> = None;
    let mut idx = vec![0usize; units.len()];
    loop {
        let order = idx.iter().enumerate().map(|(u, &p)| per_unit[u][p].clone()).collect();
        let alignment = Alignment::new(schedule, order)?;
        let total = total_time(m, schedule, &alignment);
        if best.as_ref().is_none_or(|(t, _)| total < *t) {
            best = Some((total, alignment));
        }
        // last unit varies fastest so unit 0 is the most significant
        let mut u = units.len();
        loop {
            if u == 0 {
                return Ok(best.expect("at least one alignment"));
            }
            u -= 1;
            idx[u] += 1;
            if idx[u] < per_unit[u].len() {
                break;
            }
            idx[u] = 0;
        }
    }
}

/// All permutations of `items` in lexicographic order of positions.
fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for j in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(j);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}
