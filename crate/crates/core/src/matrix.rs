//! Recorded runtime tables.
//!
//! A [`RuntimeMatrix`] stores one discretized runtime per instance/solver
//! pair. Times are integers in units of `1/scale` seconds; any value at or
//! above the cutoff is a timeout and is stored as exactly the cutoff.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Literal accepted in the `time` column for a run that hit the cutoff.
pub const TIMEOUT_LITERAL: &str = "timeout";

/// Immutable runtime table with cutoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeMatrix {
    instances: Vec<String>,
    solvers: Vec<String>,
    /// Instance-major: `runtime[i * solvers.len() + s]`.
    runtime: Vec<u64>,
    cutoff: u64,
    scale: u64,
    instance_index: HashMap<String, usize>,
    solver_index: HashMap<String, usize>,
}

/// Timeouts and summed runtime of the virtual best solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub timeouts: usize,
    pub total_time: u64,
}

impl RuntimeMatrix {
    /// Builds a matrix from instance-major runtimes already expressed in time
    /// units. Values above the cutoff are clamped to it.
    pub fn new(
        instances: Vec<String>,
        solvers: Vec<String>,
        mut runtime: Vec<u64>,
        cutoff: u64,
        scale: u64,
    ) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidArgument("cutoff must be positive".into()));
        }
        if scale == 0 {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        if runtime.len() != instances.len() * solvers.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} runtimes for {} instances and {} solvers, got {}",
                instances.len() * solvers.len(),
                instances.len(),
                solvers.len(),
                runtime.len()
            )));
        }
        let instance_index = index_of(&instances, "instance")?;
        let solver_index = index_of(&solvers, "solver")?;
        for value in &mut runtime {
            *value = (*value).clamp(1, cutoff);
        }
        Ok(Self {
            instances,
            solvers,
            runtime,
            cutoff,
            scale,
            instance_index,
            solver_index,
        })
    }

    pub fn instances(&self) -> &[String] {
        &self.instances
    }

    pub fn solvers(&self) -> &[String] {
        &self.solvers
    }

    pub fn num_instances(&self) -> usize {
        self.instances.len()
    }

    pub fn num_solvers(&self) -> usize {
        self.solvers.len()
    }

    /// Cutoff in time units.
    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// Time units per second.
    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn instance_index(&self, name: &str) -> Option<usize> {
        self.instance_index.get(name).copied()
    }

    pub fn solver_index(&self, name: &str) -> Option<usize> {
        self.solver_index.get(name).copied()
    }

    /// Runtime of solver `s` on instance `i` (both by index).
    #[inline]
    pub fn runtime(&self, i: usize, s: usize) -> u64 {
        self.runtime[i * self.solvers.len() + s]
    }

    pub fn runtime_of(&self, instance: &str, solver: &str) -> Result<u64> {
        let i = self
            .instance_index(instance)
            .ok_or_else(|| Error::UnknownInstance(instance.to_string()))?;
        let s = self
            .solver_index(solver)
            .ok_or_else(|| Error::UnknownSolver(solver.to_string()))?;
        Ok(self.runtime(i, s))
    }

    #[inline]
    pub fn is_timeout(&self, i: usize, s: usize) -> bool {
        self.runtime(i, s) >= self.cutoff
    }

    /// Whether solver `s` given `slice` time units finishes instance `i`.
    /// A timed-out run is never covered, whatever the slice.
    #[inline]
    pub fn solves(&self, i: usize, s: usize, slice: u64) -> bool {
        let t = self.runtime(i, s);
        t < self.cutoff && t <= slice
    }

    /// Best runtime over all solvers; equals the cutoff iff nothing solves `i`.
    pub fn oracle_time(&self, i: usize) -> u64 {
        (0..self.solvers.len())
            .map(|s| self.runtime(i, s))
            .min()
            .unwrap_or(self.cutoff)
    }

    pub fn oracle_time_of(&self, instance: &str) -> Result<u64> {
        let i = self
            .instance_index(instance)
            .ok_or_else(|| Error::UnknownInstance(instance.to_string()))?;
        Ok(self.oracle_time(i))
    }

    pub fn oracle_report(&self) -> OracleReport {
        let mut report = OracleReport {
            timeouts: 0,
            total_time: 0,
        };
        for i in 0..self.instances.len() {
            let t = self.oracle_time(i);
            if t >= self.cutoff {
                report.timeouts += 1;
            }
            report.total_time += t;
        }
        report
    }

    /// Number of instances on which solver `s` times out.
    pub fn timeouts(&self, s: usize) -> usize {
        (0..self.instances.len()).filter(|&i| self.is_timeout(i, s)).count()
    }

    /// Summed runtime of solver `s`, timeouts counted as the cutoff.
    pub fn total_runtime(&self, s: usize) -> u64 {
        (0..self.instances.len()).map(|i| self.runtime(i, s)).sum()
    }

    /// Instances solved by at least one solver.
    pub fn solvable_instances(&self) -> Vec<usize> {
        (0..self.instances.len())
            .filter(|&i| self.oracle_time(i) < self.cutoff)
            .collect()
    }

    /// Solver indices sorted by name.
    pub fn solvers_by_name(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.solvers.len()).collect();
        order.sort_by(|&a, &b| self.solvers[a].cmp(&self.solvers[b]));
        order
    }

    /// Index of the solver minimizing (timeouts, total runtime, name).
    pub fn single_best_index(&self) -> Option<usize> {
        (0..self.solvers.len()).min_by(|&a, &b| {
            (self.timeouts(a), self.total_runtime(a), &self.solvers[a]).cmp(&(
                self.timeouts(b),
                self.total_runtime(b),
                &self.solvers[b],
            ))
        })
    }

    pub fn single_best(&self) -> Option<&str> {
        self.single_best_index().map(|s| self.solvers[s].as_str())
    }

    /// Copy restricted to the named instances, in the original order.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let mut selected = Vec::with_capacity(keep.len());
        for name in keep {
            let name = name.as_ref();
            let i = self
                .instance_index(name)
                .ok_or_else(|| Error::UnknownInstance(name.to_string()))?;
            selected.push(i);
        }
        selected.sort_unstable();
        selected.dedup();
        Ok(self.restrict_indices(&selected))
    }

    /// Copy restricted to instance indices, kept in the order given.
    pub fn restrict_indices(&self, keep: &[usize]) -> Self {
        let instances: Vec<String> = keep.iter().map(|&i| self.instances[i].clone()).collect();
        let mut runtime = Vec::with_capacity(keep.len() * self.solvers.len());
        for &i in keep {
            runtime.extend((0..self.solvers.len()).map(|s| self.runtime(i, s)));
        }
        Self {
            instance_index: instances
                .iter()
                .enumerate()
                .map(|(k, name)| (name.clone(), k))
                .collect(),
            instances,
            solvers: self.solvers.clone(),
            runtime,
            cutoff: self.cutoff,
            scale: self.scale,
            solver_index: self.solver_index.clone(),
        }
    }

    /// Copy keeping only the named solvers, in the original order.
    pub fn restrict_solvers<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let mut selected = Vec::with_capacity(keep.len());
        for name in keep {
            let name = name.as_ref();
            selected.push(
                self.solver_index(name)
                    .ok_or_else(|| Error::UnknownSolver(name.to_string()))?,
            );
        }
        selected.sort_unstable();
        selected.dedup();
        let solvers: Vec<String> = selected.iter().map(|&s| self.solvers[s].clone()).collect();
        let mut runtime = Vec::with_capacity(self.instances.len() * selected.len());
        for i in 0..self.instances.len() {
            runtime.extend(selected.iter().map(|&s| self.runtime(i, s)));
        }
        Ok(Self {
            solver_index: solvers.iter().enumerate().map(|(k, n)| (n.clone(), k)).collect(),
            solvers,
            runtime,
            instances: self.instances.clone(),
            instance_index: self.instance_index.clone(),
            cutoff: self.cutoff,
            scale: self.scale,
        })
    }

    /// Copy with a lower cutoff; every runtime at or above it becomes a timeout.
    pub fn with_cutoff(&self, cutoff: u64) -> Result<Self> {
        if cutoff == 0 || cutoff > self.cutoff {
            return Err(Error::InvalidArgument(format!(
                "cutoff {cutoff} outside 1..={}",
                self.cutoff
            )));
        }
        let mut out = self.clone();
        out.cutoff = cutoff;
        for value in &mut out.runtime {
            *value = (*value).min(cutoff);
        }
        Ok(out)
    }

    /// Writes the normalized table as `instance,solver,time` rows in integer
    /// time units, timeouts as `timeout`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["instance", "solver", "time"])?;
        for (i, instance) in self.instances.iter().enumerate() {
            for (s, solver) in self.solvers.iter().enumerate() {
                let time = if self.is_timeout(i, s) {
                    TIMEOUT_LITERAL.to_string()
                } else {
                    self.runtime(i, s).to_string()
                };
                out.write_record([instance.as_str(), solver.as_str(), time.as_str()])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

fn index_of(names: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (k, name) in names.iter().enumerate() {
        if index.insert(name.clone(), k).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate {what} `{name}`")));
        }
    }
    Ok(index)
}

/// Parses a `instance,solver,time` CSV. `cutoff` is in seconds; times are
/// multiplied by `scale` and rounded up to whole units, with a floor of one.
pub fn parse_runtimes<R: Read>(source: R, cutoff: u64, scale: u64) -> Result<RuntimeMatrix> {
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff must be positive".into()));
    }
    if scale == 0 {
        return Err(Error::InvalidArgument("scale must be positive".into()));
    }
    let kappa = cutoff
        .checked_mul(scale)
        .ok_or_else(|| Error::InvalidArgument("cutoff * scale overflows".into()))?;

    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let header = reader.headers()?.clone();
    let columns: Vec<&str> = header.iter().collect();
    if columns != ["instance", "solver", "time"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `instance,solver,time`, found `{}`", columns.join(",")),
        });
    }

    let mut instances = Vec::new();
    let mut solvers = Vec::new();
    let mut instance_index: HashMap<String, usize> = HashMap::new();
    let mut solver_index: HashMap<String, usize> = HashMap::new();
    let mut cells: HashMap<(usize, usize), u64> = HashMap::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();

    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let (instance, solver, time) = (&record[0], &record[1], &record[2]);
        if instance.is_empty() || solver.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty instance or solver name".into(),
            });
        }
        let value = parse_time(time, kappa, scale).map_err(|message| Error::Parse { line, message })?;
        let i = *instance_index.entry(instance.to_string()).or_insert_with(|| {
            instances.push(instance.to_string());
            instances.len() - 1
        });
        let s = *solver_index.entry(solver.to_string()).or_insert_with(|| {
            solvers.push(solver.to_string());
            solvers.len() - 1
        });
        if !seen.insert((i, s)) {
            return Err(Error::DuplicatePair {
                line,
                instance: instance.to_string(),
                solver: solver.to_string(),
            });
        }
        cells.insert((i, s), value);
    }

    let mut runtime = Vec::with_capacity(instances.len() * solvers.len());
    for (i, instance) in instances.iter().enumerate() {
        for (s, solver) in solvers.iter().enumerate() {
            match cells.get(&(i, s)) {
                Some(&v) => runtime.push(v),
                None => {
                    return Err(Error::MissingPair {
                        instance: instance.clone(),
                        solver: solver.clone(),
                    })
                }
            }
        }
    }
    RuntimeMatrix::new(instances, solvers, runtime, kappa, scale)
}

/// Converts one `time` cell to units: `ceil(seconds * scale)` clamped to
/// `1..=kappa`.
fn parse_time(text: &str, kappa: u64, scale: u64) -> std::result::Result<u64, String> {
    if text.eq_ignore_ascii_case(TIMEOUT_LITERAL) {
        return Ok(kappa);
    }
    let units = match parse_plain_decimal(text) {
        Some((numerator, denominator)) => {
            // ceil(numerator * scale / denominator) without floating point
            match numerator.checked_mul(scale as u128) {
                Some(scaled) => {
                    let q = scaled.div_ceil(denominator);
                    u64::try_from(q).unwrap_or(u64::MAX)
                }
                None => u64::MAX,
            }
        }
        None => {
            let seconds: f64 = text.parse().map_err(|_| format!("invalid time `{text}`"))?;
            if !seconds.is_finite() || seconds < 0.0 {
                return Err(format!("invalid time `{text}`"));
            }
            let scaled = (seconds * scale as f64).ceil();
            if scaled >= u64::MAX as f64 {
                u64::MAX
            } else {
                scaled as u64
            }
        }
    };
    Ok(units.clamp(1, kappa))
}

/// `digits[.digits]` as an exact fraction, or `None` for anything else.
fn parse_plain_decimal(text: &str) -> Option<(u128, u128)> {
    let text = text.strip_prefix('+').unwrap_or(text);
    let (int_part, frac_part) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    // Keep the arithmetic in range; longer inputs go through the float path.
    if int_part.len() + frac_part.len() > 30 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numerator: u128 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let denominator = 10u128.pow(frac_part.len() as u32);
    Some((numerator, denominator))
}
