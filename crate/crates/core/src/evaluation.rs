//! Cross-validation of scheduling systems and the reduced-training-cutoff
//! study.
//!
//! Instances are shuffled with a seeded ChaCha8 generator and dealt
//! round-robin into folds. Each system is trained on all folds but one and
//! scored on the held-out fold at the full cutoff. Training ignores
//! instances that no solver solves at the training cutoff; test folds keep
//! them.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{heu_min, heu_opt, optimal_alignment, AlignConfig};
use crate::baselines::{ppfolio_like, single_best_schedule, uniform_schedule};
use crate::error::{Error, Result};
use crate::matrix::RuntimeMatrix;
use crate::optimizer::{optimize, OptimizerConfig};
use crate::schedule::{evaluate, Alignment, Outcome, Schedule};

pub const PAR_FACTOR: u64 = 10;

/// A seeded partition of the instance indices into `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    pub k: usize,
    pub seed: u64,
    /// Instance indices per fold, ascending.
    pub partition: Vec<Vec<usize>>,
}

impl FoldSpec {
    /// Every instance not in fold `f`, ascending.
    pub fn training(&self, f: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .partition
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, part)| part.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

pub fn k_fold(m: &RuntimeMatrix, k: usize, seed: u64) -> Result<FoldSpec> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {k}")));
    }
    if k > m.num_instances() {
        return Err(Error::InvalidArgument(format!(
            "{k} folds but only {} instances",
            m.num_instances()
        )));
    }
    let mut order: Vec<usize> = (0..m.num_instances()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut partition = vec![Vec::new(); k];
    for (j, i) in order.into_iter().enumerate() {
        partition[j % k].push(i);
    }
    for part in &mut partition {
        part.sort_unstable();
    }
    Ok(FoldSpec { k, seed, partition })
}

/// Mean of the effective time with every unsolved instance counted as ten
/// times the cutoff. Zero for an empty outcome list.
pub fn par10(m: &RuntimeMatrix, outcomes: &[Outcome]) -> Ratio<u128> {
    if outcomes.is_empty() {
        return Ratio::from_integer(0);
    }
    Ratio::new(penalized(m.cutoff(), outcomes), outcomes.len() as u128)
}

fn penalized(cutoff: u64, outcomes: &[Outcome]) -> u128 {
    outcomes
        .iter()
        .map(|o| if o.solved { o.tau } else { PAR_FACTOR * cutoff } as u128)
        .sum()
}

/// How the optimized system orders the solvers on each unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum AlignMode {
    #[default]
    Exact,
    HeuOpt,
    HeuMin,
}

impl AlignMode {
    pub fn name(self) -> &'static str {
        match self {
            AlignMode::Exact => "exact",
            AlignMode::HeuOpt => "heu-opt",
            AlignMode::HeuMin => "heu-min",
        }
    }

    pub fn align(self, m: &RuntimeMatrix, schedule: &Schedule, cfg: &AlignConfig) -> Result<Alignment> {
        Ok(match self {
            AlignMode::Exact => optimal_alignment(m, schedule, cfg)?.alignment,
            AlignMode::HeuOpt => heu_opt(m, schedule)?,
            AlignMode::HeuMin => heu_min(schedule),
        })
    }
}

impl FromStr for AlignMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(AlignMode::Exact),
            "heu-opt" => Ok(AlignMode::HeuOpt),
            "heu-min" => Ok(AlignMode::HeuMin),
            other => Err(Error::InvalidArgument(format!("unknown alignment mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum System {
    Optimized(AlignMode),
    Uniform,
    PpfolioLike,
    SingleBest,
    Oracle,
}

impl System {
    pub const ALL: [System; 5] = [
        System::Optimized(AlignMode::Exact),
        System::Uniform,
        System::PpfolioLike,
        System::SingleBest,
        System::Oracle,
    ];

    fn data_free(self) -> bool {
        matches!(self, System::Uniform | System::Oracle)
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            System::Optimized(AlignMode::Exact) => f.write_str("optimized"),
            System::Optimized(mode) => write!(f, "optimized:{}", mode.name()),
            System::Uniform => f.write_str("uniform"),
            System::PpfolioLike => f.write_str("ppfolio-like"),
            System::SingleBest => f.write_str("single-best"),
            System::Oracle => f.write_str("oracle"),
        }
    }
}

impl FromStr for System {
    type Err = Error;

    /// Accepts `optimized` (alias `aspeed`) with an optional alignment-mode
    /// suffix such as `:heu-min`, and the baseline names.
    fn from_str(s: &str) -> Result<Self> {
        let (head, mode) = match s.split_once(':') {
            Some((head, mode)) => (head, Some(mode)),
            None => (s, None),
        };
        let system = match head {
            "optimized" | "aspeed" => System::Optimized(mode.map(str::parse).transpose()?.unwrap_or_default()),
            "uniform" => System::Uniform,
            "ppfolio-like" | "ppfolio" => System::PpfolioLike,
            "single-best" => System::SingleBest,
            "oracle" => System::Oracle,
            other => return Err(Error::InvalidArgument(format!("unknown system `{other}`"))),
        };
        if mode.is_some() && !matches!(system, System::Optimized(_)) {
            return Err(Error::InvalidArgument(format!(
                "system `{head}` takes no alignment mode"
            )));
        }
        Ok(system)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalConfig {
    pub optimizer: OptimizerConfig,
    pub align: AlignConfig,
}

impl EvalConfig {
    pub fn with_units(units: usize) -> Self {
        Self {
            optimizer: OptimizerConfig::with_units(units),
            align: AlignConfig::default(),
        }
    }
}

enum Trained {
    Portfolio(Schedule, Alignment),
    Oracle,
}

/// Builds `system` from `train` (already clamped to the training cutoff)
/// and lifts the schedule to `cutoff`.
fn train(system: System, train: &RuntimeMatrix, cutoff: u64, cfg: &EvalConfig) -> Result<Trained> {
    let units = cfg.optimizer.units;
    let schedule = match system {
        System::Oracle => return Ok(Trained::Oracle),
        System::Uniform => {
            let schedule = uniform_schedule(train, units)?.retarget(cutoff)?;
            let alignment = heu_min(&schedule);
            return Ok(Trained::Portfolio(schedule, alignment));
        }
        System::Optimized(_) => optimize(train, &cfg.optimizer)?.schedule,
        System::PpfolioLike => ppfolio_like(train, &cfg.optimizer)?,
        System::SingleBest => single_best_schedule(train, units)?,
    };
    let schedule = schedule.redistribute_slack();
    let alignment = match system {
        System::Optimized(mode) => mode.align(train, &schedule, &cfg.align)?,
        _ => heu_min(&schedule),
    };
    Ok(Trained::Portfolio(schedule.retarget(cutoff)?, alignment))
}

/// One system on one fold, or the sum over folds when `fold` is `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub system: String,
    pub fold: Option<usize>,
    pub train_cutoff: u64,
    pub instances: usize,
    pub solved: usize,
    pub timeouts: usize,
    /// Sum of effective times, unsolved instances counted at the cutoff.
    pub total_runtime: u64,
    /// Sum with unsolved instances counted at ten times the cutoff.
    pub penalized_runtime: u128,
    /// Training fold held no instance any solver solves.
    pub flagged: bool,
}

impl Row {
    pub fn par10(&self) -> Ratio<u128> {
        ratio_or_zero(self.penalized_runtime, self.instances)
    }

    pub fn avg_runtime(&self) -> Ratio<u128> {
        ratio_or_zero(self.total_runtime as u128, self.instances)
    }
}

fn ratio_or_zero(sum: u128, n: usize) -> Ratio<u128> {
    if n == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(sum, n as u128)
    }
}

/// Four decimals, rounded half up, computed in integers.
pub fn fixed_decimal(r: Ratio<u128>) -> String {
    let scaled = (r * Ratio::from_integer(10_000u128) + Ratio::new(1, 2))
        .floor()
        .to_integer();
    format!("{}.{:04}", scaled / 10_000, scaled % 10_000)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<Row>,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    system: &'a str,
    fold: Option<usize>,
    train_cutoff: u64,
    instances: usize,
    solved: usize,
    timeouts: usize,
    total_runtime: u64,
    par10: String,
    avg_runtime: String,
    flagged: bool,
}

impl Report {
    /// Aggregate rows only.
    pub fn aggregates(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.fold.is_none())
    }

    pub fn aggregate(&self, system: &str, train_cutoff: u64) -> Option<&Row> {
        self.aggregates()
            .find(|r| r.system == system && r.train_cutoff == train_cutoff)
    }

    pub fn folds<'a>(&'a self, system: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.fold.is_some() && r.system == system)
    }

    /// Long-format CSV, one line per row; folds are numbered from 1 and the
    /// aggregate row uses `all`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "system,fold,train_cutoff,instances,solved,timeouts,total_runtime,par10,avg_runtime,flagged"
        )?;
        for r in &self.rows {
            let fold = r.fold.map_or_else(|| "all".to_string(), |f| (f + 1).to_string());
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.system,
                fold,
                r.train_cutoff,
                r.instances,
                r.solved,
                r.timeouts,
                r.total_runtime,
                fixed_decimal(r.par10()),
                fixed_decimal(r.avg_runtime()),
                r.flagged
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// JSON array mirroring the CSV columns; folds numbered from 1.
    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<JsonRow<'_>> = self
            .rows
            .iter()
            .map(|r| JsonRow {
                system: &r.system,
                fold: r.fold.map(|f| f + 1),
                train_cutoff: r.train_cutoff,
                instances: r.instances,
                solved: r.solved,
                timeouts: r.timeouts,
                total_runtime: r.total_runtime,
                par10: fixed_decimal(r.par10()),
                avg_runtime: fixed_decimal(r.avg_runtime()),
                flagged: r.flagged,
            })
            .collect();
        Ok(serde_json::to_string_pretty(&rows)?)
    }
}

/// Trains and scores every system on every fold. Runtimes in the report are
/// in matrix time units.
pub fn cross_validate(m: &RuntimeMatrix, systems: &[System], folds: &FoldSpec, cfg: &EvalConfig) -> Result<Report> {
    cross_validate_at(m, systems, folds, cfg, m.cutoff())
}

fn cross_validate_at(
    m: &RuntimeMatrix,
    systems: &[System],
    folds: &FoldSpec,
    cfg: &EvalConfig,
    train_cutoff: u64,
) -> Result<Report> {
    if folds.k < 2 || folds.partition.len() != folds.k {
        return Err(Error::InvalidArgument(
            "fold specification needs at least 2 folds".into(),
        ));
    }
    let covered: usize = folds.partition.iter().map(Vec::len).sum();
    if covered != m.num_instances() || folds.partition.iter().flatten().any(|&i| i >= m.num_instances()) {
        return Err(Error::Mismatch("folds do not partition the instances".into()));
    }
    let clamped = m.with_cutoff(train_cutoff)?;
    let per_fold: Vec<Result<Vec<Row>>> = (0..folds.k)
        .into_par_iter()
        .map(|f| {
            let solvable: Vec<usize> = folds
                .training(f)
                .into_iter()
                .filter(|&i| (0..m.num_solvers()).any(|s| !clamped.is_timeout(i, s)))
                .collect();
            let flagged = solvable.is_empty();
            let training = clamped.restrict_indices(&solvable);
            let test = m.restrict_indices(&folds.partition[f]);
            systems
                .iter()
                .map(|&system| {
                    let trained = if system.data_free() {
                        train(system, &m.restrict_indices(&[]), m.cutoff(), cfg)?
                    } else {
                        train(system, &training, m.cutoff(), cfg)?
                    };
                    let outcomes = score(&test, &trained);
                    Ok(row(system, Some(f), train_cutoff, &test, &outcomes, flagged))
                })
                .collect()
        })
        .collect();

    let mut fold_rows = Vec::with_capacity(folds.k);
    for rows in per_fold {
        fold_rows.push(rows?);
    }
    let mut report = Report::default();
    for (j, &system) in systems.iter().enumerate() {
        let mut agg = Row {
            system: system.to_string(),
            fold: None,
            train_cutoff,
            instances: 0,
            solved: 0,
            timeouts: 0,
            total_runtime: 0,
            penalized_runtime: 0,
            flagged: false,
        };
        for rows in &fold_rows {
            let r = &rows[j];
            agg.instances += r.instances;
            agg.solved += r.solved;
            agg.timeouts += r.timeouts;
            agg.total_runtime += r.total_runtime;
            agg.penalized_runtime += r.penalized_runtime;
            agg.flagged |= r.flagged;
            report.rows.push(r.clone());
        }
        report.rows.push(agg);
    }
    Ok(report)
}

fn score(test: &RuntimeMatrix, trained: &Trained) -> Vec<Outcome> {
    match trained {
        Trained::Portfolio(schedule, alignment) => evaluate(test, schedule, alignment),
        Trained::Oracle => (0..test.num_instances())
            .map(|i| {
                let t = test.oracle_time(i);
                let solved = t < test.cutoff();
                Outcome {
                    tau: t,
                    solved,
                    unit: solved.then_some(0),
                    solver: if solved {
                        (0..test.num_solvers()).find(|&s| test.runtime(i, s) == t)
                    } else {
                        None
                    },
                }
            })
            .collect(),
    }
}

fn row(
    system: System,
    fold: Option<usize>,
    train_cutoff: u64,
    test: &RuntimeMatrix,
    outcomes: &[Outcome],
    flagged: bool,
) -> Row {
    let solved = outcomes.iter().filter(|o| o.solved).count();
    Row {
        system: system.to_string(),
        fold,
        train_cutoff,
        instances: outcomes.len(),
        solved,
        timeouts: outcomes.len() - solved,
        total_runtime: outcomes.iter().map(|o| o.tau).sum(),
        penalized_runtime: penalized(test.cutoff(), outcomes),
        flagged,
    }
}

/// Training cutoff for a ratio of the full cutoff, rounded to the nearest
/// time unit.
pub fn reduced_cutoff(cutoff: u64, ratio: f64) -> Result<u64> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidArgument(format!("cutoff ratio {ratio} outside (0, 1]")));
    }
    let reduced = (cutoff as f64 * ratio).round() as u64;
    if reduced < 1 {
        return Err(Error::InvalidArgument(format!(
            "cutoff ratio {ratio} leaves less than one time unit of {cutoff}"
        )));
    }
    Ok(reduced)
}

/// `count` ratios `1, q, q^2, ...`.
pub fn geometric_ratios(q: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| q.powi(j as i32)).collect()
}

/// Cross-validation with training cutoffs `round(cutoff * ratio)` and
/// testing at the full cutoff; rows carry their training cutoff.
pub fn reduced_cutoff_study(
    m: &RuntimeMatrix,
    systems: &[System],
    ratios: &[f64],
    folds: &FoldSpec,
    cfg: &EvalConfig,
) -> Result<Report> {
    let mut report = Report::default();
    for &ratio in ratios {
        let reduced = reduced_cutoff(m.cutoff(), ratio)?;
        report
            .rows
            .extend(cross_validate_at(m, systems, folds, cfg, reduced)?.rows);
    }
    Ok(report)
}
