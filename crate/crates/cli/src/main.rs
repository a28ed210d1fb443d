use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use portsched::asp::{export_facts, export_schedule_facts, write_encodings, IdentifierMap};
use portsched::evaluation::fixed_decimal;
use portsched::{
    combined_optimize, cross_validate, heu_min, heu_opt, k_fold, load_commands, optimal_alignment,
    optimize_constrained, parse_runtimes, random_alignment_expectation, reduced_cutoff_study, run, total_time,
    AlignConfig, Alignment, Constraints, EvalConfig, NormDirection, OptimizerConfig, RunOptions, RuntimeMatrix,
    Schedule, ScheduleDocument, System,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_BUDGET: u8 = 4;

/// Solver schedules from recorded runtimes: optimize slices, order them,
/// cross-validate against baselines and run the result on real solvers.
#[derive(Debug, Parser)]
#[command(name = "portsched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a timeout-optimal schedule and write it as JSON.
    Optimize(OptimizeArgs),
    /// Order the solvers of a schedule to minimize total runtime.
    Align(AlignArgs),
    /// Cross-validate portfolio systems and write a CSV and JSON report.
    Evaluate(EvaluateArgs),
    /// Write answer set programming facts for the runtime data or a schedule.
    ExportAsp(ExportArgs),
    /// Execute a schedule on one instance with real solver commands.
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Runtime table with header `instance,solver,time`.
    #[arg(long)]
    runtimes: PathBuf,
    /// Cutoff in seconds.
    #[arg(long)]
    cutoff: u64,
    /// Time units per second; times are rounded up to whole units.
    #[arg(long, default_value_t = 1)]
    scale: u64,
}

impl DataArgs {
    fn load(&self) -> Result<RuntimeMatrix> {
        let file = File::open(&self.runtimes).with_context(|| format!("opening {}", self.runtimes.display()))?;
        parse_runtimes(file, self.cutoff, self.scale).with_context(|| format!("reading {}", self.runtimes.display()))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NormDir {
    Min,
    Max,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of parallel processing units.
    #[arg(long, default_value_t = 1)]
    units: usize,
    /// Exponent of the tie-breaking slice norm.
    #[arg(long, default_value_t = 2)]
    norm: u32,
    /// Whether ties prefer small or large slices.
    #[arg(long, value_enum, default_value_t = NormDir::Min)]
    norm_dir: NormDir,
    /// Search budget in seconds; the best schedule found so far is written
    /// when it expires.
    #[arg(long, value_parser = parse_seconds)]
    time_limit: Option<Duration>,
    /// At most this many solvers on every unit.
    #[arg(long)]
    max_per_unit: Option<usize>,
    /// Give every solver on a unit the same share of the cutoff.
    #[arg(long)]
    uniform: bool,
    /// Restrict a solver to one unit, as `solver=unit` with units from 1.
    #[arg(long, value_parser = parse_pin)]
    pin: Vec<(String, usize)>,
    /// Fail with exit code 3 unless at least this many instances are solved.
    #[arg(long)]
    min_solved: Option<usize>,
    /// Spread unused time on each unit over its solvers.
    #[arg(long)]
    fill_slack: bool,
    /// Optimize slices and order together for the least total runtime
    /// among schedules of maximal coverage, and write the order too.
    #[arg(long, conflicts_with_all = ["max_per_unit", "uniform", "pin", "min_solved"])]
    joint: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    HeuOpt,
    HeuMin,
    RandomExpect,
}

#[derive(Debug, Args)]
struct AlignArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Schedule JSON as written by `optimize`.
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Seed for sampled random orders.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random orders sampled when there are too many to enumerate.
    #[arg(long, default_value_t = portsched::alignment::DEFAULT_SAMPLES)]
    samples: usize,
    /// Budget in seconds for the exact search on large schedules.
    #[arg(long, value_parser = parse_seconds)]
    time_limit: Option<Duration>,
    /// Output file for the ordered schedule; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Seed for the fold split.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated systems: optimized[:exact|heu-opt|heu-min], uniform,
    /// ppfolio-like, single-best, oracle.
    #[arg(long, value_delimiter = ',', value_parser = parse_system)]
    systems: Option<Vec<System>>,
    #[arg(long, default_value_t = 1)]
    units: usize,
    /// Train at `round(cutoff * ratio)` and test at the full cutoff;
    /// comma-separated for several ratios.
    #[arg(long, value_delimiter = ',')]
    train_cutoff_ratio: Option<Vec<f64>>,
    /// Search budget in seconds per optimized training run.
    #[arg(long, value_parser = parse_seconds)]
    time_limit: Option<Duration>,
    /// CSV report path; the JSON report goes next to it. Standard output
    /// when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 1)]
    units: usize,
    /// Emit `slice/3` facts for this schedule JSON instead of runtime facts.
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Write the name to constant table here.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Write the bundled encodings into this directory.
    #[arg(long)]
    encodings: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Schedule JSON; entry positions give the order, otherwise shortest
    /// slices run first.
    #[arg(long)]
    schedule: PathBuf,
    /// Solver commands as TOML, or JSON for a `.json` file.
    #[arg(long)]
    commands: PathBuf,
    /// Instance path substituted for `{instance}`.
    #[arg(long)]
    instance: PathBuf,
    /// Wall-clock milliseconds per schedule time unit.
    #[arg(long, default_value_t = 1000)]
    unit_ms: u64,
    /// Milliseconds between SIGTERM and SIGKILL.
    #[arg(long, default_value_t = 1000)]
    grace_ms: u64,
    /// Keep each attempt's output under this directory.
    #[arg(long)]
    run_dir: Option<PathBuf>,
    /// Output file for the result JSON; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_seconds(text: &str) -> std::result::Result<Duration, String> {
    let secs: f64 = text
        .parse()
        .map_err(|_| format!("`{text}` is not a number of seconds"))?;
    Duration::try_from_secs_f64(secs).map_err(|e| e.to_string())
}

fn parse_pin(text: &str) -> std::result::Result<(String, usize), String> {
    let (solver, unit) = text.rsplit_once('=').ok_or("expected `solver=unit`")?;
    let unit: usize = unit.parse().map_err(|_| format!("`{unit}` is not a unit number"))?;
    if unit == 0 || solver.is_empty() {
        return Err("expected `solver=unit` with units numbered from 1".into());
    }
    Ok((solver.to_string(), unit - 1))
}

fn parse_system(text: &str) -> std::result::Result<System, String> {
    text.parse().map_err(|e: portsched::Error| e.to_string())
}

/// Whether a search finished or stopped at its budget.
enum Status {
    Done,
    Expired,
}

/// Writes `text` with a trailing newline.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.is_empty() && !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Summary lines go to standard output when the payload went to a file.
fn report_line(out: Option<&Path>, line: &str) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn load_schedule(path: &Path, m: &RuntimeMatrix) -> Result<(Schedule, Option<Alignment>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = ScheduleDocument::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    let loaded = doc
        .to_schedule(m.solvers())
        .with_context(|| format!("loading {}", path.display()))?;
    if loaded.0.cutoff() != m.cutoff() {
        return Err(portsched::Error::Mismatch(format!(
            "schedule cutoff {} but runtime cutoff {}",
            loaded.0.cutoff(),
            m.cutoff()
        ))
        .into());
    }
    Ok(loaded)
}

fn order_text(schedule: &Schedule, alignment: &Alignment) -> String {
    alignment
        .names(schedule)
        .iter()
        .map(|unit| format!("({})", unit.join(",")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<Status> {
    let m = args.data.load()?;
    let config = OptimizerConfig {
        units: args.units,
        time_budget: args.time_limit,
        norm_exponent: args.norm,
        norm_direction: match args.norm_dir {
            NormDir::Min => NormDirection::Minimize,
            NormDir::Max => NormDirection::Maximize,
        },
    };
    let out = args.out.as_deref();
    if args.joint {
        let best = combined_optimize(&m, &config)?;
        let schedule = best.schedule.clone();
        emit(out, &ScheduleDocument::new(&schedule, Some(&best.alignment)).to_json()?)?;
        let state = if best.optimal { "optimal" } else { "budget expired" };
        report_line(
            out,
            &format!(
                "solved {}/{} total {} order {} {state}",
                best.solved,
                m.num_instances(),
                best.total_time,
                order_text(&schedule, &best.alignment)
            ),
        );
        return Ok(if best.optimal { Status::Done } else { Status::Expired });
    }

    let mut constraints = Constraints::default();
    constraints.default.max_solvers = args.max_per_unit;
    constraints.default.uniform = args.uniform;
    constraints.pins = args.pin.iter().cloned().collect();
    constraints.min_solved = args.min_solved;
    let best = optimize_constrained(&m, &config, &constraints)?;
    let schedule = if args.fill_slack {
        best.schedule.redistribute_slack()
    } else {
        best.schedule.clone()
    };
    emit(out, &ScheduleDocument::new(&schedule, None).to_json()?)?;
    let state = if best.optimal { "optimal" } else { "budget expired" };
    report_line(
        out,
        &format!(
            "solved {}/{} L{} {} {state}",
            best.solved,
            m.num_instances(),
            args.norm,
            best.norm
        ),
    );
    Ok(if best.optimal { Status::Done } else { Status::Expired })
}

fn cmd_align(args: &AlignArgs) -> Result<Status> {
    let m = args.data.load()?;
    let (schedule, _) = load_schedule(&args.schedule, &m)?;
    let out = args.out.as_deref();
    let (alignment, optimal) = match args.mode {
        Mode::RandomExpect => {
            let expectation = random_alignment_expectation(&m, &schedule, args.samples, args.seed)?;
            println!("expected total {expectation}");
            return Ok(Status::Done);
        }
        Mode::Exact => {
            let cfg = AlignConfig {
                time_budget: args.time_limit,
                ..AlignConfig::default()
            };
            let result = optimal_alignment(&m, &schedule, &cfg)?;
            (result.alignment, result.optimal)
        }
        Mode::HeuOpt => (heu_opt(&m, &schedule)?, true),
        Mode::HeuMin => (heu_min(&schedule), true),
    };
    emit(out, &ScheduleDocument::new(&schedule, Some(&alignment)).to_json()?)?;
    let state = if optimal { "" } else { " budget expired" };
    report_line(
        out,
        &format!(
            "total {} order {}{state}",
            total_time(&m, &schedule, &alignment),
            order_text(&schedule, &alignment)
        ),
    );
    Ok(if optimal { Status::Done } else { Status::Expired })
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<Status> {
    let m = args.data.load()?;
    let systems = args.systems.clone().unwrap_or_else(|| System::ALL.to_vec());
    if systems.is_empty() {
        bail!(portsched::Error::InvalidArgument("no systems given".into()));
    }
    let mut cfg = EvalConfig::with_units(args.units);
    cfg.optimizer.time_budget = args.time_limit;
    let folds = k_fold(&m, args.folds, args.seed)?;
    let report = match &args.train_cutoff_ratio {
        Some(ratios) => reduced_cutoff_study(&m, &systems, ratios, &folds, &cfg)?,
        None => cross_validate(&m, &systems, &folds, &cfg)?,
    };
    match &args.report {
        Some(path) => {
            emit(Some(path), &report.to_csv())?;
            let json = path.with_extension("json");
            emit(Some(&json), &report.to_json()?)?;
            for row in report.aggregates() {
                println!(
                    "{} train_cutoff {} solved {}/{} par10 {}",
                    row.system,
                    row.train_cutoff,
                    row.solved,
                    row.instances,
                    fixed_decimal(row.par10())
                );
            }
        }
        None => emit(None, &report.to_csv())?,
    }
    Ok(Status::Done)
}

fn cmd_export(args: &ExportArgs) -> Result<Status> {
    let m = args.data.load()?;
    let map = IdentifierMap::for_matrix(&m)?;
    let text = match &args.schedule {
        Some(path) => export_schedule_facts(&load_schedule(path, &m)?.0, &map),
        None => export_facts(&m, args.units, &map),
    };
    emit(args.out.as_deref(), &text)?;
    if let Some(path) = &args.map {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        map.write_csv(file)?;
    }
    if let Some(dir) = &args.encodings {
        write_encodings(dir).with_context(|| format!("writing encodings to {}", dir.display()))?;
    }
    Ok(Status::Done)
}

fn cmd_run(args: &RunArgs) -> Result<Status> {
    let text = fs::read_to_string(&args.schedule).with_context(|| format!("reading {}", args.schedule.display()))?;
    let doc = ScheduleDocument::from_json(&text).with_context(|| format!("parsing {}", args.schedule.display()))?;
    let (schedule, alignment) = doc.to_schedule(&doc.solver_names())?;
    let alignment = alignment.unwrap_or_else(|| heu_min(&schedule));
    let commands = load_commands(&args.commands).with_context(|| format!("loading {}", args.commands.display()))?;
    let options = RunOptions {
        unit_duration: Duration::from_millis(args.unit_ms),
        grace: Duration::from_millis(args.grace_ms),
        run_dir: args.run_dir.clone(),
    };
    let result = run(&schedule, &alignment, &commands, &args.instance, &options)?;
    emit(args.out.as_deref(), &result.to_json()?)?;
    Ok(Status::Done)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use portsched::Error as E;
    match err.downcast_ref::<E>() {
        Some(E::Infeasible(_)) => EXIT_INFEASIBLE,
        Some(E::InvalidArgument(_)) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Optimize(args) => cmd_optimize(args),
        Command::Align(args) => cmd_align(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::ExportAsp(args) => cmd_export(args),
        Command::Run(args) => cmd_run(args),
    };
    match outcome {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Expired) => ExitCode::from(EXIT_BUDGET),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
