//! Command-line front end over the library.
//!
//! Exit codes separate scientific outcomes from operational failures:
//! any completed simulation exits 0 (a capped run is a result, not an
//! error); usage problems exit 2 and file problems exit 1.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::admissibility::{self, all_configs, ClassTable, CLASS_COUNT};
use crate::dynamics::OutcomeKind;
use crate::lattice::{displacement_sq_of, FaceCoord, SiteCoord, SubLattice};
use crate::medium::{self, Medium, MediumSpec};
use crate::stats::{self, EnsembleSpec, StatsError, SweepRow};
use crate::structures::{self, EventKind, StructureEvent};
use crate::svg::{self, LineSeries};

/// Overrides the default step cap when `--steps` is absent.
pub const STEP_CAP_ENV: &str = "HONEYGAS_STEP_CAP";
const DEFAULT_STEP_CAP: u64 = 10_000_000;

#[derive(Debug, PartialEq, Eq)]
pub enum CliError {
    /// Flag combinations and malformed values; exit 2.
    Usage(String),
    /// File and parse failures; exit 1.
    Io(String),
}

#[derive(Parser, Debug)]
#[command(
    name = "honeygas",
    version,
    about = "Deterministic single-particle lattice gas on flipping rotators of the honeycomb lattice"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation and report how it ended.
    Run(RunArgs),
    /// Run many realizations of one medium and summarize their periods.
    Ensemble(EnsembleArgs),
    /// Average periods across a grid of probabilities.
    Sweep(SweepArgs),
    /// Print the hexagon configuration classes of a table.
    ClassifyHex(ClassifyArgs),
    /// Check every face of a window against an admissibility table.
    CheckAdmissible(CheckArgs),
    /// Render a line chart from a CSV written by run, ensemble or sweep.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum ModelKind {
    Iid,
    Family,
    Admissible,
    AllLeft,
    AllRight,
    Explicit,
}

#[derive(Args, Debug)]
struct MediumArgs {
    /// Medium family to draw the rotators from.
    #[arg(long, value_enum)]
    model: ModelKind,
    /// Probability of a right rotator. Required for iid, family and
    /// admissible models, rejected otherwise.
    #[arg(long)]
    p: Option<f64>,
    /// Seed of the realization (master seed for ensembles).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Color class of the shaded faces (admissible model only).
    #[arg(long)]
    color_class: Option<u8>,
    /// Medium snapshot to load (explicit model only).
    #[arg(long)]
    snapshot: Option<PathBuf>,
}

impl MediumArgs {
    fn spec(&self) -> Result<MediumSpec, CliError> {
        if self.model != ModelKind::Explicit && self.snapshot.is_some() {
            return Err(CliError::Usage(
                "--snapshot only applies to --model explicit".into(),
            ));
        }
        if self.model != ModelKind::Admissible && self.color_class.is_some() {
            return Err(CliError::Usage(
                "--color-class only applies to --model admissible".into(),
            ));
        }
        let needs_p = matches!(
            self.model,
            ModelKind::Iid | ModelKind::Family | ModelKind::Admissible
        );
        if !needs_p && self.p.is_some() {
            return Err(CliError::Usage(format!(
                "--p does not apply to --model {}",
                self.model_name()
            )));
        }
        let p = if needs_p {
            let p = self.p.ok_or_else(|| {
                CliError::Usage(format!("--p is required for --model {}", self.model_name()))
            })?;
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Usage(format!(
                    "--p must lie in [0, 1], got {p}"
                )));
            }
            p
        } else {
            0.0
        };
        match self.model {
            ModelKind::Iid => Ok(MediumSpec::iid(p)),
            ModelKind::Family => Ok(MediumSpec::family(p)),
            ModelKind::Admissible => {
                let class = self.color_class.unwrap_or(0);
                if class > 2 {
                    return Err(CliError::Usage(format!(
                        "--color-class must be 0, 1 or 2, got {class}"
                    )));
                }
                Ok(MediumSpec::admissible_hex(p, class))
            }
            ModelKind::AllLeft => Ok(MediumSpec::all_left()),
            ModelKind::AllRight => Ok(MediumSpec::all_right()),
            ModelKind::Explicit => Err(CliError::Usage(
                "--model explicit loads a medium from --snapshot and fits single runs only"
                    .into(),
            )),
        }
    }

    fn build_medium(&self) -> Result<Medium, CliError> {
        if self.model == ModelKind::Explicit {
            let path = self.snapshot.as_ref().ok_or_else(|| {
                CliError::Usage("--model explicit requires --snapshot".into())
            })?;
            let text = fs::read_to_string(path).map_err(|e| io_err(path, &e))?;
            return medium::restore_snapshot(&text)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())));
        }
        Ok(Medium::new(self.spec()?, self.seed))
    }

    fn model_name(&self) -> &'static str {
        match self.model {
            ModelKind::Iid => "iid",
            ModelKind::Family => "family",
            ModelKind::Admissible => "admissible",
            ModelKind::AllLeft => "all-left",
            ModelKind::AllRight => "all-right",
            ModelKind::Explicit => "explicit",
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// Step cap. Defaults to HONEYGAS_STEP_CAP or 10000000.
    #[arg(long)]
    steps: Option<u64>,
    /// Write analyzer events as JSON lines.
    #[arg(long)]
    events: Option<PathBuf>,
    /// Include loop-closure events in the event log.
    #[arg(long)]
    record_loops: bool,
    /// Write the visited positions as CSV (t,a,b,sub).
    #[arg(long)]
    trajectory: Option<PathBuf>,
    /// Write the squared-displacement series as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Sample stride for --csv.
    #[arg(long, default_value_t = 1)]
    every: u64,
    /// Draw the trajectory with diamond markers on reflector bases.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the post-run medium over the visited region as a snapshot.
    #[arg(long)]
    save_snapshot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// Number of realizations.
    #[arg(long, default_value_t = 200)]
    realizations: usize,
    /// Step cap per realization. Defaults to HONEYGAS_STEP_CAP or 10000000.
    #[arg(long)]
    steps: Option<u64>,
    /// Write one CSV row per realization.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the mean-square displacement series as CSV.
    #[arg(long)]
    msd_csv: Option<PathBuf>,
    /// Displacement horizon for --msd-csv.
    #[arg(long, default_value_t = 3000)]
    horizon: u64,
    /// Sample stride for --msd-csv.
    #[arg(long, default_value_t = 10)]
    every: u64,
    /// Bound the worker thread count (default: available cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated probabilities, each strictly between 0 and 1.
    #[arg(long)]
    grid: String,
    /// Medium family over the grid (one that takes a probability).
    #[arg(long, value_enum, default_value_t = ModelKind::Iid)]
    model: ModelKind,
    /// Color class of the shaded faces (admissible model only).
    #[arg(long)]
    color_class: Option<u8>,
    /// Master seed shared by all grid points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Realizations per grid point.
    #[arg(long, default_value_t = 100)]
    realizations: usize,
    /// Step cap per realization. Defaults to HONEYGAS_STEP_CAP or 10000000.
    #[arg(long)]
    steps: Option<u64>,
    /// Write one CSV row per probability.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Draw mean and median period against p.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Bound the worker thread count (default: available cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Class table file (the built-in default when absent).
    #[arg(long)]
    table: Option<PathBuf>,
    /// Also print all 64 configurations.
    #[arg(long)]
    enumerate: bool,
    /// Report the admissible probability at this p.
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// Half-width of the checked face window centered on F(0,0).
    #[arg(long, default_value_t = 8)]
    radius: i32,
    /// Class table file (the built-in default when absent).
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// CSV written by run --csv, ensemble --msd-csv, or sweep --csv.
    #[arg(long)]
    csv: PathBuf,
    /// Output chart path.
    #[arg(long)]
    svg: PathBuf,
}

/// Parses the process arguments, then runs the command and returns its
/// exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            2
        }
        Err(CliError::Io(message)) => {
            eprintln!("error: {message}");
            1
        }
    }
}

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => run_command(args),
        Command::Ensemble(args) => ensemble_command(args),
        Command::Sweep(args) => sweep_command(args),
        Command::ClassifyHex(args) => classify_hex_command(args),
        Command::CheckAdmissible(args) => check_admissible_command(args),
        Command::Plot(args) => plot_command(args),
    }
}

fn io_err(path: &Path, error: &dyn std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {error}", path.display()))
}

fn resolve_step_cap(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(steps) = flag {
        return Ok(steps);
    }
    match std::env::var(STEP_CAP_ENV) {
        Ok(text) => text.trim().parse().map_err(|_| {
            CliError::Usage(format!("{STEP_CAP_ENV} must be an integer, got `{text}`"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_STEP_CAP),
        Err(error) => Err(CliError::Usage(format!("{STEP_CAP_ENV}: {error}"))),
    }
}

fn with_pool<T: Send>(
    threads: Option<usize>,
    work: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match threads {
        None => Ok(work()),
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| io_err(path, &e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_with<F>(path: &Path, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let file = fs::File::create(path).map_err(|e| io_err(path, &e))?;
    let mut out = io::BufWriter::new(file);
    write(&mut out)
        .and_then(|()| out.flush())
        .map_err(|e| io_err(path, &e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_events(path: &Path, events: &[StructureEvent]) -> Result<(), CliError> {
    write_with(path, |out| structures::write_events_jsonl(events, out))
}

fn write_trajectory(path: &Path, log: &[SiteCoord]) -> Result<(), CliError> {
    write_with(path, |out| {
        writeln!(out, "t,a,b,sub")?;
        for (t, site) in log.iter().enumerate() {
            let sub = match site.sub {
                SubLattice::A => 'A',
                SubLattice::B => 'B',
            };
            writeln!(out, "{t},{},{},{sub}", site.a, site.b)?;
        }
        Ok(())
    })
}

fn write_run_displacements(path: &Path, log: &[SiteCoord], every: u64) -> Result<(), CliError> {
    let horizon = (log.len() - 1) as u64;
    write_with(path, |out| {
        writeln!(out, "t,mean_sq_disp,n")?;
        for t in stats::sample_times(horizon, every) {
            let value = displacement_sq_of(log[t as usize]);
            writeln!(out, "{t},{value},1")?;
        }
        Ok(())
    })
}

fn confirmed_bases(events: &[StructureEvent]) -> Vec<SiteCoord> {
    events
        .iter()
        .filter(|event| {
            matches!(
                event.kind,
                EventKind::ReflectorConfirmed | EventKind::SemiReflectorConfirmed
            )
        })
        .filter_map(|event| event.base)
        .collect()
}

fn run_command(args: &RunArgs) -> Result<(), CliError> {
    let mut medium = args.medium.build_medium()?;
    let cap = resolve_step_cap(args.steps)?;
    let (outcome, analyzer) = structures::analyze_run(&mut medium, cap, args.record_loops);
    if let Some(path) = &args.events {
        write_events(path, analyzer.events())?;
    }
    if let Some(path) = &args.trajectory {
        write_trajectory(path, analyzer.log())?;
    }
    if let Some(path) = &args.csv {
        write_run_displacements(path, analyzer.log(), args.every)?;
    }
    if let Some(path) = &args.svg {
        let bases = confirmed_bases(analyzer.events());
        write_text(path, &svg::trajectory_svg(analyzer.log(), &bases))?;
    }
    if let Some(path) = &args.save_snapshot {
        let region: Vec<SiteCoord> = analyzer
            .log()
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        write_with(path, |out| medium.write_snapshot(&region, out))?;
    }
    match outcome.kind {
        OutcomeKind::Periodic { period } => println!("periodic period={period}"),
        OutcomeKind::StepCapReached { cap } => println!("cap-reached steps={cap}"),
        OutcomeKind::HaltedByCallback { at } => println!("halted at={at}"),
    }
    Ok(())
}

fn format_summary(records: &[stats::RunRecord]) -> String {
    let n_periodic = records.iter().filter(|r| r.period().is_some()).count();
    match stats::summarize_periods(records) {
        Ok(summary) => format!(
            "periodic {n_periodic}/{} mean_period={} median_period={} capped_fraction={}",
            records.len(),
            summary.mean_period.expect("periodic runs exist"),
            summary.median_period.expect("periodic runs exist"),
            summary.capped_fraction
        ),
        Err(StatsError::AllRunsCapped) => {
            format!("periodic 0/{} capped_fraction=1", records.len())
        }
        Err(other) => format!("error: {other}"),
    }
}

fn ensemble_command(args: &EnsembleArgs) -> Result<(), CliError> {
    let medium = args.medium.spec()?;
    if args.realizations == 0 {
        return Err(CliError::Usage("--realizations must be at least 1".into()));
    }
    let spec = EnsembleSpec {
        medium,
        realizations: args.realizations,
        step_cap: resolve_step_cap(args.steps)?,
        master_seed: args.medium.seed,
        msd_horizon: args.horizon,
        record_every: args.every,
    };
    let want_msd = args.msd_csv.is_some();
    let (records, msd) = with_pool(args.threads, || {
        let records = stats::run_ensemble(&spec);
        let msd = want_msd.then(|| stats::msd_series(&spec));
        (records, msd)
    })?;
    if let Some(path) = &args.csv {
        write_with(path, |out| {
            stats::write_periods_csv(out, &records, spec.medium.nominal_p())
        })?;
    }
    if let (Some(path), Some(series)) = (&args.msd_csv, &msd) {
        write_with(path, |out| stats::write_msd_csv(out, series))?;
    }
    println!("{}", format_summary(&records));
    Ok(())
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let mut grid = Vec::new();
    for piece in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let p: f64 = piece
            .parse()
            .map_err(|_| CliError::Usage(format!("grid entry `{piece}` is not a number")))?;
        if !(p > 0.0 && p < 1.0) {
            return Err(CliError::Usage(format!(
                "grid entries must lie strictly between 0 and 1, got {p}"
            )));
        }
        grid.push(p);
    }
    if grid.is_empty() {
        return Err(CliError::Usage("--grid must list at least one probability".into()));
    }
    Ok(grid)
}

fn sweep_command(args: &SweepArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.grid)?;
    if args.realizations == 0 {
        return Err(CliError::Usage("--realizations must be at least 1".into()));
    }
    let class = args.color_class.unwrap_or(0);
    if args.color_class.is_some() && args.model != ModelKind::Admissible {
        return Err(CliError::Usage(
            "--color-class only applies to --model admissible".into(),
        ));
    }
    if class > 2 {
        return Err(CliError::Usage(format!(
            "--color-class must be 0, 1 or 2, got {class}"
        )));
    }
    let spec_at = |p: f64| -> Result<MediumSpec, CliError> {
        match args.model {
            ModelKind::Iid => Ok(MediumSpec::iid(p)),
            ModelKind::Family => Ok(MediumSpec::family(p)),
            ModelKind::Admissible => Ok(MediumSpec::admissible_hex(p, class)),
            _ => Err(CliError::Usage(
                "sweep varies p; use --model iid, family or admissible".into(),
            )),
        }
    };
    let step_cap = resolve_step_cap(args.steps)?;
    let mut specs = Vec::with_capacity(grid.len());
    for &p in &grid {
        specs.push(EnsembleSpec {
            medium: spec_at(p)?,
            realizations: args.realizations,
            step_cap,
            master_seed: args.seed,
            msd_horizon: 1,
            record_every: 1,
        });
    }
    let per_point: Vec<Vec<stats::RunRecord>> =
        with_pool(args.threads, || specs.iter().map(stats::run_ensemble).collect())?;
    let mut rows = Vec::new();
    for (&p, records) in grid.iter().zip(&per_point) {
        let n_periodic = records.iter().filter(|r| r.period().is_some()).count();
        let summary = match stats::summarize_periods(records) {
            Ok(summary) => summary,
            Err(StatsError::AllRunsCapped) => stats::Summary {
                mean_period: None,
                median_period: None,
                capped_fraction: 1.0,
                fit_exponent: None,
            },
            Err(other) => return Err(CliError::Io(other.to_string())),
        };
        println!("p={p} {}", format_summary(records));
        rows.push(SweepRow {
            p,
            summary,
            n_periodic,
        });
    }
    if let Some(path) = &args.csv {
        write_with(path, |out| stats::write_sweep_csv(out, &rows))?;
    }
    if let Some(path) = &args.svg {
        let mut csv = Vec::new();
        stats::write_sweep_csv(&mut csv, &rows).expect("vec writes are infallible");
        let text = String::from_utf8(csv).expect("the writer emits utf-8");
        write_text(path, &chart_from_csv(&text, path)?)?;
    }
    Ok(())
}

fn load_table(path: &Option<PathBuf>) -> Result<ClassTable, CliError> {
    match path {
        None => Ok(ClassTable::shipped_default()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, &e))?;
            ClassTable::parse(&text).map_err(|e| io_err(path, &e))
        }
    }
}

fn classify_hex_command(args: &ClassifyArgs) -> Result<(), CliError> {
    let table = load_table(&args.table)?;
    for entry in table.classes() {
        let label = if entry.admissible {
            "admissible"
        } else {
            "nonadmissible"
        };
        println!(
            "{} orbit={} rights={} {label}",
            entry.representative,
            entry.orbit_size,
            entry.representative.right_count()
        );
    }
    let admissible_classes = table.classes().iter().filter(|e| e.admissible).count();
    println!("admissible classes: {admissible_classes} of {CLASS_COUNT}");
    println!(
        "admissible configurations: {} of 64",
        table.admissible_config_count()
    );
    if args.enumerate {
        for config in all_configs() {
            let entry = table.class_of(config);
            let label = if entry.admissible {
                "admissible"
            } else {
                "nonadmissible"
            };
            println!("{config} class={} {label}", entry.representative);
        }
        println!("census: 64 configurations in {CLASS_COUNT} classes");
    }
    if let Some(p) = args.p {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Usage(format!("--p must lie in [0, 1], got {p}")));
        }
        println!(
            "admissible probability at p={p}: {}",
            admissibility::admissible_probability(p, &table)
        );
    }
    Ok(())
}

fn check_admissible_command(args: &CheckArgs) -> Result<(), CliError> {
    if args.radius < 0 {
        return Err(CliError::Usage("--radius must be nonnegative".into()));
    }
    let medium = args.medium.build_medium()?;
    let table = load_table(&args.table)?;
    let r = args.radius;
    let faces = (-r..=r).flat_map(|i| (-r..=r).map(move |j| FaceCoord::new(i, j)));
    match admissibility::is_admissible_region(&medium, faces, &table) {
        admissibility::RegionCheck::Admissible => {
            let side = 2 * i64::from(r) + 1;
            println!("admissible faces={}", side * side);
        }
        admissibility::RegionCheck::Inadmissible { face } => {
            println!("inadmissible face={face}");
        }
    }
    Ok(())
}

/// Builds the line chart a CSV describes, dispatching on its header.
/// `origin` names the data source in error messages.
fn chart_from_csv(text: &str, origin: &Path) -> Result<String, CliError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| io_err(origin, &"empty CSV"))?;
    let parse_row = |line: &str| -> Result<Vec<Option<f64>>, CliError> {
        line.split(',')
            .map(|cell| {
                let cell = cell.trim();
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>()
                        .map(Some)
                        .map_err(|_| io_err(origin, &format!("bad numeric cell `{cell}`")))
                }
            })
            .collect()
    };
    match header {
        "t,mean_sq_disp,n" => {
            let mut points = Vec::new();
            for line in lines.filter(|l| !l.trim().is_empty()) {
                let row = parse_row(line)?;
                if let (Some(Some(t)), Some(Some(v))) = (row.first(), row.get(1)) {
                    points.push((*t, *v));
                }
            }
            let series = [LineSeries {
                label: "mean square displacement".into(),
                points,
            }];
            Ok(svg::line_chart_svg("t", "mean square displacement", &series))
        }
        "p,mean_period,median_period,capped_fraction,n_periodic" => {
            let mut mean = Vec::new();
            let mut median = Vec::new();
            for line in lines.filter(|l| !l.trim().is_empty()) {
                let row = parse_row(line)?;
                let Some(Some(p)) = row.first() else { continue };
                if let Some(Some(v)) = row.get(1) {
                    mean.push((*p, *v));
                }
                if let Some(Some(v)) = row.get(2) {
                    median.push((*p, *v));
                }
            }
            let series = [
                LineSeries {
                    label: "mean period".into(),
                    points: mean,
                },
                LineSeries {
                    label: "median period".into(),
                    points: median,
                },
            ];
            Ok(svg::line_chart_svg("p", "period", &series))
        }
        other => Err(io_err(origin, &format!("unsupported CSV header `{other}`"))),
    }
}

fn plot_command(args: &PlotArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.csv).map_err(|e| io_err(&args.csv, &e))?;
    let chart = chart_from_csv(&text, &args.csv)?;
    write_text(&args.svg, &chart)
}
