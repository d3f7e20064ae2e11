//! Command-line front end: scenario files, simulation runs, experiments and
//! CSV output.

pub mod error;
pub mod format;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use obsassign::assignment::DEFAULT_BRUTE_FORCE_CAP;
use obsassign::setfunc::{check_lattice, check_lattice_exhaustive};
use obsassign::sim::{self, Bounds, Scenario, Solver};
use obsassign::{Measure, MeasureKind, TargetId};

pub use error::{CliError, CliResult};

/// Environment variable overriding the brute-force enumeration cap.
pub const CAP_ENV: &str = "OBS_BRUTE_FORCE_CAP";

#[derive(Debug, Parser)]
#[command(name = "obsassign", version, about = "Observability-driven sensor-to-target assignment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scenario and write track.csv and objective.csv.
    Run(RunArgs),
    #[command(subcommand)]
    Experiment(Experiment),
    #[command(subcommand)]
    Check(Check),
    #[command(subcommand)]
    Gen(Gen),
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Sensors per target under greedy general assignment with trace.
    Even(EvenArgs),
    /// Greedy pairs against brute force and the relaxed matching.
    Ratio(RatioArgs),
}

#[derive(Debug, Subcommand)]
pub enum Check {
    /// Sample the monotone/submodular lattice of one target.
    Lattice(LatticeArgs),
}

#[derive(Debug, Subcommand)]
pub enum Gen {
    /// Write a random scenario as JSON.
    Scenario(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureName {
    Trace,
    Rank,
    Logdet,
    InvcondLb,
    InvcondExact,
}

impl From<MeasureName> for MeasureKind {
    fn from(m: MeasureName) -> Self {
        match m {
            MeasureName::Trace => MeasureKind::Trace,
            MeasureName::Rank => MeasureKind::Rank,
            MeasureName::Logdet => MeasureKind::LogDet,
            MeasureName::InvcondLb => MeasureKind::InvCondLowerBound,
            MeasureName::InvcondExact => MeasureKind::InvCondExact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum MatrixName {
    #[default]
    Rel,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverName {
    GreedyGeneral,
    GreedyPairs,
}

impl From<SolverName> for Solver {
    fn from(s: SolverName) -> Self {
        match s {
            SolverName::GreedyGeneral => Solver::GreedyGeneral,
            SolverName::GreedyPairs => Solver::GreedyPairs,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    #[arg(long, value_enum)]
    pub measure: MeasureName,
    #[arg(long, value_enum, default_value_t = MatrixName::Rel)]
    pub matrix: MatrixName,
}

impl MeasureArgs {
    pub fn measure(&self) -> Measure {
        Measure { kind: self.measure.into(), full_matrix: self.matrix == MatrixName::Full }
    }
}

/// Either a scenario file or random-generation parameters.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = true)]
pub struct ScenarioSource {
    #[arg(long, conflicts_with_all = ["sensors", "targets"])]
    pub scenario: Option<PathBuf>,
    /// Random scenario: number of sensors.
    #[arg(long, requires = "targets")]
    pub sensors: Option<usize>,
    /// Random scenario: number of targets.
    #[arg(long, requires = "sensors")]
    pub targets: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: ScenarioSource,
    #[arg(long, value_enum)]
    pub solver: SolverName,
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Overrides the scenario's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the scenario's horizon.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Overrides the measurement noise variance.
    #[arg(long)]
    pub measurement_var: Option<f64>,
    /// Side of the square world for random scenarios.
    #[arg(long, default_value_t = 100.0)]
    pub size: f64,
    #[arg(long, default_value_t = 1.0)]
    pub u_max: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvenArgs {
    /// Number of targets.
    #[arg(long = "L", default_value_t = 5)]
    pub targets: usize,
    /// Sensor counts, as `a..b` (inclusive), `a..b:step` or a comma list.
    #[arg(long = "N", default_value = "20..50:10")]
    pub sensors: String,
    #[arg(long, default_value_t = 30)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RatioArgs {
    /// Target counts, as `a..b` (inclusive), `a..b:step` or a comma list.
    #[arg(long = "L", default_value = "1..5")]
    pub targets: String,
    #[arg(long, default_value_t = 30)]
    pub trials: usize,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 1.0)]
    pub u_max: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 0)]
    pub target: u32,
    #[arg(long, default_value_t = 500)]
    pub samples: u64,
    /// Visit every chain instead of sampling (at most 12 sensors).
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write lattice.json here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub sensors: usize,
    #[arg(long)]
    pub targets: usize,
    #[arg(long, default_value_t = 100.0)]
    pub size: f64,
    #[arg(long, default_value_t = 1.0)]
    pub u_max: f64,
    #[arg(long, default_value_t = 100)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `a..b`, `a..b:step` or `a,b,c`.
pub fn parse_range(text: &str, flag: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("{flag}: expected `a..b`, `a..b:step` or a comma list, got `{text}`"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let values = if let Some((lo, rest)) = text.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, num(step)?),
            None => (rest, 1),
        };
        let (lo, hi) = (num(lo)?, num(hi)?);
        if step == 0 || lo > hi {
            return Err(bad());
        }
        (lo..=hi).step_by(step).collect()
    } else {
        text.split(',').map(num).collect::<CliResult<Vec<_>>>()?
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let scenario: Scenario =
        serde_json::from_str(&text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn scenario_json(scenario: &Scenario) -> String {
    let mut s = serde_json::to_string_pretty(scenario).expect("scenario serializes");
    s.push('\n');
    s
}

pub fn save_scenario(path: &Path, scenario: &Scenario) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, scenario_json(scenario)).map_err(|e| CliError::io(path, e))
}

/// Brute-force cap from [`CAP_ENV`], or the default.
pub fn brute_force_cap() -> CliResult<u128> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("{CAP_ENV}: expected a nonnegative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_BRUTE_FORCE_CAP),
    }
}

fn require_relative(measure: Measure, command: &str) -> CliResult<()> {
    if measure.needs_control() {
        return Err(CliError::Validation(format!(
            "--matrix full: `{command}` evaluates targets without a known control; use --matrix rel or --measure invcond-lb"
        )));
    }
    Ok(())
}

fn resolve_scenario(args: &RunArgs) -> CliResult<Scenario> {
    let mut scenario = match (&args.source.scenario, args.source.sensors, args.source.targets) {
        (Some(path), None, None) => load_scenario(path)?,
        (None, Some(n), Some(l)) => {
            if n == 0 || l == 0 {
                return Err(CliError::Validation("--sensors/--targets: must be at least 1".into()));
            }
            sim::random_scenario(n, l, Bounds::square(args.size), args.u_max, args.seed.unwrap_or(0))
        }
        _ => return Err(CliError::Usage("give either --scenario or both --sensors and --targets".into())),
    };
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(h) = args.horizon {
        scenario.horizon = h;
    }
    if let Some(v) = args.measurement_var {
        scenario.noise.measurement_var = v;
    }
    scenario.validate()?;
    Ok(scenario)
}

/// Executes a parsed command, returning the lines to print on stdout.
pub fn execute(cli: Cli) -> CliResult<Vec<String>> {
    match cli.command {
        Command::Run(args) => {
            let scenario = resolve_scenario(&args)?;
            let solver: Solver = args.solver.into();
            solver.check(scenario.sensors.len(), scenario.targets.len())?;
            let log = sim::run(&scenario, solver, args.measure.measure())?;
            let track = format::write_file(&args.out, "track.csv", &format::track_csv(&log))?;
            let objective = format::write_file(&args.out, "objective.csv", &format::objective_csv(&log))?;
            Ok(vec![track.display().to_string(), objective.display().to_string()])
        }
        Command::Experiment(Experiment::Even(args)) => {
            let n_values = parse_range(&args.sensors, "--N")?;
            if args.targets == 0 || args.trials == 0 {
                return Err(CliError::Validation("--L and --trials: must be at least 1".into()));
            }
            let rows = sim::experiment_even_assignment(args.targets, &n_values, args.trials, args.seed)?;
            let path = format::write_file(&args.out, "even.csv", &format::even_csv(&rows))?;
            Ok(vec![path.display().to_string()])
        }
        Command::Experiment(Experiment::Ratio(args)) => {
            let l_values = parse_range(&args.targets, "--L")?;
            if l_values.contains(&0) || args.trials == 0 {
                return Err(CliError::Validation("--L and --trials: must be at least 1".into()));
            }
            let measure = args.measure.measure();
            require_relative(measure, "experiment ratio")?;
            let cap = brute_force_cap()?;
            let table = sim::experiment_ratio(&l_values, args.trials, measure, args.u_max, args.seed, cap)?;
            let trials = format::write_file(&args.out, "ratio.csv", &format::ratio_csv(&table))?;
            let summary = format::write_file(&args.out, "ratio_summary.csv", &format::ratio_summary_csv(&table))?;
            Ok(vec![trials.display().to_string(), summary.display().to_string()])
        }
        Command::Check(Check::Lattice(args)) => {
            let scenario = load_scenario(&args.scenario)?;
            let measure = args.measure.measure();
            require_relative(measure, "check lattice")?;
            let oracle = sim::oracle_at_truth(&scenario, measure)?;
            let target = TargetId(args.target);
            let report = if args.exhaustive {
                check_lattice_exhaustive(&oracle, target)?
            } else {
                check_lattice(&oracle, target, args.samples, args.seed)?
            };
            let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
            json.push('\n');
            let mut lines = vec![json.trim_end().to_string()];
            if let Some(dir) = &args.out {
                lines.push(format::write_file(dir, "lattice.json", &json)?.display().to_string());
            }
            Ok(lines)
        }
        Command::Gen(Gen::Scenario(args)) => {
            if args.sensors == 0 || args.targets == 0 {
                return Err(CliError::Validation("--sensors/--targets: must be at least 1".into()));
            }
            let mut scenario =
                sim::random_scenario(args.sensors, args.targets, Bounds::square(args.size), args.u_max, args.seed);
            scenario.horizon = args.horizon;
            scenario.validate()?;
            match &args.out {
                Some(path) => {
                    save_scenario(path, &scenario)?;
                    Ok(vec![path.display().to_string()])
                }
                None => Ok(vec![scenario_json(&scenario).trim_end().to_string()]),
            }
        }
    }
}

/// Parses, runs and reports; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(lines) => {
            let mut stdout = std::io::stdout().lock();
            for line in lines {
                if writeln!(stdout, "{line}").is_err() {
                    break;
                }
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
