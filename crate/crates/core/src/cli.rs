//! The `gittins-lab` command line.
//!
//! Exit statuses: 0 success, 2 usage error, 3 numeric or acceptance failure,
//! 4 I/O error. `GITTINS_LAB_THREADS` caps the number of worker threads.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::{lower_bound_index, optimistic_index, quantile_index, upper_bound_index};
use crate::error::{Error, Result};
use crate::output::{fmt_f64, write_atomic, Metadata};
use crate::posterior::{NoiseModel, PosteriorState};
use crate::sim::{self, agreement_rate, gittins_table_for, trace_csv, ArmSpec, Policy, SimulationConfig, Summary};
use crate::solver::{build_table, gittins_index_standard, solve_index, IndexTable, SolverConfig};
use crate::svg::{line_chart, Series};

pub const THREADS_ENV: &str = "GITTINS_LAB_THREADS";

/// Table density used when a Gittins simulation has to build its own table.
pub const SIM_TABLE_POINTS_PER_DECADE: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 2,
    Numeric = 3,
    Io = 4,
}

impl ExitStatus {
    pub fn of(error: &Error) -> Self {
        match error {
            Error::Domain { .. } | Error::Precondition(_) | Error::Config(_) => ExitStatus::Usage,
            Error::Resolution { .. } | Error::Bracket { .. } | Error::Extrapolation { .. } => ExitStatus::Numeric,
            Error::Io(_) | Error::Json(_) | Error::Format(_) => ExitStatus::Io,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gittins-lab", version, about = "Gaussian Gittins indices, Bayes-UCB approximations and bandit simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact index with its bracket, plus the quantile, optimistic and bound approximations (JSON).
    Index(IndexArgs),
    /// Sweep discounts for the standardized arm and check that the gap to Φ⁻¹(γ) shrinks.
    Verify(VerifyArgs),
    /// Build and save a standardized index table.
    Table(TableArgs),
    /// Simulate a policy on a symmetric k-armed bandit.
    Simulate(SimulateArgs),
    /// Agreement between the Gittins policy and another policy over a discount grid.
    Agreement(AgreementArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// DP truncation horizon (default: from the tolerance).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Bisection tolerance on the index.
    #[arg(long, default_value_t = SolverConfig::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Plays before retirement is allowed; 1 gives the classical index.
    #[arg(long = "forced-plays", default_value_t = 2)]
    pub forced_plays: u32,
}

impl SolverArgs {
    fn config(&self, gamma: f64) -> SolverConfig {
        let mut c = SolverConfig::with_tolerance(gamma, self.tolerance);
        if let Some(h) = self.horizon {
            c.horizon = h;
        }
        c.forced_plays = self.forced_plays;
        c
    }
}

#[derive(Debug, Clone, Args)]
pub struct IndexArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long)]
    pub sigma2: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long = "noise-var")]
    pub noise_var: f64,
    /// Read the standardized index from this table instead of solving.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Comma-separated discounts, ascending.
    #[arg(long, value_delimiter = ',', default_value = "0.9,0.99,0.999")]
    pub grid: Vec<f64>,
    /// Noise-to-signal ratio σ_W²/σ².
    #[arg(long, default_value_t = 1.0)]
    pub ratio: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// CSV path; the chart goes next to it with an `.svg` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub gamma: f64,
    /// Comma-separated noise-to-signal ratios, ascending.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1,2,4,8")]
    pub grid: Vec<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ArmArgs {
    #[arg(long, default_value_t = 2)]
    pub arms: usize,
    /// Prior mean of every arm.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    /// Prior variance of every arm.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long = "noise-var", default_value_t = 1.0)]
    pub noise_var: f64,
    /// Steps per replication (default: ⌈log 10⁻⁶ / log γ⌉).
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Saved index table for the Gittins policy (built on the fly when absent).
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Forced plays for the table built on the fly.
    #[arg(long = "forced-plays", default_value_t = 2)]
    pub forced_plays: u32,
}

impl ArmArgs {
    fn arms(&self) -> Result<Vec<ArmSpec>> {
        if self.arms == 0 {
            return Err(Error::Config("--arms must be at least 1".into()));
        }
        Ok(vec![ArmSpec::new(self.mu, self.sigma2, self.noise_var)?; self.arms])
    }

    fn simulation(&self, gamma: f64, policy: Policy) -> Result<SimulationConfig> {
        let mut config = SimulationConfig::new(self.arms()?, gamma, policy);
        if let Some(h) = self.horizon {
            config.horizon = h;
        }
        config.replications = self.reps;
        config.seed = self.seed;
        config.validate()?;
        Ok(config)
    }

    /// A saved table when `--table` is given, otherwise one built for these arms.
    fn gittins_table(&self, gamma: f64, horizon: u64) -> Result<Arc<IndexTable>> {
        let table = match &self.table {
            Some(path) => IndexTable::load(path)?,
            None => gittins_table_for(
                &self.arms()?,
                gamma,
                horizon,
                SIM_TABLE_POINTS_PER_DECADE,
                &SolverConfig { forced_plays: self.forced_plays, ..SolverConfig::for_discount(gamma) },
            )?,
        };
        Ok(Arc::new(table))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 0.99)]
    pub gamma: f64,
    #[arg(long, default_value = "gittins", value_parser = clap::builder::PossibleValuesParser::new(Policy::NAMES))]
    pub policy: String,
    #[command(flatten)]
    pub arms: ArmArgs,
    /// `csv` writes the per-step trace, `json` the summary.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AgreementArgs {
    /// Comma-separated discounts.
    #[arg(long, value_delimiter = ',', default_value = "0.9,0.99,0.999")]
    pub grid: Vec<f64>,
    /// Policy compared against Gittins.
    #[arg(long, default_value = "bayes-ucb-gamma", value_parser = clap::builder::PossibleValuesParser::new(Policy::NAMES))]
    pub policy: String,
    #[command(flatten)]
    pub arms: ArmArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command produced: files to write (or text for stdout) and a status.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub files: Vec<(PathBuf, String)>,
    /// Set when the command ran but an acceptance property failed.
    pub failure: Option<String>,
}

impl Outcome {
    fn emit(out: &Option<PathBuf>, text: String) -> Self {
        match out {
            Some(path) => Outcome { files: vec![(path.clone(), text)], ..Default::default() },
            None => Outcome { stdout: text, ..Default::default() },
        }
    }
}

fn check_gamma(gamma: f64) -> Result<f64> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(gamma)
    } else {
        Err(Error::Domain { what: "--gamma must lie in (0, 1)", value: gamma })
    }
}

fn check_grid(grid: &[f64], what: &str, unit_interval: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config(format!("{what} grid is empty")));
    }
    for &v in grid {
        let ok = if unit_interval { v > 0.0 && v < 1.0 } else { v > 0.0 && v.is_finite() };
        if !ok {
            return Err(Error::Config(format!("{what} grid value {v} is out of range")));
        }
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("{what} grid must be strictly ascending")));
    }
    Ok(())
}

pub fn cmd_index(args: &IndexArgs) -> Result<Outcome> {
    let gamma = check_gamma(args.gamma)?;
    let state = PosteriorState::new(args.mu, args.sigma2)?;
    let noise = NoiseModel::new(args.noise_var)?;
    let config = args.solver.config(gamma);
    let (mu, sigma) = (state.mean(), state.std_dev());
    let ratio = noise.variance() / state.variance();

    let exact = match &args.table {
        Some(path) => {
            let table = IndexTable::load(path)?;
            if table.discount() != gamma {
                return Err(Error::Config(format!("table {} was built for discount {}", path.display(), table.discount())));
            }
            let (lo, hi) = table.lookup_bracket(ratio)?;
            json!({
                "source": "table",
                "index": mu + sigma * table.lookup(ratio)?,
                "bracket": [mu + sigma * lo, mu + sigma * hi],
            })
        }
        None => {
            let e = solve_index(state, gamma, noise, &config)?;
            json!({
                "source": "solver",
                "index": e.index,
                "bracket": [e.bracket.0, e.bracket.1],
                "truncation_slack": e.truncation_slack,
                "evaluations": e.evaluations,
            })
        }
    };
    let upper = upper_bound_index(gamma)?;
    let lower = lower_bound_index(gamma, ratio)?;
    let report = json!({
        "metadata": Metadata::new("index", None, json!({
            "mu": mu, "sigma2": state.variance(), "gamma": gamma, "noise_var": noise.variance(),
            "table": args.table, "solver": config,
        })),
        "noise_to_signal": ratio,
        "exact": exact,
        "quantile_index": quantile_index(state, gamma)?,
        "optimistic_index": optimistic_index(state, gamma)?,
        "upper_bound": { "value": mu + sigma * upper.value, "standardized": upper.value, "fallback": upper.fallback },
        "lower_bound": {
            "value": mu + sigma * lower.bound,
            "standardized": lower.bound,
            "exploration_length": lower.exploration_length,
            "h": lower.h,
            "residual_variance": lower.residual_variance,
            "degenerate": lower.degenerate,
        },
    });
    Ok(Outcome::emit(&args.out, serde_json::to_string_pretty(&report)? + "\n"))
}

/// One row of the discount sweep for the standardized arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub exact_index: f64,
    pub exact_bracket_lo: f64,
    pub exact_bracket_hi: f64,
    pub quantile_index: f64,
    pub optimistic_index: f64,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub gap_exact_vs_quantile: f64,
}

pub const SWEEP_COLUMNS: [&str; 9] = [
    "gamma",
    "exact_index",
    "exact_bracket_lo",
    "exact_bracket_hi",
    "quantile_index",
    "optimistic_index",
    "upper_bound",
    "lower_bound",
    "gap_exact_vs_quantile",
];

impl SweepRow {
    pub fn values(&self) -> [f64; 9] {
        [
            self.gamma,
            self.exact_index,
            self.exact_bracket_lo,
            self.exact_bracket_hi,
            self.quantile_index,
            self.optimistic_index,
            self.upper_bound,
            self.lower_bound,
            self.gap_exact_vs_quantile,
        ]
    }
}

pub fn sweep_row(gamma: f64, ratio: f64, config: &SolverConfig) -> Result<SweepRow> {
    let standard = PosteriorState::standard();
    let exact = gittins_index_standard(gamma, ratio, config)?;
    let q = quantile_index(standard, gamma)?;
    Ok(SweepRow {
        gamma,
        exact_index: exact.index,
        exact_bracket_lo: exact.bracket.0,
        exact_bracket_hi: exact.bracket.1,
        quantile_index: q,
        optimistic_index: optimistic_index(standard, gamma)?,
        upper_bound: upper_bound_index(gamma)?.value,
        lower_bound: lower_bound_index(gamma, ratio)?.bound,
        gap_exact_vs_quantile: (exact.index - q).abs(),
    })
}

/// Strictly decreasing gaps. Vacuous for fewer than two rows.
pub fn gaps_decreasing(rows: &[SweepRow]) -> bool {
    rows.windows(2).all(|w| w[1].gap_exact_vs_quantile < w[0].gap_exact_vs_quantile)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    check_grid(&args.grid, "discount", true)?;
    NoiseModel::new(args.ratio)?;
    let rows = args
        .grid
        .iter()
        .map(|&g| sweep_row(g, args.ratio, &args.solver.config(g)))
        .collect::<Result<Vec<_>>>()?;
    let configs: Vec<SolverConfig> = args.grid.iter().map(|&g| args.solver.config(g)).collect();
    let meta = Metadata::new("verify", None, json!({ "grid": args.grid, "ratio": args.ratio, "solver": configs }));
    let mut csv = meta.csv_header()?;
    csv.push_str(&SWEEP_COLUMNS.join(","));
    csv.push('\n');
    for row in &rows {
        let cells: Vec<String> = row.values().iter().map(|v| fmt_f64(*v)).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }

    let mut outcome = Outcome::emit(&args.out, csv);
    if let Some(path) = &args.out {
        let horizon = |g: f64| -(-g).ln_1p();
        let chart = line_chart(
            &format!("Gap to the quantile index, noise-to-signal {}", args.ratio),
            "log(1/(1 - gamma))",
            "gap",
            &[
                Series {
                    name: "|exact - quantile|".into(),
                    points: rows.iter().map(|r| (horizon(r.gamma), r.gap_exact_vs_quantile)).collect(),
                },
                Series {
                    name: "optimistic - exact".into(),
                    points: rows.iter().map(|r| (horizon(r.gamma), r.optimistic_index - r.exact_index)).collect(),
                },
            ],
        );
        outcome.files.push((path.with_extension("svg"), chart));
    }
    if !gaps_decreasing(&rows) {
        let gaps: Vec<String> = rows.iter().map(|r| format!("{:.6}", r.gap_exact_vs_quantile)).collect();
        outcome.failure = Some(format!("gap to the quantile index is not strictly decreasing: {}", gaps.join(", ")));
    }
    Ok(outcome)
}

pub fn cmd_table(args: &TableArgs) -> Result<Outcome> {
    let gamma = check_gamma(args.gamma)?;
    check_grid(&args.grid, "ratio", false)?;
    let table = build_table(gamma, &args.grid, &args.solver.config(gamma))?;
    Ok(Outcome { files: vec![(args.out.clone(), table.to_json()? + "\n")], ..Default::default() })
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome> {
    let gamma = check_gamma(args.gamma)?;
    let mut config = args.arms.simulation(gamma, Policy::Greedy)?;
    config.policy = match args.policy.as_str() {
        "gittins" => Policy::Gittins(args.arms.gittins_table(gamma, config.horizon)?),
        name => Policy::from_name(name, None)?,
    };
    config.record_trace = args.format == Format::Csv;
    let output = sim::run(&config)?;
    let meta = Metadata::new("simulate", Some(config.seed), &config);
    let text = match args.format {
        Format::Csv => meta.csv_header()? + &trace_csv(&output)?,
        Format::Json => {
            let summary = Summary::new(config.policy.name(), &output);
            serde_json::to_string_pretty(&json!({ "metadata": meta, "summary": summary }))? + "\n"
        }
    };
    Ok(Outcome::emit(&args.out, text))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgreementRow {
    pub gamma: f64,
    pub horizon: u64,
    pub replications: u64,
    pub agreement_rate: f64,
}

pub fn cmd_agreement(args: &AgreementArgs) -> Result<Outcome> {
    check_grid(&args.grid, "discount", true)?;
    if args.arms.table.is_some() && args.grid.len() > 1 {
        return Err(Error::Config("--table fixes one discount; use a single-value --grid".into()));
    }
    let mut rows = Vec::new();
    for &gamma in &args.grid {
        let config = args.arms.simulation(gamma, Policy::Greedy)?;
        let gittins = Policy::Gittins(args.arms.gittins_table(gamma, config.horizon)?);
        let other = match args.policy.as_str() {
            "gittins" => gittins.clone(),
            name => Policy::from_name(name, None)?,
        };
        rows.push(AgreementRow {
            gamma,
            horizon: config.horizon,
            replications: config.replications,
            agreement_rate: agreement_rate(&config, &gittins, &other)?,
        });
    }
    let increasing = rows.windows(2).all(|w| w[1].agreement_rate >= w[0].agreement_rate);
    let meta = Metadata::new(
        "agreement",
        Some(args.arms.seed),
        json!({ "grid": args.grid, "policy_a": "gittins", "policy_b": args.policy, "arms": args.arms.arms()?,
                "horizon": args.arms.horizon, "reps": args.arms.reps }),
    );
    let text = match args.format {
        Format::Csv => {
            let mut csv = meta.csv_header()?;
            csv.push_str(&format!("# agreement nondecreasing in gamma: {increasing}\n"));
            csv.push_str("gamma,horizon,replications,agreement_rate\n");
            for r in &rows {
                csv.push_str(&format!("{},{},{},{}\n", fmt_f64(r.gamma), r.horizon, r.replications, fmt_f64(r.agreement_rate)));
            }
            csv
        }
        Format::Json => {
            serde_json::to_string_pretty(&json!({ "metadata": meta, "rows": rows, "nondecreasing": increasing }))? + "\n"
        }
    };
    Ok(Outcome::emit(&args.out, text))
}

/// Worker count from `GITTINS_LAB_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Index(a) => cmd_index(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Table(a) => cmd_table(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Agreement(a) => cmd_agreement(a),
    }
}

fn write_outputs(outcome: &Outcome) -> std::result::Result<(), String> {
    for (path, text) in &outcome.files {
        write_atomic(Path::new(path), text.as_bytes()).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

/// Parses `args`, runs the command on a pool sized by `GITTINS_LAB_THREADS`
/// and writes its outputs. Returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::Usage } else { ExitStatus::Success };
        }
    };
    let result = threads_from_env().and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        pool.install(|| execute(&cli.command))
    });
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitStatus::of(&e);
        }
    };
    print!("{}", outcome.stdout);
    if let Err(msg) = write_outputs(&outcome) {
        eprintln!("error: {msg}");
        return ExitStatus::Io;
    }
    match outcome.failure {
        Some(msg) => {
            eprintln!("acceptance failure: {msg}");
            ExitStatus::Numeric
        }
        None => ExitStatus::Success,
    }
}
