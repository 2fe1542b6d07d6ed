//! Command-line surface: matching, exact oracles, and reproducible
//! Monte Carlo experiments with config-file round-tripping.
//!
//! Output contract: CSV (default) or JSON on stdout or `--output`, with
//! the resolved configuration embedded as `# key = value` header lines so
//! a run can be reproduced from its own output. Timing goes to stderr so
//! that repeated runs with the same seed produce byte-identical tables.
//!
//! Exit codes: 0 success (or instance found), 1 clean negative
//! (not an instance), 2 usage or input error, 3 budget exceeded.

use crate::words::Pattern;
use crate::{exact, matcher, montecarlo, Budget, Error, Word};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

/// Exit code for clean negatives (word is not an instance).
pub const EXIT_NEGATIVE: i32 = 1;
/// Exit code for usage and input errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit code for exceeded work budgets.
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser)]
#[command(
    name = "patdens",
    version,
    about = "Pattern-encounter densities in free words",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether WORD is an instance of PATTERN and print a witness.
    Match {
        pattern: String,
        word: String,
    },
    /// Exact density of PATTERN in WORD.
    Density {
        pattern: String,
        word: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact rational oracles.
    Exact {
        #[command(subcommand)]
        command: ExactCommand,
    },
    /// Seeded Monte Carlo experiments.
    Experiment(ExperimentArgs),
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the table to a file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Args, Clone)]
struct ExactArgs {
    /// Pattern over variable letters, e.g. `xx` or `abacaba`.
    #[arg(long)]
    pattern: String,
    /// Alphabet size.
    #[arg(long)]
    q: usize,
    /// Length or length range `start:stop:x2|+k`.
    #[arg(long)]
    n: String,
    /// Work-unit budget override.
    #[arg(long)]
    budget: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Subcommand)]
enum ExactCommand {
    /// Exact instance probability I_n.
    Instprob(ExactArgs),
    /// Exact expected density E(delta).
    Expdens(ExactArgs),
    /// Exact expected encounter count E(hom).
    Exphom(ExactArgs),
    /// Instance-count upper bound for doubled patterns.
    Bound(ExactArgs),
    /// Tail bound n^{k+3} q^{f(1-r)/r} for doubled patterns.
    Tailbound {
        #[command(flatten)]
        args: ExactArgs,
        /// Threshold parameter f.
        #[arg(long)]
        f: f64,
    },
    /// Limiting instance probability of `xyx` via unbordered-word counts.
    Z2limit {
        #[arg(long)]
        q: usize,
        /// Absolute tolerance of the reported limit.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Clone)]
struct ExperimentArgs {
    /// Experiment kind; may come from the config file instead.
    kind: Option<ExperimentKind>,
    /// Flat key=value config file; explicit flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    q: Option<usize>,
    /// Length grid `start:stop:x2|+k` or a single length.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest moment order for the moments experiment.
    #[arg(long)]
    p_max: Option<usize>,
    /// Tolerance knob recorded with the run.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Work-unit budget override.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the table to a file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads (default: machine parallelism); never affects values.
    #[arg(long)]
    workers: Option<usize>,
    /// Allow nondoubled patterns in the variance experiment.
    #[arg(long, default_value_t = false)]
    exploratory: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExperimentKind {
    Dichotomy,
    Variance,
    Moments,
    Lemma4,
    Instprob,
}

impl ExperimentKind {
    fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Dichotomy => "dichotomy",
            ExperimentKind::Variance => "variance",
            ExperimentKind::Moments => "moments",
            ExperimentKind::Lemma4 => "lemma4",
            ExperimentKind::Instprob => "instprob",
        }
    }

    fn parse(s: &str) -> Result<ExperimentKind, CliError> {
        match s {
            "dichotomy" => Ok(ExperimentKind::Dichotomy),
            "variance" => Ok(ExperimentKind::Variance),
            "moments" => Ok(ExperimentKind::Moments),
            "lemma4" => Ok(ExperimentKind::Lemma4),
            "instprob" => Ok(ExperimentKind::Instprob),
            other => Err(CliError::usage(format!("unknown experiment kind {other:?}"))),
        }
    }
}

/// Fully resolved experiment configuration; round-trips through the flat
/// `key = value` config format and is embedded in every output header.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub pattern: String,
    pub q: usize,
    pub n: String,
    pub samples: u64,
    pub seed: u64,
    pub p_max: usize,
    pub tolerance: f64,
    pub budget: u64,
    pub format: String,
}

impl ExperimentConfig {
    /// The header/config lines, in canonical order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("experiment", self.experiment.clone()),
            ("pattern", self.pattern.clone()),
            ("q", self.q.to_string()),
            ("n", self.n.clone()),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
            ("p_max", self.p_max.to_string()),
            ("tolerance", format_real(self.tolerance)),
            ("budget", self.budget.to_string()),
            ("format", self.format.clone()),
        ]
    }

    /// Serializes to the flat config file format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Parses the flat `key = value` format; `#`-comments and the
    /// `patdens_version` key are ignored.
    pub fn parse_file(text: &str) -> Result<PartialConfig, CliError> {
        let mut cfg = PartialConfig::default();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim().trim_start_matches('#').trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "config line {}: expected `key = value`, got {raw:?}",
                    line_no + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| {
                CliError::usage(format!("config line {}: invalid {what}: {value:?}", line_no + 1))
            };
            match key {
                "experiment" => cfg.experiment = Some(value.to_string()),
                "pattern" => cfg.pattern = Some(value.to_string()),
                "q" => cfg.q = Some(value.parse().map_err(|_| bad("q"))?),
                "n" => cfg.n = Some(value.to_string()),
                "samples" => cfg.samples = Some(value.parse().map_err(|_| bad("samples"))?),
                "seed" => cfg.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "p_max" => cfg.p_max = Some(value.parse().map_err(|_| bad("p_max"))?),
                "tolerance" => cfg.tolerance = Some(value.parse().map_err(|_| bad("tolerance"))?),
                "budget" => cfg.budget = Some(value.parse().map_err(|_| bad("budget"))?),
                "format" => cfg.format = Some(value.to_string()),
                "patdens_version" => {}
                other => {
                    return Err(CliError::usage(format!(
                        "config line {}: unknown key {other:?}",
                        line_no + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }
}

/// Config-file values before merging with flags and defaults.
#[derive(Debug, Default, Clone)]
pub struct PartialConfig {
    pub experiment: Option<String>,
    pub pattern: Option<String>,
    pub q: Option<usize>,
    pub n: Option<String>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub p_max: Option<usize>,
    pub tolerance: Option<f64>,
    pub budget: Option<u64>,
    pub format: Option<String>,
}

/// Parses `start:stop:x2`, `start:stop:+k`, or a single length.
pub fn parse_n_range(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::usage(format!("invalid length range {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => {
            let n: usize = single.parse().map_err(|_| bad())?;
            if n == 0 {
                return Err(bad());
            }
            Ok(vec![n])
        }
        [start, stop, step] => {
            let start: usize = start.parse().map_err(|_| bad())?;
            let stop: usize = stop.parse().map_err(|_| bad())?;
            if start == 0 || stop < start {
                return Err(bad());
            }
            let mut out = Vec::new();
            let mut n = start;
            if let Some(f) = step.strip_prefix('x') {
                let f: usize = f.parse().map_err(|_| bad())?;
                if f < 2 {
                    return Err(bad());
                }
                while n <= stop {
                    out.push(n);
                    match n.checked_mul(f) {
                        Some(next) => n = next,
                        None => break,
                    }
                }
            } else if let Some(k) = step.strip_prefix('+') {
                let k: usize = k.parse().map_err(|_| bad())?;
                if k == 0 {
                    return Err(bad());
                }
                while n <= stop {
                    out.push(n);
                    n += k;
                }
            } else {
                return Err(bad());
            }
            Ok(out)
        }
        _ => Err(bad()),
    }
}

/// Renders with exactly 9 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.8e}")
}

fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn rational_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// An error plus the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    fn usage(message: String) -> CliError {
        CliError { message, code: EXIT_USAGE }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        CliError { message: e.to_string(), code }
    }
}

/// A rendered output table: embedded header entries, column names, and
/// stringly-typed cells (already formatted to the precision contract).
struct Table {
    header: Vec<(&'static str, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Table {
        Table { header: Vec::new(), columns, rows: Vec::new() }
    }

    fn with_config(mut self, cfg: &ExperimentConfig) -> Table {
        self.header = cfg.entries();
        self
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# patdens_version = {}", env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.header {
            let _ = writeln!(out, "# {k} = {v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    fn to_json(&self) -> String {
        let mut obj = serde_json::Map::new();
        obj.insert("patdens_version".into(), env!("CARGO_PKG_VERSION").into());
        let mut header = serde_json::Map::new();
        for (k, v) in &self.header {
            header.insert((*k).into(), v.clone().into());
        }
        obj.insert("config".into(), header.into());
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = serde_json::Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    m.insert((*col).into(), cell.clone().into());
                }
                m.into()
            })
            .collect();
        obj.insert("rows".into(), rows.into());
        let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(obj))
            .expect("tables serialize");
        s.push('\n');
        s
    }

    fn emit(&self, out: &OutputArgs) -> Result<(), CliError> {
        let text = match out.format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        match &out.output {
            None => {
                print!("{text}");
                Ok(())
            }
            Some(path) => std::fs::write(path, text).map_err(|e| {
                CliError::usage(format!("cannot write {}: {e}", path.display()))
            }),
        }
    }
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; --help/--version exit 0
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    let outcome = dispatch(cli);
    eprintln!("# wall_time_s = {:.3}", started.elapsed().as_secs_f64());
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Match { pattern, word } => cmd_match(&pattern, &word),
        Command::Density { pattern, word, out } => cmd_density(&pattern, &word, &out),
        Command::Exact { command } => cmd_exact(command),
        Command::Experiment(args) => cmd_experiment(args),
    }
}

fn cmd_match(pattern: &str, word: &str) -> Result<i32, CliError> {
    let p = Pattern::parse(pattern)?;
    let w = Word::parse(word)?;
    // original letter of each canonical variable, in first-occurrence order
    let mut letters: Vec<char> = Vec::new();
    for c in pattern.chars() {
        if !letters.contains(&c) {
            letters.push(c);
        }
    }
    match matcher::find_witness(&w, &p)? {
        Some(phi) => {
            let rendering: Vec<String> = letters
                .iter()
                .enumerate()
                .map(|(v, letter)| format!("{letter} -> {}", phi.image(v).render()))
                .collect();
            println!("instance: {}", rendering.join(", "));
            Ok(0)
        }
        None => {
            println!("not an instance");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn cmd_density(pattern: &str, word: &str, out: &OutputArgs) -> Result<i32, CliError> {
    let p = Pattern::parse(pattern)?;
    let w = Word::parse(word)?;
    let d = matcher::density(&p, &w)?;
    let mut table = Table::new(vec!["pattern", "word", "density", "decimal"]);
    table.header = vec![("pattern", pattern.to_string()), ("word", word.to_string())];
    table.push(vec![
        pattern.to_string(),
        word.to_string(),
        format!("{}/{}", d.numerator, d.denominator),
        format_real(d.numerator as f64 / d.denominator as f64),
    ]);
    table.emit(out)?;
    Ok(0)
}

fn exact_budget(args: &ExactArgs) -> Budget {
    args.budget.map(Budget::new).unwrap_or_else(Budget::from_env)
}

fn cmd_exact(command: ExactCommand) -> Result<i32, CliError> {
    match command {
        ExactCommand::Instprob(args) => {
            exact_rational_table(&args, "instance_probability", |p, q, n, budget| {
                exact::instance_probability(p, q, n, budget)
            })
        }
        ExactCommand::Expdens(args) => {
            exact_rational_table(&args, "expected_density", |p, q, n, budget| {
                exact::expected_density(p, q, n, budget)
            })
        }
        ExactCommand::Exphom(args) => {
            exact_rational_table(&args, "expected_hom", |p, q, n, _| exact::expected_hom(p, q, n))
        }
        ExactCommand::Bound(args) => exact_real_table(&args, "instance_count_bound", |p, q, n| {
            exact::instance_count_bound(p, q, n)
        }),
        ExactCommand::Tailbound { args, f } => {
            exact_real_table(&args, "tail_bound", move |p, q, n| exact::tail_bound(p, q, n, f))
        }
        ExactCommand::Z2limit { q, tol, out } => {
            let value = exact::bordered_limit(q, tol)?;
            let mut table = Table::new(vec!["q", "tol", "limit"]);
            table.header =
                vec![("operation", "z2limit".into()), ("q", q.to_string()), ("tol", format_real(tol))];
            table.push(vec![q.to_string(), format_real(tol), format_real(value)]);
            table.emit(&out)?;
            Ok(0)
        }
    }
}

fn exact_rational_table(
    args: &ExactArgs,
    name: &'static str,
    eval: impl Fn(&Pattern, usize, usize, &Budget) -> crate::Result<BigRational>,
) -> Result<i32, CliError> {
    let p = Pattern::parse(&args.pattern)?;
    let budget = exact_budget(args);
    let mut table = Table::new(vec!["n", "exact", "decimal"]);
    table.header = vec![
        ("operation", name.into()),
        ("pattern", args.pattern.clone()),
        ("q", args.q.to_string()),
        ("n", args.n.clone()),
    ];
    for n in parse_n_range(&args.n)? {
        let v = eval(&p, args.q, n, &budget)?;
        table.push(vec![n.to_string(), format_rational(&v), format_real(rational_f64(&v))]);
    }
    table.emit(&args.out)?;
    Ok(0)
}

fn exact_real_table(
    args: &ExactArgs,
    name: &'static str,
    eval: impl Fn(&Pattern, usize, usize) -> crate::Result<f64>,
) -> Result<i32, CliError> {
    let p = Pattern::parse(&args.pattern)?;
    let mut table = Table::new(vec!["n", "value"]);
    table.header = vec![
        ("operation", name.into()),
        ("pattern", args.pattern.clone()),
        ("q", args.q.to_string()),
        ("n", args.n.clone()),
    ];
    for n in parse_n_range(&args.n)? {
        table.push(vec![n.to_string(), format_real(eval(&p, args.q, n)?)]);
    }
    table.emit(&args.out)?;
    Ok(0)
}

fn resolve_experiment(args: &ExperimentArgs) -> Result<(ExperimentConfig, ExperimentKind), CliError> {
    let file = match &args.config {
        None => PartialConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::usage(format!("cannot read {}: {e}", path.display()))
            })?;
            ExperimentConfig::parse_file(&text)?
        }
    };
    let kind = match (&args.kind, &file.experiment) {
        (Some(k), _) => *k,
        (None, Some(name)) => ExperimentKind::parse(name)?,
        (None, None) => {
            return Err(CliError::usage("no experiment kind given (argument or config)".into()))
        }
    };
    let pattern = args
        .pattern
        .clone()
        .or(file.pattern)
        .ok_or_else(|| CliError::usage("missing --pattern".into()))?;
    let q = args.q.or(file.q).ok_or_else(|| CliError::usage("missing --q".into()))?;
    let n = args.n.clone().or(file.n).ok_or_else(|| CliError::usage("missing --n".into()))?;
    let format = match args.format {
        Some(f) => f.as_str().to_string(),
        None => file.format.unwrap_or_else(|| "csv".into()),
    };
    if format != "csv" && format != "json" {
        return Err(CliError::usage(format!("unknown format {format:?}")));
    }
    let cfg = ExperimentConfig {
        experiment: kind.as_str().into(),
        pattern,
        q,
        n,
        samples: args.samples.or(file.samples).unwrap_or(10_000),
        seed: args.seed.or(file.seed).unwrap_or(0),
        p_max: args.p_max.or(file.p_max).unwrap_or(2),
        tolerance: args.tolerance.or(file.tolerance).unwrap_or(1e-7),
        budget: args
            .budget
            .or(file.budget)
            .unwrap_or_else(|| Budget::from_env().max_work),
        format,
    };
    Ok((cfg, kind))
}

fn cmd_experiment(args: ExperimentArgs) -> Result<i32, CliError> {
    let (cfg, kind) = resolve_experiment(&args)?;
    let out = OutputArgs {
        format: if cfg.format == "json" { Format::Json } else { Format::Csv },
        output: args.output.clone(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::usage(format!("cannot build worker pool: {e}")))?;
    let exploratory = args.exploratory;
    let table = pool.install(|| build_experiment_table(&cfg, kind, exploratory))?;
    eprintln!("# work_units = {}", experiment_work(&cfg, kind)?);
    table.emit(&out)?;
    Ok(0)
}

/// Work-unit estimate for the footer, matching the budget accounting.
fn experiment_work(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<u64, CliError> {
    let p = Pattern::parse(&cfg.pattern)?;
    let n_list = parse_n_range(&cfg.n)?;
    let per_n: u64 = n_list
        .iter()
        .map(|&n| match kind {
            ExperimentKind::Dichotomy | ExperimentKind::Variance | ExperimentKind::Moments => {
                montecarlo::density_work(&p, n)
            }
            ExperimentKind::Lemma4 | ExperimentKind::Instprob => n as u64,
        })
        .sum();
    Ok(per_n.saturating_mul(cfg.samples))
}

fn trajectory_table(
    cfg: &ExperimentConfig,
    value_col: &'static str,
    scaled_col: &'static str,
    rows: &[montecarlo::TrajectoryRow],
) -> Table {
    let mut table =
        Table::new(vec!["n", value_col, scaled_col, "ci_half_width", "samples"]).with_config(cfg);
    for r in rows {
        table.push(vec![
            r.n.to_string(),
            format_real(r.estimate),
            format_real(r.scaled_estimate),
            format_real(r.ci_half_width),
            r.sample_count.to_string(),
        ]);
    }
    table
}

fn build_experiment_table(
    cfg: &ExperimentConfig,
    kind: ExperimentKind,
    exploratory: bool,
) -> Result<Table, CliError> {
    let p = Pattern::parse(&cfg.pattern)?;
    let n_list = parse_n_range(&cfg.n)?;
    let budget = Budget::new(cfg.budget);
    match kind {
        ExperimentKind::Dichotomy => {
            let rows =
                montecarlo::dichotomy_trajectory(&p, cfg.q, &n_list, cfg.samples, cfg.seed, &budget)?;
            Ok(trajectory_table(cfg, "mean", "scaled_mean", &rows))
        }
        ExperimentKind::Variance => {
            let rows = montecarlo::variance_scaling(
                &p, cfg.q, &n_list, cfg.samples, cfg.seed, exploratory, &budget,
            )?;
            Ok(trajectory_table(cfg, "variance", "scaled_variance", &rows))
        }
        ExperimentKind::Moments => {
            let trajectories = montecarlo::moment_scaling(
                &p, cfg.q, &n_list, cfg.samples, cfg.seed, cfg.p_max, &budget,
            )?;
            let mut table = Table::new(vec![
                "moment",
                "order",
                "n",
                "value",
                "scaled_value",
                "ci_half_width",
                "samples",
            ])
            .with_config(cfg);
            for t in &trajectories {
                for r in &t.rows {
                    table.push(vec![
                        if t.central { "central".into() } else { "raw".into() },
                        t.order.to_string(),
                        r.n.to_string(),
                        format_real(r.estimate),
                        format_real(r.scaled_estimate),
                        format_real(r.ci_half_width),
                        r.sample_count.to_string(),
                    ]);
                }
            }
            Ok(table)
        }
        ExperimentKind::Lemma4 => {
            let rows = montecarlo::lemma_base_diagnostic(
                &p, cfg.q, &n_list, cfg.samples, cfg.seed, &budget,
            )?;
            let mut table =
                Table::new(vec!["n", "fraction", "ci_half_width", "samples"]).with_config(cfg);
            for r in &rows {
                table.push(vec![
                    r.n.to_string(),
                    format_real(r.estimate),
                    format_real(r.ci_half_width),
                    r.sample_count.to_string(),
                ]);
            }
            Ok(table)
        }
        ExperimentKind::Instprob => {
            let mut table =
                Table::new(vec!["n", "mean", "ci_half_width", "samples"]).with_config(cfg);
            for &n in &n_list {
                let est = montecarlo::estimate_instance_probability(
                    &p, cfg.q, n, cfg.samples, cfg.seed, &budget,
                )?;
                table.push(vec![
                    n.to_string(),
                    format_real(est.mean),
                    format_real(est.ci_half_width),
                    est.sample_count.to_string(),
                ]);
            }
            Ok(table)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_range_parsing() {
        assert_eq!(parse_n_range("8").unwrap(), vec![8]);
        assert_eq!(parse_n_range("64:512:x2").unwrap(), vec![64, 128, 256, 512]);
        assert_eq!(parse_n_range("2:8:+3").unwrap(), vec![2, 5, 8]);
        assert_eq!(parse_n_range("64:500:x2").unwrap(), vec![64, 128, 256]);
        assert!(parse_n_range("0").is_err());
        assert!(parse_n_range("4:2:x2").is_err());
        assert!(parse_n_range("1:8:x1").is_err());
        assert!(parse_n_range("1:8:+0").is_err());
        assert!(parse_n_range("a:b:x2").is_err());
    }

    #[test]
    fn real_formatting_has_nine_significant_digits() {
        assert_eq!(format_real(0.7322131597), "7.32213160e-1");
        assert_eq!(format_real(1.0), "1.00000000e0");
    }

    #[test]
    fn config_round_trip() {
        let cfg = ExperimentConfig {
            experiment: "dichotomy".into(),
            pattern: "xx".into(),
            q: 2,
            n: "64:4096:x2".into(),
            samples: 100_000,
            seed: 7,
            p_max: 2,
            tolerance: 1e-7,
            budget: 10_000_000_000,
            format: "csv".into(),
        };
        let text = cfg.render();
        let parsed = ExperimentConfig::parse_file(&text).unwrap();
        assert_eq!(parsed.experiment.as_deref(), Some("dichotomy"));
        assert_eq!(parsed.pattern.as_deref(), Some("xx"));
        assert_eq!(parsed.q, Some(2));
        assert_eq!(parsed.n.as_deref(), Some("64:4096:x2"));
        assert_eq!(parsed.samples, Some(100_000));
        assert_eq!(parsed.seed, Some(7));
        assert_eq!(parsed.p_max, Some(2));
        assert_eq!(parsed.budget, Some(10_000_000_000));
        assert_eq!(parsed.format.as_deref(), Some("csv"));
    }

    #[test]
    fn config_parse_accepts_header_lines() {
        let text = "# patdens_version = 0.1.0\n# experiment = dichotomy\n# pattern = xx\n";
        let parsed = ExperimentConfig::parse_file(text).unwrap();
        assert_eq!(parsed.experiment.as_deref(), Some("dichotomy"));
        assert_eq!(parsed.pattern.as_deref(), Some("xx"));
    }

    #[test]
    fn config_parse_rejects_unknown_key() {
        assert!(ExperimentConfig::parse_file("bogus = 1\n").is_err());
    }
}
