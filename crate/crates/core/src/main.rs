//! Command-line surface: every computation as a subcommand with reproducible
//! configs and CSV/JSON outputs.
//!
//! Exit codes: 0 ok, 2 config/usage error, 3 domain error (infinite mean,
//! horizon budget, ill-posed request), 4 property-suite failure.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trapwalk::error::Error;
use trapwalk::exact::{
    count_distribution_with_limit, position_distribution_with_limit, EXACT_MAX_T,
};
use trapwalk::msd::{msd_series_with_limit, DEFAULT_MAX_HORIZON};
use trapwalk::report;
use trapwalk::{
    beta_sweep, clt_check, concentration_check, heavy_tail_scaling_check, linear_bounds,
    parse_spec, powerlaw_fit, renewal_mass, sigmoid_fit, simulate_walker_with, Sampler,
    SigmoidModel,
};

const ENV_MAX_HORIZON: &str = "TRAPWALK_MAX_HORIZON";

#[derive(Parser)]
#[command(
    name = "trapwalk",
    about = "Trapped random walks: exact MSD, exact laws, Monte Carlo, scaling fits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact MSD series by the convolution recurrence
    Msd(MsdArgs),
    /// Exact position or renewal-count law
    Exact(ExactArgs),
    /// Monte Carlo: ensemble MSD, checkpoint samples, or one trajectory
    Simulate(SimulateArgs),
    /// Power-law or sigmoidal fit of a series file
    Fit(FitArgs),
    /// Regenerate the beta_N(q) tables
    #[command(name = "beta-sweep")]
    BetaSweep(BetaSweepArgs),
    /// Run a named property suite; nonzero exit on failure
    Check(CheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Load defaults from a key=value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the resolved config to a file, then run
    #[arg(long, value_name = "PATH")]
    dump_config: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output encoding
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct MsdArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Distribution spec: exp:<l> | zeta:<q> | det:<tau0> | custom:<path>
    #[arg(long)]
    dist: Option<String>,
    /// Horizon N (series covers t = 0..=N)
    #[arg(long)]
    tmax: Option<usize>,
    /// Add the diffusive envelope columns (finite-mean laws only)
    #[arg(long)]
    bounds: bool,
    /// Cap worker threads (results do not depend on this)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    t: Option<usize>,
    /// Which law to compute: position | count
    #[arg(long)]
    law: Option<String>,
    /// Use the full-state oracle instead of the subordination route
    #[arg(long)]
    oracle: bool,
    /// Cap worker threads (results do not depend on this)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    tmax: Option<usize>,
    #[arg(long)]
    walkers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Emit one trajectory (t,x,trap) instead of ensemble statistics
    #[arg(long)]
    trajectory: bool,
    /// Retain (X_t, N_t) samples at these times (comma-separated)
    #[arg(long)]
    checkpoints: Option<String>,
    /// Cap worker threads (results do not depend on this)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input CSV: `t,sigma2` for power-law fits, `q,beta` (or beta-sweep
    /// output) for sigmoid fits
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    tmin: Option<usize>,
    #[arg(long)]
    tmax: Option<usize>,
    /// Sigmoid meta-fit: two | three
    #[arg(long)]
    sigmoid: Option<String>,
    /// Cap worker threads (results do not depend on this)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct BetaSweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid: comma list (1.01,1.51) or range a:b:step (1.01:3.01:0.05)
    #[arg(long)]
    q: Option<String>,
    /// Comma-separated fit horizons, e.g. 8192,32768,131072
    #[arg(long = "N", alias = "n")]
    n_list: Option<String>,
    #[arg(long)]
    tmin: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Suite: clt | concentration | heavy-tail | invariants
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    tmax: Option<usize>,
    #[arg(long)]
    walkers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    checkpoints: Option<String>,
    /// Moment boundary for concentration / heavy-tail suites
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Msd(args) => run_msd(args),
        Command::Exact(args) => run_exact(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Fit(args) => run_fit(args),
        Command::BetaSweep(args) => run_beta_sweep(args),
        Command::Check(args) => run_check(args),
    };
    match code {
        Ok(c) => c,
        Err(e) => {
            eprintln!("trapwalk: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Validation(_) | Error::Window(_) => 2,
        Error::Domain(_)
        | Error::InfiniteMean
        | Error::HorizonTooLarge { .. }
        | Error::ZeroEscape
        | Error::FitDiverged => 3,
    }
}

fn config_error(msg: String) -> Error {
    Error::Parse { pos: 0, msg }
}

fn max_horizon() -> usize {
    std::env::var(ENV_MAX_HORIZON)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_HORIZON)
}

fn exact_ceiling() -> usize {
    std::env::var(ENV_MAX_HORIZON)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(EXACT_MAX_T)
}

/// Flat key=value config: load, merge, dump.
struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    fn new(subcommand: &str) -> Self {
        let mut values = BTreeMap::new();
        values.insert("subcommand".to_string(), subcommand.to_string());
        Config { values }
    }

    fn load(path: &PathBuf, subcommand: &str) -> Result<Self, Error> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                pos: i + 1,
                msg: format!("expected key=value, got `{line}`"),
            })?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        if let Some(sub) = values.get("subcommand") {
            if sub != subcommand {
                return Err(config_error(format!(
                    "config is for subcommand `{sub}`, not `{subcommand}`"
                )));
            }
        }
        values.insert("subcommand".to_string(), subcommand.to_string());
        Ok(Config { values })
    }

    fn set(&mut self, key: &str, value: String) {
        self.values.insert(key.to_string(), value);
    }

    fn set_if_missing(&mut self, key: &str, value: String) {
        self.values.entry(key.to_string()).or_insert(value);
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn require(&self, key: &str) -> Result<&str, Error> {
        self.get(key)
            .ok_or_else(|| config_error(format!("missing required option --{key}")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T, Error> {
        let raw = self.require(key)?;
        raw.parse()
            .map_err(|_| config_error(format!("bad value for --{key}: `{raw}`")))
    }

    fn dump(&self, path: &PathBuf) -> Result<(), Error> {
        let mut text = String::new();
        for (k, v) in &self.values {
            text.push_str(&format!("{k}={v}\n"));
        }
        fs::write(path, text)
            .map_err(|e| config_error(format!("cannot write config {}: {e}", path.display())))
    }
}

/// Builds the resolved config: defaults < config file < explicit flags.
fn resolve(
    subcommand: &str,
    common: &CommonArgs,
    flags: Vec<(&str, Option<String>)>,
    defaults: Vec<(&str, String)>,
) -> Result<Config, Error> {
    let mut cfg = match &common.config {
        Some(path) => Config::load(path, subcommand)?,
        None => Config::new(subcommand),
    };
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v);
        }
    }
    if let Some(out) = &common.out {
        cfg.set("out", out.display().to_string());
    }
    if let Some(fmt) = common.format {
        cfg.set(
            "format",
            match fmt {
                Format::Csv => "csv".into(),
                Format::Json => "json".into(),
            },
        );
    }
    cfg.set_if_missing("format", "csv".into());
    for (key, value) in defaults {
        cfg.set_if_missing(key, value);
    }
    if let Some(path) = &common.dump_config {
        cfg.dump(path)?;
    }
    Ok(cfg)
}

fn emit(cfg: &Config, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> ExitCode {
    let mut buf: Vec<u8> = Vec::new();
    if let Err(e) = body(&mut buf) {
        eprintln!("trapwalk: output failed: {e}");
        return ExitCode::from(1);
    }
    match cfg.get("out") {
        Some(path) => {
            if let Err(e) = fs::write(path, &buf) {
                eprintln!("trapwalk: cannot write {path}: {e}");
                return ExitCode::from(1);
            }
        }
        None => {
            if std::io::stdout().write_all(&buf).is_err() {
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}

fn json_format(cfg: &Config) -> bool {
    cfg.get("format") == Some("json")
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| config_error(format!("bad integer `{part}` in list")))
        })
        .collect()
}

fn parse_q_grid(text: &str) -> Result<Vec<f64>, Error> {
    if let Some((a, rest)) = text.split_once(':') {
        let (b, step) = rest
            .split_once(':')
            .ok_or_else(|| config_error(format!("range needs a:b:step, got `{text}`")))?;
        let a: f64 = a
            .parse()
            .map_err(|_| config_error(format!("bad range start `{a}`")))?;
        let b: f64 = b
            .parse()
            .map_err(|_| config_error(format!("bad range end `{b}`")))?;
        let step: f64 = step
            .parse()
            .map_err(|_| config_error(format!("bad range step `{step}`")))?;
        if step.is_nan() || step <= 0.0 || b < a {
            return Err(config_error(format!("degenerate range `{text}`")));
        }
        let count = ((b - a) / step + 0.5).floor() as usize;
        Ok((0..=count).map(|i| a + i as f64 * step).collect())
    } else {
        text.split(',')
            .map(|part| {
                part.trim()
                    .parse()
                    .map_err(|_| config_error(format!("bad q value `{part}`")))
            })
            .collect()
    }
}

fn with_pool<T: Send>(workers: Option<usize>, run: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(k) if k > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool")
            .install(run),
        _ => run(),
    }
}

fn run_msd(args: MsdArgs) -> Result<ExitCode, Error> {
    let cfg = resolve(
        "msd",
        &args.common,
        vec![
            ("dist", args.dist.clone()),
            ("tmax", args.tmax.map(|v| v.to_string())),
            ("bounds", args.bounds.then(|| "true".to_string())),
            ("workers", args.workers.map(|v| v.to_string())),
        ],
        vec![("bounds", "false".into())],
    )?;
    let dist = parse_spec(cfg.require("dist")?)?;
    let tmax: usize = cfg.parse("tmax")?;
    let with_bounds = cfg.get("bounds") == Some("true");
    let workers: Option<usize> = match cfg.get("workers") {
        Some(_) => Some(cfg.parse("workers")?),
        None => None,
    };
    let (series, bounds) = with_pool(workers, || -> Result<_, Error> {
        let series = msd_series_with_limit(&dist, tmax, max_horizon())?;
        let bounds = if with_bounds {
            Some(linear_bounds(&dist, tmax)?)
        } else {
            None
        };
        Ok((series, bounds))
    })?;
    let json = json_format(&cfg);
    Ok(emit(&cfg, |out| {
        if json {
            #[derive(serde::Serialize)]
            struct Payload<'a> {
                series: &'a trapwalk::MsdSeries,
                bounds: Option<&'a trapwalk::BoundEnvelope>,
            }
            report::write_json(
                out,
                &Payload {
                    series: &series,
                    bounds: bounds.as_ref(),
                },
            )
        } else {
            report::write_msd_csv(out, &series, bounds.as_ref())
        }
    }))
}

fn run_exact(args: ExactArgs) -> Result<ExitCode, Error> {
    let cfg = resolve(
        "exact",
        &args.common,
        vec![
            ("dist", args.dist.clone()),
            ("t", args.t.map(|v| v.to_string())),
            ("law", args.law.clone()),
            ("oracle", args.oracle.then(|| "true".to_string())),
            ("workers", args.workers.map(|v| v.to_string())),
        ],
        vec![("law", "position".into()), ("oracle", "false".into())],
    )?;
    let dist = parse_spec(cfg.require("dist")?)?;
    let t: usize = cfg.parse("t")?;
    let oracle = cfg.get("oracle") == Some("true");
    let json = json_format(&cfg);
    match cfg.require("law")? {
        "position" => {
            let law = if oracle {
                trapwalk::brute_force_distribution(&dist, t)?
            } else {
                position_distribution_with_limit(&dist, t, exact_ceiling())?
            };
            Ok(emit(&cfg, |out| {
                if json {
                    report::write_json(out, &law)
                } else {
                    report::write_position_csv(out, &law)
                }
            }))
        }
        "count" => {
            let law = count_distribution_with_limit(&dist, t, exact_ceiling())?;
            Ok(emit(&cfg, |out| {
                if json {
                    report::write_json(out, &law)
                } else {
                    report::write_count_csv(out, &law)
                }
            }))
        }
        other => Err(config_error(format!(
            "unknown law `{other}` (expected position|count)"
        ))),
    }
}

fn run_simulate(args: SimulateArgs) -> Result<ExitCode, Error> {
    let cfg = resolve(
        "simulate",
        &args.common,
        vec![
            ("dist", args.dist.clone()),
            ("tmax", args.tmax.map(|v| v.to_string())),
            ("walkers", args.walkers.map(|v| v.to_string())),
            ("seed", args.seed.map(|v| v.to_string())),
            ("trajectory", args.trajectory.then(|| "true".to_string())),
            ("checkpoints", args.checkpoints.clone()),
            ("workers", args.workers.map(|v| v.to_string())),
        ],
        vec![
            ("walkers", "10000".into()),
            ("seed", "42".into()),
            ("trajectory", "false".into()),
        ],
    )?;
    let dist = parse_spec(cfg.require("dist")?)?;
    let tmax: usize = cfg.parse("tmax")?;
    let seed: u64 = cfg.parse("seed")?;
    let json = json_format(&cfg);
    if cfg.get("trajectory") == Some("true") {
        let sampler = Sampler::new(&dist);
        let mut rng = trapwalk::walker_rng(seed, 0);
        let tr = simulate_walker_with(&sampler, tmax, &mut rng);
        return Ok(emit(&cfg, |out| {
            if json {
                report::write_json(out, &tr)
            } else {
                report::write_trajectory_csv(out, &tr)
            }
        }));
    }
    let walkers: usize = cfg.parse("walkers")?;
    let workers: Option<usize> = match cfg.get("workers") {
        Some(_) => Some(cfg.parse("workers")?),
        None => None,
    };
    if let Some(list) = cfg.get("checkpoints") {
        let checkpoints = parse_usize_list(list)?;
        if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error(
                "checkpoints must be strictly increasing".into(),
            ));
        }
        if checkpoints.last().copied().unwrap_or(0) > tmax {
            return Err(config_error("checkpoints must not exceed --tmax".into()));
        }
        let samples = with_pool(workers, || {
            trapwalk::ensemble_samples(&dist, &checkpoints, walkers, seed)
        });
        return Ok(emit(&cfg, |out| {
            if json {
                report::write_json(out, &samples)
            } else {
                report::write_samples_csv(out, &samples)
            }
        }));
    }
    let stats = with_pool(workers, || {
        trapwalk::ensemble_msd(&dist, tmax, walkers, seed)
    });
    Ok(emit(&cfg, |out| {
        if json {
            report::write_json(out, &stats)
        } else {
            report::write_ensemble_csv(out, &stats)
        }
    }))
}

fn read_series_csv(path: &str) -> Result<trapwalk::MsdSeries, Error> {
    let text =
        fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {path}: {e}")))?;
    let mut sigma2 = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with('t')) {
            continue;
        }
        let mut parts = line.split(',');
        let t: usize = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                pos: i + 1,
                msg: "bad t column".into(),
            })?;
        let v: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                pos: i + 1,
                msg: "bad sigma2 column".into(),
            })?;
        if t != sigma2.len() {
            return Err(Error::Parse {
                pos: i + 1,
                msg: format!("series rows must be contiguous from t=0, got t={t}"),
            });
        }
        sigma2.push(v);
    }
    if sigma2.len() < 2 {
        return Err(config_error("series file has fewer than two rows".into()));
    }
    Ok(trapwalk::MsdSeries {
        dist_spec: path.to_string(),
        horizon: sigma2.len() - 1,
        sigma2,
        diffusion: None,
    })
}

fn read_beta_points(path: &str) -> Result<Vec<(f64, f64)>, Error> {
    let text =
        fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {path}: {e}")))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("").trim();
    let beta_col = match header {
        "q,beta" => 1,
        "q,N,beta,rms" => 2,
        other => {
            return Err(config_error(format!(
                "expected header `q,beta` or `q,N,beta,rms`, got `{other}`"
            )))
        }
    };
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() <= beta_col {
            return Err(Error::Parse {
                pos: i + 2,
                msg: "missing columns".into(),
            });
        }
        let q: f64 = cols[0].trim().parse().map_err(|_| Error::Parse {
            pos: i + 2,
            msg: "bad q".into(),
        })?;
        let beta: f64 = cols[beta_col].trim().parse().map_err(|_| Error::Parse {
            pos: i + 2,
            msg: "bad beta".into(),
        })?;
        points.push((q, beta));
    }
    Ok(points)
}

fn run_fit(args: FitArgs) -> Result<ExitCode, Error> {
    let cfg = resolve(
        "fit",
        &args.common,
        vec![
            (
                "input",
                args.input.as_ref().map(|p| p.display().to_string()),
            ),
            ("tmin", args.tmin.map(|v| v.to_string())),
            ("tmax", args.tmax.map(|v| v.to_string())),
            ("sigmoid", args.sigmoid.clone()),
            ("workers", args.workers.map(|v| v.to_string())),
        ],
        vec![],
    )?;
    let input = cfg.require("input")?;
    let json = json_format(&cfg);
    if let Some(model_txt) = cfg.get("sigmoid") {
        let model = match model_txt {
            "two" => SigmoidModel::TwoParam,
            "three" => SigmoidModel::ThreeParam,
            other => {
                return Err(config_error(format!(
                    "unknown sigmoid model `{other}` (expected two|three)"
                )))
            }
        };
        let points = read_beta_points(input)?;
        let fit = sigmoid_fit(&points, model)?;
        return Ok(emit(&cfg, |out| {
            if json {
                report::write_json(out, &fit)
            } else {
                report::write_sigmoid_fit_csv(out, &fit)
            }
        }));
    }
    let series = read_series_csv(input)?;
    let tmin: usize = cfg.parse("tmin")?;
    let tmax: usize = cfg.parse("tmax")?;
    let fit = powerlaw_fit(&series, tmin, tmax)?;
    Ok(emit(&cfg, |out| {
        if json {
            report::write_json(out, &fit)
        } else {
            report::write_exponent_fit_csv(out, &fit)
        }
    }))
}

fn run_beta_sweep(args: BetaSweepArgs) -> Result<ExitCode, Error> {
    let cfg = resolve(
        "beta-sweep",
        &args.common,
        vec![
            ("q", args.q.clone()),
            ("N", args.n_list.clone()),
            ("tmin", args.tmin.map(|v| v.to_string())),
            ("workers", args.workers.map(|v| v.to_string())),
        ],
        vec![("tmin", "10".into())],
    )?;
    let q_grid = parse_q_grid(cfg.require("q")?)?;
    let n_list = parse_usize_list(cfg.require("N")?)?;
    let tmin: usize = cfg.parse("tmin")?;
    let workers: Option<usize> = match cfg.get("workers") {
        Some(_) => Some(cfg.parse("workers")?),
        None => None,
    };
    let rows = with_pool(workers, || beta_sweep(&q_grid, &n_list, tmin))?;
    let json = json_format(&cfg);
    Ok(emit(&cfg, |out| {
        if json {
            report::write_json(out, &rows)
        } else {
            report::write_beta_sweep_csv(out, &rows)
        }
    }))
}

fn run_check(args: CheckArgs) -> Result<ExitCode, Error> {
    let cfg = resolve(
        "check",
        &args.common,
        vec![
            ("suite", args.suite.clone()),
            ("dist", args.dist.clone()),
            ("tmax", args.tmax.map(|v| v.to_string())),
            ("walkers", args.walkers.map(|v| v.to_string())),
            ("seed", args.seed.map(|v| v.to_string())),
            ("checkpoints", args.checkpoints.clone()),
            ("alpha", args.alpha.map(|v| v.to_string())),
            ("workers", args.workers.map(|v| v.to_string())),
        ],
        vec![("walkers", "100000".into()), ("seed", "42".into())],
    )?;
    let dist = parse_spec(cfg.require("dist")?)?;
    let walkers: usize = cfg.parse("walkers")?;
    let seed: u64 = cfg.parse("seed")?;
    let workers: Option<usize> = match cfg.get("workers") {
        Some(_) => Some(cfg.parse("workers")?),
        None => None,
    };
    let suite = cfg.require("suite")?.to_string();
    let mut failures = 0usize;
    let mut property = |name: &str, ok: bool, detail: String| {
        println!("{} {name} ({detail})", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };
    let code = match suite.as_str() {
        "clt" => {
            let checkpoints = match cfg.get("checkpoints") {
                Some(list) => parse_usize_list(list)?,
                None => vec![256, 512, 1024, 2048, 4096, 8192, 16384],
            };
            let alpha: Option<f64> = match cfg.get("alpha") {
                Some(_) => Some(cfg.parse("alpha")?),
                None => None,
            };
            let report = with_pool(workers, || {
                clt_check(&dist, &checkpoints, walkers, seed, alpha)
            })?;
            property(
                "normal-distance-shrinks",
                report.sup_distance.last() < report.sup_distance.first(),
                format!(
                    "first={:.4e} last={:.4e} rate_fit={:.3}",
                    report.sup_distance.first().unwrap(),
                    report.sup_distance.last().unwrap(),
                    report.rate_fit
                ),
            );
            property(
                "distances-in-unit-interval",
                report
                    .sup_distance
                    .iter()
                    .all(|&v| (0.0..=1.0).contains(&v)),
                format!("n={}", report.sup_distance.len()),
            );
            emit(&cfg, |out| {
                if json_format(&cfg) {
                    report::write_json(out, &report)
                } else {
                    report::write_clt_csv(out, &report)
                }
            })
        }
        "concentration" => {
            let alpha: f64 = cfg.parse("alpha")?;
            let checkpoints = match cfg.get("checkpoints") {
                Some(list) => parse_usize_list(list)?,
                None => vec![1024, 4096, 16384],
            };
            let report = with_pool(workers, || {
                concentration_check(&dist, alpha, &checkpoints, walkers, seed)
            })?;
            for (i, &t) in report.checkpoints.iter().enumerate() {
                match report.violation_freq[i] {
                    Some(freq) => property(
                        "concentration-bound",
                        freq <= 20.0 * report.h[i],
                        format!("t={t} freq={freq:.4e} 20h={:.4e}", 20.0 * report.h[i]),
                    ),
                    None => println!("SKIP concentration-bound (t={t}: h >= 1)"),
                }
            }
            emit(&cfg, |out| {
                if json_format(&cfg) {
                    report::write_json(out, &report)
                } else {
                    report::write_concentration_csv(out, &report)
                }
            })
        }
        "heavy-tail" => {
            let alpha: f64 = cfg.parse("alpha")?;
            let checkpoints = match cfg.get("checkpoints") {
                Some(list) => parse_usize_list(list)?,
                None => vec![1024, 4096, 16384],
            };
            let report = with_pool(workers, || {
                heavy_tail_scaling_check(&dist, alpha, &checkpoints, walkers, seed)
            })?;
            if report.pairwise_sup.len() >= 2 {
                property(
                    "scaled-law-cauchy-convergence",
                    report.pairwise_sup.last() < report.pairwise_sup.first(),
                    format!("sups={:?}", report.pairwise_sup),
                );
            }
            let sym_bar = 3.0 / (walkers as f64).sqrt() + 0.01;
            let worst_sym = report
                .symmetry_defect
                .iter()
                .cloned()
                .fold(0.0f64, f64::max);
            property(
                "symmetry-defect-small",
                worst_sym <= sym_bar,
                format!("max={worst_sym:.4e} bar={sym_bar:.4e}"),
            );
            emit(&cfg, |out| {
                if json_format(&cfg) {
                    report::write_json(out, &report)
                } else {
                    report::write_heavy_tail_csv(out, &report)
                }
            })
        }
        "invariants" => {
            let tmax: usize = match cfg.get("tmax") {
                Some(_) => cfg.parse("tmax")?,
                None => 65536,
            };
            let series = msd_series_with_limit(&dist, tmax, max_horizon())?;
            let monotone = (1..=tmax).all(|t| series.sigma2[t] + 1e-12 >= series.sigma2[t - 1]);
            property("msd-monotone", monotone, format!("tmax={tmax}"));
            let capped = (0..=tmax).all(|t| series.sigma2[t] <= t as f64 + 1e-12);
            property("msd-at-most-t", capped, "sigma2 <= t".into());
            property(
                "msd-still-growing",
                series.sigma2[tmax] > series.sigma2[tmax / 2],
                format!(
                    "sigma2(N)={:.4} sigma2(N/2)={:.4}",
                    series.sigma2[tmax],
                    series.sigma2[tmax / 2]
                ),
            );
            let mut tail_ok = true;
            let mut worst = f64::INFINITY;
            for t in 1..=tmax {
                let tail = dist.tail(t as u64 + 1);
                if tail > 0.0 {
                    let margin = 1.0 / tail - series.sigma2[t];
                    if margin < worst {
                        worst = margin;
                    }
                    if series.sigma2[t] > 1.0 / tail + 1e-9 {
                        tail_ok = false;
                    }
                }
            }
            property(
                "msd-below-inverse-tail",
                tail_ok,
                format!("min margin={worst:.4e}"),
            );
            let q = renewal_mass(&dist, tmax.min(4096));
            property(
                "renewal-mass-in-unit-band",
                q.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)),
                format!("len={}", q.len()),
            );
            let sampler = Sampler::new(&dist);
            let mut traj_ok = true;
            for w in 0..512u64 {
                let mut rng = trapwalk::walker_rng(seed, w);
                let tr = simulate_walker_with(&sampler, 256, &mut rng);
                for s in 0..256 {
                    let dx = tr.positions[s + 1] - tr.positions[s];
                    let ok = if tr.traps[s] > 0 {
                        dx == 0 && tr.traps[s + 1] == tr.traps[s] - 1
                    } else {
                        dx.abs() == 1
                    };
                    if !ok {
                        traj_ok = false;
                    }
                }
            }
            property(
                "trajectory-invariants",
                traj_ok,
                "512 paths x 256 steps".into(),
            );
            ExitCode::SUCCESS
        }
        other => {
            return Err(config_error(format!(
                "unknown suite `{other}` (expected clt|concentration|heavy-tail|invariants)"
            )))
        }
    };
    if failures > 0 {
        eprintln!(
            "trapwalk: {failures} propert{} failed",
            if failures == 1 { "y" } else { "ies" }
        );
        return Ok(ExitCode::from(4));
    }
    Ok(code)
}
