//! Argument handling and subcommands of the `openasep` binary.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error, 3 a verify
//! suite with at least one FAIL.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use openasep::asep_exact::{
    phase_of, region_of, stationary_solve, theorem_rhs, Backend, BinaryMeasure, BoundaryParams, OpenAsepRates,
    ParamsDoc, Phase, Region, SolveOptions, Which,
};
use openasep::asep_mc::{default_burn_in, simulate_replicas, Statistic, WhichEnd};
use openasep::aw_measure::Tolerances;
use openasep::limits::{
    bernoulli_product, convergence_scan_with, eta_measure_with, lambda_epsilon, lambda_measure_with, rate_budget,
    theta_from_support, LimitOptions, NodeGrid, ScanOptions, ScanTarget, Side,
};
use openasep::asep_exact::characterization_epsilon;
use openasep::verify::{format_table, run_suite, CheckConfig, Selection, Status};
use openasep::{DoubleDouble, Precision, Real};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY_FAIL: i32 = 3;

const SUBCOMMANDS: &[&str] = &["phase", "stationary", "gf", "limit", "scan", "mc", "verify"];

#[derive(Parser, Debug)]
#[command(name = "openasep", version, about = "Stationary measures of open ASEP and their boundary limits")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Phase, region, θ and the budget rate s.
    Phase {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        common: Common,
    },
    /// Exact stationary measure.
    Stationary {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        /// Iterative refinement in double-double.
        #[arg(long)]
        extended: bool,
        /// Report only the marginal on the first or last m sites.
        #[arg(long, value_enum, requires = "m")]
        marginal: Option<End>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Generating function of the last m sites, optionally with the integral side.
    Gf {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        /// Ordered times, comma separated; m is their count.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        t: Vec<f64>,
        #[arg(long)]
        rhs: bool,
        #[arg(long, value_enum, default_value = "projection")]
        backend: BackendArg,
    },
    /// λ_m, η_m or a Bernoulli product.
    Limit {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: LimitKind,
        #[arg(long)]
        m: usize,
        /// Density for `ber`; defaults to the bulk density of the phase.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, value_enum, default_value = "projection")]
        backend: BackendArg,
    },
    /// Distance of μ_n marginals to their limit over a list of n.
    Scan {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        n_list: Vec<usize>,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "first")]
        target: End,
        #[arg(long, value_enum, default_value = "projection")]
        backend: BackendArg,
    },
    /// Gillespie estimates of occupations or boundary words.
    Mc {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        /// Sites whose occupation is estimated, comma separated.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        site: Vec<usize>,
        /// Estimate every word of the first m sites.
        #[arg(long)]
        first_words: Option<usize>,
        /// Estimate every word of the last m sites.
        #[arg(long)]
        last_words: Option<usize>,
        #[arg(long, default_value_t = 10_000.0)]
        time: f64,
        /// Defaults to 20 n over the smallest positive boundary rate.
        #[arg(long)]
        burn_in: Option<f64>,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
    },
    /// Verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// `ALL` or a comma-separated list of check names.
        #[arg(long, default_value = "ALL")]
        suite: String,
    },
}

#[derive(Args, Debug)]
struct Point {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long = "C")]
    c: Option<f64>,
    #[arg(long = "D")]
    d: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    q: f64,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat key=value file; its entries act as flags given before the command line ones.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// 53 selects f64, up to 106 double-double.
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Adaptive quadrature tolerance.
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Worker threads for parallel sections.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum End {
    First,
    Last,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Nested,
    Projection,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Nested => Backend::Nested,
            BackendArg::Projection => Backend::Projection,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LimitKind {
    Lambda,
    Eta,
    Ber,
}

enum Failure {
    Usage(String),
    Compute(String),
    VerifyFailed,
}

impl From<openasep::Error> for Failure {
    fn from(e: openasep::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(format!("i/o: {e}"))
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: String) -> Failure {
    Failure::Usage(Cli::command().error(ErrorKind::ArgumentConflict, msg).render().to_string())
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// status. Documents go to `out` unless `--output` is given.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let outcome = expand_config(argv).and_then(|argv| match Cli::try_parse_from(argv) {
        Ok(cli) => dispatch(cli, out),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            write!(out, "{}", e.render()).map_err(Failure::from)
        }
        Err(e) => Err(Failure::Usage(e.render().to_string())),
    });
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = write!(err, "{msg}");
            EXIT_USAGE
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_COMPUTE
        }
        Err(Failure::VerifyFailed) => EXIT_VERIFY_FAIL,
    }
}

/// Inserts the entries of a `--config` file right after the subcommand
/// name. Keys also given on the command line are dropped.
fn expand_config(argv: Vec<OsString>) -> Outcome<Vec<OsString>> {
    let strs: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = Some(strs.get(i + 1).cloned().ok_or_else(|| usage("--config needs a path".into()))?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let Some(at) = strs.iter().skip(1).position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("cannot read config {path}: {e}")))?;
    let given: Vec<&str> = strs
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split_once('=').map_or(a, |x| x.0))
        .collect();
    let mut extra = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{path}:{}: expected key=value, got {line:?}", no + 1)))?;
        let (k, v) = (k.trim().trim_start_matches("--"), v.trim());
        if k == "config" {
            return Err(usage(format!("{path}:{}: config files do not nest", no + 1)));
        }
        if given.contains(&k) {
            continue;
        }
        match v {
            "true" => extra.push(format!("--{k}")),
            "false" => {}
            _ => {
                extra.push(format!("--{k}"));
                extra.push(v.to_string());
            }
        }
    }
    let mut out = argv;
    let pos = at + 2;
    for (i, e) in extra.into_iter().enumerate() {
        out.insert(pos + i, e.into());
    }
    Ok(out)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Outcome<()> {
    let jobs = match &cli.cmd {
        Cmd::Phase { common, .. }
        | Cmd::Stationary { common, .. }
        | Cmd::Gf { common, .. }
        | Cmd::Limit { common, .. }
        | Cmd::Scan { common, .. }
        | Cmd::Mc { common, .. }
        | Cmd::Verify { common, .. } => common.jobs,
    };
    // documents are buffered so the worker pool never holds `out`
    let mut buf = Vec::new();
    let res = match jobs {
        Some(0) => Err(usage("--jobs must be at least 1".into())),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Failure::Compute(e.to_string()))?;
            pool.install(|| execute(cli.cmd, &mut buf))
        }
        None => execute(cli.cmd, &mut buf),
    };
    out.write_all(&buf)?;
    res
}

fn execute(cmd: Cmd, out: &mut dyn Write) -> Outcome<()> {
    match cmd {
        Cmd::Phase { point, common } => phase(&point.resolve()?, &common, out),
        Cmd::Stationary { point, common, n, extended, marginal, m } => {
            stationary(&point.resolve()?, &common, n, extended, marginal.zip(m), out)
        }
        Cmd::Gf { point, common, n, t, rhs, backend } => gf(&point.resolve()?, &common, n, &t, rhs, backend, out),
        Cmd::Limit { point, common, kind, m, rho, backend } => {
            limit(&point.resolve()?, &common, kind, m, rho, backend, out)
        }
        Cmd::Scan { point, common, n_list, m, target, backend } => {
            scan(&point.resolve()?, &common, &n_list, m, target, backend, out)
        }
        Cmd::Mc { point, common, n, site, first_words, last_words, time, burn_in, replicas } => {
            let mut stats: Vec<Statistic> = site.iter().map(|&i| Statistic::Occupation(i)).collect();
            for (which, m) in [(WhichEnd::First, first_words), (WhichEnd::Last, last_words)] {
                if let Some(m) = m {
                    if m == 0 || m > 16 {
                        return Err(usage(format!("word length {m} must be in 1..=16")));
                    }
                    stats.extend((0..1usize << m).map(|word| Statistic::Word { which, m, word }));
                }
            }
            if stats.is_empty() {
                return Err(usage("mc needs --site, --first-words or --last-words".into()));
            }
            if replicas == 0 {
                return Err(usage("--replicas must be at least 1".into()));
            }
            mc(&point.resolve()?, &common, n, &stats, time, burn_in, replicas, out)
        }
        Cmd::Verify { common, suite } => verify(&common, &suite, out),
    }
}

impl Point {
    fn resolve(&self) -> Outcome<ParamsDoc> {
        let rates = [self.alpha, self.beta, self.gamma, self.delta];
        let bound = [self.a, self.b, self.c, self.d];
        let any = |v: &[Option<f64>]| v.iter().any(Option::is_some);
        let doc = match (any(&rates), any(&bound)) {
            (true, true) => {
                return Err(usage("give either --alpha/--beta/--gamma/--delta or --A/--B/--C/--D, not both".into()))
            }
            (false, false) => return Err(usage("missing parameter point: give --alpha --beta or --A --C".into())),
            (true, false) => {
                let (Some(alpha), Some(beta)) = (self.alpha, self.beta) else {
                    return Err(usage("rates need both --alpha and --beta".into()));
                };
                ParamsDoc::from(OpenAsepRates::new(
                    alpha,
                    beta,
                    self.gamma.unwrap_or(0.0),
                    self.delta.unwrap_or(0.0),
                    self.q,
                )?)
            }
            (false, true) => {
                let (Some(a), Some(c)) = (self.a, self.c) else {
                    return Err(usage("boundary parameters need both --A and --C".into()));
                };
                ParamsDoc::from(BoundaryParams::new(a, self.b.unwrap_or(0.0), c, self.d.unwrap_or(0.0), self.q)?)
            }
        };
        Ok(doc)
    }
}

impl Common {
    fn precision(&self) -> Outcome<Precision> {
        match self.precision_bits {
            Some(b) => Precision::from_bits(b).map_err(|e| usage(format!("--precision-bits: {e}"))),
            None => Ok(Precision::from_env()),
        }
    }

    fn tolerances(&self) -> Outcome<Tolerances> {
        let mut tol = Tolerances::default();
        if let Some(t) = self.quad_tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(usage(format!("--quad-tol {t} must lie in (0, 1)")));
            }
            tol.quadrature = t;
        }
        Ok(tol)
    }

    fn limit_options(&self, backend: BackendArg) -> Outcome<LimitOptions> {
        Ok(LimitOptions {
            backend: backend.into(),
            precision: self.precision()?,
            tol: self.tolerances()?,
            ..LimitOptions::default()
        })
    }

    fn format(&self, default: Format, allowed: &[Format]) -> Outcome<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(usage(format!("--format {f:?} is not available for this command").to_lowercase()))
        }
    }

    /// Writes to `--output` when given, else to `out`.
    fn emit(&self, text: &str, out: &mut dyn Write) -> Outcome<()> {
        match &self.output {
            Some(p) => std::fs::write(p, text)?,
            None => out.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("document serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct PhaseDoc {
    params: ParamsDoc,
    phase: Phase,
    region: Region,
    theta: Option<f64>,
    budget_s: Option<f64>,
}

fn phase(p: &ParamsDoc, common: &Common, out: &mut dyn Write) -> Outcome<()> {
    let b = &p.boundary;
    let ph = phase_of(b.a, b.c);
    let theta = match ph {
        Phase::LowDensity | Phase::HighDensity => Some(theta_from_support(b)?),
        _ => None,
    };
    let doc = PhaseDoc { params: *p, phase: ph, region: region_of(b.a, b.c), theta, budget_s: theta.map(rate_budget) };
    let text = match common.format(Format::Json, &[Format::Json, Format::Csv])? {
        Format::Json => to_json(&doc),
        _ => {
            let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.17e}"));
            format!("phase,region,theta,budget_s\n{},{},{},{}\n", ph, doc.region, opt(theta), opt(doc.budget_s))
        }
    };
    common.emit(&text, out)
}

#[derive(Serialize)]
struct StationaryDoc<'a> {
    params: ParamsDoc,
    n: usize,
    marginal: Option<&'static str>,
    residual: f64,
    sigma_min: f64,
    measure: &'a BinaryMeasure,
}

fn stationary(
    p: &ParamsDoc,
    common: &Common,
    n: usize,
    extended: bool,
    marginal: Option<(End, usize)>,
    out: &mut dyn Write,
) -> Outcome<()> {
    let format = common.format(Format::Json, &[Format::Json, Format::Csv])?;
    let sol = stationary_solve(n, &p.rates, &SolveOptions { extended, ..SolveOptions::default() })?;
    let (measure, label) = match marginal {
        Some((End::First, m)) => (sol.measure.marginal(Which::First, m)?, Some("first")),
        Some((End::Last, m)) => (sol.measure.marginal(Which::Last, m)?, Some("last")),
        None => (sol.measure.clone(), None),
    };
    let text = match format {
        Format::Json => to_json(&StationaryDoc {
            params: *p,
            n,
            marginal: label,
            residual: sol.residual,
            sigma_min: sol.sigma_min,
            measure: &measure,
        }),
        _ => measure.to_csv(),
    };
    common.emit(&text, out)
}

#[derive(Serialize)]
struct GfDoc<'a> {
    params: ParamsDoc,
    n: usize,
    m: usize,
    t: &'a [f64],
    exact: f64,
    rhs: Option<f64>,
    backend: Option<Backend>,
    rel_diff: Option<f64>,
}

fn gf(
    p: &ParamsDoc,
    common: &Common,
    n: usize,
    t: &[f64],
    with_rhs: bool,
    backend: BackendArg,
    out: &mut dyn Write,
) -> Outcome<()> {
    let format = common.format(Format::Json, &[Format::Json, Format::Csv])?;
    let m = t.len();
    if m > n {
        return Err(usage(format!("{m} times for n={n}")));
    }
    let mu = stationary_solve(n, &p.rates, &SolveOptions::default())?.measure;
    let exact = mu.marginal(Which::Last, m)?.generating_function(t)?;
    let rhs = if with_rhs {
        let tol = common.tolerances()?;
        let backend = Backend::from(backend);
        Some(match common.precision()? {
            Precision::Double => theorem_rhs::<f64>(&p.boundary, n, t, backend, &tol)?,
            Precision::DoubleDouble => {
                let tt: Vec<DoubleDouble> = t.iter().map(|&x| DoubleDouble::from_f64(x)).collect();
                theorem_rhs(&p.boundary, n, &tt, backend, &tol)?.to_f64()
            }
        })
    } else {
        None
    };
    let doc = GfDoc {
        params: *p,
        n,
        m,
        t,
        exact,
        rhs,
        backend: with_rhs.then(|| backend.into()),
        rel_diff: rhs.map(|r| (r - exact).abs() / exact.abs()),
    };
    let text = match format {
        Format::Json => to_json(&doc),
        _ => {
            let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.17e}"));
            format!("n,m,exact,rhs,rel_diff\n{n},{m},{exact:.17e},{},{}\n", opt(rhs), opt(doc.rel_diff))
        }
    };
    common.emit(&text, out)
}

#[derive(Serialize)]
struct LimitDoc<'a> {
    params: ParamsDoc,
    kind: &'static str,
    m: usize,
    rho: Option<f64>,
    epsilon: Option<f64>,
    measure: &'a BinaryMeasure,
}

fn limit(
    p: &ParamsDoc,
    common: &Common,
    kind: LimitKind,
    m: usize,
    rho: Option<f64>,
    backend: BackendArg,
    out: &mut dyn Write,
) -> Outcome<()> {
    let format = common.format(Format::Json, &[Format::Json, Format::Csv])?;
    if m == 0 || m > 16 {
        return Err(usage(format!("--m {m} must be in 1..=16")));
    }
    let b = &p.boundary;
    let opts = common.limit_options(backend)?;
    let (measure, name, rho, eps) = match kind {
        LimitKind::Lambda => (lambda_measure_with(b, m, &opts)?, "lambda", None, Some(lambda_epsilon(b))),
        LimitKind::Eta => (eta_measure_with(b, m, &opts)?, "eta", None, Some(characterization_epsilon(b))),
        LimitKind::Ber => {
            let r = match rho {
                Some(r) if (0.0..=1.0).contains(&r) => r,
                Some(r) => return Err(usage(format!("--rho {r} must lie in [0, 1]"))),
                None => match phase_of(b.a, b.c) {
                    Phase::LowDensity => 1.0 / (1.0 + b.c),
                    Phase::HighDensity => b.a / (1.0 + b.a),
                    Phase::MaximalCurrent => 0.5,
                    Phase::Boundary => {
                        return Err(Failure::Compute("no bulk density on a phase boundary; give --rho".into()))
                    }
                },
            };
            (bernoulli_product(m, r), "ber", Some(r), None)
        }
    };
    let text = match format {
        Format::Json => to_json(&LimitDoc { params: *p, kind: name, m, rho, epsilon: eps, measure: &measure }),
        _ => measure.to_csv(),
    };
    common.emit(&text, out)
}

#[derive(Serialize)]
struct ScanSidecar<'a> {
    params: ParamsDoc,
    limit_name: &'a str,
    theta: f64,
    epsilon: Option<f64>,
    fitted_h: f64,
    grid_nodes: Option<Vec<(f64, f64)>>,
    limit: &'a BinaryMeasure,
}

fn scan(
    p: &ParamsDoc,
    common: &Common,
    n_list: &[usize],
    m: usize,
    target: End,
    backend: BackendArg,
    out: &mut dyn Write,
) -> Outcome<()> {
    let format = common.format(Format::Csv, &[Format::Json, Format::Csv])?;
    if m == 0 {
        return Err(usage("--m must be at least 1".into()));
    }
    let opts = ScanOptions {
        target: match target {
            End::First => ScanTarget::First,
            End::Last => ScanTarget::Last,
        },
        solve: SolveOptions::default(),
        limit: common.limit_options(backend)?,
    };
    let report = convergence_scan_with(&p.boundary, n_list, m, &opts)?;
    let side = match target {
        End::First => Side::AtOrBelowOne,
        End::Last => Side::AtOrAboveOne,
    };
    let grid_nodes = report.epsilon.map(|e| NodeGrid::new(m, e, side)).transpose()?.map(|g| g.nodes);
    let sidecar = ScanSidecar {
        params: *p,
        limit_name: &report.limit_name,
        theta: report.theta,
        epsilon: report.epsilon,
        fitted_h: report.fitted_h,
        grid_nodes,
        limit: &report.limit,
    };
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Full<'a> {
                #[serde(flatten)]
                meta: ScanSidecar<'a>,
                rows: &'a [openasep::limits::ConvergenceRow],
            }
            common.emit(&to_json(&Full { meta: sidecar, rows: &report.rows }), out)
        }
        _ => {
            common.emit(&report.to_csv(), out)?;
            if let Some(path) = &common.output {
                std::fs::write(sidecar_path(path), to_json(&sidecar))?;
            }
            Ok(())
        }
    }
}

/// `<output>.json` next to a CSV output.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

#[allow(clippy::too_many_arguments)]
fn mc(
    p: &ParamsDoc,
    common: &Common,
    n: usize,
    stats: &[Statistic],
    time: f64,
    burn_in: Option<f64>,
    replicas: usize,
    out: &mut dyn Write,
) -> Outcome<()> {
    let format = common.format(Format::Json, &[Format::Json, Format::Csv])?;
    let burn = burn_in.unwrap_or_else(|| default_burn_in(n, &p.rates));
    let runs = simulate_replicas(n, &p.rates, stats, time, burn, common.seed, replicas)?;
    let mut text = String::new();
    if format == Format::Csv {
        text.push_str("label,mean,stderr,samples,seed\n");
    }
    for est in runs.iter().flatten() {
        match format {
            Format::Json => {
                text.push_str(&est.json_line());
                text.push('\n');
            }
            _ => text.push_str(&format!(
                "{},{:.17e},{:.17e},{},{}\n",
                est.label, est.mean, est.stderr, est.samples, est.seed
            )),
        }
    }
    common.emit(&text, out)
}

fn verify(common: &Common, suite: &str, out: &mut dyn Write) -> Outcome<()> {
    let format = common.format(Format::Table, &[Format::Json, Format::Csv, Format::Table])?;
    let selection = Selection::parse(suite);
    if selection == Selection::Names(Vec::new()) {
        return Err(usage("--suite is empty".into()));
    }
    let mut cfg = CheckConfig { seed: common.seed, tol: common.tolerances()?, ..CheckConfig::default() };
    cfg.limit.precision = common.precision()?;
    cfg.limit.tol = cfg.tol;
    let reports = match run_suite(&selection, &cfg) {
        Err(openasep::Error::UnknownCheck(name)) => {
            return Err(usage(format!(
                "unknown check {name:?}; known: {}",
                openasep::verify::CHECKS.join(", ")
            )))
        }
        other => other?,
    };
    let text = match format {
        Format::Json => reports.iter().map(|r| r.json_line() + "\n").collect(),
        Format::Csv => {
            let mut s = String::from("name,point,residual,threshold,status\n");
            for r in &reports {
                s.push_str(&format!(
                    "{},\"{}\",{:.6e},{:.1e},{}\n",
                    r.name, r.point.label, r.residual, r.threshold, r.status
                ));
            }
            s
        }
        Format::Table => format_table(&reports),
    };
    common.emit(&text, out)?;
    if reports.iter().any(|r| r.status == Status::Fail) {
        Err(Failure::VerifyFailed)
    } else {
        Ok(())
    }
}
