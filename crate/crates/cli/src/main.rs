//! `jetgh`: scenario runner and data emitter for lifted-cloud distance
//! experiments.
//!
//! Subcommands build manifold families from compact spec strings such as
//! `circle{r=1}` or `wavy{r1=1,r2=1.1,eps=0.05}`, sample their jet-lifted
//! unit bundles, and emit CSV tables or JSON reports. All sampling is
//! seeded, and outputs are byte-identical across runs with the same
//! configuration and seed (the `runtime_ms` column of the `equivalence`
//! table is the sole, documented exception).
//!
//! Exit codes: 0 success, 2 configuration error, 3 construction error,
//! 4 numeric failure, 5 I/O error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use jetgh_core::{
    directed_hausdorff, equivalence_experiment, estimate_dgh, f_function, hausdorff,
    lifted_headers, parse_family, AlignConfig, EquivalenceCfg, Family, FamilyFactory, GeomError,
    SampleCounts, DEFAULT_FIBER_CAP,
};

const EXIT_CONFIG: i32 = 2;
const EXIT_CONSTRUCTION: i32 = 3;
const EXIT_NUMERIC: i32 = 4;
const EXIT_IO: i32 = 5;

struct Failure {
    code: i32,
    message: String,
}

type CliResult<T> = Result<T, Failure>;

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        let code = match &e {
            GeomError::DimensionMismatch { .. }
            | GeomError::NonPositive { .. }
            | GeomError::JetOrderUnsupported { .. }
            | GeomError::EmptyCloud { .. }
            | GeomError::CloudMismatch { .. }
            | GeomError::InvalidConfig(_)
            | GeomError::FamilySpec(_) => EXIT_CONFIG,
            GeomError::DomainViolation { .. }
            | GeomError::BoundaryMargin { .. }
            | GeomError::WavyConstruction { .. }
            | GeomError::CurveConstruction { .. } => EXIT_CONSTRUCTION,
            GeomError::SingularMatrix { .. }
            | GeomError::NotOnHyperboloid { .. }
            | GeomError::NumericFailure(_) => EXIT_NUMERIC,
            GeomError::Io(_) => EXIT_IO,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "jetgh",
    version,
    about = "Distance experiments on jet-lifted point clouds of Riemannian manifolds"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hausdorff distance between two lifted clouds at identity placement
    Hausdorff(HausdorffArgs),
    /// Estimate the lifted distance, minimizing over rigid motions
    Dgh(DghArgs),
    /// Sample a lifted cloud and dump it as CSV
    Lift(LiftArgs),
    /// Tabulate the hyperbolic two-circle distance F(r1, r2, r~)
    Ftable(FtableArgs),
    /// Sweep the wavy-circle amplitude ε: flat images converge, lifted
    /// clouds stay separated
    WavySweep(WavySweepArgs),
    /// Joint convergence experiment: lifted distance and tensor C^k norm
    /// of circle sequences against the unit circle
    Equivalence(EquivalenceArgs),
}

/// Sampling options shared by cloud-building subcommands. Unset counts
/// fall back to the family's recommended resolution for the order.
#[derive(Args, Clone, Default)]
struct SampleOpts {
    /// Jet order of the lift (0 = bare images)
    #[arg(long)]
    order: Option<usize>,
    /// RNG seed (required; all sampling is deterministic given the seed)
    #[arg(long)]
    seed: Option<u64>,
    /// Base-grid points per chart axis, comma separated (e.g. 96 or 24,32)
    #[arg(long)]
    base: Option<String>,
    /// Points per intermediate fiber level, comma separated
    #[arg(long)]
    intermediate: Option<String>,
    /// Directions in the top fiber
    #[arg(long)]
    top: Option<usize>,
    /// Radius cap for intermediate fiber vectors
    #[arg(long)]
    fiber_cap: Option<f64>,
}

#[derive(Args)]
struct HausdorffArgs {
    /// First family spec, e.g. circle{r=1}
    family_a: Option<String>,
    /// Second family spec
    family_b: Option<String>,
    #[command(flatten)]
    sample: SampleOpts,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value configuration file; command-line flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct DghArgs {
    /// First family spec (held fixed)
    family_a: Option<String>,
    /// Second family spec (moved by rigid motions)
    family_b: Option<String>,
    #[command(flatten)]
    sample: SampleOpts,
    /// Optimizer restarts (restart 0 starts at the identity)
    #[arg(long)]
    restarts: Option<usize>,
    /// Iteration cap per restart
    #[arg(long)]
    max_iters: Option<usize>,
    /// Simplex-diameter convergence tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Also search orientation-reversing motions
    #[arg(long)]
    allow_reflection: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct LiftArgs {
    /// Family spec to sample
    family: Option<String>,
    #[command(flatten)]
    sample: SampleOpts,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FtableArgs {
    /// Inner radius
    #[arg(long)]
    r1: Option<f64>,
    /// Outer radius
    #[arg(long)]
    r2: Option<f64>,
    /// Curvature radius r~, a single value or a range lo..hi
    #[arg(long)]
    rt: Option<String>,
    /// Number of sweep rows (endpoints inclusive)
    #[arg(long)]
    steps: Option<usize>,
    /// Space the sweep geometrically instead of linearly
    #[arg(long)]
    log: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct WavySweepArgs {
    /// Round radius (the wavy curve winds inside the annulus r1..r2)
    #[arg(long)]
    r1: Option<f64>,
    /// Length radius: every wavy curve has the length of circle{r2}
    #[arg(long)]
    r2: Option<f64>,
    /// Amplitude bounds ε to sweep, comma separated
    #[arg(long)]
    eps: Option<String>,
    #[command(flatten)]
    sample: SampleOpts,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EquivalenceArgs {
    /// Explicit radius sequence, comma separated
    #[arg(long)]
    radii: Option<String>,
    /// Shorthand for the sequence r_i = 1 + 1/i, i = 1..n
    #[arg(long)]
    harmonic: Option<usize>,
    #[command(flatten)]
    sample: SampleOpts,
    #[arg(long)]
    restarts: Option<usize>,
    /// Grid resolution of the C^k sup
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    fd_step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(f) = run(cli) {
        eprintln!("error: {}", f.message);
        std::process::exit(f.code);
    }
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match cli.cmd {
        Cmd::Hausdorff(args) => cmd_hausdorff(args),
        Cmd::Dgh(args) => cmd_dgh(args),
        Cmd::Lift(args) => cmd_lift(args),
        Cmd::Ftable(args) => cmd_ftable(args),
        Cmd::WavySweep(args) => cmd_wavy_sweep(args),
        Cmd::Equivalence(args) => cmd_equivalence(args),
    }
}

/// Honor the JETGH_THREADS override before any parallel work starts.
fn init_threads() -> CliResult<()> {
    match std::env::var("JETGH_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .map_err(|_| Failure::config(format!("JETGH_THREADS must be a positive integer, got `{raw}`")))?;
            if n == 0 {
                return Err(Failure::config("JETGH_THREADS must be a positive integer, got `0`"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::config(format!("thread pool: {e}")))
        }
    }
}

// ---------------------------------------------------------------------
// flat key=value configuration files

struct ConfigFile {
    path: String,
    values: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    fn empty() -> Self {
        ConfigFile {
            path: String::new(),
            values: BTreeMap::new(),
        }
    }

    fn load(path: &PathBuf) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("config file {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Failure::config(format!(
                    "{}:{}: expected key=value, got `{line}`",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if values.insert(key.clone(), (lineno + 1, value)).is_some() {
                return Err(Failure::config(format!(
                    "{}:{}: duplicate key `{key}`",
                    path.display(),
                    lineno + 1
                )));
            }
        }
        Ok(ConfigFile {
            path: path.display().to_string(),
            values,
        })
    }

    /// Fill a missing flag from the file, parsing with the flag's type.
    fn fill<T: FromStr>(&mut self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            self.values.remove(key);
            return Ok(flag);
        }
        match self.values.remove(key) {
            None => Ok(None),
            Some((line, raw)) => raw.parse::<T>().map(Some).map_err(|_| {
                Failure::config(format!(
                    "{}:{line}: field `{key}`: cannot parse `{raw}`",
                    self.path
                ))
            }),
        }
    }

    /// Bool flags: present-on-cli wins; the file may say true/false.
    fn fill_bool(&mut self, flag: bool, key: &str) -> CliResult<bool> {
        if flag {
            self.values.remove(key);
            return Ok(true);
        }
        Ok(self.fill::<bool>(None, key)?.unwrap_or(false))
    }

    /// Reject unrecognized keys so typos surface with their line number.
    fn finish(self) -> CliResult<()> {
        if let Some((key, (line, _))) = self.values.into_iter().next() {
            return Err(Failure::config(format!(
                "{}:{line}: unknown key `{key}`",
                self.path
            )));
        }
        Ok(())
    }
}

fn load_optional_config(path: &Option<PathBuf>) -> CliResult<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::empty()),
    }
}

fn require<T>(value: Option<T>, key: &str) -> CliResult<T> {
    value.ok_or_else(|| Failure::config(format!("missing required field `{key}`")))
}

fn parse_usize_list(raw: &str, key: &str) -> CliResult<Vec<usize>> {
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Failure::config(format!("field `{key}`: cannot parse `{s}`")))
        })
        .collect()
}

fn parse_f64_list(raw: &str, key: &str) -> CliResult<Vec<f64>> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::config(format!("field `{key}`: cannot parse `{s}`")))
        })
        .collect()
}

// ---------------------------------------------------------------------
// resolved sampling configuration

#[derive(Clone)]
struct ResolvedSample {
    order: usize,
    seed: u64,
    base: Option<Vec<usize>>,
    intermediate: Option<Vec<usize>>,
    top: Option<usize>,
    fiber_cap: f64,
}

impl SampleOpts {
    fn resolve(self, cfg: &mut ConfigFile, default_order: usize) -> CliResult<ResolvedSample> {
        let order = self.order;
        let order = cfg.fill(order, "order")?.unwrap_or(default_order);
        let seed = require(cfg.fill(self.seed, "seed")?, "seed")?;
        let base = match cfg.fill(self.base, "base")? {
            Some(raw) => Some(parse_usize_list(&raw, "base")?),
            None => None,
        };
        let intermediate = match cfg.fill(self.intermediate, "intermediate")? {
            Some(raw) => Some(parse_usize_list(&raw, "intermediate")?),
            None => None,
        };
        let top = cfg.fill(self.top, "top")?;
        let fiber_cap = cfg
            .fill(self.fiber_cap, "fiber-cap")?
            .unwrap_or(DEFAULT_FIBER_CAP);
        Ok(ResolvedSample {
            order,
            seed,
            base,
            intermediate,
            top,
            fiber_cap,
        })
    }
}

impl ResolvedSample {
    /// Counts for one family: its recommendation with explicit overrides.
    fn counts_for(&self, family: &Family) -> CliResult<SampleCounts> {
        let mut counts = family.recommended_counts(self.order)?;
        if let Some(base) = &self.base {
            counts.base = base.clone();
        }
        if let Some(intermediate) = &self.intermediate {
            counts.intermediate = intermediate.clone();
        }
        if let Some(top) = self.top {
            counts.top = top;
        }
        Ok(counts)
    }

    fn describe(&self, counts: &[&SampleCounts]) -> String {
        let mut s = String::new();
        let _ = write!(s, "order={} seed={}", self.order, self.seed);
        for (i, c) in counts.iter().enumerate() {
            let _ = write!(
                s,
                " counts{}={}/{}/{}",
                i,
                join_usizes(&c.base),
                join_usizes(&c.intermediate),
                c.top
            );
        }
        let _ = write!(s, " fiber-cap={}", self.fiber_cap);
        s
    }
}

fn join_usizes(v: &[usize]) -> String {
    if v.is_empty() {
        return "-".into();
    }
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_family_arg(raw: Option<String>, cfg: &mut ConfigFile, key: &str) -> CliResult<Family> {
    let raw = require(cfg.fill(raw, key)?, key)?;
    Ok(parse_family(&raw)?)
}

// ---------------------------------------------------------------------
// output plumbing

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> CliResult<()> {
    match out {
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::io(e.to_string())),
        Some(path) => fs::write(path, bytes)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display()))),
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Failure::io(format!("serializing report: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

// ---------------------------------------------------------------------
// subcommands

#[derive(Serialize)]
struct HausdorffReport {
    family_a: String,
    family_b: String,
    order: usize,
    points_a: usize,
    points_b: usize,
    directed_ab: f64,
    directed_ba: f64,
    hausdorff: f64,
}

fn cmd_hausdorff(args: HausdorffArgs) -> CliResult<()> {
    let mut cfg = load_optional_config(&args.config)?;
    let fam_a = parse_family_arg(args.family_a, &mut cfg, "family-a")?;
    let fam_b = parse_family_arg(args.family_b, &mut cfg, "family-b")?;
    let out = cfg.fill(args.out, "out")?;
    let sample = args.sample.resolve(&mut cfg, 0)?;
    cfg.finish()?;

    let counts_a = sample.counts_for(&fam_a)?;
    let counts_b = sample.counts_for(&fam_b)?;
    let a = fam_a.lifted_cloud(sample.order, &counts_a, sample.fiber_cap, sample.seed)?;
    let b = fam_b.lifted_cloud(sample.order, &counts_b, sample.fiber_cap, sample.seed)?;
    let directed_ab = directed_hausdorff(&a.cloud, &b.cloud)?;
    let directed_ba = directed_hausdorff(&b.cloud, &a.cloud)?;
    let report = HausdorffReport {
        family_a: fam_a.to_string(),
        family_b: fam_b.to_string(),
        order: sample.order,
        points_a: a.cloud.len(),
        points_b: b.cloud.len(),
        directed_ab,
        directed_ba,
        hausdorff: directed_ab.max(directed_ba),
    };
    write_output(&out, &to_json(&report)?)
}

#[derive(Serialize)]
struct TraceRow {
    restart: usize,
    reflected: bool,
    start_value: f64,
    value: f64,
    iterations: usize,
    evals: usize,
    converged: bool,
}

#[derive(Serialize)]
struct DghReport {
    family_a: String,
    family_b: String,
    order: usize,
    seed: u64,
    restarts: usize,
    fiber_cap: Option<f64>,
    points_a: usize,
    points_b: usize,
    value: f64,
    initial_value: f64,
    best_restart: usize,
    best_reflected: bool,
    best_params: Vec<f64>,
    trace: Vec<TraceRow>,
}

fn cmd_dgh(args: DghArgs) -> CliResult<()> {
    let mut cfg = load_optional_config(&args.config)?;
    let fam_a = parse_family_arg(args.family_a, &mut cfg, "family-a")?;
    let fam_b = parse_family_arg(args.family_b, &mut cfg, "family-b")?;
    let out = cfg.fill(args.out, "out")?;
    let restarts = cfg.fill(args.restarts, "restarts")?.unwrap_or(8);
    let max_iters = cfg.fill(args.max_iters, "max-iters")?.unwrap_or(500);
    let tol = cfg.fill(args.tol, "tol")?.unwrap_or(1e-6);
    let allow_reflection = cfg.fill_bool(args.allow_reflection, "allow-reflection")?;
    let sample = args.sample.resolve(&mut cfg, 2)?;
    cfg.finish()?;

    let counts_a = sample.counts_for(&fam_a)?;
    let counts_b = sample.counts_for(&fam_b)?;
    let factory_a = FamilyFactory::new(
        fam_a.clone(),
        sample.order,
        counts_a,
        sample.fiber_cap,
        sample.seed,
    )?;
    let factory_b = FamilyFactory::new(
        fam_b.clone(),
        sample.order,
        counts_b,
        sample.fiber_cap,
        sample.seed,
    )?;
    let align = AlignConfig {
        restarts,
        max_iters,
        tol_diameter: tol,
        seed: sample.seed,
        allow_reflection,
    };
    let est = estimate_dgh(&factory_a, &factory_b, &align)?;
    let report = DghReport {
        family_a: fam_a.to_string(),
        family_b: fam_b.to_string(),
        order: est.order,
        seed: sample.seed,
        restarts,
        fiber_cap: est.fiber_cap,
        points_a: est.sample_sizes[0],
        points_b: est.sample_sizes[1],
        value: est.value,
        initial_value: est.initial_value,
        best_restart: est.best_restart,
        best_reflected: est.best_reflected,
        best_params: est.best_params.clone(),
        trace: est
            .trace
            .iter()
            .map(|t| TraceRow {
                restart: t.restart,
                reflected: t.reflected,
                start_value: t.start_value,
                value: t.value,
                iterations: t.iterations,
                evals: t.evals,
                converged: t.converged,
            })
            .collect(),
    };
    write_output(&out, &to_json(&report)?)
}

fn cmd_lift(args: LiftArgs) -> CliResult<()> {
    let mut cfg = load_optional_config(&args.config)?;
    let family = parse_family_arg(args.family, &mut cfg, "family")?;
    let out = cfg.fill(args.out, "out")?;
    let sample = args.sample.resolve(&mut cfg, 2)?;
    cfg.finish()?;

    let counts = sample.counts_for(&family)?;
    let lifted = family.lifted_cloud(sample.order, &counts, sample.fiber_cap, sample.seed)?;
    let headers = lifted_headers(lifted.order, lifted.target_dim);
    let comment = format!(
        "jetgh lift family={family} {}",
        sample.describe(&[&counts])
    );
    let mut bytes = Vec::new();
    lifted
        .cloud
        .write_csv(&mut bytes, &headers, &[comment])?;
    write_output(&out, &bytes)
}

fn cmd_ftable(args: FtableArgs) -> CliResult<()> {
    let mut cfg = load_optional_config(&args.config)?;
    let r1 = require(cfg.fill(args.r1, "r1")?, "r1")?;
    let r2 = require(cfg.fill(args.r2, "r2")?, "r2")?;
    let rt_raw = require(cfg.fill(args.rt, "rt")?, "rt")?;
    let steps = cfg.fill(args.steps, "steps")?.unwrap_or(25);
    let log = cfg.fill_bool(args.log, "log")?;
    let out = cfg.fill(args.out, "out")?;
    cfg.finish()?;

    let (lo, hi) = match rt_raw.split_once("..") {
        Some((a, b)) => {
            let lo: f64 = a
                .trim()
                .parse()
                .map_err(|_| Failure::config(format!("field `rt`: cannot parse `{a}`")))?;
            let hi: f64 = b
                .trim()
                .parse()
                .map_err(|_| Failure::config(format!("field `rt`: cannot parse `{b}`")))?;
            (lo, hi)
        }
        None => {
            let v: f64 = rt_raw
                .trim()
                .parse()
                .map_err(|_| Failure::config(format!("field `rt`: cannot parse `{rt_raw}`")))?;
            (v, v)
        }
    };
    if steps == 0 {
        return Err(Failure::config("field `steps` must be at least 1"));
    }
    if log && (lo <= 0.0 || hi <= 0.0) {
        return Err(Failure::config(
            "log spacing needs strictly positive rt bounds",
        ));
    }

    let mut text = String::new();
    let _ = writeln!(
        text,
        "# jetgh ftable r1={r1} r2={r2} rt={rt_raw} steps={steps} log={log}"
    );
    let _ = writeln!(text, "r_tilde,f_value");
    for i in 0..steps {
        let t = if steps == 1 {
            0.0
        } else {
            i as f64 / (steps - 1) as f64
        };
        let rt = if log {
            lo * (hi / lo).powf(t)
        } else {
            lo + (hi - lo) * t
        };
        let value = f_function(r1, r2, rt)?;
        let _ = writeln!(text, "{rt},{value}");
    }
    write_output(&out, text.as_bytes())
}

fn cmd_wavy_sweep(args: WavySweepArgs) -> CliResult<()> {
    let mut cfg = load_optional_config(&args.config)?;
    let r1 = cfg.fill(args.r1, "r1")?.unwrap_or(1.0);
    let r2 = cfg.fill(args.r2, "r2")?.unwrap_or(1.1);
    let eps_raw = require(cfg.fill(args.eps, "eps")?, "eps")?;
    let out = cfg.fill(args.out, "out")?;
    let sample = args.sample.resolve(&mut cfg, 2)?;
    cfg.finish()?;

    let eps_values = parse_f64_list(&eps_raw, "eps")?;
    if eps_values.is_empty() {
        return Err(Failure::config("field `eps` must list at least one value"));
    }
    let round = Family::Circle { r: r1 };

    let mut text = String::new();
    let _ = writeln!(
        text,
        "# jetgh wavy-sweep r1={r1} r2={r2} eps={eps_raw} {}",
        sample.describe(&[])
    );
    let _ = writeln!(
        text,
        "eps,waves,amplitude,flat_hausdorff,lifted_hausdorff"
    );
    for &eps in &eps_values {
        let wavy = Family::Wavy { r1, r2, eps };
        let (_, info) = jetgh_core::build_wavy_circle(r1, r2, eps)?;

        // flat images: plain point clouds, no fibers
        let flat_w = wavy.lifted_cloud(0, &wavy.recommended_counts(0)?, sample.fiber_cap, sample.seed)?;
        let flat_r = round.lifted_cloud(0, &round.recommended_counts(0)?, sample.fiber_cap, sample.seed)?;
        let flat = hausdorff(&flat_w.cloud, &flat_r.cloud)?;

        // lifted clouds at identity placement
        let counts_w = sample.counts_for(&wavy)?;
        let counts_r = sample.counts_for(&round)?;
        let lift_w = wavy.lifted_cloud(sample.order, &counts_w, sample.fiber_cap, sample.seed)?;
        let lift_r = round.lifted_cloud(sample.order, &counts_r, sample.fiber_cap, sample.seed)?;
        let lifted = hausdorff(&lift_w.cloud, &lift_r.cloud)?;

        let _ = writeln!(
            text,
            "{eps},{},{},{flat},{lifted}",
            info.waves, info.amplitude
        );
    }
    write_output(&out, text.as_bytes())
}

fn cmd_equivalence(args: EquivalenceArgs) -> CliResult<()> {
    let mut cfg = load_optional_config(&args.config)?;
    let radii_raw = cfg.fill(args.radii, "radii")?;
    let harmonic = cfg.fill(args.harmonic, "harmonic")?;
    let restarts = cfg.fill(args.restarts, "restarts")?.unwrap_or(2);
    let grid = cfg.fill(args.grid, "grid")?.unwrap_or(512);
    let fd_step = cfg.fill(args.fd_step, "fd-step")?.unwrap_or(1e-4);
    let out = cfg.fill(args.out, "out")?;
    let sample = args.sample.resolve(&mut cfg, 2)?;
    cfg.finish()?;

    let radii: Vec<f64> = match (&radii_raw, harmonic) {
        (Some(_), Some(_)) => {
            return Err(Failure::config(
                "pass either `radii` or `harmonic`, not both",
            ))
        }
        (Some(raw), None) => parse_f64_list(raw, "radii")?,
        (None, Some(n)) => (1..=n).map(|i| 1.0 + 1.0 / i as f64).collect(),
        (None, None) => {
            return Err(Failure::config("missing required field `radii` (or `harmonic`)"))
        }
    };

    let reference = Family::Circle { r: 1.0 };
    let counts = sample.counts_for(&reference)?;
    let counts = if sample.base.is_none() && sample.top.is_none() && sample.intermediate.is_none()
    {
        default_equivalence_counts(sample.order)?
    } else {
        counts
    };
    let eq_cfg = EquivalenceCfg {
        reference_r: 1.0,
        order: sample.order,
        counts: counts.clone(),
        fiber_cap: sample.fiber_cap,
        align: AlignConfig {
            restarts,
            max_iters: 500,
            tol_diameter: 1e-6,
            seed: sample.seed,
            allow_reflection: false,
        },
        grid,
        fd_step,
    };
    let report = equivalence_experiment(&radii, &eq_cfg)?;

    let radii_desc = match harmonic {
        Some(n) => format!("harmonic={n}"),
        None => format!(
            "radii={}",
            radii
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ),
    };
    let mut text = String::new();
    let _ = writeln!(
        text,
        "# jetgh equivalence {radii_desc} restarts={restarts} grid={grid} fd-step={fd_step} {}",
        sample.describe(&[&counts])
    );
    let _ = writeln!(text, "i,r_i,dgh_estimate,ck_norm,runtime_ms");
    for rec in &report.records {
        let dgh = rec.dgh_estimate.unwrap_or(f64::NAN);
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            rec.index, rec.parameter, dgh, rec.ck_norm, rec.runtime_ms
        );
    }
    write_output(&out, text.as_bytes())
}

/// Counts used by the joint experiment when none are given: dense enough
/// for two-digit distance estimates, light enough for a sweep.
fn default_equivalence_counts(order: usize) -> CliResult<SampleCounts> {
    let counts = match order {
        0 => SampleCounts {
            base: vec![96],
            intermediate: vec![],
            top: 1,
        },
        1 => SampleCounts {
            base: vec![96],
            intermediate: vec![],
            top: 64,
        },
        2 => SampleCounts {
            base: vec![96],
            intermediate: vec![9],
            top: 64,
        },
        3 => SampleCounts {
            base: vec![64],
            intermediate: vec![5, 5],
            top: 16,
        },
        _ => {
            return Err(Failure::config(format!(
                "no default sample counts for order {order}; pass base/intermediate/top"
            )))
        }
    };
    Ok(counts)
}
