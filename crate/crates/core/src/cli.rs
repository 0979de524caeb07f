//! Command-line front end: `bound`, `simulate` and `verify`.
//!
//! Every output file starts with a `#` line holding the canonical command
//! that reproduces it. `--workers` is left out because it never changes
//! output bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bounds::{BoundEvaluator, BoundKind, DegreeDistribution};
use crate::codes::{build_hamming, r10_distribution, OuterCode};
use crate::enumerators::{
    hamming_weight_enumerator, uniform_ensemble_weight_enumerator, unrestricted_weight_enumerator,
};
use crate::error::Error;
use crate::exec::{current_workers, with_workers};
use crate::gf::FieldSpec;
use crate::montecarlo::{
    run_ensemble_with, run_fixed_code_with, EnsembleConfig, PointResult, SimConfig, SimResult,
    DEFAULT_MAX_TRIALS, DEFAULT_TARGET_ERRORS,
};
use crate::numeric::fmt_f64;
use crate::verify::{run_all, Fixture};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

pub const DEFAULT_CODES: u64 = 6000;
pub const DEFAULT_TRIALS_PER_CODE: u64 = 1000;

const PROGRAM: &str = "raptor-bounds";

#[derive(Parser, Debug)]
#[command(name = PROGRAM, version, about = "Union bounds and Monte Carlo failure rates for q-ary Raptor codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the ML failure upper bound per overhead as CSV.
    Bound(ExperimentArgs),
    /// Estimate failure rates by inactivation decoding; writes CSV and a run manifest.
    Simulate(ExperimentArgs),
    /// Run the cross-implementation consistency checks.
    Verify,
}

#[derive(Args, Debug, Default)]
struct ExperimentArgs {
    /// File of `key = value` lines using the long flag names; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field GF(2^m) given by m.
    #[arg(long)]
    field: Option<String>,
    /// hamming:t | uniform:h:k | unrestricted:k
    #[arg(long)]
    outer: Option<String>,
    /// r10 or a file of "degree probability" lines.
    #[arg(long)]
    dist: Option<String>,
    /// Inclusive overhead range a..b, or a single value.
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "target-errors")]
    target_errors: Option<String>,
    #[arg(long = "max-trials")]
    max_trials: Option<String>,
    /// Ensemble size (uniform outer codes only).
    #[arg(long)]
    codes: Option<String>,
    #[arg(long = "trials-per-code")]
    trials_per_code: Option<String>,
    /// Worker threads; affects wall time only.
    #[arg(long)]
    workers: Option<String>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run manifest path; defaults to `<out>.manifest.json` when `--out` is set.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "field",
    "outer",
    "dist",
    "delta",
    "seed",
    "target-errors",
    "max-trials",
    "codes",
    "trials-per-code",
    "workers",
    "out",
    "manifest",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OuterSelector {
    Hamming { t: u32 },
    Uniform { h: usize, k: usize },
    Unrestricted { k: usize },
}

impl OuterSelector {
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| {
            p.parse::<usize>()
                .map_err(|_| format!("bad number {p:?} in --outer {s}"))
        };
        match parts.as_slice() {
            ["hamming", t] => Ok(OuterSelector::Hamming { t: num(t)? as u32 }),
            ["uniform", h, k] => Ok(OuterSelector::Uniform {
                h: num(h)?,
                k: num(k)?,
            }),
            ["unrestricted", k] => Ok(OuterSelector::Unrestricted { k: num(k)? }),
            _ => Err(format!(
                "unknown outer code {s:?}; expected hamming:t, uniform:h:k or unrestricted:k"
            )),
        }
    }

    pub fn h(&self) -> usize {
        match *self {
            OuterSelector::Hamming { t } => (1usize << t) - 1,
            OuterSelector::Uniform { h, .. } => h,
            OuterSelector::Unrestricted { k } => k,
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            OuterSelector::Hamming { t } => (1usize << t) - 1 - t as usize,
            OuterSelector::Uniform { k, .. } => k,
            OuterSelector::Unrestricted { k } => k,
        }
    }
}

impl std::fmt::Display for OuterSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OuterSelector::Hamming { t } => write!(f, "hamming:{t}"),
            OuterSelector::Uniform { h, k } => write!(f, "uniform:{h}:{k}"),
            OuterSelector::Unrestricted { k } => write!(f, "unrestricted:{k}"),
        }
    }
}

/// Fully resolved experiment parameters.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub field: FieldSpec,
    pub outer: OuterSelector,
    /// `r10` or the path as given.
    pub dist_arg: String,
    pub dist: DegreeDistribution,
    pub delta_lo: usize,
    pub delta_hi: usize,
    pub seed: u64,
    pub target_errors: u64,
    pub max_trials: u64,
    pub codes: u64,
    pub trials_per_code: u64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn deltas(&self) -> Vec<usize> {
        (self.delta_lo..=self.delta_hi).collect()
    }

    pub fn is_ensemble(&self) -> bool {
        matches!(self.outer, OuterSelector::Uniform { .. })
    }

    fn common_flags(&self) -> String {
        format!(
            "--field {} --outer {} --dist {} --delta {}..{}",
            self.field.m(),
            self.outer,
            self.dist_arg,
            self.delta_lo,
            self.delta_hi
        )
    }

    /// Canonical `bound` invocation.
    pub fn bound_command(&self) -> String {
        let mut s = format!("{PROGRAM} bound {}", self.common_flags());
        if let Some(out) = &self.out {
            let _ = write!(s, " --out {}", out.display());
        }
        s
    }

    /// Canonical `simulate` invocation.
    pub fn simulate_command(&self) -> String {
        let mut s = format!(
            "{PROGRAM} simulate {} --seed {}",
            self.common_flags(),
            self.seed
        );
        if self.is_ensemble() {
            let _ = write!(
                s,
                " --codes {} --trials-per-code {}",
                self.codes, self.trials_per_code
            );
        } else {
            let _ = write!(
                s,
                " --target-errors {} --max-trials {}",
                self.target_errors, self.max_trials
            );
        }
        if let Some(out) = &self.out {
            let _ = write!(s, " --out {}", out.display());
        }
        if let Some(m) = &self.manifest {
            let _ = write!(s, " --manifest {}", m.display());
        }
        s
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            master_seed: self.seed,
            overheads: self.deltas(),
            target_errors: self.target_errors,
            max_trials_per_point: self.max_trials,
            ensemble: self.is_ensemble().then_some(EnsembleConfig {
                num_codes: self.codes,
                trials_per_code: self.trials_per_code,
            }),
        }
    }

    fn manifest_path(&self) -> Option<PathBuf> {
        self.manifest.clone().or_else(|| {
            self.out.as_ref().map(|o| {
                let mut s = o.as_os_str().to_owned();
                s.push(".manifest.json");
                PathBuf::from(s)
            })
        })
    }
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", n + 1))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(format!("config line {}: unknown key {:?}", n + 1, k.trim()));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.trim()
        .parse()
        .map_err(|_| format!("invalid value {v:?} for --{key}"))
}

fn parse_delta(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (
            parse_num::<usize>("delta", a)?,
            parse_num::<usize>("delta", b)?,
        ),
        None => {
            let a = parse_num::<usize>("delta", s)?;
            (a, a)
        }
    };
    if a > b {
        return Err(format!("empty delta range {s:?}"));
    }
    Ok((a, b))
}

fn resolve(args: &ExperimentArgs) -> Result<ExperimentSpec, String> {
    let file = match &args.config {
        Some(p) => read_config(p)?,
        None => BTreeMap::new(),
    };
    let get = |flag: &Option<String>, key: &str| flag.clone().or_else(|| file.get(key).cloned());
    let path_of = |flag: &Option<PathBuf>, key: &str| {
        flag.clone().or_else(|| file.get(key).map(PathBuf::from))
    };

    let m: u32 = match get(&args.field, "field") {
        Some(v) => parse_num("field", &v)?,
        None => 1,
    };
    let field = FieldSpec::new(m).map_err(|e| e.to_string())?;
    let outer = OuterSelector::parse(
        &get(&args.outer, "outer")
            .ok_or("missing --outer (hamming:t, uniform:h:k or unrestricted:k)")?,
    )?;
    if matches!(outer, OuterSelector::Hamming { .. }) && !field.is_binary() {
        return Err("hamming outer codes are binary; use --field 1".into());
    }
    let dist_arg = get(&args.dist, "dist").unwrap_or_else(|| "r10".into());
    let dist = if dist_arg == "r10" {
        r10_distribution()
    } else {
        DegreeDistribution::from_file(Path::new(&dist_arg)).map_err(|e| e.to_string())?
    };
    let (delta_lo, delta_hi) =
        parse_delta(&get(&args.delta, "delta").ok_or("missing --delta a..b")?)?;
    let num = |flag: &Option<String>, key: &str, default: u64| -> Result<u64, String> {
        get(flag, key).map_or(Ok(default), |v| parse_num(key, &v))
    };
    let workers = match get(&args.workers, "workers") {
        Some(v) => match parse_num::<usize>("workers", &v)? {
            0 => return Err("--workers must be at least 1".into()),
            n => Some(n),
        },
        None => None,
    };
    Ok(ExperimentSpec {
        field,
        outer,
        dist_arg,
        dist,
        delta_lo,
        delta_hi,
        seed: num(&args.seed, "seed", 0)?,
        target_errors: num(&args.target_errors, "target-errors", DEFAULT_TARGET_ERRORS)?,
        max_trials: num(&args.max_trials, "max-trials", DEFAULT_MAX_TRIALS)?,
        codes: num(&args.codes, "codes", DEFAULT_CODES)?,
        trials_per_code: num(
            &args.trials_per_code,
            "trials-per-code",
            DEFAULT_TRIALS_PER_CODE,
        )?,
        workers,
        out: path_of(&args.out, "out"),
        manifest: path_of(&args.manifest, "manifest"),
    })
}

enum Failure {
    Usage(String),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit(spec: &ExperimentSpec, body: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &spec.out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| Failure::Usage(e.to_string())),
    }
}

/// CSV of the bound selected by the outer code: the weight-enumerator bound
/// for Hamming codes, the ensemble bound for uniform codes, and the LT bound
/// (scalar-class form with the unrestricted enumerator) otherwise.
pub fn bound_csv(spec: &ExperimentSpec) -> crate::Result<String> {
    let (we, kind) = match spec.outer {
        OuterSelector::Hamming { t } => {
            (hamming_weight_enumerator(t)?, BoundKind::WeightEnumerator)
        }
        OuterSelector::Uniform { h, k } => (
            uniform_ensemble_weight_enumerator(h, k, &spec.field)?,
            BoundKind::Ensemble,
        ),
        OuterSelector::Unrestricted { k } => (
            unrestricted_weight_enumerator(k, &spec.field)?,
            BoundKind::ScalarClasses,
        ),
    };
    let ev = BoundEvaluator::new(spec.outer.h(), &spec.dist, &spec.field)?;
    let curve = ev.curve(kind, &we, spec.outer.k(), spec.deltas())?;
    Ok(format!("# {}\n{}", spec.bound_command(), curve.to_csv()))
}

fn fixed_code(spec: &ExperimentSpec) -> crate::Result<OuterCode> {
    match spec.outer {
        OuterSelector::Hamming { t } => build_hamming(t),
        OuterSelector::Unrestricted { k } => OuterCode::unrestricted(k, &spec.field),
        OuterSelector::Uniform { .. } => unreachable!("ensemble handled separately"),
    }
}

/// Runs the simulation described by `spec`, reporting each point.
pub fn simulate(
    spec: &ExperimentSpec,
    progress: &mut (dyn FnMut(&PointResult) + Send),
) -> crate::Result<SimResult> {
    let cfg = spec.sim_config();
    with_workers(spec.workers, || match spec.outer {
        OuterSelector::Uniform { h, k } => {
            run_ensemble_with(h, k, &spec.field, &spec.dist, &cfg, progress)
        }
        _ => run_fixed_code_with(&fixed_code(spec)?, &spec.dist, &cfg, progress),
    })?
}

#[derive(Serialize)]
struct Manifest<'a> {
    program: &'static str,
    version: &'static str,
    command: String,
    field_m: u32,
    q: u32,
    outer: &'a OuterSelector,
    distribution: &'a str,
    degree_distribution: Vec<(usize, f64)>,
    config: SimConfig,
    /// Trial generator seeds are ChaCha8 keyed by this hash of the listed parts.
    seed_derivation: &'static str,
    code_digest: &'a str,
    num_codes: u64,
    workers: usize,
    wall_time_seconds: f64,
    points: &'a [PointResult],
}

pub fn sim_csv(spec: &ExperimentSpec, result: &SimResult) -> String {
    format!("# {}\n{}", spec.simulate_command(), result.to_csv())
}

fn cmd_simulate(
    spec: &ExperimentSpec,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), Failure> {
    let started = Instant::now();
    let result = simulate(spec, &mut |p: &PointResult| {
        eprintln!(
            "delta={} trials={} failures={} rate={}{}",
            p.delta,
            p.trials,
            p.failures,
            fmt_f64(p.rate),
            if p.censored { " (censored)" } else { "" }
        );
    })?;
    let _ = stderr.flush();
    let wall = started.elapsed().as_secs_f64();
    emit(spec, &sim_csv(spec, &result), stdout)?;
    if let Some(path) = spec.manifest_path() {
        let manifest = Manifest {
            program: PROGRAM,
            version: env!("CARGO_PKG_VERSION"),
            command: spec.simulate_command(),
            field_m: spec.field.m(),
            q: spec.field.q(),
            outer: &spec.outer,
            distribution: &spec.dist_arg,
            degree_distribution: spec.dist.entries().collect(),
            config: spec.sim_config(),
            seed_derivation:
                "splitmix64 fold over (tag, master_seed, delta, code_index, trial_index)",
            code_digest: &result.code_digest,
            num_codes: result.num_codes,
            workers: spec.workers.unwrap_or_else(current_workers),
            wall_time_seconds: wall,
            points: &result.points,
        };
        let json =
            serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Usage(e.to_string()))?;
        std::fs::write(&path, json + "\n")
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_verify(stdout: &mut dyn Write) -> Result<(), Failure> {
    let reports = run_all(&Fixture::default());
    for r in &reports {
        let _ = writeln!(stdout, "{}", r.line());
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let outcome = match &cli.command {
        Command::Verify => cmd_verify(stdout),
        Command::Bound(a) | Command::Simulate(a) => match resolve(a) {
            Err(msg) => Err(Failure::Usage(msg)),
            Ok(spec) => match &cli.command {
                Command::Bound(_) => bound_csv(&spec)
                    .map_err(Failure::from)
                    .and_then(|csv| emit(&spec, &csv, stdout)),
                _ => cmd_simulate(&spec, stdout, stderr),
            },
        },
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Verify) => {
            let _ = writeln!(stderr, "error: verification failed");
            EXIT_VERIFY
        }
    }
}
