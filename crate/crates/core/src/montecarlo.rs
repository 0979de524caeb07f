//! Failure-rate estimation by simulation.
//!
//! Every trial draws its received matrix from a generator seeded by a hash of
//! `(master_seed, delta, code_index, trial_index)`, and the stopping rule is
//! evaluated over trial indices in order. Output therefore depends on the
//! configuration only, never on scheduling or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::DegreeDistribution;
use crate::codes::{sample_received_matrix, sample_uniform_parity_code, OuterCode};
use crate::decoder::inactivation_failure;
use crate::error::{domain, Result};
use crate::exec::map_range;
use crate::gf::FieldSpec;
use crate::numeric::{fmt_f64, sha256_hex};
use crate::stats::{
    binomial_std_error, mean_and_std_error, wilson_interval, zero_failure_upper, Z95,
};

pub const DEFAULT_MAX_TRIALS: u64 = 100_000_000;
pub const DEFAULT_TARGET_ERRORS: u64 = 200;

const TAG_TRIAL: u64 = 0x7472_6961_6c00_0001;
const TAG_CODE: u64 = 0x636f_6465_0000_0002;

const FIRST_BATCH: u64 = 1024;
const MAX_BATCH: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EnsembleConfig {
    pub num_codes: u64,
    pub trials_per_code: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub master_seed: u64,
    pub overheads: Vec<usize>,
    pub target_errors: u64,
    pub max_trials_per_point: u64,
    pub ensemble: Option<EnsembleConfig>,
}

impl SimConfig {
    pub fn fixed(master_seed: u64, overheads: Vec<usize>) -> Self {
        SimConfig {
            master_seed,
            overheads,
            target_errors: DEFAULT_TARGET_ERRORS,
            max_trials_per_point: DEFAULT_MAX_TRIALS,
            ensemble: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_errors < 1 {
            return Err(domain("target_errors must be at least 1"));
        }
        if self.max_trials_per_point < self.target_errors {
            return Err(domain(format!(
                "max_trials ({}) must be at least target_errors ({})",
                self.max_trials_per_point, self.target_errors
            )));
        }
        if self.overheads.is_empty() {
            return Err(domain("overhead list is empty"));
        }
        if self.overheads.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain("overheads must be strictly increasing"));
        }
        if let Some(e) = self.ensemble {
            if e.num_codes == 0 || e.trials_per_code == 0 {
                return Err(domain(
                    "ensemble needs at least one code and one trial per code",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointResult {
    pub delta: usize,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Standard error of `rate`; binomial for a fixed code, standard error
    /// of the per-code mean for an ensemble.
    pub std_error: f64,
    /// Fixed code: the trial cap was hit before `target_errors` failures.
    /// Ensemble: no failure was observed at all.
    pub censored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub master_seed: u64,
    pub h: usize,
    pub k: usize,
    pub q: u32,
    pub distribution: String,
    /// SHA-256 of the code text; for an ensemble, of the concatenated
    /// per-code digests.
    pub code_digest: String,
    pub num_codes: u64,
    pub points: Vec<PointResult>,
}

impl SimResult {
    pub fn point(&self, delta: usize) -> Option<&PointResult> {
        self.points.iter().find(|p| p.delta == delta)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,trials,failures,rate,ci_low,ci_high\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.delta,
                p.trials,
                p.failures,
                fmt_f64(p.rate),
                fmt_f64(p.ci_low),
                fmt_f64(p.ci_high)
            ));
        }
        out
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0, |s, &p| splitmix(s ^ splitmix(p)))
}

/// Seed of trial `trial` at overhead `delta` on code `code_index`.
pub fn trial_seed(master: u64, delta: usize, code_index: u64, trial: u64) -> u64 {
    derive_seed(&[TAG_TRIAL, master, delta as u64, code_index, trial])
}

/// Seed from which ensemble code `index` is drawn.
pub fn code_seed(master: u64, index: u64) -> u64 {
    derive_seed(&[TAG_CODE, master, index])
}

/// Ensemble member `index`; identical for every overhead.
pub fn ensemble_code(
    h: usize,
    k: usize,
    field: &FieldSpec,
    master: u64,
    index: u64,
) -> Result<OuterCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(code_seed(master, index));
    sample_uniform_parity_code(h, k, field, &mut rng)
}

fn trial_fails(code: &OuterCode, dist: &DegreeDistribution, m: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rx = sample_received_matrix(code.h(), m, dist, code.field(), &mut rng)
        .expect("degree bound checked before simulation");
    inactivation_failure(code, &rx)
        .expect("dimensions checked before simulation")
        .failed
}

fn check_inputs(code_h: usize, dist: &DegreeDistribution, cfg: &SimConfig) -> Result<()> {
    cfg.validate()?;
    if dist.d_max() > code_h {
        return Err(domain(format!(
            "maximum degree {} exceeds h = {code_h}",
            dist.d_max()
        )));
    }
    Ok(())
}

fn fixed_point(
    code: &OuterCode,
    dist: &DegreeDistribution,
    cfg: &SimConfig,
    delta: usize,
) -> PointResult {
    let m = code.k() + delta;
    let cap = cfg.max_trials_per_point;
    let mut trials = 0u64;
    let mut failures = 0u64;
    let mut batch = FIRST_BATCH;
    'outer: while trials < cap {
        if failures > 0 {
            // Aim at the trial count the observed rate suggests, with margin.
            let rate = failures as f64 / trials as f64;
            let need = ((cfg.target_errors - failures) as f64 / rate * 1.25).ceil() as u64;
            batch = batch.max(need.min(MAX_BATCH));
        }
        let end = (trials + batch).min(cap);
        let outcomes = map_range(trials..end, |t| {
            trial_fails(code, dist, m, trial_seed(cfg.master_seed, delta, 0, t))
        });
        for failed in outcomes {
            trials += 1;
            if failed {
                failures += 1;
                if failures == cfg.target_errors {
                    break 'outer;
                }
            }
        }
        batch = (batch * 2).min(MAX_BATCH);
    }
    let rate = failures as f64 / trials as f64;
    let (ci_low, ci_high) = if failures == 0 {
        (0.0, zero_failure_upper(trials))
    } else {
        wilson_interval(failures, trials)
    };
    PointResult {
        delta,
        trials,
        failures,
        rate,
        ci_low,
        ci_high,
        std_error: binomial_std_error(failures, trials),
        censored: failures < cfg.target_errors,
    }
}

/// Estimates the failure rate of one code at each configured overhead,
/// sampling until `target_errors` failures or the trial cap.
pub fn run_fixed_code(
    code: &OuterCode,
    dist: &DegreeDistribution,
    cfg: &SimConfig,
) -> Result<SimResult> {
    run_fixed_code_with(code, dist, cfg, &mut |_| {})
}

/// [`run_fixed_code`] reporting each finished point to `progress`.
pub fn run_fixed_code_with(
    code: &OuterCode,
    dist: &DegreeDistribution,
    cfg: &SimConfig,
    progress: &mut dyn FnMut(&PointResult),
) -> Result<SimResult> {
    check_inputs(code.h(), dist, cfg)?;
    let mut points = Vec::with_capacity(cfg.overheads.len());
    for &delta in &cfg.overheads {
        let p = fixed_point(code, dist, cfg, delta);
        progress(&p);
        points.push(p);
    }
    Ok(SimResult {
        master_seed: cfg.master_seed,
        h: code.h(),
        k: code.k(),
        q: code.field().q(),
        distribution: dist.name().to_string(),
        code_digest: code.digest(),
        num_codes: 1,
        points,
    })
}

/// Average failure rate over `num_codes` codes from the uniform
/// parity-check ensemble, each tried `trials_per_code` times per overhead.
pub fn run_ensemble(
    h: usize,
    k: usize,
    field: &FieldSpec,
    dist: &DegreeDistribution,
    cfg: &SimConfig,
) -> Result<SimResult> {
    run_ensemble_with(h, k, field, dist, cfg, &mut |_| {})
}

pub fn run_ensemble_with(
    h: usize,
    k: usize,
    field: &FieldSpec,
    dist: &DegreeDistribution,
    cfg: &SimConfig,
    progress: &mut dyn FnMut(&PointResult),
) -> Result<SimResult> {
    check_inputs(h, dist, cfg)?;
    let ens = cfg
        .ensemble
        .ok_or_else(|| domain("ensemble simulation needs an ensemble configuration"))?;
    let codes = map_range(0..ens.num_codes, |i| {
        ensemble_code(h, k, field, cfg.master_seed, i)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut digests = String::new();
    for c in &codes {
        digests.push_str(&c.digest());
    }
    let code_digest = sha256_hex(digests.as_bytes());

    let t = ens.trials_per_code;
    let mut points = Vec::with_capacity(cfg.overheads.len());
    for &delta in &cfg.overheads {
        let m = k + delta;
        let per_code: Vec<u64> = map_range(0..ens.num_codes, |c| {
            let code = &codes[c as usize];
            (0..t)
                .filter(|&i| trial_fails(code, dist, m, trial_seed(cfg.master_seed, delta, c, i)))
                .count() as u64
        });
        let failures: u64 = per_code.iter().sum();
        let trials = ens.num_codes * t;
        let rates: Vec<f64> = per_code.iter().map(|&f| f as f64 / t as f64).collect();
        let (rate, se) = mean_and_std_error(&rates);
        let (ci_low, ci_high) = if failures == 0 {
            (0.0, zero_failure_upper(trials))
        } else if ens.num_codes == 1 {
            wilson_interval(failures, trials)
        } else {
            (
                (rate - Z95 * se).clamp(0.0, 1.0).min(rate),
                (rate + Z95 * se).clamp(0.0, 1.0).max(rate),
            )
        };
        let p = PointResult {
            delta,
            trials,
            failures,
            rate,
            ci_low,
            ci_high,
            std_error: se,
            censored: failures == 0,
        };
        progress(&p);
        points.push(p);
    }
    Ok(SimResult {
        master_seed: cfg.master_seed,
        h,
        k,
        q: field.q(),
        distribution: dist.name().to_string(),
        code_digest,
        num_codes: ens.num_codes,
        points,
    })
}
