//! Cross-checks between independent implementations of the same quantity.

use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{
    krawtchouk_q, phi, pi_l_direct, pi_l_krawtchouk_with, rational_to_f64, zero_sum_by_convolution,
    BoundEvaluator, DegreeDistribution, KrawtchoukFn,
};
use crate::codes::{
    build_hamming, enumerate_codeword_weights, r10_distribution, sample_received_matrix,
    sample_uniform_parity_code,
};
use crate::decoder::{inactivation_failure, ml_failure};
use crate::enumerators::{hamming_weight_enumerator, unrestricted_weight_enumerator};
use crate::gf::FieldSpec;
use crate::numeric::binomial;

/// Relative tolerance of floating cross-path comparisons.
pub const REL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub max_deviation: f64,
    /// Parameters of the worst case when the check failed.
    pub offending: Option<String>,
}

impl CheckReport {
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} {} cases={} max_deviation={:e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.max_deviation
        );
        if let Some(o) = &self.offending {
            s.push_str(&format!(" offending: {o}"));
        }
        s
    }
}

/// Implementations under test; swapped out only to check that the suite
/// notices a broken one.
#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub krawtchouk: KrawtchoukFn,
}

impl Default for Fixture {
    fn default() -> Self {
        Fixture {
            krawtchouk: krawtchouk_q,
        }
    }
}

struct Tracker {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    worst: f64,
    worst_case: String,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tracker {
            name,
            tolerance,
            cases: 0,
            worst: 0.0,
            worst_case: String::new(),
        }
    }

    fn record(&mut self, deviation: f64, case: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN counts as the worst possible deviation
        if deviation.is_nan() || deviation > self.worst {
            self.worst = if deviation.is_nan() {
                f64::INFINITY
            } else {
                deviation
            };
            self.worst_case = case();
        }
    }

    fn finish(self) -> CheckReport {
        let passed = self.worst <= self.tolerance;
        CheckReport {
            name: self.name,
            passed,
            cases: self.cases,
            max_deviation: self.worst,
            offending: (!passed).then_some(self.worst_case),
        }
    }
}

fn rel_dev(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Closed-form `phi` against explicit convolution, exactly.
pub fn check_phi(max_i: usize, fields: &[u32]) -> CheckReport {
    let mut t = Tracker::new("phi_vs_convolution", 0.0);
    for &m in fields {
        let f = FieldSpec::new(m).expect("valid field");
        for i in 1..=max_i {
            let oracle = zero_sum_by_convolution(i, &f).expect("small field");
            let diff = (phi(i, &f) - oracle).abs();
            t.record(rational_to_f64(&diff), || format!("i={i} q={}", f.q()));
        }
    }
    t.finish()
}

/// `pi_l` by hypergeometric mixture against the Krawtchouk form. Lengths
/// below the largest degree use the distribution truncated at `h`.
pub fn check_pi(
    fx: &Fixture,
    lengths: &[usize],
    fields: &[u32],
    dist: &DegreeDistribution,
) -> CheckReport {
    let mut t = Tracker::new("pi_l_cross_path", REL_TOLERANCE);
    for &m in fields {
        let f = FieldSpec::new(m).expect("valid field");
        for &h in lengths {
            let truncated;
            let dist = if dist.d_max() > h {
                truncated = dist.truncated(h).expect("degree 1 survives");
                &truncated
            } else {
                dist
            };
            for l in 0..=h {
                let a = pi_l_direct(l, h, dist, &f).expect("valid arguments");
                let b =
                    pi_l_krawtchouk_with(fx.krawtchouk, l, h, dist, &f).expect("valid arguments");
                t.record(rel_dev(a, b), || format!("l={l} h={h} q={}", f.q()));
            }
        }
    }
    t.finish()
}

/// Inactivation decoding against plain elimination on random instances.
/// The deviation is the number of disagreeing instances.
pub fn check_decoders(
    h: usize,
    k: usize,
    instances: usize,
    fields: &[u32],
    seed: u64,
) -> CheckReport {
    let mut t = Tracker::new("decoder_equivalence", 0.0);
    let dist = r10_distribution();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    let mut first = String::new();
    for &m in fields {
        let f = FieldSpec::new(m).expect("valid field");
        for _ in 0..instances {
            let code = sample_uniform_parity_code(h, k, &f, &mut rng).expect("valid ensemble");
            let n = k.saturating_sub(4) + rng.random_range(0..12);
            let rx = sample_received_matrix(h, n, &dist, &f, &mut rng).expect("valid degrees");
            let a = ml_failure(&code, &rx).expect("matching dimensions");
            let b = inactivation_failure(&code, &rx).expect("matching dimensions");
            if a.failed != b.failed || a.rank_deficit != b.rank_deficit {
                if mismatches == 0 {
                    first = format!("h={h} k={k} q={} m={n}", f.q());
                }
                mismatches += 1;
            }
        }
    }
    t.cases = instances * fields.len();
    t.worst = mismatches as f64;
    t.worst_case = first;
    t.finish()
}

/// Hamming enumerator recursion against brute-force codeword weights.
pub fn check_hamming(ts: &[u32]) -> CheckReport {
    let mut t = Tracker::new("hamming_enumerator", 0.0);
    for &r in ts {
        let rec = hamming_weight_enumerator(r).expect("supported length");
        let exact = rec.exact().expect("short code keeps exact values");
        let brute = enumerate_codeword_weights(&build_hamming(r).expect("supported length"))
            .expect("small code");
        for (l, (a, &b)) in exact.iter().zip(&brute).enumerate() {
            let diff = if *a >= BigUint::from(b) {
                a - BigUint::from(b)
            } else {
                BigUint::from(b) - a
            };
            t.record(diff.to_f64().unwrap_or(f64::INFINITY), || {
                format!("t={r} l={l}")
            });
        }
    }
    t.finish()
}

/// LT-code bound against an independently written sum.
pub fn check_lt_bound(
    k: usize,
    max_delta: usize,
    fields: &[u32],
    dist: &DegreeDistribution,
) -> CheckReport {
    let mut t = Tracker::new("lt_bound_direct_sum", REL_TOLERANCE);
    for &m in fields {
        let f = FieldSpec::new(m).expect("valid field");
        let q1 = (f.q() - 1) as f64;
        let we = unrestricted_weight_enumerator(k, &f).expect("valid length");
        let ev = BoundEvaluator::new(k, dist, &f).expect("valid distribution");
        let pis: Vec<f64> = (0..=k)
            .map(|l| pi_l_direct(l, k, dist, &f).expect("valid arguments"))
            .collect();
        for delta in 0..=max_delta {
            let n = (k + delta) as i32;
            let direct: f64 = (1..=k)
                .map(|l| {
                    let c = binomial(k as u64, l as u64)
                        .to_f64()
                        .expect("finite binomial");
                    c * q1.powi(l as i32 - 1) * pis[l].powi(n)
                })
                .sum();
            let got = ev
                .scalar_class_bound(&we, k, delta)
                .expect("valid arguments");
            t.record(rel_dev(got, direct), || {
                format!("k={k} q={} delta={delta}", f.q())
            });
        }
    }
    t.finish()
}

/// The full suite as run by the `verify` command.
pub fn run_all(fx: &Fixture) -> Vec<CheckReport> {
    let r10 = r10_distribution();
    vec![
        check_phi(8, &[1, 2, 3, 4]),
        check_pi(fx, &[7, 63, 70], &[1, 2], &r10),
        check_decoders(70, 64, 400, &[1, 2], 0x5eed),
        check_hamming(&[3, 4]),
        check_lt_bound(64, 20, &[1, 2], &r10),
    ]
}
