//! Exact combinatorics, log-domain helpers and CSV number formatting.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

/// `C(n, k)` exactly; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Row `C(n, 0..=kmax)` computed incrementally.
pub fn binomial_row(n: u64, kmax: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(kmax as usize + 1);
    let mut c = BigUint::one();
    for k in 0..=kmax {
        if k > n {
            row.push(BigUint::zero());
            continue;
        }
        row.push(c.clone());
        c *= n - k;
        c /= k + 1;
    }
    row
}

/// Natural log of an arbitrary-size integer; `-inf` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_bigint_abs(x: &BigInt) -> f64 {
    ln_biguint(x.magnitude())
}

/// `ln C(n, l)` for `l = 0..=n` by cumulative sums.
pub fn ln_binomial_row(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for l in 0..n {
        acc += ((n - l) as f64).ln() - ((l + 1) as f64).ln();
        out.push(acc);
    }
    out
}

/// Pairwise summation of nonnegative terms.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2..=8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// `ln(sum(exp(t)))` over finite terms; `-inf` when empty.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    let scaled: Vec<f64> = terms.iter().map(|&t| (t - max).exp()).collect();
    max + pairwise_sum(&scaled).ln()
}

/// Shortest round-trip decimal, switching to exponent form far from 1.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Decimal rendering of `exp(ln_x)` that survives values beyond `f64`.
pub fn fmt_ln(ln_x: f64) -> String {
    if ln_x == f64::NEG_INFINITY {
        return "0".into();
    }
    let x = ln_x.exp();
    if x.is_finite() && x > f64::MIN_POSITIVE {
        return fmt_f64(x);
    }
    let log10 = ln_x / std::f64::consts::LN_10;
    let exp = log10.floor();
    let mantissa = 10f64.powf(log10 - exp);
    format!("{mantissa:.15}e{exp}")
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
