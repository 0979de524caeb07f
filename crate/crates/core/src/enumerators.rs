//! Weight enumerators of outer codes.
//!
//! Three flavours are produced here: the exact enumerator of a binary Hamming
//! code, the expected enumerator of the uniform parity-check ensemble, and the
//! enumerator of the unrestricted space used when the outer code is absent
//! (plain LT codes).

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{domain, Error, Result};
use crate::gf::FieldSpec;
use crate::numeric::{binomial_row, fmt_ln, ln_biguint, ln_binomial_row};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumeratorKind {
    /// Exact multiplicities of one code.
    Deterministic,
    /// Expected multiplicities over a code ensemble.
    Expected,
    /// Multiplicities counted once per scalar class, i.e. already divided by
    /// `q - 1` (every nonzero vector of a weight, up to scaling).
    Projective,
}

impl EnumeratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EnumeratorKind::Deterministic => "deterministic",
            EnumeratorKind::Expected => "expected",
            EnumeratorKind::Projective => "projective",
        }
    }
}

/// Multiplicities `A_0..=A_h`, held in log domain. Exact integers are kept
/// alongside when the enumerator is not an expectation.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightEnumerator {
    kind: EnumeratorKind,
    ln_values: Vec<f64>,
    exact: Option<Vec<BigUint>>,
}

impl WeightEnumerator {
    /// Enumerator from exact integer multiplicities.
    pub fn from_exact(kind: EnumeratorKind, values: Vec<BigUint>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("weight enumerator needs at least A_0"));
        }
        if kind == EnumeratorKind::Expected {
            return Err(domain(
                "expected enumerators are real-valued; use from_ln_values",
            ));
        }
        if kind == EnumeratorKind::Deterministic && !values[0].is_one() {
            return Err(domain("deterministic enumerator must have A_0 = 1"));
        }
        Ok(WeightEnumerator {
            kind,
            ln_values: values.iter().map(ln_biguint).collect(),
            exact: Some(values),
        })
    }

    /// Enumerator from natural logs of nonnegative reals (`-inf` for zero).
    pub fn from_ln_values(kind: EnumeratorKind, ln_values: Vec<f64>) -> Result<Self> {
        if ln_values.is_empty() {
            return Err(domain("weight enumerator needs at least A_0"));
        }
        if ln_values.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(domain(
                "weight enumerator values must be finite and nonnegative",
            ));
        }
        Ok(WeightEnumerator {
            kind,
            ln_values,
            exact: None,
        })
    }

    pub fn kind(&self) -> EnumeratorKind {
        self.kind
    }

    /// Code length `h`.
    pub fn h(&self) -> usize {
        self.ln_values.len() - 1
    }

    pub fn ln_value(&self, l: usize) -> f64 {
        self.ln_values[l]
    }

    pub fn ln_values(&self) -> &[f64] {
        &self.ln_values
    }

    /// `A_l` as a float; may be `inf` for very long codes.
    pub fn value(&self, l: usize) -> f64 {
        self.ln_values[l].exp()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..=self.h()).map(|l| self.value(l)).collect()
    }

    pub fn exact(&self) -> Option<&[BigUint]> {
        self.exact.as_deref()
    }

    /// CSV with header `l,A_l`. Exact enumerators print integers, expected
    /// ones print shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,A_l\n");
        for l in 0..=self.h() {
            match &self.exact {
                Some(v) => writeln!(out, "{l},{}", v[l]),
                None => writeln!(out, "{l},{}", fmt_ln(self.ln_values[l])),
            }
            .expect("writing to a String");
        }
        out
    }
}

/// Exact integers are retained up to this length; longer Hamming codes keep
/// only the log-domain values.
const EXACT_RETAIN_MAX_LEN: u64 = 4095;

/// Exact enumerator of the binary `(2^t - 1, 2^t - 1 - t)` Hamming code from
/// the three-term recursion seeded with `A_0 = 1`, `A_1 = 0`.
pub fn hamming_weight_enumerator(t: u32) -> Result<WeightEnumerator> {
    if !(2..=16).contains(&t) {
        return Err(Error::Domain(format!(
            "Hamming parameter t = {t} outside 2..=16"
        )));
    }
    let h = (1u64 << t) - 1;
    let retain = h <= EXACT_RETAIN_MAX_LEN;
    let mut exact = Vec::new();
    let mut ln_values = Vec::with_capacity(h as usize + 1);
    let mut prev = BigUint::one();
    let mut cur = BigUint::zero();
    let mut binom = BigUint::from(h);
    for a in [&prev, &cur] {
        ln_values.push(ln_biguint(a));
        if retain {
            exact.push(a.clone());
        }
    }
    for i in 1..h {
        // (i+1) A_{i+1} = C(h,i) - A_i - (h-i+1) A_{i-1}
        let rhs = &binom - (&cur + &prev * (h - i + 1));
        debug_assert!((&rhs % (i + 1)).is_zero());
        let next = rhs / (i + 1);
        ln_values.push(ln_biguint(&next));
        if retain {
            exact.push(next.clone());
        }
        prev = std::mem::replace(&mut cur, next);
        binom = binom * (h - i) / (i + 1);
    }
    if retain {
        WeightEnumerator::from_exact(EnumeratorKind::Deterministic, exact)
    } else {
        WeightEnumerator::from_ln_values(EnumeratorKind::Deterministic, ln_values)
    }
}

/// Expected enumerator of the uniform `(h - k) x h` parity-check ensemble,
/// `C(h,l) q^-(h-k) (q-1)^l` for `l >= 1`. `A_0` is fixed at 1.
pub fn uniform_ensemble_weight_enumerator(
    h: usize,
    k: usize,
    field: &FieldSpec,
) -> Result<WeightEnumerator> {
    if !(0 < k && k < h) {
        return Err(Error::Domain(format!(
            "ensemble needs 0 < k < h, got h = {h}, k = {k}"
        )));
    }
    let q = field.q() as f64;
    let ln_q1 = (q - 1.0).ln();
    let offset = (h - k) as f64 * q.ln();
    let ln_binom = ln_binomial_row(h as u64);
    let mut ln_values: Vec<f64> = (0..=h)
        .map(|l| ln_binom[l] - offset + l as f64 * ln_q1)
        .collect();
    ln_values[0] = 0.0;
    WeightEnumerator::from_ln_values(EnumeratorKind::Expected, ln_values)
}

/// Every nonzero length-`k` vector, one per scalar class:
/// `C(k,l) (q-1)^(l-1)` for `l >= 1`, `A_0 = 1`.
pub fn unrestricted_weight_enumerator(k: usize, field: &FieldSpec) -> Result<WeightEnumerator> {
    if k == 0 {
        return Err(domain("unrestricted enumerator needs k >= 1"));
    }
    let q1 = BigUint::from(field.q() - 1);
    let binom = binomial_row(k as u64, k as u64);
    let mut values = vec![BigUint::one()];
    let mut pow = BigUint::one();
    for c in &binom[1..] {
        values.push(c * &pow);
        pow *= &q1;
    }
    WeightEnumerator::from_exact(EnumeratorKind::Projective, values)
}
