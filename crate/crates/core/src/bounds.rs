//! Union bounds on the ML decoding failure probability of Raptor codes.
//!
//! The per-weight zero probability `pi_l` (chance that one LT output symbol
//! vanishes on an intermediate word of Hamming weight `l`) is available via two
//! independent routes: the hypergeometric mixture of `phi_i` terms, and the
//! closed form in Krawtchouk ratios. Both are computed from exact integers and
//! only converted to `f64` at the end.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::enumerators::{EnumeratorKind, WeightEnumerator};
use crate::error::{domain, Error, Result};
use crate::gf::FieldSpec;
use crate::numeric::{binomial, binomial_row, fmt_f64, fmt_ln, log_sum_exp};

/// Tolerance on `sum(Omega) == 1`.
pub const DISTRIBUTION_SUM_TOLERANCE: f64 = 1e-9;

/// LT output degree distribution: a pmf over a finite set of degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDistribution {
    name: String,
    degrees: Vec<usize>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DegreeDistribution {
    /// Validates and sorts `(degree, probability)` pairs.
    pub fn new(name: impl Into<String>, pairs: &[(usize, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(domain("degree distribution is empty"));
        }
        let mut pairs = pairs.to_vec();
        pairs.sort_by_key(|p| p.0);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Domain(format!("degree {} listed twice", w[0].0)));
            }
        }
        if let Some(&(d, p)) = pairs
            .iter()
            .find(|&&(d, p)| d == 0 || p.is_nan() || p <= 0.0 || p.is_infinite())
        {
            return Err(Error::Domain(format!(
                "invalid entry: degree {d} with probability {p}"
            )));
        }
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > DISTRIBUTION_SUM_TOLERANCE {
            return Err(Error::Domain(format!(
                "degree probabilities sum to {total}, not 1"
            )));
        }
        let mut acc = 0.0;
        let cumulative = pairs
            .iter()
            .map(|p| {
                acc += p.1;
                acc
            })
            .collect();
        Ok(DegreeDistribution {
            name: name.into(),
            degrees: pairs.iter().map(|p| p.0).collect(),
            probs: pairs.iter().map(|p| p.1).collect(),
            cumulative,
        })
    }

    /// Parses lines of `degree probability`. Blank lines and `#` comments
    /// are skipped.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(d), Some(p), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse(format!(
                    "line {}: expected `degree probability`",
                    n + 1
                )));
            };
            let d: usize = d
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: degree {d:?}: {e}", n + 1)))?;
            let p: f64 = p
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: probability {p:?}: {e}", n + 1)))?;
            pairs.push((d, p));
        }
        Self::new(name, &pairs)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(format!("file:{}", path.display()), &text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Floating-point sum of the probabilities; within tolerance of 1.
    pub fn total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    pub fn d_max(&self) -> usize {
        *self.degrees.last().expect("nonempty")
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.degrees.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn prob(&self, degree: usize) -> f64 {
        self.degrees
            .binary_search(&degree)
            .map_or(0.0, |i| self.probs[i])
    }

    /// Draws one degree.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * self.total();
        let i = self.cumulative.partition_point(|&c| c <= u);
        self.degrees[i.min(self.degrees.len() - 1)]
    }

    /// Drops degrees above `max_degree` and renormalises the rest.
    pub fn truncated(&self, max_degree: usize) -> Result<Self> {
        let kept: Vec<(usize, f64)> = self.entries().filter(|&(d, _)| d <= max_degree).collect();
        let mass: f64 = kept.iter().map(|p| p.1).sum();
        if kept.is_empty() {
            return Err(Error::Domain(format!("no degree at most {max_degree}")));
        }
        let pairs: Vec<(usize, f64)> = kept.iter().map(|&(d, p)| (d, p / mass)).collect();
        Self::new(format!("{}<={max_degree}", self.name), &pairs)
    }

    /// `degree probability` lines, readable by [`DegreeDistribution::parse`].
    pub fn to_text(&self) -> String {
        self.entries()
            .map(|(d, p)| format!("{d} {}\n", fmt_f64(p)))
            .collect()
    }
}

/// Krawtchouk polynomial `K_j(x; n, q)`, exactly.
pub fn krawtchouk(j: usize, x: usize, n: usize, field: &FieldSpec) -> BigInt {
    krawtchouk_q(j, x, n, field.q() as u64)
}

/// Signature shared by [`krawtchouk_q`] and test doubles of it.
pub type KrawtchoukFn = fn(usize, usize, usize, u64) -> BigInt;

/// `sum_{i=0}^{j} (-1)^i C(x,i) C(n-x,j-i) (q-1)^(j-i)`.
pub fn krawtchouk_q(j: usize, x: usize, n: usize, q: u64) -> BigInt {
    assert!(x <= n, "krawtchouk: x = {x} exceeds n = {n}");
    let cx = binomial_row(x as u64, j as u64);
    let cnx = binomial_row((n - x) as u64, j as u64);
    let q1 = BigUint::from(q - 1);
    let mut pow = BigUint::one();
    let mut acc = BigInt::zero();
    // walk i downward so (q-1)^(j-i) grows incrementally
    for i in (0..=j).rev() {
        let term = BigInt::from(&cx[i] * &cnx[j - i] * &pow);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
        pow *= &q1;
    }
    acc
}

/// Probability that `i` i.i.d. uniform nonzero elements of GF(q) sum to zero:
/// `(1/q) (1 + (-1)^i / (q-1)^(i-1))`.
pub fn phi(i: usize, field: &FieldSpec) -> BigRational {
    let q = BigInt::from(field.q());
    let q1 = BigInt::from(field.q() - 1);
    let sign = if i.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    // (-1)^i / (q-1)^(i-1) = (-1)^i (q-1) / (q-1)^i
    let ratio = BigRational::new(sign * &q1, num_traits::pow(q1.clone(), i));
    (BigRational::one() + ratio) / BigRational::from_integer(q)
}

/// `P(X_1 + ... + X_l = 0)` for i.i.d. uniform nonzero `X_i`, by `l - 1`
/// explicit convolutions of counting vectors over the additive group
/// `Z_2^m`.
pub fn zero_sum_by_convolution(l: usize, field: &FieldSpec) -> Result<BigRational> {
    if l == 0 {
        return Err(domain("convolution oracle needs l >= 1"));
    }
    if field.m() > 8 {
        return Err(domain("convolution oracle is limited to m <= 8"));
    }
    let q = field.q() as usize;
    // counts[w] = number of ordered tuples of nonzero elements summing to w
    let mut counts: Vec<BigUint> = (0..q).map(|w| BigUint::from((w != 0) as u32)).collect();
    for _ in 1..l {
        let mut next = vec![BigUint::zero(); q];
        for (w, slot) in next.iter_mut().enumerate() {
            for x in 1..q {
                *slot += &counts[w ^ x];
            }
        }
        counts = next;
    }
    let total = num_traits::pow(BigUint::from(q - 1), l);
    Ok(BigRational::new(
        BigInt::from(counts[0].clone()),
        BigInt::from(total),
    ))
}

/// Hypergeometric `C(l,i) C(h-l,j-i) / C(h,j)`: the chance that `i` of `j`
/// distinct uniformly chosen positions hit the support of a weight-`l` word.
/// Impossible configurations (including `j > h` or `l > h`) give zero.
pub fn theta(i: usize, l: usize, j: usize, h: usize) -> BigRational {
    if i > j || i > l || l > h || j > h || j - i > h - l {
        return BigRational::zero();
    }
    let num = binomial(l as u64, i as u64) * binomial((h - l) as u64, (j - i) as u64);
    BigRational::new(
        BigInt::from(num),
        BigInt::from(binomial(h as u64, j as u64)),
    )
}

/// Nearest-ish `f64` of an exact rational, robust to huge numerators and
/// denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    let (num, den) = (r.numer(), r.denom());
    if num.is_zero() {
        return 0.0;
    }
    let neg = num.is_negative() != den.is_negative();
    let (n, d) = (num.magnitude(), den.magnitude());
    // scale so the integer quotient carries at least 64 significant bits
    let shift = 64 + d.bits() as i64 - n.bits() as i64;
    let (quot, exp) = if shift >= 0 {
        ((n << shift as u64) / d, -shift)
    } else {
        (n / (d << (-shift) as u64), -shift)
    };
    let mag = quot.to_f64().expect("finite quotient") * 2f64.powi(exp as i32);
    if neg {
        -mag
    } else {
        mag
    }
}

fn check_pi_args(l: usize, h: usize, dist: &DegreeDistribution) -> Result<()> {
    if dist.d_max() > h {
        return Err(Error::Domain(format!(
            "maximum degree {} exceeds h = {h}",
            dist.d_max()
        )));
    }
    if l > h {
        return Err(Error::Domain(format!("weight {l} exceeds h = {h}")));
    }
    Ok(())
}

/// `pi_l` as the degree mixture of `sum_i theta(i,l,d,h) phi(i)`.
pub fn pi_l_direct(
    l: usize,
    h: usize,
    dist: &DegreeDistribution,
    field: &FieldSpec,
) -> Result<f64> {
    check_pi_args(l, h, dist)?;
    let mut acc = 0.0;
    for (d, omega) in dist.entries() {
        let mut inner = BigRational::zero();
        for i in 0..=d.min(l) {
            let t = theta(i, l, d, h);
            if !t.is_zero() {
                inner += t * phi(i, field);
            }
        }
        acc += omega * rational_to_f64(&inner);
    }
    Ok(acc / dist.total())
}

/// `pi_l = 1/q + (q-1)/q sum_j Omega_j K_j(l)/K_j(0)`.
pub fn pi_l_krawtchouk(
    l: usize,
    h: usize,
    dist: &DegreeDistribution,
    field: &FieldSpec,
) -> Result<f64> {
    pi_l_krawtchouk_with(krawtchouk_q, l, h, dist, field)
}

/// [`pi_l_krawtchouk`] with a substitute Krawtchouk evaluator, so the
/// cross-path checks can be exercised against a broken implementation.
#[doc(hidden)]
pub fn pi_l_krawtchouk_with(
    kraw: KrawtchoukFn,
    l: usize,
    h: usize,
    dist: &DegreeDistribution,
    field: &FieldSpec,
) -> Result<f64> {
    check_pi_args(l, h, dist)?;
    let q = field.q() as u64;
    let mix: f64 = dist
        .entries()
        .map(|(d, omega)| {
            let ratio = BigRational::new(kraw(d, l, h, q), kraw(d, 0, h, q));
            omega * rational_to_f64(&ratio)
        })
        .sum::<f64>()
        / dist.total();
    let qf = q as f64;
    Ok(1.0 / qf + (qf - 1.0) / qf * mix)
}

/// `pi_0..=pi_h` for one `(h, q, distribution)`, reused across overheads.
#[derive(Clone, Debug)]
pub struct PiTable {
    h: usize,
    q: u32,
    distribution: String,
    values: Vec<f64>,
    ln_values: Vec<f64>,
}

impl PiTable {
    /// Table from the Krawtchouk closed form.
    pub fn new(h: usize, dist: &DegreeDistribution, field: &FieldSpec) -> Result<Self> {
        Self::build(h, dist, field, pi_l_krawtchouk)
    }

    /// Table from the hypergeometric mixture.
    pub fn direct(h: usize, dist: &DegreeDistribution, field: &FieldSpec) -> Result<Self> {
        Self::build(h, dist, field, pi_l_direct)
    }

    fn build(
        h: usize,
        dist: &DegreeDistribution,
        field: &FieldSpec,
        pi: fn(usize, usize, &DegreeDistribution, &FieldSpec) -> Result<f64>,
    ) -> Result<Self> {
        let values = (0..=h)
            .map(|l| pi(l, h, dist, field).map(|p| p.clamp(0.0, 1.0)))
            .collect::<Result<Vec<f64>>>()?;
        let ln_values = values.iter().map(|p| p.ln()).collect();
        Ok(PiTable {
            h,
            q: field.q(),
            distribution: dist.name().to_string(),
            values,
            ln_values,
        })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn get(&self, l: usize) -> f64 {
        self.values[l]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ln(&self, l: usize) -> f64 {
        self.ln_values[l]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// `sum_l A_l pi_l^(k+delta)`.
    WeightEnumerator,
    /// The same sum divided by `q - 1`.
    ScalarClasses,
    /// The scalar-class sum with an ensemble-average enumerator.
    Ensemble,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::WeightEnumerator => "weight-enumerator",
            BoundKind::ScalarClasses => "scalar-classes",
            BoundKind::Ensemble => "ensemble",
        }
    }
}

/// Evaluates failure bounds for one `(h, q, distribution)`.
#[derive(Clone, Debug)]
pub struct BoundEvaluator {
    field: FieldSpec,
    pi: PiTable,
}

impl BoundEvaluator {
    pub fn new(h: usize, dist: &DegreeDistribution, field: &FieldSpec) -> Result<Self> {
        Ok(BoundEvaluator {
            field: field.clone(),
            pi: PiTable::new(h, dist, field)?,
        })
    }

    pub fn from_table(pi: PiTable, field: &FieldSpec) -> Result<Self> {
        if pi.q() != field.q() {
            return Err(Error::Dimension(format!(
                "pi table built for q = {}, field has q = {}",
                pi.q(),
                field.q()
            )));
        }
        Ok(BoundEvaluator {
            field: field.clone(),
            pi,
        })
    }

    pub fn pi(&self) -> &PiTable {
        &self.pi
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// `ln sum_{l>=1} A_l pi_l^(k+delta)` with `A_l` the full multiplicity
    /// (projective enumerators are scaled back up by `q - 1`).
    pub fn ln_union_sum(&self, we: &WeightEnumerator, k: usize, delta: usize) -> Result<f64> {
        if we.h() != self.pi.h() {
            return Err(Error::Dimension(format!(
                "enumerator length {} does not match h = {}",
                we.h(),
                self.pi.h()
            )));
        }
        if k == 0 {
            return Err(domain("bounds need k >= 1"));
        }
        let n = (k + delta) as f64;
        let terms: Vec<f64> = (1..=we.h())
            .map(|l| we.ln_value(l) + n * self.pi.ln(l))
            .filter(|t| *t > f64::NEG_INFINITY)
            .collect();
        let ln_sum = log_sum_exp(&terms);
        Ok(match we.kind() {
            EnumeratorKind::Projective => ln_sum + self.ln_q1(),
            _ => ln_sum,
        })
    }

    fn ln_q1(&self) -> f64 {
        ((self.field.q() - 1) as f64).ln()
    }

    pub fn ln_bound(
        &self,
        kind: BoundKind,
        we: &WeightEnumerator,
        k: usize,
        delta: usize,
    ) -> Result<f64> {
        if kind == BoundKind::Ensemble && we.kind() != EnumeratorKind::Expected {
            return Err(domain(
                "ensemble bound needs an expected enumerator; use the scalar-class bound",
            ));
        }
        let ln_sum = self.ln_union_sum(we, k, delta)?;
        Ok(match kind {
            BoundKind::WeightEnumerator => ln_sum,
            BoundKind::ScalarClasses | BoundKind::Ensemble => ln_sum - self.ln_q1(),
        })
    }

    pub fn weight_enumerator_bound(
        &self,
        we: &WeightEnumerator,
        k: usize,
        delta: usize,
    ) -> Result<f64> {
        Ok(self
            .ln_bound(BoundKind::WeightEnumerator, we, k, delta)?
            .exp())
    }

    pub fn scalar_class_bound(&self, we: &WeightEnumerator, k: usize, delta: usize) -> Result<f64> {
        Ok(self.ln_bound(BoundKind::ScalarClasses, we, k, delta)?.exp())
    }

    pub fn ensemble_bound(&self, we: &WeightEnumerator, k: usize, delta: usize) -> Result<f64> {
        Ok(self.ln_bound(BoundKind::Ensemble, we, k, delta)?.exp())
    }

    pub fn curve(
        &self,
        kind: BoundKind,
        we: &WeightEnumerator,
        k: usize,
        deltas: impl IntoIterator<Item = usize>,
    ) -> Result<BoundCurve> {
        let points = deltas
            .into_iter()
            .map(|delta| {
                let ln_raw = self.ln_bound(kind, we, k, delta)?;
                Ok(BoundPoint::new(delta, ln_raw))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundCurve {
            h: self.pi.h(),
            k,
            q: self.field.q(),
            distribution: self.pi.distribution.clone(),
            kind,
            points,
        })
    }
}

pub fn bound_weight_enumerator(
    we: &WeightEnumerator,
    k: usize,
    delta: usize,
    h: usize,
    dist: &DegreeDistribution,
    field: &FieldSpec,
) -> Result<f64> {
    BoundEvaluator::new(h, dist, field)?.weight_enumerator_bound(we, k, delta)
}

pub fn bound_scalar_classes(
    we: &WeightEnumerator,
    k: usize,
    delta: usize,
    h: usize,
    dist: &DegreeDistribution,
    field: &FieldSpec,
) -> Result<f64> {
    BoundEvaluator::new(h, dist, field)?.scalar_class_bound(we, k, delta)
}

pub fn bound_ensemble(
    expected_we: &WeightEnumerator,
    k: usize,
    delta: usize,
    h: usize,
    dist: &DegreeDistribution,
    field: &FieldSpec,
) -> Result<f64> {
    BoundEvaluator::new(h, dist, field)?.ensemble_bound(expected_we, k, delta)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundPoint {
    pub delta: usize,
    pub ln_raw: f64,
    pub raw: f64,
    pub clamped: f64,
}

impl BoundPoint {
    fn new(delta: usize, ln_raw: f64) -> Self {
        let raw = ln_raw.exp();
        BoundPoint {
            delta,
            ln_raw,
            raw,
            clamped: raw.min(1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundCurve {
    pub h: usize,
    pub k: usize,
    pub q: u32,
    pub distribution: String,
    pub kind: BoundKind,
    pub points: Vec<BoundPoint>,
}

impl BoundCurve {
    pub fn point(&self, delta: usize) -> Option<&BoundPoint> {
        self.points.iter().find(|p| p.delta == delta)
    }

    /// `delta,raw_bound,clamped_bound` rows under a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,raw_bound,clamped_bound\n");
        for p in &self.points {
            writeln!(
                out,
                "{},{},{}",
                p.delta,
                fmt_ln(p.ln_raw),
                fmt_f64(p.clamped)
            )
            .expect("writing to a String");
        }
        out
    }
}
