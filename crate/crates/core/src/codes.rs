//! Outer codes and LT received-matrix sampling.

use std::fmt::Write as _;

use crate::numeric::sha256_hex;
use rand::Rng;

use crate::bounds::DegreeDistribution;
use crate::error::{domain, Error, Result};
use crate::gf::{nullspace_basis, rank, Element, FieldSpec, FqMatrix};

/// A sparse row or column: `(index, nonzero value)` pairs.
pub type SparseVec = Vec<(u32, Element)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeForm {
    /// `k x h` generator matrix of full rank `k`.
    Generator(FqMatrix),
    /// `(h - k) x h` parity-check matrix, possibly rank-deficient.
    Parity(FqMatrix),
}

/// An `(h, k)` linear code over GF(q).
#[derive(Clone, Debug)]
pub struct OuterCode {
    h: usize,
    k: usize,
    field: FieldSpec,
    form: CodeForm,
    parity_rows: Vec<SparseVec>,
}

fn sparse_rows(m: &FqMatrix) -> Vec<SparseVec> {
    m.row_iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(c, &x)| (c as u32, x))
                .collect()
        })
        .collect()
}

impl OuterCode {
    /// Code defined by a parity-check matrix; design dimension is
    /// `cols - rows`.
    pub fn from_parity(parity: FqMatrix, field: &FieldSpec) -> Result<Self> {
        check_entries(&parity, field)?;
        if parity.rows() > parity.cols() {
            return Err(Error::Dimension(format!(
                "parity-check matrix {}x{} has more rows than columns",
                parity.rows(),
                parity.cols()
            )));
        }
        let (h, k) = (parity.cols(), parity.cols() - parity.rows());
        Ok(OuterCode {
            h,
            k,
            field: field.clone(),
            parity_rows: sparse_rows(&parity),
            form: CodeForm::Parity(parity),
        })
    }

    /// Code spanned by the rows of a full-rank generator matrix.
    pub fn from_generator(generator: FqMatrix, field: &FieldSpec) -> Result<Self> {
        check_entries(&generator, field)?;
        let (k, h) = (generator.rows(), generator.cols());
        if rank(&generator, field) != k {
            return Err(domain("generator matrix must have full row rank"));
        }
        let parity = nullspace_basis(&generator, field);
        Ok(OuterCode {
            h,
            k,
            field: field.clone(),
            parity_rows: sparse_rows(&parity),
            form: CodeForm::Generator(generator),
        })
    }

    /// No outer code: every vector of length `k` is a codeword.
    pub fn unrestricted(k: usize, field: &FieldSpec) -> Result<Self> {
        if k == 0 {
            return Err(domain("code length must be positive"));
        }
        Self::from_parity(FqMatrix::zeros(0, k), field)
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Design dimension.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn form(&self) -> &CodeForm {
        &self.form
    }

    /// Sparse rows of a parity-check matrix (derived for generator form).
    pub fn parity_rows(&self) -> &[SparseVec] {
        &self.parity_rows
    }

    /// Dimension of the code as a vector space; at least `k`.
    pub fn true_dimension(&self) -> usize {
        match &self.form {
            CodeForm::Generator(g) => g.rows(),
            CodeForm::Parity(p) => self.h - rank(p, &self.field),
        }
    }

    /// Generator form of the same code. For a rank-deficient parity-check
    /// matrix the result has `k` equal to the true dimension.
    pub fn to_generator_form(&self) -> Result<OuterCode> {
        match &self.form {
            CodeForm::Generator(_) => Ok(self.clone()),
            CodeForm::Parity(p) => {
                Self::from_generator(nullspace_basis(p, &self.field), &self.field)
            }
        }
    }

    pub fn generator(&self) -> FqMatrix {
        match &self.form {
            CodeForm::Generator(g) => g.clone(),
            CodeForm::Parity(p) => nullspace_basis(p, &self.field),
        }
    }

    /// Whether `v` satisfies every parity check.
    pub fn contains(&self, v: &[Element]) -> bool {
        v.len() == self.h
            && self.parity_rows.iter().all(|row| {
                row.iter()
                    .fold(0, |acc, &(c, a)| acc ^ self.field.mul(a, v[c as usize]))
                    == 0
            })
    }

    /// Plain-text matrix: a `h k q form` header line, then one line of
    /// space-separated entries per matrix row.
    pub fn to_text(&self) -> String {
        let (name, m) = match &self.form {
            CodeForm::Generator(g) => ("generator", g),
            CodeForm::Parity(p) => ("parity", p),
        };
        let mut out = format!("{} {} {} {}\n", self.h, self.k, self.field.q(), name);
        for r in m.row_iter() {
            let line: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).expect("writing to a String");
        }
        out
    }

    /// Parses [`OuterCode::to_text`] output. The field is GF(q) with the
    /// default reduction polynomial.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty code file".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let [h, k, q, form] = parts.as_slice() else {
            return Err(Error::Parse(format!("bad header {header:?}")));
        };
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad header field {s:?}: {e}")))
        };
        let (h, k, q) = (num(h)?, num(k)?, num(q)?);
        if !q.is_power_of_two() || q < 2 {
            return Err(Error::Parse(format!("q = {q} is not a power of two")));
        }
        let field = FieldSpec::new(q.trailing_zeros())?;
        let mut rows = Vec::new();
        for line in lines {
            let row = line
                .split_whitespace()
                .map(|x| {
                    x.parse::<Element>()
                        .map_err(|e| Error::Parse(format!("bad entry {x:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let expected_rows = match *form {
            "parity" => h - k,
            "generator" => k,
            other => return Err(Error::Parse(format!("unknown form {other:?}"))),
        };
        if rows.len() != expected_rows {
            return Err(Error::Parse(format!(
                "expected {expected_rows} matrix rows, found {}",
                rows.len()
            )));
        }
        let m = if rows.is_empty() {
            FqMatrix::zeros(0, h)
        } else {
            FqMatrix::from_rows(&rows, &field)?
        };
        if m.cols() != h {
            return Err(Error::Parse(format!(
                "rows have {} entries, expected {h}",
                m.cols()
            )));
        }
        match *form {
            "parity" => Self::from_parity(m, &field),
            _ => Self::from_generator(m, &field),
        }
    }

    /// Hex SHA-256 of [`OuterCode::to_text`].
    pub fn digest(&self) -> String {
        sha256_hex(self.to_text().as_bytes())
    }
}

fn check_entries(m: &FqMatrix, field: &FieldSpec) -> Result<()> {
    match m.entries().iter().find(|&&x| !field.contains(x as u32)) {
        Some(&bad) => Err(Error::ElementOutOfRange {
            value: bad as u32,
            q: field.q(),
        }),
        None => Ok(()),
    }
}

/// Binary Hamming code of length `2^t - 1`. The parity-check matrix lists
/// the nonzero `t`-bit numbers in ascending order as columns, most
/// significant bit in the top row.
pub fn build_hamming(t: u32) -> Result<OuterCode> {
    if !(2..=10).contains(&t) {
        return Err(Error::Domain(format!(
            "Hamming parameter t = {t} outside 2..=10"
        )));
    }
    let h = (1usize << t) - 1;
    let mut p = FqMatrix::zeros(t as usize, h);
    for col in 0..h {
        let value = col + 1;
        for row in 0..t as usize {
            p.set(row, col, ((value >> (t as usize - 1 - row)) & 1) as Element);
        }
    }
    OuterCode::from_parity(p, &FieldSpec::binary())
}

/// Parity-check code with `(h - k) * h` i.i.d. uniform entries over GF(q).
pub fn sample_uniform_parity_code<R: Rng + ?Sized>(
    h: usize,
    k: usize,
    field: &FieldSpec,
    rng: &mut R,
) -> Result<OuterCode> {
    if !(0 < k && k < h) {
        return Err(Error::Domain(format!(
            "ensemble needs 0 < k < h, got h = {h}, k = {k}"
        )));
    }
    let q = field.q();
    let data = (0..(h - k) * h)
        .map(|_| rng.random_range(0..q) as Element)
        .collect();
    OuterCode::from_parity(FqMatrix::new(h - k, h, data, field)?, field)
}

/// Columns of the LT generator matrix seen by the receiver, stored sparse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceivedMatrix {
    h: usize,
    columns: Vec<SparseVec>,
}

impl ReceivedMatrix {
    pub fn new(h: usize, columns: Vec<SparseVec>, field: &FieldSpec) -> Result<Self> {
        for col in &columns {
            let mut seen = std::collections::HashSet::new();
            for &(i, v) in col {
                if i as usize >= h || !seen.insert(i) {
                    return Err(Error::Dimension(format!(
                        "column index {i} repeated or outside 0..{h}"
                    )));
                }
                if v == 0 || !field.contains(v as u32) {
                    return Err(Error::ElementOutOfRange {
                        value: v as u32,
                        q: field.q(),
                    });
                }
            }
        }
        Ok(ReceivedMatrix { h, columns })
    }

    pub fn empty(h: usize) -> Self {
        ReceivedMatrix {
            h,
            columns: Vec::new(),
        }
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Number of received symbols.
    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.columns.iter().map(Vec::len).collect()
    }

    pub fn push_column(&mut self, col: SparseVec) {
        debug_assert!(col.iter().all(|&(i, v)| (i as usize) < self.h && v != 0));
        self.columns.push(col);
    }

    /// Dense `h x m` matrix.
    pub fn to_matrix(&self) -> FqMatrix {
        let mut m = FqMatrix::zeros(self.h, self.columns.len());
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                m.set(i as usize, j, v);
            }
        }
        m
    }
}

/// Draws `m` i.i.d. LT columns: degree from `dist`, support by partial
/// Fisher-Yates over `0..h`, values uniform over the nonzero elements.
pub fn sample_received_matrix<R: Rng + ?Sized>(
    h: usize,
    m: usize,
    dist: &DegreeDistribution,
    field: &FieldSpec,
    rng: &mut R,
) -> Result<ReceivedMatrix> {
    if dist.d_max() > h {
        return Err(Error::Domain(format!(
            "maximum degree {} exceeds h = {h}",
            dist.d_max()
        )));
    }
    let mut scratch: Vec<u32> = (0..h as u32).collect();
    let q = field.q();
    let columns = (0..m)
        .map(|_| {
            let d = dist.sample(rng);
            (0..d)
                .map(|i| {
                    let j = rng.random_range(i..h);
                    scratch.swap(i, j);
                    let v = if q == 2 {
                        1
                    } else {
                        rng.random_range(1..q) as Element
                    };
                    (scratch[i], v)
                })
                .collect()
        })
        .collect();
    Ok(ReceivedMatrix { h, columns })
}

/// LT degree distribution of the standard R10 Raptor code.
pub fn r10_distribution() -> DegreeDistribution {
    DegreeDistribution::new(
        "r10",
        &[
            (1, 0.0098),
            (2, 0.4590),
            (3, 0.2110),
            (4, 0.1134),
            (10, 0.1113),
            (11, 0.0799),
            (40, 0.0156),
        ],
    )
    .expect("R10 distribution is valid")
}

/// Weight distribution of a code by enumerating all `q^dim` codewords from a
/// basis. Intended for small codes only.
pub fn enumerate_codeword_weights(code: &OuterCode) -> Result<Vec<u64>> {
    let field = code.field();
    let basis = code.generator();
    let (dim, h, q) = (basis.rows(), code.h(), field.q() as u64);
    let total = q
        .checked_pow(dim as u32)
        .filter(|&n| n <= 1 << 24)
        .ok_or_else(|| domain("too many codewords to enumerate"))?;
    let mut counts = vec![0u64; h + 1];
    let mut word = vec![0 as Element; h];
    for idx in 0..total {
        word.iter_mut().for_each(|x| *x = 0);
        let mut rest = idx;
        for r in 0..dim {
            let c = (rest % q) as Element;
            rest /= q;
            field.axpy(&mut word, basis.row(r), c);
        }
        counts[word.iter().filter(|&&x| x != 0).count()] += 1;
    }
    Ok(counts)
}
