use super::{BitMatrix, Element, FieldSpec};
use crate::error::{Error, Result};

/// Dense row-major matrix over GF(2^m).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Element>,
}

impl FqMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FqMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major entries, checking shape and range.
    pub fn new(rows: usize, cols: usize, data: Vec<Element>, field: &FieldSpec) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&x| !field.contains(x as u32)) {
            return Err(Error::ElementOutOfRange {
                value: bad as u32,
                q: field.q(),
            });
        }
        Ok(FqMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Element>], field: &FieldSpec) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "ragged rows: expected {cols} columns, found {}",
                r.len()
            )));
        }
        Self::new(rows.len(), cols, rows.concat(), field)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<Element>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        FqMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Element] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Element {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Element) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Element] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [Element] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Element]> {
        // chunks_exact panics on zero chunk size
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn transpose(&self) -> FqMatrix {
        let mut t = FqMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, rhs: &FqMatrix, field: &FieldSpec) -> Result<FqMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = FqMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a != 0 {
                    let (dst, src) = (r * rhs.cols, k * rhs.cols);
                    field.axpy(
                        &mut out.data[dst..dst + rhs.cols],
                        &rhs.data[src..src + rhs.cols],
                        a,
                    );
                }
            }
        }
        Ok(out)
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &FqMatrix) -> Result<FqMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot stack {} columns on {}",
                other.cols, self.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FqMatrix::from_raw(self.rows + other.rows, self.cols, data))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// `row[dst] += c * row[src]`.
    pub fn add_scaled_row(&mut self, dst: usize, src: usize, c: Element, field: &FieldSpec) {
        assert_ne!(dst, src);
        let cols = self.cols;
        let (lo, hi) = self.data.split_at_mut(dst.max(src) * cols);
        let (d, s) = if dst < src {
            (&mut lo[dst * cols..(dst + 1) * cols], &hi[..cols])
        } else {
            (&mut hi[..cols], &lo[src * cols..(src + 1) * cols])
        };
        field.axpy(d, s, c);
    }

    /// Reduces in place to reduced row echelon form and returns the pivot
    /// columns. Pivots are the first nonzero entry found scanning down each
    /// column.
    pub fn row_reduce(&mut self, field: &FieldSpec) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(next, p);
            let inv = field.inv(self.get(next, col)).expect("pivot is nonzero");
            field.scale(self.row_mut(next), inv);
            for r in 0..self.rows {
                if r != next {
                    let c = self.get(r, col);
                    if c != 0 {
                        self.add_scaled_row(r, next, c, field);
                    }
                }
            }
            pivots.push(col);
            next += 1;
        }
        pivots
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }
}

/// Rank over GF(q). Binary matrices go through the bit-packed path.
pub fn rank(m: &FqMatrix, field: &FieldSpec) -> usize {
    if field.is_binary() {
        BitMatrix::from_fq(m).rank()
    } else {
        rank_dense(m, field)
    }
}

/// Rank by forward elimination on a dense copy, for any field size.
pub fn rank_dense(m: &FqMatrix, field: &FieldSpec) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a.get(r, col) != 0) else {
            continue;
        };
        a.swap_rows(rank, p);
        let inv = field.inv(a.get(rank, col)).expect("pivot is nonzero");
        for r in rank + 1..rows {
            let c = a.get(r, col);
            if c != 0 {
                a.add_scaled_row(r, rank, field.mul(c, inv), field);
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of `{v : M v^T = 0}` as the rows of a `(h - rank) x h` matrix.
pub fn nullspace_basis(m: &FqMatrix, field: &FieldSpec) -> FqMatrix {
    let h = m.cols;
    let mut r = m.clone();
    let pivots = r.row_reduce(field);
    let mut is_pivot = vec![false; h];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..h).filter(|&c| !is_pivot[c]).collect();
    let mut basis = FqMatrix::zeros(free.len(), h);
    for (b, &fc) in free.iter().enumerate() {
        basis.set(b, fc, 1);
        // char 2: -x = x
        for (row, &pc) in pivots.iter().enumerate() {
            basis.set(b, pc, r.get(row, fc));
        }
    }
    basis
}
