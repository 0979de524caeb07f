use super::FqMatrix;

/// Bit-packed GF(2) matrix, one `u64` word per 64 columns of each row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    /// Empty matrix with room reserved for `rows` rows.
    pub fn with_capacity(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        BitMatrix {
            rows: 0,
            cols,
            words,
            data: Vec::with_capacity(rows * words),
        }
    }

    /// Packs a GF(2) matrix. Entries must be 0 or 1.
    pub fn from_fq(m: &FqMatrix) -> Self {
        let mut b = Self::zeros(m.rows(), m.cols());
        for r in 0..m.rows() {
            for (c, &x) in m.row(r).iter().enumerate() {
                debug_assert!(x <= 1);
                if x != 0 {
                    b.set(r, c);
                }
            }
        }
        b
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Appends a row with ones at the given column indices.
    pub fn push_row_from_support(&mut self, support: impl IntoIterator<Item = usize>) {
        let start = self.data.len();
        self.data.resize(start + self.words, 0);
        for c in support {
            debug_assert!(c < self.cols);
            self.data[start + c / 64] |= 1 << (c % 64);
        }
        self.rows += 1;
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] |= 1 << (c % 64);
    }

    /// Rank by forward elimination on a copy.
    pub fn rank(&self) -> usize {
        self.clone().into_rank()
    }

    /// Rank by forward elimination, consuming the matrix.
    pub fn into_rank(mut self) -> usize {
        let w = self.words;
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let (word, bit) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..self.rows).find(|&r| self.data[r * w + word] & bit != 0) else {
                continue;
            };
            if p != rank {
                for i in 0..w {
                    self.data.swap(rank * w + i, p * w + i);
                }
            }
            let (head, tail) = self.data.split_at_mut((rank + 1) * w);
            let pivot = &head[rank * w..];
            for row in tail.chunks_exact_mut(w) {
                if row[word] & bit != 0 {
                    // words left of `word` are already zero in the pivot row
                    for i in word..w {
                        row[i] ^= pivot[i];
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}
