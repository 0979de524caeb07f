//! Arithmetic in GF(2^m) and dense linear algebra over it.
//!
//! Elements are plain integers in `[0, q)` whose bits are the coefficients of
//! a polynomial over GF(2). Addition is XOR. Multiplication goes through
//! log/antilog tables for `m <= 8` and a carry-less multiply-and-reduce above.

mod bitmatrix;
mod matrix;

use std::fmt;
use std::sync::Arc;

pub use bitmatrix::BitMatrix;
pub use matrix::{nullspace_basis, rank, rank_dense, FqMatrix};

use crate::error::{Error, Result};

/// A field element. Always `< q` for the owning [`FieldSpec`].
pub type Element = u16;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 16;

/// Lexicographically least irreducible polynomial of each degree 1..=16,
/// bit `i` holding the coefficient of `x^i`.
const REDUCTION_POLYNOMIALS: [u32; 16] = [
    0x2, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b, 0x4021,
    0x8003, 0x1002b,
];

const TABLE_MAX_DEGREE: u32 = 8;

struct LogTables {
    /// `exp[i] = g^i`, stored twice over so `log a + log b` never needs a modulo.
    exp: Vec<Element>,
    log: Vec<u16>,
}

/// The field GF(2^m) together with its reduction polynomial.
#[derive(Clone)]
pub struct FieldSpec {
    m: u32,
    poly: u32,
    tables: Option<Arc<LogTables>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("m", &self.m)
            .field("q", &self.q())
            .field("poly", &format_args!("{:#x}", self.poly))
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.poly == other.poly
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    /// GF(2^m) with the tabulated reduction polynomial for `m`.
    pub fn new(m: u32) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&m) {
            return Err(Error::Domain(format!(
                "extension degree {m} outside 1..={MAX_DEGREE}"
            )));
        }
        Self::with_polynomial(m, REDUCTION_POLYNOMIALS[(m - 1) as usize])
    }

    /// GF(2) with arithmetic identical to `FieldSpec::new(1)`.
    pub fn binary() -> Self {
        Self::new(1).expect("GF(2) is always constructible")
    }

    /// GF(2^m) reduced modulo `poly`. The polynomial must have degree `m` and
    /// be irreducible over GF(2).
    pub fn with_polynomial(m: u32, poly: u32) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&m) {
            return Err(Error::Domain(format!(
                "extension degree {m} outside 1..={MAX_DEGREE}"
            )));
        }
        if poly_degree(poly) != Some(m) {
            return Err(Error::Domain(format!(
                "reduction polynomial {poly:#x} does not have degree {m}"
            )));
        }
        if !is_irreducible(poly) {
            return Err(Error::Domain(format!(
                "reduction polynomial {poly:#x} is reducible"
            )));
        }
        let mut field = FieldSpec {
            m,
            poly,
            tables: None,
        };
        if m <= TABLE_MAX_DEGREE {
            field.tables = Some(Arc::new(field.build_tables()));
        }
        Ok(field)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        1 << self.m
    }

    pub fn reduction_polynomial(&self) -> u32 {
        self.poly
    }

    pub fn is_binary(&self) -> bool {
        self.m == 1
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.q()
    }

    fn check(&self, a: u32) -> Result<Element> {
        if self.contains(a) {
            Ok(a as Element)
        } else {
            Err(Error::ElementOutOfRange {
                value: a,
                q: self.q(),
            })
        }
    }

    /// Range-checked addition.
    pub fn checked_add(&self, a: u32, b: u32) -> Result<Element> {
        Ok(self.add(self.check(a)?, self.check(b)?))
    }

    /// Range-checked multiplication.
    pub fn checked_mul(&self, a: u32, b: u32) -> Result<Element> {
        Ok(self.mul(self.check(a)?, self.check(b)?))
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        debug_assert!(self.contains(a as u32) && self.contains(b as u32));
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        debug_assert!(self.contains(a as u32) && self.contains(b as u32));
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) => t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize],
            None => self.clmul_reduce(a as u32, b as u32) as Element,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Element) -> Option<Element> {
        if a == 0 {
            return None;
        }
        match &self.tables {
            Some(t) => {
                let order = self.q() as usize - 1;
                Some(t.exp[(order - t.log[a as usize] as usize) % order])
            }
            None => Some(self.pow(a, self.q() as u64 - 2)),
        }
    }

    pub fn pow(&self, mut base: Element, mut exp: u64) -> Element {
        let mut acc: Element = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `dst[i] += c * src[i]` over the whole slice.
    #[inline]
    pub fn axpy(&self, dst: &mut [Element], src: &[Element], c: Element) {
        debug_assert_eq!(dst.len(), src.len());
        match c {
            0 => {}
            1 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= *s),
            _ => match &self.tables {
                Some(t) => {
                    let lc = t.log[c as usize] as usize;
                    for (d, &s) in dst.iter_mut().zip(src) {
                        if s != 0 {
                            *d ^= t.exp[lc + t.log[s as usize] as usize];
                        }
                    }
                }
                None => {
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d ^= self.mul(c, s);
                    }
                }
            },
        }
    }

    /// `row[i] *= c` over the whole slice.
    pub fn scale(&self, row: &mut [Element], c: Element) {
        if c == 1 {
            return;
        }
        for x in row.iter_mut() {
            *x = self.mul(*x, c);
        }
    }

    fn clmul_reduce(&self, a: u32, b: u32) -> u32 {
        let mut prod = 0u32;
        for i in 0..self.m {
            if (b >> i) & 1 == 1 {
                prod ^= a << i;
            }
        }
        for bit in (self.m..2 * self.m - 1).rev() {
            if (prod >> bit) & 1 == 1 {
                prod ^= self.poly << (bit - self.m);
            }
        }
        prod
    }

    fn build_tables(&self) -> LogTables {
        let q = self.q() as usize;
        let order = q - 1;
        let generator = (1..q as u32)
            .find(|&g| self.multiplicative_order(g) == order)
            .expect("finite field has a primitive element");
        let mut exp = vec![0 as Element; 2 * order];
        let mut log = vec![0u16; q];
        let mut x = 1u32;
        for i in 0..order {
            exp[i] = x as Element;
            exp[i + order] = x as Element;
            log[x as usize] = i as u16;
            x = self.clmul_reduce(x, generator);
        }
        LogTables { exp, log }
    }

    fn multiplicative_order(&self, g: u32) -> usize {
        let mut x = g;
        let mut n = 1;
        while x != 1 {
            x = self.clmul_reduce(x, g);
            n += 1;
        }
        n
    }
}

fn poly_degree(p: u32) -> Option<u32> {
    (p != 0).then(|| 31 - p.leading_zeros())
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b).expect("nonzero divisor");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Trial division by every polynomial of degree `1..=deg/2`.
pub fn is_irreducible(p: u32) -> bool {
    let Some(deg) = poly_degree(p) else {
        return false;
    };
    if deg == 0 {
        return false;
    }
    (2u32..(1 << (deg / 2 + 1))).all(|d| poly_rem(p, d) != 0)
}
