//! ML erasure decoding success/failure for a Raptor code.
//!
//! Decoding succeeds exactly when the received LT columns, together with the
//! outer code constraints, pin down the intermediate word uniquely, i.e. when
//! no nonzero codeword is annihilated by every received column.

use crate::codes::{CodeForm, OuterCode, ReceivedMatrix, SparseVec};
use crate::error::{Error, Result};
use crate::gf::{rank, BitMatrix, Element, FieldSpec, FqMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub failed: bool,
    /// Dimension of the set of codewords consistent with an all-zero
    /// observation.
    pub rank_deficit: usize,
    /// Number of inactivated intermediate symbols; inactivation path only.
    pub inactivations: Option<usize>,
}

impl DecodeOutcome {
    fn from_deficit(rank_deficit: usize, inactivations: Option<usize>) -> Self {
        DecodeOutcome {
            failed: rank_deficit > 0,
            rank_deficit,
            inactivations,
        }
    }
}

fn check_dims(code: &OuterCode, rx: &ReceivedMatrix) -> Result<()> {
    if code.h() != rx.h() {
        return Err(Error::Dimension(format!(
            "code length {} does not match received matrix with h = {}",
            code.h(),
            rx.h()
        )));
    }
    Ok(())
}

/// Failure test by plain elimination.
///
/// Generator form: rank of `G_o` times the received columns against `k`.
/// Parity form: rank of the parity checks stacked over the transposed
/// received columns against `h`.
pub fn ml_failure(code: &OuterCode, rx: &ReceivedMatrix) -> Result<DecodeOutcome> {
    check_dims(code, rx)?;
    let field = code.field();
    match code.form() {
        CodeForm::Generator(g) => {
            let product = generator_times_columns(g, rx, field);
            let r = rank(&product, field);
            Ok(DecodeOutcome::from_deficit(code.k() - r, None))
        }
        CodeForm::Parity(_) => {
            let r = stacked_rank(code.parity_rows(), rx.columns(), code.h(), field);
            Ok(DecodeOutcome::from_deficit(code.h() - r, None))
        }
    }
}

fn generator_times_columns(g: &FqMatrix, rx: &ReceivedMatrix, field: &FieldSpec) -> FqMatrix {
    let (k, m) = (g.rows(), rx.m());
    let mut out = FqMatrix::zeros(k, m);
    for (j, col) in rx.columns().iter().enumerate() {
        for r in 0..k {
            let v = col
                .iter()
                .fold(0, |acc, &(i, a)| acc ^ field.mul(a, g.get(r, i as usize)));
            out.set(r, j, v);
        }
    }
    out
}

fn stacked_rank(rows_a: &[SparseVec], rows_b: &[SparseVec], h: usize, field: &FieldSpec) -> usize {
    let rows = rows_a.iter().chain(rows_b);
    if field.is_binary() {
        let mut b = BitMatrix::with_capacity(rows_a.len() + rows_b.len(), h);
        for row in rows {
            b.push_row_from_support(row.iter().map(|&(c, _)| c as usize));
        }
        b.into_rank()
    } else {
        let mut m = FqMatrix::zeros(rows_a.len() + rows_b.len(), h);
        for (r, row) in rows.enumerate() {
            for &(c, a) in row {
                m.set(r, c as usize, a);
            }
        }
        rank(&m, field)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum VarState {
    Active,
    Resolved,
    Inactive(u32),
}

/// Failure test by inactivation decoding.
///
/// Equations are the parity checks plus one per received column, unknowns
/// the `h` intermediate symbols. Rows with a single active unknown are
/// peeled; when none remain, the active unknown present in the most rows is
/// inactivated. The leftover rows, rewritten over the inactive unknowns, are
/// solved densely. The failure flag always matches [`ml_failure`].
pub fn inactivation_failure(code: &OuterCode, rx: &ReceivedMatrix) -> Result<DecodeOutcome> {
    check_dims(code, rx)?;
    let rows: Vec<&SparseVec> = code.parity_rows().iter().chain(rx.columns()).collect();
    let (deficit, inactivations) = inactivation_rank_deficit(&rows, code.h(), code.field());
    Ok(DecodeOutcome::from_deficit(deficit, Some(inactivations)))
}

/// Returns `(h - rank, inactivation count)` for the system with the given
/// sparse rows.
fn inactivation_rank_deficit(rows: &[&SparseVec], h: usize, field: &FieldSpec) -> (usize, usize) {
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); h];
    let mut row_deg: Vec<u32> = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row.iter() {
            col_rows[c as usize].push(r as u32);
        }
        row_deg.push(row.len() as u32);
    }
    let mut state = vec![VarState::Active; h];
    let mut row_used = vec![false; rows.len()];
    let mut queue: Vec<u32> = (0..rows.len() as u32)
        .filter(|&r| row_deg[r as usize] == 1)
        .collect();
    // (variable, pivot row) in resolution order
    let mut pivots: Vec<(u32, u32)> = Vec::with_capacity(h);
    let mut inactive = 0u32;
    let mut active_left = h;

    let release = |c: usize,
                   row_used: &[bool],
                   row_deg: &mut [u32],
                   queue: &mut Vec<u32>,
                   col_rows: &[Vec<u32>]| {
        for &r in &col_rows[c] {
            if !row_used[r as usize] {
                row_deg[r as usize] -= 1;
                if row_deg[r as usize] == 1 {
                    queue.push(r);
                }
            }
        }
    };

    while active_left > 0 {
        if let Some(r) = queue.pop() {
            let ru = r as usize;
            if row_used[ru] || row_deg[ru] != 1 {
                continue;
            }
            let c = rows[ru]
                .iter()
                .map(|&(c, _)| c as usize)
                .find(|&c| state[c] == VarState::Active)
                .expect("degree-one row has an active unknown");
            row_used[ru] = true;
            state[c] = VarState::Resolved;
            pivots.push((c as u32, r));
            active_left -= 1;
            release(c, &row_used, &mut row_deg, &mut queue, &col_rows);
        } else {
            let c = (0..h)
                .filter(|&c| state[c] == VarState::Active)
                .max_by_key(|&c| (col_rows[c].len(), std::cmp::Reverse(c)))
                .expect("active unknown remains");
            state[c] = VarState::Inactive(inactive);
            inactive += 1;
            active_left -= 1;
            release(c, &row_used, &mut row_deg, &mut queue, &col_rows);
        }
    }

    let n = inactive as usize;
    if n == 0 {
        return (0, 0);
    }
    // Express each resolved unknown as a combination of the inactive ones.
    let mut value = vec![0 as Element; h * n];
    let mut acc = vec![0 as Element; n];
    for &(c, r) in &pivots {
        acc.iter_mut().for_each(|x| *x = 0);
        let mut pivot_coef = 0;
        for &(c2, a) in rows[r as usize].iter() {
            if c2 == c {
                pivot_coef = a;
                continue;
            }
            accumulate(&mut acc, &value, &state, c2 as usize, a, n, field);
        }
        let inv = field.inv(pivot_coef).expect("pivot coefficient is nonzero");
        // char 2: the pivot unknown equals the sum of the other terms
        let dst = &mut value[c as usize * n..(c as usize + 1) * n];
        dst.copy_from_slice(&acc);
        field.scale(dst, inv);
    }
    let leftover: Vec<usize> = (0..rows.len()).filter(|&r| !row_used[r]).collect();
    let mut dense = FqMatrix::zeros(leftover.len(), n);
    for (i, &r) in leftover.iter().enumerate() {
        acc.iter_mut().for_each(|x| *x = 0);
        for &(c, a) in rows[r].iter() {
            accumulate(&mut acc, &value, &state, c as usize, a, n, field);
        }
        dense.row_mut(i).copy_from_slice(&acc);
    }
    (n - rank(&dense, field), n)
}

#[inline]
fn accumulate(
    acc: &mut [Element],
    value: &[Element],
    state: &[VarState],
    c: usize,
    a: Element,
    n: usize,
    field: &FieldSpec,
) {
    match state[c] {
        VarState::Inactive(idx) => acc[idx as usize] ^= a,
        VarState::Resolved => field.axpy(acc, &value[c * n..(c + 1) * n], a),
        VarState::Active => unreachable!("all unknowns are resolved or inactive"),
    }
}
