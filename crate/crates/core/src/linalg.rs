//! Exact integer matrices and fraction-free rank computation.
//!
//! The witness analysis only ever needs ranks of small matrices with entries
//! in `{-1, 0, 1}`, so fraction-free Gaussian elimination (Bareiss) over
//! `i128` is exact with plenty of headroom; all arithmetic is checked and an
//! overflow is reported as an error rather than silently wrapped.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        IntMatrix { rows: r, cols: c, data }
    }

    /// Builds a matrix from column vectors.
    pub fn from_columns(cols: &[Vec<i128>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Places `block` at offset `(row, col)`.
    pub fn set_block(&mut self, row: usize, col: usize, block: &IntMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(row + i, col + j)] = block[(i, j)];
            }
        }
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl core::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Exact rank by fraction-free (Bareiss) elimination with full pivoting.
pub fn integer_rank(m: &IntMatrix) -> Result<usize> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut rank = 0usize;
    let mut prev_pivot: i128 = 1;
    while rank < rows && rank < cols {
        // Full pivot search keeps intermediate entries small.
        let mut pivot = None;
        'search: for i in rank..rows {
            for j in rank..cols {
                if a[(i, j)] != 0 {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != rank {
            for j in 0..cols {
                let t = a[(rank, j)];
                a[(rank, j)] = a[(pi, j)];
                a[(pi, j)] = t;
            }
        }
        if pj != rank {
            for i in 0..rows {
                let t = a[(i, rank)];
                a[(i, rank)] = a[(i, pj)];
                a[(i, pj)] = t;
            }
        }
        let p = a[(rank, rank)];
        for i in (rank + 1)..rows {
            for j in (rank + 1)..cols {
                let num = p
                    .checked_mul(a[(i, j)])
                    .and_then(|x| a[(i, rank)].checked_mul(a[(rank, j)]).map(|y| (x, y)))
                    .and_then(|(x, y)| x.checked_sub(y))
                    .ok_or(Error::IntegerOverflow)?;
                // Bareiss: division by the previous pivot is exact.
                a[(i, j)] = num / prev_pivot;
            }
            a[(i, rank)] = 0;
        }
        prev_pivot = p;
        rank += 1;
    }
    Ok(rank)
}

/// True iff the matrix has full rank, `min(rows, cols)`.
pub fn rank_full(m: &IntMatrix) -> Result<bool> {
    Ok(integer_rank(m)? == m.rows.min(m.cols))
}

/// An integer vector in the null space of `mᵀ` (orthogonal to every column
/// of `m`), or `None` when the columns span the full row space.
///
/// Used by the masking checks: adding a multiple of such a vector to a
/// coefficient row preserves every revealed linear combination exactly.
pub fn column_orthogonal_vector(m: &IntMatrix) -> Result<Option<Vec<i128>>> {
    // Gauss-Jordan on mᵀ x = 0, keeping rows integer via cross-multiplication.
    let n = m.rows; // unknowns
    let eqs = m.cols;
    let mut a = IntMatrix::zeros(eqs, n);
    for i in 0..eqs {
        for j in 0..n {
            a[(i, j)] = m[(j, i)];
        }
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut row = 0usize;
    for col in 0..n {
        if row == eqs {
            break;
        }
        let Some(src) = (row..eqs).find(|&i| a[(i, col)] != 0) else { continue };
        if src != row {
            for j in 0..n {
                let t = a[(row, j)];
                a[(row, j)] = a[(src, j)];
                a[(src, j)] = t;
            }
        }
        let p = a[(row, col)];
        for i in 0..eqs {
            if i == row || a[(i, col)] == 0 {
                continue;
            }
            let q = a[(i, col)];
            for j in 0..n {
                let v = p
                    .checked_mul(a[(i, j)])
                    .and_then(|x| q.checked_mul(a[(row, j)]).map(|y| (x, y)))
                    .and_then(|(x, y)| x.checked_sub(y))
                    .ok_or(Error::IntegerOverflow)?;
                a[(i, j)] = v;
            }
            reduce_row(&mut a, i);
        }
        pivots.push((row, col));
        row += 1;
    }
    let Some(free_col) = (0..n).find(|c| !pivots.iter().any(|&(_, pc)| pc == *c)) else {
        return Ok(None);
    };
    // After Jordan elimination each pivot column is nonzero only in its own
    // row, so with x[free] = lcm of the pivots every division below is exact.
    let mut t: i128 = 1;
    for &(r, pc) in &pivots {
        let p = a[(r, pc)].unsigned_abs();
        let l = (t.unsigned_abs() / gcd(t.unsigned_abs(), p))
            .checked_mul(p)
            .ok_or(Error::IntegerOverflow)?;
        t = i128::try_from(l).map_err(|_| Error::IntegerOverflow)?;
    }
    let mut x = vec![0i128; n];
    x[free_col] = t;
    for &(r, pc) in &pivots {
        let prod = a[(r, free_col)].checked_mul(t).ok_or(Error::IntegerOverflow)?;
        debug_assert_eq!(prod % a[(r, pc)], 0);
        x[pc] = -prod / a[(r, pc)];
    }
    let g = x.iter().fold(0u128, |g, &v| gcd(g, v.unsigned_abs()));
    if g > 1 {
        for v in x.iter_mut() {
            *v /= g as i128;
        }
    }
    debug_assert!((0..m.cols).all(|c| (0..m.rows).map(|r| m[(r, c)] * x[r]).sum::<i128>() == 0));
    Ok(Some(x))
}

fn reduce_row(a: &mut IntMatrix, i: usize) {
    let mut g: u128 = 0;
    for j in 0..a.cols {
        g = gcd(g, a[(i, j)].unsigned_abs());
    }
    if g > 1 {
        for j in 0..a.cols {
            a[(i, j)] /= g as i128;
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
