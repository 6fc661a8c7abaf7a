//! The witness machinery: round-by-round reconstruction of a Pareto-optimal
//! solution from limited information, certificates capturing exactly the
//! bits needed to replay a run, shift vectors, the revealed linear
//! combination matrices, and the sequential multi-call protocol.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::model::{EpsilonBox, EpsilonGrid, EvalTable, IndexTuple, Instance, Solution};
use crate::pareto::dominates_keyed;

pub use crate::linalg::{integer_rank, rank_full};

/// Dense bit matrix; rows follow an index tuple, columns follow the
/// chronological vector order of the originating run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    pub rows: usize,
    pub cols: usize,
    bits: Vec<bool>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        BitMatrix { rows, cols, bits: alloc::vec![false; rows * cols] }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<bool>]) -> Self {
        let mut m = BitMatrix::new(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, &b) in col.iter().enumerate() {
                m.set(r, c, b);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.bits[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<bool> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }
}

/// One round of a witness run.
#[derive(Debug, Clone)]
pub struct WitnessRound {
    pub t: usize,
    /// Whether the winner set `C_t` was nonempty.
    pub winners_nonempty: bool,
    /// The vector `x^(t)` constructed this round.
    pub chosen: Solution,
    /// The index appended to the tuple (absent in the final round).
    pub chosen_index: Option<usize>,
}

/// Full record of a witness run.
#[derive(Debug, Clone)]
pub struct WitnessTrace {
    /// Rounds in execution order, `t = d` down to `0`.
    pub rounds: Vec<WitnessRound>,
    /// `x^(0)` on success; `None` is the bottom sentinel.
    pub result: Option<Solution>,
    /// The tuple at termination: the input tuple plus the chosen indices.
    pub final_tuple: IndexTuple,
    pub input_len: usize,
}

impl WitnessTrace {
    /// The vectors `x^(d), ..., x^(0)` in that order.
    pub fn vectors(&self) -> Vec<Solution> {
        self.rounds.iter().map(|r| r.chosen).collect()
    }
}

fn check_tuple(inst: &Instance, tuple: &IndexTuple) -> Result<()> {
    if !tuple.pairwise_distinct() {
        return Err(Error::Precondition("index tuple must be pairwise distinct"));
    }
    if tuple.iter().any(|i| i == 0 || i > inst.n()) {
        return Err(Error::Precondition("index out of range"));
    }
    Ok(())
}

/// Runs the witness function for `x` with forbidden-index tuple `I`.
///
/// Round `t` keeps the solutions strictly better than `x` in the first `t`
/// linear objectives, picks the minimizer of objective `t + 1` (the
/// adversarial one in the first round), and records the first index where
/// that winner deviates from `x`; an empty winner set instead flips `x` at
/// the smallest fresh index. For Pareto-optimal `x` under the OK event the
/// final vector `x^(0)` is `x` itself.
pub fn witness(inst: &Instance, x: &Solution, i_tuple: &IndexTuple) -> Result<WitnessTrace> {
    check_tuple(inst, i_tuple)?;
    if x.len() != inst.n() {
        return Err(Error::Precondition("solution length mismatch"));
    }
    if i_tuple.len() > inst.n() - (inst.d() + 1) {
        return Err(Error::Precondition("tuple too long: |I| must be at most n - (d+1)"));
    }
    let table = inst.table(crate::model::DEFAULT_ENUM_CAP)?;
    let d = inst.d();
    let x_lin: Vec<f64> = (1..=d).map(|t| inst.linear_value(t, x)).collect();

    let mut tuple = i_tuple.clone();
    let mut current: Vec<usize> = (0..table.len())
        .filter(|&idx| table.solutions[idx].agrees_on(x, &tuple))
        .collect();
    let mut rounds = Vec::with_capacity(d + 1);
    let mut result = None;

    for t in (0..=d).rev() {
        let winners: Vec<usize> = current
            .iter()
            .copied()
            .filter(|&idx| (1..=t).all(|k| table.lin(idx, k) < x_lin[k - 1]))
            .collect();
        if let Some(&first) = winners.first() {
            let best = winners[1..]
                .iter()
                .copied()
                .fold(first, |best, idx| if table.obj_lt(t + 1, idx, best) { idx } else { best });
            let chosen = table.solutions[best];
            if t == 0 {
                rounds.push(WitnessRound {
                    t,
                    winners_nonempty: true,
                    chosen,
                    chosen_index: None,
                });
                result = Some(chosen);
                break;
            }
            let i_t = chosen
                .first_difference(x)
                .expect("winner is strictly better in V^1, so it differs from x");
            tuple.push(i_t);
            current.retain(|&idx| {
                table.solutions[idx].get(i_t) == x.get(i_t)
                    && table.obj_lt(t + 1, idx, best)
            });
            rounds.push(WitnessRound {
                t,
                winners_nonempty: true,
                chosen,
                chosen_index: Some(i_t),
            });
        } else {
            let i_t = tuple
                .min_missing(inst.n())
                .expect("tuple cannot exhaust [n] within d rounds");
            tuple.push(i_t);
            let chosen = x.flipped(i_t);
            current.retain(|&idx| table.solutions[idx].get(i_t) == x.get(i_t));
            rounds.push(WitnessRound {
                t,
                winners_nonempty: false,
                chosen,
                chosen_index: Some(i_t),
            });
        }
    }

    Ok(WitnessTrace { rounds, result, final_tuple: tuple, input_len: i_tuple.len() })
}

/// The `(V, I)`-certificate of a witness run: the final index tuple
/// extended by the smallest untouched index, plus the constructed vectors.
#[derive(Debug, Clone)]
pub struct Certificate {
    /// `I* = Î ∪ (i*)`, of length `|I| + d + 1`.
    pub i_star: IndexTuple,
    /// `x^(d), ..., x^(0)`, unrestricted.
    pub vectors: Vec<Solution>,
    /// Length of the input tuple `I`.
    pub input_len: usize,
}

impl Certificate {
    pub fn d(&self) -> usize {
        self.vectors.len() - 1
    }

    /// The deterministic extra index `i*`.
    pub fn i_star_index(&self) -> usize {
        self.i_star.last().expect("certificate tuple is nonempty")
    }

    /// Restriction `A*|_J` with columns `x^(d), ..., x^(0)`.
    pub fn restrict_to(&self, j: &IndexTuple) -> BitMatrix {
        let cols: Vec<Vec<bool>> = self.vectors.iter().map(|v| v.restrict(j)).collect();
        BitMatrix::from_columns(j.len(), &cols)
    }

    /// The restricted certificate matrix `A = A*|_{I*}`.
    pub fn restricted(&self) -> BitMatrix {
        self.restrict_to(&self.i_star)
    }
}

/// Runs the witness and packages its certificate.
pub fn extract_certificate(
    inst: &Instance,
    x: &Solution,
    i_tuple: &IndexTuple,
) -> Result<Certificate> {
    let trace = witness(inst, x, i_tuple)?;
    if trace.result.is_none() {
        return Err(Error::Precondition("witness hit the sentinel; certificate undefined"));
    }
    let i_star_index = trace
        .final_tuple
        .min_missing(inst.n())
        .ok_or(Error::Precondition("no free index left for i*"))?;
    let mut i_star = trace.final_tuple.clone();
    i_star.push(i_star_index);
    Ok(Certificate { i_star, vectors: trace.vectors(), input_len: trace.input_len })
}

/// The shift vector `u*(J, A)`: complement of `x` at the starred position,
/// `x` elsewhere on `J`, zero outside. `x|_J` is read off the last column
/// of `A`, so no knowledge of `x` itself is needed.
pub fn shift_vector_at(n: usize, j: &IndexTuple, a: &BitMatrix, star_pos: usize) -> Solution {
    let mut u = Solution::zeros(n);
    let last_col = a.cols - 1;
    for (row, idx) in j.iter().enumerate() {
        let xi = a.get(row, last_col);
        u.set(idx, if row == star_pos { !xi } else { xi });
    }
    u
}

/// Single-call form: the starred index is the last entry of `I*`.
pub fn shift_vector(n: usize, i_star: &IndexTuple, a: &BitMatrix) -> Solution {
    shift_vector_at(n, i_star, a, i_star.len() - 1)
}

/// Replays a witness run from certificate data alone: the index tuple `J`,
/// the restricted matrix `A = A*|_J`, the epsilon box `B = B_V(x - u)` and
/// the shift vector `u`. Returns the reconstructed solution, or `None`
/// (the sentinel) when no round-0 winner exists.
pub fn witness_reconstruct(
    inst: &Instance,
    j: &IndexTuple,
    a: &BitMatrix,
    grid: &EpsilonGrid,
    epsilon_box: &EpsilonBox,
    u: &Solution,
) -> Result<Option<Solution>> {
    check_tuple(inst, j)?;
    let d = inst.d();
    if a.rows != j.len() || a.cols != d + 1 {
        return Err(Error::DimensionMismatch { left: a.rows, right: j.len() });
    }
    if grid.dim() != d || epsilon_box.units.len() != d {
        return Err(Error::DimensionMismatch { left: grid.dim(), right: d });
    }
    let table = inst.table(crate::model::DEFAULT_ENUM_CAP)?;
    let corner = grid.corner(epsilon_box);
    let u_lin: Vec<f64> = (1..=d).map(|t| inst.linear_value(t, u)).collect();

    // match_mask bit `t` set iff the solution agrees with column `a^(t)` on J.
    let col_of_t = |t: usize| d - t;
    let match_mask: Vec<u32> = table
        .solutions
        .iter()
        .map(|z| {
            let mut mask = 0u32;
            for t in 0..=d {
                let c = col_of_t(t);
                if j.iter().enumerate().all(|(row, idx)| z.get(idx) == a.get(row, c)) {
                    mask |= 1 << t;
                }
            }
            mask
        })
        .collect();

    let mut current: Vec<usize> = (0..table.len()).filter(|&i| match_mask[i] != 0).collect();
    for t in (0..=d).rev() {
        let winners: Vec<usize> = current
            .iter()
            .copied()
            .filter(|&idx| {
                match_mask[idx] >> t & 1 == 1
                    && (1..=t).all(|k| table.lin(idx, k) - u_lin[k - 1] <= corner[k - 1])
            })
            .collect();
        if let Some(&first) = winners.first() {
            let best = winners[1..]
                .iter()
                .copied()
                .fold(first, |best, idx| if table.obj_lt(t + 1, idx, best) { idx } else { best });
            if t == 0 {
                return Ok(Some(table.solutions[best]));
            }
            let lower = (1u32 << t) - 1;
            current.retain(|&idx| match_mask[idx] & lower != 0 && table.obj_lt(t + 1, idx, best));
        } else {
            if t == 0 {
                break;
            }
            let lower = (1u32 << t) - 1;
            current.retain(|&idx| match_mask[idx] & lower != 0);
        }
    }
    Ok(None)
}

/// Shift data: the vectors `p^(t) = a^(t) - u|_J` and the revealed linear
/// combination matrices `Q_k`.
#[derive(Debug, Clone)]
pub struct ShiftData {
    pub u: Solution,
    /// `p[t]` is `p^(t)` restricted to `J`; entries in `{-1, 0, 1}`.
    pub p: Vec<Vec<i128>>,
    /// `q[k - 1]` is `Q_k`, a `|J| x d` integer matrix.
    pub q: Vec<IntMatrix>,
}

/// Builds `Q_k = [p^(d), ..., p^(k), p^(k-2) - p^(k-1), ..., p^(0) - p^(k-1)]`
/// for every `k` in `1..=d`.
pub fn build_qk(j: &IndexTuple, a: &BitMatrix, u: &Solution) -> ShiftData {
    let d = a.cols - 1;
    let rows = j.len();
    let col_of_t = |t: usize| d - t;
    let p: Vec<Vec<i128>> = (0..=d)
        .map(|t| {
            (0..rows)
                .map(|row| a.get(row, col_of_t(t)) as i128 - u.get(j.get(row)) as i128)
                .collect()
        })
        .collect();
    let mut q = Vec::with_capacity(d);
    for k in 1..=d {
        let mut cols: Vec<Vec<i128>> = Vec::with_capacity(d);
        for t in (k..=d).rev() {
            cols.push(p[t].clone());
        }
        if k >= 2 {
            for t in (0..=k - 2).rev() {
                cols.push(p[t].iter().zip(&p[k - 1]).map(|(a, b)| a - b).collect());
            }
        }
        q.push(IntMatrix::from_columns(&cols));
    }
    ShiftData { u: *u, p, q }
}

/// The block-diagonal matrix with blocks `[Q_k | p^(0)]`, whose full rank
/// certifies that the revealed combinations leave the locating combinations
/// independent.
pub fn assemble_q_prime(shift: &ShiftData) -> IntMatrix {
    let d = shift.q.len();
    let rows = shift.p[0].len();
    let mut q_prime = IntMatrix::zeros(d * rows, d * (d + 1));
    for k in 0..d {
        let mut block_cols: Vec<Vec<i128>> = (0..d).map(|c| shift.q[k].column(c)).collect();
        block_cols.push(shift.p[0].clone());
        let block = IntMatrix::from_columns(&block_cols);
        q_prime.set_block(k * rows, k * (d + 1), &block);
    }
    q_prime
}

/// Checks the square flip pattern shared by the certificate forms: entries
/// right of the diagonal repeat `y`, the diagonal carries complements
/// except for the final row, and entries below the diagonal are free.
pub fn flip_block_ok(a: &BitMatrix, row_offset: usize, col_offset: usize, y: &[bool]) -> bool {
    let m = y.len();
    for i in 0..m {
        for c in 0..m {
            let v = a.get(row_offset + i, col_offset + c);
            if c > i && v != y[i] {
                return false;
            }
            if c == i {
                let want = if i + 1 == m { y[i] } else { !y[i] };
                if v != want {
                    return false;
                }
            }
        }
    }
    true
}

/// Structural check of the restricted certificate matrix: the rows of the
/// input tuple repeat `x`, and the trailing `(d+1) x (d+1)` block has the
/// flip pattern.
pub fn certificate_pattern_ok(cert: &Certificate, x: &Solution) -> bool {
    if !cert.i_star.pairwise_distinct() {
        return false;
    }
    let a = cert.restricted();
    let prefix = cert.input_len;
    let d = cert.d();
    if a.rows != prefix + d + 1 || a.cols != d + 1 {
        return false;
    }
    for (row, idx) in cert.i_star.iter().enumerate().take(prefix) {
        for c in 0..a.cols {
            if a.get(row, c) != x.get(idx) {
                return false;
            }
        }
    }
    let y: Vec<bool> = cert.i_star.iter().skip(prefix).map(|idx| x.get(idx)).collect();
    flip_block_ok(&a, prefix, 0, &y)
}

/// Structural check of `|Q|` for `u = u*`: rows of the input tuple vanish
/// and the trailing block is unit lower triangular in absolute value.
pub fn shift_pattern_ok(shift: &ShiftData, input_len: usize) -> bool {
    let d = shift.p.len() - 1;
    let rows = shift.p[0].len();
    if rows != input_len + d + 1 {
        return false;
    }
    for t in 0..=d {
        let col = &shift.p[t];
        for (row, &v) in col.iter().enumerate() {
            if row < input_len {
                if v != 0 {
                    return false;
                }
                continue;
            }
            let i = row - input_len; // 0-based row of the block
            let c = d - t; // 0-based column in [p^(d), ..., p^(0)] order
            if c > i && v != 0 {
                return false;
            }
            if c == i && v.abs() != 1 {
                return false;
            }
        }
    }
    true
}

/// A multi-call certificate: `c` sequential witness calls with accumulated
/// forbidden tuples `I*_0 ⊆ ... ⊆ I*_c`.
#[derive(Debug, Clone)]
pub struct MultiCertificate {
    /// `I* = I*_c`, of length `c * (d + 1)`.
    pub combined: IndexTuple,
    pub calls: Vec<Certificate>,
}

impl MultiCertificate {
    pub fn c(&self) -> usize {
        self.calls.len()
    }

    pub fn d(&self) -> usize {
        self.calls[0].d()
    }

    /// `A_ell = A*_ell|_{I*}` (1-based call number).
    pub fn matrix(&self, ell: usize) -> BitMatrix {
        self.calls[ell - 1].restrict_to(&self.combined)
    }

    /// Row position of call `ell`'s starred index inside the combined tuple.
    pub fn star_pos(&self, ell: usize) -> usize {
        ell * (self.d() + 1) - 1
    }

    /// `u*(I*, A_ell)`.
    pub fn shift(&self, ell: usize, n: usize) -> Solution {
        shift_vector_at(n, &self.combined, &self.matrix(ell), self.star_pos(ell))
    }
}

/// Runs `c` coordinated witness calls: call `ell` forbids every index
/// chosen by earlier calls, so all revealed combinations stay linearly
/// independent.
pub fn witness_multi(inst: &Instance, xs: &[Solution]) -> Result<MultiCertificate> {
    let (d, n) = (inst.d(), inst.n());
    let c = xs.len();
    if c == 0 {
        return Err(Error::Precondition("need at least one solution"));
    }
    if c * (d + 1) > n - (d + 1) {
        return Err(Error::Precondition("c(d+1) must be at most n-(d+1)"));
    }
    let mut tuple = IndexTuple::empty();
    let mut calls = Vec::with_capacity(c);
    for x in xs {
        let cert = extract_certificate(inst, x, &tuple)?;
        tuple = cert.i_star.clone();
        calls.push(cert);
    }
    Ok(MultiCertificate { combined: tuple, calls })
}

/// The stacked block matrix of a multi-call certificate: per objective `k`
/// the blocks `[Q_k^(ell) | p^(ell,0)]` over all calls, assembled block
/// diagonally over `k`. Full rank is the coordination guarantee. (The
/// locating column is `p^(ell,0)`, the restriction of `x_ell - u*_ell`,
/// exactly as in the single-call block.)
pub fn multi_q_prime(mc: &MultiCertificate, n: usize) -> IntMatrix {
    let d = mc.d();
    let c = mc.c();
    let rows = mc.combined.len();
    let shifts: Vec<ShiftData> = (1..=c)
        .map(|ell| build_qk(&mc.combined, &mc.matrix(ell), &mc.shift(ell, n)))
        .collect();
    let mut q_prime = IntMatrix::zeros(d * rows, d * c * (d + 1));
    for k in 1..=d {
        let mut cols: Vec<Vec<i128>> = Vec::with_capacity(c * (d + 1));
        for shift in &shifts {
            for col in 0..d {
                cols.push(shift.q[k - 1].column(col));
            }
            cols.push(shift.p[0].clone());
        }
        let block = IntMatrix::from_columns(&cols);
        q_prime.set_block((k - 1) * rows, (k - 1) * c * (d + 1), &block);
    }
    q_prime
}

/// Keyed-dominance Pareto check for a single table entry (test support).
pub fn is_pareto_optimal(table: &EvalTable, idx: usize) -> bool {
    (0..table.len()).all(|other| other == idx || !dominates_keyed(table, other, idx))
}
