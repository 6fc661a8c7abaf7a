//! Zero-preserving witness machinery: the recursive multi-call variant that
//! tolerates deterministic zero coefficients, its certificates with call and
//! round bookkeeping, and the per-objective revealed-combination matrices.
//!
//! Instances here are in normal form: objective `k` is supported on the
//! partition class `P_k`, every variable is perturbed in exactly one
//! objective, and the OKZ event replaces the OK event.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::model::{EpsilonBox, EpsilonGrid, EvalTable, IndexTuple, Instance, Solution};
use crate::witness::{flip_block_ok, BitMatrix};

/// One round of one call.
#[derive(Debug, Clone)]
pub struct ZpRound {
    pub t: usize,
    pub winners_nonempty: bool,
    /// `x^(r,t)`, the canonically first argmin (or the trivial flip vector).
    pub chosen: Solution,
    /// Indices appended to the tuple this round, as `(objective, index)`.
    pub added: Vec<(usize, usize)>,
    /// Objectives found to agree with `x` on their class; nonempty exactly
    /// in a restart round.
    pub k_eq: Vec<usize>,
}

/// One call of the recursion, with its objective tuple `K`.
#[derive(Debug, Clone)]
pub struct ZpCall {
    pub r: usize,
    pub k_tuple: Vec<usize>,
    pub rounds: Vec<ZpRound>,
    /// Round in which this call restarted (`None` only on failure).
    pub t_r: Option<usize>,
}

/// Full record of a zero-preserving witness run.
#[derive(Debug, Clone)]
pub struct ZpTrace {
    pub calls: Vec<ZpCall>,
    /// The returned solution set; `{x}` for Pareto-optimal `x` under OKZ.
    pub result: Vec<Solution>,
    /// `r_k` per objective (1-based), the call that retired objective `k`.
    pub r_k: Vec<usize>,
    pub final_tuple: IndexTuple,
    /// Whether the recursion reached the empty-objective call.
    pub succeeded: bool,
}

impl ZpTrace {
    /// Number of calls with a nonempty objective tuple, `r*`.
    pub fn r_star(&self) -> usize {
        self.calls.len()
    }

    /// The last constructed vector `x^(r*, t_{r*})`.
    pub fn last_vector(&self) -> Option<&Solution> {
        self.calls.last().and_then(|c| c.rounds.last()).map(|r| &r.chosen)
    }

    /// True iff some restart retired only part of the objective tuple,
    /// i.e. the recursion branch beyond the terminal restart was taken.
    pub fn has_partial_restart(&self) -> bool {
        self.calls.len() > 1
    }
}

fn validate_zp(inst: &Instance, partition: &[IndexTuple]) -> Result<()> {
    if partition.len() != inst.d() || !IndexTuple::is_partition(partition, inst.n()) {
        return Err(Error::InvalidPartition);
    }
    let bound = inst.d() * (inst.d() + 1);
    if partition.iter().any(|p| p.len() <= bound) {
        return Err(Error::Precondition("every class needs |P_k| > d(d+1)"));
    }
    for t in 1..=inst.d() {
        for i in 1..=inst.n() {
            if !partition[t - 1].contains(i) && inst.coeff(t, i) != 0.0 {
                return Err(Error::Precondition("objective k must be supported on P_k"));
            }
        }
    }
    Ok(())
}

/// Winner-set argmin with the canonically-first tie rule: the adversarial
/// objective is already injective, linear ties resolve to the
/// lexicographically smallest solution.
fn argmin_canonical(table: &EvalTable, winners: &[usize], obj: usize) -> usize {
    debug_assert!(!winners.is_empty());
    if obj == table.d + 1 {
        return winners[1..]
            .iter()
            .copied()
            .fold(winners[0], |b, i| if table.adv(i).lt(&table.adv(b)) { i } else { b });
    }
    let mut best_val = table.lin(winners[0], obj);
    for &i in &winners[1..] {
        best_val = best_val.min(table.lin(i, obj));
    }
    winners
        .iter()
        .copied()
        .filter(|&i| table.lin(i, obj) == best_val)
        .min_by_key(|&i| table.solutions[i].mask())
        .expect("nonempty winner set")
}

/// Runs the zero-preserving witness recursion for `x`.
///
/// Each call considers only the objectives still in `K` plus the
/// adversarial one, restricted to solutions that agree with `x` on the
/// classes of retired objectives. A round whose winner agrees with `x` on
/// some class `P_k` retires those objectives and restarts; under OKZ and
/// Pareto-optimality the final call returns exactly `{x}`.
pub fn witness_zp(inst: &Instance, partition: &[IndexTuple], x: &Solution) -> Result<ZpTrace> {
    validate_zp(inst, partition)?;
    if x.len() != inst.n() {
        return Err(Error::Precondition("solution length mismatch"));
    }
    let d = inst.d();
    let table = inst.table(crate::model::DEFAULT_ENUM_CAP)?;
    let x_lin: Vec<f64> = (1..=d).map(|t| inst.linear_value(t, x)).collect();

    let mut k_tuple: Vec<usize> = (1..=d).collect();
    let mut tuple = IndexTuple::empty();
    let mut r_k = alloc::vec![0usize; d + 1];
    let mut calls: Vec<ZpCall> = Vec::new();
    let mut r = 1usize;

    loop {
        let d_prime = k_tuple.len();
        let mut current: Vec<usize> = (0..table.len())
            .filter(|&idx| {
                let z = &table.solutions[idx];
                z.agrees_on(x, &tuple)
                    && (1..=d)
                        .filter(|k| !k_tuple.contains(k))
                        .all(|k| z.agrees_on(x, &partition[k - 1]))
            })
            .collect();
        if d_prime == 0 {
            let result = current.iter().map(|&i| table.solutions[i]).collect();
            return Ok(ZpTrace { calls, result, r_k: r_k[1..].to_vec(), final_tuple: tuple, succeeded: true });
        }

        let mut call = ZpCall { r, k_tuple: k_tuple.clone(), rounds: Vec::new(), t_r: None };
        let mut restarted = false;
        for t in (0..=d_prime).rev() {
            let winners: Vec<usize> = current
                .iter()
                .copied()
                .filter(|&idx| {
                    (0..t).all(|pos| table.lin(idx, k_tuple[pos]) < x_lin[k_tuple[pos] - 1])
                })
                .collect();
            if !winners.is_empty() {
                let obj = if t == d_prime { d + 1 } else { k_tuple[t] };
                let chosen_idx = argmin_canonical(&table, &winners, obj);
                let chosen = table.solutions[chosen_idx];
                let k_eq: Vec<usize> = k_tuple
                    .iter()
                    .copied()
                    .filter(|&k| chosen.agrees_on(x, &partition[k - 1]))
                    .collect();
                let mut added = Vec::new();
                for &k in &k_tuple {
                    if k_eq.contains(&k) {
                        r_k[k] = r;
                    } else {
                        let i = partition[k - 1]
                            .iter()
                            .find(|&i| chosen.get(i) != x.get(i))
                            .expect("class disagreement implies a differing index");
                        tuple.push(i);
                        added.push((k, i));
                    }
                }
                if !k_eq.is_empty() {
                    call.t_r = Some(t);
                    let k_neq: Vec<usize> =
                        k_tuple.iter().copied().filter(|k| !k_eq.contains(k)).collect();
                    call.rounds.push(ZpRound {
                        t,
                        winners_nonempty: true,
                        chosen,
                        added,
                        k_eq,
                    });
                    k_tuple = k_neq;
                    r += 1;
                    restarted = true;
                    break;
                }
                current.retain(|&idx| {
                    let z = &table.solutions[idx];
                    added.iter().all(|&(_, i)| z.get(i) == x.get(i))
                        && if obj == d + 1 {
                            table.adv(idx).lt(&table.adv(chosen_idx))
                        } else {
                            table.lin(idx, obj) < table.lin(chosen_idx, obj)
                        }
                });
                call.rounds.push(ZpRound { t, winners_nonempty: true, chosen, added, k_eq });
            } else {
                let mut added = Vec::new();
                let mut chosen = *x;
                for &k in &k_tuple {
                    let i = partition[k - 1]
                        .iter()
                        .find(|&i| !tuple.contains(i))
                        .ok_or(Error::Precondition("class exhausted: |P_k| too small"))?;
                    tuple.push(i);
                    added.push((k, i));
                    chosen = chosen.flipped(i);
                }
                current.retain(|&idx| {
                    added.iter().all(|&(_, i)| table.solutions[idx].get(i) == x.get(i))
                });
                call.rounds.push(ZpRound {
                    t,
                    winners_nonempty: false,
                    chosen,
                    added,
                    k_eq: Vec::new(),
                });
            }
        }
        calls.push(call);
        if !restarted {
            return Ok(ZpTrace {
                calls,
                result: Vec::new(),
                r_k: r_k[1..].to_vec(),
                final_tuple: tuple,
                succeeded: false,
            });
        }
    }
}

/// One certificate column `a^(r,t)`.
#[derive(Debug, Clone)]
pub struct ZpColumn {
    pub r: usize,
    pub t: usize,
    /// The full constructed vector; only its restriction to `I*` is
    /// certificate data proper.
    pub full: Solution,
}

/// The zero-preserving certificate: index tuple, column matrix and the
/// call/round bookkeeping needed to replay the recursion.
#[derive(Debug, Clone)]
pub struct ZpCertificate {
    pub n: usize,
    pub d: usize,
    /// `I* = I ∪ (i*_1, ..., i*_d)`, at most `d^3 + d^2 + d` entries.
    pub i_star: IndexTuple,
    /// The appended `i*_k` per objective, `i*_k = min(P_k \ I)`.
    pub star_indices: Vec<usize>,
    /// Columns in call order, round descending within a call.
    pub columns: Vec<ZpColumn>,
    /// `r_k` per objective.
    pub r_k: Vec<usize>,
    /// `t_r` per call `1..=r*`.
    pub t_r: Vec<usize>,
    /// `d'_r` per call.
    pub d_r: Vec<usize>,
    /// The objective tuple `K` of each call.
    pub k_of_call: Vec<Vec<usize>>,
}

impl ZpCertificate {
    /// Position of column `a^(r,t)` in the storage order.
    pub fn column_position(&self, r: usize, t: usize) -> Option<usize> {
        self.columns.iter().position(|c| c.r == r && c.t == t)
    }

    /// The restricted matrix `A` with rows `I*`.
    pub fn matrix(&self) -> BitMatrix {
        let cols: Vec<Vec<bool>> =
            self.columns.iter().map(|c| c.full.restrict(&self.i_star)).collect();
        BitMatrix::from_columns(self.i_star.len(), &cols)
    }

    /// `x|_{I*}` read off the last column.
    pub fn x_restricted(&self) -> Vec<bool> {
        self.columns.last().expect("certificate has columns").full.restrict(&self.i_star)
    }
}

/// Packages the certificate of a successful run.
pub fn extract_zp_certificate(
    trace: &ZpTrace,
    partition: &[IndexTuple],
) -> Result<ZpCertificate> {
    if !trace.succeeded || trace.calls.is_empty() {
        return Err(Error::Precondition("trace did not succeed; certificate undefined"));
    }
    let d = partition.len();
    let n: usize = partition.iter().map(IndexTuple::len).sum();
    let mut i_star = trace.final_tuple.clone();
    let mut star_indices = Vec::with_capacity(d);
    for part in partition {
        let star = part
            .iter()
            .filter(|&i| !trace.final_tuple.contains(i))
            .min()
            .ok_or(Error::Precondition("no free index left in some class"))?;
        star_indices.push(star);
        i_star.push(star);
    }
    let mut columns = Vec::new();
    for call in &trace.calls {
        for round in &call.rounds {
            columns.push(ZpColumn { r: call.r, t: round.t, full: round.chosen });
        }
    }
    Ok(ZpCertificate {
        n,
        d,
        i_star,
        star_indices,
        columns,
        r_k: trace.r_k.clone(),
        t_r: trace.calls.iter().map(|c| c.t_r.expect("successful calls restart")).collect(),
        d_r: trace.calls.iter().map(|c| c.k_tuple.len()).collect(),
        k_of_call: trace.calls.iter().map(|c| c.k_tuple.clone()).collect(),
    })
}

/// Structural check: for every objective `k` the per-objective
/// submatrix (columns of calls `1..=r_k`, rows `I* ∩ P_k`) is square with
/// the flip pattern, its last column being `x` on the class.
pub fn zp_certificate_pattern_ok(cert: &ZpCertificate, partition: &[IndexTuple]) -> bool {
    let gamma = cert.d * cert.d * cert.d + cert.d * cert.d + cert.d;
    if cert.i_star.len() > gamma || !cert.i_star.pairwise_distinct() {
        return false;
    }
    let x = match cert.columns.last() {
        Some(c) => c.full,
        None => return false,
    };
    for k in 1..=cert.d {
        let rows = cert.i_star.intersect(&partition[k - 1]);
        let cols: Vec<Vec<bool>> = cert
            .columns
            .iter()
            .filter(|c| c.r <= cert.r_k[k - 1])
            .map(|c| c.full.restrict(&rows))
            .collect();
        if cols.len() != rows.len() {
            return false;
        }
        let m = BitMatrix::from_columns(rows.len(), &cols);
        let y: Vec<bool> = rows.iter().map(|i| x.get(i)).collect();
        if !flip_block_ok(&m, 0, 0, &y) {
            return false;
        }
    }
    true
}

/// The zero-preserving shift vector: complement of `x` at the starred
/// indices, `x` on the rest of `I*`, zero elsewhere. Reads `x` off the
/// certificate's last column.
pub fn zp_shift_vector(cert: &ZpCertificate) -> Solution {
    let x_bits = cert.x_restricted();
    let mut u = Solution::zeros(cert.n);
    for (row, idx) in cert.i_star.iter().enumerate() {
        let xi = x_bits[row];
        let starred = cert.star_indices.contains(&idx);
        u.set(idx, if starred { !xi } else { xi });
    }
    u
}

/// Replays a zero-preserving run from certificate data: restricted columns,
/// bookkeeping, the epsilon box `B = B_V(x - u)` and the shift vector `u`.
/// Returns the reconstructed singleton, or an empty set as the sentinel.
pub fn witness_zp_reconstruct(
    inst: &Instance,
    partition: &[IndexTuple],
    cert: &ZpCertificate,
    grid: &EpsilonGrid,
    epsilon_box: &EpsilonBox,
    u: &Solution,
) -> Result<Vec<Solution>> {
    validate_zp(inst, partition)?;
    let d = inst.d();
    if grid.dim() != d || epsilon_box.units.len() != d {
        return Err(Error::DimensionMismatch { left: grid.dim(), right: d });
    }
    if u.len() != inst.n() {
        return Err(Error::Precondition("shift vector length mismatch"));
    }
    let table = inst.table(crate::model::DEFAULT_ENUM_CAP)?;
    let corner = grid.corner(epsilon_box);
    let u_lin: Vec<f64> = (1..=d).map(|t| inst.linear_value(t, u)).collect();
    let a = cert.matrix();

    // Column-agreement bitset per solution, over the storage order.
    let col_match: Vec<u64> = table
        .solutions
        .iter()
        .map(|z| {
            let mut mask = 0u64;
            for (pos, _) in cert.columns.iter().enumerate() {
                if cert
                    .i_star
                    .iter()
                    .enumerate()
                    .all(|(row, idx)| z.get(idx) == a.get(row, pos))
                {
                    mask |= 1 << pos;
                }
            }
            mask
        })
        .collect();
    let range_mask = |r: usize, t_lo: usize, t_hi_inclusive: usize| -> u64 {
        let mut mask = 0u64;
        for t in t_lo..=t_hi_inclusive {
            if let Some(pos) = cert.column_position(r, t) {
                mask |= 1 << pos;
            }
        }
        mask
    };

    let mut in_s_prime = alloc::vec![true; table.len()];
    let mut k_tuple: Vec<usize> = (1..=d).collect();
    let mut r = 1usize;

    loop {
        let d_prime = k_tuple.len();
        if d_prime == 0 {
            return Ok((0..table.len())
                .filter(|&i| in_s_prime[i])
                .map(|i| table.solutions[i])
                .collect());
        }
        // Bookkeeping must cover this call; otherwise the certificate is
        // inconsistent and the sentinel applies.
        if r > cert.t_r.len() || cert.d_r[r - 1] != d_prime {
            return Ok(Vec::new());
        }
        let t_r = cert.t_r[r - 1];
        let entry_mask = range_mask(r, t_r, d_prime);
        let mut current: Vec<usize> = (0..table.len())
            .filter(|&i| in_s_prime[i] && col_match[i] & entry_mask != 0)
            .collect();
        let mut restarted = false;

        for t in (0..=d_prime).rev() {
            let this_col = range_mask(r, t, t);
            let winners: Vec<usize> = current
                .iter()
                .copied()
                .filter(|&idx| {
                    col_match[idx] & this_col != 0
                        && (0..t).all(|pos| {
                            let k = k_tuple[pos];
                            table.lin(idx, k) - u_lin[k - 1] <= corner[k - 1]
                        })
                })
                .collect();
            if !winners.is_empty() {
                let obj = if t == d_prime { d + 1 } else { k_tuple[t] };
                let chosen_idx = argmin_canonical(&table, &winners, obj);
                let chosen = table.solutions[chosen_idx];
                if t == t_r {
                    let k_eq: Vec<usize> =
                        k_tuple.iter().copied().filter(|&k| cert.r_k[k - 1] == r).collect();
                    if k_eq.is_empty() {
                        return Ok(Vec::new());
                    }
                    for idx in 0..table.len() {
                        if in_s_prime[idx] {
                            in_s_prime[idx] = k_eq.iter().all(|&k| {
                                table.solutions[idx].agrees_on(&chosen, &partition[k - 1])
                            });
                        }
                    }
                    k_tuple.retain(|k| !k_eq.contains(k));
                    r += 1;
                    restarted = true;
                    break;
                }
                let lower_mask = if t > t_r { range_mask(r, t_r, t - 1) } else { 0 };
                current.retain(|&idx| {
                    col_match[idx] & lower_mask != 0
                        && if obj == d + 1 {
                            table.adv(idx).lt(&table.adv(chosen_idx))
                        } else {
                            table.lin(idx, obj) < table.lin(chosen_idx, obj)
                        }
                });
            } else {
                let lower_mask = if t > t_r { range_mask(r, t_r, t - 1) } else { 0 };
                current.retain(|&idx| col_match[idx] & lower_mask != 0);
            }
        }
        if !restarted {
            return Ok(Vec::new());
        }
    }
}

/// Per-objective revealed-combination data.
#[derive(Debug, Clone)]
pub struct ZpObjectiveData {
    /// `I*_k = I* ∩ P_k` in `I*` order.
    pub rows: IndexTuple,
    /// Columns of the calls before `r_k`.
    pub p_mat: IntMatrix,
    /// Call `r_k` columns in the defining mixed form.
    pub q_mat: IntMatrix,
    /// `p^(r_k, t_{r_k})` on the class, the combination left random.
    pub p_last: Vec<i128>,
}

impl ZpObjectiveData {
    /// `[P_k | Q_k]`, the combinations that must be preserved by masking.
    pub fn mask_matrix(&self) -> IntMatrix {
        let mut cols: Vec<Vec<i128>> = (0..self.p_mat.cols).map(|c| self.p_mat.column(c)).collect();
        cols.extend((0..self.q_mat.cols).map(|c| self.q_mat.column(c)));
        IntMatrix::from_columns(&cols)
    }

    /// `[P_k | Q_k | p^(r_k, t_{r_k})]`, which must have full column rank.
    pub fn full_matrix(&self) -> IntMatrix {
        let mut cols: Vec<Vec<i128>> = (0..self.p_mat.cols).map(|c| self.p_mat.column(c)).collect();
        cols.extend((0..self.q_mat.cols).map(|c| self.q_mat.column(c)));
        cols.push(self.p_last.clone());
        IntMatrix::from_columns(&cols)
    }
}

/// Shift data for a zero-preserving certificate.
#[derive(Debug, Clone)]
pub struct ZpShiftData {
    pub u: Solution,
    pub per_objective: Vec<ZpObjectiveData>,
}

/// Builds the `P_k` and `Q_k` matrices of every objective for shift vector
/// `u`: `P_k` collects all class-restricted columns of earlier calls, `Q_k`
/// the call-`r_k` columns with the around-the-pivot differences.
pub fn build_zp_matrices(
    cert: &ZpCertificate,
    partition: &[IndexTuple],
    u: &Solution,
) -> Result<ZpShiftData> {
    let d = cert.d;
    let mut per_objective = Vec::with_capacity(d);
    for k in 1..=d {
        let rows = cert.i_star.intersect(&partition[k - 1]);
        let p_of = |r: usize, t: usize| -> Result<Vec<i128>> {
            let pos = cert
                .column_position(r, t)
                .ok_or(Error::Precondition("missing certificate column"))?;
            Ok(rows
                .iter()
                .map(|idx| cert.columns[pos].full.get(idx) as i128 - u.get(idx) as i128)
                .collect())
        };
        let r_k = cert.r_k[k - 1];
        if r_k == 0 || r_k > cert.t_r.len() {
            return Err(Error::Precondition("objective never retired"));
        }
        let mut p_cols = Vec::new();
        for r in 1..r_k {
            for t in (cert.t_r[r - 1]..=cert.d_r[r - 1]).rev() {
                p_cols.push(p_of(r, t)?);
            }
        }
        let j_k = cert.k_of_call[r_k - 1]
            .iter()
            .position(|&kk| kk == k)
            .map(|p| p + 1)
            .ok_or(Error::Precondition("objective missing from its retiring call"))?;
        let (d_r, t_r) = (cert.d_r[r_k - 1], cert.t_r[r_k - 1]);
        if t_r > j_k - 1 {
            return Err(Error::Precondition("restart round after the objective's own pivot"));
        }
        let mut q_cols = Vec::new();
        for t in (j_k..=d_r).rev() {
            q_cols.push(p_of(r_k, t)?);
        }
        if j_k >= 2 {
            let pivot = p_of(r_k, j_k - 1)?;
            for t in (t_r..=j_k - 2).rev() {
                let col = p_of(r_k, t)?;
                q_cols.push(col.iter().zip(&pivot).map(|(a, b)| a - b).collect());
            }
        }
        let p_last = p_of(r_k, t_r)?;
        per_objective.push(ZpObjectiveData {
            rows,
            p_mat: IntMatrix::from_columns(&p_cols),
            q_mat: IntMatrix::from_columns(&q_cols),
            p_last,
        });
    }
    Ok(ZpShiftData { u: *u, per_objective })
}
