//! Pareto-set enumeration: the definitional brute-force oracle, the
//! Nemhauser-Ullmann sequential list algorithm for the bicriteria knapsack
//! view, and front counting over raw objective vectors.
//!
//! All engines break exact adversarial-value ties by lexicographic solution
//! order, making the adversarial objective injective; they must agree bit
//! for bit on common inputs.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{
    AdvKey, EvalTable, Instance, ObjectiveVector, Solution, DEFAULT_ENUM_CAP,
};

/// The Pareto set of an instance: members in canonical enumeration order.
#[derive(Debug, Clone)]
pub struct ParetoSet {
    pub members: Vec<ParetoMember>,
}

#[derive(Debug, Clone)]
pub struct ParetoMember {
    /// Enumeration position in the feasible set.
    pub index: usize,
    pub solution: Solution,
    pub objectives: ObjectiveVector,
}

impl ParetoSet {
    /// `PO(V)`, the Pareto-set cardinality.
    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn solutions(&self) -> impl Iterator<Item = &Solution> {
        self.members.iter().map(|m| &m.solution)
    }

    pub fn contains_solution(&self, x: &Solution) -> bool {
        self.members.iter().any(|m| m.solution == *x)
    }
}

/// Keyed dominance between table entries: weak in all linear coordinates
/// and in the tie-broken adversarial key, strict somewhere.
#[inline]
pub(crate) fn dominates_keyed(table: &EvalTable, a: usize, b: usize) -> bool {
    let mut strict = false;
    for t in 1..=table.d {
        let (la, lb) = (table.lin(a, t), table.lin(b, t));
        if la > lb {
            return false;
        }
        if la < lb {
            strict = true;
        }
    }
    match table.adv(a).cmp(&table.adv(b)) {
        core::cmp::Ordering::Greater => false,
        core::cmp::Ordering::Less => true,
        core::cmp::Ordering::Equal => strict,
    }
}

fn front_indices(table: &EvalTable, candidates: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut front: Vec<usize> = Vec::new();
    for idx in candidates {
        if front.iter().any(|&f| dominates_keyed(table, f, idx)) {
            continue;
        }
        front.retain(|&f| !dominates_keyed(table, idx, f));
        front.push(idx);
    }
    front.sort_unstable();
    front
}

fn collect(table: &EvalTable, indices: Vec<usize>) -> ParetoSet {
    let members = indices
        .into_iter()
        .map(|index| ParetoMember {
            index,
            solution: table.solutions[index],
            objectives: ObjectiveVector {
                linear: table.linear_row(index).to_vec(),
                adversarial: table.adv(index).value,
            },
        })
        .collect();
    ParetoSet { members }
}

/// Definitional oracle: keeps exactly the non-dominated solutions.
pub fn pareto_bruteforce(inst: &Instance) -> Result<ParetoSet> {
    pareto_bruteforce_capped(inst, DEFAULT_ENUM_CAP)
}

pub fn pareto_bruteforce_capped(inst: &Instance, cap: u128) -> Result<ParetoSet> {
    let table = inst.table(cap)?;
    let front = front_indices(&table, 0..table.len());
    Ok(collect(&table, front))
}

/// Brute force over `chunks` contiguous blocks with an ordered merge. The
/// result is independent of the chunk count, so blocks may be evaluated by
/// any number of workers.
pub fn pareto_bruteforce_chunked(inst: &Instance, chunks: usize) -> Result<ParetoSet> {
    let table = inst.table(DEFAULT_ENUM_CAP)?;
    let len = table.len();
    let chunks = chunks.max(1).min(len.max(1));
    let per = len.div_ceil(chunks);
    let mut merged: Vec<usize> = Vec::new();
    for c in 0..chunks {
        let lo = c * per;
        let hi = ((c + 1) * per).min(len);
        if lo >= hi {
            continue;
        }
        merged.extend(front_indices(&table, lo..hi));
    }
    // Local fronts arrive in index order, so the second pass is again a
    // deterministic scan.
    let front = front_indices(&table, merged.into_iter());
    Ok(collect(&table, front))
}

/// One Nemhauser-Ullmann list entry. The weight and the negated profit are
/// accumulated in ascending item order, exactly mirroring the instance
/// evaluation fold (including signed zeros), so set equality against the
/// brute-force engine is bit-exact.
#[derive(Debug, Clone, Copy)]
struct NuEntry {
    weight: f64,
    neg_profit: f64,
    subset: Solution,
}

impl NuEntry {
    #[inline]
    fn key(&self) -> AdvKey {
        AdvKey { value: self.neg_profit, lex: self.subset.mask() }
    }
}

/// Sequential Pareto-list algorithm for one weight objective (minimized)
/// and one profit objective (maximized): extends the front one item at a
/// time, `P_{i+1} = filter(P_i ∪ (P_i + item_{i+1}))`. No capacity is
/// involved. Ties in weight keep the higher profit, then the
/// lexicographically smaller subset.
pub fn nemhauser_ullmann(weights: &[f64], profits: &[f64]) -> Result<ParetoSet> {
    let n = weights.len();
    if n == 0 || n > 127 {
        return Err(Error::InvalidParameter("item count out of range"));
    }
    if profits.len() != n {
        return Err(Error::DimensionMismatch { left: n, right: profits.len() });
    }
    let mut front =
        alloc::vec![NuEntry { weight: 0.0, neg_profit: 0.0, subset: Solution::zeros(n) }];
    for i in 1..=n {
        let mut candidates: Vec<NuEntry> = Vec::with_capacity(front.len() * 2);
        candidates.extend_from_slice(&front);
        candidates.extend(front.iter().map(|e| {
            let mut subset = e.subset;
            subset.set(i, true);
            NuEntry {
                weight: e.weight + weights[i - 1],
                neg_profit: e.neg_profit + -profits[i - 1],
                subset,
            }
        }));
        // Sort by (weight, key); rounding can collapse value gaps, so the
        // extended list is not assumed pre-sorted.
        candidates.sort_by(|a, b| {
            a.weight
                .partial_cmp(&b.weight)
                .expect("NaN weight")
                .then_with(|| a.key().cmp(&b.key()))
        });
        front.clear();
        let mut best: Option<AdvKey> = None;
        for e in candidates {
            let key = e.key();
            if best.as_ref().is_none_or(|b| key.lt(b)) {
                front.push(e);
                best = Some(key);
            }
        }
    }
    // Canonical order: lexicographic over subsets.
    front.sort_by_key(|e| e.subset.mask());
    let members = front
        .into_iter()
        .map(|e| ParetoMember {
            index: e.subset.mask() as usize,
            solution: e.subset,
            objectives: ObjectiveVector {
                linear: alloc::vec![e.weight],
                adversarial: e.neg_profit,
            },
        })
        .collect();
    Ok(ParetoSet { members })
}

/// Engine selection for [`pareto_count`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Bruteforce,
    NemhauserUllmann,
    Auto,
}

fn nu_view(inst: &Instance) -> Option<(Vec<f64>, Vec<f64>)> {
    use crate::model::Adversarial;
    use crate::sets::SolutionSet;
    if inst.d() != 1 || !matches!(inst.set(), SolutionSet::Hypercube { .. }) {
        return None;
    }
    let Adversarial::Linear(adv) = inst.adversarial() else { return None };
    let weights = inst.coefficients().to_vec();
    let profits = adv.iter().map(|w| -w).collect();
    Some((weights, profits))
}

/// `PO(V)` via the selected engine. `Auto` picks Nemhauser-Ullmann for
/// bicriteria hypercube instances with a linear adversarial objective and
/// brute force otherwise.
pub fn pareto_count(inst: &Instance, engine: Engine) -> Result<u64> {
    match engine {
        Engine::Bruteforce => Ok(pareto_bruteforce(inst)?.count() as u64),
        Engine::NemhauserUllmann => {
            let (weights, profits) = nu_view(inst).ok_or(Error::EngineMismatch)?;
            Ok(nemhauser_ullmann(&weights, &profits)?.count() as u64)
        }
        Engine::Auto => match nu_view(inst) {
            Some((weights, profits)) => Ok(nemhauser_ullmann(&weights, &profits)?.count() as u64),
            None => Ok(pareto_bruteforce(inst)?.count() as u64),
        },
    }
}

/// Indices of the distinct non-dominated vectors among `points` (all
/// coordinates minimized). Exact duplicates collapse onto their first
/// occurrence; used for path-trading fronts where interchangeable paths
/// share a cost vector.
pub fn distinct_pareto_vectors(points: &[Vec<f64>]) -> Vec<usize> {
    let dominates = |a: &[f64], b: &[f64]| -> bool {
        let mut strict = false;
        for (x, y) in a.iter().zip(b) {
            if x > y {
                return false;
            }
            if x < y {
                strict = true;
            }
        }
        strict
    };
    let mut front: Vec<usize> = Vec::new();
    'outer: for (idx, p) in points.iter().enumerate() {
        for &f in &front {
            if points[f] == *p || dominates(&points[f], p) {
                continue 'outer;
            }
        }
        front.retain(|&f| !dominates(p, &points[f]));
        front.push(idx);
    }
    front.sort_unstable();
    front
}

/// Test support: verifies both Pareto-set invariants against the keyed
/// dominance order.
pub fn verify_front(inst: &Instance, set: &ParetoSet) -> Result<bool> {
    let table = inst.table(DEFAULT_ENUM_CAP)?;
    let member_ids: Vec<usize> = set.members.iter().map(|m| m.index).collect();
    for &a in &member_ids {
        for &b in &member_ids {
            if a != b && dominates_keyed(&table, a, b) {
                return Ok(false);
            }
        }
    }
    for idx in 0..table.len() {
        if member_ids.contains(&idx) {
            continue;
        }
        if !member_ids.iter().any(|&m| dominates_keyed(&table, m, idx)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Adversarial;
    use crate::sets::SolutionSet;
    use alloc::vec;

    #[test]
    fn singleton_set_is_its_own_front() {
        let set = SolutionSet::explicit(vec![Solution::from_bits(&[true, false])]).unwrap();
        let inst =
            Instance::new(set, 1, vec![0.5, 0.25], Adversarial::Explicit(vec![1.0])).unwrap();
        let front = pareto_bruteforce(&inst).unwrap();
        assert_eq!(front.count(), 1);
    }

    #[test]
    fn two_incomparable_solutions() {
        let set = SolutionSet::explicit(vec![
            Solution::from_bits(&[true, false]),
            Solution::from_bits(&[false, true]),
        ])
        .unwrap();
        let inst =
            Instance::new(set, 1, vec![0.25, 0.5], Adversarial::Explicit(vec![5.0, 1.0]))
                .unwrap();
        let front = pareto_bruteforce(&inst).unwrap();
        assert_eq!(front.count(), 2);
        assert!(verify_front(&inst, &front).unwrap());
    }

    #[test]
    fn nu_single_item() {
        let front = nemhauser_ullmann(&[1.0], &[1.0]).unwrap();
        assert_eq!(front.count(), 2, "empty set and the single item");
    }

    #[test]
    fn nu_zero_profit_item_never_enters_alone() {
        let front = nemhauser_ullmann(&[0.5], &[0.0]).unwrap();
        // The empty set weakly dominates {1} in profit and strictly in
        // weight, so only the empty set survives.
        assert_eq!(front.count(), 1);
        assert_eq!(front.members[0].solution, Solution::zeros(1));
    }

    #[test]
    fn front_count_is_at_least_one_and_at_most_size() {
        let set = SolutionSet::hypercube(4);
        let inst = Instance::new(
            set,
            2,
            vec![0.5, -0.25, 0.125, 0.375, 0.0625, -0.5, 0.75, 0.2],
            Adversarial::Linear(vec![0.1, -0.2, 0.4, 0.05]),
        )
        .unwrap();
        let count = pareto_count(&inst, Engine::Bruteforce).unwrap();
        assert!(count >= 1 && count <= 16);
    }

    #[test]
    fn chunked_front_is_chunk_count_independent() {
        let set = SolutionSet::hypercube(6);
        let coeffs: Vec<f64> = (0..12).map(|i| ((i * 37 % 19) as f64 - 9.0) / 10.0).collect();
        let adv: Vec<f64> = (0..6).map(|i| ((i * 13 % 7) as f64 - 3.0) / 8.0).collect();
        let inst = Instance::new(set, 2, coeffs, Adversarial::Linear(adv)).unwrap();
        let reference = pareto_bruteforce(&inst).unwrap();
        for chunks in [1usize, 2, 3, 7, 64] {
            let chunked = pareto_bruteforce_chunked(&inst, chunks).unwrap();
            let a: Vec<usize> = reference.members.iter().map(|m| m.index).collect();
            let b: Vec<usize> = chunked.members.iter().map(|m| m.index).collect();
            assert_eq!(a, b, "chunks = {chunks}");
        }
    }

    #[test]
    fn engine_mismatch_is_an_error() {
        let set = SolutionSet::hypercube(4);
        let inst = Instance::new(
            set,
            2,
            vec![0.5, -0.25, 0.125, 0.375, 0.0625, -0.5, 0.75, 0.2],
            Adversarial::Linear(vec![0.1, -0.2, 0.4, 0.05]),
        )
        .unwrap();
        assert_eq!(
            pareto_count(&inst, Engine::NemhauserUllmann).unwrap_err(),
            Error::EngineMismatch
        );
    }

    #[test]
    fn distinct_vector_front_collapses_duplicates() {
        let points = vec![
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![0.5, 2.0],
            vec![2.0, 2.0],
        ];
        assert_eq!(distinct_pareto_vectors(&points), vec![0, 2]);
    }
}
