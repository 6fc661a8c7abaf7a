//! Instance model: solutions, objective vectors, dominance, epsilon boxes
//! and the OK/OKZ realization events.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sets::SolutionSet;

/// Default enumeration cap shared by the brute-force layers.
pub const DEFAULT_ENUM_CAP: u128 = 1 << 20;

/// A binary solution vector of fixed length `n`.
///
/// Component 1 is the most significant stored bit, so for equal lengths the
/// numeric order of `bits` is exactly the lexicographic order with index 1
/// most significant. Supports up to 128 components, enough for the `d*n`
/// blow-up of the zero-preserving normal form at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution {
    len: u16,
    bits: u128,
}

impl Solution {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= 128, "solution length above 128");
        Solution { len: len as u16, bits: 0 }
    }

    /// Builds a solution from a mask whose bit `len - i` holds component `i`.
    pub fn from_mask(mask: u128, len: usize) -> Self {
        assert!(len <= 128);
        debug_assert!(len == 128 || mask >> len == 0);
        Solution { len: len as u16, bits: mask }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = Solution::zeros(bits.len());
        for (pos, &b) in bits.iter().enumerate() {
            if b {
                s.set(pos + 1, true);
            }
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn mask(&self) -> u128 {
        self.bits
    }

    /// Component `i`, 1-based.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i >= 1 && i <= self.len());
        self.bits >> (self.len() - i) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i >= 1 && i <= self.len());
        let bit = 1u128 << (self.len() - i);
        if value {
            self.bits |= bit;
        } else {
            self.bits &= !bit;
        }
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut s = *self;
        s.set(i, !s.get(i));
        s
    }

    /// True iff `self` and `other` agree on every index in `tuple`.
    pub fn agrees_on(&self, other: &Solution, tuple: &IndexTuple) -> bool {
        tuple.iter().all(|i| self.get(i) == other.get(i))
    }

    /// First index (1-based) where the two solutions differ.
    pub fn first_difference(&self, other: &Solution) -> Option<usize> {
        (1..=self.len()).find(|&i| self.get(i) != other.get(i))
    }

    /// Restriction `self|_tuple` as a bit vector in tuple order.
    pub fn restrict(&self, tuple: &IndexTuple) -> Vec<bool> {
        tuple.iter().map(|i| self.get(i)).collect()
    }
}

impl core::fmt::Display for Solution {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for i in 1..=self.len() {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// An ordered tuple of pairwise-used indices from `[n]` (1-based).
///
/// Tuples rather than sets: the order in which indices were chosen matters
/// for certificates, and the union below is concatenation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexTuple(Vec<usize>);

impl IndexTuple {
    pub fn empty() -> Self {
        IndexTuple(Vec::new())
    }

    pub fn new(indices: &[usize]) -> Self {
        IndexTuple(indices.to_vec())
    }

    /// The tuple `[n] = (1, ..., n)`.
    pub fn full(n: usize) -> Self {
        IndexTuple((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn push(&mut self, i: usize) {
        self.0.push(i);
    }

    /// Concatenation, the tuple union.
    pub fn union(&self, other: &IndexTuple) -> IndexTuple {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        IndexTuple(v)
    }

    /// Elements of `self` that do not occur in `other`, keeping order.
    pub fn setminus(&self, other: &IndexTuple) -> IndexTuple {
        IndexTuple(self.0.iter().copied().filter(|i| !other.contains(*i)).collect())
    }

    /// Elements of `self` that also occur in `other`, keeping order.
    pub fn intersect(&self, other: &IndexTuple) -> IndexTuple {
        IndexTuple(self.0.iter().copied().filter(|i| other.contains(*i)).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, pos: usize) -> usize {
        self.0[pos]
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn pairwise_distinct(&self) -> bool {
        for (p, i) in self.0.iter().enumerate() {
            if self.0[p + 1..].contains(i) {
                return false;
            }
        }
        true
    }

    /// Smallest element of `(1..=n)` not contained in the tuple.
    pub fn min_missing(&self, n: usize) -> Option<usize> {
        (1..=n).find(|i| !self.contains(*i))
    }

    /// True iff the tuples are disjoint and together cover `[n]` exactly.
    pub fn is_partition(parts: &[IndexTuple], n: usize) -> bool {
        let mut seen = alloc::vec![false; n + 1];
        let mut count = 0usize;
        for part in parts {
            for i in part.iter() {
                if i == 0 || i > n || seen[i] {
                    return false;
                }
                seen[i] = true;
                count += 1;
            }
        }
        count == n
    }
}

impl From<Vec<usize>> for IndexTuple {
    fn from(v: Vec<usize>) -> Self {
        IndexTuple(v)
    }
}

/// Objective values of one solution: `d` linear coordinates plus the
/// adversarial coordinate. All objectives are minimized.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector {
    pub linear: Vec<f64>,
    pub adversarial: f64,
}

impl ObjectiveVector {
    pub fn d(&self) -> usize {
        self.linear.len()
    }

    /// Weak componentwise dominance with at least one strict coordinate,
    /// over all `d + 1` minimized objectives.
    pub fn dominates(&self, other: &ObjectiveVector) -> Result<bool> {
        if self.d() != other.d() {
            return Err(Error::DimensionMismatch { left: self.d(), right: other.d() });
        }
        let mut strict = false;
        for (a, b) in self
            .linear
            .iter()
            .zip(other.linear.iter())
            .chain(core::iter::once((&self.adversarial, &other.adversarial)))
        {
            if a > b {
                return Ok(false);
            }
            if a < b {
                strict = true;
            }
        }
        Ok(strict)
    }
}

/// The adversarial objective `V^{d+1}`.
///
/// `Explicit` values are aligned to the solution set's enumeration order;
/// `Linear` evaluates a coefficient vector against the solution bits.
#[derive(Debug, Clone, PartialEq)]
pub enum Adversarial {
    Explicit(Vec<f64>),
    Linear(Vec<f64>),
}

/// Comparison key making the adversarial objective injective: ties in the
/// raw value are broken by lexicographic solution order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvKey {
    pub value: f64,
    pub lex: u128,
}

impl AdvKey {
    #[inline]
    pub fn cmp(&self, other: &AdvKey) -> core::cmp::Ordering {
        match self.value.partial_cmp(&other.value).expect("NaN adversarial value") {
            core::cmp::Ordering::Equal => self.lex.cmp(&other.lex),
            ord => ord,
        }
    }

    #[inline]
    pub fn lt(&self, other: &AdvKey) -> bool {
        self.cmp(other) == core::cmp::Ordering::Less
    }
}

/// A problem instance: `d` linear objectives over `n` binary variables, an
/// adversarial objective, and the feasible solution set.
#[derive(Debug, Clone)]
pub struct Instance {
    n: usize,
    d: usize,
    /// Row-major `d x n`; every entry in `[-1, 1]`.
    coefficients: Vec<f64>,
    adversarial: Adversarial,
    set: SolutionSet,
}

impl Instance {
    pub fn new(
        set: SolutionSet,
        d: usize,
        coefficients: Vec<f64>,
        adversarial: Adversarial,
    ) -> Result<Self> {
        let n = set.n();
        if d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1"));
        }
        if n < d + 1 {
            return Err(Error::InvalidParameter("n must be at least d + 1"));
        }
        if coefficients.len() != d * n {
            return Err(Error::InvalidParameter("coefficient matrix must be d x n"));
        }
        if coefficients.iter().any(|c| !(-1.0..=1.0).contains(c) || c.is_nan()) {
            return Err(Error::InvalidParameter("coefficients must lie in [-1, 1]"));
        }
        match &adversarial {
            Adversarial::Linear(w) if w.len() != n => {
                return Err(Error::InvalidParameter("linear adversarial needs n coefficients"))
            }
            Adversarial::Explicit(values) => {
                let size = set.len();
                if size > DEFAULT_ENUM_CAP {
                    return Err(Error::CapExceeded { size, cap: DEFAULT_ENUM_CAP });
                }
                if values.len() as u128 != size {
                    return Err(Error::InvalidParameter(
                        "explicit adversarial must align with the enumeration order",
                    ));
                }
            }
            _ => {}
        }
        Ok(Instance { n, d, coefficients, adversarial, set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn set(&self) -> &SolutionSet {
        &self.set
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Coefficient `V^t_i` with `t` in `1..=d` and `i` in `1..=n`.
    #[inline]
    pub fn coeff(&self, t: usize, i: usize) -> f64 {
        self.coefficients[(t - 1) * self.n + (i - 1)]
    }

    pub fn adversarial(&self) -> &Adversarial {
        &self.adversarial
    }

    /// Replaces the linear coefficients (used by the masking checks).
    pub fn with_coefficients(&self, coefficients: Vec<f64>) -> Result<Self> {
        Instance::new(self.set.clone(), self.d, coefficients, self.adversarial.clone())
    }

    /// Linear value `V^t x`, accumulated in ascending index order over the
    /// set bits. Change nothing here lightly: the Nemhauser-Ullmann engine
    /// reproduces exactly this summation order.
    #[inline]
    pub fn linear_value(&self, t: usize, x: &Solution) -> f64 {
        let row = &self.coefficients[(t - 1) * self.n..t * self.n];
        linear_fold(row, x)
    }

    /// Adversarial value `V^{d+1} x`; `x` must be feasible when the
    /// adversarial objective is explicit.
    pub fn adversarial_value(&self, x: &Solution) -> Result<f64> {
        match &self.adversarial {
            Adversarial::Linear(w) => Ok(linear_fold(w, x)),
            Adversarial::Explicit(values) => {
                let idx = self
                    .set
                    .rank(x)
                    .ok_or(Error::Precondition("solution not in the feasible set"))?;
                Ok(values[idx])
            }
        }
    }

    /// Tie-broken adversarial key (value, lexicographic order).
    pub fn adversarial_key(&self, x: &Solution) -> Result<AdvKey> {
        Ok(AdvKey { value: self.adversarial_value(x)?, lex: x.mask() })
    }

    /// Objective vector of `x`, optionally shifted by `u`: the linear
    /// coordinates become `V^t x - V^t u` while the adversarial coordinate
    /// stays `V^{d+1} x` (the shift never touches it).
    pub fn evaluate(&self, x: &Solution, u: Option<&Solution>) -> Result<ObjectiveVector> {
        let linear = (1..=self.d)
            .map(|t| {
                let base = self.linear_value(t, x);
                match u {
                    Some(u) => base - self.linear_value(t, u),
                    None => base,
                }
            })
            .collect();
        Ok(ObjectiveVector { linear, adversarial: self.adversarial_value(x)? })
    }

    /// Enumerates the feasible set with all objective values precomputed.
    pub fn table(&self, cap: u128) -> Result<EvalTable> {
        let size = self.set.len();
        if size > cap {
            return Err(Error::CapExceeded { size, cap });
        }
        let mut solutions = Vec::with_capacity(size as usize);
        let mut linear = Vec::with_capacity(size as usize * self.d);
        let mut adv = Vec::with_capacity(size as usize);
        for x in self.set.iter() {
            for t in 1..=self.d {
                linear.push(self.linear_value(t, &x));
            }
            adv.push(self.adversarial_key(&x)?);
            solutions.push(x);
        }
        Ok(EvalTable { d: self.d, solutions, linear, adv })
    }

    /// The OK event at scale `eps`: every pair of distinct solutions is at
    /// least `eps` apart in every linear objective, and every linear
    /// objective has some coefficient of magnitude below 1.
    pub fn ok_event(&self, eps: f64) -> Result<bool> {
        let table = self.table(DEFAULT_ENUM_CAP)?;
        for t in 1..=self.d {
            if !(1..=self.n).any(|i| self.coeff(t, i).abs() < 1.0) {
                return Ok(false);
            }
            if min_pairwise_gap(&table.objective_column(t)) < eps {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The OKZ event: the gap condition is only required for pairs that
    /// differ somewhere inside `P_k`, per objective `k`.
    pub fn okz_event(&self, partition: &[IndexTuple], eps: f64) -> Result<bool> {
        if partition.len() != self.d || !IndexTuple::is_partition(partition, self.n) {
            return Err(Error::InvalidPartition);
        }
        let table = self.table(DEFAULT_ENUM_CAP)?;
        for t in 1..=self.d {
            let gap = min_cross_class_gap(
                &table.objective_column(t),
                &class_patterns(&table.solutions, &partition[t - 1]),
            );
            if gap < eps {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Largest `eps = 2^-q` (q >= 0) strictly below half the minimum
    /// pairwise gap over all linear objectives. `None` when an exact tie
    /// makes the OK event impossible.
    pub fn working_epsilon(&self) -> Result<Option<f64>> {
        let table = self.table(DEFAULT_ENUM_CAP)?;
        let mut gap = f64::INFINITY;
        for t in 1..=self.d {
            if !(1..=self.n).any(|i| self.coeff(t, i).abs() < 1.0) {
                return Ok(None);
            }
            gap = gap.min(min_pairwise_gap(&table.objective_column(t)));
        }
        Ok(power_of_two_below(gap / 2.0))
    }

    /// OKZ analogue of [`Instance::working_epsilon`].
    pub fn working_epsilon_zp(&self, partition: &[IndexTuple]) -> Result<Option<f64>> {
        if partition.len() != self.d || !IndexTuple::is_partition(partition, self.n) {
            return Err(Error::InvalidPartition);
        }
        let table = self.table(DEFAULT_ENUM_CAP)?;
        let mut gap = f64::INFINITY;
        for t in 1..=self.d {
            gap = gap.min(min_cross_class_gap(
                &table.objective_column(t),
                &class_patterns(&table.solutions, &partition[t - 1]),
            ));
        }
        Ok(power_of_two_below(gap / 2.0))
    }
}

/// Left fold `sum += row[i-1]` over the set bits in ascending index order.
#[inline]
pub(crate) fn linear_fold(row: &[f64], x: &Solution) -> f64 {
    let mut acc = 0.0;
    for i in 1..=x.len() {
        if x.get(i) {
            acc += row[i - 1];
        }
    }
    acc
}

/// Feasible set with precomputed objective values, the working substrate of
/// the enumeration and witness layers.
#[derive(Debug, Clone)]
pub struct EvalTable {
    pub d: usize,
    pub solutions: Vec<Solution>,
    linear: Vec<f64>,
    adv: Vec<AdvKey>,
}

impl EvalTable {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Linear value `V^t` of table entry `idx`.
    #[inline]
    pub fn lin(&self, idx: usize, t: usize) -> f64 {
        self.linear[idx * self.d + (t - 1)]
    }

    #[inline]
    pub fn adv(&self, idx: usize) -> AdvKey {
        self.adv[idx]
    }

    pub fn linear_row(&self, idx: usize) -> &[f64] {
        &self.linear[idx * self.d..(idx + 1) * self.d]
    }

    /// Value of objective `t` (`t <= d` linear, `d + 1` adversarial key)
    /// compared between two entries: `a < b`.
    #[inline]
    pub fn obj_lt(&self, t: usize, a: usize, b: usize) -> bool {
        if t <= self.d {
            self.lin(a, t) < self.lin(b, t)
        } else {
            self.adv[a].lt(&self.adv[b])
        }
    }

    fn objective_column(&self, t: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.lin(i, t)).collect()
    }

    pub fn position_of(&self, x: &Solution) -> Option<usize> {
        self.solutions.iter().position(|s| s == x)
    }
}

fn class_patterns(solutions: &[Solution], part: &IndexTuple) -> Vec<u128> {
    solutions
        .iter()
        .map(|s| {
            let mut pattern = 0u128;
            for (bit, i) in part.iter().enumerate() {
                if s.get(i) {
                    pattern |= 1 << bit;
                }
            }
            pattern
        })
        .collect()
}

/// Minimum `|v_i - v_j|` over all pairs; infinity when fewer than two values.
fn min_pairwise_gap(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN objective value"));
    sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Minimum gap between values whose class patterns differ. Any cross-class
/// pair sandwiches an adjacent cross-class pair in sorted order, so scanning
/// neighbours suffices.
fn min_cross_class_gap(values: &[f64], classes: &[u128]) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("NaN objective value"));
    let mut gap = f64::INFINITY;
    for w in order.windows(2) {
        if classes[w[0]] != classes[w[1]] {
            gap = gap.min(values[w[1]] - values[w[0]]);
        }
    }
    gap
}

/// Largest `2^-q` with integer `q >= 0` strictly below `x`; `None` if no
/// such power exists (`x <= 0`). An infinite `x` (no constraining pair)
/// admits the largest grid scale.
fn power_of_two_below(x: f64) -> Option<f64> {
    if !(x > 0.0) {
        return None;
    }
    if x > 1.0 {
        return Some(1.0);
    }
    let mut eps = 1.0f64;
    while eps >= x {
        eps *= 0.5;
        if eps == 0.0 {
            return None;
        }
    }
    Some(eps)
}

/// Axis-aligned grid of half-open boxes `(b, b + eps]^dim` with corners at
/// integer multiples of `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonGrid {
    eps: f64,
    dim: usize,
    n: usize,
}

/// A grid box, identified by its corner in grid units (`corner = units * eps`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpsilonBox {
    pub units: Vec<i64>,
}

impl EpsilonGrid {
    /// `eps = 2^-q`, so that `1/eps` is integral and corners are exactly
    /// representable.
    pub fn new(q: u32, dim: usize, n: usize) -> Result<Self> {
        if q > 1000 {
            return Err(Error::InvalidParameter("epsilon exponent too large"));
        }
        if dim == 0 || n == 0 {
            return Err(Error::InvalidParameter("grid needs dim >= 1 and n >= 1"));
        }
        Ok(EpsilonGrid { eps: libm::exp2(-(q as f64)), dim, n })
    }

    pub fn from_eps(eps: f64, dim: usize, n: usize) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidParameter("eps must lie in (0, 1]"));
        }
        let inv = 1.0 / eps;
        if inv != libm::floor(inv) || (inv as u64).count_ones() != 1 {
            return Err(Error::InvalidParameter("1/eps must be a power of two"));
        }
        Ok(EpsilonGrid { eps, dim, n })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of boxes with corners in `{-n/eps, ..., n/eps - 1}^dim`,
    /// i.e. `(2n/eps)^dim`. `None` on overflow.
    pub fn box_count(&self) -> Option<u128> {
        let per_axis = 2.0 * self.n as f64 / self.eps;
        if per_axis > u128::MAX as f64 {
            return None;
        }
        let per_axis = per_axis as u128;
        let mut total: u128 = 1;
        for _ in 0..self.dim {
            total = total.checked_mul(per_axis)?;
        }
        Some(total)
    }

    /// The corner `b` of the unique box with `v` in `(b, b + eps]` per
    /// coordinate: `b_k = eps * (ceil(v_k / eps) - 1)`. Exact because `eps`
    /// is a power of two.
    pub fn epsilon_box(&self, v: &[f64]) -> Result<EpsilonBox> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { left: v.len(), right: self.dim });
        }
        let mut units = Vec::with_capacity(self.dim);
        for &vk in v {
            if !(vk >= -(self.n as f64) && vk <= self.n as f64) {
                return Err(Error::OutOfGridRange);
            }
            units.push(libm::ceil(vk / self.eps) as i64 - 1);
        }
        Ok(EpsilonBox { units })
    }

    /// Corner coordinates `b = units * eps`.
    pub fn corner(&self, b: &EpsilonBox) -> Vec<f64> {
        b.units.iter().map(|&u| u as f64 * self.eps).collect()
    }

    /// Membership in the half-open box.
    pub fn contains(&self, b: &EpsilonBox, v: &[f64]) -> bool {
        b.units.len() == v.len()
            && b.units.iter().zip(v).all(|(&u, &vk)| {
                let corner = u as f64 * self.eps;
                vk > corner && vk <= corner + self.eps
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::SolutionSet;
    use alloc::vec;

    fn vector(linear: &[f64], adversarial: f64) -> ObjectiveVector {
        ObjectiveVector { linear: linear.to_vec(), adversarial }
    }

    #[test]
    fn dominance_basic_cases() {
        let a = vector(&[1.0, 2.0], 0.0);
        let b = vector(&[2.0, 3.0], 1.0);
        assert!(a.dominates(&b).unwrap());
        assert!(!b.dominates(&a).unwrap());
        assert!(!a.dominates(&a).unwrap(), "no strict coordinate");
        let c = vector(&[1.0, 3.0], 0.0);
        let d = vector(&[2.0, 2.0], 0.0);
        assert!(!c.dominates(&d).unwrap());
        assert!(!d.dominates(&c).unwrap());
    }

    #[test]
    fn dominance_dimension_mismatch() {
        let a = vector(&[1.0], 0.0);
        let b = vector(&[1.0, 2.0], 0.0);
        assert_eq!(
            a.dominates(&b).unwrap_err(),
            Error::DimensionMismatch { left: 1, right: 2 }
        );
    }

    #[test]
    fn solution_lex_order_and_indexing() {
        let x = Solution::from_bits(&[true, false, true]);
        assert!(x.get(1) && !x.get(2) && x.get(3));
        assert_eq!(x.mask(), 0b101);
        let y = Solution::from_bits(&[false, true, true]);
        assert!(y < x, "index 1 is most significant");
    }

    #[test]
    fn epsilon_box_examples() {
        let grid = EpsilonGrid::from_eps(0.5, 1, 2).unwrap();
        let b = grid.epsilon_box(&[0.5]).unwrap();
        assert_eq!(grid.corner(&b), vec![0.0]);
        assert!(grid.contains(&b, &[0.5]));
        let b = grid.epsilon_box(&[-0.25]).unwrap();
        assert_eq!(grid.corner(&b), vec![-0.5]);
        assert_eq!(grid.box_count(), Some(8));
        assert!(grid.epsilon_box(&[2.5]).is_err());
    }

    #[test]
    fn evaluate_shift_conventions() {
        let set = SolutionSet::hypercube(3);
        let inst = Instance::new(
            set,
            1,
            vec![0.5, -0.25, 0.125],
            Adversarial::Linear(vec![0.0, 0.25, 0.5]),
        )
        .unwrap();
        let x = Solution::from_bits(&[true, true, false]);
        let v = inst.evaluate(&x, None).unwrap();
        assert_eq!(v.linear, vec![0.25]);
        assert_eq!(v.adversarial, 0.25);
        // u = x zeroes the linear part but never the adversarial part.
        let shifted = inst.evaluate(&x, Some(&x)).unwrap();
        assert_eq!(shifted.linear, vec![0.0]);
        assert_eq!(shifted.adversarial, 0.25);
        // u absent matches u = all-zeros.
        let zero = Solution::zeros(3);
        assert_eq!(
            inst.evaluate(&x, Some(&zero)).unwrap().linear,
            inst.evaluate(&x, None).unwrap().linear
        );
    }

    #[test]
    fn ok_event_detects_small_gaps() {
        // Two solutions differing in index 3 with V^1_3 = gap.
        let set = SolutionSet::explicit(vec![
            Solution::from_bits(&[false, false, false]),
            Solution::from_bits(&[false, false, true]),
        ])
        .unwrap();
        let inst = Instance::new(
            set,
            1,
            vec![0.0, 0.0, 0.25],
            Adversarial::Explicit(vec![0.0, 1.0]),
        )
        .unwrap();
        assert!(!inst.ok_event(0.5).unwrap(), "gap eps/2 violates OK");
        assert!(inst.ok_event(0.25).unwrap());
        assert!(inst.ok_event(0.125).unwrap(), "monotone in eps");
    }

    #[test]
    fn ok_event_vacuous_for_singleton() {
        let set = SolutionSet::explicit(vec![Solution::from_bits(&[true, false])]).unwrap();
        let inst =
            Instance::new(set, 1, vec![0.5, 0.5], Adversarial::Explicit(vec![0.0])).unwrap();
        assert!(inst.ok_event(1.0).unwrap());
        // Coefficient condition still checked: all |V^1_i| = 1 fails.
        let set = SolutionSet::explicit(vec![Solution::from_bits(&[true, false])]).unwrap();
        let inst =
            Instance::new(set, 1, vec![1.0, -1.0], Adversarial::Explicit(vec![0.0])).unwrap();
        assert!(!inst.ok_event(1.0).unwrap());
    }

    #[test]
    fn okz_event_restricts_to_partition_classes() {
        // P_1 = (1), P_2 = (2, 3). The pair below agrees on P_1, so its tiny
        // V^1 gap is irrelevant; only P_2-differing pairs constrain V^2.
        let set = SolutionSet::explicit(vec![
            Solution::from_bits(&[true, false, false]),
            Solution::from_bits(&[true, true, false]),
        ])
        .unwrap();
        let inst = Instance::new(
            set,
            2,
            vec![0.5, 0.0, 0.0, 0.0, 0.5, 0.25],
            Adversarial::Explicit(vec![0.0, 1.0]),
        )
        .unwrap();
        let partition = [IndexTuple::new(&[1]), IndexTuple::new(&[2, 3])];
        assert!(inst.okz_event(&partition, 0.5).unwrap());
        // A pair differing only inside P_1 with a small V^1 gap fails.
        let set = SolutionSet::explicit(vec![
            Solution::from_bits(&[true, false, false]),
            Solution::from_bits(&[false, false, false]),
        ])
        .unwrap();
        let inst = Instance::new(
            set,
            2,
            vec![0.125, 0.0, 0.0, 0.0, 0.5, 0.25],
            Adversarial::Explicit(vec![0.0, 1.0]),
        )
        .unwrap();
        assert!(!inst.okz_event(&partition, 0.5).unwrap());
        let bad = [IndexTuple::new(&[1]), IndexTuple::new(&[2])];
        assert!(inst.okz_event(&bad, 0.5).is_err());
    }

    #[test]
    fn working_epsilon_guarantees_ok() {
        let set = SolutionSet::hypercube(3);
        let inst = Instance::new(
            set,
            2,
            vec![0.5, -0.25, 0.125, 0.375, 0.0625, -0.5],
            Adversarial::Linear(vec![0.1, 0.2, 0.4]),
        )
        .unwrap();
        let eps = inst.working_epsilon().unwrap().unwrap();
        assert!(inst.ok_event(eps).unwrap());
        let inv = 1.0 / eps;
        assert_eq!(inv.fract(), 0.0);
    }

    #[test]
    fn index_tuple_partition_check() {
        let parts = [IndexTuple::new(&[2, 1]), IndexTuple::new(&[3])];
        assert!(IndexTuple::is_partition(&parts, 3));
        assert!(!IndexTuple::is_partition(&parts, 4));
        let overlap = [IndexTuple::new(&[1, 2]), IndexTuple::new(&[2, 3])];
        assert!(!IndexTuple::is_partition(&overlap, 3));
    }
}
