//! Feasible solution sets: explicit lists, virtual hypercubes, valid path
//! sets of AS-partitioned graphs, and the polynomial-objective linearization.

use alloc::vec::Vec;

use crate::density::{DensitySpec, PerturbationSpec};
use crate::error::{Error, Result};
use crate::model::{IndexTuple, Solution, DEFAULT_ENUM_CAP};

/// A set of feasible solutions with a canonical, stable enumeration order:
/// lexicographic for hypercubes, insertion order for explicit sets, DFS-lex
/// for valid path sets.
#[derive(Debug, Clone)]
pub enum SolutionSet {
    Explicit(ExplicitSet),
    Hypercube { n: usize },
    ValidPaths(PathSet),
}

impl SolutionSet {
    pub fn hypercube(n: usize) -> Self {
        assert!(n >= 1 && n <= 127, "hypercube dimension out of range");
        SolutionSet::Hypercube { n }
    }

    pub fn explicit(solutions: Vec<Solution>) -> Result<Self> {
        Ok(SolutionSet::Explicit(ExplicitSet::new(solutions)?))
    }

    /// Number of binary variables.
    pub fn n(&self) -> usize {
        match self {
            SolutionSet::Explicit(e) => e.n,
            SolutionSet::Hypercube { n } => *n,
            SolutionSet::ValidPaths(p) => p.graph.edges.len(),
        }
    }

    pub fn len(&self) -> u128 {
        match self {
            SolutionSet::Explicit(e) => e.solutions.len() as u128,
            SolutionSet::Hypercube { n } => 1u128 << n,
            SolutionSet::ValidPaths(p) => p.paths.len() as u128,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> SetIter<'_> {
        match self {
            SolutionSet::Explicit(e) => SetIter::Slice(e.solutions.iter()),
            SolutionSet::Hypercube { n } => SetIter::Counting { next: 0, end: 1u128 << n, n: *n },
            SolutionSet::ValidPaths(p) => SetIter::Slice(p.paths.iter()),
        }
    }

    /// Enumeration position of `x`, if feasible.
    pub fn rank(&self, x: &Solution) -> Option<usize> {
        match self {
            SolutionSet::Explicit(e) => e.rank(x),
            SolutionSet::Hypercube { n } => {
                (x.len() == *n).then(|| x.mask() as usize)
            }
            SolutionSet::ValidPaths(p) => p.rank(x),
        }
    }

    pub fn contains(&self, x: &Solution) -> bool {
        self.rank(x).is_some()
    }

    /// Solution at enumeration position `idx`.
    pub fn get(&self, idx: usize) -> Option<Solution> {
        match self {
            SolutionSet::Explicit(e) => e.solutions.get(idx).copied(),
            SolutionSet::Hypercube { n } => {
                ((idx as u128) < (1u128 << n)).then(|| Solution::from_mask(idx as u128, *n))
            }
            SolutionSet::ValidPaths(p) => p.paths.get(idx).copied(),
        }
    }

    /// `S_I(pattern)`: members agreeing with `pattern` on the indices of `I`
    /// (`pattern` aligned with `I`), in canonical order.
    pub fn restrict(&self, tuple: &IndexTuple, pattern: &[bool]) -> Result<SolutionSet> {
        if pattern.len() != tuple.len() {
            return Err(Error::DimensionMismatch { left: pattern.len(), right: tuple.len() });
        }
        if tuple.iter().any(|i| i == 0 || i > self.n()) {
            return Err(Error::InvalidParameter("restriction index out of range"));
        }
        let size = self.len();
        if size > DEFAULT_ENUM_CAP {
            return Err(Error::CapExceeded { size, cap: DEFAULT_ENUM_CAP });
        }
        let filtered = self
            .iter()
            .filter(|x| tuple.iter().zip(pattern).all(|(i, &b)| x.get(i) == b))
            .collect();
        SolutionSet::explicit(filtered)
    }
}

/// Explicit solution list in insertion order with no duplicates.
#[derive(Debug, Clone)]
pub struct ExplicitSet {
    n: usize,
    solutions: Vec<Solution>,
    /// Positions sorted by solution mask, for O(log) rank lookups.
    sorted: Vec<usize>,
}

impl ExplicitSet {
    fn new(solutions: Vec<Solution>) -> Result<Self> {
        let n = solutions.first().map_or(0, Solution::len);
        if n == 0 {
            return Err(Error::InvalidParameter("explicit set needs nonzero length"));
        }
        if solutions.iter().any(|s| s.len() != n) {
            return Err(Error::InvalidParameter("mixed solution lengths"));
        }
        let mut sorted: Vec<usize> = (0..solutions.len()).collect();
        sorted.sort_by_key(|&i| solutions[i].mask());
        if sorted.windows(2).any(|w| solutions[w[0]] == solutions[w[1]]) {
            return Err(Error::InvalidParameter("duplicate solutions"));
        }
        Ok(ExplicitSet { n, solutions, sorted })
    }

    fn rank(&self, x: &Solution) -> Option<usize> {
        if x.len() != self.n {
            return None;
        }
        self.sorted
            .binary_search_by_key(&x.mask(), |&i| self.solutions[i].mask())
            .ok()
            .map(|pos| self.sorted[pos])
    }
}

pub enum SetIter<'a> {
    Slice(core::slice::Iter<'a, Solution>),
    Counting { next: u128, end: u128, n: usize },
}

impl Iterator for SetIter<'_> {
    type Item = Solution;

    fn next(&mut self) -> Option<Solution> {
        match self {
            SetIter::Slice(it) => it.next().copied(),
            SetIter::Counting { next, end, n } => {
                if next == end {
                    None
                } else {
                    let s = Solution::from_mask(*next, *n);
                    *next += 1;
                    Some(s)
                }
            }
        }
    }
}

/// An undirected graph whose vertices are partitioned into autonomous
/// systems `V_1, ..., V_k`; objective `i` charges the lengths of the path
/// edges inside `V_i`, and inter-AS edges are free.
#[derive(Debug, Clone)]
pub struct AsGraph {
    /// AS label (1-based) per vertex id `0..v`.
    pub vertex_as: Vec<usize>,
    /// Undirected edges; the edge index is the binary variable index minus 1.
    pub edges: Vec<(usize, usize)>,
    pub k: usize,
    pub s: usize,
    pub t: usize,
}

impl AsGraph {
    pub fn new(
        vertex_as: Vec<usize>,
        edges: Vec<(usize, usize)>,
        s: usize,
        t: usize,
    ) -> Result<Self> {
        let v = vertex_as.len();
        if v == 0 || vertex_as.iter().any(|&a| a == 0) {
            return Err(Error::InvalidParameter("vertices need AS labels >= 1"));
        }
        let k = *vertex_as.iter().max().unwrap();
        if s >= v || t >= v {
            return Err(Error::InvalidParameter("source or target out of range"));
        }
        if edges.iter().any(|&(a, b)| a >= v || b >= v || a == b) {
            return Err(Error::InvalidParameter("edge endpoint out of range"));
        }
        Ok(AsGraph { vertex_as, edges, k, s, t })
    }

    /// The AS owning edge `e`, or `None` for an inter-AS edge.
    pub fn edge_as(&self, e: usize) -> Option<usize> {
        let (u, v) = self.edges[e];
        (self.vertex_as[u] == self.vertex_as[v]).then(|| self.vertex_as[u])
    }

    /// Incidence vectors of all valid paths: simple `s -> t` paths whose AS
    /// labels are non-decreasing and cover `1..=k`. An empty result is a
    /// legal outcome, not an error.
    pub fn valid_paths(&self) -> Result<SolutionSet> {
        if self.edges.is_empty() || self.edges.len() > 127 {
            return Err(Error::InvalidParameter("edge count out of range"));
        }
        let mut paths = Vec::new();
        let mut visited = alloc::vec![false; self.vertex_as.len()];
        visited[self.s] = true;
        let mut edge_stack = Vec::new();
        self.dfs(self.s, &mut visited, &mut edge_stack, &mut paths);
        Ok(SolutionSet::ValidPaths(PathSet::new(self.clone(), paths)))
    }

    fn dfs(
        &self,
        at: usize,
        visited: &mut [bool],
        edge_stack: &mut Vec<usize>,
        out: &mut Vec<Solution>,
    ) {
        if at == self.t {
            // Labels climbed monotonically from V_1, so reaching V_k means
            // every AS in between was visited in order.
            if self.vertex_as[self.s] == 1 && self.vertex_as[self.t] == self.k {
                let mut sol = Solution::zeros(self.edges.len());
                for &e in edge_stack.iter() {
                    sol.set(e + 1, true);
                }
                out.push(sol);
            }
            return;
        }
        let label = self.vertex_as[at];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let next = if a == at {
                b
            } else if b == at {
                a
            } else {
                continue;
            };
            let next_label = self.vertex_as[next];
            // Non-decreasing labels without skipping an AS.
            if next_label < label || next_label > label + 1 || visited[next] {
                continue;
            }
            visited[next] = true;
            edge_stack.push(e);
            self.dfs(next, visited, edge_stack, out);
            edge_stack.pop();
            visited[next] = false;
        }
    }
}

/// Valid path set: the graph plus the DFS-lex enumeration of its paths.
#[derive(Debug, Clone)]
pub struct PathSet {
    pub graph: AsGraph,
    paths: Vec<Solution>,
    sorted: Vec<usize>,
}

impl PathSet {
    fn new(graph: AsGraph, paths: Vec<Solution>) -> Self {
        let mut sorted: Vec<usize> = (0..paths.len()).collect();
        sorted.sort_by_key(|&i| paths[i].mask());
        PathSet { graph, paths, sorted }
    }

    fn rank(&self, x: &Solution) -> Option<usize> {
        self.sorted
            .binary_search_by_key(&x.mask(), |&i| self.paths[i].mask())
            .ok()
            .map(|pos| self.sorted[pos])
    }
}

/// One indicator function `I^t_i`: the product of the selected bits
/// (an empty product is the constant 1), weighted by a `[0, 1]` density.
#[derive(Debug, Clone)]
pub struct Monomial {
    pub vars: IndexTuple,
    pub density: DensitySpec,
}

impl Monomial {
    pub fn indicator(&self, x: &Solution) -> bool {
        self.vars.iter().all(|i| x.get(i))
    }
}

/// Monomial groups per objective; `V^t(x) = sum_i w^t_i I^t_i(x)` with
/// `m_t >= 1` monomials in group `t`.
#[derive(Debug, Clone)]
pub struct MonomialSystem {
    pub groups: Vec<Vec<Monomial>>,
}

impl MonomialSystem {
    pub fn d(&self) -> usize {
        self.groups.len()
    }

    pub fn total_monomials(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Indicator pattern `y(x)` over all monomials, block per objective.
    pub fn pattern(&self, x: &Solution) -> Solution {
        let m = self.total_monomials();
        let mut y = Solution::zeros(m);
        let mut pos = 1;
        for group in &self.groups {
            for mono in group {
                if mono.indicator(x) {
                    y.set(pos, true);
                }
                pos += 1;
            }
        }
        y
    }

    /// Nonlinear objective value with a drawn weight vector (one weight per
    /// monomial, blocks concatenated). Summation order matches the linear
    /// fold on the linearized instance bit for bit.
    pub fn value(&self, weights: &[f64], t: usize, x: &Solution) -> f64 {
        let offset: usize = self.groups[..t - 1].iter().map(Vec::len).sum();
        let mut acc = 0.0;
        for (i, mono) in self.groups[t - 1].iter().enumerate() {
            if mono.indicator(x) {
                acc += weights[offset + i];
            }
        }
        acc
    }
}

/// Result of the polynomial-objective linearization: the reachable pattern
/// set, the per-weight perturbation grid (each new variable is perturbed in
/// exactly one objective, a zero-preserving normal form), the new
/// adversarial values, and the representative original solution per pattern.
#[derive(Debug, Clone)]
pub struct Linearized {
    pub set: SolutionSet,
    pub spec: PerturbationSpec,
    pub adversarial: Vec<f64>,
    pub partition: Vec<IndexTuple>,
    /// Enumeration index (in the source set) of the minimum-adversarial
    /// preimage of each pattern.
    pub representative: Vec<usize>,
}

/// Linearizes weighted-indicator objectives by introducing one binary
/// variable per monomial. The new adversarial objective maps each pattern
/// to the minimum original adversarial value over its preimage, so the
/// Pareto-set cardinality is preserved.
pub fn linearize_polynomial(
    set: &SolutionSet,
    sys: &MonomialSystem,
    adversarial: &[f64],
) -> Result<Linearized> {
    let size = set.len();
    if size > DEFAULT_ENUM_CAP {
        return Err(Error::CapExceeded { size, cap: DEFAULT_ENUM_CAP });
    }
    if adversarial.len() as u128 != size {
        return Err(Error::InvalidParameter("adversarial must align with the enumeration order"));
    }
    if sys.groups.iter().any(Vec::is_empty) {
        return Err(Error::InvalidParameter("every group needs at least one monomial"));
    }
    let d = sys.d();
    let m = sys.total_monomials();
    if m > 127 {
        return Err(Error::InvalidParameter("too many monomials"));
    }

    // Reachable patterns in order of first appearance, keeping the preimage
    // with the smallest adversarial value as representative.
    let mut patterns: Vec<Solution> = Vec::new();
    let mut adv: Vec<f64> = Vec::new();
    let mut representative: Vec<usize> = Vec::new();
    for (idx, x) in set.iter().enumerate() {
        let y = sys.pattern(&x);
        match patterns.iter().position(|p| *p == y) {
            Some(pos) => {
                if adversarial[idx] < adv[pos] {
                    adv[pos] = adversarial[idx];
                    representative[pos] = idx;
                }
            }
            None => {
                patterns.push(y);
                adv.push(adversarial[idx]);
                representative.push(idx);
            }
        }
    }

    let mut entries = alloc::vec![alloc::vec![None; m]; d];
    let mut partition = Vec::with_capacity(d);
    let mut col = 0usize;
    for (t, group) in sys.groups.iter().enumerate() {
        let mut part = IndexTuple::empty();
        for mono in group {
            entries[t][col] = Some(mono.density.clone());
            part.push(col + 1);
            col += 1;
        }
        partition.push(part);
    }
    let spec = PerturbationSpec::new(entries)?;

    Ok(Linearized {
        set: SolutionSet::explicit(patterns)?,
        spec,
        adversarial: adv,
        partition,
        representative,
    })
}
