//! Phi-bounded density families on `[-1, 1]`, perturbation grids with
//! deterministic zeros, the staircase decomposition of quasiconcave
//! densities, and the zero-preserving normal form transform.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::model::{IndexTuple, Solution};
use crate::sets::SolutionSet;
use crate::stream;

/// A probability density on a sub-interval of `[-1, 1]`, bounded by its
/// supremum `phi`. The first three families are quasiconcave; the bimodal
/// family exists to exercise the weaker general-density bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    /// Constant `1/width` on `[center - width/2, center + width/2]`.
    Uniform { center: f64, width: f64 },
    /// Symmetric triangle on `[peak - half_width, peak + half_width]`.
    Triangular { peak: f64, half_width: f64 },
    /// Gaussian restricted and renormalized to `[-1, 1]`.
    TruncatedGaussian { mean: f64, sigma: f64 },
    /// Two disjoint equal-mass uniform blocks; not quasiconcave.
    BimodalUniform { first: (f64, f64), second: (f64, f64) },
}

impl DensitySpec {
    pub fn uniform(center: f64, width: f64) -> Result<Self> {
        let spec = DensitySpec::Uniform { center, width };
        spec.validate()?;
        Ok(spec)
    }

    pub fn triangular(peak: f64, half_width: f64) -> Result<Self> {
        let spec = DensitySpec::Triangular { peak, half_width };
        spec.validate()?;
        Ok(spec)
    }

    pub fn truncated_gaussian(mean: f64, sigma: f64) -> Result<Self> {
        let spec = DensitySpec::TruncatedGaussian { mean, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn bimodal(first: (f64, f64), second: (f64, f64)) -> Result<Self> {
        let spec = DensitySpec::BimodalUniform { first, second };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DensitySpec::Uniform { center, width } => {
                width > 0.0 && center - width / 2.0 >= -1.0 && center + width / 2.0 <= 1.0
            }
            DensitySpec::Triangular { peak, half_width } => {
                half_width > 0.0 && peak - half_width >= -1.0 && peak + half_width <= 1.0
            }
            DensitySpec::TruncatedGaussian { mean, sigma } => {
                (-1.0..=1.0).contains(&mean) && sigma > 0.0 && sigma.is_finite()
            }
            DensitySpec::BimodalUniform { first, second } => {
                first.0 >= -1.0
                    && first.0 < first.1
                    && first.1 < second.0
                    && second.0 < second.1
                    && second.1 <= 1.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("density parameters out of range"))
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            DensitySpec::Uniform { center, width } => (center - width / 2.0, center + width / 2.0),
            DensitySpec::Triangular { peak, half_width } => (peak - half_width, peak + half_width),
            DensitySpec::TruncatedGaussian { .. } => (-1.0, 1.0),
            DensitySpec::BimodalUniform { first, second } => (first.0, second.1),
        }
    }

    /// Supremum of the density.
    pub fn phi(&self) -> f64 {
        match *self {
            DensitySpec::Uniform { width, .. } => 1.0 / width,
            DensitySpec::Triangular { half_width, .. } => 1.0 / half_width,
            DensitySpec::TruncatedGaussian { mean, sigma } => {
                gaussian_peak(mean, sigma)
            }
            DensitySpec::BimodalUniform { first, second } => {
                let h1 = 0.5 / (first.1 - first.0);
                let h2 = 0.5 / (second.1 - second.0);
                h1.max(h2)
            }
        }
    }

    pub fn quasiconcave(&self) -> bool {
        !matches!(self, DensitySpec::BimodalUniform { .. })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            DensitySpec::Uniform { center, width } => {
                let (a, b) = (center - width / 2.0, center + width / 2.0);
                if x >= a && x <= b {
                    1.0 / width
                } else {
                    0.0
                }
            }
            DensitySpec::Triangular { peak, half_width } => {
                let dist = (x - peak).abs();
                if dist <= half_width {
                    (1.0 - dist / half_width) / half_width
                } else {
                    0.0
                }
            }
            DensitySpec::TruncatedGaussian { mean, sigma } => {
                if !(-1.0..=1.0).contains(&x) {
                    return 0.0;
                }
                let z = (x - mean) / sigma;
                libm::exp(-0.5 * z * z)
                    / (sigma * libm::sqrt(2.0 * PI) * truncation_mass(mean, sigma))
            }
            DensitySpec::BimodalUniform { first, second } => {
                if x >= first.0 && x <= first.1 {
                    0.5 / (first.1 - first.0)
                } else if x >= second.0 && x <= second.1 {
                    0.5 / (second.1 - second.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// Draws one value. Uniform and triangular use the inverse CDF; the
    /// truncated Gaussian uses Box-Muller proposals rejected outside
    /// `[-1, 1]`. Every draw stays strictly inside the support.
    pub fn sample(&self, rng: &mut impl RngCore) -> f64 {
        match *self {
            DensitySpec::Uniform { center, width } => {
                center - width / 2.0 + width * stream::unit(rng)
            }
            DensitySpec::Triangular { peak, half_width } => {
                let u = stream::unit(rng);
                if u < 0.5 {
                    peak - half_width + half_width * libm::sqrt(2.0 * u)
                } else {
                    peak + half_width - half_width * libm::sqrt(2.0 * (1.0 - u))
                }
            }
            DensitySpec::TruncatedGaussian { mean, sigma } => loop {
                let u1 = stream::unit_positive(rng);
                let u2 = stream::unit(rng);
                let z = libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * PI * u2);
                let x = mean + sigma * z;
                if (-1.0..=1.0).contains(&x) {
                    return x;
                }
            },
            DensitySpec::BimodalUniform { first, second } => {
                let block = if stream::unit(rng) < 0.5 { first } else { second };
                block.0 + (block.1 - block.0) * stream::unit(rng)
            }
        }
    }

    /// `{x : pdf(x) > level}` as an interval with endpoint openness, or
    /// `None` when empty. Only defined for the quasiconcave families.
    fn superlevel_interval(&self, level: f64) -> Option<Interval> {
        match *self {
            DensitySpec::Uniform { center, width } => {
                if level < 1.0 / width {
                    Some(Interval {
                        lo: center - width / 2.0,
                        hi: center + width / 2.0,
                        lo_closed: true,
                        hi_closed: true,
                    })
                } else {
                    None
                }
            }
            DensitySpec::Triangular { peak, half_width } => {
                let phi = 1.0 / half_width;
                if level >= phi {
                    return None;
                }
                let w = half_width * (1.0 - level * half_width);
                Some(Interval { lo: peak - w, hi: peak + w, lo_closed: false, hi_closed: false })
            }
            DensitySpec::TruncatedGaussian { mean, sigma } => {
                let peak = gaussian_peak(mean, sigma);
                if level >= peak {
                    return None;
                }
                if level <= 0.0 {
                    return Some(Interval { lo: -1.0, hi: 1.0, lo_closed: true, hi_closed: true });
                }
                let w = sigma * libm::sqrt(-2.0 * libm::log(level / peak));
                let (lo, lo_closed) =
                    if mean - w <= -1.0 { (-1.0, true) } else { (mean - w, false) };
                let (hi, hi_closed) = if mean + w >= 1.0 { (1.0, true) } else { (mean + w, false) };
                Some(Interval { lo, hi, lo_closed, hi_closed })
            }
            DensitySpec::BimodalUniform { .. } => None,
        }
    }
}

fn gaussian_peak(mean: f64, sigma: f64) -> f64 {
    1.0 / (sigma * libm::sqrt(2.0 * PI) * truncation_mass(mean, sigma))
}

/// Mass of N(mean, sigma) inside `[-1, 1]`.
fn truncation_mass(mean: f64, sigma: f64) -> f64 {
    normal_cdf((1.0 - mean) / sigma) - normal_cdf((-1.0 - mean) / sigma)
}

pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / libm::sqrt(2.0)))
}

/// An interval with explicit endpoint openness; rectangles of a staircase
/// are level-set slabs whose boundary behaviour matters pointwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        (if self.lo_closed { x >= self.lo } else { x > self.lo })
            && (if self.hi_closed { x <= self.hi } else { x < self.hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rectangle {
    pub height: f64,
    pub interval: Interval,
}

/// Stack of rectangles representing `ceil(f/delta) * delta` for a
/// quasiconcave density `f`: rectangle `j` is the superlevel slab
/// `{f > (j-1) * delta}` of height `delta`.
#[derive(Debug, Clone)]
pub struct Staircase {
    pub rectangles: Vec<Rectangle>,
    pub delta: f64,
}

impl Staircase {
    /// Sum of the heights of the rectangles covering `x`.
    pub fn height_at(&self, x: f64) -> f64 {
        self.rectangles
            .iter()
            .filter(|r| r.interval.contains(x))
            .map(|r| r.height)
            .sum()
    }

    /// Total height of the stack.
    pub fn total_height(&self) -> f64 {
        self.rectangles.iter().map(|r| r.height).sum()
    }

    /// Total mass `sum(height * length)`.
    pub fn mass(&self) -> f64 {
        self.rectangles.iter().map(|r| r.height * r.interval.length()).sum()
    }
}

/// Rounds the density up to the next integral multiple of `delta` and
/// decomposes the rounded function into level-set rectangles. Requires a
/// quasiconcave family (superlevel sets must be intervals).
pub fn staircase_decompose(spec: &DensitySpec, delta: f64) -> Result<Staircase> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter("delta must be positive"));
    }
    if !spec.quasiconcave() {
        return Err(Error::Precondition("staircase decomposition needs a quasiconcave density"));
    }
    let levels = libm::ceil(spec.phi() / delta) as usize;
    let mut rectangles = Vec::with_capacity(levels);
    for j in 1..=levels {
        let level = (j - 1) as f64 * delta;
        if let Some(interval) = spec.superlevel_interval(level) {
            rectangles.push(Rectangle { height: delta, interval });
        }
    }
    Ok(Staircase { rectangles, delta })
}

/// Per-coefficient perturbation grid: entry `(t, i)` is either a density or
/// deterministically zero.
#[derive(Debug, Clone)]
pub struct PerturbationSpec {
    /// `d` rows of `n` entries; `None` means the coefficient is fixed to 0.
    entries: Vec<Vec<Option<DensitySpec>>>,
}

impl PerturbationSpec {
    pub fn new(entries: Vec<Vec<Option<DensitySpec>>>) -> Result<Self> {
        if entries.is_empty() || entries[0].is_empty() {
            return Err(Error::InvalidParameter("perturbation grid must be d x n"));
        }
        let n = entries[0].len();
        if entries.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidParameter("ragged perturbation grid"));
        }
        for row in &entries {
            for spec in row.iter().flatten() {
                spec.validate()?;
            }
        }
        Ok(PerturbationSpec { entries })
    }

    /// Grid with every coefficient drawn from the same density.
    pub fn dense(d: usize, n: usize, spec: DensitySpec) -> Result<Self> {
        PerturbationSpec::new(alloc::vec![alloc::vec![Some(spec); n]; d])
    }

    pub fn d(&self) -> usize {
        self.entries.len()
    }

    pub fn n(&self) -> usize {
        self.entries[0].len()
    }

    pub fn entry(&self, t: usize, i: usize) -> Option<&DensitySpec> {
        self.entries[t - 1][i - 1].as_ref()
    }

    pub fn rows(&self) -> &[Vec<Option<DensitySpec>>] {
        &self.entries
    }

    /// Largest supremum over all densities in the grid.
    pub fn phi(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .flatten()
            .map(DensitySpec::phi)
            .fold(1.0, f64::max)
    }

    pub fn quasiconcave(&self) -> bool {
        self.entries.iter().flatten().flatten().all(DensitySpec::quasiconcave)
    }

    /// True iff every column has exactly one perturbed entry.
    pub fn is_zp_normal_form(&self) -> bool {
        (1..=self.n()).all(|i| {
            self.entries.iter().filter(|row| row[i - 1].is_some()).count() == 1
        })
    }

    /// The induced partition `(P_1, ..., P_d)` of a normal-form grid.
    pub fn partition(&self) -> Result<Vec<IndexTuple>> {
        if !self.is_zp_normal_form() {
            return Err(Error::Precondition("partition needs the zero-preserving normal form"));
        }
        Ok((0..self.d())
            .map(|t| {
                IndexTuple::from(
                    (1..=self.n()).filter(|&i| self.entries[t][i - 1].is_some()).collect::<Vec<_>>(),
                )
            })
            .collect())
    }

    /// Draws a full coefficient matrix, row-major, zeros where fixed.
    pub fn draw(&self, rng: &mut impl RngCore) -> Vec<f64> {
        let mut coeffs = Vec::with_capacity(self.d() * self.n());
        for row in &self.entries {
            for entry in row {
                coeffs.push(match entry {
                    Some(spec) => spec.sample(rng),
                    None => 0.0,
                });
            }
        }
        coeffs
    }
}

/// Output of the zero-preserving normal-form transform.
#[derive(Debug, Clone)]
pub struct ZpNormalForm {
    pub spec: PerturbationSpec,
    pub set: SolutionSet,
    /// Adversarial values aligned with `set`, minimum over each preimage.
    pub adversarial: Vec<f64>,
    /// Block partition `(P_1, ..., P_d)` of the new variables.
    pub partition: Vec<IndexTuple>,
    /// Enumeration index in the source set of each representative.
    pub representative: Vec<usize>,
    /// For each new variable (1-based), the source `(objective, index)`.
    pub column_origin: Vec<(usize, usize)>,
}

/// Rewrites an arbitrary zero pattern into the normal form where every
/// variable is perturbed in exactly one objective: conceptually `d` copies
/// of every solution with block `k` carrying objective `k`'s pattern, then
/// all never-perturbed columns pruned. Solutions that collide after pruning
/// are merged keeping the smallest adversarial value, so the Pareto-set
/// cardinality is preserved.
pub fn zp_normal_form(
    spec: &PerturbationSpec,
    set: &SolutionSet,
    adversarial: &[f64],
) -> Result<ZpNormalForm> {
    if spec.n() != set.n() {
        return Err(Error::InvalidParameter("spec and set disagree on n"));
    }
    if adversarial.len() as u128 != set.len() {
        return Err(Error::InvalidParameter("adversarial must align with the enumeration order"));
    }
    let d = spec.d();
    let mut column_origin = Vec::new();
    let mut partition = Vec::with_capacity(d);
    for t in 1..=d {
        let mut part = IndexTuple::empty();
        for i in 1..=spec.n() {
            if spec.entry(t, i).is_some() {
                column_origin.push((t, i));
                part.push(column_origin.len());
            }
        }
        partition.push(part);
    }
    let m = column_origin.len();
    if m == 0 || m > 127 {
        return Err(Error::InvalidParameter("perturbed column count out of range"));
    }

    let mut entries = alloc::vec![alloc::vec![None; m]; d];
    for (col, &(t, i)) in column_origin.iter().enumerate() {
        entries[t - 1][col] = spec.entry(t, i).cloned();
    }
    let new_spec = PerturbationSpec::new(entries)?;

    let mut solutions: Vec<Solution> = Vec::new();
    let mut adv: Vec<f64> = Vec::new();
    let mut representative: Vec<usize> = Vec::new();
    for (idx, x) in set.iter().enumerate() {
        let mut y = Solution::zeros(m);
        for (col, &(_, i)) in column_origin.iter().enumerate() {
            if x.get(i) {
                y.set(col + 1, true);
            }
        }
        match solutions.iter().position(|s| *s == y) {
            Some(pos) => {
                if adversarial[idx] < adv[pos] {
                    adv[pos] = adversarial[idx];
                    representative[pos] = idx;
                }
            }
            None => {
                solutions.push(y);
                adv.push(adversarial[idx]);
                representative.push(idx);
            }
        }
    }

    Ok(ZpNormalForm {
        spec: new_spec,
        set: SolutionSet::explicit(solutions)?,
        adversarial: adv,
        partition,
        representative,
        column_origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::substream;
    use alloc::vec;

    #[test]
    fn phi_values() {
        assert_eq!(DensitySpec::uniform(0.0, 0.5).unwrap().phi(), 2.0);
        assert_eq!(DensitySpec::uniform(0.0, 2.0).unwrap().phi(), 0.5);
        // Area-1 triangle of half-width h peaks at 1/h.
        assert_eq!(DensitySpec::triangular(0.0, 0.25).unwrap().phi(), 4.0);
    }

    #[test]
    fn uniform_support_containment() {
        let spec = DensitySpec::uniform(0.25, 0.5).unwrap();
        let mut rng = substream(11, &[0]);
        for _ in 0..2000 {
            let x = spec.sample(&mut rng);
            assert!((0.0..=0.5).contains(&x));
        }
    }

    #[test]
    fn samples_stay_in_support() {
        let specs = [
            DensitySpec::triangular(-0.25, 0.5).unwrap(),
            DensitySpec::truncated_gaussian(0.8, 0.3).unwrap(),
            DensitySpec::bimodal((-0.75, -0.5), (0.25, 0.75)).unwrap(),
        ];
        let mut rng = substream(12, &[1]);
        for spec in &specs {
            let (lo, hi) = spec.support();
            for _ in 0..2000 {
                let x = spec.sample(&mut rng);
                assert!(x >= lo && x <= hi, "{spec:?} produced {x}");
            }
        }
    }

    #[test]
    fn bimodal_needs_disjoint_blocks() {
        assert!(DensitySpec::bimodal((-0.5, 0.0), (0.0, 0.5)).is_err());
        assert!(DensitySpec::bimodal((-0.5, 0.1), (0.0, 0.5)).is_err());
        let ok = DensitySpec::bimodal((-0.5, -0.25), (0.0, 0.5)).unwrap();
        assert!(!ok.quasiconcave());
    }

    #[test]
    fn staircase_uniform_single_slab() {
        // Density already an integral multiple of delta: one rectangle.
        let spec = DensitySpec::uniform(0.25, 0.5).unwrap();
        let stair = staircase_decompose(&spec, 2.0).unwrap();
        assert_eq!(stair.rectangles.len(), 1);
        assert_eq!(stair.rectangles[0].height, 2.0);
        assert!((stair.rectangles[0].interval.length() - 0.5).abs() < 1e-15);
        assert!((stair.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn staircase_triangular_four_slabs() {
        // ceil(1/0.25) = 4 stacked rectangles, heights summing to 1.0.
        let spec = DensitySpec::triangular(0.0, 1.0).unwrap();
        let stair = staircase_decompose(&spec, 0.25).unwrap();
        assert_eq!(stair.rectangles.len(), 4);
        assert!((stair.total_height() - 1.0).abs() < 1e-15);
        // Pointwise rounded density at interior points.
        let mut rng = substream(4, &[2]);
        for _ in 0..1000 {
            let x = -1.0 + 2.0 * stream::unit(&mut rng);
            let expected = libm::ceil(spec.pdf(x) / 0.25) * 0.25;
            assert!((stair.height_at(x) - expected).abs() < 1e-12, "x = {x}");
        }
        // Boundary points where f hits a level exactly.
        assert_eq!(stair.height_at(0.75), 0.25);
        assert_eq!(stair.height_at(-1.0), 0.0);
        assert_eq!(stair.height_at(0.0), 1.0);
    }

    #[test]
    fn staircase_mass_bound() {
        let specs = [
            DensitySpec::uniform(-0.3, 0.25).unwrap(),
            DensitySpec::triangular(0.5, 0.5).unwrap(),
            DensitySpec::truncated_gaussian(0.0, 0.2).unwrap(),
        ];
        for spec in &specs {
            let delta = spec.phi() / 64.0;
            let stair = staircase_decompose(spec, delta).unwrap();
            let mass = stair.mass();
            assert!(mass >= 1.0 - 1e-9 && mass <= 1.0 + 2.0 * delta + 1e-9, "mass {mass}");
        }
    }

    #[test]
    fn staircase_rejects_bimodal() {
        let spec = DensitySpec::bimodal((-0.5, -0.25), (0.25, 0.5)).unwrap();
        assert!(staircase_decompose(&spec, 0.1).is_err());
    }

    #[test]
    fn zp_normal_form_blowup_and_prune() {
        // d = 2, n = 3, shared perturbed column 1: 6-column blow-up pruned
        // to 4 columns.
        let u = DensitySpec::uniform(0.0, 1.0).unwrap();
        let spec = PerturbationSpec::new(vec![
            vec![Some(u.clone()), Some(u.clone()), None],
            vec![Some(u.clone()), None, Some(u.clone())],
        ])
        .unwrap();
        let set = SolutionSet::hypercube(3);
        let adv: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let nf = zp_normal_form(&spec, &set, &adv).unwrap();
        assert_eq!(nf.spec.n(), 4);
        assert!(nf.spec.is_zp_normal_form());
        assert_eq!(nf.partition.len(), 2);
        assert_eq!(nf.column_origin, vec![(1, 1), (1, 2), (2, 1), (2, 3)]);
        // All 8 solutions stay distinct: every column is perturbed somewhere.
        assert_eq!(nf.set.len(), 8);
    }

    #[test]
    fn zp_normal_form_merges_never_perturbed_columns() {
        // Column 3 never perturbed: solutions differing only there collapse
        // onto the one with the smaller adversarial value.
        let u = DensitySpec::uniform(0.0, 1.0).unwrap();
        let spec = PerturbationSpec::new(vec![vec![Some(u.clone()), Some(u.clone()), None]])
            .unwrap();
        let set = SolutionSet::explicit(vec![
            Solution::from_bits(&[true, false, false]),
            Solution::from_bits(&[true, false, true]),
        ])
        .unwrap();
        let nf = zp_normal_form(&spec, &set, &[5.0, 2.0]).unwrap();
        assert_eq!(nf.set.len(), 1);
        assert_eq!(nf.adversarial, vec![2.0]);
        assert_eq!(nf.representative, vec![1]);
    }

    #[test]
    fn normal_form_spec_is_identity_up_to_relabeling() {
        let u = DensitySpec::uniform(0.0, 1.0).unwrap();
        let spec = PerturbationSpec::new(vec![
            vec![Some(u.clone()), None, None],
            vec![None, Some(u.clone()), Some(u.clone())],
        ])
        .unwrap();
        assert!(spec.is_zp_normal_form());
        let set = SolutionSet::hypercube(3);
        let adv: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let nf = zp_normal_form(&spec, &set, &adv).unwrap();
        assert_eq!(nf.set.len(), 8);
        assert_eq!(nf.spec.n(), 3);
        assert_eq!(nf.column_origin, vec![(1, 1), (2, 2), (2, 3)]);
    }
}
