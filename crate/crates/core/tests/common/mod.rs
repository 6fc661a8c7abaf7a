//! Shared seeded instance generators for the integration suites.
#![allow(dead_code)]

use smooth_pareto_core::density::{DensitySpec, PerturbationSpec};
use smooth_pareto_core::model::{Adversarial, IndexTuple, Instance, Solution};
use smooth_pareto_core::sets::SolutionSet;
use smooth_pareto_core::stream;
use rand_core::RngCore;

/// Rotates through the density families; `phi` is exact for the uniform and
/// triangular members and approximate for the truncated Gaussian.
pub fn mixed_density(rng: &mut impl RngCore, phi: f64, include_bimodal: bool) -> DensitySpec {
    let width = 1.0 / phi;
    let center = (stream::unit(rng) - 0.5) * (2.0 - 2.0 * width).max(0.0);
    let pick = (stream::unit(rng) * if include_bimodal { 4.0 } else { 3.0 }) as u32;
    match pick {
        0 => DensitySpec::uniform(center, width).unwrap(),
        1 => DensitySpec::triangular(center, width.min(1.0)).unwrap(),
        2 => DensitySpec::truncated_gaussian(center.clamp(-0.9, 0.9), 0.5 / phi).unwrap(),
        _ => {
            let len = (0.5 / phi).min(0.4);
            let a = -0.9 + 0.3 * stream::unit(rng);
            let b = 0.2 + 0.3 * stream::unit(rng);
            DensitySpec::bimodal((a, a + len), (b, b + len)).unwrap()
        }
    }
}

pub fn dense_spec(d: usize, n: usize, phi: f64, seed: u64) -> PerturbationSpec {
    let mut rng = stream::substream(seed, &[201]);
    let entries = (0..d)
        .map(|_| (0..n).map(|_| Some(mixed_density(&mut rng, phi, false))).collect())
        .collect();
    PerturbationSpec::new(entries).unwrap()
}

pub fn random_linear_adversarial(n: usize, rng: &mut impl RngCore) -> Adversarial {
    Adversarial::Linear((0..n).map(|_| 2.0 * stream::unit(rng) - 1.0).collect())
}

/// Random hypercube instance with mixed quasiconcave densities and a random
/// linear adversarial objective. Retries until the working epsilon exists.
pub fn random_hypercube_instance(n: usize, d: usize, phi: f64, seed: u64) -> Instance {
    for attempt in 0..20u64 {
        let spec = dense_spec(d, n, phi, stream::derive_seed(seed, &[attempt]));
        let mut rng = stream::substream(seed, &[7, attempt]);
        let coeffs = spec.draw(&mut rng);
        let adv = random_linear_adversarial(n, &mut rng);
        let inst = Instance::new(SolutionSet::hypercube(n), d, coeffs, adv).unwrap();
        if inst.working_epsilon().unwrap().is_some() {
            return inst;
        }
    }
    panic!("could not draw a tie-free instance");
}

/// Random explicit solution set of the given size (no duplicates).
pub fn random_explicit_set(n: usize, size: usize, rng: &mut impl RngCore) -> SolutionSet {
    let mut sols: Vec<Solution> = Vec::new();
    while sols.len() < size {
        let mut s = Solution::zeros(n);
        for i in 1..=n {
            if stream::unit(rng) < 0.5 {
                s.set(i, true);
            }
        }
        if !sols.contains(&s) {
            sols.push(s);
        }
    }
    SolutionSet::explicit(sols).unwrap()
}

pub struct ZpInstance {
    pub instance: Instance,
    pub partition: Vec<IndexTuple>,
}

/// Zero-preserving normal-form instance over an explicit set: contiguous
/// classes of size d(d+1)+1, with planted pairs agreeing on one class so
/// that partial restarts occur often.
pub fn random_zp_instance(d: usize, size: usize, phi: f64, seed: u64) -> ZpInstance {
    let class = d * (d + 1) + 1;
    let n = d * class;
    'attempt: for attempt in 0..50u64 {
        let mut rng = stream::substream(seed, &[31, attempt]);
        // Per-class pools of block patterns: solutions sharing a block agree
        // on that class, which is what drives the partial restarts.
        let pool_size = 3usize;
        let pools: Vec<Vec<Vec<bool>>> = (0..d)
            .map(|_| {
                (0..pool_size)
                    .map(|_| (0..class).map(|_| stream::unit(&mut rng) < 0.5).collect())
                    .collect()
            })
            .collect();
        let mut sols: Vec<Solution> = Vec::new();
        while sols.len() < size {
            let mut s = Solution::zeros(n);
            for k in 0..d {
                let fresh = stream::unit(&mut rng) < 0.25;
                let block: Vec<bool> = if fresh {
                    (0..class).map(|_| stream::unit(&mut rng) < 0.5).collect()
                } else {
                    pools[k][(stream::unit(&mut rng) * pool_size as f64) as usize].clone()
                };
                for (offset, &bit) in block.iter().enumerate() {
                    if bit {
                        s.set(k * class + offset + 1, true);
                    }
                }
            }
            if !sols.contains(&s) {
                sols.push(s);
            }
        }
        let partition: Vec<IndexTuple> = (0..d)
            .map(|k| IndexTuple::from(((k * class + 1)..=(k + 1) * class).collect::<Vec<_>>()))
            .collect();
        let mut entries = vec![vec![None; n]; d];
        for (k, part) in partition.iter().enumerate() {
            for i in part.iter() {
                entries[k][i - 1] = Some(mixed_density(&mut rng, phi, false));
            }
        }
        let spec = PerturbationSpec::new(entries).unwrap();
        let coeffs = spec.draw(&mut rng);
        let adv = random_linear_adversarial(n, &mut rng);
        let Ok(inst) = Instance::new(SolutionSet::explicit(sols).unwrap(), d, coeffs, adv) else {
            continue 'attempt;
        };
        if inst.working_epsilon_zp(&partition).unwrap().is_some() {
            return ZpInstance { instance: inst, partition };
        }
    }
    panic!("could not draw a tie-free zero-preserving instance");
}
