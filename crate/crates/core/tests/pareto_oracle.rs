//! Oracle agreement for the enumeration engines: the Nemhauser-Ullmann list
//! algorithm against the definitional brute force, an independent
//! double-loop filter against the incremental front, and the restriction
//! monotonicity used by the zero-preserving witness.

mod common;

use smooth_pareto_core::model::{Adversarial, Instance, Solution};
use smooth_pareto_core::pareto::{
    distinct_pareto_vectors, nemhauser_ullmann, pareto_bruteforce, pareto_count, verify_front,
    Engine,
};
use smooth_pareto_core::sets::SolutionSet;
use smooth_pareto_core::stream;

/// Independent O(|S|^2) filter, straight from the dominance definition with
/// the same adversarial tie-break. Kept free of the incremental-front code
/// path on purpose.
fn double_loop_front(inst: &Instance) -> Vec<Solution> {
    let all: Vec<Solution> = inst.set().iter().collect();
    let vecs: Vec<(Vec<f64>, f64, u128)> = all
        .iter()
        .map(|x| {
            let v = inst.evaluate(x, None).unwrap();
            (v.linear, v.adversarial, x.mask())
        })
        .collect();
    let dominates = |a: &(Vec<f64>, f64, u128), b: &(Vec<f64>, f64, u128)| -> bool {
        let mut strict = false;
        for (x, y) in a.0.iter().zip(&b.0) {
            if x > y {
                return false;
            }
            if x < y {
                strict = true;
            }
        }
        if a.1 > b.1 || (a.1 == b.1 && a.2 > b.2) {
            return false;
        }
        if a.1 < b.1 || (a.1 == b.1 && a.2 < b.2) {
            strict = true;
        }
        strict
    };
    all.iter()
        .enumerate()
        .filter(|(i, _)| (0..all.len()).all(|j| j == *i || !dominates(&vecs[j], &vecs[*i])))
        .map(|(_, s)| *s)
        .collect()
}

fn nu_instance(weights: &[f64], profits: &[f64]) -> Instance {
    let n = weights.len();
    Instance::new(
        SolutionSet::hypercube(n),
        1,
        weights.to_vec(),
        Adversarial::Linear(profits.iter().map(|p| -p).collect()),
    )
    .unwrap()
}

#[test]
fn bruteforce_matches_double_loop_filter() {
    for seed in 0..40u64 {
        let inst = common::random_hypercube_instance(7 + (seed % 4) as usize, 2, 2.0, seed);
        let front = pareto_bruteforce(&inst).unwrap();
        let oracle = double_loop_front(&inst);
        let got: Vec<Solution> = front.solutions().copied().collect();
        assert_eq!(got, oracle, "seed {seed}");
        assert!(verify_front(&inst, &front).unwrap());
    }
}

#[test]
fn nu_matches_bruteforce_exactly() {
    let mut rng = stream::substream(42, &[1]);
    for trial in 0..300u64 {
        let n = 4 + (trial % 9) as usize;
        let weights: Vec<f64> = (0..n).map(|_| 2.0 * stream::unit(&mut rng) - 1.0).collect();
        let profits: Vec<f64> = (0..n).map(|_| 2.0 * stream::unit(&mut rng) - 1.0).collect();
        let nu = nemhauser_ullmann(&weights, &profits).unwrap();
        let inst = nu_instance(&weights, &profits);
        let bf = pareto_bruteforce(&inst).unwrap();
        let nu_sols: Vec<u128> = nu.solutions().map(Solution::mask).collect();
        let bf_sols: Vec<u128> = bf.solutions().map(Solution::mask).collect();
        assert_eq!(nu_sols, bf_sols, "trial {trial}");
        // Values agree bit for bit: both fold in ascending item order.
        for (a, b) in nu.members.iter().zip(&bf.members) {
            assert_eq!(a.objectives.linear, b.objectives.linear);
            assert_eq!(a.objectives.adversarial.to_bits(), b.objectives.adversarial.to_bits());
        }
    }
}

#[test]
fn nu_three_items_against_exhaustive_scan() {
    let mut rng = stream::substream(17, &[2]);
    for _ in 0..200 {
        let weights: Vec<f64> = (0..3).map(|_| stream::unit(&mut rng)).collect();
        let profits: Vec<f64> = (0..3).map(|_| stream::unit(&mut rng)).collect();
        let nu = nemhauser_ullmann(&weights, &profits).unwrap();
        let oracle = double_loop_front(&nu_instance(&weights, &profits));
        let got: Vec<Solution> = nu.solutions().copied().collect();
        assert_eq!(got, oracle);
    }
}

#[test]
fn nu_item_order_is_irrelevant_for_dyadic_weights() {
    // Dyadic values make all subset sums exact, and the per-item low-bit
    // tags keep distinct subsets value-distinct (ties would legitimately
    // resolve to permutation-dependent representatives).
    let mut rng = stream::substream(23, &[3]);
    for _ in 0..50 {
        let n = 6;
        let mut item = 0;
        let mut dyadic = |rng: &mut _| {
            item += 1;
            ((stream::unit(rng) * 64.0) as i32 - 32) as f64 / 64.0
                + (0.5f64).powi(20 + (item % n) as i32)
        };
        let weights: Vec<f64> = (0..n).map(|_| dyadic(&mut rng)).collect();
        let profits: Vec<f64> = (0..n).map(|_| dyadic(&mut rng)).collect();
        let base = nemhauser_ullmann(&weights, &profits).unwrap();
        // Reverse permutation: item i (1-based) becomes item n + 1 - i.
        let rw: Vec<f64> = weights.iter().rev().copied().collect();
        let rp: Vec<f64> = profits.iter().rev().copied().collect();
        let perm = nemhauser_ullmann(&rw, &rp).unwrap();
        let mut base_masks: Vec<u128> = base.solutions().map(Solution::mask).collect();
        let mut perm_masks: Vec<u128> = perm
            .solutions()
            .map(|s| {
                let mut t = Solution::zeros(n);
                for i in 1..=n {
                    if s.get(i) {
                        t.set(n + 1 - i, true);
                    }
                }
                t.mask()
            })
            .collect();
        base_masks.sort_unstable();
        perm_masks.sort_unstable();
        assert_eq!(base_masks, perm_masks);
    }
}

#[test]
fn auto_engine_agrees_with_bruteforce() {
    for seed in 0..50u64 {
        let inst = common::random_hypercube_instance(8, 1, 2.0, 1000 + seed);
        let auto = pareto_count(&inst, Engine::Auto).unwrap();
        let nu = pareto_count(&inst, Engine::NemhauserUllmann).unwrap();
        let bf = pareto_count(&inst, Engine::Bruteforce).unwrap();
        assert_eq!(auto, bf);
        assert_eq!(nu, bf);
        assert!(bf >= 1 && bf <= 256);
    }
}

/// Every Pareto-optimal solution stays Pareto-optimal when the set is
/// restricted to solutions agreeing with it on some classes and those
/// objectives are dropped — the restriction used by the zero-preserving
/// recursion.
#[test]
fn pareto_optimality_survives_class_restriction() {
    for seed in 0..30u64 {
        let zp = common::random_zp_instance(2, 24, 2.0, seed);
        let inst = &zp.instance;
        let front = pareto_bruteforce(inst).unwrap();
        for member in &front.members {
            let x = member.solution;
            for k_eq in [&[1usize][..], &[2], &[1, 2]] {
                // Restrict to solutions agreeing with x on the classes of
                // k_eq; check Pareto-optimality among remaining objectives.
                let survivors: Vec<Solution> = inst
                    .set()
                    .iter()
                    .filter(|z| {
                        k_eq.iter().all(|&k| z.agrees_on(&x, &zp.partition[k - 1]))
                    })
                    .collect();
                assert!(survivors.contains(&x));
                let rest: Vec<usize> =
                    (1..=inst.d()).filter(|k| !k_eq.contains(k)).collect();
                let value = |z: &Solution| -> (Vec<f64>, f64, u128) {
                    let v = inst.evaluate(z, None).unwrap();
                    (
                        rest.iter().map(|&k| v.linear[k - 1]).collect(),
                        v.adversarial,
                        z.mask(),
                    )
                };
                let vx = value(&x);
                let dominated = survivors.iter().any(|z| {
                    if *z == x {
                        return false;
                    }
                    let vz = value(z);
                    let mut strict = false;
                    for (a, b) in vz.0.iter().zip(&vx.0) {
                        if a > b {
                            return false;
                        }
                        if a < b {
                            strict = true;
                        }
                    }
                    if vz.1 > vx.1 || (vz.1 == vx.1 && vz.2 > vx.2) {
                        return false;
                    }
                    strict || vz.1 < vx.1 || (vz.1 == vx.1 && vz.2 < vx.2)
                });
                assert!(!dominated, "seed {seed}: restriction broke Pareto-optimality");
            }
        }
    }
}

#[test]
fn vector_front_matches_naive_filter() {
    let mut rng = stream::substream(5, &[9]);
    for _ in 0..100 {
        let count = 2 + (stream::unit(&mut rng) * 20.0) as usize;
        let dim = 2 + (stream::unit(&mut rng) * 2.0) as usize;
        let points: Vec<Vec<f64>> = (0..count)
            .map(|_| (0..dim).map(|_| (stream::unit(&mut rng) * 4.0).round() / 4.0).collect())
            .collect();
        let got = distinct_pareto_vectors(&points);
        // Naive: keep first occurrence of each distinct undominated vector.
        let dominates = |a: &[f64], b: &[f64]| {
            a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
        };
        let want: Vec<usize> = (0..count)
            .filter(|&i| {
                points[..i].iter().all(|q| *q != points[i])
                    && (0..count).all(|j| !dominates(&points[j], &points[i]))
            })
            .collect();
        assert_eq!(got, want);
    }
}
