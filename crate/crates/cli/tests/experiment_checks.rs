//! Harness-level checks: degenerate moment cells, bit-exact reruns with an
//! independent recount, CI scaling, the monotone-in-phi smoke check, tail
//! behaviour, and the path-trading experiment against two oracles.

use smooth_pareto::experiment::{
    self, AdvGen, CenterPolicy, DensityFamily, EdgeLength, EngineChoice, ExperimentConfig,
    SetFamily,
};
use smooth_pareto_core::density::{DensitySpec, PerturbationSpec};
use smooth_pareto_core::model::{Adversarial, IndexTuple, Instance, Solution};
use smooth_pareto_core::pareto::{pareto_bruteforce, pareto_count, Engine};
use smooth_pareto_core::sets::AsGraph;
use smooth_pareto_core::stream;

fn base_config() -> ExperimentConfig {
    ExperimentConfig {
        n_list: vec![10],
        phi_list: vec![2.0],
        d: 1,
        c: 2,
        trials: 500,
        seed: 12345,
        density: DensityFamily::Uniform,
        adversarial: AdvGen::FixedProfit,
        engine: EngineChoice::Auto,
        centers: CenterPolicy::Random,
        family: SetFamily::Hypercube,
    }
}

#[test]
fn singleton_set_has_constant_moments() {
    let mut cfg = base_config();
    cfg.family = SetFamily::Explicit(vec!["10".into()]);
    cfg.n_list = vec![2];
    cfg.trials = 50;
    let stats = experiment::estimate_moment(&cfg, 2, 2.0, 0).unwrap();
    assert_eq!(stats.mean, 1.0);
    assert_eq!(stats.variance, 0.0);
    assert!(stats.moments.iter().all(|&m| m == 1.0));
    assert_eq!((stats.po_min, stats.po_max), (1, 1));
}

#[test]
fn incomparable_pair_has_po_two() {
    // Disjoint supports with positive coefficients in [0.4, 0.6]: the
    // three-element support always outweighs the singleton in V^1, while
    // the lex adversarial always favours it; PO = 2 in every trial.
    let mut cfg = base_config();
    cfg.family = SetFamily::Explicit(vec!["1000".into(), "0111".into()]);
    cfg.n_list = vec![4];
    cfg.adversarial = AdvGen::Lex;
    cfg.centers = CenterPolicy::Fixed(0.5);
    cfg.phi_list = vec![5.0];
    cfg.trials = 200;
    let stats = experiment::estimate_moment(&cfg, 4, 5.0, 0).unwrap();
    assert_eq!(stats.mean, 2.0);
    assert_eq!(stats.variance, 0.0);
    assert_eq!((stats.po_min, stats.po_max), (2, 2));
}

#[test]
fn rerun_is_bit_exact_and_recount_agrees() {
    let cfg = base_config();
    let a = experiment::estimate_moment(&cfg, 10, 2.0, 0).unwrap();
    let b = experiment::estimate_moment(&cfg, 10, 2.0, 0).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.moments[1].to_bits(), b.moments[1].to_bits());
    assert_eq!(a.resamples, b.resamples);

    // Independent recount: re-derive 100 trial instances from the same
    // streams and count with the brute-force engine instead of auto.
    let spec = experiment::cell_spec_with(
        cfg.density, cfg.d, 10, 2.0, cfg.seed, 0, cfg.centers,
    )
    .unwrap();
    let set = experiment::cell_set(&cfg.family, 10).unwrap();
    let mut total = 0u64;
    for trial in 0..100 {
        let (inst, _) =
            experiment::draw_trial_on(&set, &spec, cfg.adversarial, cfg.seed, 0, trial).unwrap();
        let nu = pareto_count(&inst, Engine::NemhauserUllmann).unwrap();
        let bf = pareto_count(&inst, Engine::Bruteforce).unwrap();
        assert_eq!(nu, bf, "trial {trial}");
        total += bf;
    }
    assert!(total > 100, "fronts are nontrivial");
}

#[test]
fn doubling_trials_halves_ci_width() {
    let mut cfg = base_config();
    cfg.trials = 2000;
    let narrow = experiment::estimate_moment(&cfg, 10, 2.0, 0).unwrap();
    cfg.trials = 8000;
    let wide = experiment::estimate_moment(&cfg, 10, 2.0, 0).unwrap();
    let hw1 = (narrow.mean_ci_high - narrow.mean_ci_low) / 2.0;
    let hw2 = (wide.mean_ci_high - wide.mean_ci_low) / 2.0;
    // Quadrupling trials halves the width; allow 25% slack on the ratio.
    let ratio = hw2 / hw1;
    assert!((0.375..=0.625).contains(&ratio), "ratio {ratio}");
}

#[test]
fn centered_family_is_monotone_in_phi() {
    // Pure-noise perturbations around zero: the front is scale invariant
    // in phi, so the fitted mean never decreases beyond CI noise.
    let mut cfg = base_config();
    cfg.centers = CenterPolicy::Fixed(0.0);
    cfg.phi_list = vec![1.0, 2.0, 4.0, 8.0];
    cfg.trials = 400;
    let report = experiment::sweep(&cfg).unwrap();
    let cells = &report.cells;
    for pair in cells.windows(2) {
        let (a, b) = (&pair[0].stats, &pair[1].stats);
        let noise = (a.mean_ci_high - a.mean_ci_low) / 2.0
            + (b.mean_ci_high - b.mean_ci_low) / 2.0;
        assert!(
            b.mean >= a.mean - noise,
            "phi {} -> {}: mean dropped {} -> {}",
            a.phi,
            b.phi,
            a.mean,
            b.mean
        );
    }
}

#[test]
fn single_cell_grid_marks_fits_undefined() {
    let mut cfg = base_config();
    cfg.trials = 50;
    let report = experiment::sweep(&cfg).unwrap();
    assert_eq!(report.cells.len(), 1);
    assert!(report.fit_n.is_none());
    assert!(report.fit_phi.is_none());
    assert_eq!(report.upper_bound_exponent_n, 2);
    assert_eq!(report.upper_bound_exponent_phi, 1);
}

#[test]
fn tail_endpoints_and_monotonicity() {
    let mut cfg = base_config();
    cfg.n_list = vec![8];
    cfg.trials = 300;
    let size = 256.0;
    let report = experiment::concentration_tail(
        &cfg,
        &[1.0, 2.0, 4.0, 16.0, size + 1.0],
    )
    .unwrap();
    assert_eq!(report.rows[0].empirical, 1.0, "PO >= 1 always");
    assert_eq!(report.rows.last().unwrap().empirical, 0.0, "PO <= |S|");
    for pair in report.rows.windows(2) {
        assert!(pair[1].empirical <= pair[0].empirical, "tail is nonincreasing");
        assert!(pair[1].bound <= pair[0].bound + 1e-15);
    }
    // The bound is trivially 1 at desk-scale thresholds.
    assert_eq!(report.rows[0].bound, 1.0);
}

#[test]
fn path_trade_single_route() {
    let g = AsGraph::new(vec![1, 1, 2], vec![(0, 1), (1, 2)], 0, 2).unwrap();
    let lengths = vec![
        EdgeLength::Perturbed(DensitySpec::uniform(0.25, 0.5).unwrap()),
        EdgeLength::Perturbed(DensitySpec::uniform(0.25, 0.5).unwrap()),
    ];
    let report = experiment::path_trade_experiment(&g, &lengths, 500, 3).unwrap();
    assert_eq!(report.valid_paths, 1);
    assert_eq!(report.mean_po, 1.0);
    assert_eq!((report.po_min, report.po_max), (1, 1));
}

#[test]
fn path_trade_two_route_geometry() {
    // Two disjoint routes with one AS-1 edge and one AS-2 edge each:
    // independent costs, so domination happens with probability 1/2 and
    // both PO = 1 and PO = 2 occur.
    let g = AsGraph::new(
        vec![1, 1, 1, 2, 2, 2],
        vec![(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 5)],
        0,
        5,
    )
    .unwrap();
    let u = DensitySpec::uniform(0.25, 0.5).unwrap();
    let lengths: Vec<EdgeLength> = (0..6).map(|_| EdgeLength::Perturbed(u.clone())).collect();
    let report = experiment::path_trade_experiment(&g, &lengths, 1000, 5).unwrap();
    assert_eq!(report.valid_paths, 2);
    assert_eq!(report.po_min, 1, "domination observed");
    assert_eq!(report.po_max, 2, "trade-off observed");
    assert!(report.mean_po > 1.2 && report.mean_po < 1.8, "mean {}", report.mean_po);
}

#[test]
fn path_trade_three_as_chain_with_product_structure() {
    // Three ASes in sequence with independent parallel edges per segment:
    // eight valid paths, but the coordinatewise-minimum combination
    // dominates every other, so the front is always a single path.
    let g = AsGraph::new(
        vec![1, 1, 2, 2, 3, 3],
        vec![
            (0, 1),
            (0, 1),
            (1, 2),
            (2, 3),
            (2, 3),
            (3, 4),
            (4, 5),
            (4, 5),
        ],
        0,
        5,
    )
    .unwrap();
    let u = DensitySpec::uniform(0.25, 0.5).unwrap();
    let lengths: Vec<EdgeLength> = (0..8).map(|_| EdgeLength::Perturbed(u.clone())).collect();
    let report = experiment::path_trade_experiment(&g, &lengths, 400, 13).unwrap();
    assert_eq!(report.objectives, 3);
    assert_eq!(report.valid_paths, 8);
    assert_eq!(report.mean_po, 1.0, "product structure has a unique minimizer");
}

#[test]
fn path_trade_three_as_disjoint_routes() {
    // Two fully disjoint routes, each perturbed once per AS: the routes
    // dominate each other with probability 1/4, so PO = 2 about 3/4 of
    // the time.
    let g = AsGraph::new(
        vec![1, 1, 1, 2, 2, 2, 2, 3, 3, 3],
        vec![
            (0, 1),
            (0, 2),
            (1, 3),
            (2, 5),
            (3, 4),
            (5, 6),
            (4, 7),
            (6, 8),
            (7, 9),
            (8, 9),
        ],
        0,
        9,
    )
    .unwrap();
    let u = DensitySpec::uniform(0.25, 0.5).unwrap();
    let lengths: Vec<EdgeLength> = (0..10).map(|_| EdgeLength::Perturbed(u.clone())).collect();
    let report = experiment::path_trade_experiment(&g, &lengths, 2000, 13).unwrap();
    assert_eq!(report.objectives, 3);
    assert_eq!(report.valid_paths, 2);
    assert_eq!((report.po_min, report.po_max), (1, 2));
    assert!((1.6..=1.9).contains(&report.mean_po), "mean {}", report.mean_po);
}

#[test]
fn path_trade_no_valid_path_reports_zero() {
    // Target unreachable with monotone labels: PO = 0 per trial.
    let g = AsGraph::new(vec![1, 2, 1], vec![(0, 1), (1, 2)], 0, 2).unwrap();
    let u = DensitySpec::uniform(0.25, 0.5).unwrap();
    let lengths: Vec<EdgeLength> = (0..2).map(|_| EdgeLength::Perturbed(u.clone())).collect();
    let report = experiment::path_trade_experiment(&g, &lengths, 50, 1).unwrap();
    assert_eq!(report.valid_paths, 0);
    assert_eq!(report.mean_po, 0.0);
}

#[test]
fn path_trade_matches_oracles() {
    // A 10-edge graph with parallel routes in both ASes. Oracle 1 re-derives
    // the per-trial costs and counts maxima naively; oracle 2 embeds the
    // k-objective front as a (k-1)-linear + adversarial instance.
    let g = AsGraph::new(
        vec![1, 1, 1, 2, 2, 2],
        vec![
            (0, 1),
            (0, 2),
            (1, 2),
            (1, 3),
            (2, 4),
            (3, 4),
            (3, 5),
            (4, 5),
            (0, 5),
            (1, 4),
        ],
        0,
        5,
    )
    .unwrap();
    let u = DensitySpec::uniform(0.25, 0.5).unwrap();
    let lengths: Vec<EdgeLength> = (0..10).map(|_| EdgeLength::Perturbed(u.clone())).collect();
    let trials = 200u64;
    let seed = 77u64;
    let report = experiment::path_trade_experiment(&g, &lengths, trials, seed).unwrap();
    assert!(report.valid_paths >= 3, "needs a few routes: {}", report.valid_paths);

    let set = g.valid_paths().unwrap();
    let paths: Vec<Solution> = set.iter().collect();
    let mut naive_total = 0u64;
    let mut instance_total = 0u64;
    for trial in 0..trials {
        // Re-derive the trial draw (documented stream path).
        let mut rng = stream::substream(seed, &[5, trial]);
        let drawn: Vec<f64> = lengths
            .iter()
            .map(|l| match l {
                EdgeLength::Fixed(v) => *v,
                EdgeLength::Perturbed(spec) => spec.sample(&mut rng),
            })
            .collect();
        let cost = |p: &Solution, owner: usize| -> f64 {
            let mut acc = 0.0;
            for e in 0..g.edges.len() {
                if p.get(e + 1) && g.edge_as(e) == Some(owner) {
                    acc += drawn[e];
                }
            }
            acc
        };
        let vectors: Vec<Vec<f64>> =
            paths.iter().map(|p| vec![cost(p, 1), cost(p, 2)]).collect();
        // Naive maxima with duplicate collapse.
        let dominates = |a: &[f64], b: &[f64]| {
            a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
        };
        let naive = (0..vectors.len())
            .filter(|&i| {
                vectors[..i].iter().all(|v| *v != vectors[i])
                    && (0..vectors.len()).all(|j| !dominates(&vectors[j], &vectors[i]))
            })
            .count() as u64;
        naive_total += naive;

        // Instance embedding: C_1 linear over AS-1 edges, C_2 adversarial.
        let mut coeffs = vec![0.0f64; g.edges.len()];
        for e in 0..g.edges.len() {
            if g.edge_as(e) == Some(1) {
                coeffs[e] = drawn[e];
            }
        }
        let adversarial: Vec<f64> = paths.iter().map(|p| cost(p, 2)).collect();
        let inst =
            Instance::new(set.clone(), 1, coeffs, Adversarial::Explicit(adversarial)).unwrap();
        instance_total += pareto_bruteforce(&inst).unwrap().count() as u64;
    }
    let mean_naive = naive_total as f64 / trials as f64;
    let mean_instance = instance_total as f64 / trials as f64;
    assert_eq!(report.mean_po, mean_naive, "naive oracle");
    assert_eq!(report.mean_po, mean_instance, "instance embedding oracle");
}

#[test]
fn witness_check_passes_on_generated_instances() {
    // Plain instance.
    let spec = experiment::cell_spec(DensityFamily::Triangular, 2, 7, 2.0, 99, 0).unwrap();
    let (inst, _) = experiment::draw_trial_instance(&spec, AdvGen::RandomLinear, 99, 0, 0).unwrap();
    let report = experiment::witness_check(&inst, None).unwrap();
    assert!(report.passed, "{:?}", report.lines);

    // Zero-preserving normal form: d = 2 over n = 14 with contiguous classes.
    let d = 2;
    let class = d * (d + 1) + 1;
    let n = d * class;
    let u = DensitySpec::uniform(0.1, 0.4).unwrap();
    let mut entries = vec![vec![None; n]; d];
    let mut partition = Vec::new();
    for k in 0..d {
        let part: Vec<usize> = ((k * class + 1)..=(k + 1) * class).collect();
        for &i in &part {
            entries[k][i - 1] = Some(u.clone());
        }
        partition.push(IndexTuple::from(part));
    }
    let pspec = PerturbationSpec::new(entries).unwrap();
    let mut rng = stream::substream(5150, &[0]);
    let mut sols = Vec::new();
    while sols.len() < 14 {
        let mut s = Solution::zeros(n);
        for i in 1..=n {
            if stream::unit(&mut rng) < 0.5 {
                s.set(i, true);
            }
        }
        if !sols.contains(&s) {
            sols.push(s);
        }
    }
    let set = smooth_pareto_core::sets::SolutionSet::explicit(sols).unwrap();
    let coeffs = pspec.draw(&mut rng);
    let adv = Adversarial::Linear((0..n).map(|_| 2.0 * stream::unit(&mut rng) - 1.0).collect());
    let inst = Instance::new(set, d, coeffs, adv).unwrap();
    let report = experiment::witness_check(&inst, Some(&pspec)).unwrap();
    assert!(report.passed, "{:?}", report.lines);
    assert!(report.lines.iter().any(|l| l.name == "zp-identity"));
}
