use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use smooth_pareto::experiment::{
    self, AdvGen, DensityFamily, EngineChoice, ExperimentConfig,
};
use smooth_pareto::formats;
use smooth_pareto_core::bounds::estimate_hypercube_prob;
use smooth_pareto_core::density::PerturbationSpec;
use smooth_pareto_core::linalg::{integer_rank, IntMatrix};
use smooth_pareto_core::pareto::{pareto_bruteforce, pareto_count};
use smooth_pareto_core::stream;

#[derive(Parser)]
#[command(
    name = "smooth-pareto",
    about = "Pareto-set enumeration, witness checks and smoothed-analysis experiments",
    version
)]
struct Cli {
    /// Master seed; every random quantity derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Trials per Monte-Carlo estimate.
    #[arg(long, global = true, default_value_t = 1000)]
    trials: u64,
    /// Enumeration engine: auto | bruteforce | nu.
    #[arg(long, global = true, default_value = "auto")]
    engine: String,
    /// Output path (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv | json.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw an instance from a density family and write its JSON.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value = "uniform")]
        density: String,
        #[arg(long, default_value_t = 2.0)]
        phi: f64,
        /// Adversarial objective: lex | fixed-profit | random-linear.
        #[arg(long, default_value = "fixed-profit")]
        adversarial: String,
        /// Also write the perturbation grid next to the instance.
        #[arg(long)]
        pspec_out: Option<PathBuf>,
    },
    /// Enumerate or count the Pareto set of an instance file.
    Pareto {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Run the witness property suite on one instance; exit 2 on violation.
    WitnessCheck {
        #[arg(long)]
        instance: PathBuf,
        /// Zero-preserving normal-form grid enabling the WitnessZ suite.
        #[arg(long)]
        pspec: Option<PathBuf>,
    },
    /// Estimate moments of the Pareto count for one cell.
    Moments {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        c: usize,
        #[arg(long, default_value_t = 2.0)]
        phi: f64,
        #[arg(long, default_value = "uniform")]
        density: String,
        #[arg(long, default_value = "fixed-profit")]
        adversarial: String,
    },
    /// Grid sweep with exponent fits; byte-stable CSV for fixed seeds.
    Sweep {
        /// JSON config file; command-line lists are used when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        phi_list: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        c: usize,
        #[arg(long, default_value = "uniform")]
        density: String,
        #[arg(long, default_value = "fixed-profit")]
        adversarial: String,
    },
    /// Monte-Carlo check of the hypercube probability bound; exit 2 when
    /// the estimate exceeds the bound beyond CI slack.
    ProbCheck {
        /// Number of variables (the matrix is square n x n).
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 2.0)]
        phi: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value = "uniform")]
        density: String,
        /// Corner map: const | step.
        #[arg(long, default_value = "step")]
        cmap: String,
    },
    /// Smoothed path-trading: mean Pareto-optimal valid paths.
    PathTrade {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        phi: f64,
    },
    /// Empirical tail of the Pareto count against the concentration bound.
    Tail {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 2.0)]
        phi: f64,
        #[arg(long, default_value = "uniform")]
        density: String,
        #[arg(long, default_value = "fixed-profit")]
        adversarial: String,
        /// Absolute thresholds, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,16")]
        thresholds: Vec<f64>,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    let engine = EngineChoice::parse(&cli.engine)?;
    match cli.command {
        Command::Generate { n, d, density, phi, adversarial, pspec_out } => {
            let family = DensityFamily::parse(&density)?;
            let advgen = AdvGen::parse(&adversarial)?;
            let spec = experiment::cell_spec(family, d, n, phi, cli.seed, 0)?;
            let (inst, _) =
                experiment::draw_trial_instance(&spec, advgen, cli.seed, 0, 0)?;
            if let Some(path) = pspec_out {
                let json = formats::PerturbationSpecJson::from_spec(&spec);
                std::fs::write(&path, serde_json::to_string_pretty(&json)?)?;
            }
            let json = formats::instance_to_json(&inst)?;
            emit(&cli.out, &serde_json::to_string_pretty(&json)?)?;
            Ok(0)
        }
        Command::Pareto { instance } => {
            let inst = formats::read_instance(&instance)?;
            match cli.format.as_str() {
                "csv" => {
                    let front = pareto_bruteforce(&inst)?;
                    emit(&cli.out, &formats::pareto_to_csv(&front, inst.d())?)?;
                }
                "json" => {
                    let count = pareto_count(&inst, engine.to_engine())?;
                    emit(
                        &cli.out,
                        &serde_json::to_string_pretty(&serde_json::json!({
                            "po": count,
                            "n": inst.n(),
                            "d": inst.d(),
                        }))?,
                    )?;
                }
                other => bail!("unknown format {other:?}"),
            }
            Ok(0)
        }
        Command::WitnessCheck { instance, pspec } => {
            let inst = formats::read_instance(&instance)?;
            let grid: Option<PerturbationSpec> = match pspec {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    let json: formats::PerturbationSpecJson = serde_json::from_str(&text)?;
                    Some(json.to_spec()?)
                }
                None => None,
            };
            let report = experiment::witness_check(&inst, grid.as_ref())?;
            for line in &report.lines {
                println!(
                    "{} {} ({})",
                    if line.passed { "PASS" } else { "FAIL" },
                    line.name,
                    line.detail
                );
            }
            if let Some(path) = &cli.out {
                std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
            }
            Ok(if report.passed { 0 } else { 2 })
        }
        Command::Moments { n, d, c, phi, density, adversarial } => {
            let cfg = ExperimentConfig {
                n_list: vec![n],
                phi_list: vec![phi],
                d,
                c,
                trials: cli.trials,
                seed: cli.seed,
                density: DensityFamily::parse(&density)?,
                adversarial: AdvGen::parse(&adversarial)?,
                engine,
                centers: Default::default(),
                family: Default::default(),
            };
            cfg.validate()?;
            let stats = experiment::estimate_moment(&cfg, n, phi, 0)?;
            emit(&cli.out, &serde_json::to_string_pretty(&stats)?)?;
            Ok(0)
        }
        Command::Sweep { config, n_list, phi_list, d, c, density, adversarial } => {
            let cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    serde_json::from_str::<ExperimentConfig>(&text)?
                }
                None => ExperimentConfig {
                    n_list,
                    phi_list,
                    d,
                    c,
                    trials: cli.trials,
                    seed: cli.seed,
                    density: DensityFamily::parse(&density)?,
                    adversarial: AdvGen::parse(&adversarial)?,
                    engine,
                    centers: Default::default(),
                    family: Default::default(),
                },
            };
            let report = experiment::sweep(&cfg)?;
            match cli.format.as_str() {
                "csv" => emit(&cli.out, &experiment::sweep_to_csv(&report)?)?,
                "json" => emit(&cli.out, &serde_json::to_string_pretty(&report)?)?,
                other => bail!("unknown format {other:?}"),
            }
            Ok(0)
        }
        Command::ProbCheck { n, k, phi, eps, density, cmap } => {
            let family = DensityFamily::parse(&density)?;
            if k == 0 || k > n {
                bail!("need 1 <= k <= n");
            }
            let a = random_full_rank_matrix(n, cli.seed)?;
            let mut rng = stream::substream(cli.seed, &[3]);
            let densities: Vec<_> = (0..n)
                .map(|_| {
                    experiment::density_for(family, phi, 2.0 * stream::unit(&mut rng) - 1.0)
                })
                .collect::<Result<_>>()?;
            let cmap_fn: Box<dyn Fn(&[f64]) -> Vec<f64>> = match cmap.as_str() {
                "const" => Box::new(move |_: &[f64]| vec![0.0; k]),
                "step" => Box::new(move |y: &[f64]| {
                    let base = if y.first().copied().unwrap_or(0.0) > 0.0 { 0.0 } else { -0.5 };
                    vec![base; k]
                }),
                other => bail!("unknown cmap {other:?}"),
            };
            let est =
                estimate_hypercube_prob(&a, &densities, k, &cmap_fn, eps, cli.trials, cli.seed)?;
            let quasiconcave = family.quasiconcave();
            let bound =
                smooth_pareto_core::bounds::hypercube_event_bound(n, k, phi, eps, quasiconcave);
            let ok = est.estimate - 3.0 * est.ci_halfwidth() <= bound;
            emit(
                &cli.out,
                &serde_json::to_string_pretty(&serde_json::json!({
                    "estimate": est.estimate,
                    "ci_low": est.ci_low,
                    "ci_high": est.ci_high,
                    "bound": bound,
                    "quasiconcave": quasiconcave,
                    "respected": ok,
                }))?,
            )?;
            Ok(if ok { 0 } else { 2 })
        }
        Command::PathTrade { graph, phi } => {
            let text = std::fs::read_to_string(&graph)?;
            let json: formats::AsGraphJson = serde_json::from_str(&text)?;
            let g = formats::graph_from_json(&json)?;
            let lengths: Vec<experiment::EdgeLength> = json
                .edges
                .iter()
                .map(|e| edge_length(e, phi))
                .collect::<Result<_>>()?;
            let report = experiment::path_trade_experiment(&g, &lengths, cli.trials, cli.seed)?;
            emit(&cli.out, &serde_json::to_string_pretty(&report)?)?;
            Ok(0)
        }
        Command::Tail { n, d, phi, density, adversarial, thresholds } => {
            let cfg = ExperimentConfig {
                n_list: vec![n],
                phi_list: vec![phi],
                d,
                c: 2,
                trials: cli.trials,
                seed: cli.seed,
                density: DensityFamily::parse(&density)?,
                adversarial: AdvGen::parse(&adversarial)?,
                engine,
                centers: Default::default(),
                family: Default::default(),
            };
            let report = experiment::concentration_tail(&cfg, &thresholds)?;
            emit(&cli.out, &serde_json::to_string_pretty(&report)?)?;
            Ok(0)
        }
    }
}

/// A random square `{-1, 0, 1}` matrix of full exact rank.
fn random_full_rank_matrix(n: usize, seed: u64) -> Result<IntMatrix> {
    for attempt in 0..100u64 {
        let mut rng = stream::substream(seed, &[2, attempt]);
        let mut a = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = (stream::unit(&mut rng) * 3.0) as i128 - 1;
            }
        }
        if integer_rank(&a)? == n {
            return Ok(a);
        }
    }
    bail!("could not draw a full-rank matrix")
}

fn edge_length(e: &formats::EdgeJson, phi: f64) -> Result<experiment::EdgeLength> {
    if let Some(len) = e.length {
        return Ok(experiment::EdgeLength::Fixed(len));
    }
    if let Some(json) = &e.density {
        if let Some(spec) = json.to_spec()? {
            return Ok(experiment::EdgeLength::Perturbed(spec));
        }
        return Ok(experiment::EdgeLength::Fixed(0.0));
    }
    // Default: uniform on [0, 1/phi], phi-bounded with support in [0, 1].
    Ok(experiment::EdgeLength::Perturbed(
        smooth_pareto_core::density::DensitySpec::uniform(0.5 / phi, 1.0 / phi)?,
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            // Configuration, parse and IO problems.
            ExitCode::from(3)
        }
    }
}
