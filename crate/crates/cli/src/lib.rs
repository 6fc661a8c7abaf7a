//! Experiment harness, file formats and report types around
//! `smooth-pareto-core`: instance/perturbation/graph JSON, Pareto CSV
//! export, moment estimation with tie resampling, parameter sweeps with
//! exponent fits, concentration tails and the path-trading experiment.

pub mod experiment;
pub mod fit;
pub mod formats;

pub use smooth_pareto_core as core;
