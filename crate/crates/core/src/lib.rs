//! Core library for smoothed analysis of multiobjective binary optimization.
//!
//! Instances consist of `d` linear objectives with coefficients in `[-1, 1]`
//! plus one arbitrary injective objective, minimized over a set of binary
//! solution vectors. The linear coefficients are drawn from phi-bounded
//! densities; this crate provides the instance model, Pareto-set enumeration
//! engines, the witness/certificate machinery (including the zero-preserving
//! variant), and evaluators plus Monte-Carlo estimators for the associated
//! probability bounds.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the CLI
//! live in the companion `smooth-pareto` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod density;
pub mod error;
pub mod linalg;
pub mod model;
pub mod pareto;
pub mod sets;
pub mod stream;
pub mod witness;
pub mod zp;

pub use error::Error;
pub use model::{Adversarial, EpsilonGrid, IndexTuple, Instance, ObjectiveVector, Solution};
pub use sets::SolutionSet;

pub use rand_chacha;
pub use rand_core;
