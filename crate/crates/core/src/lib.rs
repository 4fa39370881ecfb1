//! Harmonic analysis on the infinite symmetric group at desk scale.
//!
//! - [`partitions`]: Young diagrams, dimensions, Frobenius coordinates, Thoma embedding.
//! - [`permutations`]: `S(n)`, canonical projection, virtual-permutation coordinates, cocycle.
//! - [`ewens`]: Ewens measures and their transformation properties.
//! - [`characters`]: Thoma characters, Murnaghan-Nakayama, `χ_z`, Gram positivity.
//! - [`zmeasure`]: z-measures, growth sampling, mixed measures, lattice correlations.
//! - [`special`]: Whittaker functions, the Whittaker kernel, the L-operator, `q(z)`.
//! - [`pointproc`]: point configurations, lifting, correlation estimators.
//! - [`experiment`]: end-to-end scaling-limit experiments.
//! - [`verify`]: verification suites used by the CLI and the acceptance run.

pub mod arith;
pub mod characters;
pub mod error;
pub mod ewens;
pub mod experiment;
pub mod partitions;
pub mod permutations;
pub mod pointproc;
pub mod rng;
pub mod special;
pub mod stats;
pub mod verify;
pub mod zmeasure;

pub use error::{Error, Result};
