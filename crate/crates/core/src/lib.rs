//! Exact simulation of hybrid quantum-classical query algorithms for
//! unstructured search, together with the progress measures used to bound
//! them.
//!
//! The crate is organised bottom-up:
//!
//! - [`statespace`]: dense complex vectors and density operators over an
//!   index register of size `n` followed by a growing qubit workspace, plus
//!   trace distance and fidelity.
//! - [`oracles`]: the classical, pseudo-classical and quantum oracle
//!   channels acting on weighted ensembles of pure branches.
//! - [`runner`]: the four-component hybrid algorithm model and exact
//!   success probabilities for the finding and detection problems.
//! - [`progress`]: dominant pure components, the `H`, `A`, `B` progress
//!   measures, witnesses, the `a_t`/`b_t` recursion and per-step checks.
//! - [`baselines`]: reference algorithms with closed-form success.
//! - [`optimizer`]: derivative-free search over symmetric algorithm
//!   families.
//! - [`density_sim`]: an independent Kraus-sum density-matrix simulator
//!   used to cross-check the branch simulator.
//!
//! With the default `parallel` feature, sweeps over inputs, branches and
//! restarts are spread over a rayon pool. Without it, or inside
//! [`par::sequential`], the same code runs on the calling thread and
//! produces bit-identical results.

#![forbid(unsafe_code)]

pub mod baselines;
pub mod density_sim;
pub mod error;
pub mod optimizer;
pub mod oracles;
pub mod par;
pub mod progress;
pub mod random;
pub mod runner;
pub mod statespace;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;

/// Absolute slack used by every bound and claim check.
pub const CHECK_SLACK: f64 = 1e-9;
