//! Spiked matrix and tensor models for long random matrices.
//!
//! The crate bundles four layers:
//!
//! * [`linalg`]: dense and matrix-free linear algebra (power iteration,
//!   symmetric eigenvalues, shifted Gram solves);
//! * [`mp_law`]: the Marchenko–Pastur family indexed by `phi = sqrt(m / n)`,
//!   its singular-value pushforward, quantiles and Stieltjes transform;
//! * [`bbp`]: closed-form outlier and overlap predictions for rank-one
//!   perturbations, the `beta` estimator and the resolvent master equation;
//! * [`tensor`]: spiked tensors, unfoldings and the per-axis unfolding
//!   recovery;
//!
//! plus [`harness`], a seeded Monte Carlo driver that compares empirics with
//! the predictions.

pub mod bbp;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod mp_law;
mod quad;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};
