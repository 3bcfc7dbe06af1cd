//! Dirac-Frenkel (DF) and Dirac-Frenkel-Onsager (DFO) time integration of
//! nonlinear parametrizations of PDE solutions.
//!
//! The parameters `θ(t)` of an ansatz `û(θ, ·)` are evolved by solving, at
//! every step, the least-squares problem `min ‖J(θ) η − f(θ)‖` for the
//! parameter velocity. DFO additionally carries an exponentially filtered
//! history `m` of past minimal-norm velocities and injects it along the
//! (approximate) nullspace of `J`, which leaves the residual untouched but
//! lets the dynamics move through rank-deficient configurations.

pub mod dynamics;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod models;
pub mod reference;

pub use error::{Error, Result};
