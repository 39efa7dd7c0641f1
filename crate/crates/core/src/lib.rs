//! Collision statistics for two independent simple random walks on the
//! integer lattice ℤᵈ.
//!
//! The walks collide exactly when their difference returns to the origin.
//! Running both walks on Poisson clocks makes each coordinate of the
//! difference an independent continuous-time walk, so the collision
//! probability at time `t` is `(e^{-z} I₀(z))^d` with `z = 2t/d`.
//!
//! The crate provides:
//!
//! * [`walk`]: lattice types and exact simulators for discrete-time and
//!   continuous-time walker pairs.
//! * [`bessel`]: the scaled kernel `e^{-z} I₀(z)` and the collision
//!   probabilities built from it, with an independent quadrature oracle.
//! * [`analysis`]: expectation integrals, exact return probabilities by
//!   dynamic programming, the recurrence/transience threshold, and
//!   extraction of the asymptotic constant.
//! * [`montecarlo`]: deterministic parallel estimators with standard errors.
//! * [`cli`]: the `collide` command-line front end.

pub mod analysis;
pub mod bessel;
pub mod cli;
mod error;
pub mod montecarlo;
pub mod quadrature;
pub mod walk;

pub use error::{Error, Result};
pub use walk::{Dimension, SeedSpec};
