//! Expectation integrals, exact discrete sums, the finiteness threshold and
//! the asymptotic constant of `P(D(t) = 0)`.

mod cosine;
mod dp;
mod fit;
mod occupation;
mod threshold;

use std::f64::consts::PI;

use crate::walk::Dimension;

pub use cosine::{cosine_moment, CosineMoment};
pub use dp::{
    box_distribution, discrete_tail_estimate, dp_return_prob, expected_count_discrete, return_probabilities,
    BoxDistribution, BOX_MAX_CELLS, DP_MAX_DIM, DP_MAX_STEPS,
};
pub use fit::{default_grid, fit_leading_constant, AsymptoticFit};
pub use occupation::{
    continuous_count_tail, expected_occupation, occupation_between, occupation_curve, OccupationEstimate, TailEstimate,
};
pub use threshold::{classify_dimension, Growth, ThresholdVerdict, WindowIncrement};

pub use crate::quadrature::QuadratureResult;

/// `(d/(4π))^{d/2}`: the limit of `t^{d/2} P(D(t) = 0)` implied by
/// `I₀(z) e^{-z} ~ (2πz)^{-1/2}` at `z = 2t/d`.
pub fn derived_constant(d: Dimension) -> f64 {
    (d.as_f64() / (4.0 * PI)).powf(d.as_f64() / 2.0)
}

/// `(d/π)^{d/2}`: the constant obtained when the Gaussian approximation
/// integrates over the full period `[-π, π]` with a `1/π` prefactor.
/// Larger than [`derived_constant`] by exactly `2^d`.
pub fn paper_constant(d: Dimension) -> f64 {
    (d.as_f64() / PI).powf(d.as_f64() / 2.0)
}
