//! The scaled kernel `e^{-z} I₀(z)` and the return and collision
//! probabilities of the Poissonized difference walk.
//!
//! Raw `I₀` is never formed: it overflows near `z ≈ 700`, while every
//! probability here is a product of scaled factors.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureResult, Tolerance};
use crate::walk::Dimension;

/// Below this argument the power series is summed; above it the
/// large-argument expansion is used.
pub const Z_SWITCH: f64 = 30.0;

/// Which expansion produced a [`ScaledBesselValue`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Series,
    Asymptotic,
}

/// `e^{-z} I₀(z)` with a bound on its absolute truncation and rounding error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledBesselValue {
    pub value: f64,
    pub regime: Regime,
    pub err_bound: f64,
}

/// A probability in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Probability(f64);

impl Probability {
    pub fn new(p: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p) {
            Ok(Probability(p))
        } else {
            Err(Error::invalid(format!("probability out of range: {p}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Probability::new(p)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

fn check_argument(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(format!(
            "{name} must be finite and nonnegative, got {x}"
        )));
    }
    Ok(())
}

/// `e^{-z} I₀(z)`, by power series for `z ≤ 30` and by the large-argument
/// expansion beyond.
pub fn i0_scaled(z: f64) -> Result<ScaledBesselValue> {
    check_argument("z", z)?;
    if z <= Z_SWITCH {
        Ok(series(z))
    } else {
        Ok(asymptotic(z))
    }
}

/// Power series `e^{-z} Σ (z/2)^{2k}/(k!)²`, with the exponential folded into
/// the first term. Accurate while `e^{-z}` does not underflow.
pub fn i0_scaled_series(z: f64) -> Result<ScaledBesselValue> {
    check_argument("z", z)?;
    if z > 700.0 {
        return Err(Error::invalid(format!("series form underflows for z = {z}")));
    }
    Ok(series(z))
}

/// Large-argument expansion `(2πz)^{-1/2} Σ ((2k-1)!!)² / (k! (8z)^k)`,
/// truncated at its smallest term.
pub fn i0_scaled_asymptotic(z: f64) -> Result<ScaledBesselValue> {
    check_argument("z", z)?;
    if z < 10.0 {
        return Err(Error::invalid(format!("asymptotic form is not accurate for z = {z}")));
    }
    Ok(asymptotic(z))
}

fn series(z: f64) -> ScaledBesselValue {
    let q = 0.25 * z * z;
    let mut term = (-z).exp();
    let mut sum = term;
    let mut k = 0.0_f64;
    loop {
        let ratio = q / ((k + 1.0) * (k + 1.0));
        term *= ratio;
        sum += term;
        k += 1.0;
        if ratio < 1.0 && term <= 1e-18 * sum {
            break;
        }
    }
    // Remaining terms shrink at least geometrically with the next ratio.
    let r = q / ((k + 1.0) * (k + 1.0));
    let tail = term * r / (1.0 - r);
    let rounding = (2.0 * k + 3.0) * f64::EPSILON * sum;
    ScaledBesselValue {
        value: sum,
        regime: Regime::Series,
        err_bound: tail + rounding,
    }
}

fn asymptotic(z: f64) -> ScaledBesselValue {
    let pre = 1.0 / (2.0 * PI * z).sqrt();
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut k = 1.0_f64;
    let omitted = loop {
        let next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * z);
        if next >= term {
            break next;
        }
        sum += next;
        term = next;
        k += 1.0;
        if term <= 1e-17 * sum {
            break term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * z);
        }
    };
    let value = pre * sum;
    // Exponentially small contribution from the θ = π endpoint.
    let reflected = pre * (-2.0 * z).exp();
    let rounding = (2.0 * k + 3.0) * f64::EPSILON * value;
    ScaledBesselValue {
        value,
        regime: Regime::Asymptotic,
        err_bound: 2.0 * pre * omitted + reflected + rounding,
    }
}

/// `(1/π) ∫₀^π e^{z(cos θ − 1)} dθ` by adaptive quadrature, to absolute
/// accuracy `1e-14`. Independent of [`i0_scaled`]; used as its oracle.
pub fn i0_quadrature(z: f64) -> Result<f64> {
    i0_quadrature_detailed(z).map(|r| r.value)
}

/// [`i0_quadrature`] with the quadrature diagnostics.
pub fn i0_quadrature_detailed(z: f64) -> Result<QuadratureResult> {
    check_argument("z", z)?;
    // cos θ − 1 = −2 sin²(θ/2), without cancellation near θ = 0.
    let integrand = |theta: f64| {
        let s = (0.5 * theta).sin();
        Ok((-2.0 * z * s * s).exp())
    };
    let raw = quadrature::integrate(integrand, &[0.0, PI], Tolerance::absolute(1e-14 * PI), 4000)?;
    Ok(QuadratureResult {
        value: raw.value / PI,
        err_estimate: raw.err_estimate / PI,
        ..raw
    })
}

/// `P(D_j(t) = 0) = e^{-2t/d} I₀(2t/d)`: one coordinate of the difference
/// walk sits at zero at time `t`.
pub fn coordinate_return_prob(t: f64, d: Dimension) -> Result<Probability> {
    coordinate_return_kernel(t, d).map(|v| Probability(v.value))
}

fn coordinate_return_kernel(t: f64, d: Dimension) -> Result<ScaledBesselValue> {
    check_argument("t", t)?;
    i0_scaled(2.0 * t / d.as_f64())
}

/// Direct truncation at `k = K` of the Poisson-mass × central-binomial sum
/// `Σ e^{-λ} λ^{2k}/(2k)! · C(2k,k) 4^{-k}`, `λ = 2t/d`. Test oracle only.
pub fn series_prob_oracle(t: f64, d: Dimension, k_max: u32) -> Result<Probability> {
    check_argument("t", t)?;
    let lambda = 2.0 * t / d.as_f64();
    let mut poisson = (-lambda).exp();
    let mut central = 1.0;
    let mut sum = poisson * central;
    for k in 0..k_max {
        let k = k as f64;
        poisson *= lambda * lambda / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        central *= (2.0 * k + 1.0) / (2.0 * k + 2.0);
        sum += poisson * central;
    }
    Probability::new(sum.min(1.0))
}

/// Upper bound on what [`series_prob_oracle`] leaves out after `K` terms:
/// the Poisson tail `P(N ≥ 2K+2)`, bounded geometrically from its first term.
pub fn series_prob_tail_bound(t: f64, d: Dimension, k_max: u32) -> f64 {
    let lambda = 2.0 * t / d.as_f64();
    let n = 2.0 * k_max as f64 + 2.0;
    if lambda >= n + 1.0 {
        return 1.0;
    }
    // e^{-λ} λ^n / n! evaluated in log space.
    let log_first = -lambda + n * lambda.max(f64::MIN_POSITIVE).ln() - ln_factorial(n as u64);
    let first = if lambda == 0.0 { 0.0 } else { log_first.exp() };
    first / (1.0 - lambda / (n + 1.0))
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `P(D(t) = 0)` with diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionProbability {
    pub p_coordinate: f64,
    pub p_collision: f64,
    /// `ln P(D(t) = 0)`, finite even when the probability itself underflows.
    pub log_p_collision: f64,
    pub err_bound: f64,
    pub underflow: bool,
}

// Below this log-probability the d-th power is taken through exp(d·ln p).
const LOG_SPACE_THRESHOLD: f64 = -50.0;

/// `P(D(t) = 0) = P(D_j(t) = 0)^d` with error bound and underflow flag.
pub fn collision_prob_detailed(t: f64, d: Dimension) -> Result<CollisionProbability> {
    let kernel = coordinate_return_kernel(t, d)?;
    let v = kernel.value;
    let n = d.get() as i32;
    let log_p = d.as_f64() * v.ln();
    let p = if log_p < LOG_SPACE_THRESHOLD {
        log_p.exp()
    } else {
        v.powi(n)
    };
    let err_bound = d.as_f64() * v.powi(n - 1) * kernel.err_bound + 2.0 * d.as_f64() * f64::EPSILON * p;
    Ok(CollisionProbability {
        p_coordinate: v,
        p_collision: p,
        log_p_collision: log_p,
        err_bound,
        underflow: p == 0.0,
    })
}

/// `P(D(t) = 0)`: the two walkers occupy the same site at time `t`.
pub fn collision_prob(t: f64, d: Dimension) -> Result<Probability> {
    collision_prob_detailed(t, d).map(|c| Probability(c.p_collision))
}
