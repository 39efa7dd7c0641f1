use serde::{Deserialize, Serialize};

use crate::bessel::{self, collision_prob_detailed};
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureResult, Tolerance};
use crate::walk::Dimension;

const TOLERANCE: Tolerance = Tolerance { abs: 1e-10, rel: 1e-8 };
const MAX_SUBDIVISIONS: usize = 20_000;

/// `∫_{t_max}^∞ P(D(t) = 0) dt` for `d ≥ 3`, with a bound on `|true − value|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub value: f64,
    pub bound: f64,
}

/// Expected occupation time `∫₀^{t_max} P(D(t) = 0) dt`, plus the tail beyond
/// `t_max` when it is finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupationEstimate {
    pub d: Dimension,
    pub t_max: f64,
    #[serde(flatten)]
    pub quadrature: QuadratureResult,
    pub tail: Option<TailEstimate>,
}

impl OccupationEstimate {
    /// Integral over `[0, ∞)`, when the tail is finite.
    pub fn total(&self) -> Option<f64> {
        self.tail.map(|t| self.quadrature.value + t.value)
    }
}

fn integrand(d: Dimension) -> impl FnMut(f64) -> Result<f64> {
    move |t| collision_prob_detailed(t, d).map(|c| c.p_collision)
}

/// Dyadic breakpoints spanning `[a, b]`, so each panel sees a comparable
/// relative change of the integrand.
fn breakpoints(a: f64, b: f64) -> Vec<f64> {
    let mut pts = vec![a];
    let mut x = if a > 0.0 { a * 2.0 } else { 1.0 };
    while x < b {
        pts.push(x);
        x *= 2.0;
    }
    pts.push(b);
    pts
}

/// `∫_a^b P(D(t) = 0) dt`.
pub fn occupation_between(d: Dimension, a: f64, b: f64) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b <= a {
        return Err(Error::invalid(format!("need 0 <= a < b finite, got [{a}, {b}]")));
    }
    quadrature::integrate(integrand(d), &breakpoints(a, b), TOLERANCE, MAX_SUBDIVISIONS)
}

/// Expected occupation time of the collision set up to `t_max`.
pub fn expected_occupation(d: Dimension, t_max: f64) -> Result<OccupationEstimate> {
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(Error::invalid(format!(
            "t_max must be positive and finite, got {t_max}"
        )));
    }
    let quadrature = occupation_between(d, 0.0, t_max)?;
    let tail = if d.get() >= 3 {
        Some(tail_beyond(d, t_max)?)
    } else {
        None
    };
    Ok(OccupationEstimate {
        d,
        t_max,
        quadrature,
        tail,
    })
}

/// Cumulative occupation `∫₀^t P(D(s) = 0) ds` sampled at each grid point.
pub fn occupation_curve(d: Dimension, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &t in grid {
        if t < prev {
            return Err(Error::invalid("grid must be nondecreasing"));
        }
        if t > prev {
            acc += occupation_between(d, prev, t)?.value;
        }
        out.push((t, acc));
        prev = t;
    }
    Ok(out)
}

// Beyond z = 2t/d ≥ 50 the ratio ρ(z) = √(2πz) e^{-z} I₀(z) decreases to 1,
// so the tail is bracketed analytically.
const ANALYTIC_Z: f64 = 50.0;

fn tail_beyond(d: Dimension, t: f64) -> Result<TailEstimate> {
    let t0 = ANALYTIC_Z * d.as_f64() / 2.0;
    if t < t0 {
        let near = occupation_between(d, t, t0)?;
        let far = tail_beyond(d, t0)?;
        return Ok(TailEstimate {
            value: near.value + far.value,
            bound: near.err_estimate + far.bound,
        });
    }
    let p = d.as_f64() / 2.0;
    let c = super::derived_constant(d);
    let leading = c * t.powf(1.0 - p) / (p - 1.0);
    // ρ(z)^d ≥ 1 + d/(8z); integrate that first correction exactly.
    let corrected = leading + c * d.as_f64() * d.as_f64() * t.powf(-p) / (16.0 * p);
    let z = 2.0 * t / d.as_f64();
    let rho = (2.0 * std::f64::consts::PI * z).sqrt() * bessel::i0_scaled(z)?.value;
    let upper = leading * rho.powi(d.get() as i32);
    Ok(TailEstimate {
        value: corrected,
        bound: (upper - corrected).max(0.0),
    })
}

/// Expected number of collision components after `horizon`, i.e.
/// `2 ∫_horizon^∞ P(D(t) = 0) dt` (each visit to the origin lasts 1/2 on
/// average). Infinite for `d ≤ 2`.
pub fn continuous_count_tail(d: Dimension, horizon: f64) -> Result<f64> {
    if d.get() <= 2 {
        return Ok(f64::INFINITY);
    }
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    Ok(2.0 * tail_beyond(d, horizon)?.value)
}
