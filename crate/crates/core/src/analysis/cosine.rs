use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Largest `k` for which `C(2k, k)` still converts to a finite `f64`.
pub const MAX_COSINE_K: u32 = 500;

/// `(1/π)∫₀^π cos^{2k}x dx` measured two ways, plus the same integral over
/// the full period `[-π, π]` (still with the `1/π` prefactor).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosineMoment {
    pub k: u32,
    pub quadrature: f64,
    /// `C(2k, k) 4^{-k}`, from an exact big-integer binomial.
    pub exact: f64,
    pub full_period: f64,
    /// `full_period / quadrature`; equals 2 for every `k`.
    pub full_period_ratio: f64,
}

fn central_binomial(k: u32) -> BigUint {
    // C(2k, k) = Π_{i=1}^{k} (k + i)/i, exact at every step.
    let mut c = BigUint::from(1u32);
    for i in 1..=k {
        c *= k + i;
        c /= i;
    }
    c
}

fn power_integral(k: u32, a: f64, b: f64) -> Result<f64> {
    let n = 2 * k as i32;
    let r = quadrature::integrate(
        |x| Ok(x.cos().powi(n)),
        &[a, 0.5 * (a + b), b],
        Tolerance::absolute(1e-15),
        2000,
    )?;
    Ok(r.value / PI)
}

/// Checks `(1/π)∫₀^π cos^{2k}x dx = C(2k,k) 2^{-2k}` to `1e-12` and reports the
/// full-period integral alongside. Fails if the two routes disagree.
pub fn cosine_moment(k: u32) -> Result<CosineMoment> {
    if k > MAX_COSINE_K {
        return Err(Error::invalid(format!("k must be at most {MAX_COSINE_K}, got {k}")));
    }
    let exact = central_binomial(k)
        .to_f64()
        .ok_or_else(|| Error::Evaluation("binomial does not fit in f64".into()))?
        * 0.25f64.powi(k as i32);
    let quad = power_integral(k, 0.0, PI)?;
    if (quad - exact).abs() > 1e-12 {
        return Err(Error::Evaluation(format!(
            "cosine moment k={k}: quadrature {quad} vs binomial {exact}"
        )));
    }
    let full = power_integral(k, -PI, PI)?;
    Ok(CosineMoment {
        k,
        quadrature: quad,
        exact,
        full_period: full,
        full_period_ratio: full / quad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(cosine_moment(0).unwrap().exact, 1.0);
        assert!((cosine_moment(0).unwrap().quadrature - 1.0).abs() < 1e-14);
        assert_eq!(cosine_moment(1).unwrap().exact, 0.5);
        assert_eq!(cosine_moment(5).unwrap().exact, 63.0 / 256.0);
        assert_eq!(central_binomial(30).to_string(), "118264581564861424");
    }

    #[test]
    fn full_period_doubles() {
        for k in [0, 3, 17, 30] {
            let m = cosine_moment(k).unwrap();
            assert!((m.full_period_ratio - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_huge_k() {
        assert!(cosine_moment(501).is_err());
        assert!(cosine_moment(200).is_ok());
    }
}
