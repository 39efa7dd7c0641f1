use serde::{Deserialize, Serialize};

use super::occupation::occupation_between;
use crate::error::Result;
use crate::walk::Dimension;

/// Window starts `T` for the increments `∫_T^{2T} P(D(t) = 0) dt`.
pub const WINDOW_STARTS: [f64; 3] = [1e2, 1e3, 1e4];

/// How the expected occupation grows with the horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Growth {
    /// Window increments grow like `√T`.
    Sqrt,
    /// Window increments are roughly constant: logarithmic growth.
    Log,
    /// Window increments shrink geometrically per decade.
    Convergent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowIncrement {
    pub t: f64,
    pub increment: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdVerdict {
    pub d: Dimension,
    /// From the integral test with exponent `d/2`.
    pub expected_collisions_finite: bool,
    pub pseries_exponent: f64,
    /// Classified from the numerical window increments alone.
    pub growth_diagnostic: Growth,
    /// Mean over decades of `log₁₀(Δ(10T)/Δ(T))`; ≈ `1 − d/2`.
    pub decade_exponent: f64,
    pub evidence: Vec<WindowIncrement>,
    /// Whether the numerical diagnostic agrees with the integral-test rule.
    pub consistent: bool,
}

impl ThresholdVerdict {
    /// `Δ(10T)/Δ(T)` for each consecutive pair of windows.
    pub fn decade_ratios(&self) -> Vec<f64> {
        self.evidence
            .windows(2)
            .map(|w| w[1].increment / w[0].increment)
            .collect()
    }
}

fn expected_growth(d: Dimension) -> Growth {
    match d.get() {
        1 => Growth::Sqrt,
        2 => Growth::Log,
        _ => Growth::Convergent,
    }
}

/// Decides whether two walkers on ℤᵈ meet finitely often in expectation,
/// and backs the decision with window increments of the occupation integral.
pub fn classify_dimension(d: Dimension) -> Result<ThresholdVerdict> {
    let exponent = d.as_f64() / 2.0;
    let evidence = WINDOW_STARTS
        .iter()
        .map(|&t| occupation_between(d, t, 2.0 * t).map(|q| WindowIncrement { t, increment: q.value }))
        .collect::<Result<Vec<_>>>()?;
    let logs: Vec<f64> = evidence
        .windows(2)
        .map(|w| (w[1].increment / w[0].increment).log10() / (w[1].t / w[0].t).log10())
        .collect();
    let alpha = logs.iter().sum::<f64>() / logs.len() as f64;
    let growth = if alpha > 0.25 {
        Growth::Sqrt
    } else if alpha < -0.25 {
        Growth::Convergent
    } else {
        Growth::Log
    };
    Ok(ThresholdVerdict {
        d,
        expected_collisions_finite: exponent > 1.0,
        pseries_exponent: exponent,
        growth_diagnostic: growth,
        decade_exponent: alpha,
        evidence,
        consistent: growth == expected_growth(d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn low_dimensions_are_infinite() {
        let v = classify_dimension(dim(1)).unwrap();
        assert!(!v.expected_collisions_finite);
        assert_eq!(v.growth_diagnostic, Growth::Sqrt);
        for r in v.decade_ratios() {
            assert!((r / 10f64.sqrt() - 1.0).abs() < 0.05);
        }
        let v = classify_dimension(dim(2)).unwrap();
        assert!(!v.expected_collisions_finite);
        assert_eq!(v.growth_diagnostic, Growth::Log);
        let target = LN_2 / (2.0 * PI);
        let last = v.evidence.last().unwrap().increment;
        assert!((last / target - 1.0).abs() < 0.05);
    }

    #[test]
    fn high_dimensions_are_finite() {
        for d in 3..=6 {
            let v = classify_dimension(dim(d)).unwrap();
            assert!(v.expected_collisions_finite);
            assert_eq!(v.growth_diagnostic, Growth::Convergent);
            assert!(v.consistent);
            assert!(v.decade_ratios().iter().all(|&r| r < 0.5));
        }
    }
}
