use serde::{Deserialize, Serialize};

use super::{derived_constant, paper_constant};
use crate::bessel::coordinate_return_prob;
use crate::error::{Error, Result};
use crate::walk::Dimension;

/// Points from the top of the grid used in the `c + b/t` fit.
const FIT_POINTS: usize = 4;

/// Extrapolated limit of `g(t) = t^{d/2} P(D(t) = 0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub d: Dimension,
    pub constant_estimate: f64,
    /// `a` in `g(t) ≈ c (1 + a/t)`.
    pub correction: f64,
    /// `(d/π)^{d/2}`.
    pub paper_constant: f64,
    /// `(d/(4π))^{d/2}`.
    pub derived_constant: f64,
    /// `constant_estimate / paper_constant`.
    pub ratio_to_paper: f64,
    /// `constant_estimate / derived_constant`.
    pub ratio_to_derived: f64,
    pub t_grid: Vec<f64>,
    pub g_values: Vec<f64>,
    /// `|g(t) − constant_estimate|` on the grid.
    pub residuals: Vec<f64>,
}

/// `10^{1 + k/2}` for `k = 0, 1, ...` up to `t_max`, with `t_max` itself last.
pub fn default_grid(t_max: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let t = 10f64.powf(1.0 + 0.5 * k as f64);
        if t >= t_max * (1.0 - 1e-12) {
            break;
        }
        grid.push(t);
        k += 1;
    }
    grid.push(t_max);
    grid
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 4 {
        return Err(Error::invalid(format!(
            "need at least 4 grid points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|t| !t.is_finite() || *t <= 0.0) {
        return Err(Error::invalid("grid points must be positive and finite"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid must be strictly increasing"));
    }
    let top = grid[grid.len() - 1];
    if top < 1e4 {
        return Err(Error::invalid(format!("largest grid point must be >= 1e4, got {top}")));
    }
    Ok(())
}

/// `g(t) = (√t · P(D_j(t) = 0))^d`, which stays well scaled for large `t`.
fn scaled_probability(t: f64, d: Dimension) -> Result<f64> {
    let v = coordinate_return_prob(t, d)?.get();
    Ok((t.sqrt() * v).powi(d.get() as i32))
}

/// Least-squares fit of `g = c + b·x` with `x = 1/t`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

/// Extrapolates `lim t^{d/2} P(D(t) = 0)` from the grid by fitting
/// `g(t) = c (1 + a/t)` on its largest points.
pub fn fit_leading_constant(d: Dimension, t_grid: &[f64]) -> Result<AsymptoticFit> {
    validate_grid(t_grid)?;
    let g: Vec<f64> = t_grid
        .iter()
        .map(|&t| scaled_probability(t, d))
        .collect::<Result<_>>()?;
    let start = t_grid.len().saturating_sub(FIT_POINTS);
    let xs: Vec<f64> = t_grid[start..].iter().map(|t| 1.0 / t).collect();
    let (c, b) = linear_fit(&xs, &g[start..]);
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::FitQuality(format!("non-positive constant estimate {c}")));
    }
    let residuals: Vec<f64> = g.iter().map(|gi| (gi - c).abs()).collect();
    // Residuals at the extrapolated end are at rounding level; allow for it.
    let slack = 64.0 * f64::EPSILON * c;
    if let Some(i) = (1..residuals.len()).find(|&i| residuals[i] > residuals[i - 1] + slack) {
        return Err(Error::FitQuality(format!(
            "residual increases at t = {}: {:e} after {:e}",
            t_grid[i],
            residuals[i],
            residuals[i - 1]
        )));
    }
    let paper = paper_constant(d);
    let derived = derived_constant(d);
    Ok(AsymptoticFit {
        d,
        constant_estimate: c,
        correction: b / c,
        paper_constant: paper,
        derived_constant: derived,
        ratio_to_paper: c / paper,
        ratio_to_derived: c / derived,
        t_grid: t_grid.to_vec(),
        g_values: g,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = default_grid(1e6);
        assert_eq!(g.first(), Some(&10.0));
        assert_eq!(g.last(), Some(&1e6));
        assert_eq!(g.len(), 11);
        assert_eq!(default_grid(2e4).last(), Some(&2e4));
    }

    #[test]
    fn one_dim_constant() {
        let fit = fit_leading_constant(dim(1), &default_grid(1e6)).unwrap();
        let expect = 1.0 / (4.0 * PI).sqrt();
        assert!((fit.constant_estimate / expect - 1.0).abs() < 1e-8);
        assert!((fit.ratio_to_paper - 0.5).abs() < 1e-8);
        // first correction of ρ(z) at z = 2t is 1/(8z) = 1/(16t)
        assert!((fit.correction - 1.0 / 16.0).abs() < 1e-3);
    }

    #[test]
    fn three_dim_constant() {
        let fit = fit_leading_constant(dim(3), &default_grid(1e6)).unwrap();
        assert!((fit.constant_estimate - 0.1162).abs() < 1e-3 * 0.1162 * 10.0);
        assert!((fit.ratio_to_paper - 0.125).abs() < 1e-6);
        assert!(fit.g_values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn grid_validation() {
        let d = dim(2);
        assert!(fit_leading_constant(d, &[10.0, 100.0, 1e4]).is_err());
        assert!(fit_leading_constant(d, &[10.0, 100.0, 50.0, 1e4]).is_err());
        assert!(fit_leading_constant(d, &[10.0, 100.0, 1000.0, 5000.0]).is_err());
        assert!(fit_leading_constant(d, &[-1.0, 100.0, 1000.0, 1e4]).is_err());
    }

    #[test]
    fn grid_through_the_peak_fails_quality() {
        // g rises through its maximum near z ≈ 1 before decaying.
        let err = fit_leading_constant(dim(1), &[0.05, 0.3, 1.0, 1e4, 1e5]).unwrap_err();
        assert!(matches!(err, Error::FitQuality(_)), "{err:?}");
    }
}
