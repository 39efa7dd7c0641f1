//! Exact return probabilities `P(Sₘ = 0)` of the simple random walk on ℤᵈ.
//!
//! The main route splits the `m` steps among coordinates: the number landing
//! on the last coordinate is `Binomial(m, 1/c)` when `c` coordinates remain,
//! and each coordinate must return on its own. Every quantity summed is a
//! probability, so nothing cancels. A literal box convolution is kept as a
//! brute-force cross-check for small `m`.

use crate::bessel::Probability;
use crate::error::{Error, Result};
use crate::walk::Dimension;

/// Largest dimension accepted by the DP oracles.
pub const DP_MAX_DIM: usize = 4;
/// Largest walk length accepted by the DP oracles.
pub const DP_MAX_STEPS: u64 = 2000;
/// Largest number of cells for [`box_distribution`].
pub const BOX_MAX_CELLS: usize = 4_000_000;

fn check_budget(d: Dimension, m: u64) -> Result<()> {
    if d.get() > DP_MAX_DIM {
        return Err(Error::invalid(format!("DP oracle supports d <= {DP_MAX_DIM}, got {d}")));
    }
    if m > DP_MAX_STEPS {
        return Err(Error::invalid(format!(
            "DP oracle supports at most {DP_MAX_STEPS} steps, got {m}"
        )));
    }
    Ok(())
}

/// `P(Sₘ = 0)` of the one-dimensional walk for `m = 0..=m_max`.
fn one_dim_returns(m_max: usize) -> Vec<f64> {
    let mut p = vec![0.0; m_max + 1];
    p[0] = 1.0;
    for m in (2..=m_max).step_by(2) {
        let i = (m / 2) as f64;
        p[m] = p[m - 2] * (2.0 * i - 1.0) / (2.0 * i);
    }
    p
}

/// `P(Sₘ = 0)` for every `m = 0..=m_max`.
pub fn return_probabilities(d: Dimension, m_max: u64) -> Result<Vec<f64>> {
    check_budget(d, m_max)?;
    let m_max = m_max as usize;
    let one = one_dim_returns(m_max);
    let mut f = one.clone();
    for c in 2..=d.get() {
        let p = 1.0 / c as f64;
        let q = 1.0 - p;
        let mut next = vec![0.0; m_max + 1];
        // Binomial(m, p) row, advanced one m at a time.
        let mut row = vec![0.0; m_max + 1];
        row[0] = 1.0;
        for m in 0..=m_max {
            if m > 0 {
                for j in (1..=m).rev() {
                    row[j] = q * row[j] + p * row[j - 1];
                }
                row[0] *= q;
            }
            next[m] = (0..=m).step_by(2).map(|j| row[j] * one[j] * f[m - j]).sum();
        }
        f = next;
    }
    Ok(f)
}

/// `P(Sₘ = 0)` for the simple random walk on ℤᵈ; exactly 0 for odd `m`.
pub fn dp_return_prob(d: Dimension, m: u64) -> Result<Probability> {
    let probs = return_probabilities(d, m)?;
    Probability::new(probs[m as usize].min(1.0))
}

/// `Σ_{n=0}^{n_max} P(S₂ₙ = 0)`: the expected number of indices `n ≤ n_max`
/// at which two independent discrete-time walks coincide.
pub fn expected_count_discrete(d: Dimension, n_max: u64) -> Result<f64> {
    let m = n_max.checked_mul(2).ok_or_else(|| Error::invalid("n_max too large"))?;
    let probs = return_probabilities(d, m)?;
    Ok(probs.iter().step_by(2).sum())
}

/// Estimate of `Σ_{n > n_max} P(S₂ₙ = 0)` from `P(S₂ₙ = 0) ~ 2 (d/(4πn))^{d/2}`,
/// summed by the midpoint rule. Infinite for `d ≤ 2`.
pub fn discrete_tail_estimate(d: Dimension, n_max: u64) -> f64 {
    let half = d.as_f64() / 2.0;
    if half <= 1.0 {
        return f64::INFINITY;
    }
    let c = super::derived_constant(d);
    2.0 * c * (n_max as f64 + 0.5).powf(1.0 - half) / (half - 1.0)
}

/// Full distribution of `Sₘ` on the box `[-m, m]ᵈ`, by repeated convolution
/// with the uniform nearest-neighbour kernel.
#[derive(Clone, Debug)]
pub struct BoxDistribution {
    d: usize,
    radius: usize,
    mass: Vec<f64>,
}

impl BoxDistribution {
    fn side(&self) -> usize {
        2 * self.radius + 1
    }

    fn index(&self, point: &[i64]) -> Option<usize> {
        if point.len() != self.d {
            return None;
        }
        let side = self.side();
        let mut idx = 0;
        for &c in point.iter().rev() {
            let shifted = c + self.radius as i64;
            if shifted < 0 || shifted >= side as i64 {
                return None;
            }
            idx = idx * side + shifted as usize;
        }
        Some(idx)
    }

    /// `P(Sₘ = point)`; zero outside the box.
    pub fn prob_at(&self, point: &[i64]) -> f64 {
        self.index(point).map_or(0.0, |i| self.mass[i])
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Every site with positive mass.
    pub fn support(&self) -> Vec<(Vec<i64>, f64)> {
        let side = self.side();
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(mut i, &p)| {
                let mut coords = Vec::with_capacity(self.d);
                for _ in 0..self.d {
                    coords.push((i % side) as i64 - self.radius as i64);
                    i /= side;
                }
                (coords, p)
            })
            .collect()
    }
}

/// Distribution of the `m`-step simple random walk, by brute-force convolution.
pub fn box_distribution(d: Dimension, m: u64) -> Result<BoxDistribution> {
    check_budget(d, m)?;
    let radius = m as usize;
    let side = 2 * radius + 1;
    let cells = (0..d.get()).try_fold(1usize, |acc, _| acc.checked_mul(side));
    let cells = match cells {
        Some(c) if c <= BOX_MAX_CELLS => c,
        _ => {
            return Err(Error::invalid(format!(
                "box of radius {m} in d={d} exceeds {BOX_MAX_CELLS} cells"
            )))
        }
    };
    let strides: Vec<usize> = (0..d.get()).map(|a| side.pow(a as u32)).collect();
    let w = 1.0 / d.neighbours() as f64;
    let mut mass = vec![0.0; cells];
    let centre: usize = strides.iter().map(|s| s * radius).sum();
    mass[centre] = 1.0;
    let mut next = vec![0.0; cells];
    for _ in 0..m {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (i, &p) in mass.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for &s in &strides {
                // Mass never reaches the box faces within m steps.
                next[i + s] += p * w;
                next[i - s] += p * w;
            }
        }
        std::mem::swap(&mut mass, &mut next);
    }
    Ok(BoxDistribution {
        d: d.get(),
        radius,
        mass,
    })
}
