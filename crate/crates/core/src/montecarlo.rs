//! Monte Carlo estimators over independently seeded trials.
//!
//! Trial `i` always uses stream `i` of the master seed, and trials are run in
//! fixed-size batches whose results are combined in batch order (or with exact
//! integer sums), so every estimate is bit-identical for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

use crate::error::{Error, Result};
use crate::walk::{self, Dimension, Mode, SeedSpec};

const BATCH: u64 = 4096;
/// Fewest trials accepted by the estimators.
pub const MIN_TRIALS: u64 = 100;
/// Fewest trials accepted by [`thinning_test`].
pub const MIN_THINNING_TRIALS: u64 = 1000;

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Estimate {
    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr
    }
}

/// Trials, master seed and parallelism for an estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        McConfig {
            trials,
            seed,
            workers: 1,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        McConfig { workers, ..self }
    }

    fn check(&self, min_trials: u64) -> Result<()> {
        if self.trials < min_trials {
            return Err(Error::invalid(format!(
                "need at least {min_trials} trials, got {}",
                self.trials
            )));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers must be at least 1"));
        }
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Evaluation(format!("thread pool: {e}")))
    }

    fn trial_seed(&self, i: u64) -> SeedSpec {
        SeedSpec::new(self.seed, i)
    }
}

/// Runs `trial` for every index and returns the per-batch results in order.
fn run_batched<T, F>(cfg: &McConfig, trial: F) -> Result<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(SeedSpec) -> T + Sync,
{
    let batches = cfg.trials.div_ceil(BATCH);
    let pool = cfg.pool()?;
    Ok(pool.install(|| {
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let end = ((b + 1) * BATCH).min(cfg.trials);
                (b * BATCH..end).map(|i| trial(cfg.trial_seed(i))).collect()
            })
            .collect()
    }))
}

fn integer_estimate<F>(cfg: &McConfig, trial: F) -> Result<Estimate>
where
    F: Fn(SeedSpec) -> u64 + Sync,
{
    let batches = run_batched(cfg, |s| {
        let x = trial(s) as u128;
        (x, x * x)
    })?;
    let (sum, sum_sq) = batches
        .iter()
        .flatten()
        .fold((0u128, 0u128), |(s, q), &(x, xx)| (s + x, q + xx));
    let n = cfg.trials as u128;
    let mean = sum as f64 / n as f64;
    // n²·var·(n-1)/n = n·Σx² − (Σx)², exact in integers.
    let spread = n * sum_sq - sum * sum;
    let var = spread as f64 / (n as f64 * (n - 1) as f64);
    Ok(Estimate {
        mean,
        stderr: (var / n as f64).sqrt(),
        trials: cfg.trials,
        seed: cfg.seed,
    })
}

fn real_estimate<F>(cfg: &McConfig, trial: F) -> Result<Estimate>
where
    F: Fn(SeedSpec) -> f64 + Sync,
{
    let batches = run_batched(cfg, trial)?;
    let n = cfg.trials as f64;
    let mean = batches.iter().flatten().sum::<f64>() / n;
    let ss: f64 = batches.iter().flatten().map(|x| (x - mean) * (x - mean)).sum();
    Ok(Estimate {
        mean,
        stderr: (ss / (n - 1.0) / n).sqrt(),
        trials: cfg.trials,
        seed: cfg.seed,
    })
}

/// Fraction of continuous-time pairs that sit on the same site at time `t`.
pub fn mc_collision_prob(d: Dimension, t: f64, cfg: McConfig) -> Result<Estimate> {
    cfg.check(MIN_TRIALS)?;
    walk::simulate_continuous_pair(d, t, SeedSpec::new(cfg.seed, 0))?;
    integer_estimate(&cfg, |s| {
        let r = walk::run_continuous_unchecked(d, t, s);
        r.ended_together as u64
    })
}

/// Mean collision count up to `horizon`: `discrete_count` of discrete pairs
/// (horizon is a step count) or `component_count` of continuous pairs.
pub fn mc_expected_count(d: Dimension, mode: Mode, horizon: f64, cfg: McConfig) -> Result<Estimate> {
    cfg.check(MIN_TRIALS)?;
    match mode {
        Mode::Discrete => {
            let n = steps_from_horizon(horizon)?;
            integer_estimate(&cfg, |s| walk::simulate_discrete_pair(d, n, s).discrete_count)
        }
        Mode::Continuous => {
            walk::simulate_continuous_pair(d, horizon, SeedSpec::new(cfg.seed, 0))?;
            integer_estimate(&cfg, |s| walk::run_continuous_unchecked(d, horizon, s).component_count)
        }
    }
}

/// Mean occupation time of the collision set in `[0, horizon]`.
pub fn mc_occupation(d: Dimension, horizon: f64, cfg: McConfig) -> Result<Estimate> {
    cfg.check(MIN_TRIALS)?;
    walk::simulate_continuous_pair(d, horizon, SeedSpec::new(cfg.seed, 0))?;
    real_estimate(&cfg, |s| walk::run_continuous_unchecked(d, horizon, s).occupation_time)
}

/// Mean number of visits to the origin of the embedded difference walk in
/// `n_jumps` jumps.
pub fn mc_embedded_visits(d: Dimension, n_jumps: u64, cfg: McConfig) -> Result<Estimate> {
    cfg.check(MIN_TRIALS)?;
    integer_estimate(&cfg, |s| walk::embedded_difference_walk(d, n_jumps, s))
}

fn steps_from_horizon(horizon: f64) -> Result<u64> {
    if !horizon.is_finite() || horizon < 0.0 || horizon.fract() != 0.0 || horizon > 1e15 {
        return Err(Error::invalid(format!(
            "discrete horizon must be a nonnegative integer, got {horizon}"
        )));
    }
    Ok(horizon as u64)
}

/// Goodness of fit of one coordinate's jump count against `Poisson(2h/d)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateFit {
    pub axis: usize,
    pub mean: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub critical: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCorrelation {
    pub i: usize,
    pub j: usize,
    pub correlation: f64,
}

/// Outcome of [`thinning_test`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThinningReport {
    pub d: Dimension,
    pub horizon: f64,
    pub trials: u64,
    pub seed: u64,
    /// `2·horizon/d`.
    pub expected_mean: f64,
    pub coordinates: Vec<CoordinateFit>,
    pub correlations: Vec<PairCorrelation>,
    pub correlation_threshold: f64,
    pub passed: bool,
}

/// Upper 0.999 quantile of the standard normal, two-sided.
const Z_0999_TWO_SIDED: f64 = 3.290_526_731_491_926;
const CHI_SQUARE_LEVEL: f64 = 0.999;

/// Pools Poisson(λ) cells from both ends until every cell expects ≥ 5 counts.
/// Returns cell upper limits (inclusive; the last is unbounded) and expected
/// probabilities.
fn poisson_cells(lambda: f64, trials: u64) -> Result<(Vec<u64>, Vec<f64>)> {
    let pois = Poisson::new(lambda).map_err(|e| Error::Evaluation(format!("poisson: {e}")))?;
    let min_p = 5.0 / trials as f64;
    let mut limits = Vec::new();
    let mut probs = Vec::new();
    let mut acc = 0.0;
    let mut k = 0u64;
    loop {
        acc += pois.pmf(k);
        let rest = pois.sf(k);
        if rest < min_p {
            // Fold the remaining upper tail into this cell.
            probs.push(acc + rest);
            limits.push(u64::MAX);
            break;
        }
        if acc >= min_p {
            probs.push(acc);
            limits.push(k);
            acc = 0.0;
        }
        k += 1;
    }
    if probs.len() >= 2 && probs[probs.len() - 1] < min_p {
        let last = probs.pop().unwrap();
        limits.pop();
        *probs.last_mut().unwrap() += last;
        *limits.last_mut().unwrap() = u64::MAX;
    }
    Ok((limits, probs))
}

fn chi_square(samples: impl Iterator<Item = u64>, limits: &[u64], probs: &[f64], trials: u64) -> f64 {
    let mut observed = vec![0u64; limits.len()];
    for x in samples {
        let cell = limits.partition_point(|&lim| lim < x);
        observed[cell] += 1;
    }
    observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * trials as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum()
}

/// Checks that the difference process's per-coordinate jump counts at
/// `horizon` are independent `Poisson(2·horizon/d)` variables.
pub fn thinning_test(d: Dimension, horizon: f64, cfg: McConfig) -> Result<ThinningReport> {
    cfg.check(MIN_THINNING_TRIALS)?;
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    let batches = run_batched(&cfg, |s| {
        walk::coordinate_jump_counts(d, horizon, s).expect("horizon validated")
    })?;
    let rows: Vec<Vec<u64>> = batches.into_iter().flatten().collect();
    let n = cfg.trials as f64;
    let lambda = 2.0 * horizon / d.as_f64();
    let (limits, probs) = poisson_cells(lambda, cfg.trials)?;
    let dof = probs.len().saturating_sub(1);
    let critical = if dof > 0 {
        ChiSquared::new(dof as f64)
            .map_err(|e| Error::Evaluation(format!("chi-square: {e}")))?
            .inverse_cdf(CHI_SQUARE_LEVEL)
    } else {
        f64::INFINITY
    };

    let means: Vec<f64> = (0..d.get())
        .map(|a| rows.iter().map(|r| r[a] as f64).sum::<f64>() / n)
        .collect();
    let coordinates: Vec<CoordinateFit> = (0..d.get())
        .map(|a| CoordinateFit {
            axis: a,
            mean: means[a],
            chi_square: chi_square(rows.iter().map(|r| r[a]), &limits, &probs, cfg.trials),
            dof,
            critical,
        })
        .collect();

    let mut correlations = Vec::new();
    for i in 0..d.get() {
        for j in i + 1..d.get() {
            let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
            for r in &rows {
                let x = r[i] as f64 - means[i];
                let y = r[j] as f64 - means[j];
                sxy += x * y;
                sxx += x * x;
                syy += y * y;
            }
            correlations.push(PairCorrelation {
                i,
                j,
                correlation: sxy / (sxx * syy).sqrt(),
            });
        }
    }
    let threshold = Z_0999_TWO_SIDED / n.sqrt();
    let passed = coordinates.iter().all(|c| c.chi_square < c.critical)
        && correlations.iter().all(|c| c.correlation.abs() < threshold);
    Ok(ThinningReport {
        d,
        horizon,
        trials: cfg.trials,
        seed: cfg.seed,
        expected_mean: lambda,
        coordinates,
        correlations,
        correlation_threshold: threshold,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(d: usize) -> Dimension {
        Dimension::new(d).unwrap()
    }

    #[test]
    fn time_zero_is_certain() {
        let e = mc_collision_prob(dim(3), 0.0, McConfig::new(1000, 1)).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
        for mode in [Mode::Discrete, Mode::Continuous] {
            let e = mc_expected_count(dim(2), mode, 0.0, McConfig::new(500, 3)).unwrap();
            assert_eq!((e.mean, e.stderr), (1.0, 0.0));
        }
    }

    #[test]
    fn input_validation() {
        assert!(mc_collision_prob(dim(1), 1.0, McConfig::new(99, 1)).is_err());
        assert!(mc_collision_prob(dim(1), -1.0, McConfig::new(100, 1)).is_err());
        assert!(mc_collision_prob(dim(1), 1.0, McConfig::new(100, 1).with_workers(0)).is_err());
        assert!(mc_expected_count(dim(1), Mode::Discrete, 2.5, McConfig::new(100, 1)).is_err());
        assert!(thinning_test(dim(2), 10.0, McConfig::new(999, 1)).is_err());
    }

    #[test]
    fn one_step_discrete_count() {
        // X₁ = Y₁ iff both walkers step the same way: probability 1/2 in d = 1.
        let e = mc_expected_count(dim(1), Mode::Discrete, 1.0, McConfig::new(200_000, 5)).unwrap();
        assert!(e.covers(1.5, 3.0), "{e:?}");
    }

    #[test]
    fn workers_do_not_change_results() {
        let base = McConfig::new(20_000, 77);
        let a = mc_occupation(dim(2), 20.0, base).unwrap();
        let b = mc_occupation(dim(2), 20.0, base.with_workers(3)).unwrap();
        assert_eq!(a, b);
        let a = mc_collision_prob(dim(1), 5.0, base).unwrap();
        let b = mc_collision_prob(dim(1), 5.0, base.with_workers(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn poisson_cells_cover_all_mass() {
        let (limits, probs) = poisson_cells(20.0, 100_000).unwrap();
        assert_eq!(*limits.last().unwrap(), u64::MAX);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(probs.iter().all(|&p| p * 1e5 >= 5.0));
    }

    #[test]
    fn single_coordinate_thinning() {
        let r = thinning_test(dim(1), 10.0, McConfig::new(20_000, 8)).unwrap();
        assert!(r.correlations.is_empty());
        assert!((r.coordinates[0].mean - 20.0).abs() < 0.2);
        assert!(r.passed, "{r:?}");
    }
}
