//! Built-in invariant checks behind `collide verify`.
//!
//! Monte Carlo checks use pinned seeds, so every suite is a deterministic
//! regression test.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, default_grid, derived_constant, Growth};
use crate::bessel;
use crate::error::Result;
use crate::montecarlo::{self, McConfig};
use crate::walk::{self, Dimension, SeedSpec};

const MC_SEED: u64 = 0x5eed_2024;
const MC_TRIALS: u64 = 100_000;
const THINNING_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Kernel,
    Formula,
    Lemma,
    Threshold,
    Constant,
    Thinning,
    Montecarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn check(name: &str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check {
            name: name.into(),
            passed,
            detail,
        },
        Err(e) => Check {
            name: name.into(),
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn dim(d: usize) -> Dimension {
    Dimension::new(d).expect("dimension in range")
}

pub fn run_suite(suite: Suite, workers: usize) -> VerifyReport {
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Kernel {
        checks.extend(kernel_checks());
    }
    if all || suite == Suite::Formula {
        checks.push(check("formula_equivalence", formula_equivalence()));
    }
    if all || suite == Suite::Lemma {
        checks.extend(lemma_checks());
    }
    if all || suite == Suite::Threshold {
        checks.push(check("threshold", threshold()));
    }
    if all || suite == Suite::Constant {
        checks.push(check("leading_constant", leading_constant()));
    }
    if all || suite == Suite::Thinning {
        checks.push(check("thinning", thinning(workers)));
    }
    if all || suite == Suite::Montecarlo {
        checks.push(check("mc_collision_prob", mc_grid(workers)));
    }
    let passed = checks.iter().all(|c| c.passed);
    VerifyReport { suite, checks, passed }
}

fn kernel_checks() -> Vec<Check> {
    let oracle = || -> Result<(bool, String)> {
        let mut worst: f64 = 0.0;
        for z in [0.0, 0.1, 1.0, 5.0, 30.0, 100.0, 1000.0] {
            let v = bessel::i0_scaled(z)?.value;
            let q = bessel::i0_quadrature(z)?;
            worst = worst.max(((v - q) / q).abs());
        }
        Ok((worst <= 1e-10, format!("max relative deviation {worst:.3e}")))
    };
    let shape = || -> Result<(bool, String)> {
        let mut prev = f64::INFINITY;
        let mut ok = true;
        for i in 0..=4000 {
            let z = i as f64 * 0.05;
            let v = bessel::i0_scaled(z)?;
            ok &= v.value > 0.0 && v.value <= 1.0 && v.value < prev && v.err_bound <= 1e-12 * v.value;
            prev = v.value;
        }
        Ok((ok, "positive, at most 1, strictly decreasing on z = 0(0.05)200".into()))
    };
    let continuity = || -> Result<(bool, String)> {
        let s = bessel::i0_scaled_series(bessel::Z_SWITCH)?.value;
        let a = bessel::i0_scaled_asymptotic(bessel::Z_SWITCH)?.value;
        let rel = ((s - a) / s).abs();
        Ok((rel <= 1e-12, format!("series vs asymptotic at z_switch: {rel:.3e}")))
    };
    let law = || -> Result<(bool, String)> {
        let z = 1e6;
        let v = bessel::i0_scaled(z)?.value;
        let r = 2.0 * std::f64::consts::PI * z * v * v;
        Ok(((r - 1.0).abs() < 1e-3, format!("2πz·v² at z=1e6: {r}")))
    };
    vec![
        check("kernel_vs_quadrature", oracle()),
        check("kernel_shape", shape()),
        check("regime_continuity", continuity()),
        check("large_argument_law", law()),
    ]
}

/// Smallest K whose Poisson tail bound falls below `1e-14`.
pub fn oracle_terms(t: f64, d: Dimension) -> u32 {
    (0..10_000)
        .find(|&k| bessel::series_prob_tail_bound(t, d, k) < 1e-14)
        .unwrap_or(10_000)
}

fn formula_equivalence() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for d in 1..=3 {
        for t in [0.5, 1.0, 5.0, 20.0] {
            let d = dim(d);
            let k = oracle_terms(t, d);
            let o = bessel::series_prob_oracle(t, d, k)?.get();
            let p = bessel::coordinate_return_prob(t, d)?.get();
            worst = worst.max((o - p).abs());
        }
    }
    Ok((worst <= 1e-12, format!("max |series − kernel| = {worst:.3e}")))
}

fn lemma_checks() -> Vec<Check> {
    let first = || -> Result<(bool, String)> {
        let mut worst: f64 = 0.0;
        for k in 0..=30 {
            let m = analysis::cosine_moment(k)?;
            worst = worst.max((m.quadrature - m.exact).abs());
        }
        Ok((worst <= 1e-12, format!("max |quadrature − C(2k,k)4^-k| = {worst:.3e}")))
    };
    let full = || -> Result<(bool, String)> {
        let mut worst: f64 = 0.0;
        for k in 0..=30 {
            worst = worst.max((analysis::cosine_moment(k)?.full_period_ratio - 2.0).abs());
        }
        Ok((
            worst <= 1e-10,
            format!("full-period/half-period ratio deviates from 2 by {worst:.3e}"),
        ))
    };
    let components = || -> Result<(bool, String)> {
        let mut ok = true;
        for (d, s) in [(1, 1), (2, 2), (3, 3), (2, 4)] {
            let (rec, log) = walk::simulate_continuous_pair_logged(dim(d), 500.0, SeedSpec::new(MC_SEED, s))?;
            ok &= walk::collision_intervals(&log, 500.0).len() as u64 == rec.component_count;
        }
        Ok((ok, "component counts equal interval scans of event logs".into()))
    };
    let identity = || -> Result<(bool, String)> {
        let d = dim(3);
        let count = analysis::expected_count_discrete(d, 1000)? + analysis::discrete_tail_estimate(d, 1000);
        let occ = analysis::expected_occupation(d, 1e6)?;
        let total = occ.total().unwrap_or(f64::NAN);
        let gap = (count - 2.0 * total).abs();
        Ok((
            gap <= 1e-2,
            format!("count {count:.6} vs 2×occupation {:.6}", 2.0 * total),
        ))
    };
    let parity = || -> Result<(bool, String)> {
        let mut ok = true;
        for d in 1..=4 {
            let p = analysis::return_probabilities(dim(d), 101)?;
            ok &= p.iter().skip(1).step_by(2).all(|&x| x == 0.0);
        }
        Ok((ok, "odd-length return probabilities are exactly zero".into()))
    };
    vec![
        check("cosine_moment_half_period", first()),
        check("cosine_moment_full_period_ratio", full()),
        check("component_bijection", components()),
        check("count_occupation_identity", identity()),
        check("parity", parity()),
    ]
}

fn threshold() -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for d in 1..=6 {
        let v = analysis::classify_dimension(dim(d))?;
        ok &= v.consistent && v.expected_collisions_finite == (d >= 3);
        match v.growth_diagnostic {
            Growth::Sqrt => {
                ok &= v.decade_ratios().iter().all(|r| (r / 10f64.sqrt() - 1.0).abs() <= 0.05);
            }
            Growth::Log => {
                let target = std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI);
                ok &= v.evidence.iter().all(|w| (w.increment / target - 1.0).abs() <= 0.05);
            }
            Growth::Convergent => {
                ok &= v.decade_ratios().iter().all(|&r| r < 1.0);
            }
        }
        notes.push(format!("d={d}:{:?}", v.growth_diagnostic));
    }
    Ok((ok, notes.join(" ")))
}

fn leading_constant() -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for d in 1..=4 {
        let fit = analysis::fit_leading_constant(dim(d), &default_grid(1e6))?;
        let dev = (fit.constant_estimate / derived_constant(dim(d)) - 1.0).abs();
        let ratio_dev = (fit.ratio_to_paper * 2f64.powi(d as i32) - 1.0).abs();
        ok &= dev <= 0.01 && ratio_dev <= 0.02;
        notes.push(format!(
            "d={d}: c={:.6} ratio={:.6}",
            fit.constant_estimate, fit.ratio_to_paper
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn thinning(workers: usize) -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for d in [2, 3] {
        let cfg = McConfig::new(THINNING_TRIALS, MC_SEED).with_workers(workers);
        let r = montecarlo::thinning_test(dim(d), 30.0, cfg)?;
        let means_ok = r
            .coordinates
            .iter()
            .all(|c| (c.mean / r.expected_mean - 1.0).abs() <= 0.01);
        ok &= r.passed && means_ok;
        notes.push(format!("d={d}: passed={} means_ok={means_ok}", r.passed));
    }
    Ok((ok, notes.join("; ")))
}

fn mc_grid(workers: usize) -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for d in 1..=3 {
        for t in [1.0, 5.0, 10.0] {
            let d = dim(d);
            let cfg = McConfig::new(MC_TRIALS, MC_SEED).with_workers(workers);
            let e = montecarlo::mc_collision_prob(d, t, cfg)?;
            let p = bessel::collision_prob(t, d)?.get();
            ok &= e.covers(p, 3.0);
            worst = worst.max((e.mean - p).abs() / e.stderr);
        }
    }
    Ok((ok, format!("worst deviation {worst:.2} standard errors")))
}
