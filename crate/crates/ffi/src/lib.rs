//! C ABI over `lattice_collisions`.
//!
//! Every fallible function returns an [`LcStatus`] and writes results through
//! out-pointers, which are left untouched on failure. The message for the most
//! recent failure on the calling thread is available from
//! [`lc_last_error_message`]. Fits and Monte Carlo configurations are exposed
//! as opaque handles owned by the caller and released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lattice_collisions::analysis::{self, default_grid, AsymptoticFit, Growth};
use lattice_collisions::montecarlo::{self, Estimate, McConfig};
use lattice_collisions::walk::Mode;
use lattice_collisions::{bessel, Dimension, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range.
    InvalidInput = 2,
    /// A quadrature budget, evaluation or fit-quality check failed.
    Numerical = 3,
    /// The library panicked; this is a bug.
    Internal = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcGrowth {
    Sqrt = 0,
    Log = 1,
    Convergent = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcMode {
    Discrete = 0,
    Continuous = 1,
}

/// Outcome of [`lc_classify`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LcClassification {
    pub finite: bool,
    pub growth: LcGrowth,
    /// Mean log₁₀ ratio of consecutive window increments.
    pub decade_exponent: f64,
    /// Whether the numerical diagnostic agrees with the integral test.
    pub consistent: bool,
}

/// A Monte Carlo mean with its standard error.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LcEstimate {
    pub mean: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

impl From<Estimate> for LcEstimate {
    fn from(e: Estimate) -> Self {
        LcEstimate {
            mean: e.mean,
            std_error: e.stderr,
            trials: e.trials,
            seed: e.seed,
        }
    }
}

/// Opaque handle to a leading-constant fit.
pub struct LcFit(AsymptoticFit);

/// Opaque handle to a Monte Carlo configuration.
pub struct LcMonteCarlo(McConfig);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: LcStatus, msg: impl Into<String>) -> LcStatus {
    set_last_error(msg.into());
    status
}

fn from_error(e: Error) -> LcStatus {
    let status = if e.is_numerical() {
        LcStatus::Numerical
    } else {
        LcStatus::InvalidInput
    };
    fail(status, e.to_string())
}

/// Runs `body`, turning library errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), LcStatus>) -> LcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LcStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(LcStatus::Internal, "internal panic"),
    }
}

fn lib<T>(r: lattice_collisions::Result<T>) -> Result<T, LcStatus> {
    r.map_err(from_error)
}

fn dimension(d: u32) -> Result<Dimension, LcStatus> {
    lib(Dimension::new(d as usize))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), LcStatus> {
    if p.is_null() {
        Err(fail(LcStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

/// Writes `value` through `out` unless `out` is null (optional outputs).
unsafe fn write_opt<T>(out: *mut T, value: T) {
    if !out.is_null() {
        *out = value;
    }
}

/// Message for the last failure on this thread, or null if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `e^{-z} I₀(z)`. `out_err_bound` may be null.
///
/// # Safety
/// `out_value` must be valid for writes; `out_err_bound` must be null or valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn lc_i0_scaled(z: f64, out_value: *mut f64, out_err_bound: *mut f64) -> LcStatus {
    guard(|| {
        non_null(out_value, "out_value")?;
        let v = lib(bessel::i0_scaled(z))?;
        *out_value = v.value;
        write_opt(out_err_bound, v.err_bound);
        Ok(())
    })
}

/// `P(D_j(t) = 0)` for one coordinate in dimension `d`.
///
/// # Safety
/// `out_p` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lc_coordinate_return_prob(t: f64, d: u32, out_p: *mut f64) -> LcStatus {
    guard(|| {
        non_null(out_p, "out_p")?;
        *out_p = lib(bessel::coordinate_return_prob(t, dimension(d)?))?.get();
        Ok(())
    })
}

/// `P(D(t) = 0)` in dimension `d`, with its natural logarithm, which stays
/// finite when the probability underflows. `out_log_p` may be null.
///
/// # Safety
/// `out_p` must be valid for writes; `out_log_p` must be null or valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn lc_collision_prob(t: f64, d: u32, out_p: *mut f64, out_log_p: *mut f64) -> LcStatus {
    guard(|| {
        non_null(out_p, "out_p")?;
        let c = lib(bessel::collision_prob_detailed(t, dimension(d)?))?;
        *out_p = c.p_collision;
        write_opt(out_log_p, c.log_p_collision);
        Ok(())
    })
}

/// `∫₀^{t_max} P(D(t) = 0) dt` into `out_value`. For `d ≥ 3` the integral
/// to infinity goes to `out_total`; otherwise `out_total` receives +∞.
/// `out_err_estimate` and `out_total` may be null.
///
/// # Safety
/// `out_value` must be valid for writes; the other out-pointers must be null
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lc_expected_occupation(
    d: u32,
    t_max: f64,
    out_value: *mut f64,
    out_err_estimate: *mut f64,
    out_total: *mut f64,
) -> LcStatus {
    guard(|| {
        non_null(out_value, "out_value")?;
        let est = lib(analysis::expected_occupation(dimension(d)?, t_max))?;
        *out_value = est.quadrature.value;
        write_opt(out_err_estimate, est.quadrature.err_estimate);
        write_opt(out_total, est.total().unwrap_or(f64::INFINITY));
        Ok(())
    })
}

/// Whether two walkers in dimension `d` meet finitely often in expectation.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lc_classify(d: u32, out: *mut LcClassification) -> LcStatus {
    guard(|| {
        non_null(out, "out")?;
        let v = lib(analysis::classify_dimension(dimension(d)?))?;
        *out = LcClassification {
            finite: v.expected_collisions_finite,
            growth: match v.growth_diagnostic {
                Growth::Sqrt => LcGrowth::Sqrt,
                Growth::Log => LcGrowth::Log,
                Growth::Convergent => LcGrowth::Convergent,
            },
            decade_exponent: v.decade_exponent,
            consistent: v.consistent,
        };
        Ok(())
    })
}

/// Fits `lim t^{d/2} P(D(t) = 0)` on the default grid up to `t_max ≥ 1e4`.
/// On success `*out_fit` owns a handle to release with [`lc_fit_free`].
///
/// # Safety
/// `out_fit` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lc_fit_new(d: u32, t_max: f64, out_fit: *mut *mut LcFit) -> LcStatus {
    guard(|| {
        non_null(out_fit, "out_fit")?;
        let d = dimension(d)?;
        if !t_max.is_finite() || t_max < 1e4 {
            return Err(fail(
                LcStatus::InvalidInput,
                format!("t_max must be at least 1e4, got {t_max}"),
            ));
        }
        let fit = lib(analysis::fit_leading_constant(d, &default_grid(t_max)))?;
        *out_fit = Box::into_raw(Box::new(LcFit(fit)));
        Ok(())
    })
}

/// Releases a fit handle. Null is ignored.
///
/// # Safety
/// `fit` must be null or a handle from [`lc_fit_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_fit_free(fit: *mut LcFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Extrapolated leading constant. NaN for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle from [`lc_fit_new`].
#[no_mangle]
pub unsafe extern "C" fn lc_fit_constant_estimate(fit: *const LcFit) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.0.constant_estimate)
}

/// `(d/π)^{d/2}`. NaN for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle from [`lc_fit_new`].
#[no_mangle]
pub unsafe extern "C" fn lc_fit_paper_constant(fit: *const LcFit) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.0.paper_constant)
}

/// `(d/(4π))^{d/2}`. NaN for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle from [`lc_fit_new`].
#[no_mangle]
pub unsafe extern "C" fn lc_fit_derived_constant(fit: *const LcFit) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.0.derived_constant)
}

/// Estimate divided by `(d/π)^{d/2}`. NaN for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle from [`lc_fit_new`].
#[no_mangle]
pub unsafe extern "C" fn lc_fit_ratio_to_paper(fit: *const LcFit) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.0.ratio_to_paper)
}

/// Estimate divided by `(d/(4π))^{d/2}`. NaN for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle from [`lc_fit_new`].
#[no_mangle]
pub unsafe extern "C" fn lc_fit_ratio_to_derived(fit: *const LcFit) -> f64 {
    fit.as_ref().map_or(f64::NAN, |f| f.0.ratio_to_derived)
}

/// Number of grid points in the fit; 0 for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle from [`lc_fit_new`].
#[no_mangle]
pub unsafe extern "C" fn lc_fit_grid_len(fit: *const LcFit) -> usize {
    fit.as_ref().map_or(0, |f| f.0.t_grid.len())
}

/// Grid point `index` and the scaled probability `t^{d/2} P(D(t) = 0)` there.
///
/// # Safety
/// `fit` must be null or a live handle; `out_t` and `out_g` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn lc_fit_point(fit: *const LcFit, index: usize, out_t: *mut f64, out_g: *mut f64) -> LcStatus {
    guard(|| {
        non_null(fit, "fit")?;
        non_null(out_t, "out_t")?;
        non_null(out_g, "out_g")?;
        let f = &(*fit).0;
        if index >= f.t_grid.len() {
            return Err(fail(
                LcStatus::InvalidInput,
                format!("index {index} out of range for {} grid points", f.t_grid.len()),
            ));
        }
        *out_t = f.t_grid[index];
        *out_g = f.g_values[index];
        Ok(())
    })
}

/// Monte Carlo configuration. Results depend only on `trials` and `seed`;
/// `workers` sets parallelism. Release with [`lc_mc_free`].
///
/// # Safety
/// `out_mc` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lc_mc_new(trials: u64, seed: u64, workers: u32, out_mc: *mut *mut LcMonteCarlo) -> LcStatus {
    guard(|| {
        non_null(out_mc, "out_mc")?;
        if trials < montecarlo::MIN_TRIALS {
            return Err(fail(
                LcStatus::InvalidInput,
                format!("need at least {} trials, got {trials}", montecarlo::MIN_TRIALS),
            ));
        }
        if workers == 0 {
            return Err(fail(LcStatus::InvalidInput, "workers must be at least 1"));
        }
        let cfg = McConfig::new(trials, seed).with_workers(workers as usize);
        *out_mc = Box::into_raw(Box::new(LcMonteCarlo(cfg)));
        Ok(())
    })
}

/// Releases a Monte Carlo handle. Null is ignored.
///
/// # Safety
/// `mc` must be null or a handle from [`lc_mc_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lc_mc_free(mc: *mut LcMonteCarlo) {
    if !mc.is_null() {
        drop(Box::from_raw(mc));
    }
}

/// Fraction of continuous-time pairs together at time `t`.
///
/// # Safety
/// `mc` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lc_mc_collision_prob(
    mc: *const LcMonteCarlo,
    d: u32,
    t: f64,
    out: *mut LcEstimate,
) -> LcStatus {
    guard(|| {
        non_null(mc, "mc")?;
        non_null(out, "out")?;
        let e = lib(montecarlo::mc_collision_prob(dimension(d)?, t, (*mc).0))?;
        *out = e.into();
        Ok(())
    })
}

/// Mean number of collisions up to `horizon` (steps in discrete mode, time in
/// continuous mode), counting the start.
///
/// # Safety
/// `mc` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lc_mc_expected_count(
    mc: *const LcMonteCarlo,
    d: u32,
    mode: LcMode,
    horizon: f64,
    out: *mut LcEstimate,
) -> LcStatus {
    guard(|| {
        non_null(mc, "mc")?;
        non_null(out, "out")?;
        let mode = match mode {
            LcMode::Discrete => Mode::Discrete,
            LcMode::Continuous => Mode::Continuous,
        };
        let e = lib(montecarlo::mc_expected_count(dimension(d)?, mode, horizon, (*mc).0))?;
        *out = e.into();
        Ok(())
    })
}
