//! C ABI over `invgen-core`.
//!
//! Every fallible function returns an [`InvgenStatus`] and writes its result
//! through an out-pointer. On failure, `invgen_last_error()` describes the
//! error for the calling thread. Objects are opaque handles released with the
//! matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use invgen_core::experiments::{blowup_sweep, fit_exponent, ExperimentRecord};
use invgen_core::fourier::{
    adjoint_multiplier, apply_multiplier, estimate_discrete_norm, forward_ft, inverse_ft,
    make_osc_multiplier, make_regularized_semigroup_multiplier, reflect_multiplier, Multiplier,
};
use invgen_core::oscillatory::{norm_TmfI, sup_G};
use invgen_core::semigroup::{kernel_b, kernel_laplace_check};
use invgen_core::signal::{Grid, LebesgueExponent, Signal};
use invgen_core::specfun::{bessel_j1, sinc};
use invgen_core::testfam::{compute_Np, norm_f_I, Interval};
use invgen_core::Error;
use num_complex::Complex64;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvgenStatus {
    InvgenOk = 0,
    InvgenErrNull = -1,
    InvgenErrDomain = -2,
    InvgenErrConvergence = -3,
    InvgenErrConfig = -4,
    InvgenErrIo = -5,
    InvgenErrPanic = -6,
}

/// A sampled complex signal on a uniform grid.
pub struct InvgenSignal(Signal);

/// A Fourier multiplier symbol.
pub struct InvgenMultiplier(Multiplier);

/// The records of a blow-up sweep.
pub struct InvgenSweep(Vec<ExperimentRecord>);

/// One row of a blow-up sweep.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InvgenRecord {
    pub rho: f64,
    pub p: f64,
    pub a: f64,
    pub b: f64,
    pub norm_f_i: f64,
    pub norm_tmf_i: f64,
    pub ratio: f64,
    pub emp_m: f64,
    pub flagged: bool,
}

/// Least-squares fit of `ln ratio` against `ln rho`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InvgenFit {
    pub p: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub predicted_slope: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> InvgenStatus {
    match e {
        Error::Domain(_) => InvgenStatus::InvgenErrDomain,
        Error::NoConvergence { .. } => InvgenStatus::InvgenErrConvergence,
        Error::Config(_) => InvgenStatus::InvgenErrConfig,
        Error::Io(_) => InvgenStatus::InvgenErrIo,
    }
}

fn guard<F>(f: F) -> InvgenStatus
where
    F: FnOnce() -> Result<(), InvgenStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => InvgenStatus::InvgenOk,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            InvgenStatus::InvgenErrPanic
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, InvgenStatus>;
}

impl<T> OrStatus<T> for invgen_core::Result<T> {
    fn or_status(self) -> Result<T, InvgenStatus> {
        self.map_err(|e| {
            set_error(&e.to_string());
            status_of(&e)
        })
    }
}

fn null(what: &str) -> InvgenStatus {
    set_error(&format!("null pointer: {what}"));
    InvgenStatus::InvgenErrNull
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), InvgenStatus> {
    if out.is_null() {
        return Err(null("output"));
    }
    out.write(v);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, InvgenStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

fn exponent(p: f64) -> Result<LebesgueExponent, InvgenStatus> {
    LebesgueExponent::new(p).or_status()
}

/// Message for the last failed call on this thread; empty if none. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn invgen_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Bessel function `J_1(x)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_bessel_j1(x: f64, out: *mut f64) -> InvgenStatus {
    guard(|| write(out, bessel_j1(x).or_status()?))
}

/// `sin(πx)/(πx)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_sinc(x: f64, out: *mut f64) -> InvgenStatus {
    guard(|| write(out, sinc(x).or_status()?))
}

/// Bessel kernel `b_t(s)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_kernel_b(t: f64, s: f64, out: *mut f64) -> InvgenStatus {
    guard(|| write(out, kernel_b(t, s).or_status()?))
}

/// `∫_0^∞ b_t(s) e^{-εs} ds` by quadrature.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_kernel_laplace(
    t: f64,
    eps: f64,
    tol: f64,
    out: *mut f64,
) -> InvgenStatus {
    guard(|| write(out, kernel_laplace_check(t, eps, tol).or_status()?))
}

/// `N_p = ‖sinc‖_p`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_compute_np(p: f64, out: *mut f64) -> InvgenStatus {
    guard(|| write(out, compute_Np(exponent(p)?).or_status()?))
}

/// `‖f_I‖_p` for `I = [a, b]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_norm_f_i(a: f64, b: f64, p: f64, out: *mut f64) -> InvgenStatus {
    guard(|| {
        let i = Interval::new(a, b).or_status()?;
        write(out, norm_f_I(&i, exponent(p)?).or_status()?)
    })
}

/// `‖T_m f_I‖_p` for `m = e^{it/ξ}`, `I = [a, b] ⊂ (0, ∞)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_norm_tmf_i(
    a: f64,
    b: f64,
    t: f64,
    p: f64,
    tol: f64,
    out: *mut f64,
) -> InvgenStatus {
    guard(|| {
        let i = Interval::new(a, b).or_status()?;
        write(out, norm_TmfI(&i, t, exponent(p)?, tol).or_status()?)
    })
}

/// `sup_y |(T_m f_I)(y)|`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_sup_g(a: f64, b: f64, t: f64, out: *mut f64) -> InvgenStatus {
    guard(|| {
        let i = Interval::new(a, b).or_status()?;
        write(out, sup_G(&i, t).or_status()?.value)
    })
}

/// New signal on the grid `x_j = -half_width + j·2·half_width/n`; `im` may be null.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `n` readable doubles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_signal_new(
    half_width: f64,
    n: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut InvgenSignal,
) -> InvgenStatus {
    guard(|| {
        if re.is_null() {
            return Err(null("re"));
        }
        let grid = Grid::new(half_width, n).or_status()?;
        let re = std::slice::from_raw_parts(re, n);
        let samples: Vec<Complex64> = if im.is_null() {
            re.iter().map(|&r| Complex64::new(r, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, n);
            re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect()
        };
        let sig = Signal::new(grid, samples).or_status()?;
        write(out, Box::into_raw(Box::new(InvgenSignal(sig))))
    })
}

/// Release a signal; null is ignored.
///
/// # Safety
/// `sig` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn invgen_signal_free(sig: *mut InvgenSignal) {
    if !sig.is_null() {
        drop(Box::from_raw(sig));
    }
}

/// Number of samples, 0 for null.
///
/// # Safety
/// `sig` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn invgen_signal_len(sig: *const InvgenSignal) -> usize {
    sig.as_ref().map_or(0, |s| s.0.samples().len())
}

/// Grid half-width and spacing.
///
/// # Safety
/// `sig` must be a live handle; `half_width` and `spacing` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_signal_grid(
    sig: *const InvgenSignal,
    half_width: *mut f64,
    spacing: *mut f64,
) -> InvgenStatus {
    guard(|| {
        let s = borrow(sig, "signal")?;
        write(half_width, s.0.grid().half_width())?;
        write(spacing, s.0.grid().spacing())
    })
}

/// Copy the samples into `re` and `im`, each of length `len` (must equal the signal length).
///
/// # Safety
/// `sig` must be a live handle; `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn invgen_signal_samples(
    sig: *const InvgenSignal,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> InvgenStatus {
    guard(|| {
        let s = borrow(sig, "signal")?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let samples = s.0.samples();
        if len != samples.len() {
            set_error(&format!(
                "buffer length {len} differs from signal length {}",
                samples.len()
            ));
            return Err(InvgenStatus::InvgenErrDomain);
        }
        let re = std::slice::from_raw_parts_mut(re, len);
        let im = std::slice::from_raw_parts_mut(im, len);
        for (k, z) in samples.iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Rectangle-rule `L^p` norm.
///
/// # Safety
/// `sig` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_signal_lp_norm(
    sig: *const InvgenSignal,
    p: f64,
    out: *mut f64,
) -> InvgenStatus {
    guard(|| {
        let s = borrow(sig, "signal")?;
        write(out, s.0.lp_norm(exponent(p)?))
    })
}

/// Continuous Fourier transform on the dual grid; the result is a new handle.
///
/// # Safety
/// `sig` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_forward_ft(
    sig: *const InvgenSignal,
    out: *mut *mut InvgenSignal,
) -> InvgenStatus {
    guard(|| {
        let s = borrow(sig, "signal")?;
        write(out, Box::into_raw(Box::new(InvgenSignal(forward_ft(&s.0)))))
    })
}

/// Inverse of [`invgen_forward_ft`].
///
/// # Safety
/// `sig` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_inverse_ft(
    sig: *const InvgenSignal,
    out: *mut *mut InvgenSignal,
) -> InvgenStatus {
    guard(|| {
        let s = borrow(sig, "signal")?;
        write(out, Box::into_raw(Box::new(InvgenSignal(inverse_ft(&s.0)))))
    })
}

fn boxed_multiplier(m: Multiplier) -> *mut InvgenMultiplier {
    Box::into_raw(Box::new(InvgenMultiplier(m)))
}

/// `ξ ↦ e^{it/ξ}` (value 1 at 0).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_multiplier_osc(
    t: f64,
    out: *mut *mut InvgenMultiplier,
) -> InvgenStatus {
    guard(|| write(out, boxed_multiplier(make_osc_multiplier(t).or_status()?)))
}

/// `ξ ↦ exp(t/(-ε - 2πiξ))`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_multiplier_semigroup(
    t: f64,
    eps: f64,
    out: *mut *mut InvgenMultiplier,
) -> InvgenStatus {
    guard(|| {
        write(
            out,
            boxed_multiplier(make_regularized_semigroup_multiplier(t, eps).or_status()?),
        )
    })
}

/// `ξ ↦ conj m(ξ)`.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_multiplier_adjoint(
    m: *const InvgenMultiplier,
    out: *mut *mut InvgenMultiplier,
) -> InvgenStatus {
    guard(|| {
        let m = borrow(m, "multiplier")?;
        write(out, boxed_multiplier(adjoint_multiplier(&m.0)))
    })
}

/// `ξ ↦ m(-ξ)`.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_multiplier_reflect(
    m: *const InvgenMultiplier,
    out: *mut *mut InvgenMultiplier,
) -> InvgenStatus {
    guard(|| {
        let m = borrow(m, "multiplier")?;
        write(out, boxed_multiplier(reflect_multiplier(&m.0)))
    })
}

/// Evaluate the symbol (conventions applied).
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_multiplier_eval(
    m: *const InvgenMultiplier,
    xi: f64,
    re: *mut f64,
    im: *mut f64,
) -> InvgenStatus {
    guard(|| {
        let m = borrow(m, "multiplier")?;
        let v = m.0.eval(xi);
        write(re, v.re)?;
        write(im, v.im)
    })
}

/// Release a multiplier; null is ignored.
///
/// # Safety
/// `m` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn invgen_multiplier_free(m: *mut InvgenMultiplier) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// `F^{-1}(m · Ff)` as a new signal.
///
/// # Safety
/// `m` and `sig` must be live handles; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_apply_multiplier(
    m: *const InvgenMultiplier,
    sig: *const InvgenSignal,
    out: *mut *mut InvgenSignal,
) -> InvgenStatus {
    guard(|| {
        let m = borrow(m, "multiplier")?;
        let s = borrow(sig, "signal")?;
        let r = apply_multiplier(&m.0, &s.0).or_status()?;
        write(out, Box::into_raw(Box::new(InvgenSignal(r))))
    })
}

/// Lower bound on the `p → p` norm of the grid operator of `m` on an `n`-point grid.
///
/// # Safety
/// `m` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_estimate_discrete_norm(
    m: *const InvgenMultiplier,
    half_width: f64,
    n: usize,
    p: f64,
    budget: usize,
    seed: u64,
    out: *mut f64,
) -> InvgenStatus {
    guard(|| {
        let m = borrow(m, "multiplier")?;
        let grid = Grid::new(half_width, n).or_status()?;
        write(
            out,
            estimate_discrete_norm(&m.0, &grid, exponent(p)?, budget, seed).or_status()?,
        )
    })
}

/// Run the blow-up sweep over `rho ∈ [rho_min, rho_max]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_blowup_sweep(
    p: f64,
    rho_min: f64,
    rho_max: f64,
    points_per_decade: usize,
    t: f64,
    tol: f64,
    out: *mut *mut InvgenSweep,
) -> InvgenStatus {
    guard(|| {
        let recs = blowup_sweep(exponent(p)?, rho_min, rho_max, points_per_decade, t, tol)
            .or_status()?;
        write(out, Box::into_raw(Box::new(InvgenSweep(recs))))
    })
}

/// Number of records, 0 for null.
///
/// # Safety
/// `sweep` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn invgen_sweep_len(sweep: *const InvgenSweep) -> usize {
    sweep.as_ref().map_or(0, |s| s.0.len())
}

/// Copy record `index`.
///
/// # Safety
/// `sweep` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_sweep_record(
    sweep: *const InvgenSweep,
    index: usize,
    out: *mut InvgenRecord,
) -> InvgenStatus {
    guard(|| {
        let s = borrow(sweep, "sweep")?;
        let Some(r) = s.0.get(index) else {
            set_error(&format!("record index {index} out of range 0..{}", s.0.len()));
            return Err(InvgenStatus::InvgenErrDomain);
        };
        write(
            out,
            InvgenRecord {
                rho: r.rho,
                p: r.p,
                a: r.interval.a(),
                b: r.interval.b(),
                norm_f_i: r.norm_fI,
                norm_tmf_i: r.norm_TmfI,
                ratio: r.ratio,
                emp_m: r.emp_M,
                flagged: r.flagged,
            },
        )
    })
}

/// Log-log fit of the sweep.
///
/// # Safety
/// `sweep` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn invgen_sweep_fit(
    sweep: *const InvgenSweep,
    out: *mut InvgenFit,
) -> InvgenStatus {
    guard(|| {
        let s = borrow(sweep, "sweep")?;
        let f = fit_exponent(&s.0).or_status()?;
        write(
            out,
            InvgenFit {
                p: f.p,
                slope: f.slope,
                intercept: f.intercept,
                r_squared: f.r_squared,
                predicted_slope: f.predicted_slope,
            },
        )
    })
}

/// Release a sweep; null is ignored.
///
/// # Safety
/// `sweep` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn invgen_sweep_free(sweep: *mut InvgenSweep) {
    if !sweep.is_null() {
        drop(Box::from_raw(sweep));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_output_is_reported() {
        let s = unsafe { invgen_bessel_j1(1.0, ptr::null_mut()) };
        assert_eq!(s, InvgenStatus::InvgenErrNull);
    }
}
