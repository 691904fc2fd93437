//! The witness family `f_I = F^{-1} 1_I` and the constants `N_p = ‖sinc‖_p`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quad::{adaptive, Tolerance, DEFAULT_MAX_PANELS};
use crate::signal::LebesgueExponent;
use crate::specfun::sinc_unchecked;

/// Relative accuracy of the cached `N_p`.
pub const NP_REL_TOL: f64 = 1e-12;

/// A frequency interval `[a, b]`, `a < b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return domain(format!("interval needs finite a < b, got [{a}, {b}]"));
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// `[λa, λb]` for `λ > 0`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return domain(format!("dilation factor must be positive, got {lambda}"));
        }
        Interval::new(lambda * self.a, lambda * self.b)
    }
}

/// `f_I(x) = e^{πi(a+b)x} |I| sinc(|I| x)`.
#[allow(non_snake_case)]
pub fn eval_f_I(interval: &Interval, x: f64) -> Complex64 {
    let len = interval.length();
    // reduce the phase (a+b)x/2 modulo 1 before scaling by 2π
    let turns = (interval.midpoint() * x).rem_euclid(1.0);
    Complex64::cis(2.0 * PI * turns) * (len * sinc_unchecked(len * x))
}

type Cache = Mutex<HashMap<u64, Arc<OnceLock<Result<f64>>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `N_p = (∫ |sinc|^p)^{1/p}`, computed once per `p` and cached.
#[allow(non_snake_case)]
pub fn compute_Np(p: LebesgueExponent) -> Result<f64> {
    let cell = {
        let mut map = cache().lock().unwrap_or_else(|e| e.into_inner());
        map.entry(p.value().to_bits()).or_default().clone()
    };
    match cell.get_or_init(|| compute_np_uncached(p.value(), NP_REL_TOL)) {
        Ok(v) => Ok(*v),
        Err(Error::NoConvergence {
            value,
            error_estimate,
            evaluations,
        }) => Err(Error::NoConvergence {
            value: *value,
            error_estimate: *error_estimate,
            evaluations: *evaluations,
        }),
        Err(e) => Err(Error::Domain(e.to_string())),
    }
}

/// `∫_0^1 |sin πu|^p du`.
fn sin_power_mean(p: f64, rel: f64) -> Result<f64> {
    let run = adaptive(
        |s: f64| {
            let (u, du) = cell_map(s);
            (PI * u).sin().abs().powf(p) * du
        },
        &[0.0, 0.5, 1.0],
        Tolerance::relative(rel),
        DEFAULT_MAX_PANELS,
    );
    converged(run)
}

/// `φ(s) = s^4/(s^4 + (1-s)^4)` and `φ'(s)`: maps `[0, 1]` onto itself with fourth-order
/// contact at both ends, which turns the `|u|^p` cusps of `|sin πu|^p` into `s^{4p+3}`.
fn cell_map(s: f64) -> (f64, f64) {
    let (a, b) = (s.powi(4), (1.0 - s).powi(4));
    let d = a + b;
    (a / d, 4.0 * (s * (1.0 - s)).powi(3) / (d * d))
}

fn converged(run: crate::quad::Adaptive<f64>) -> Result<f64> {
    if !run.converged {
        return Err(Error::NoConvergence {
            value: Complex64::new(run.value, 0.0),
            error_estimate: run.error_estimate,
            evaluations: run.evaluations,
        });
    }
    Ok(run.value)
}

/// Cut-off `X` (an integer) beyond which the averaged tail is accurate to `rel`.
///
/// Past an integer `X` the integral of `|sinc|^p` equals its period average
/// `c_p π^{-p} X^{1-p}/(p-1)` up to `p π^{-p} X^{-p-1}`.
pub(crate) fn np_cutoff(p: f64, rel: f64) -> f64 {
    // the main part exceeds 1/2 for every p > 1
    let target = 0.5 * rel;
    let x = (p * PI.powf(-p) / target).powf(1.0 / (p + 1.0));
    x.ceil().clamp(8.0, 2.0e6)
}

pub(crate) fn compute_np_uncached(p: f64, rel: f64) -> Result<f64> {
    let x_cut = np_cutoff(p, rel);
    let n = x_cut as usize;
    let breaks: Vec<f64> = (0..=n).map(|k| k as f64).collect();
    let run = adaptive(
        |s: f64| {
            let k = s.floor().min(x_cut - 1.0);
            let (u, du) = cell_map(s - k);
            sinc_unchecked(k + u).abs().powf(p) * du
        },
        &breaks,
        Tolerance::relative(0.25 * rel),
        DEFAULT_MAX_PANELS.max(8 * n),
    );
    let half = converged(run)?;
    let c_p = sin_power_mean(p, 0.25 * rel)?;
    let tail = c_p * PI.powf(-p) * x_cut.powf(1.0 - p) / (p - 1.0);
    Ok((2.0 * (half + tail)).powf(1.0 / p))
}

/// `‖f_I‖_p = |I|^{(p-1)/p} N_p`.
#[allow(non_snake_case)]
pub fn norm_f_I(interval: &Interval, p: LebesgueExponent) -> Result<f64> {
    let pv = p.value();
    Ok(interval.length().powf((pv - 1.0) / pv) * compute_Np(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> LebesgueExponent {
        LebesgueExponent::new(v).unwrap()
    }

    #[test]
    fn f_i_examples() {
        let unit = Interval::new(0.0, 1.0).unwrap();
        assert_eq!(eval_f_I(&unit, 0.0), Complex64::new(1.0, 0.0));
        let v = eval_f_I(&unit, 0.5);
        assert!((v - Complex64::new(0.0, 2.0 / PI)).norm() < 1e-15);
        let shifted = Interval::new(1.0, 2.0).unwrap();
        for x in [0.1, 0.37, 2.5, -7.25] {
            let d = eval_f_I(&shifted, x).norm() - sinc_unchecked(x).abs();
            assert!(d.abs() < 1e-15);
        }
    }

    #[test]
    fn np_known_values() {
        assert!((compute_Np(p(2.0)).unwrap() - 1.0).abs() < 1e-11);
        let n4 = compute_Np(p(4.0)).unwrap();
        assert!((n4 - (2.0_f64 / 3.0).powf(0.25)).abs() < 1e-11);
    }

    #[test]
    fn norm_law_examples() {
        let i1 = Interval::new(0.0, 1.0).unwrap();
        let i4 = Interval::new(3.0, 7.0).unwrap();
        assert!((norm_f_I(&i1, p(2.0)).unwrap() - 1.0).abs() < 1e-11);
        assert!((norm_f_I(&i4, p(2.0)).unwrap() - 2.0).abs() < 1e-11);
        let half = Interval::new(0.25, 0.75).unwrap();
        let want = 0.5_f64.powf(0.75) * (2.0_f64 / 3.0).powf(0.25);
        assert!((norm_f_I(&half, p(4.0)).unwrap() - want).abs() < 1e-11);
    }

    #[test]
    fn bad_interval() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }
}
