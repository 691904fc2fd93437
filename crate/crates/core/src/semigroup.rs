//! The shift group, the Bessel kernel `b_t`, and the regularized approximants
//! `e^{t(A-ε)^{-1}}` of the inverse generator of `A = -d/dx`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{config, domain, Result};
use crate::fourier::{
    apply_multiplier, inverse_ft, make_regularized_semigroup_multiplier, shift_multiplier,
    Multiplier, Spectrum,
};
use crate::quad::{adaptive, damped_breaks, integrate_semiinfinite_damped, Envelope, Tolerance};
use crate::signal::{lp_norm, Grid, LebesgueExponent, Signal};
use crate::specfun::j1;

/// Phase excursion of the witness symbol across its band; fixed once.
pub const WITNESS_KAPPA: f64 = 8.0;

/// Minimum number of frequency bins a sweep witness must cover.
pub const WITNESS_MIN_BINS: usize = 8;

/// Semigroup time `t >= 0` and Abel regularization `ε >= 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    pub t: f64,
    pub eps: f64,
}

impl KernelParams {
    pub fn new(t: f64, eps: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return domain(format!("t must be finite and >= 0, got {t}"));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return domain(format!("eps must be finite and >= 0, got {eps}"));
        }
        Ok(KernelParams { t, eps })
    }
}

/// `(S(s) f)(x) = f(x - s)` by the band-limited symbol `e^{-2πisξ}`; wraps periodically.
pub fn shift(f: &Signal, s: f64) -> Signal {
    apply_multiplier(&shift_multiplier(s), f).expect("shift symbol is finite and unimodular")
}

/// `b_t(s) = -√t J_1(2√(ts))/√s`, with `b_t(0) = -t`.
pub fn kernel_b(t: f64, s: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("t must be finite and >= 0, got {t}"));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return domain(format!("s must be finite and >= 0, got {s}"));
    }
    Ok(kernel_unchecked(t, s))
}

fn kernel_unchecked(t: f64, s: f64) -> f64 {
    let u = 2.0 * (t * s).sqrt();
    if u < 1e-6 {
        // 2 J_1(u)/u = 1 - u²/8 + O(u⁴)
        return -t * (1.0 - u * u / 8.0);
    }
    -t.sqrt() * j1(u) / s.sqrt()
}

/// `|b_t(s)| <= t^{1/4} s^{-3/4}`.
fn kernel_envelope(t: f64) -> Envelope {
    Envelope {
        scale: t.powf(0.25),
        power: -0.75,
    }
}

/// `∫_0^∞ b_t(s) e^{-εs} ds`, which should equal `e^{-t/ε} - 1`.
pub fn kernel_laplace_check(t: f64, eps: f64, tol: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("t must be finite and >= 0, got {t}"));
    }
    let r = integrate_semiinfinite_damped(
        |s| Complex64::new(kernel_unchecked(t, s), 0.0),
        eps,
        kernel_envelope(t),
        tol,
    )?;
    Ok(r.value.re)
}

// Shift symbol without the unimodular fix at the Nyquist bin, so that it is
// linear in the symbol and integrates to the frequency-side convention.
fn shift_symbol_linear(grid: &Grid, s: f64) -> Vec<Complex64> {
    Multiplier::new(move |xi| Complex64::cis(-2.0 * PI * s * xi), 1.0)
        .sample_on(grid)
        .expect("shift symbol is finite")
}

/// `f + ∫_0^∞ b_t(s) e^{-εs} S(s) f ds` by adaptive quadrature of the shifted signals.
///
/// `tol` is an absolute L² tolerance. The shift range `[0, S_max]` must fit in
/// half the window and `f` must live in its central half; otherwise the
/// periodic wrap would leak into the result and a configuration error is returned.
pub fn regularized_semigroup_time(f: &Signal, kp: KernelParams, tol: f64) -> Result<Signal> {
    if !(kp.eps > 0.0) {
        return domain(format!(
            "time-domain integral needs eps > 0, got {}",
            kp.eps
        ));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    if kp.t == 0.0 {
        return Ok(f.clone());
    }
    let grid = *f.grid();
    let l = grid.half_width();
    let p2 = LebesgueExponent::new(2.0)?;
    let norm = lp_norm(f, p2);
    if norm == 0.0 {
        return Ok(f.clone());
    }
    let outside: f64 = grid
        .points()
        .zip(f.samples())
        .filter(|(x, _)| x.abs() > 0.5 * l)
        .map(|(_, z)| z.norm_sqr())
        .sum::<f64>()
        * grid.spacing();
    if outside.sqrt() > 1e-12 * norm {
        return config(format!(
            "signal has L2 mass {:.3e} outside the central half [-{}, {}] of the window",
            outside.sqrt(),
            0.5 * l,
            0.5 * l
        ));
    }
    let env = Envelope {
        scale: kernel_envelope(kp.t).scale * norm,
        ..kernel_envelope(kp.t)
    };
    let s_max = env.truncation_point(kp.eps, 0.5 * tol);
    if s_max > 0.5 * l {
        return config(format!(
            "truncation point {s_max:.3} exceeds the wrap-safe shift L/2 = {}; \
             use a larger grid half-width or a larger eps",
            0.5 * l
        ));
    }
    let spectrum = Spectrum::new(f);
    let run = adaptive(
        |s: f64| {
            let w = kernel_unchecked(kp.t, s) * (-kp.eps * s).exp();
            spectrum.apply(&shift_symbol_linear(&grid, s)).scaled(Complex64::new(w, 0.0))
        },
        &damped_breaks(s_max, kp.eps),
        Tolerance::absolute(0.5 * tol),
        4096,
    );
    if !run.converged {
        return Err(crate::error::Error::NoConvergence {
            value: Complex64::new(run.error_estimate, 0.0),
            error_estimate: run.error_estimate,
            evaluations: run.evaluations,
        });
    }
    let mut out = run.value;
    crate::quad::Accumulate::add_scaled(&mut out, 1.0, f);
    Ok(out)
}

/// `T_{m} f` for the symbol `exp(t/(-ε-2πiξ))`; `ε = 0` is allowed.
pub fn regularized_semigroup_freq(f: &Signal, kp: KernelParams) -> Result<Signal> {
    apply_multiplier(&make_regularized_semigroup_multiplier(kp.t, kp.eps)?, f)
}

/// Smooth unit-norm probe with spectrum concentrated near `ξ = 6`.
pub fn cauchy_probe(grid: Grid) -> Result<Signal> {
    let f = Signal::from_fn(grid, |x| {
        Complex64::from_polar((-x * x / 8.0).exp(), 12.0 * PI * x)
    })?;
    let n = lp_norm(&f, LebesgueExponent::new(2.0)?);
    Ok(f.scaled(Complex64::new(1.0 / n, 0.0)))
}

/// One `(t, ε)` point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub eps: f64,
    pub p: f64,
    /// `‖T g_ε‖_p / ‖g_ε‖_p` for the witness `g_ε`.
    pub ratio: f64,
    /// `‖T_ε f - T_{ε_prev} f‖_p / ‖f‖_p`; NaN on the first row of each `t`.
    pub cauchy_increment: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// CSV with columns `t,eps,p,ratio,cauchy_increment`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,eps,p,ratio,cauchy_increment")?;
        for r in &self.rows {
            writeln!(
                w,
                "{:.16e},{:.16e},{},{:.16e},{:.16e}",
                r.t, r.eps, r.p, r.ratio, r.cauchy_increment
            )?;
        }
        Ok(())
    }

    pub fn rows_for(&self, t: f64) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.t == t)
    }
}

/// Witness band `[ξ0, 2ξ0]` with `ξ0 = t√ε/(2πκ)`.
pub fn witness_band(t: f64, eps: f64) -> (f64, f64) {
    let xi0 = t * eps.sqrt() / (2.0 * PI * WITNESS_KAPPA);
    (xi0, 2.0 * xi0)
}

/// `g = F^{-1}(e^{-i arg m} 1_J)`: spectrum on the band `J`, pre-chirped against `m`.
pub fn sweep_witness(grid: &Grid, m: &Multiplier, band: (f64, f64)) -> Result<Signal> {
    let freq = grid.dual();
    let (lo, hi) = band;
    let mut bins = 0usize;
    let mut spec = Vec::with_capacity(freq.len());
    for xi in freq.points() {
        if xi >= lo && xi < hi {
            bins += 1;
            let v = m.eval(xi);
            let r = v.norm();
            spec.push(if r > 0.0 { v.conj() / r } else { Complex64::new(1.0, 0.0) });
        } else {
            spec.push(Complex64::new(0.0, 0.0));
        }
    }
    if bins < WITNESS_MIN_BINS {
        return config(format!(
            "witness band [{lo:.4e}, {hi:.4e}] covers {bins} frequency bins (< {WITNESS_MIN_BINS}); \
             enlarge the grid half-width"
        ));
    }
    if hi >= 0.5 / grid.spacing() {
        return config(format!(
            "witness band top {hi:.4e} reaches the Nyquist frequency {:.4e}; refine the grid",
            0.5 / grid.spacing()
        ));
    }
    Ok(inverse_ft(&Signal::new(freq, spec)?))
}

fn run_sweep(
    f: &Signal,
    t_values: &[f64],
    eps_values: &[f64],
    p: LebesgueExponent,
    damping: impl Fn(f64) -> f64 + Sync,
) -> Result<SweepReport> {
    if eps_values.is_empty() || t_values.is_empty() {
        return domain("sweep needs at least one t and one eps");
    }
    if eps_values.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return domain("sweep eps values must be positive");
    }
    if eps_values.windows(2).any(|w| w[1] >= w[0]) {
        return domain("sweep eps values must be strictly decreasing");
    }
    let mut ts = t_values.to_vec();
    if ts.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return domain("sweep t values must be positive");
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let grid = *f.grid();
    let f_norm = lp_norm(f, p);
    if f_norm == 0.0 {
        return domain("sweep probe signal is zero");
    }
    for &t in &ts {
        for &eps in eps_values {
            let m = make_regularized_semigroup_multiplier(t, eps + damping(t))?;
            sweep_witness(&grid, &m, witness_band(t, eps))?;
        }
    }
    let points: Vec<(f64, f64)> = ts
        .iter()
        .flat_map(|&t| eps_values.iter().map(move |&e| (t, e)))
        .collect();
    let evaluated: Vec<Result<(f64, Signal)>> = points
        .par_iter()
        .map(|&(t, eps)| {
            let kp = KernelParams::new(t, eps + damping(t))?;
            let m = make_regularized_semigroup_multiplier(kp.t, kp.eps)?;
            let g = sweep_witness(&grid, &m, witness_band(t, eps))?;
            let tg = apply_multiplier(&m, &g)?;
            let ratio = lp_norm(&tg, p) / lp_norm(&g, p);
            Ok((ratio, apply_multiplier(&m, f)?))
        })
        .collect();
    let mut rows = Vec::with_capacity(points.len());
    let mut prev: Option<(f64, Signal)> = None;
    for (&(t, eps), res) in points.iter().zip(evaluated) {
        let (ratio, tf) = res?;
        let cauchy_increment = match &prev {
            Some((pt, pf)) if *pt == t => lp_norm(&tf.difference(pf)?, p) / f_norm,
            _ => f64::NAN,
        };
        rows.push(SweepRow {
            t,
            eps,
            p: p.value(),
            ratio,
            cauchy_increment,
        });
        prev = Some((t, tf));
    }
    Ok(SweepReport { rows })
}

/// Witness ratios and Cauchy increments of `e^{t(A-ε)^{-1}}` along a decreasing `ε` sequence.
///
/// Rows are ordered by increasing `t`, then by the given (decreasing) `ε`.
pub fn theorem21_sweep(
    f: &Signal,
    t_values: &[f64],
    eps_values: &[f64],
    p: LebesgueExponent,
) -> Result<SweepReport> {
    run_sweep(f, t_values, eps_values, p, |_| 0.0)
}

/// Same sweep for the exponentially damped comparison family, `ε` replaced by `ε + δ(t)`.
pub fn theorem21_sweep_damped(
    f: &Signal,
    t_values: &[f64],
    eps_values: &[f64],
    p: LebesgueExponent,
    delta: impl Fn(f64) -> f64 + Sync,
) -> Result<SweepReport> {
    run_sweep(f, t_values, eps_values, p, delta)
}

/// Damping used for the comparison family: `δ = t/4`.
pub fn default_damping(t: f64) -> f64 {
    0.25 * t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_b(3.0, 0.0).unwrap(), -3.0);
        assert_eq!(kernel_b(0.0, 5.0).unwrap(), 0.0);
        assert!((kernel_b(1.0, 1.0).unwrap() + 0.576_724_807_756_873_4).abs() < 1e-13);
        assert!(kernel_b(1.0, -1.0).is_err());
        // continuity across the small-argument branch
        let a = kernel_b(2.0, 1e-13).unwrap();
        let b = kernel_b(2.0, 2e-13).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn laplace_examples() {
        let v = kernel_laplace_check(1.0, 1.0, 1e-9).unwrap();
        assert!((v - ((-1.0_f64).exp() - 1.0)).abs() < 1e-7);
        assert_eq!(kernel_laplace_check(0.0, 2.0, 1e-9).unwrap(), 0.0);
        let w = kernel_laplace_check(1.0, 10.0, 1e-9).unwrap();
        assert!((w - ((-0.1_f64).exp() - 1.0)).abs() < 1e-7);
        assert!(kernel_laplace_check(1.0, 0.0, 1e-9).is_err());
    }

    #[test]
    fn shift_examples() {
        let g = Grid::new(4.0, 64).unwrap();
        let f = Signal::from_fn(g, |x| Complex64::new((-x * x).exp(), x)).unwrap();
        let same = shift(&f, 0.0);
        for (a, b) in same.samples().iter().zip(f.samples()) {
            assert!((a - b).norm() < 1e-14);
        }
        let one = shift(&f, g.spacing());
        for j in 0..64 {
            assert!((one.samples()[j] - f.samples()[(j + 63) % 64]).norm() < 1e-13);
        }
    }

    #[test]
    fn time_path_zero_t_is_identity() {
        let g = Grid::new(8.0, 64).unwrap();
        let f = Signal::from_fn(g, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        let kp = KernelParams::new(0.0, 1.0).unwrap();
        assert_eq!(regularized_semigroup_time(&f, kp, 1e-6).unwrap(), f);
    }

    #[test]
    fn time_path_rejects_small_window() {
        let g = Grid::new(8.0, 64).unwrap();
        let f = Signal::from_fn(g, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        let kp = KernelParams::new(1.0, 0.1).unwrap();
        assert!(matches!(
            regularized_semigroup_time(&f, kp, 1e-6),
            Err(crate::Error::Config(_))
        ));
        let wide = Signal::from_fn(g, |_| Complex64::new(1.0, 0.0)).unwrap();
        let kp = KernelParams::new(1.0, 100.0).unwrap();
        assert!(matches!(
            regularized_semigroup_time(&wide, kp, 1e-6),
            Err(crate::Error::Config(_))
        ));
    }

    #[test]
    fn witness_band_too_narrow_is_config_error() {
        let g = Grid::new(4.0, 64).unwrap();
        let f = cauchy_probe(g).unwrap();
        let p2 = LebesgueExponent::new(2.0).unwrap();
        assert!(matches!(
            theorem21_sweep(&f, &[1.0], &[1.0, 0.5], p2),
            Err(crate::Error::Config(_))
        ));
    }
}
