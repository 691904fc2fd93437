//! Direct evaluation of `G(y) = (T_m f_I)(y) = ∫_I e^{i(t/x + 2πxy)} dx` and its norms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::quad::{adaptive, Tolerance, DEFAULT_MAX_PANELS};
use crate::signal::LebesgueExponent;
use crate::testfam::Interval;

/// Default relative tolerance on `∫|G|^p` for [`norm_TmfI`].
pub const DEFAULT_NORM_TOL: f64 = 1e-6;

const G_REL_TOL: f64 = 1e-10;
const MAX_X_PANELS: usize = 4_000_000;

/// The phase `Φ_y(x) = t/x + 2πxy`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase {
    pub t: f64,
    pub y: f64,
}

impl Phase {
    pub fn new(t: f64, y: f64) -> Result<Self> {
        if !t.is_finite() || !y.is_finite() {
            return domain(format!("phase parameters must be finite, got t={t}, y={y}"));
        }
        Ok(Phase { t, y })
    }

    pub fn value(&self, x: f64) -> f64 {
        self.t / x + 2.0 * PI * x * self.y
    }

    pub fn derivative(&self, x: f64) -> f64 {
        -self.t / (x * x) + 2.0 * PI * self.y
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        2.0 * self.t / (x * x * x)
    }
}

/// Lower bound `ρ = 2|t|/b³` for `|Φ''|` on `I = [a, b] ⊂ (0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureBound {
    rho: f64,
}

impl CurvatureBound {
    pub fn new(interval: &Interval, t: f64) -> Result<Self> {
        check_positive(interval)?;
        if t == 0.0 || !t.is_finite() {
            return domain(format!("curvature bound needs finite t != 0, got {t}"));
        }
        Ok(CurvatureBound {
            rho: 2.0 * t.abs() / interval.b().powi(3),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

fn check_positive(interval: &Interval) -> Result<()> {
    if !(interval.a() > 0.0) {
        return domain(format!(
            "interval [{}, {}] must lie in (0, inf)",
            interval.a(),
            interval.b()
        ));
    }
    Ok(())
}

/// Panel edges on `I` with at most about half a local period per panel.
fn phase_breaks(interval: &Interval, ph: &Phase) -> Result<Vec<f64>> {
    let (a, b) = (interval.a(), interval.b());
    let cap = interval.length() / 8.0;
    let mut breaks = vec![a];
    let mut x = a;
    while x < b {
        let slope = ph.derivative(x).abs();
        let curv = ph.second_derivative(x).abs();
        let mut h = cap;
        if slope > 0.0 {
            h = h.min(PI / slope);
        }
        if curv > 0.0 {
            h = h.min((PI / curv).sqrt());
        }
        x += h;
        if x >= b - 1e-3 * h {
            x = b;
        }
        breaks.push(x);
        if breaks.len() > MAX_X_PANELS {
            return domain(format!(
                "phase oscillates too fast on [{a}, {b}] for t={}, y={}",
                ph.t, ph.y
            ));
        }
    }
    Ok(breaks)
}

fn eval_g_with(interval: &Interval, ph: &Phase, breaks: &[f64]) -> Result<Complex64> {
    let run = adaptive(
        |x: f64| Complex64::cis(ph.value(x)),
        breaks,
        Tolerance {
            abs: 1e-12 * interval.length(),
            rel: G_REL_TOL,
        },
        1000 + 64 * breaks.len(),
    );
    if !run.converged {
        return Err(Error::NoConvergence {
            value: run.value,
            error_estimate: run.error_estimate,
            evaluations: run.evaluations,
        });
    }
    Ok(run.value)
}

/// `G(y) = ∫_I e^{iΦ_y(x)} dx` for `I ⊂ (0, ∞)`.
#[allow(non_snake_case)]
pub fn eval_G(interval: &Interval, ph: &Phase) -> Result<Complex64> {
    check_positive(interval)?;
    let breaks = phase_breaks(interval, ph)?;
    eval_g_with(interval, ph, &breaks)
}

/// Same integral with every phase panel split in two; an independent accuracy check.
#[allow(non_snake_case)]
pub fn eval_G_refined(interval: &Interval, ph: &Phase) -> Result<Complex64> {
    check_positive(interval)?;
    let coarse = phase_breaks(interval, ph)?;
    let mut fine = Vec::with_capacity(2 * coarse.len());
    for w in coarse.windows(2) {
        fine.push(w[0]);
        fine.push(0.5 * (w[0] + w[1]));
    }
    fine.push(interval.b());
    eval_g_with(interval, ph, &fine)
}

/// The `ρ`-part `ρ^{-1/k}` of the van der Corput bound, `ρ = 2|t|/b³`; only `k = 2`.
pub fn vdc_bound(interval: &Interval, ph: &Phase, k: u32) -> Result<f64> {
    if k != 2 {
        return domain(format!("only k = 2 is supported, got {k}"));
    }
    Ok(CurvatureBound::new(interval, ph.t)?.rho().powf(-0.5))
}

/// The `y`-range where `Φ_y'` vanishes somewhere in `I`.
pub fn stationary_band(interval: &Interval, t: f64) -> (f64, f64) {
    let lo = t / (2.0 * PI * interval.b().powi(2));
    let hi = t / (2.0 * PI * interval.a().powi(2));
    (lo.min(hi), lo.max(hi))
}

/// Location and value of `sup_y |G(y)|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupG {
    pub y: f64,
    pub value: f64,
}

/// `sup_y |G(y)|`: a scan at spacing `1/(16|I|)` over `|y| <= 1.25` times the band edge, then
/// golden-section refinement of the best sample.
#[allow(non_snake_case)]
pub fn sup_G(interval: &Interval, t: f64) -> Result<SupG> {
    check_positive(interval)?;
    let (lo, hi) = stationary_band(interval, t);
    let reach = (1.25 * lo.abs().max(hi.abs())).max(4.0 / interval.length());
    let (y0, y1) = (-reach, reach);
    let h = 1.0 / (16.0 * interval.length());
    let n = ((y1 - y0) / h).ceil() as usize;
    let g = |y: f64| -> Result<f64> { Ok(eval_G(interval, &Phase::new(t, y)?)?.norm()) };
    let mut best = SupG { y: y0, value: -1.0 };
    for k in 0..=n {
        let y = y0 + k as f64 * h;
        let v = g(y)?;
        if v > best.value {
            best = SupG { y, value: v };
        }
    }
    // golden-section on [y* - h, y* + h]
    let r = 0.5 * (5.0_f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (best.y - h, best.y + h);
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (g(c)?, g(d)?);
    for _ in 0..60 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = g(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = g(d)?;
        }
        if hi - lo < 1e-12 * (1.0 + best.y.abs()) {
            break;
        }
    }
    for (y, v) in [(c, fc), (d, fd)] {
        if v > best.value {
            best = SupG { y, value: v };
        }
    }
    Ok(best)
}

/// `sup|G| · ρ^{1/2}`, the measured van der Corput constant.
pub fn empirical_vdc_constant(interval: &Interval, t: f64) -> Result<f64> {
    let rho = CurvatureBound::new(interval, t)?.rho();
    Ok(sup_G(interval, t)?.value * rho.sqrt())
}

// ∫_{y0}^{y1} |G|^p dy on panels of width about 1/(2|I|).
fn integrate_gp(
    interval: &Interval,
    t: f64,
    p: f64,
    y0: f64,
    y1: f64,
    tol: Tolerance,
) -> Result<f64> {
    let w = 0.5 / interval.length();
    let n = ((y1 - y0) / w).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=n)
        .map(|k| {
            if k == n {
                y1
            } else {
                y0 + (y1 - y0) * k as f64 / n as f64
            }
        })
        .collect();
    let mut failure: Option<Error> = None;
    let run = adaptive(
        |y: f64| {
            if failure.is_some() {
                return 0.0;
            }
            match Phase::new(t, y).and_then(|ph| eval_G(interval, &ph)) {
                Ok(g) => g.norm().powf(p),
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        &breaks,
        tol,
        DEFAULT_MAX_PANELS.max(8 * n),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !run.converged {
        return Err(Error::NoConvergence {
            value: Complex64::new(run.value, 0.0),
            error_estimate: run.error_estimate,
            evaluations: run.evaluations,
        });
    }
    Ok(run.value)
}

/// `‖G‖_p` by quadrature in `y` for any `p > 1`, with `tol` the relative error
/// allowed on `∫|G|^p`.
///
/// Beyond twice the stationary band `|G(y)| <= 3/(π|y|)`, which fixes the cut-off
/// `Y` through `2 (3/π)^p Y^{1-p}/(p-1) <= tol · ∫_{-Y}^{Y}|G|^p`.
#[allow(non_snake_case)]
pub fn norm_TmfI_quadrature(
    interval: &Interval,
    t: f64,
    p: LebesgueExponent,
    tol: f64,
) -> Result<f64> {
    check_positive(interval)?;
    if !(tol > 0.0 && tol < 1.0) {
        return domain(format!("tolerance must lie in (0, 1), got {tol}"));
    }
    let pv = p.value();
    let (lo, hi) = stationary_band(interval, t);
    let tail = |y: f64| 2.0 * (3.0 / PI).powf(pv) * y.powf(1.0 - pv) / (pv - 1.0);
    let mut y = (2.0 * lo.abs().max(hi.abs())).max(8.0 / interval.length());
    let quad_tol = 0.25 * tol;
    let mut core = integrate_gp(interval, t, pv, -y, y, Tolerance::relative(quad_tol))?;
    if core == 0.0 {
        return Ok(0.0);
    }
    for _ in 0..64 {
        if tail(y) <= tol * core {
            return Ok(core.powf(1.0 / pv));
        }
        let next = (2.0 * (3.0 / PI).powf(pv) / ((pv - 1.0) * 0.5 * tol * core))
            .powf(1.0 / (pv - 1.0))
            .max(1.5 * y);
        let abs = Tolerance::absolute(0.5 * quad_tol * core);
        core += integrate_gp(interval, t, pv, y, next, abs)?;
        core += integrate_gp(interval, t, pv, -next, -y, abs)?;
        y = next;
    }
    Err(Error::Config(format!(
        "no y cut-off reached the tail tolerance {tol} for I = [{}, {}]",
        interval.a(),
        interval.b()
    )))
}

/// `‖T_m f_I‖_p`; exact `|I|^{1/2}` at `p = 2`, quadrature otherwise.
#[allow(non_snake_case)]
pub fn norm_TmfI(interval: &Interval, t: f64, p: LebesgueExponent, tol: f64) -> Result<f64> {
    check_positive(interval)?;
    if p.value() == 2.0 {
        return Ok(interval.length().sqrt());
    }
    norm_TmfI_quadrature(interval, t, p, tol)
}
