//! The `ρ`-sweep of `‖f_I‖_p / ‖T_m f_I‖_p`, its log-log fit, and the small-grid
//! duality and interpolation checks.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{config, domain, Result};
use crate::fourier::{adjoint_multiplier, estimate_discrete_norm, make_osc_multiplier, Multiplier};
use crate::oscillatory::{norm_TmfI, sup_G, CurvatureBound};
use crate::signal::{Grid, LebesgueExponent};
use crate::testfam::{compute_Np, norm_f_I, Interval};

/// Exact header of the per-`p` sweep CSV.
pub const RECORD_CSV_HEADER: &str = "rho,p,a,b,norm_fI,norm_TmfI,ratio,emp_M,flag";
/// Exact header of the fit CSV.
pub const FIT_CSV_HEADER: &str = "p,slope,intercept,r_squared,predicted_slope";

/// One point of the blow-up sweep.
#[derive(Clone, Debug, PartialEq)]
#[allow(non_snake_case)]
pub struct ExperimentRecord {
    pub rho: f64,
    pub p: f64,
    pub interval: Interval,
    pub norm_fI: f64,
    pub norm_TmfI: f64,
    pub ratio: f64,
    /// `sup_y |G(y)|`
    pub sup_g: f64,
    /// `sup_y |G(y)| · (2t/b³)^{1/2}`
    pub emp_M: f64,
    /// Set when the oscillatory quadrature failed; such records carry NaN values.
    pub flagged: bool,
    pub failure: Option<String>,
}

/// `I(ρ) = [ρ^{-1/3}/2, ρ^{-1/3}]`.
pub fn sweep_interval(rho: f64) -> Result<Interval> {
    let b = rho.cbrt().recip();
    Interval::new(0.5 * b, b)
}

/// `ρ_min · 10^{k/ppd}` up to `ρ_max`.
pub fn rho_grid(rho_min: f64, rho_max: f64, points_per_decade: usize) -> Vec<f64> {
    let decades = (rho_max / rho_min).log10();
    let n = (decades * points_per_decade as f64 + 1e-9).floor() as usize;
    (0..=n)
        .map(|k| rho_min * 10f64.powf(k as f64 / points_per_decade as f64))
        .collect()
}

fn record(rho: f64, p: LebesgueExponent, t: f64, tol: f64) -> Result<ExperimentRecord> {
    let interval = sweep_interval(rho)?;
    let norm_fi = norm_f_I(&interval, p)?;
    let curvature = CurvatureBound::new(&interval, t)?.rho();
    let oscillatory = norm_TmfI(&interval, t, p, tol)
        .and_then(|n| Ok((n, sup_G(&interval, t)?.value)));
    Ok(match oscillatory {
        Ok((norm_tmfi, sup_g)) => ExperimentRecord {
            rho,
            p: p.value(),
            interval,
            norm_fI: norm_fi,
            norm_TmfI: norm_tmfi,
            ratio: norm_fi / norm_tmfi,
            sup_g,
            emp_M: sup_g * curvature.sqrt(),
            flagged: false,
            failure: None,
        },
        Err(e) => ExperimentRecord {
            rho,
            p: p.value(),
            interval,
            norm_fI: norm_fi,
            norm_TmfI: f64::NAN,
            ratio: f64::NAN,
            sup_g: f64::NAN,
            emp_M: f64::NAN,
            flagged: true,
            failure: Some(e.to_string()),
        },
    })
}

/// Records for `ρ` on a geometric grid, sorted by `ρ`.
///
/// `tol` is the relative tolerance on `∫|T_m f_I|^p`. Points whose oscillatory
/// quadrature fails are flagged rather than aborting the run.
pub fn blowup_sweep(
    p: LebesgueExponent,
    rho_min: f64,
    rho_max: f64,
    points_per_decade: usize,
    t: f64,
    tol: f64,
) -> Result<Vec<ExperimentRecord>> {
    if !(rho_min >= 10.0) || !(rho_max <= 1e8) || !(rho_min <= rho_max) {
        return domain(format!(
            "rho range must satisfy 10 <= rho_min <= rho_max <= 1e8, got [{rho_min}, {rho_max}]"
        ));
    }
    if p.value() < 2.0 {
        return domain(format!("blow-up sweep needs p >= 2, got {}", p.value()));
    }
    if points_per_decade == 0 {
        return domain("points per decade must be positive");
    }
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("t must be positive, got {t}"));
    }
    compute_Np(p)?;
    let rhos = rho_grid(rho_min, rho_max, points_per_decade);
    let mut records: Vec<ExperimentRecord> = rhos
        .par_iter()
        .map(|&rho| record(rho, p, t, tol))
        .collect::<Result<_>>()?;
    records.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    Ok(records)
}

/// Least-squares line through `(ln ρ, ln ratio)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub p: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `1/6 - 1/(3p)`
    pub predicted_slope: f64,
}

impl fmt::Display for FitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fit p = {}", self.p)?;
        writeln!(f, "  slope           {:.6}", self.slope)?;
        writeln!(f, "  predicted slope {:.6}", self.predicted_slope)?;
        writeln!(f, "  intercept       {:.6}", self.intercept)?;
        write!(f, "  r^2             {:.6}", self.r_squared)
    }
}

pub fn predicted_slope(p: f64) -> f64 {
    1.0 / 6.0 - 1.0 / (3.0 * p)
}

/// Fit `ln ratio = slope · ln ρ + intercept` over the unflagged records.
///
/// Needs at least 5 of them spanning at least 3 decades of `ρ`.
pub fn fit_exponent(records: &[ExperimentRecord]) -> Result<FitResult> {
    let used: Vec<&ExperimentRecord> = records.iter().filter(|r| !r.flagged).collect();
    if used.len() < 5 {
        return domain(format!(
            "fit needs at least 5 unflagged records, got {}",
            used.len()
        ));
    }
    let p = used[0].p;
    if used.iter().any(|r| r.p != p) {
        return domain("fit records mix different exponents");
    }
    let (lo, hi) = used.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), r| {
        (lo.min(r.rho), hi.max(r.rho))
    });
    if (hi / lo).log10() < 3.0 - 1e-9 {
        return domain(format!(
            "fit records span {:.2} decades of rho, need at least 3",
            (hi / lo).log10()
        ));
    }
    let xs: Vec<f64> = used.iter().map(|r| r.rho.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|r| r.ratio.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(FitResult {
        p,
        slope,
        intercept,
        r_squared,
        predicted_slope: predicted_slope(p),
    })
}

/// Largest change of the fitted slope when one record is left out.
pub fn leave_one_out_slope_change(records: &[ExperimentRecord]) -> Result<f64> {
    let full = fit_exponent(records)?.slope;
    let mut worst = 0.0_f64;
    for k in 0..records.len() {
        let rest: Vec<ExperimentRecord> = records
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, r)| r.clone())
            .collect();
        if let Ok(fit) = fit_exponent(&rest) {
            worst = worst.max((fit.slope - full).abs());
        }
    }
    Ok(worst)
}

/// Lower bound `N_p (|I| / sup|G|)^{1-2/p}` on the ratio implied by interpolating
/// between `L^2` and `L^∞`.
pub fn chain_lower_bound(r: &ExperimentRecord) -> Result<f64> {
    let p = LebesgueExponent::new(r.p)?;
    if r.flagged {
        return domain("flagged record carries no sup estimate");
    }
    Ok(compute_Np(p)? * (r.interval.length() / r.sup_g).powf(1.0 - 2.0 / r.p))
}

/// Largest backward step `1 - ratio_k / max_{j<k} ratio_j` along the sweep.
pub fn worst_monotonicity_drop(records: &[ExperimentRecord]) -> f64 {
    let mut peak = f64::NEG_INFINITY;
    let mut worst = 0.0_f64;
    for r in records.iter().filter(|r| !r.flagged) {
        if r.ratio < peak {
            worst = worst.max(1.0 - r.ratio / peak);
        }
        peak = peak.max(r.ratio);
    }
    worst
}

fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Records as CSV under [`RECORD_CSV_HEADER`], sorted by `ρ`.
pub fn write_records_csv<W: Write>(records: &[ExperimentRecord], mut w: W) -> std::io::Result<()> {
    let mut sorted: Vec<&ExperimentRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    writeln!(w, "{RECORD_CSV_HEADER}")?;
    for r in sorted {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            fmt_float(r.rho),
            r.p,
            fmt_float(r.interval.a()),
            fmt_float(r.interval.b()),
            fmt_float(r.norm_fI),
            fmt_float(r.norm_TmfI),
            fmt_float(r.ratio),
            fmt_float(r.emp_M),
            u8::from(r.flagged)
        )?;
    }
    Ok(())
}

/// Fits as CSV under [`FIT_CSV_HEADER`].
pub fn write_fit_csv<W: Write>(fits: &[FitResult], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{FIT_CSV_HEADER}")?;
    for f in fits {
        writeln!(
            w,
            "{},{},{},{},{}",
            f.p,
            fmt_float(f.slope),
            fmt_float(f.intercept),
            fmt_float(f.r_squared),
            fmt_float(f.predicted_slope)
        )?;
    }
    Ok(())
}

/// Norm estimates of `T_m` at `p` and of its adjoint at `p'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualityReport {
    pub p: f64,
    pub p_conjugate: f64,
    pub estimate_p: f64,
    pub estimate_conjugate: f64,
}

impl DualityReport {
    /// `|est_p - est_p'| / max(est_p, est_p')`
    pub fn relative_gap(&self) -> f64 {
        let top = self.estimate_p.max(self.estimate_conjugate);
        if top == 0.0 {
            0.0
        } else {
            (self.estimate_p - self.estimate_conjugate).abs() / top
        }
    }
}

/// Compare the estimated norm of `T_m` at `p` with that of `T_{\bar m}` at `p'`.
pub fn duality_check(
    m: &Multiplier,
    grid: &Grid,
    p: LebesgueExponent,
    budget: usize,
    seed: u64,
) -> Result<DualityReport> {
    let q = p.conjugate();
    Ok(DualityReport {
        p: p.value(),
        p_conjugate: q.value(),
        estimate_p: estimate_discrete_norm(m, grid, p, budget, seed)?,
        estimate_conjugate: estimate_discrete_norm(&adjoint_multiplier(m), grid, q, budget, seed)?,
    })
}

/// [`duality_check`] for `e^{i/ξ}` on a grid with `N <= 16`.
pub fn duality_transfer_check(
    p: LebesgueExponent,
    grid: &Grid,
    budget: usize,
    seed: u64,
) -> Result<DualityReport> {
    if grid.len() > 16 {
        return config(format!(
            "duality check runs on grids with N <= 16, got {}",
            grid.len()
        ));
    }
    duality_check(&make_osc_multiplier(1.0)?, grid, p, budget, seed)
}

/// Both sides of `‖T‖_p <= ‖T‖_{p0}^{1-θ} ‖T‖_{p1}^θ`, `1/p = (1-θ)/p0 + θ/p1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpolationReport {
    pub p: f64,
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn riesz_thorin_check(
    m: &Multiplier,
    grid: &Grid,
    p0: LebesgueExponent,
    p1: LebesgueExponent,
    theta: f64,
    budget: usize,
    seed: u64,
) -> Result<InterpolationReport> {
    if !(0.0..=1.0).contains(&theta) {
        return domain(format!("theta must lie in [0, 1], got {theta}"));
    }
    let inv = (1.0 - theta) / p0.value() + theta / p1.value();
    let p = LebesgueExponent::new(inv.recip())?;
    let n0 = estimate_discrete_norm(m, grid, p0, budget, seed)?;
    let n1 = estimate_discrete_norm(m, grid, p1, budget, seed)?;
    let np = estimate_discrete_norm(m, grid, p, budget, seed)?;
    Ok(InterpolationReport {
        p: p.value(),
        theta,
        lhs: np,
        rhs: n0.powf(1.0 - theta) * n1.powf(theta),
    })
}
