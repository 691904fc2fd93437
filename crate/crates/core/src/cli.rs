//! Batch front end: `invgen blowup | semigroup | kernel | vdc | selftest`.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::error::{config, Error, Result};
use crate::experiments::{
    blowup_sweep, fit_exponent, predicted_slope, rho_grid, sweep_interval,
    worst_monotonicity_drop, write_fit_csv, write_records_csv, FitResult,
};
use crate::fourier::{
    apply_multiplier, forward_ft, inverse_ft, make_osc_multiplier,
    make_regularized_semigroup_multiplier, reflect_multiplier,
};
use crate::oscillatory::{eval_G, sup_G, vdc_bound, CurvatureBound, Phase, DEFAULT_NORM_TOL};
use crate::plot::{loglog_svg, Series};
use crate::semigroup::{
    cauchy_probe, default_damping, kernel_b, kernel_laplace_check, regularized_semigroup_freq,
    regularized_semigroup_time, shift, theorem21_sweep, theorem21_sweep_damped, KernelParams,
    SweepReport,
};
use crate::signal::{Grid, LebesgueExponent, Signal};
use crate::specfun::{bessel_j1, sinc};
use crate::testfam::compute_Np;

/// Slope gate for `p > 2` as a fraction of the predicted slope (0.04 at `p = 4`).
pub const SLOPE_GATE_FRACTION: f64 = 0.48;
/// Half-width of the soft band around the predicted slope.
pub const SLOPE_SOFT_BAND: f64 = 0.03;

#[derive(Debug, Parser)]
#[command(
    name = "invgen",
    version,
    about = "Multiplier-norm blow-up of e^{it/xi} on L^p and the regularized inverse-generator semigroup"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ratio ||f_I||_p / ||T_m f_I||_p over rho, with a log-log slope fit.
    Blowup(RunArgs),
    /// Witness ratios and Cauchy increments of exp(t (A - eps)^{-1}) as eps decreases.
    Semigroup(RunArgs),
    /// Bessel kernel table and its Laplace identity over a (t, eps) lattice.
    Kernel(RunArgs),
    /// Empirical van der Corput constant over rho.
    Vdc(RunArgs),
    /// Reduced-scale invariant checks of every module.
    Selftest(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Exponents, comma separated [blowup: 2,4; semigroup: 2,4]
    #[arg(long = "p", value_delimiter = ',')]
    pub p: Vec<f64>,
    /// rho range MIN:MAX [1e2:1e6]
    #[arg(long, default_value = "1e2:1e6")]
    pub rho: String,
    /// Sweep points per decade of rho [4]
    #[arg(long, default_value_t = 4)]
    pub points_per_decade: usize,
    /// Oscillation strength / semigroup times, comma separated
    /// [blowup, vdc: 1; semigroup: 1000; kernel: 0.5,1,2]
    #[arg(long = "t", value_delimiter = ',')]
    pub t: Vec<f64>,
    /// Regularization values, comma separated [semigroup: 2^0..2^-12; kernel: 0.1,1,10]
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Grid half-width L for the semigroup sweep [1024]
    #[arg(long = "grid-L", default_value_t = 1024.0)]
    pub grid_l: f64,
    /// Grid size N (power of two) for the semigroup sweep [262144]
    #[arg(long = "grid-N", default_value_t = 1 << 18)]
    pub grid_n: usize,
    /// Relative tolerance of the oscillatory norms; kernel quadrature uses tol/10 [1e-6]
    #[arg(long, default_value_t = DEFAULT_NORM_TOL)]
    pub tol: f64,
    /// Output directory [out]
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Seed of the norm estimator's random starts [0]
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads, 0 = one per core [0]
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Also write an SVG chart (blowup)
    #[arg(long)]
    pub svg: bool,
}

/// Validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub p: Vec<LebesgueExponent>,
    pub rho_min: f64,
    pub rho_max: f64,
    pub points_per_decade: usize,
    pub t: Vec<f64>,
    pub eps: Vec<f64>,
    pub grid_l: f64,
    pub grid_n: usize,
    pub tol: f64,
    pub out: PathBuf,
    pub seed: u64,
    pub workers: usize,
    pub svg: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Blowup,
    Semigroup,
    Kernel,
    Vdc,
    Selftest,
}

fn parse_rho(s: &str) -> Result<(f64, f64)> {
    let Some((a, b)) = s.split_once(':') else {
        return config(format!("--rho expects MIN:MAX, got {s:?}"));
    };
    let lo: f64 = a
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad rho minimum {a:?}")))?;
    let hi: f64 = b
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad rho maximum {b:?}")))?;
    if !(lo >= 10.0) || !(hi <= 1e8) || !(lo < hi) {
        return config(format!(
            "--rho needs 10 <= MIN < MAX <= 1e8, got {lo}:{hi}"
        ));
    }
    Ok((lo, hi))
}

impl RunConfig {
    fn from_args(kind: Kind, a: &RunArgs) -> Result<Self> {
        let p_default: &[f64] = match kind {
            Kind::Blowup | Kind::Semigroup => &[2.0, 4.0],
            _ => &[4.0],
        };
        let p_raw = if a.p.is_empty() { p_default } else { &a.p[..] };
        let mut p = Vec::new();
        for &v in p_raw {
            p.push(LebesgueExponent::new(v).map_err(|e| Error::Config(e.to_string()))?);
        }
        let t = if !a.t.is_empty() {
            a.t.clone()
        } else {
            match kind {
                Kind::Semigroup => vec![1000.0],
                Kind::Kernel => vec![0.5, 1.0, 2.0],
                _ => vec![1.0],
            }
        };
        let eps = if !a.eps.is_empty() {
            a.eps.clone()
        } else {
            match kind {
                Kind::Kernel => vec![0.1, 1.0, 10.0],
                _ => (0..=12).map(|k| 2f64.powi(-k)).collect(),
            }
        };
        let (rho_min, rho_max) = parse_rho(&a.rho)?;
        let cfg = RunConfig {
            p,
            rho_min,
            rho_max,
            points_per_decade: a.points_per_decade,
            t,
            eps,
            grid_l: a.grid_l,
            grid_n: a.grid_n,
            tol: a.tol,
            out: a.out.clone(),
            seed: a.seed,
            workers: a.workers,
            svg: a.svg,
        };
        cfg.validate(kind)?;
        Ok(cfg)
    }

    fn validate(&self, kind: Kind) -> Result<()> {
        if self.points_per_decade == 0 {
            return config("--points-per-decade must be positive");
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return config(format!("--tol must lie in (0, 1), got {}", self.tol));
        }
        if self.t.iter().any(|t| !t.is_finite()) || self.eps.iter().any(|e| !e.is_finite()) {
            return config("--t and --eps values must be finite");
        }
        match kind {
            Kind::Blowup | Kind::Vdc => {
                if self.t.len() != 1 || !(self.t[0] > 0.0) {
                    return config("blowup and vdc take a single positive --t");
                }
                if kind == Kind::Blowup {
                    if let Some(p) = self.p.iter().find(|p| p.value() < 2.0) {
                        return config(format!(
                            "blowup sweeps p >= 2 (p < 2 follows by duality), got {}",
                            p.value()
                        ));
                    }
                    if (self.rho_max / self.rho_min).log10() < 3.0 - 1e-9 {
                        return config(format!(
                            "the slope fit needs rho to span at least 3 decades, got {}:{}",
                            self.rho_min, self.rho_max
                        ));
                    }
                    let n = rho_grid(self.rho_min, self.rho_max, self.points_per_decade).len();
                    if n < 5 {
                        return config(format!(
                            "the slope fit needs at least 5 rho points, the grid has {n}"
                        ));
                    }
                }
            }
            Kind::Semigroup => {
                if self.t.iter().any(|&t| !(t > 0.0)) {
                    return config("semigroup --t values must be positive");
                }
                if self.eps.iter().any(|&e| !(e > 0.0)) {
                    return config("semigroup --eps values must be positive");
                }
                if self.eps.windows(2).any(|w| w[1] >= w[0]) {
                    return config("semigroup --eps values must be strictly decreasing");
                }
                Grid::new(self.grid_l, self.grid_n).map_err(|e| Error::Config(e.to_string()))?;
            }
            Kind::Kernel => {
                if self.t.iter().any(|&t| !(t >= 0.0)) || self.eps.iter().any(|&e| !(e > 0.0)) {
                    return config("kernel needs --t >= 0 and --eps > 0");
                }
            }
            Kind::Selftest => {}
        }
        Ok(())
    }
}

/// Parse the process arguments and run; returns the exit status (0 pass, 1 gate failure, 2 configuration error).
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    ExitCode::from(run(&cli.command))
}

/// Run one subcommand and return its exit status.
pub fn run(cmd: &Command) -> u8 {
    let (kind, args) = match cmd {
        Command::Blowup(a) => (Kind::Blowup, a),
        Command::Semigroup(a) => (Kind::Semigroup, a),
        Command::Kernel(a) => (Kind::Kernel, a),
        Command::Vdc(a) => (Kind::Vdc, a),
        Command::Selftest(a) => (Kind::Selftest, a),
    };
    let cfg = match RunConfig::from_args(kind, args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("invgen: {e}");
            return 2;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("invgen: cannot start worker pool: {e}");
            return 2;
        }
    };
    let result = pool.install(|| match kind {
        Kind::Blowup => cmd_blowup(&cfg),
        Kind::Semigroup => cmd_semigroup(&cfg),
        Kind::Kernel => cmd_kernel(&cfg),
        Kind::Vdc => cmd_vdc(&cfg),
        Kind::Selftest => cmd_selftest(&cfg),
    });
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ (Error::Config(_) | Error::Domain(_))) => {
            eprintln!("invgen: {e}");
            2
        }
        Err(e) => {
            eprintln!("invgen: {e}");
            1
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<fs::File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(fs::File::create(dir.join(name))?))
}

fn gate(ok: bool, hard: bool, what: &str) -> bool {
    let tag = match (ok, hard) {
        (true, _) => "PASS",
        (false, true) => "FAIL",
        (false, false) => "WARN",
    };
    println!("  [{tag}] {what}");
    ok || !hard
}

/// `blowup`: writes `blowup_p{p}.csv`, `blowup_fit.csv` and optionally `blowup.svg`.
pub fn cmd_blowup(cfg: &RunConfig) -> Result<bool> {
    let t = cfg.t[0];
    let mut fits: Vec<FitResult> = Vec::new();
    let mut series = Vec::new();
    let mut all_ok = true;
    for &p in &cfg.p {
        let start = Instant::now();
        let records = blowup_sweep(
            p,
            cfg.rho_min,
            cfg.rho_max,
            cfg.points_per_decade,
            t,
            cfg.tol,
        )?;
        let mut w = create(&cfg.out, &format!("blowup_p{}.csv", p.value()))?;
        write_records_csv(&records, &mut w)?;
        let fit = fit_exponent(&records)?;
        println!(
            "blowup p = {}: {} points in {:.1?}",
            p.value(),
            records.len(),
            start.elapsed()
        );
        println!("{fit}");
        let flagged = records.iter().filter(|r| r.flagged).count();
        all_ok &= gate(flagged == 0, false, &format!("{flagged} flagged records"));
        if p.value() == 2.0 {
            let worst = records
                .iter()
                .filter(|r| !r.flagged)
                .map(|r| (r.ratio - 1.0).abs())
                .fold(0.0, f64::max);
            all_ok &= gate(worst <= 1e-6, true, &format!("max |ratio - 1| = {worst:.3e} <= 1e-6"));
            all_ok &= gate(
                fit.slope.abs() <= 0.01,
                true,
                &format!("|slope| = {:.3e} <= 0.01", fit.slope.abs()),
            );
        } else {
            let threshold = SLOPE_GATE_FRACTION * fit.predicted_slope;
            all_ok &= gate(
                fit.slope >= threshold,
                true,
                &format!("slope {:.4} >= {:.4}", fit.slope, threshold),
            );
            all_ok &= gate(
                (fit.slope - fit.predicted_slope).abs() <= SLOPE_SOFT_BAND,
                false,
                &format!(
                    "slope {:.4} within {:.4} +- {SLOPE_SOFT_BAND}",
                    fit.slope, fit.predicted_slope
                ),
            );
            let drop = worst_monotonicity_drop(&records);
            all_ok &= gate(
                drop <= 0.05,
                false,
                &format!("ratio nondecreasing up to 5% (worst drop {:.2}%)", 100.0 * drop),
            );
            let good: Vec<_> = records.iter().filter(|r| !r.flagged).collect();
            if let (Some(first), Some(last)) = (good.first(), good.last()) {
                all_ok &= gate(
                    last.ratio / first.ratio >= 2.0,
                    false,
                    &format!(
                        "ratio grows by {:.3} >= 2 over the sweep",
                        last.ratio / first.ratio
                    ),
                );
            }
        }
        series.push(Series {
            label: format!("p = {}", p.value()),
            points: records.iter().map(|r| (r.rho, r.ratio)).collect(),
            guide_slope: predicted_slope(p.value()),
        });
        fits.push(fit);
    }
    let mut w = create(&cfg.out, "blowup_fit.csv")?;
    write_fit_csv(&fits, &mut w)?;
    if cfg.svg {
        fs::write(
            cfg.out.join("blowup.svg"),
            loglog_svg("||f_I||_p / ||T_m f_I||_p (dashed: predicted slope)", &series),
        )?;
    }
    Ok(all_ok)
}

fn agreement_signals() -> Result<Vec<Signal>> {
    let g = Grid::new(128.0, 2048)?;
    Ok(vec![
        Signal::from_fn(g, |x| Complex64::new((-x * x / 2.0).exp(), 0.0))?,
        Signal::from_fn(g, |x| {
            Complex64::from_polar(
                (-(x - 3.0) * (x - 3.0) / 4.0).exp(),
                2.0 * std::f64::consts::PI * 0.7 * x,
            )
        })?,
        Signal::from_fn(g, |x| {
            Complex64::new(
                x * (-x * x / 3.0).exp(),
                0.5 * (-(x + 2.0) * (x + 2.0)).exp(),
            )
        })?,
    ])
}

/// Largest relative L² gap between the time- and frequency-domain semigroups.
pub fn time_frequency_gap(t_values: &[f64], eps_values: &[f64]) -> Result<f64> {
    let p2 = LebesgueExponent::new(2.0)?;
    let mut worst = 0.0_f64;
    for f in agreement_signals()? {
        let norm = f.lp_norm(p2);
        for &t in t_values {
            for &eps in eps_values {
                let kp = KernelParams::new(t, eps)?;
                let a = regularized_semigroup_time(&f, kp, 1e-6 * norm)?;
                let b = regularized_semigroup_freq(&f, kp)?;
                worst = worst.max(a.difference(&b)?.lp_norm(p2) / b.lp_norm(p2));
            }
        }
    }
    Ok(worst)
}

fn sweep_gates(report: &SweepReport, p: f64) -> bool {
    let mut ok = true;
    let mut ts: Vec<f64> = report.rows.iter().map(|r| r.t).collect();
    ts.dedup();
    for t in ts {
        let rows: Vec<_> = report.rows_for(t).collect();
        if p == 2.0 {
            let worst = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
            ok &= gate(
                worst <= 1.0 + 1e-10,
                true,
                &format!("t = {t}: witness ratios <= 1 + 1e-10 (max {worst:.12})"),
            );
            let inc: Vec<f64> = rows.iter().skip(1).map(|r| r.cauchy_increment).collect();
            let decreasing = inc.windows(2).all(|w| w[1] < w[0]);
            let last = inc.last().copied().unwrap_or(f64::NAN);
            ok &= gate(
                decreasing && last < 1e-3,
                true,
                &format!("t = {t}: Cauchy increments decrease to {last:.3e} < 1e-3"),
            );
        } else {
            let growth = rows[rows.len() - 1].ratio / rows[0].ratio;
            ok &= gate(
                growth >= 2.0,
                true,
                &format!("t = {t}: witness ratio grows by {growth:.3} >= 2"),
            );
        }
    }
    ok
}

/// `semigroup`: writes `semigroup_sweep.csv` and `semigroup_damped.csv`.
pub fn cmd_semigroup(cfg: &RunConfig) -> Result<bool> {
    let grid = Grid::new(cfg.grid_l, cfg.grid_n)?;
    let f = cauchy_probe(grid)?;
    let mut rows = Vec::new();
    let mut damped_rows = Vec::new();
    let mut ok = true;
    for &p in &cfg.p {
        let start = Instant::now();
        let report = theorem21_sweep(&f, &cfg.t, &cfg.eps, p)?;
        let damped = theorem21_sweep_damped(&f, &cfg.t, &cfg.eps, p, default_damping)?;
        println!(
            "semigroup sweep p = {}: {} rows in {:.1?}",
            p.value(),
            report.rows.len(),
            start.elapsed()
        );
        for r in &report.rows {
            println!(
                "  t = {:<8} eps = {:<12.6e} ratio = {:.6} increment = {:.3e}",
                r.t, r.eps, r.ratio, r.cauchy_increment
            );
        }
        ok &= sweep_gates(&report, p.value());
        let dmax = damped.rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        println!("  damped comparison (delta = t/4): max ratio {dmax:.6}");
        rows.extend(report.rows);
        damped_rows.extend(damped.rows);
    }
    SweepReport { rows }.write_csv(create(&cfg.out, "semigroup_sweep.csv")?)?;
    SweepReport { rows: damped_rows }.write_csv(create(&cfg.out, "semigroup_damped.csv")?)?;
    let gap = time_frequency_gap(&[0.5, 1.0], &[0.3, 1.0, 3.0])?;
    ok &= gate(
        gap <= 1e-3,
        true,
        &format!("time/frequency semigroups agree: max relative L2 gap {gap:.3e} <= 1e-3"),
    );
    Ok(ok)
}

/// `kernel`: writes `kernel.csv` (Laplace identity) and `kernel_table.csv` (b_t samples).
pub fn cmd_kernel(cfg: &RunConfig) -> Result<bool> {
    use std::io::Write;
    let mut w = create(&cfg.out, "kernel.csv")?;
    writeln!(w, "t,eps,laplace_quad,laplace_exact,abs_error")?;
    let mut ok = true;
    for &t in &cfg.t {
        for &eps in &cfg.eps {
            let quad = kernel_laplace_check(t, eps, 0.1 * cfg.tol)?;
            let exact = (-t / eps).exp() - 1.0;
            let err = (quad - exact).abs();
            writeln!(w, "{t},{eps},{quad:.16e},{exact:.16e},{err:.16e}")?;
            ok &= gate(
                err <= 1e-6,
                true,
                &format!("t = {t}, eps = {eps}: |quad - (e^(-t/eps) - 1)| = {err:.3e} <= 1e-6"),
            );
        }
    }
    let mut tab = create(&cfg.out, "kernel_table.csv")?;
    writeln!(tab, "t,s,b")?;
    for &t in &cfg.t {
        for k in 0..=80 {
            let s = 0.25 * k as f64;
            writeln!(tab, "{t},{s},{:.16e}", kernel_b(t, s)?)?;
        }
    }
    Ok(ok)
}

/// `vdc`: writes `vdc.csv` with the empirical constant per `ρ`.
pub fn cmd_vdc(cfg: &RunConfig) -> Result<bool> {
    use rayon::prelude::*;
    use std::io::Write;
    let t = cfg.t[0];
    let rhos = rho_grid(cfg.rho_min, cfg.rho_max, cfg.points_per_decade);
    let rows: Vec<(f64, f64, f64, f64, f64, f64, f64)> = rhos
        .par_iter()
        .map(|&rho| {
            let i = sweep_interval(rho)?;
            let curv = CurvatureBound::new(&i, t)?.rho();
            let sup = sup_G(&i, t)?.value;
            let bound = vdc_bound(&i, &Phase::new(t, 0.0)?, 2)?;
            Ok((rho, i.a(), i.b(), curv, sup, sup * curv.sqrt(), bound))
        })
        .collect::<Result<_>>()?;
    let mut w = create(&cfg.out, "vdc.csv")?;
    writeln!(w, "rho,a,b,curvature,sup_G,emp_M,bound_part")?;
    let mut ok = true;
    for &(rho, a, b, curv, sup, m, bound) in &rows {
        writeln!(
            w,
            "{rho:.16e},{a:.16e},{b:.16e},{curv:.16e},{sup:.16e},{m:.16e},{bound:.16e}"
        )?;
        println!("  rho = {rho:<10.3e} sup|G| = {sup:.6e} emp_M = {m:.4}");
        ok &= gate(sup <= (b - a) * (1.0 + 1e-12), true, &format!("rho = {rho:.3e}: sup|G| <= |I|"));
        ok &= gate(
            (bound - curv.powf(-0.5)).abs() <= 1e-12 * bound,
            true,
            &format!("rho = {rho:.3e}: bound part = curvature^(-1/2)"),
        );
    }
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), r| (lo.min(r.5), hi.max(r.5)));
    ok &= gate(
        hi / lo < 2.0,
        true,
        &format!("emp_M in [{lo:.4}, {hi:.4}], spread {:.3} < 2", hi / lo),
    );
    Ok(ok)
}

/// `selftest`: every module's invariants at reduced scale.
pub fn cmd_selftest(cfg: &RunConfig) -> Result<bool> {
    let start = Instant::now();
    let mut ok = true;
    let p2 = LebesgueExponent::new(2.0)?;
    let p4 = LebesgueExponent::new(4.0)?;

    let j1 = bessel_j1(1.0)?;
    ok &= gate(
        (j1 - 0.440_050_585_744_933_5).abs() <= 1e-12 && bessel_j1(-7.3)? == -bessel_j1(7.3)?,
        true,
        "specfun: J1(1) and oddness",
    );
    ok &= gate(
        (1..=1000).all(|n| sinc(n as f64).map(|v| v.abs() <= 1e-12).unwrap_or(false)),
        true,
        "specfun: sinc vanishes at integers",
    );

    let g = Grid::new(8.0, 256)?;
    let f = Signal::from_fn(g, |x| Complex64::new((-x * x).exp(), 0.3 * x * (-x * x).exp()))?;
    let back = inverse_ft(&forward_ft(&f));
    let rt = back.difference(&f)?.lp_norm(p2) / f.lp_norm(p2);
    let pl = (forward_ft(&f).lp_norm(p2) - f.lp_norm(p2)).abs() / f.lp_norm(p2);
    ok &= gate(rt <= 1e-12 && pl <= 1e-12, true, "fourier: round trip and Plancherel");
    let m = make_osc_multiplier(1.0)?;
    let lhs = apply_multiplier(&reflect_multiplier(&m), &f)?;
    let rhs = apply_multiplier(&m, &f.reflected())?.reflected();
    ok &= gate(
        lhs.difference(&rhs)?.lp_norm(p2) <= 1e-12 * f.lp_norm(p2),
        true,
        "fourier: reflection identity",
    );
    let unitary = apply_multiplier(&m, &f)?.lp_norm(p2) / f.lp_norm(p2);
    ok &= gate((unitary - 1.0).abs() <= 1e-10, true, "fourier: unimodular symbols are L2 isometries");
    let dual = crate::experiments::duality_transfer_check(p4, &Grid::new(2.0, 16)?, 20, cfg.seed)?;
    ok &= gate(dual.relative_gap() <= 0.05, true, "fourier: duality p = 4 vs p' = 4/3");

    ok &= gate((compute_Np(p2)? - 1.0).abs() <= 1e-10, true, "testfam: N_2 = 1");
    ok &= gate(
        (compute_Np(p4)? - (2.0_f64 / 3.0).powf(0.25)).abs() <= 1e-10,
        true,
        "testfam: N_4 = (2/3)^(1/4)",
    );

    let i = crate::testfam::Interval::new(0.5, 1.0)?;
    let gy = eval_G(&i, &Phase::new(1.0, 0.3)?)?;
    ok &= gate(gy.norm() <= 0.5, true, "oscillatory: |G(y)| <= |I|");

    let s1 = shift(&shift(&f, 0.3), 0.45);
    let s2 = shift(&f, 0.75);
    ok &= gate(
        s1.difference(&s2)?.lp_norm(p2) <= 1e-12 * f.lp_norm(p2),
        true,
        "semigroup: shift group law",
    );
    let lap = kernel_laplace_check(1.0, 1.0, 1e-8)?;
    ok &= gate(
        (lap - ((-1.0_f64).exp() - 1.0)).abs() <= 1e-6,
        true,
        "semigroup: kernel Laplace identity at (1, 1)",
    );
    let gap = time_frequency_gap(&[1.0], &[1.0])?;
    ok &= gate(gap <= 1e-3, true, "semigroup: time/frequency agreement at (1, 1)");
    let m1 = make_regularized_semigroup_multiplier(0.7, 0.0)?;
    let m2 = make_regularized_semigroup_multiplier(1.1, 0.0)?;
    let m12 = make_regularized_semigroup_multiplier(1.8, 0.0)?;
    let law = (-40..40)
        .map(|k| 0.37 * k as f64 + 0.05)
        .all(|xi| (m1.eval(xi) * m2.eval(xi) - m12.eval(xi)).norm() <= 1e-12);
    ok &= gate(law, true, "semigroup: eps = 0 symbols multiply");

    let records = blowup_sweep(p2, 1e2, 1e5, 2, 1.0, cfg.tol)?;
    let fit = fit_exponent(&records)?;
    ok &= gate(
        records.iter().all(|r| (r.ratio - 1.0).abs() <= 1e-6) && fit.slope.abs() <= 0.01,
        true,
        "experiments: p = 2 flatness",
    );
    println!("selftest finished in {:.1?}", start.elapsed());
    Ok(ok)
}
