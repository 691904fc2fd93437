//! Continuous Fourier transform on a grid and Fourier multiplier operators.
//!
//! Convention: `Ff(ξ) = ∫ e^{-2πiξy} f(y) dy`. On a [`Grid`] with `x_j = -L + jΔ`
//! and frequencies `ξ_m = (m - N/2)/(2L)` the quadrature reads
//! `F_m = Δ (-1)^m Σ_j (-1)^j f_j e^{-2πimj/N}`, so a plain FFT of the
//! sign-alternated samples does the work.

use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Result};
use crate::signal::{Grid, LebesgueExponent, Signal};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

fn alternate(buf: &mut [Complex64]) {
    for z in buf.iter_mut().skip(1).step_by(2) {
        *z = -*z;
    }
}

/// Samples of `Ff` on `f.grid().dual()`.
pub fn forward_ft(f: &Signal) -> Signal {
    let grid = *f.grid();
    let mut buf = f.samples().to_vec();
    alternate(&mut buf);
    plan(buf.len(), false).process(&mut buf);
    alternate(&mut buf);
    let dx = grid.spacing();
    for z in &mut buf {
        *z *= dx;
    }
    Signal::from_parts_unchecked(grid.dual(), buf)
}

/// Exact inverse of [`forward_ft`]; the result lives on `g.grid().dual()`.
pub fn inverse_ft(g: &Signal) -> Signal {
    let freq = *g.grid();
    let mut buf = g.samples().to_vec();
    alternate(&mut buf);
    plan(buf.len(), true).process(&mut buf);
    alternate(&mut buf);
    let dxi = freq.spacing();
    for z in &mut buf {
        *z *= dxi;
    }
    Signal::from_parts_unchecked(freq.dual(), buf)
}

type Symbol = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A Fourier multiplier symbol with its metadata.
#[derive(Clone)]
pub struct Multiplier {
    symbol: Arc<Symbol>,
    unimodular: bool,
    bound: f64,
    singular_points: Vec<(f64, Complex64)>,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier")
            .field("unimodular", &self.unimodular)
            .field("bound", &self.bound)
            .field("singular_points", &self.singular_points)
            .finish_non_exhaustive()
    }
}

impl Multiplier {
    /// A general bounded symbol with `|m(ξ)| <= bound`.
    pub fn new(symbol: impl Fn(f64) -> Complex64 + Send + Sync + 'static, bound: f64) -> Self {
        Multiplier {
            symbol: Arc::new(symbol),
            unimodular: false,
            bound,
            singular_points: Vec::new(),
        }
    }

    /// A symbol with `|m(ξ)| = 1` everywhere.
    pub fn unimodular(symbol: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Multiplier {
            unimodular: true,
            bound: 1.0,
            ..Multiplier::new(symbol, 1.0)
        }
    }

    pub fn constant(c: Complex64) -> Self {
        let unimodular = (c.norm() - 1.0).abs() < 1e-15;
        Multiplier {
            unimodular,
            ..Multiplier::new(move |_| c, c.norm())
        }
    }

    /// Piecewise-constant symbol taking `values[m]` on the frequency bin `m` of `grid.dual()`.
    ///
    /// Lookups wrap periodically, so both `±ξ_N` hit bin 0.
    pub fn tabulated(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return domain("one symbol value per frequency bin required");
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("symbol values must be finite");
        }
        let n = values.len() as i64;
        let two_l = 2.0 * grid.half_width();
        let bound = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let unimodular = values.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15);
        let values: Arc<[Complex64]> = values.into();
        Ok(Multiplier {
            unimodular,
            ..Multiplier::new(
                move |xi| {
                    let m = (xi * two_l).round() as i64 + n / 2;
                    values[m.rem_euclid(n) as usize]
                },
                bound,
            )
        })
    }

    /// Declare the value used at a point where the symbol has no limit.
    pub fn with_singular_point(mut self, xi: f64, value: Complex64) -> Self {
        self.singular_points.push((xi, value));
        self
    }

    pub fn is_unimodular(&self) -> bool {
        self.unimodular
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn singular_points(&self) -> &[(f64, Complex64)] {
        &self.singular_points
    }

    /// The symbol at `xi`, conventions applied.
    pub fn eval(&self, xi: f64) -> Complex64 {
        for &(s, v) in &self.singular_points {
            if s == xi {
                return v;
            }
        }
        (self.symbol)(xi)
    }

    /// Symbol values on the frequency bins of `grid.dual()`, indexed like the FFT output.
    ///
    /// Bin 0 sits at `-ξ_N`, which the periodic grid cannot tell apart from `+ξ_N`;
    /// it receives `(m(ξ_N) + m(-ξ_N))/2`, pushed back to the unit circle for
    /// unimodular symbols.
    pub fn sample_on(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        let freq = grid.dual();
        let mut out = Vec::with_capacity(freq.len());
        for (m, xi) in freq.points().enumerate() {
            let v = if m == 0 {
                let s = (self.eval(xi) + self.eval(-xi)) * 0.5;
                if self.unimodular {
                    let r = s.norm();
                    if r > 0.0 {
                        s / r
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                } else {
                    s
                }
            } else {
                self.eval(xi)
            };
            if !v.re.is_finite() || !v.im.is_finite() {
                return domain(format!("symbol is not finite at xi = {xi}"));
            }
            if v.norm() > self.bound * (1.0 + 1e-12) + 1e-300 {
                return domain(format!(
                    "|symbol({xi})| = {} exceeds the declared bound {}",
                    v.norm(),
                    self.bound
                ));
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// The FFT of the sign-alternated samples; reused when many symbols act on one signal.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(f: &Signal) -> Self {
        let mut coeffs = f.samples().to_vec();
        alternate(&mut coeffs);
        plan(coeffs.len(), false).process(&mut coeffs);
        Spectrum {
            grid: *f.grid(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `F^{-1}(sym · Ff)` for symbol values already sampled by [`Multiplier::sample_on`].
    pub fn apply(&self, sym: &[Complex64]) -> Signal {
        debug_assert_eq!(sym.len(), self.coeffs.len());
        let n = self.coeffs.len();
        let scale = 1.0 / n as f64;
        let mut buf: Vec<Complex64> = self
            .coeffs
            .iter()
            .zip(sym)
            .map(|(c, s)| c * s * scale)
            .collect();
        plan(n, true).process(&mut buf);
        alternate(&mut buf);
        Signal::from_parts_unchecked(self.grid, buf)
    }
}

/// `T_m f = F^{-1}(m · Ff)` on the grid of `f`.
pub fn apply_multiplier(m: &Multiplier, f: &Signal) -> Result<Signal> {
    let sym = m.sample_on(f.grid())?;
    Ok(Spectrum::new(f).apply(&sym))
}

/// `ξ ↦ e^{it/ξ}`, with value 1 at `ξ = 0`.
pub fn make_osc_multiplier(t: f64) -> Result<Multiplier> {
    if !t.is_finite() {
        return domain(format!("t must be finite, got {t}"));
    }
    if t == 0.0 {
        return Ok(Multiplier::constant(Complex64::new(1.0, 0.0)));
    }
    Ok(
        Multiplier::unimodular(move |xi| Complex64::cis(t / xi))
            .with_singular_point(0.0, Complex64::new(1.0, 0.0)),
    )
}

/// `ξ ↦ exp(t / (-ε - 2πiξ))`, the symbol of `e^{t(A-ε)^{-1}}` for `A = -d/dx`.
///
/// `eps = 0` gives the unimodular limit `e^{it/(2πξ)}` with value 1 at `ξ = 0`.
pub fn make_regularized_semigroup_multiplier(t: f64, eps: f64) -> Result<Multiplier> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("t must be finite and >= 0, got {t}"));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return domain(format!("eps must be finite and >= 0, got {eps}"));
    }
    if t == 0.0 {
        return Ok(Multiplier::constant(Complex64::new(1.0, 0.0)));
    }
    if eps == 0.0 {
        return Ok(Multiplier::unimodular(move |xi| {
            Complex64::cis(t / (2.0 * std::f64::consts::PI * xi))
        })
        .with_singular_point(0.0, Complex64::new(1.0, 0.0)));
    }
    Ok(Multiplier::new(
        move |xi| {
            let w = 2.0 * std::f64::consts::PI * xi;
            let r2 = eps * eps + w * w;
            Complex64::from_polar((-t * eps / r2).exp(), t * w / r2)
        },
        1.0,
    ))
}

/// `ξ ↦ conj m(ξ)`; its operator is the adjoint of `T_m`.
pub fn adjoint_multiplier(m: &Multiplier) -> Multiplier {
    let inner = m.clone();
    Multiplier {
        symbol: Arc::new(move |xi| inner.eval(xi).conj()),
        unimodular: m.unimodular,
        bound: m.bound,
        singular_points: m
            .singular_points
            .iter()
            .map(|&(x, v)| (x, v.conj()))
            .collect(),
    }
}

/// `ξ ↦ m(-ξ)`.
pub fn reflect_multiplier(m: &Multiplier) -> Multiplier {
    let inner = m.clone();
    Multiplier {
        symbol: Arc::new(move |xi| inner.eval(-xi)),
        unimodular: m.unimodular,
        bound: m.bound,
        singular_points: m.singular_points.iter().map(|&(x, v)| (-x, v)).collect(),
    }
}

/// `ξ ↦ e^{-2πisξ}`, translation by `s`.
pub fn shift_multiplier(s: f64) -> Multiplier {
    Multiplier::unimodular(move |xi| Complex64::cis(-2.0 * std::f64::consts::PI * s * xi))
}

fn lp(v: &[Complex64], p: f64) -> f64 {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    peak * v
        .iter()
        .map(|z| (z.norm() / peak).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

// Norming functional of `v` in l^p, scaled to unit l^{p'} norm.
fn dual_vector(v: &[Complex64], p: f64) -> Vec<Complex64> {
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return vec![Complex64::new(0.0, 0.0); v.len()];
    }
    let mut d: Vec<Complex64> = v
        .iter()
        .map(|z| {
            let r = z.norm();
            if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                z / r * (r / peak).powf(p - 1.0)
            }
        })
        .collect();
    let q = p / (p - 1.0);
    let s = lp(&d, q);
    for z in &mut d {
        *z /= s;
    }
    d
}

fn grid_operator(sym: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let n = sym.len();
    let mut buf = x.to_vec();
    alternate(&mut buf);
    plan(n, false).process(&mut buf);
    let scale = 1.0 / n as f64;
    for (z, s) in buf.iter_mut().zip(sym) {
        *z *= s * scale;
    }
    plan(n, true).process(&mut buf);
    alternate(&mut buf);
    buf
}

/// Lower bound on the `p → p` norm of the grid operator of `m` on `grid`.
///
/// Boyd/Higham power iteration `x ← dual_{p'}(T*(dual_p(Tx)))` from several
/// starts: seeded random vectors, plus every unit vector and the constant
/// vector when `N <= 16`. `budget` is the iteration count per start. At
/// `p = 2` the exact value `max |m|` over the grid is returned.
pub fn estimate_discrete_norm(
    m: &Multiplier,
    grid: &Grid,
    p: LebesgueExponent,
    budget: usize,
    seed: u64,
) -> Result<f64> {
    if budget == 0 {
        return domain("iteration budget must be positive");
    }
    let sym = m.sample_on(grid)?;
    if p.value() == 2.0 {
        return Ok(sym.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let adj: Vec<Complex64> = sym.iter().map(|z| z.conj()).collect();
    let n = grid.len();
    let pv = p.value();
    let q = p.conjugate().value();

    let mut starts: Vec<Vec<Complex64>> = Vec::new();
    if n <= 16 {
        for k in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[k] = Complex64::new(1.0, 0.0);
            starts.push(e);
        }
        starts.push(vec![Complex64::new(1.0, 0.0); n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..16 {
        starts.push(
            (0..n)
                .map(|_| {
                    Complex64::new(
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    )
                })
                .collect(),
        );
    }

    let mut best = 0.0_f64;
    for mut x in starts {
        let s = lp(&x, pv);
        if s == 0.0 {
            continue;
        }
        for z in &mut x {
            *z /= s;
        }
        for _ in 0..budget {
            let y = grid_operator(&sym, &x);
            let gamma = lp(&y, pv);
            best = best.max(gamma);
            if gamma == 0.0 {
                break;
            }
            let z = grid_operator(&adj, &dual_vector(&y, pv));
            let zq = lp(&z, q);
            let pairing: f64 = z
                .iter()
                .zip(&x)
                .map(|(a, b)| (a.conj() * b).re)
                .sum();
            if zq <= pairing * (1.0 + 1e-13) {
                break;
            }
            x = dual_vector(&z, q);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn l2_rel(a: &Signal, b: &Signal) -> f64 {
        let p2 = LebesgueExponent::new(2.0).unwrap();
        a.difference(b).unwrap().lp_norm(p2) / b.lp_norm(p2)
    }

    #[test]
    fn box_transforms_to_sinc() {
        let g = Grid::new(32.0, 1 << 12).unwrap();
        // half-weight endpoints make the rectangle rule the trapezoid rule
        let f = Signal::from_fn(g, |x| {
            if x.abs() < 0.5 {
                c(1.0, 0.0)
            } else if x.abs() == 0.5 {
                c(0.5, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap();
        let ff = forward_ft(&f);
        for (xi, v) in ff.grid().points().zip(ff.samples()) {
            if xi.abs() < 4.0 {
                let exact = crate::specfun::sinc(xi).unwrap();
                assert!((v.re - exact).abs() < 2e-3 && v.im.abs() < 1e-12, "{xi}");
            }
        }
    }

    #[test]
    fn round_trip_and_plancherel() {
        let g = Grid::new(5.0, 64).unwrap();
        let f = Signal::from_fn(g, |x| c((-x * x).exp(), x.sin() * 0.1)).unwrap();
        let ff = forward_ft(&f);
        let p2 = LebesgueExponent::new(2.0).unwrap();
        assert!((ff.lp_norm(p2) - f.lp_norm(p2)).abs() < 1e-13);
        assert_eq!(ff.grid(), &g.dual());
        let back = inverse_ft(&ff);
        assert_eq!(back.grid(), &g);
        assert!(l2_rel(&back, &f) < 1e-14);
    }

    #[test]
    fn unit_shift_is_circular_shift() {
        let g = Grid::new(2.0, 16).unwrap();
        let f = Signal::from_fn(g, |x| c(x, x * x)).unwrap();
        let out = apply_multiplier(&shift_multiplier(g.spacing()), &f).unwrap();
        for j in 0..16 {
            let d = out.samples()[j] - f.samples()[(j + 15) % 16];
            assert!(d.norm() < 1e-13);
        }
    }

    #[test]
    fn osc_symbol_examples() {
        let m = make_osc_multiplier(1.0).unwrap();
        assert!((m.eval(1.0 / PI) - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(m.eval(0.0), c(1.0, 0.0));
        assert!((m.eval(1e12) - c(1.0, 0.0)).norm() < 1e-11);
        assert!(m.is_unimodular());
        let one = make_osc_multiplier(0.0).unwrap();
        assert_eq!(one.eval(0.3), c(1.0, 0.0));
    }

    #[test]
    fn semigroup_symbol_examples() {
        let m = make_regularized_semigroup_multiplier(2.0, 0.5).unwrap();
        assert!((m.eval(0.0).re - (-4.0_f64).exp()).abs() < 1e-15);
        assert!((m.eval(1e9) - c(1.0, 0.0)).norm() < 1e-8);
        let g = Grid::new(4.0, 256).unwrap();
        assert!(m.sample_on(&g).unwrap().iter().all(|z| z.norm() <= 1.0));
        assert!(make_regularized_semigroup_multiplier(-1.0, 0.5).is_err());
    }

    #[test]
    fn adjoint_and_reflection_examples() {
        let m = make_osc_multiplier(1.0).unwrap();
        let a = adjoint_multiplier(&m);
        let r = reflect_multiplier(&m);
        for xi in [0.3, -1.7, 5.0] {
            assert_eq!(a.eval(xi), Complex64::cis(-1.0 / xi));
            assert!((r.eval(xi) - Complex64::cis(-1.0 / xi)).norm() < 1e-15);
            assert_eq!(adjoint_multiplier(&a).eval(xi), m.eval(xi));
            assert_eq!(reflect_multiplier(&r).eval(xi), m.eval(xi));
        }
        let even = Multiplier::new(|xi| c((-xi * xi).exp(), 0.0), 1.0);
        assert_eq!(reflect_multiplier(&even).eval(0.7), even.eval(0.7));
        assert_eq!(adjoint_multiplier(&even).eval(0.7), even.eval(0.7));
    }

    #[test]
    fn non_finite_symbol_rejected() {
        let g = Grid::new(1.0, 8).unwrap();
        let bad = Multiplier::unimodular(|xi| Complex64::cis(1.0 / xi));
        let f = Signal::zeros(g);
        assert!(apply_multiplier(&bad, &f).is_err());
    }

    #[test]
    fn norm_estimator_basics() {
        let g = Grid::new(2.0, 16).unwrap();
        let one = Multiplier::constant(c(1.0, 0.0));
        let p4 = LebesgueExponent::new(4.0).unwrap();
        let e = estimate_discrete_norm(&one, &g, p4, 10, 1).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
        let m = make_osc_multiplier(1.0).unwrap();
        let p2 = LebesgueExponent::new(2.0).unwrap();
        assert_eq!(estimate_discrete_norm(&m, &g, p2, 1, 1).unwrap(), 1.0);
        assert!(estimate_discrete_norm(&m, &g, p4, 0, 1).is_err());
        let a = estimate_discrete_norm(&m, &g, p4, 20, 7).unwrap();
        let b = estimate_discrete_norm(&m, &g, p4, 20, 7).unwrap();
        assert_eq!(a, b);
        assert!(a >= 1.0);
    }
}
