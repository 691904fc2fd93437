//! Uniform grids on a window `[-L, L)` of the real line and complex signals sampled on them.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::quad::Accumulate;

/// `N` points `x_j = -L + j Δ`, `Δ = 2L / N`, `N` a power of two `>= 4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    half_width: f64,
    num_points: usize,
}

impl Grid {
    pub fn new(half_width: f64, num_points: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return domain(format!("grid half-width must be positive, got {half_width}"));
        }
        if num_points < 4 || !num_points.is_power_of_two() {
            return domain(format!(
                "grid size must be a power of two >= 4, got {num_points}"
            ));
        }
        Ok(Grid {
            half_width,
            num_points,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.num_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.num_points as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_points).map(|j| self.point(j))
    }

    /// The frequency grid: spacing `1/(2L)`, points `k/(2L)` for `k = -N/2 .. N/2-1`.
    ///
    /// It has the same shape as `self` with half-width `1/(2Δ)`; `dual` is an involution.
    pub fn dual(&self) -> Grid {
        Grid {
            half_width: 0.5 / self.spacing(),
            num_points: self.num_points,
        }
    }

    /// Index of the point nearest to `x` (no wrap).
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let j = ((x + self.half_width) / self.spacing()).round();
        if j >= 0.0 && (j as usize) < self.num_points {
            Some(j as usize)
        } else {
            None
        }
    }
}

/// An exponent `p` in `(1, ∞)`; the conjugate is derived, never stored.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LebesgueExponent(f64);

impl LebesgueExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return domain(format!("Lebesgue exponent must lie in (1, inf), got {p}"));
        }
        Ok(LebesgueExponent(p))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// `p'` with `1/p + 1/p' = 1`.
    pub fn conjugate(&self) -> LebesgueExponent {
        LebesgueExponent(self.0 / (self.0 - 1.0))
    }
}

/// Samples of a complex function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl Signal {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return domain(format!(
                "signal has {} samples, grid has {} points",
                samples.len(),
                grid.len()
            ));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("signal samples must be finite");
        }
        Ok(Signal { grid, samples })
    }

    pub(crate) fn from_parts_unchecked(grid: Grid, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), samples.len());
        Signal { grid, samples }
    }

    pub fn zeros(grid: Grid) -> Self {
        Signal {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64) -> Complex64) -> Result<Self> {
        let samples = grid.points().map(&mut f).collect();
        Signal::new(grid, samples)
    }

    /// Indicator of `[lo, hi)` sampled on the grid.
    pub fn indicator(grid: Grid, lo: f64, hi: f64) -> Self {
        let samples = grid
            .points()
            .map(|x| {
                if x >= lo && x < hi {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Signal { grid, samples }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn scaled(&self, c: Complex64) -> Signal {
        Signal {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * c).collect(),
        }
    }

    /// `self - other`; both must live on the same grid.
    pub fn difference(&self, other: &Signal) -> Result<Signal> {
        if self.grid != other.grid {
            return domain("signals live on different grids");
        }
        Ok(Signal {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Order reversal about the origin: `(R f)(x_j) = f(-x_j)` with periodic wrap.
    pub fn reflected(&self) -> Signal {
        let n = self.samples.len();
        let samples = (0..n).map(|j| self.samples[(n - j) % n]).collect();
        Signal {
            grid: self.grid,
            samples,
        }
    }

    pub fn lp_norm(&self, p: LebesgueExponent) -> f64 {
        lp_norm(self, p)
    }

    pub fn linf_norm(&self) -> f64 {
        linf_norm(self)
    }

    /// CSV with columns `x,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,re,im")?;
        for (x, z) in self.grid.points().zip(&self.samples) {
            writeln!(w, "{x:.16e},{:.16e},{:.16e}", z.re, z.im)?;
        }
        Ok(())
    }
}

impl Accumulate for Signal {
    fn zero_like(&self) -> Self {
        Signal::zeros(self.grid)
    }

    fn add_scaled(&mut self, w: f64, x: &Self) {
        for (a, b) in self.samples.iter_mut().zip(&x.samples) {
            *a += b * w;
        }
    }

    fn norm(&self) -> f64 {
        l2_norm(self)
    }

    fn distance(&self, other: &Self) -> f64 {
        let sq: f64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (self.grid.spacing() * sq).sqrt()
    }
}

fn l2_norm(f: &Signal) -> f64 {
    let sq: f64 = f.samples.iter().map(|z| z.norm_sqr()).sum();
    (f.grid.spacing() * sq).sqrt()
}

/// Rectangle-rule `(Δ Σ |f_j|^p)^{1/p}`.
pub fn lp_norm(f: &Signal, p: LebesgueExponent) -> f64 {
    let p = p.value();
    if p == 2.0 {
        return l2_norm(f);
    }
    let peak = linf_norm(f);
    if peak == 0.0 {
        return 0.0;
    }
    let s: f64 = f.samples.iter().map(|z| (z.norm() / peak).powf(p)).sum();
    peak * (f.grid.spacing() * s).powf(1.0 / p)
}

pub fn linf_norm(f: &Signal) -> f64 {
    f.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Both sides of `‖f‖_p <= ‖f‖_∞^{1-2/p} ‖f‖_2^{2/p}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpolationCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl InterpolationCheck {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn interpolation_inequality_check(
    f: &Signal,
    p: LebesgueExponent,
) -> Result<InterpolationCheck> {
    let pv = p.value();
    if !(pv > 2.0) {
        return domain(format!("interpolation check needs p > 2, got {pv}"));
    }
    let lhs = lp_norm(f, p);
    let theta = 2.0 / pv;
    let rhs = linf_norm(f).powf(1.0 - theta) * l2_norm(f).powf(theta);
    Ok(InterpolationCheck {
        holds: lhs <= rhs * (1.0 + 1e-12),
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> LebesgueExponent {
        LebesgueExponent::new(v).unwrap()
    }

    #[test]
    fn grid_invariants() {
        let g = Grid::new(4.0, 64).unwrap();
        assert_eq!(g.spacing() * 64.0, 8.0);
        assert_eq!(g.point(0), -4.0);
        let d = g.dual();
        assert_eq!(d.spacing(), 1.0 / 8.0);
        assert_eq!(d.point(32), 0.0);
        assert_eq!(d.dual(), g);
        assert!(Grid::new(4.0, 48).is_err());
        assert!(Grid::new(4.0, 2).is_err());
        assert!(Grid::new(-1.0, 64).is_err());
    }

    #[test]
    fn exponent_conjugate() {
        let q = p(4.0).conjugate();
        assert!((q.value() - 4.0 / 3.0).abs() < 1e-15);
        assert!(LebesgueExponent::new(1.0).is_err());
        assert!(LebesgueExponent::new(f64::INFINITY).is_err());
    }

    #[test]
    fn indicator_norms() {
        let g = Grid::new(4.0, 64).unwrap();
        let f = Signal::indicator(g, 0.0, 1.0);
        assert!((f.lp_norm(p(2.0)) - 1.0).abs() < g.spacing());
        assert_eq!(f.linf_norm(), 1.0);
        let z = Signal::zeros(g);
        assert_eq!(z.lp_norm(p(3.0)), 0.0);
        assert_eq!(z.linf_norm(), 0.0);
    }

    #[test]
    fn spike_gives_equality() {
        let g = Grid::new(4.0, 64).unwrap();
        let mut s = vec![Complex64::new(0.0, 0.0); 64];
        s[10] = Complex64::new(1.0, 0.0);
        let f = Signal::new(g, s).unwrap();
        let c = interpolation_inequality_check(&f, p(4.0)).unwrap();
        assert!(c.holds);
        assert!((c.lhs - g.spacing().powf(0.25)).abs() < 1e-15);
        assert!((c.lhs - c.rhs).abs() < 1e-15);
        assert!(interpolation_inequality_check(&f, p(2.0)).is_err());
    }

    #[test]
    fn rejects_bad_samples() {
        let g = Grid::new(1.0, 4).unwrap();
        assert!(Signal::new(g, vec![Complex64::new(0.0, 0.0); 3]).is_err());
        let mut s = vec![Complex64::new(0.0, 0.0); 4];
        s[1] = Complex64::new(f64::NAN, 0.0);
        assert!(Signal::new(g, s).is_err());
    }

    #[test]
    fn reflection_maps_x_to_minus_x() {
        let g = Grid::new(2.0, 8).unwrap();
        let f = Signal::from_fn(g, |x| Complex64::new(x, 0.0)).unwrap();
        let r = f.reflected();
        for j in 1..8 {
            assert_eq!(r.samples()[j].re, -g.point(j));
        }
        assert_eq!(r.samples()[0].re, -2.0);
    }

    #[test]
    fn csv_header_and_rows() {
        let g = Grid::new(1.0, 4).unwrap();
        let f = Signal::indicator(g, 0.0, 1.0);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,re,im\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
