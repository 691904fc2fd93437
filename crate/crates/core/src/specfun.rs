//! Scalar special functions: Bessel J1 and the normalized sinc.
//!
//! `bessel_j1` switches between the Maclaurin series (summed in double-double
//! arithmetic, which removes the cancellation of the alternating terms) and the
//! Hankel asymptotic expansion at [`J1_SWITCH`]. Both branches keep an absolute
//! error below 1e-12 on `|x| <= 1e4`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, Result};

/// Argument where evaluation moves from the series to the asymptotic expansion.
pub const J1_SWITCH: f64 = 17.0;

/// Bessel function of the first kind of order one.
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("bessel_j1: non-finite argument {x}"));
    }
    Ok(j1(x))
}

/// Unchecked J1 for hot loops; callers guarantee a finite argument.
pub(crate) fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= J1_SWITCH {
        j1_series(ax)
    } else {
        j1_asymptotic(ax)
    };
    if x.is_sign_negative() {
        -v
    } else {
        v
    }
}

/// Normalized sinc, `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("sinc: non-finite argument {x}"));
    }
    Ok(sinc_unchecked(x))
}

pub(crate) fn sinc_unchecked(x: f64) -> f64 {
    let ax = x.abs();
    let z = PI * ax;
    if z < 1e-4 {
        let z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    // sin(pi x) = (-1)^n sin(pi (x - n)) with x - n exact for |x| < 2^52.
    let n = ax.round();
    let r = ax - n;
    let s = (PI * r).sin();
    let s = if n % 2.0 == 0.0 { s } else { -s };
    s / z
}

/// Maclaurin series for `x >= 0`, terms and partial sums carried in double-double.
pub(crate) fn j1_series(x: f64) -> f64 {
    let half = Dd::from(0.5 * x);
    let q = half.mul(half);
    let mut term = half;
    let mut sum = half;
    let mut k = 1.0_f64;
    loop {
        term = term.mul(q).div_f64(-(k * (k + 1.0)));
        sum = sum.add(term);
        // Alternating tail is bounded by the next term once terms decrease.
        if k > 0.5 * x && term.hi.abs() < 1e-19 * sum.hi.abs().max(1e-300) {
            break;
        }
        if term.hi == 0.0 {
            break;
        }
        k += 1.0;
    }
    sum.hi + sum.lo
}

/// Hankel asymptotic expansion for large positive `x`.
pub(crate) fn j1_asymptotic(x: f64) -> f64 {
    const MU: f64 = 4.0;
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = a * (MU - odd * odd) / (kf * eight_x);
        if next.abs() >= prev || next.abs() < 1e-17 {
            break;
        }
        prev = next.abs();
        a = next;
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
    }
    let (s, c) = x.sin_cos();
    // chi = x - 3 pi / 4
    let cos_chi = (s - c) * FRAC_1_SQRT_2;
    let sin_chi = -(s + c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        quick_two_sum(s, e + self.lo + o.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let p = q1 * d;
        let e = q1.mul_add(d, -p);
        let r = ((self.hi - p) - e + self.lo) / d;
        quick_two_sum(q1, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j1_small_values() {
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        assert!((bessel_j1(1.0).unwrap() - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!(bessel_j1(3.831_705_970_207_512_3).unwrap().abs() < 1e-10);
    }

    #[test]
    fn branches_meet_at_switch() {
        for dx in [-1e-9, 0.0, 1e-9] {
            let x = J1_SWITCH + dx;
            assert!((j1_series(x) - j1_asymptotic(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn odd_symmetry_is_exact() {
        for i in 0..2000 {
            let x = 0.013 * i as f64 + 1e-3 * (i % 7) as f64;
            assert_eq!(j1(-x).to_bits(), (-j1(x)).to_bits());
        }
    }

    #[test]
    fn non_finite_rejected() {
        assert!(bessel_j1(f64::NAN).is_err());
        assert!(sinc(f64::INFINITY).is_err());
    }

    #[test]
    fn sinc_examples() {
        assert_eq!(sinc(0.0).unwrap(), 1.0);
        assert!((sinc(0.5).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert_eq!(sinc(3.0).unwrap(), 0.0);
        assert_eq!(sinc(-0.3).unwrap(), sinc(0.3).unwrap());
    }
}
