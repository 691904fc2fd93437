//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 10-point Gauss / 21-point Kronrod pair is applied per panel and the panel
//! with the largest `|K - G|` is bisected until the summed estimate meets the
//! tolerance. The engine is generic over the integrand's value type so the
//! same code integrates scalars and sampled signals (vector-valued integrals
//! of operator families).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

// Kronrod abscissae on [0, 1]; odd indices are the Gauss-10 nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_405_331,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Default cap on the number of live panels.
pub const DEFAULT_MAX_PANELS: usize = 200_000;

/// Values that can be integrated: a linear space with a norm.
pub trait Accumulate: Clone {
    /// Zero element with the same shape as `self`.
    fn zero_like(&self) -> Self;
    /// `self += w * x`
    fn add_scaled(&mut self, w: f64, x: &Self);
    /// Norm used for error estimates.
    fn norm(&self) -> f64;
    /// `‖self - other‖`
    fn distance(&self, other: &Self) -> f64;
}

impl Accumulate for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, w: f64, x: &Self) {
        *self += x * w;
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl Accumulate for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, w: f64, x: &Self) {
        *self += w * x;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

/// Stopping rule: done when `error <= max(abs, rel * |value|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn target(&self, magnitude: f64) -> f64 {
        self.abs.max(self.rel * magnitude)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.abs >= 0.0 && self.rel >= 0.0 && (self.abs > 0.0 || self.rel > 0.0);
        if !ok || !self.abs.is_finite() || !self.rel.is_finite() {
            return domain(format!("tolerance must be positive, got {self:?}"));
        }
        Ok(())
    }
}

/// Result of a scalar integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// Absolute error estimate, always `>= 0`.
    pub error_estimate: f64,
    /// Integrand evaluations, always `>= 1`.
    pub evaluations: usize,
    /// Truncation point of a semi-infinite integral, if one was used.
    pub truncation: Option<f64>,
}

/// Outcome of the generic adaptive engine.
#[derive(Clone, Debug)]
pub struct Adaptive<V> {
    pub value: V,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub panels: usize,
    pub converged: bool,
}

/// Apply the G10/K21 pair on `[a, b]`; returns (Kronrod value, |K - G|).
pub fn gauss_kronrod21<V, F>(f: &mut F, a: f64, b: f64) -> (V, f64)
where
    V: Accumulate,
    F: FnMut(f64) -> V,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc.zero_like();
    let mut gauss = fc.zero_like();
    kronrod.add_scaled(WGK[10], &fc);
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod.add_scaled(WGK[j], &f1);
        kronrod.add_scaled(WGK[j], &f2);
        if j % 2 == 1 {
            gauss.add_scaled(WG[j / 2], &f1);
            gauss.add_scaled(WG[j / 2], &f2);
        }
    }
    let mut k = kronrod.zero_like();
    k.add_scaled(half, &kronrod);
    let mut g = gauss.zero_like();
    g.add_scaled(half, &gauss);
    let err = k.distance(&g);
    (k, err)
}

struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    // insertion counter keeps heap order deterministic on ties
    seq: u64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Globally adaptive integration over the union of panels `breaks[i]..breaks[i+1]`.
///
/// `breaks` must be strictly increasing with at least two entries. Never
/// fails: a non-converged run is reported through `converged = false`.
pub fn adaptive<V, F>(mut f: F, breaks: &[f64], tol: Tolerance, max_panels: usize) -> Adaptive<V>
where
    V: Accumulate,
    F: FnMut(f64) -> V,
{
    debug_assert!(breaks.len() >= 2);
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 2);
    let mut seq = 0u64;
    let mut evaluations = 0usize;
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = gauss_kronrod21(&mut f, w[0], w[1]);
        evaluations += 21;
        total_err += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
            seq,
        });
        seq += 1;
    }
    let sum = |heap: &BinaryHeap<Panel<V>>| {
        let mut it = heap.iter();
        let first = it.next().expect("at least one panel");
        let mut s = first.value.clone();
        for p in it {
            s.add_scaled(1.0, &p.value);
        }
        s
    };
    let mut value = sum(&heap);
    let mut since_resum = 0usize;
    let mut converged = total_err <= tol.target(value.norm());
    while !converged && heap.len() < max_panels {
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // panel at floating-point resolution; nothing left to refine
            heap.push(worst);
            break;
        }
        let (v1, e1) = gauss_kronrod21(&mut f, worst.a, mid);
        let (v2, e2) = gauss_kronrod21(&mut f, mid, worst.b);
        evaluations += 42;
        value.add_scaled(-1.0, &worst.value);
        value.add_scaled(1.0, &v1);
        value.add_scaled(1.0, &v2);
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            seq,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            seq: seq + 1,
        });
        seq += 2;
        since_resum += 1;
        if since_resum >= 64 {
            // re-sum to keep the running totals free of drift
            value = sum(&heap);
            total_err = heap.iter().map(|p| p.error).sum();
            since_resum = 0;
        }
        converged = total_err <= tol.target(value.norm());
    }
    let value = sum(&heap);
    let total_err: f64 = heap.iter().map(|p| p.error).sum();
    let converged = converged || total_err <= tol.target(value.norm());
    Adaptive {
        value,
        error_estimate: total_err,
        evaluations,
        panels: heap.len(),
        converged,
    }
}

fn check_breaks(breaks: &[f64]) -> Result<()> {
    if breaks.len() < 2 {
        return domain("need at least two breakpoints");
    }
    if breaks.iter().any(|b| !b.is_finite()) {
        return domain("breakpoints must be finite");
    }
    if breaks.windows(2).any(|w| w[0] >= w[1]) {
        return domain("breakpoints must be strictly increasing");
    }
    Ok(())
}

fn finish(run: Adaptive<Complex64>, truncation: Option<f64>) -> Result<QuadResult> {
    if !run.converged {
        return Err(Error::NoConvergence {
            value: run.value,
            error_estimate: run.error_estimate,
            evaluations: run.evaluations,
        });
    }
    Ok(QuadResult {
        value: run.value,
        error_estimate: run.error_estimate,
        evaluations: run.evaluations,
        truncation,
    })
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    if !(a < b) {
        return domain(format!("integrate_finite: need a < b, got [{a}, {b}]"));
    }
    integrate_breaks(f, &[a, b], Tolerance::absolute(tol))
}

/// Integrate over `[breaks[0], breaks[last]]` with the given initial panels.
pub fn integrate_breaks<F>(f: F, breaks: &[f64], tol: Tolerance) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    check_breaks(breaks)?;
    tol.validate()?;
    finish(adaptive(f, breaks, tol, DEFAULT_MAX_PANELS), None)
}

/// Bound `|f(s)| <= scale * s^power` for `s >= 1`; `power` may be negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub scale: f64,
    pub power: f64,
}

impl Envelope {
    pub fn constant(scale: f64) -> Self {
        Envelope { scale, power: 0.0 }
    }

    /// Upper bound on `∫_S^∞ scale s^power e^{-eps s} ds`, valid for `S >= 1` and
    /// `S >= 2 power / eps`.
    pub fn damped_tail(&self, eps: f64, s: f64) -> f64 {
        let factor = if self.power > 0.0 { 2.0 } else { 1.0 };
        factor * self.scale * s.powf(self.power) * (-eps * s).exp() / eps
    }

    /// Smallest `S` (to within a few percent) with `damped_tail(eps, S) <= target`.
    pub fn truncation_point(&self, eps: f64, target: f64) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let lo = 1.0_f64.max(2.0 * self.power / eps);
        if self.damped_tail(eps, lo) <= target {
            return lo;
        }
        let mut hi = lo * 2.0;
        while self.damped_tail(eps, hi) > target {
            hi *= 2.0;
        }
        let mut lo = lo;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.damped_tail(eps, mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-3 * hi {
                break;
            }
        }
        hi
    }
}

/// Panel layout used for damped semi-infinite integrals on `[0, s_max]`.
pub fn damped_breaks(s_max: f64, eps: f64) -> Vec<f64> {
    // roughly one panel per e-folding of the damping, at least 4
    let n = ((eps * s_max).ceil() as usize).clamp(4, 4096);
    (0..=n).map(|i| s_max * i as f64 / n as f64).collect()
}

/// `∫_0^∞ f(s) e^{-eps s} ds`, truncated where the damped envelope tail drops below `tol / 2`.
pub fn integrate_semiinfinite_damped<F>(
    mut f: F,
    eps: f64,
    envelope: Envelope,
    tol: f64,
) -> Result<QuadResult>
where
    F: FnMut(f64) -> Complex64,
{
    if !(eps > 0.0) || !eps.is_finite() {
        return domain(format!("damping rate must be positive, got {eps}"));
    }
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    if !(envelope.scale >= 0.0) || !envelope.scale.is_finite() || !envelope.power.is_finite() {
        return domain(format!("invalid envelope {envelope:?}"));
    }
    let s_max = envelope.truncation_point(eps, 0.5 * tol);
    if s_max == 0.0 {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            evaluations: 1,
            truncation: Some(0.0),
        });
    }
    let run = adaptive(
        |s| f(s) * (-eps * s).exp(),
        &damped_breaks(s_max, eps),
        Tolerance::absolute(0.5 * tol),
        DEFAULT_MAX_PANELS,
    );
    let tail = envelope.damped_tail(eps, s_max);
    let mut res = finish(run, Some(s_max))?;
    res.error_estimate += tail;
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_exactness() {
        // K21 is exact to degree 31, G10 to degree 19.
        for deg in [0, 5, 19, 30, 31] {
            let mut f = |x: f64| c(x.powi(deg) * (deg as f64 + 1.0));
            let (k, _) = gauss_kronrod21(&mut f, 0.0, 1.0);
            assert!((k.re - 1.0).abs() < 1e-13, "deg {deg}: {}", k.re);
        }
        let mut g = |x: f64| c(20.0 * x.powi(19));
        let (_, err) = gauss_kronrod21(&mut g, 0.0, 1.0);
        assert!(err < 1e-13);
    }

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate_finite(|_| c(1.0), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-14);
        assert!(r.error_estimate >= 0.0 && r.evaluations >= 1);
    }

    #[test]
    fn bad_interval_is_domain_error() {
        assert!(matches!(
            integrate_finite(|_| c(1.0), 1.0, 1.0, 1e-8),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn subdivision_limit_reports_best_estimate() {
        let run = adaptive(
            |x: f64| c(x.abs().sqrt().recip()),
            &[-1.0, 1.0],
            Tolerance::absolute(1e-15),
            8,
        );
        assert!(!run.converged);
        let err = finish(run, None).unwrap_err();
        match err {
            Error::NoConvergence { value, .. } => assert!(value.re > 1.0),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn damped_examples() {
        let r = integrate_semiinfinite_damped(|_| c(1.0), 2.0, Envelope::constant(1.0), 1e-10)
            .unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-10);
        let r = integrate_semiinfinite_damped(
            c,
            1.0,
            Envelope {
                scale: 1.0,
                power: 1.0,
            },
            1e-10,
        )
        .unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-10);
        assert!(r.truncation.unwrap() > 20.0);
    }

    #[test]
    fn nonpositive_damping_rejected() {
        for eps in [0.0, -1.0, f64::NAN] {
            assert!(
                integrate_semiinfinite_damped(|_| c(1.0), eps, Envelope::constant(1.0), 1e-6)
                    .is_err()
            );
        }
    }
}
