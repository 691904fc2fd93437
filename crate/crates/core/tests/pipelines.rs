use invgen_core::experiments::{blowup_sweep, chain_lower_bound};
use invgen_core::fourier::{apply_multiplier, inverse_ft, make_osc_multiplier};
use invgen_core::oscillatory::{norm_TmfI, norm_TmfI_quadrature};
use invgen_core::signal::{Grid, LebesgueExponent, Signal};
use invgen_core::testfam::{eval_f_I, norm_f_I, Interval};

fn p(v: f64) -> LebesgueExponent {
    LebesgueExponent::new(v).unwrap()
}

#[test]
fn sampled_f_i_matches_closed_form_norm() {
    let g = Grid::new(256.0, 1 << 14).unwrap();
    for (a, b) in [(1.0, 2.0), (0.5, 1.0), (-0.3, 0.9)] {
        let i = Interval::new(a, b).unwrap();
        let f = Signal::from_fn(g, |x| eval_f_I(&i, x)).unwrap();
        for pv in [3.0, 4.0, 6.0] {
            let sampled = f.lp_norm(p(pv));
            let exact = norm_f_I(&i, p(pv)).unwrap();
            assert!((sampled / exact - 1.0).abs() < 1e-2, "I = [{a}, {b}], p = {pv}");
        }
    }
}

#[test]
fn fft_pipeline_matches_oscillatory_quadrature() {
    // T_m f_I = F^{-1}(m 1_I), built on the frequency side of a fine grid.
    let x = Grid::new(1024.0, 1 << 18).unwrap();
    let i = Interval::new(0.5, 1.0).unwrap();
    let spectrum = Signal::indicator(x.dual(), i.a(), i.b());
    let f = inverse_ft(&spectrum);
    let tf = apply_multiplier(&make_osc_multiplier(1.0).unwrap(), &f).unwrap();
    let fft = tf.lp_norm(p(4.0));
    let quad = norm_TmfI(&i, 1.0, p(4.0), 1e-8).unwrap();
    assert!((fft / quad - 1.0).abs() < 1e-3, "fft {fft} quad {quad}");
    let ratio_fft = f.lp_norm(p(4.0)) / fft;
    let ratio = norm_f_I(&i, p(4.0)).unwrap() / quad;
    assert!((ratio_fft / ratio - 1.0).abs() < 2e-3);
}

#[test]
fn quadrature_route_reproduces_plancherel() {
    let i = Interval::new(0.5, 1.0).unwrap();
    let v = norm_TmfI_quadrature(&i, 1.0, p(2.0), 1e-2).unwrap();
    assert!((v / i.length().sqrt() - 1.0).abs() < 1e-3, "{v}");
}

#[test]
fn ratios_respect_the_interpolation_chain() {
    let recs = blowup_sweep(p(4.0), 1e2, 1e3, 4, 1.0, 1e-6).unwrap();
    for r in &recs {
        let lower = chain_lower_bound(r).unwrap();
        assert!(r.ratio >= lower * (1.0 - 1e-6), "rho {}: {} < {lower}", r.rho, r.ratio);
        assert!(r.ratio >= 1.0);
    }
}
