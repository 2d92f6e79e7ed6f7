use std::f64::consts::PI;

use fiberacf_core::spectrum::{
    band_power, psd_cyclostationary, psd_finite_horizon, ring_pam_psd, total_power, triangle_filter_freq,
    triangle_filter_time, PsdGrid, TailModel,
};
use fiberacf_core::{Complex64, FiberParams};

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

// Composite Simpson on [a, b] with n (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn linear_ring_pam_spectrum() {
    // gamma = 0: A(tau) = K z sinc(B tau) + P (1 - |tau|/T_s)^+, whose
    // transform is (K z / B) rect(f / B) + P T_s sinc^2(f T_s).
    let dc = FiberParams::reference().with_gamma(0.0).unwrap().derive();
    let t_s = dc.params.symbol_period().unwrap();
    let b = dc.params.b;
    let grid = PsdGrid::standard(b, t_s);
    for &p in &[1e-3, 0.1] {
        let psd = ring_pam_psd(p, t_s, &dc, &grid).unwrap();
        let peak = dc.kz() / b + p * t_s;
        for (f, d) in psd.freqs.iter().zip(&psd.density) {
            if (f.abs() - 0.5 * b).abs() < 2.0 * grid.df {
                continue;
            }
            let band = if f.abs() < 0.5 * b { dc.kz() / b } else { 0.0 };
            let want = band + p * t_s * sinc(f * t_s).powi(2);
            assert!((d - want).abs() <= 1e-4 * peak, "P {p} f {f}: {d} vs {want}");
        }
    }
}

#[test]
fn spectrum_holds_total_power() {
    let dc = FiberParams::reference().derive();
    let t_s = dc.params.symbol_period().unwrap();
    let grid = PsdGrid::standard(dc.params.b, t_s);
    for &p in &[0.01, 0.1, 0.5] {
        let psd = ring_pam_psd(p, t_s, &dc, &grid).unwrap();
        let want = dc.kz() + p;
        let got = total_power(&psd);
        assert!((got - want).abs() <= 5e-3 * want, "P {p}: {got} vs {want}");
    }
}

#[test]
fn spectrum_is_even_and_nonnegative() {
    let dc = FiberParams::reference().derive();
    let t_s = dc.params.symbol_period().unwrap();
    let grid = PsdGrid::standard(dc.params.b, t_s);
    let psd = ring_pam_psd(0.1, t_s, &dc, &grid).unwrap();
    let n = psd.density.len();
    let peak = psd.density.iter().cloned().fold(0.0, f64::max);
    for i in 0..n {
        assert_eq!(psd.freqs[i], -psd.freqs[n - 1 - i]);
        assert_eq!(psd.density[i], psd.density[n - 1 - i]);
        assert!(psd.density[i] >= -1e-6 * peak, "f {}: {}", psd.freqs[i], psd.density[i]);
    }
}

#[test]
fn linear_band_power() {
    // Power through |f| < B/2: K z + (2P/pi) (Si(2X) - sin^2(X)/X) with X = pi B T_s / 2.
    let dc = FiberParams::reference().with_gamma(0.0).unwrap().derive();
    let t_s = dc.params.symbol_period().unwrap();
    let b = dc.params.b;
    let p = 0.1;
    let psd = ring_pam_psd(p, t_s, &dc, &PsdGrid::standard(b, t_s)).unwrap();
    let x = 0.5 * PI * b * t_s;
    let si = simpson(|u| sinc(u / PI), 0.0, 2.0 * x, 20_000);
    let want = dc.kz() + 2.0 * p / PI * (si - x.sin().powi(2) / x);
    let got = band_power(&psd, b).unwrap();
    assert!((got - want).abs() <= 1e-3 * want, "{got} vs {want}");
}

#[test]
fn tail_mismatch_is_rejected() {
    let grid = PsdGrid { dtau: 0.01, horizon: 1.0, f_max: 5.0, df: 0.1 };
    let tail = TailModel { constant: 0.0, sinc_amplitude: 0.0, bandwidth: 1.0 };
    assert!(psd_cyclostationary(|_| Ok(1.0), tail, &grid).is_err());
}

#[test]
fn constant_tail_becomes_spectral_line() {
    let grid = PsdGrid { dtau: 0.01, horizon: 4.0, f_max: 5.0, df: 0.05 };
    let tail = TailModel { constant: 0.3, sinc_amplitude: 0.0, bandwidth: 1.0 };
    let psd = psd_cyclostationary(|t| Ok(0.3 + (-t * t * 20.0).exp()), tail, &grid).unwrap();
    assert_eq!(psd.dc_line, 0.3);
    // Gaussian part: transform of exp(-20 t^2) is sqrt(pi/20) exp(-pi^2 f^2 / 20).
    for (f, d) in psd.freqs.iter().zip(&psd.density) {
        let want = (PI / 20.0).sqrt() * (-PI * PI * f * f / 20.0).exp();
        assert!((d - want).abs() < 1e-9, "f {f}");
    }
}

#[test]
fn finite_horizon_linear_channel() {
    // gamma = 0 and dt = 1/B make the noise samples independent: a flat
    // K z / B floor plus the Dirichlet kernel of the constant launch.
    let dc = FiberParams::reference().with_gamma(0.0).unwrap().derive();
    let b = dc.params.b;
    let dt = 1.0 / b;
    let n = 64;
    let u = Complex64::new(0.2, 0.1);
    let launch = vec![u; n];
    let freqs: Vec<f64> = (0..40).map(|i| (i as f64 + 0.37) * b / 97.0).collect();
    let got = psd_finite_horizon(&launch, dt, &dc, &freqs).unwrap();
    for (f, g) in freqs.iter().zip(&got) {
        let x = PI * f * dt;
        let dirichlet = (n as f64 * x).sin().powi(2) / (n as f64 * x.sin().powi(2));
        let want = dc.kz() / b + u.norm_sqr() * dt * dirichlet;
        assert!((g - want).abs() <= 1e-10 * want, "f {f}: {g} vs {want}");
    }
}

#[test]
fn finite_horizon_rejects_bad_input() {
    let dc = FiberParams::reference().derive();
    assert!(psd_finite_horizon(&[], 1e-12, &dc, &[0.0]).is_err());
    assert!(psd_finite_horizon(&[Complex64::new(1.0, 0.0)], 0.0, &dc, &[0.0]).is_err());
}

#[test]
fn triangle_filter_pair() {
    // Transform of 2 W sinc^2(W t), truncated at |t| = X; the tail adds at
    // most 2 / (pi^2 W X).
    let w = 3.0;
    let x = 2000.0 / w;
    for &f in &[0.0, 0.4, 1.5, 2.9, 3.5] {
        let g = |t: f64| triangle_filter_time(t, w) * (2.0 * PI * f * t).cos();
        let got = 2.0 * simpson(g, 0.0, x, 400_000);
        let want = triangle_filter_freq(f, w);
        assert!((got - want).abs() < 2.0 / (PI * PI * w * x) + 1e-6, "f {f}: {got} vs {want}");
    }
}
