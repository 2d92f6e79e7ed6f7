use fiberacf_core::acf::{
    acf_amplitude_bound, acf_approx, acf_exact, acf_infinite_bandwidth, acf_ring, acf_ring_time_avg,
    AcfGrid, AcfMode, AmplitudeBound, RHO_LIMIT_SWITCH,
};
use fiberacf_core::{Complex64, DerivedConstants, FiberParams};
use proptest::prelude::*;

fn reference() -> DerivedConstants {
    FiberParams::reference().derive()
}

fn amp(p: f64, phase: f64) -> Complex64 {
    Complex64::from_polar(p.sqrt(), phase)
}

fn power() -> impl Strategy<Value = f64> {
    (-4.0f64..0.5).prop_map(|e| 10f64.powf(e))
}

fn phase() -> impl Strategy<Value = f64> {
    -std::f64::consts::PI..std::f64::consts::PI
}

#[test]
fn equal_times_give_total_power() {
    // Energy is conserved sample by sample: E|u|^2 = K z + |u0|^2.
    let dc = reference();
    for &p in &[0.0, 1e-3, 0.1, 1.0, 10.0] {
        let a = acf_exact(amp(p, 0.3), amp(p, 0.3), 1.0, &dc).unwrap().value;
        let want = dc.kz() + p;
        assert!((a - want).norm() <= 1e-12 * want, "p = {p}: {a}");
    }
}

#[test]
fn limit_branch_is_continuous() {
    let dc = reference();
    let u0 = amp(0.05, 0.0);
    let u1 = amp(0.02, 1.0);
    let eps = RHO_LIMIT_SWITCH;
    // 1 - rho^2 just on either side of the switch.
    let below = acf_exact(u0, u1, (1.0 - 0.9 * eps).sqrt(), &dc).unwrap().value;
    let above = acf_exact(u0, u1, (1.0 - 1.1 * eps).sqrt(), &dc).unwrap().value;
    assert!((below - above).norm() <= 1e-4 * below.norm(), "{below} vs {above}");
}

#[test]
fn ring_autocorrelation_at_zero_lag() {
    let dc = reference();
    let t_s = dc.params.symbol_period().unwrap();
    for &p in &[1e-3, 0.1, 1.0] {
        let a = acf_ring_time_avg(0.0, p, t_s, &dc).unwrap();
        assert!((a - (dc.kz() + p)).abs() <= 1e-12 * (dc.kz() + p));
        let same = acf_ring(true, p, 1.0, &dc).unwrap().value.re;
        assert_eq!(same, a);
    }
}

#[test]
fn ring_decorrelated_symbols_vanish_without_noise_correlation() {
    // rho = 0: I_0(0) = 1 and I_1(0) = 0 leave nothing.
    let dc = reference();
    let a = acf_ring(false, 0.1, 0.0, &dc).unwrap().value;
    assert!(a.norm() < 1e-300);
}

#[test]
fn infinite_bandwidth_equal_times() {
    let dc = reference();
    let a = acf_infinite_bandwidth(amp(0.1, 0.0), amp(0.1, 0.0), true, &dc);
    assert_eq!(a.re, dc.kz() + 0.1);
}

#[test]
fn grid_is_hermitian() {
    let dc = reference();
    let t_s = dc.params.symbol_period().unwrap();
    let times: Vec<f64> = (0..21).map(|i| -10e-12 + 1e-12 * i as f64).collect();
    let g = AcfGrid::rect_isolated(times.clone(), times, 0.1, t_s, &dc, AcfMode::Exact).unwrap();
    assert!(g.hermitian_defect().unwrap() < 1e-14);
}

proptest! {
    #[test]
    fn hermitian_symmetry(p0 in power(), p1 in power(), a in phase(), b in phase(), rho in -1.0f64..=1.0) {
        let dc = reference();
        let (u0, u1) = (amp(p0, a), amp(p1, b));
        for f in [acf_exact, acf_approx] {
            let x = f(u0, u1, rho, &dc).unwrap().value;
            let y = f(u1, u0, rho, &dc).unwrap().value;
            prop_assert!((x - y.conj()).norm() <= 1e-13 * x.norm().max(1e-300));
        }
    }

    #[test]
    fn linear_channel_adds_noise_correlation(
        p0 in power(), p1 in power(), a in phase(), b in phase(), rho in -1.0f64..=1.0
    ) {
        let dc = FiberParams::reference().with_gamma(0.0).unwrap().derive();
        let (u0, u1) = (amp(p0, a), amp(p1, b));
        let want = u0 * u1.conj() + dc.kz() * rho;
        for f in [acf_exact, acf_approx] {
            let got = f(u0, u1, rho, &dc).unwrap().value;
            prop_assert!((got - want).norm() <= 1e-13 * want.norm().max(dc.kz()));
        }
    }

    #[test]
    fn noiseless_channel_is_pure_phase_rotation(
        p0 in power(), p1 in power(), a in phase(), b in phase(), rho in -1.0f64..=1.0
    ) {
        let dc = FiberParams::reference().with_noise(0.0).unwrap().derive();
        let (u0, u1) = (amp(p0, a), amp(p1, b));
        let z = dc.params.z;
        let g = dc.params.gamma;
        let phi = g * z * (p0 - p1);
        let want = u0 * u1.conj() * Complex64::new(0.0, phi).exp();
        // |u0|^2 rounds at eps P; gamma z ~ 2.5e3 amplifies that into the phase.
        let tol = 1e-13 + 8.0 * f64::EPSILON * g * z * (p0 + p1);
        for f in [acf_exact, acf_approx] {
            let got = f(u0, u1, rho, &dc).unwrap().value;
            prop_assert!((got - want).norm() <= tol * want.norm());
        }
    }

    #[test]
    fn amplitude_bounds_dominate(
        p0 in power(), p1 in power(), a in phase(), b in phase(), rho in -1.0f64..=1.0,
        lg in -1.0f64..2.0
    ) {
        let dc = FiberParams::reference().with_gamma(1.27e-3 * 10f64.powf(lg)).unwrap().derive();
        let (u0, u1) = (amp(p0, a), amp(p1, b));
        let exact = acf_exact(u0, u1, rho, &dc).unwrap().value.norm();
        for v in [AmplitudeBound::Larger, AmplitudeBound::Mean] {
            let bound = acf_amplitude_bound(u0, u1, rho, &dc, v).unwrap();
            prop_assert!(bound >= exact * (1.0 - 1e-12), "{v:?}: {bound} < {exact}");
        }
    }

    #[test]
    fn approx_tracks_exact_at_low_noise(
        p0 in power(), p1 in power(), a in phase(), b in phase(), rho in -1.0f64..=1.0
    ) {
        // Thousandfold less noise: gamma K z^2 ~ 2e-5. The neglected terms are
        // second order in K z relative to the signal scale.
        let dc = FiberParams::reference().with_noise(6.674e-27).unwrap().derive();
        let (u0, u1) = (amp(p0, a), amp(p1, b));
        let e = acf_exact(u0, u1, rho, &dc).unwrap().value;
        let x = acf_approx(u0, u1, rho, &dc).unwrap().value;
        let scale = dc.kz() + p0.max(p1);
        prop_assert!((e - x).norm() <= 1e-3 * scale, "{e} vs {x}");
    }

    #[test]
    fn modulus_never_exceeds_cauchy_schwarz(
        p0 in power(), p1 in power(), a in phase(), b in phase(), rho in -1.0f64..=1.0
    ) {
        // |E[u u'*]|^2 <= E|u|^2 E|u'|^2.
        let dc = reference();
        let v = acf_exact(amp(p0, a), amp(p1, b), rho, &dc).unwrap().value.norm();
        let cs = ((dc.kz() + p0) * (dc.kz() + p1)).sqrt();
        prop_assert!(v <= cs * (1.0 + 1e-12));
    }
}
