//! Two-time autocorrelation `E[u(z,t) u*(z,t')]` of the channel output.
//!
//! With no dispersion, the output at each time depends only on the launched
//! sample at that time and on the noise path at that time. Two noise paths
//! a bandwidth-limited delay apart are jointly Gaussian with correlation
//! `rho = sinc(B (t - t'))`, so the autocorrelation is a closed-form function
//! of `(u0, u0', rho)`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::params::{rho, rho_complement, DerivedConstants};
use crate::special::{bessel_i0e, bessel_i1e, eval_hyperbolic};
use crate::{Error, Result};

/// Below this `1 - rho^2` the exact formula is replaced by its `rho -> 1` limit.
pub const RHO_LIMIT_SWITCH: f64 = 1e-8;

/// Which branch produced an [`AcfValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcfRegime {
    /// Closed form, valid for any noise level.
    Exact,
    /// First order in the accumulated noise power.
    Approx,
    /// Exact formula in the limit of fully correlated noise.
    LimitRho1,
}

/// Autocorrelation value in W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcfValue {
    /// `E[u u'*]`, W.
    pub value: Complex64,
    /// Branch that produced it.
    pub regime: AcfRegime,
}

/// Exact or low-noise evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcfMode {
    /// Closed form.
    Exact,
    /// Low-noise approximation.
    Approx,
}

/// Amplitude bound variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeBound {
    /// Depends only on the larger of the two input powers.
    Larger,
    /// Symmetric in the inputs, exponent set by the mean input power.
    Mean,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain { what: "rho", value: rho })
    }
}

/// `|u0|^2 + |u0'|^2 - 2 rho Re(u0 u0'*)`, written as a sum of non-negative terms.
fn mixing_form(u0: Complex64, u0p: Complex64, rho: f64) -> f64 {
    (u0p - u0 * rho).norm_sqr() + u0.norm_sqr() * (1.0 - rho) * (1.0 + rho)
}

/// Exact autocorrelation of outputs whose inputs are `u0` at `t` and `u0p` at `t'`.
pub fn acf_exact(u0: Complex64, u0p: Complex64, rho: f64, dc: &DerivedConstants) -> Result<AcfValue> {
    check_rho(rho)?;
    let gamma = dc.params.gamma;
    let z = dc.params.z;
    let k = dc.k;
    let sq = rho_complement(rho)?;
    let p0 = u0.norm_sqr();
    let p1 = u0p.norm_sqr();
    let j = Complex64::i();

    // S_I / sqrt(1-rho^2) and T_I / sqrt(1-rho^2) both have finite limits.
    let (s2, s_r, si_ratio, t_r, ti_ratio, regime) = if sq * sq < RHO_LIMIT_SWITCH {
        let g = 0.5 * gamma * k * z * z;
        (1.0, 1.0, g, z, gamma * k * z * z * z / 3.0, AcfRegime::LimitRho1)
    } else {
        let p = eval_hyperbolic(Complex64::new(0.0, -0.5 * gamma * k * sq), z);
        (
            p.s.norm_sqr(),
            p.s_r(),
            p.s_i() / sq,
            p.t_r(),
            p.t_i() / sq,
            AcfRegime::Exact,
        )
    };

    let a1 = u0 * s_r + j * si_ratio * (u0 - u0p * rho);
    let a2 = u0p * s_r + j * si_ratio * (u0p - u0 * rho);
    let bracket = a1 * a2.conj() + t_r * k * rho;
    let phase = Complex64::new(0.0, gamma * t_r * (p0 - p1)).exp();
    let mixing = libm::exp(-gamma * ti_ratio * mixing_form(u0, u0p, rho));
    Ok(AcfValue {
        value: bracket * phase * (s2 * mixing),
        regime,
    })
}

/// Exponent of the signal-noise mixing factor of [`acf_exact`]; real and non-positive.
pub fn mixing_exponent(u0: Complex64, u0p: Complex64, rho: f64, dc: &DerivedConstants) -> Result<f64> {
    check_rho(rho)?;
    let sq = rho_complement(rho)?;
    let z = dc.params.z;
    let gamma = dc.params.gamma;
    let ti_ratio = if sq * sq < RHO_LIMIT_SWITCH {
        gamma * dc.k * z * z * z / 3.0
    } else {
        eval_hyperbolic(Complex64::new(0.0, -0.5 * gamma * dc.k * sq), z).t_i() / sq
    };
    Ok(-gamma * ti_ratio * mixing_form(u0, u0p, rho))
}

/// Autocorrelation to first order in the accumulated noise power `K z`.
pub fn acf_approx(u0: Complex64, u0p: Complex64, rho: f64, dc: &DerivedConstants) -> Result<AcfValue> {
    check_rho(rho)?;
    let gamma = dc.params.gamma;
    let z = dc.params.z;
    let k = dc.k;
    let dp = u0.norm_sqr() - u0p.norm_sqr();
    let bracket =
        u0 * u0p.conj() + Complex64::new(k * rho * z, gamma * k * rho * 0.5 * z * z * dp);
    let phase = Complex64::new(0.0, gamma * z * dp).exp();
    let mixing = libm::exp(-0.5 * dc.kappa * mixing_form(u0, u0p, rho));
    Ok(AcfValue {
        value: bracket * phase * mixing,
        regime: AcfRegime::Approx,
    })
}

/// Dispatches to [`acf_exact`] or [`acf_approx`].
pub fn acf(u0: Complex64, u0p: Complex64, rho: f64, dc: &DerivedConstants, mode: AcfMode) -> Result<AcfValue> {
    match mode {
        AcfMode::Exact => acf_exact(u0, u0p, rho, dc),
        AcfMode::Approx => acf_approx(u0, u0p, rho, dc),
    }
}

/// Autocorrelation for an isolated rectangular pulse of power `p` occupying
/// `|t| <= t_s / 2`, with `rho = sinc(B (t - t'))`.
pub fn acf_rect_isolated(
    t: f64,
    tp: f64,
    p: f64,
    t_s: f64,
    dc: &DerivedConstants,
    mode: AcfMode,
) -> Result<AcfValue> {
    if !(p >= 0.0) {
        return Err(Error::Domain { what: "p", value: p });
    }
    let amp = |time: f64| {
        if time.abs() <= 0.5 * t_s {
            Complex64::new(libm::sqrt(p), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    acf(amp(t), amp(tp), rho(t - tp, dc.params.b), dc, mode)
}

/// Low-noise autocorrelation of ring-modulated PAM with power `p`, for two
/// times in the same symbol or in different symbols (independent phases).
pub fn acf_ring(same_symbol: bool, p: f64, rho: f64, dc: &DerivedConstants) -> Result<AcfValue> {
    check_rho(rho)?;
    let kz = dc.kz();
    let kp = dc.kappa * p;
    let value = if same_symbol {
        (kz * rho + p) * libm::exp(-kp * (1.0 - rho))
    } else {
        // I_n(y) e^{-kp} = I_n e^{-|y|} * e^{|y| - kp}, with |y| <= kp.
        let y = kp * rho;
        let scale = libm::exp(y.abs() - kp);
        (kz * rho * bessel_i0e(y) + p * bessel_i1e(y)) * scale
    };
    Ok(AcfValue {
        value: Complex64::new(value, 0.0),
        regime: AcfRegime::Approx,
    })
}

/// Time-averaged low-noise autocorrelation `A(tau)` of ring-modulated PAM.
pub fn acf_ring_time_avg(tau: f64, p: f64, t_s: f64, dc: &DerivedConstants) -> Result<f64> {
    if !(t_s > 0.0) {
        return Err(Error::Domain { what: "t_s", value: t_s });
    }
    let r = rho(tau, dc.params.b);
    let diff = acf_ring(false, p, r, dc)?.value.re;
    let frac = tau.abs() / t_s;
    if frac >= 1.0 {
        return Ok(diff);
    }
    let same = acf_ring(true, p, r, dc)?.value.re;
    Ok((1.0 - frac) * same + frac * diff)
}

/// Upper bound on `|A|` for arbitrary inputs.
pub fn acf_amplitude_bound(
    u0: Complex64,
    u0p: Complex64,
    rho: f64,
    dc: &DerivedConstants,
    variant: AmplitudeBound,
) -> Result<f64> {
    check_rho(rho)?;
    let gamma = dc.params.gamma;
    let z = dc.params.z;
    let kz = dc.kz();
    let sq = rho_complement(rho)?;
    let p = eval_hyperbolic(Complex64::new(0.0, -0.5 * gamma * dc.k * sq), z);
    match variant {
        AmplitudeBound::Larger => {
            let big = u0.norm_sqr().max(u0p.norm_sqr());
            let g = 1.0 + gamma * dc.k * z * z;
            Ok((kz + big * g * g) * libm::exp(-gamma * p.t_i() * big * sq))
        }
        AmplitudeBound::Mean => {
            let delta = if sq * sq < RHO_LIMIT_SWITCH || p.t_i() <= 0.0 {
                if gamma > 0.0 {
                    dc.delta
                } else {
                    0.0
                }
            } else {
                libm::sqrt(
                    p.s_i() * p.s_i() / (core::f64::consts::E * gamma * p.t_i() * sq),
                )
            };
            let mean = 0.5 * (u0.norm_sqr() + u0p.norm_sqr());
            Ok(p.s.norm_sqr()
                * (kz + (u0.norm() + delta) * (u0p.norm() + delta))
                * libm::exp(-gamma * p.t_i() * mean * sq))
        }
    }
}

/// Autocorrelation when the noise is white over all frequencies, so that
/// distinct times see independent noise.
pub fn acf_infinite_bandwidth(u0: Complex64, u0p: Complex64, t_equal: bool, dc: &DerivedConstants) -> Complex64 {
    if t_equal {
        return Complex64::new(dc.kz() + u0.norm_sqr(), 0.0);
    }
    first_moment(u0, dc) * first_moment(u0p, dc).conj()
}

/// `E[u(z)]` for white noise: the input attenuated and rotated by the noise.
pub fn first_moment(u0: Complex64, dc: &DerivedConstants) -> Complex64 {
    let gamma = dc.params.gamma;
    let p = eval_hyperbolic(Complex64::new(0.0, -0.5 * gamma * dc.k), dc.params.z);
    let e1 = (Complex64::i() * gamma * u0.norm_sqr() * p.t).exp();
    u0 * e1 * p.s * p.s
}

/// Autocorrelation sampled on a rectangular `(t, t')` grid, row-major in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfGrid {
    /// Times `t`, s.
    pub t_axis: Vec<f64>,
    /// Times `t'`, s.
    pub tp_axis: Vec<f64>,
    /// `values[i * tp_axis.len() + j] = A(t_i, t'_j)`, W.
    pub values: Vec<Complex64>,
}

impl AcfGrid {
    /// Isolated rectangular pulse autocorrelation on a grid.
    pub fn rect_isolated(
        t_axis: Vec<f64>,
        tp_axis: Vec<f64>,
        p: f64,
        t_s: f64,
        dc: &DerivedConstants,
        mode: AcfMode,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(t_axis.len() * tp_axis.len());
        for &t in &t_axis {
            for &tp in &tp_axis {
                values.push(acf_rect_isolated(t, tp, p, t_s, dc, mode)?.value);
            }
        }
        Ok(AcfGrid { t_axis, tp_axis, values })
    }

    /// Value at `(t_i, t'_j)`.
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.tp_axis.len() + j]
    }

    /// Largest `|A(t_i,t_j) - A(t_j,t_i)*|` on a square grid.
    pub fn hermitian_defect(&self) -> Result<f64> {
        if self.t_axis != self.tp_axis {
            return Err(Error::Inconsistent("grid axes differ"));
        }
        let n = self.t_axis.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::FiberParams;

    fn dc() -> DerivedConstants {
        FiberParams::reference().derive()
    }

    #[test]
    fn equal_times_give_signal_plus_noise_power() {
        let d = dc();
        for &p in &[0.0, 0.01, 0.1, 0.4, 3.0] {
            let u = Complex64::from_polar(libm::sqrt(p), 0.7);
            let a = acf_exact(u, u, 1.0, &d).unwrap();
            assert_eq!(a.regime, AcfRegime::LimitRho1);
            let want = d.kz() + p;
            assert!((a.value - want).norm() <= 1e-12 * want);
        }
    }

    #[test]
    fn limit_branch_is_continuous() {
        let d = dc();
        let u = Complex64::new(0.3, 0.1);
        let v = Complex64::new(0.2, -0.25);
        let r_in = libm::sqrt(1.0 - 0.99e-8);
        let r_out = libm::sqrt(1.0 - 1.01e-8);
        let a = acf_exact(u, v, r_in, &d).unwrap();
        let b = acf_exact(u, v, r_out, &d).unwrap();
        assert_eq!(a.regime, AcfRegime::LimitRho1);
        assert_eq!(b.regime, AcfRegime::Exact);
        assert!((a.value - b.value).norm() <= 1e-6 * a.value.norm());
    }

    #[test]
    fn noise_free_channel_is_deterministic() {
        let d = FiberParams::reference().with_noise(0.0).unwrap().derive();
        let u = Complex64::new(0.3, 0.1);
        let v = Complex64::new(0.2, -0.25);
        let a = acf_exact(u, v, 0.4, &d).unwrap().value;
        let g = d.params.gamma * d.params.z;
        let want = u * Complex64::new(0.0, g * u.norm_sqr()).exp()
            * (v * Complex64::new(0.0, g * v.norm_sqr()).exp()).conj();
        assert!((a - want).norm() < 1e-14);
    }

    #[test]
    fn linear_channel_adds_noise_correlation() {
        let d = FiberParams::reference().with_gamma(0.0).unwrap().derive();
        let u = Complex64::new(0.3, 0.1);
        let v = Complex64::new(0.2, -0.25);
        for &r in &[-0.2, 0.0, 0.5, 0.999] {
            let a = acf_exact(u, v, r, &d).unwrap().value;
            let want = u * v.conj() + d.kz() * r;
            assert!((a - want).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_rho_outside_unit_interval() {
        let d = dc();
        let u = Complex64::new(0.1, 0.0);
        assert!(acf_exact(u, u, 1.0 + 1e-12, &d).is_err());
        assert!(acf_approx(u, u, -1.5, &d).is_err());
    }

    #[test]
    fn ring_limits() {
        let d = dc();
        let p = 0.1;
        assert!((acf_ring_time_avg(0.0, p, 1e-11, &d).unwrap() - (d.kz() + p)).abs() < 1e-15);
        let lin = FiberParams::reference().with_gamma(0.0).unwrap().derive();
        for &tau in &[0.0, 1.3e-12, 4e-12, 9.9e-12, 2.5e-11] {
            let r = rho(tau, lin.params.b);
            let want = lin.kz() * r + (1.0 - tau / 1e-11).max(0.0) * p;
            let got = acf_ring_time_avg(tau, p, 1e-11, &lin).unwrap();
            assert!((got - want).abs() < 1e-15, "{tau}");
        }
    }

    #[test]
    fn infinite_bandwidth_equal_times() {
        let d = dc();
        let u = Complex64::new(0.2, 0.1);
        assert_eq!(
            acf_infinite_bandwidth(u, u, true, &d),
            Complex64::new(d.kz() + u.norm_sqr(), 0.0)
        );
    }
}
