//! Capacity upper bounds and two illustrative constructions.

use alloc::vec::Vec;
use core::f64::consts::{E, LN_2, LOG2_E, PI};

use num_complex::Complex64;

use crate::bounds::{avg_power_bound, bandwidth_lower_bound, BoundRegime, WidthVariant};
use crate::mc::{trial_rng, McEstimate, TrialRunner};
use crate::params::{rho, DerivedConstants};
use crate::quad::integrate;
use crate::special::q_function;
use crate::{Error, Result};

/// Fraction of the launched-plus-noise power a useful receiver must collect.
pub const DEFAULT_POWER_FRACTION: f64 = 0.99;

/// Nonlinearity constant used to scale the noise bandwidth with power, 1/W.
pub const KAPPA_HAT: f64 = 28.6;

/// AWGN capacity `W log2(1 + P/(W N0))`, bits/s.
pub fn shannon_c(w: f64, p: f64, n0: f64) -> f64 {
    w * shannon_eta(w, p, n0)
}

/// AWGN spectral efficiency `log2(1 + P/(W N0))`, bits/s/Hz.
pub fn shannon_eta(w: f64, p: f64, n0: f64) -> f64 {
    libm::log1p(p / (w * n0)) * LOG2_E
}

/// Capacity per sample `log2(1 + E/N0)` for symbol energy `e`, bits.
pub fn shannon_eta_energy(e: f64, n0: f64) -> f64 {
    libm::log1p(e / n0) * LOG2_E
}

/// Received power cap `min(Kz + P, average-power bound)`, W.
pub fn received_power_cap(p: f64, w: f64, dc: &DerivedConstants) -> Result<f64> {
    let regime = BoundRegime::classify(w, dc)?;
    let avg = avg_power_bound(p, &regime, dc)?.best();
    Ok((dc.kz() + p).min(avg))
}

/// `log2(1 + Pr/(W N0))` with `Pr` from [`received_power_cap`], bits/s/Hz.
pub fn capacity_upper1(p: f64, w: f64, dc: &DerivedConstants) -> Result<f64> {
    let pr = received_power_cap(p, w, dc)?;
    Ok(shannon_eta(w, pr, dc.params.n0))
}

/// `log2((Pr + W N0)/(Kz W/B + W N0))` for a given received power `pr`.
pub fn capacity_upper2_from_power(pr: f64, w: f64, dc: &DerivedConstants) -> Result<f64> {
    if w > dc.params.b {
        return Err(Error::UnsupportedRegime);
    }
    let wn0 = w * dc.params.n0;
    Ok(libm::log2((pr + wn0) / (dc.kz() * w / dc.params.b + wn0)))
}

/// Bound with the in-band noise moved to the denominator, bits/s/Hz (`W <= B`).
pub fn capacity_upper2(p: f64, w: f64, dc: &DerivedConstants) -> Result<f64> {
    if w > dc.params.b {
        return Err(Error::UnsupportedRegime);
    }
    capacity_upper2_from_power(received_power_cap(p, w, dc)?, w, dc)
}

/// Power where the average-power bound drops below `Kz + P`, W.
pub fn upper1_crossover(w: f64, dc: &DerivedConstants) -> Result<f64> {
    let regime = BoundRegime::classify(w, dc)?;
    let gap = |p: f64| -> Result<f64> { Ok(avg_power_bound(p, &regime, dc)?.best() - (dc.kz() + p)) };
    let (mut lo, mut hi) = (1e-6f64, 1e6f64);
    if gap(lo)? <= 0.0 || gap(hi)? >= 0.0 {
        return Err(Error::NoBracket("bound crossover"));
    }
    for _ in 0..200 {
        let mid = libm::sqrt(lo * hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-13 {
            break;
        }
    }
    Ok(libm::sqrt(lo * hi))
}

/// Spectral efficiency bound `C(W)/max(W, W_min)`, bits/s/Hz, where `W_min`
/// is the least bandwidth carrying a fraction `q` of `Kz + P`.
pub fn eta_bound(p: f64, w: f64, dc: &DerivedConstants, q: f64) -> Result<f64> {
    let c_over_w = capacity_upper1(p, w, dc)?;
    let wb = bandwidth_lower_bound(p, dc, q, WidthVariant::Exact)?;
    let w_min = wb.ratio * dc.params.b;
    if w_min <= w {
        Ok(c_over_w)
    } else {
        Ok(c_over_w * w / w_min)
    }
}

/// Kind of capacity curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// AWGN reference with noise `N0` only.
    Shannon,
    /// [`capacity_upper1`].
    Upper1,
    /// [`capacity_upper2`].
    Upper2,
    /// [`eta_bound`].
    Eta,
    /// Upper bound with the noise bandwidth scaled with power.
    ScaledB,
}

/// Capacity values over a power grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCurve {
    /// Launch powers, W.
    pub p_grid: Vec<f64>,
    /// Bits/s/Hz.
    pub values: Vec<f64>,
    /// What was evaluated.
    pub kind: CurveKind,
}

/// Evaluates one curve at fixed receiver bandwidth `w`.
pub fn capacity_curve(kind: CurveKind, p_grid: &[f64], w: f64, dc: &DerivedConstants) -> Result<CapacityCurve> {
    let values = p_grid
        .iter()
        .map(|&p| match kind {
            CurveKind::Shannon => Ok(shannon_eta(w, p, dc.params.n0)),
            CurveKind::Upper1 => capacity_upper1(p, w, dc),
            CurveKind::Upper2 => capacity_upper2(p, w, dc),
            CurveKind::Eta => eta_bound(p, w, dc, DEFAULT_POWER_FRACTION),
            CurveKind::ScaledB => Ok(scaled_b_point(p, w, dc, KAPPA_HAT)?.upper1),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityCurve {
        p_grid: p_grid.to_vec(),
        values,
        kind,
    })
}

/// One point of the scaled-noise-bandwidth study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBPoint {
    /// Launch power, W.
    pub p: f64,
    /// Noise bandwidth used, Hz.
    pub b: f64,
    /// Received power cap, W.
    pub rx_power: f64,
    /// [`capacity_upper1`], bits/s/Hz.
    pub upper1: f64,
    /// [`capacity_upper2`], bits/s/Hz.
    pub upper2: f64,
}

/// Noise bandwidth `W max(1, sqrt(kappa_hat P / 512))`.
pub fn scaled_bandwidth(p: f64, w: f64, kappa_hat: f64) -> f64 {
    w * libm::sqrt(kappa_hat * p / 512.0).max(1.0)
}

/// Bounds at power `p` when the noise bandwidth grows with `sqrt(P)`; the
/// per-length noise density `N_A` is held fixed, so `K` grows with `B`.
pub fn scaled_b_point(p: f64, w: f64, template: &DerivedConstants, kappa_hat: f64) -> Result<ScaledBPoint> {
    let b = scaled_bandwidth(p, w, kappa_hat);
    let dc = template.params.with_bandwidth(b)?.derive();
    let rx_power = received_power_cap(p, w, &dc)?;
    Ok(ScaledBPoint {
        p,
        b,
        rx_power,
        upper1: shannon_eta(w, rx_power, dc.params.n0),
        upper2: capacity_upper2_from_power(rx_power, w, &dc)?,
    })
}

/// [`scaled_b_point`] over a power grid.
pub fn scaled_b_curve(p_grid: &[f64], w: f64, template: &DerivedConstants, kappa_hat: f64) -> Result<Vec<ScaledBPoint>> {
    p_grid
        .iter()
        .map(|&p| scaled_b_point(p, w, template, kappa_hat))
        .collect()
}

/// Upper bound for white in-line noise and one sample per symbol period, bits/s.
pub fn infinite_b_capacity_bound(p: f64, t_s: f64, dc: &DerivedConstants) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::Domain { what: "p", value: p });
    }
    let n0 = dc.params.n0;
    let k = dc.kappa;
    let snr = if p * k < 1.0 {
        t_s * p * libm::exp(-k * p) / n0
    } else {
        t_s / (k * E * n0)
    };
    Ok(libm::log1p(snr) * LOG2_E / t_s)
}

/// Limit of [`infinite_b_capacity_bound`] as the symbol period vanishes, bits/s.
pub fn infinite_b_capacity_limit(dc: &DerivedConstants) -> f64 {
    LOG2_E / (dc.kappa * E * dc.params.n0)
}

/// How noise is shared between the three samples of [`three_sample_demo`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseSharing {
    /// The three samples see one noise value (spacing far below `1/B`).
    Identical,
    /// Jointly Gaussian noise with correlations `sinc(B k T)`.
    Correlated,
}

/// Outcome of the three-sample estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeSampleEstimate {
    /// True `x^2`, J.
    pub x2: f64,
    /// Monte Carlo estimate of the estimator's mean and its standard error.
    pub estimate: McEstimate,
    /// Root-mean-square error of single-shot estimates, J.
    pub rms_error: f64,
}

impl ThreeSampleEstimate {
    /// `|mean - x^2| / x^2`.
    pub fn relative_bias(&self) -> f64 {
        (self.estimate.mean.re - self.x2).abs() / self.x2
    }
}

/// Cholesky factor of the 3x3 correlation of samples `t` apart; the lower
/// triangle is stored row by row. Rounding can push the last pivot slightly
/// negative when `t` is tiny, so pivots are clamped at zero.
fn three_point_factor(r1: f64, r2: f64) -> [f64; 6] {
    let l11 = libm::sqrt(((1.0 - r1) * (1.0 + r1)).max(0.0));
    let l21 = r2;
    let l22 = if l11 > 0.0 { (r1 - r2 * r1) / l11 } else { 0.0 };
    let l33 = libm::sqrt((1.0 - r2 * r2 - l22 * l22).max(0.0));
    [1.0, r1, l11, l21, l22, l33]
}

/// Monte Carlo of the estimator `x^2 ~ T_s ((y1 + y2)/2 - y0)` built from
/// three output power samples spaced `t_small` apart.
///
/// The launch is `x g(t - T/2) - 2x g(t - 3T/2)` with `g` a unit-energy
/// rectangle of width `T_s`, so the noiseless samples are `0`, `x/sqrt(T_s)`
/// and `-x/sqrt(T_s)`. Output power does not depend on the nonlinear phase,
/// so only the accumulated noise at the three instants is simulated.
#[allow(clippy::too_many_arguments)]
pub fn three_sample_demo<R: TrialRunner>(
    runner: &R,
    x: f64,
    t_small: f64,
    dc: &DerivedConstants,
    trials: u64,
    seed: u64,
    sharing: NoiseSharing,
) -> Result<ThreeSampleEstimate> {
    let t_s = dc.params.symbol_period()?;
    if !(t_small > 0.0 && t_small < t_s / 2.0) {
        return Err(Error::Domain { what: "t_small", value: t_small });
    }
    let b = dc.params.b;
    let l = match sharing {
        NoiseSharing::Identical => [1.0, 1.0, 0.0, 1.0, 0.0, 0.0],
        NoiseSharing::Correlated => three_point_factor(rho(t_small, b), rho(2.0 * t_small, b)),
    };
    // Each accumulated noise sample is CN(0, K z).
    let sd = libm::sqrt(0.5 * dc.kz());
    let a = x / libm::sqrt(t_s);
    let samples = runner.run(trials, |i| {
        let mut rng = trial_rng(seed, i);
        let mut g = [Complex64::new(0.0, 0.0); 3];
        for gi in g.iter_mut() {
            let re: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
            let im: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
            *gi = Complex64::new(re, im) * sd;
        }
        let n0 = g[0] * l[0];
        let n1 = g[0] * l[1] + g[1] * l[2];
        let n2 = g[0] * l[3] + g[1] * l[4] + g[2] * l[5];
        let y0 = n0.norm_sqr();
        let y1 = (n1 + a).norm_sqr();
        let y2 = (n2 - a).norm_sqr();
        Complex64::new(t_s * (0.5 * (y1 + y2) - y0), 0.0)
    });
    let x2 = x * x;
    let ms: f64 = samples.iter().map(|s| (s.re - x2) * (s.re - x2)).sum::<f64>() / samples.len() as f64;
    Ok(ThreeSampleEstimate {
        x2,
        estimate: McEstimate::from_samples(&samples)?,
        rms_error: libm::sqrt(ms),
    })
}

/// Square-root pulse `sqrt((t - T_s + 1)/(T_s (1 - T_s/2)))` on `[0, T_s)`, in
/// time units where the fiber's nonlinear phase is `gamma |u|^2`.
pub fn fsk_pulse(t: f64, t_s: f64) -> f64 {
    if (0.0..t_s).contains(&t) {
        libm::sqrt((t - t_s + 1.0) / (t_s * (1.0 - 0.5 * t_s)))
    } else {
        0.0
    }
}

/// Nonlinearity that makes the modulation index `h = 1/T_s`.
pub fn fsk_gamma(t_s: f64) -> f64 {
    2.0 * PI * (1.0 - 0.5 * t_s)
}

/// Intensity-modulated symbols `(2i - 1) delta`, `i = M+1..=2M`.
pub fn fsk_symbols(m: usize, delta: f64) -> Vec<f64> {
    (m + 1..=2 * m).map(|i| (2.0 * i as f64 - 1.0) * delta).collect()
}

/// Normalised inner products and error/rate figures of the ASK-to-FSK construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FskReport {
    /// Symbol amplitudes.
    pub symbols: Vec<f64>,
    /// `<u_l, u_m> / (|x_l| |x_m|)`, row-major `M x M`.
    pub gram: Vec<Complex64>,
    /// Largest off-diagonal magnitude of `gram`.
    pub max_offdiag: f64,
    /// Average symbol energy `(28 M^2 - 1) delta^2 / 3`.
    pub energy: f64,
    /// Union bound `(M - 1) Q(2 M delta / sqrt(N0))`.
    pub union_pe: f64,
    /// `R ln 2 - (6/28) E / N0` exponent bound `exp(...)` on the error probability.
    pub exp_pe: f64,
    /// `log2 M / T_s`, bits per unit time.
    pub rate: f64,
}

/// Inner product of the noiseless outputs for symbols `xl`, `xm`.
pub fn fsk_inner_product(xl: f64, xm: f64, t_s: f64) -> Complex64 {
    let gamma = fsk_gamma(t_s);
    let dphi = gamma * (xl * xl - xm * xm);
    let r = integrate(
        |t| {
            let g = fsk_pulse(t, t_s);
            let g2 = g * g;
            Complex64::from_polar(g2, dphi * g2)
        },
        0.0,
        t_s,
        1e-15,
        1e-13,
        20_000,
    );
    r.value * (xl * xm)
}

/// Builds the FSK construction for `m` symbols spaced by `delta`.
pub fn fsk_demo(m: usize, delta: f64, t_s: f64, n0: f64) -> Result<FskReport> {
    if m < 2 {
        return Err(Error::Domain { what: "m", value: m as f64 });
    }
    if !(t_s > 0.0 && t_s <= 1.0) {
        return Err(Error::Domain { what: "t_s", value: t_s });
    }
    let symbols = fsk_symbols(m, delta);
    let mut gram = Vec::with_capacity(m * m);
    let mut max_offdiag = 0.0f64;
    for (l, &xl) in symbols.iter().enumerate() {
        for (k, &xk) in symbols.iter().enumerate() {
            let v = fsk_inner_product(xl, xk, t_s) / (xl.abs() * xk.abs());
            if l != k {
                max_offdiag = max_offdiag.max(v.norm());
            }
            gram.push(v);
        }
    }
    let mf = m as f64;
    let energy = (28.0 * mf * mf - 1.0) * delta * delta / 3.0;
    let bits = libm::log2(mf);
    Ok(FskReport {
        symbols,
        gram,
        max_offdiag,
        energy,
        union_pe: (mf - 1.0) * q_function(2.0 * mf * delta / libm::sqrt(n0)),
        exp_pe: libm::exp(bits * LN_2 - 6.0 / 28.0 * energy / n0),
        rate: bits / t_s,
    })
}

/// Rate supported at target error probability `target_pe` with power `p`:
/// `(6/28)(P/N0) log2 e + ln(target_pe) / T_s`.
pub fn fsk_rate_for_target(p: f64, t_s: f64, n0: f64, target_pe: f64) -> f64 {
    6.0 / 28.0 * p / n0 * LOG2_E + libm::log(target_pe) / t_s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::Sequential;
    use crate::params::FiberParams;

    #[test]
    fn shannon_trivia() {
        assert_eq!(shannon_c(1e9, 0.0, 1e-20), 0.0);
        assert!((shannon_c(1e9, 1e9 * 1e-20, 1e-20) - 1e9).abs() < 1e-6);
    }

    #[test]
    fn upper2_requires_narrow_receiver() {
        let dc = FiberParams::reference().derive();
        assert_eq!(capacity_upper2(0.1, 2.0 * dc.params.b, &dc), Err(Error::UnsupportedRegime));
        let floor = dc.kz() * 0.5;
        assert_eq!(capacity_upper2_from_power(floor, 0.5 * dc.params.b, &dc).unwrap(), 0.0);
    }

    #[test]
    fn noise_free_three_sample_is_exact() {
        let dc = FiberParams::reference().with_noise(0.0).unwrap().derive();
        let est = three_sample_demo(&Sequential, 1e-6, 1e-15, &dc, 10, 1, NoiseSharing::Correlated).unwrap();
        assert!(est.relative_bias() < 1e-12);
    }

    #[test]
    fn identical_noise_cancels_exactly() {
        let dc = FiberParams::reference().derive();
        let est = three_sample_demo(&Sequential, 1e-6, 1e-15, &dc, 100, 1, NoiseSharing::Identical).unwrap();
        assert!(est.rms_error <= 1e-9 * est.x2);
    }

    #[test]
    fn fsk_diagonal_is_unit() {
        let r = fsk_demo(3, 0.5, 0.5, 1.0).unwrap();
        for i in 0..3 {
            assert!((r.gram[i * 3 + i] - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn fsk_pulse_has_unit_energy() {
        let t_s = 0.3;
        let e = crate::quad::integrate_real(|t| fsk_pulse(t, t_s).powi(2), 0.0, t_s, 1e-15, 1e-14);
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infinite_b_plateau() {
        let dc = FiberParams::reference().derive();
        let t_s = 1e-11;
        let at = infinite_b_capacity_bound(1.0 / dc.kappa, t_s, &dc).unwrap();
        let beyond = infinite_b_capacity_bound(10.0 / dc.kappa, t_s, &dc).unwrap();
        assert!((at - beyond).abs() <= 1e-12 * at);
    }
}
