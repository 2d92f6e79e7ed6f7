//! Power spectral densities from time-averaged autocorrelations.
//!
//! A cyclostationary signal's PSD is the Fourier transform of its
//! time-averaged autocorrelation `A(tau)`. The transform is taken
//! numerically out to a finite horizon, after subtracting a tail model
//! `constant + a sinc(B tau)` whose transform is known exactly; the constant
//! becomes a spectral line at `f = 0` and the sinc a flat band of width `B`.
//! Without the subtraction, truncating the slowly decaying sinc tail would
//! leave negative ripples in the estimate.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::acf::{acf_exact, acf_ring_time_avg};
use crate::params::{rho, DerivedConstants};
use crate::special::sinc;
use crate::{Error, Result};

/// Relative mismatch allowed between `A(tau)` and its tail model at the horizon.
pub const TAIL_TOLERANCE: f64 = 1e-9;

/// Largest launch sequence accepted by [`psd_finite_horizon`].
pub const MAX_FINITE_SAMPLES: usize = 4096;

/// Two-sided power spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    /// Frequencies, Hz, symmetric about zero and increasing.
    pub freqs: Vec<f64>,
    /// Continuous part, W/Hz.
    pub density: Vec<f64>,
    /// Power of the spectral line at `f = 0`, W.
    pub dc_line: f64,
}

/// Sampling of the lag and frequency axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdGrid {
    /// Lag step, s.
    pub dtau: f64,
    /// Largest lag used, s.
    pub horizon: f64,
    /// Largest frequency, Hz.
    pub f_max: f64,
    /// Frequency step, Hz.
    pub df: f64,
}

impl PsdGrid {
    /// Default grid for noise bandwidth `b` and symbol period `t_s`: 64 lag
    /// samples per `1/b`, frequencies to `8 b` in steps of `b/256`, and a
    /// horizon of at least 32 symbols placed on a zero of `sinc(b tau)`.
    pub fn standard(b: f64, t_s: f64) -> Self {
        let zeros = libm::ceil(32.0 * t_s * b);
        PsdGrid {
            dtau: 1.0 / (64.0 * b),
            horizon: zeros / b,
            f_max: 8.0 * b,
            df: b / 256.0,
        }
    }

    fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("dtau", self.dtau),
            ("horizon", self.horizon),
            ("f_max", self.f_max),
            ("df", self.df),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain { what, value: v });
            }
        }
        if self.horizon < self.dtau {
            return Err(Error::Inconsistent("horizon shorter than one lag step"));
        }
        Ok(())
    }

    /// Symmetric frequency axis `-f_max ..= f_max`.
    pub fn freqs(&self) -> Vec<f64> {
        let n = libm::round(self.f_max / self.df) as i64;
        (-n..=n).map(|i| i as f64 * self.df).collect()
    }
}

/// Behaviour of `A(tau)` beyond the horizon: `constant + sinc_amplitude sinc(bandwidth tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    /// Asymptote, W; becomes the line at `f = 0`.
    pub constant: f64,
    /// Amplitude of the sinc term, W.
    pub sinc_amplitude: f64,
    /// Bandwidth of the sinc term, Hz.
    pub bandwidth: f64,
}

impl TailModel {
    /// Value at lag `tau`.
    pub fn eval(&self, tau: f64) -> f64 {
        self.constant + self.sinc_amplitude * sinc(self.bandwidth * tau)
    }

    /// Transform of the sinc term at frequency `f`.
    pub fn band(&self, f: f64) -> f64 {
        let edge = 0.5 * self.bandwidth;
        let level = self.sinc_amplitude / self.bandwidth;
        if f.abs() < edge {
            level
        } else if f.abs() == edge {
            0.5 * level
        } else {
            0.0
        }
    }
}

/// PSD of a cyclostationary process from its real, even, time-averaged
/// autocorrelation `acf_tau`.
pub fn psd_cyclostationary<F>(acf_tau: F, tail: TailModel, grid: &PsdGrid) -> Result<Psd>
where
    F: Fn(f64) -> Result<f64>,
{
    grid.validate()?;
    let n = libm::round(grid.horizon / grid.dtau) as usize;
    let at0 = acf_tau(0.0)?;
    let scale = at0.abs().max(tail.constant.abs() + tail.sinc_amplitude.abs());
    let h = n as f64 * grid.dtau;
    // A sinc peak just inside the horizon catches tails that only vanish on its zeros.
    for tau in [h, h - 0.5 / tail.bandwidth.max(1.0 / h)] {
        if (acf_tau(tau)? - tail.eval(tau)).abs() > TAIL_TOLERANCE * scale {
            return Err(Error::Inconsistent("autocorrelation has not reached its tail at the horizon"));
        }
    }
    let mut rem = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let tau = k as f64 * grid.dtau;
        rem.push(acf_tau(tau)? - tail.eval(tau));
    }
    let freqs = grid.freqs();
    let half = freqs.len() / 2;
    let mut pos = Vec::with_capacity(half + 1);
    for &f in &freqs[half..] {
        let w = 2.0 * PI * f * grid.dtau;
        let mut s = 0.5 * rem[0] + 0.5 * rem[n] * libm::cos(w * n as f64);
        for (k, r) in rem.iter().enumerate().take(n).skip(1) {
            s += r * libm::cos(w * k as f64);
        }
        pos.push(2.0 * grid.dtau * s + tail.band(f));
    }
    let mut density = Vec::with_capacity(freqs.len());
    density.extend(pos[1..].iter().rev());
    density.extend(pos.iter());
    Ok(Psd {
        freqs,
        density,
        dc_line: tail.constant,
    })
}

/// Tail of the ring-modulated PAM autocorrelation: its linear term in `rho`.
pub fn ring_pam_tail(p: f64, dc: &DerivedConstants) -> TailModel {
    TailModel {
        constant: 0.0,
        sinc_amplitude: (dc.kz() + 0.5 * dc.kappa * p * p) * libm::exp(-dc.kappa * p),
        bandwidth: dc.params.b,
    }
}

/// PSD of ring-modulated PAM with rectangular pulses of power `p`.
pub fn ring_pam_psd(p: f64, t_s: f64, dc: &DerivedConstants, grid: &PsdGrid) -> Result<Psd> {
    psd_cyclostationary(
        |tau| acf_ring_time_avg(tau, p, t_s, dc),
        ring_pam_tail(p, dc),
        grid,
    )
}

/// Finite-horizon PSD `E|U(f)|^2 / T` of the deterministic launch sequence
/// `launch` sampled every `dt`, with `T = n dt`.
pub fn psd_finite_horizon(
    launch: &[Complex64],
    dt: f64,
    dc: &DerivedConstants,
    freqs: &[f64],
) -> Result<Vec<f64>> {
    let n = launch.len();
    if n == 0 || n > MAX_FINITE_SAMPLES {
        return Err(Error::Domain { what: "samples", value: n as f64 });
    }
    if !(dt > 0.0) {
        return Err(Error::Domain { what: "dt", value: dt });
    }
    // lag[n - 1 + d] = sum_i A(t_i, t_i - d dt)
    let mut lag = alloc::vec![Complex64::new(0.0, 0.0); 2 * n - 1];
    for d in 0..n {
        let r = rho(d as f64 * dt, dc.params.b);
        for i in d..n {
            let a = acf_exact(launch[i], launch[i - d], r, dc)?.value;
            lag[n - 1 + d] += a;
            if d > 0 {
                lag[n - 1 - d] += a.conj();
            }
        }
    }
    let t = n as f64 * dt;
    Ok(freqs
        .iter()
        .map(|&f| {
            let mut s = Complex64::new(0.0, 0.0);
            for (idx, l) in lag.iter().enumerate() {
                let d = idx as f64 - (n as f64 - 1.0);
                s += l * Complex64::from_polar(1.0, -2.0 * PI * f * d * dt);
            }
            s.re * dt * dt / t
        })
        .collect())
}

/// Power passed by an ideal low-pass filter of two-sided width `w`.
pub fn band_power(psd: &Psd, w: f64) -> Result<f64> {
    let half = 0.5 * w;
    let f = &psd.freqs;
    if !(w >= 0.0) || half > *f.last().ok_or(Error::Inconsistent("empty spectrum"))? {
        return Err(Error::Domain { what: "w", value: w });
    }
    let interp = |x: f64| -> f64 {
        let i = f.partition_point(|&v| v < x).clamp(1, f.len() - 1);
        let (f0, f1) = (f[i - 1], f[i]);
        let (d0, d1) = (psd.density[i - 1], psd.density[i]);
        d0 + (d1 - d0) * (x - f0) / (f1 - f0)
    };
    let mut pts: Vec<(f64, f64)> = alloc::vec![(-half, interp(-half))];
    for (x, d) in f.iter().zip(&psd.density) {
        if *x > -half && *x < half {
            pts.push((*x, *d));
        }
    }
    pts.push((half, interp(half)));
    let area: f64 = pts
        .windows(2)
        .map(|p| 0.5 * (p[0].1 + p[1].1) * (p[1].0 - p[0].0))
        .sum();
    Ok(area + psd.dc_line)
}

/// Total power in the spectrum: continuous part over the whole grid plus the line.
pub fn total_power(psd: &Psd) -> f64 {
    let area: f64 = psd
        .freqs
        .windows(2)
        .zip(psd.density.windows(2))
        .map(|(f, d)| 0.5 * (d[0] + d[1]) * (f[1] - f[0]))
        .sum();
    area + psd.dc_line
}

/// Impulse response of the triangular filter, `2 W sinc^2(W t)`.
pub fn triangle_filter_time(t: f64, w: f64) -> f64 {
    let s = sinc(w * t);
    2.0 * w * s * s
}

/// Frequency response of the triangular filter, `2 (1 - |f|/W)` inside `|f| <= W`.
pub fn triangle_filter_freq(f: f64, w: f64) -> f64 {
    if f.abs() <= w {
        2.0 * (1.0 - f.abs() / w)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::FiberParams;

    #[test]
    fn tail_mismatch_is_rejected() {
        let dc = FiberParams::reference().derive();
        let grid = PsdGrid::standard(dc.params.b, 1e-11);
        let wrong = TailModel {
            constant: 0.01,
            ..ring_pam_tail(0.1, &dc)
        };
        let r = psd_cyclostationary(|tau| acf_ring_time_avg(tau, 0.1, 1e-11, &dc), wrong, &grid);
        assert!(matches!(r, Err(Error::Inconsistent(_))));
    }

    #[test]
    fn linear_ring_pam_matches_closed_form() {
        let dc = FiberParams::reference().with_gamma(0.0).unwrap().derive();
        let t_s = 1e-11;
        let p = 0.01;
        let psd = ring_pam_psd(p, t_s, &dc, &PsdGrid::standard(dc.params.b, t_s)).unwrap();
        for (&f, &d) in psd.freqs.iter().zip(&psd.density).step_by(97) {
            let s = sinc(f * t_s);
            let noise = if f.abs() < 0.5 * dc.params.b { dc.kz() / dc.params.b } else { 0.0 };
            let want = p * t_s * s * s + noise;
            assert!((d - want).abs() < 2e-3 * p * t_s, "{f} {d} {want}");
        }
    }

    #[test]
    fn band_power_of_flat_spectrum() {
        let psd = Psd {
            freqs: (-10..=10).map(|i| i as f64).collect(),
            density: alloc::vec![2.0; 21],
            dc_line: 1.0,
        };
        assert!((band_power(&psd, 5.0).unwrap() - 11.0).abs() < 1e-12);
        assert!(band_power(&psd, 25.0).is_err());
    }

    #[test]
    fn triangle_filter_peak() {
        assert_eq!(triangle_filter_freq(0.0, 3.0), 2.0);
        assert_eq!(triangle_filter_freq(4.0, 3.0), 0.0);
        assert_eq!(triangle_filter_time(0.0, 3.0), 6.0);
    }
}
