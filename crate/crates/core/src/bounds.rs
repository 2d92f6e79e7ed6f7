//! Bounds on received power under ideal low-pass filtering.
//!
//! The receiver filters the channel output with an ideal low-pass filter of
//! bandwidth `W`. The autocorrelation's amplitude bound decays like a
//! Gaussian in the input power, which caps the filtered power. Three regimes
//! are covered, set by `W` against the noise bandwidth `B` and by the
//! nonlinear index `gamma (K/2) z^2` against one.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::params::DerivedConstants;
use crate::special::erf_real;
use crate::{Error, Result};

const SQRT_PI_2: f64 = 0.886_226_925_452_758;

/// Which bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeTag {
    /// `W <= B`, `gamma (K/2) z^2 <= 1`.
    NarrowWeak,
    /// `W <= B`, `gamma (K/2) z^2 >= 1`.
    NarrowStrong,
    /// `W >= B`, `gamma (K/2) z^2 <= 1`.
    WideWeak,
    /// `W > B` with strong nonlinearity: no bound available.
    Unsupported,
}

impl RegimeTag {
    /// Short label used in reports.
    pub fn label(&self) -> &'static str {
        match self {
            RegimeTag::NarrowWeak => "narrow_weak",
            RegimeTag::NarrowStrong => "narrow_strong",
            RegimeTag::WideWeak => "wide_weak",
            RegimeTag::Unsupported => "unsupported",
        }
    }
}

/// Receiver bandwidth and the regime it falls in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRegime {
    /// Receiver filter bandwidth, Hz.
    pub w: f64,
    /// Noise bandwidth, Hz.
    pub b: f64,
    /// `gamma (K/2) z^2`.
    pub nonlinear_index: f64,
    /// Selected bound.
    pub tag: RegimeTag,
}

impl BoundRegime {
    /// Classifies `w` for the link `dc`. On a boundary the narrow and weak
    /// forms win; [`BoundRegime::alternates`] lists the others.
    pub fn classify(w: f64, dc: &DerivedConstants) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Domain { what: "w", value: w });
        }
        let b = dc.params.b;
        let g = dc.nonlinear_index();
        let tag = match (w <= b, g <= 1.0) {
            (true, true) => RegimeTag::NarrowWeak,
            (true, false) => RegimeTag::NarrowStrong,
            (false, true) => RegimeTag::WideWeak,
            (false, false) => RegimeTag::Unsupported,
        };
        Ok(BoundRegime { w, b, nonlinear_index: g, tag })
    }

    /// Other regimes whose bounds also hold at this point.
    pub fn alternates(&self) -> Vec<RegimeTag> {
        let mut out = Vec::new();
        let w_edge = self.w == self.b;
        let g_edge = self.nonlinear_index == 1.0;
        let g_weak = self.nonlinear_index <= 1.0;
        let narrow = self.w <= self.b;
        if w_edge && g_weak {
            out.push(RegimeTag::WideWeak);
        }
        if g_edge && narrow {
            out.push(RegimeTag::NarrowStrong);
        }
        out.retain(|t| *t != self.tag);
        out
    }

    fn with_tag(&self, tag: RegimeTag) -> Self {
        BoundRegime { tag, ..*self }
    }
}

/// A bound written as a sum of named non-negative addends.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Input power the bound was evaluated at, W.
    pub input_power: f64,
    /// Value of the bound (the sum of `components`).
    pub bound: f64,
    /// Regime used.
    pub regime: BoundRegime,
    /// Addends: `"erf"`, `"tail1"`, `"tail2"`.
    pub components: [(&'static str, f64); 3],
    /// The same bound from another regime, on a regime boundary.
    pub alternate: Option<Box<BoundReport>>,
}

impl BoundReport {
    fn new(input_power: f64, regime: BoundRegime, parts: [f64; 3]) -> Self {
        BoundReport {
            input_power,
            bound: parts[0] + parts[1] + parts[2],
            regime,
            components: [("erf", parts[0]), ("tail1", parts[1]), ("tail2", parts[2])],
            alternate: None,
        }
    }

    /// The tighter of this bound and its alternate.
    pub fn best(&self) -> f64 {
        match &self.alternate {
            Some(a) => self.bound.min(a.bound),
            None => self.bound,
        }
    }
}

/// `(sqrt(pi)/2) erf(r y) / y`, equal to `r` at `y = 0`.
pub fn scaled_erf(r: f64, y: f64) -> f64 {
    if y == 0.0 {
        r
    } else {
        SQRT_PI_2 * erf_real(r * y) / y
    }
}

/// `(a + b sqrt(p) + c p) (sqrt(pi)/2) erf(sqrt(s p)) / sqrt(s p)`; concave in `p`.
pub fn erf_family(s: f64, p: f64, a: f64, b: f64, c: f64) -> f64 {
    (a + b * libm::sqrt(p) + c * p) * scaled_erf(1.0, libm::sqrt(s * p))
}

/// The member of [`erf_family`] that appears in the average-power bounds:
/// `[Kz + (sqrt(p) + delta)^2] (sqrt(pi)/2) erf(sqrt(s p)) / sqrt(s p)`.
pub fn bound_profile(dc: &DerivedConstants, s: f64, p: f64) -> f64 {
    let d = dc.delta;
    erf_family(s, p, dc.kz() + d * d, 2.0 * d, 1.0)
}

fn require_nonlinear(dc: &DerivedConstants) -> Result<()> {
    if dc.params.gamma > 0.0 && dc.k > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { what: "gamma K", value: dc.params.gamma * dc.k })
    }
}

fn inst_parts(p_t: f64, regime: &BoundRegime, dc: &DerivedConstants) -> Result<[f64; 3]> {
    let kz = dc.kz();
    let ratio = regime.w / regime.b;
    let pref = 4.0 * (kz + sq(libm::sqrt(p_t) + dc.delta));
    let y = libm::sqrt(dc.kappa / 8.0 * p_t);
    let floor = libm::exp(-libm::sqrt(dc.gkz2));
    let parts = match regime.tag {
        RegimeTag::NarrowWeak => [
            2.0 * ratio * scaled_erf(1.0, y),
            5.0 * floor * libm::exp(-dc.kappa / 9.0 * p_t),
            0.0,
        ],
        RegimeTag::NarrowStrong => {
            let r = 1.0 / libm::sqrt(3.0 * kz * dc.kappa / 8.0);
            let gamma = dc.params.gamma;
            [
                2.0 * ratio * scaled_erf(r, y),
                25.0 * ratio / dc.gkz2 * libm::exp(-p_t / (libm::sqrt(18.0) * kz)),
                5.0 * floor * libm::exp(-libm::sqrt(gamma / (20.0 * dc.k)) * p_t),
            ]
        }
        RegimeTag::WideWeak => {
            let inv = 1.0 / ratio;
            [
                2.0 * ratio * scaled_erf(inv, y),
                0.25 * (1.0 - inv) * libm::exp(-dc.kappa / 8.0 * p_t * inv * inv),
                5.0 * floor * libm::exp(-dc.kappa / 9.0 * p_t),
            ]
        }
        RegimeTag::Unsupported => return Err(Error::UnsupportedRegime),
    };
    Ok(parts.map(|v| pref * v))
}

fn sq(x: f64) -> f64 {
    x * x
}

/// Bound on the filtered output power when the input has instantaneous
/// power `p_t` throughout.
pub fn inst_power_bound(p_t: f64, regime: &BoundRegime, dc: &DerivedConstants) -> Result<BoundReport> {
    require_nonlinear(dc)?;
    if !(p_t >= 0.0) {
        return Err(Error::Domain { what: "p_t", value: p_t });
    }
    let mut report = BoundReport::new(p_t, *regime, inst_parts(p_t, regime, dc)?);
    if let Some(&alt) = regime.alternates().first() {
        let r = regime.with_tag(alt);
        report.alternate = Some(Box::new(BoundReport::new(p_t, r, inst_parts(p_t, &r, dc)?)));
    }
    Ok(report)
}

fn avg_parts(p: f64, regime: &BoundRegime, dc: &DerivedConstants) -> Result<[f64; 3]> {
    let ratio = regime.w / regime.b;
    let q = p + dc.p_o;
    match regime.tag {
        RegimeTag::NarrowWeak => Ok([8.0 * ratio * bound_profile(dc, dc.kappa / 8.0, q), dc.c1, 0.0]),
        RegimeTag::NarrowStrong => Ok([
            16.0 * ratio / dc.gkz2 * bound_profile(dc, 1.0 / (3.0 * dc.kz()), q),
            ratio * dc.c2,
            dc.c3,
        ]),
        RegimeTag::WideWeak | RegimeTag::Unsupported => Err(Error::UnsupportedRegime),
    }
}

/// Bound on the filtered output power for any input of average power `p`.
///
/// Only the `W <= B` regimes have one.
pub fn avg_power_bound(p: f64, regime: &BoundRegime, dc: &DerivedConstants) -> Result<BoundReport> {
    require_nonlinear(dc)?;
    if !(p >= 0.0) {
        return Err(Error::Domain { what: "p", value: p });
    }
    let mut report = BoundReport::new(p, *regime, avg_parts(p, regime, dc)?);
    if let Some(&alt) = regime.alternates().iter().find(|t| **t == RegimeTag::NarrowStrong) {
        let r = regime.with_tag(alt);
        report.alternate = Some(Box::new(BoundReport::new(p, r, avg_parts(p, &r, dc)?)));
    }
    Ok(report)
}

/// Form of the bandwidth condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WidthVariant {
    /// Uses the average-power bound as is.
    Exact,
    /// Replaces `erf` by one, giving a closed form.
    ErfCapped,
}

/// Smallest `W/B` at which the average-power bound can reach `q (Kz + P)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthBound {
    /// Lower bound on `W/B`; zero when vacuous.
    pub ratio: f64,
    /// True when the bound's constant part already exceeds the target.
    pub vacuous: bool,
    /// Regime whose bound was inverted.
    pub tag: RegimeTag,
}

/// Lower bound on the receiver bandwidth ratio `W/B` needed to collect a
/// fraction `q` of the launched-plus-noise power `Kz + P`.
pub fn bandwidth_lower_bound(p: f64, dc: &DerivedConstants, q: f64, variant: WidthVariant) -> Result<WidthBound> {
    require_nonlinear(dc)?;
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain { what: "q", value: q });
    }
    if !(p >= 0.0) {
        return Err(Error::Domain { what: "p", value: p });
    }
    let kz = dc.kz();
    let target = q * (kz + p);
    let pp = p + dc.p_o;
    let bracket = kz + sq(libm::sqrt(pp) + dc.delta);
    let (num, den, tag) = if dc.nonlinear_index() <= 1.0 {
        let den = match variant {
            WidthVariant::Exact => 8.0 * bound_profile(dc, dc.kappa / 8.0, pp),
            WidthVariant::ErfCapped => 8.0 * bracket / libm::sqrt(dc.kappa / 8.0 * pp),
        };
        (target - dc.c1, den, RegimeTag::NarrowWeak)
    } else {
        let den = match variant {
            WidthVariant::Exact => dc.c2 + 16.0 / dc.gkz2 * bound_profile(dc, 1.0 / (3.0 * kz), pp),
            WidthVariant::ErfCapped => dc.c2 + libm::sqrt(512.0 / dc.kappa) * bracket / libm::sqrt(pp),
        };
        (target - dc.c3, den, RegimeTag::NarrowStrong)
    };
    Ok(if num <= 0.0 {
        WidthBound { ratio: 0.0, vacuous: true, tag }
    } else {
        WidthBound { ratio: num / den, vacuous: false, tag }
    })
}

/// Input power at which the required `W/B` reaches one: beyond it, no
/// receiver narrower than the noise bandwidth collects a fraction `q` of
/// the power.
pub fn power_threshold(dc: &DerivedConstants, q: f64) -> Result<f64> {
    let excess = |p: f64| -> Result<f64> {
        Ok(bandwidth_lower_bound(p, dc, q, WidthVariant::Exact)?.ratio - 1.0)
    };
    let (mut lo, mut hi) = (1e-3f64, 1e4f64);
    if excess(lo)? >= 0.0 || excess(hi)? <= 0.0 {
        return Err(Error::NoBracket("power threshold"));
    }
    // Bisection in log power; the required ratio grows monotonically here.
    for _ in 0..200 {
        let mid = libm::sqrt(lo * hi);
        if excess(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo - 1.0 < 1e-13 {
            break;
        }
    }
    Ok(libm::sqrt(lo * hi))
}

/// Power-law exponents of the received-power bound and of the minimum
/// bandwidth when the noise bandwidth scales as `B = B0 P^beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingExponents {
    /// Fitted exponent of the average-power bound at fixed `W = B0`.
    pub received_power: f64,
    /// Fitted exponent of the minimum bandwidth `B (W/B)_min`.
    pub bandwidth: f64,
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| libm::log(*x)).collect();
    let ly: Vec<f64> = ys.iter().map(|y| libm::log(*y)).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Least-squares log-log slope of `ys` against `xs`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() < 2 || xs.len() != ys.len() || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::Inconsistent("slope needs two or more positive points"));
    }
    Ok(log_slope(xs, ys))
}

/// Fits the exponents of the received-power bound and required bandwidth
/// over `p_grid` (W), with the noise bandwidth growing as `B0 P^beta` and
/// the per-length noise density held fixed. `B0` and `W` are the template's `B`.
pub fn scaling_exponents(beta: f64, template: &DerivedConstants, p_grid: &[f64]) -> Result<ScalingExponents> {
    let b0 = template.params.b;
    let mut rx = Vec::with_capacity(p_grid.len());
    let mut bw = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let dc = template.params.with_bandwidth(b0 * libm::pow(p, beta))?.derive();
        let regime = BoundRegime::classify(b0.min(dc.params.b), &dc)?;
        rx.push(avg_power_bound(p, &regime, &dc)?.bound);
        let wb = bandwidth_lower_bound(p, &dc, 1.0, WidthVariant::Exact)?;
        bw.push(wb.ratio * dc.params.b);
    }
    Ok(ScalingExponents {
        received_power: loglog_slope(p_grid, &rx)?,
        bandwidth: loglog_slope(p_grid, &bw)?,
    })
}

/// Bound on the output energy collected in a window of length `t_r` when the
/// input has instantaneous power `p_t` (weak nonlinearity).
pub fn energy_bound_time_resolution(p_t: f64, t_r: f64, dc: &DerivedConstants) -> Result<f64> {
    require_nonlinear(dc)?;
    if dc.nonlinear_index() > 1.0 {
        return Err(Error::UnsupportedRegime);
    }
    if !(t_r > 0.0) || !(p_t >= 0.0) {
        return Err(Error::Domain { what: "t_r", value: t_r });
    }
    let b = dc.params.b;
    let pref = 4.0 * (dc.kz() + sq(libm::sqrt(p_t) + dc.delta));
    let y = libm::sqrt(dc.kappa / 8.0 * p_t);
    if t_r * b >= 1.0 {
        let tail = 5.0 * (t_r - 1.0 / b) * libm::exp(-libm::sqrt(dc.gkz2) - dc.kappa / 9.0 * p_t);
        Ok(pref * (scaled_erf(1.0, y) / b + tail))
    } else {
        Ok(pref * scaled_erf(b * t_r, y) / b)
    }
}

/// Bound on the energy collected in a window `t_r <= 1/B` inside one symbol
/// of ring-modulated PAM with rectangular pulses of power `p`.
pub fn pam_rect_energy_bound(p: f64, t_r: f64, dc: &DerivedConstants) -> Result<f64> {
    let b = dc.params.b;
    if dc.nonlinear_index() > 1.0 {
        return Err(Error::UnsupportedRegime);
    }
    if !(t_r > 0.0 && t_r * b <= 1.0 + 1e-12) {
        return Err(Error::Domain { what: "t_r", value: t_r });
    }
    if !(p >= 0.0) {
        return Err(Error::Domain { what: "p", value: p });
    }
    let kz = dc.kz();
    let g = dc.params.gamma * dc.k * dc.params.z * dc.params.z;
    let y = libm::sqrt(0.5 * dc.kappa * p);
    // h(y) = (sqrt(pi)/y) [erf(y) - (1 - e^{-y^2}) / (y sqrt(pi))], h(0) = 1.
    let h = if y < 0.5 {
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut fact = 1.0;
        for n in 0..20 {
            let nf = n as f64;
            if n > 0 {
                fact *= nf;
            }
            let coef = 2.0 / (fact * (2.0 * nf + 1.0)) - 1.0 / (fact * (nf + 1.0));
            sum += pow * coef;
            pow *= -y * y;
        }
        sum
    } else {
        libm::sqrt(PI) / y * (erf_real(y) - (1.0 - libm::exp(-y * y)) / (y * libm::sqrt(PI)))
    };
    Ok((kz + p * (1.0 + g * g)) * t_r * h)
}
