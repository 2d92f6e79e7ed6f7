//! Fiber parameters and the constants derived from them.

use core::f64::consts::E;

use num_complex::Complex64;

use crate::error::domain;
use crate::special::sinc;
use crate::{Error, Result};

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Physical description of the link, all in SI units.
///
/// `gamma` and `n_a` may be zero to represent the linear and noise-free
/// limits; every other field is strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberParams {
    /// Nonlinearity coefficient, 1/(W m).
    pub gamma: f64,
    /// Fiber length, m.
    pub z: f64,
    /// Amplifier noise PSD per unit length, W/(Hz m).
    pub n_a: f64,
    /// Bandwidth of the in-line noise, Hz.
    pub b: f64,
    /// Receiver noise PSD, W/Hz.
    pub n0: f64,
    /// Symbol period, s.
    pub t_s: Option<f64>,
    /// Receiver noise temperature, K.
    pub t_e: Option<f64>,
}

impl FiberParams {
    /// Builds and validates a parameter set without the optional fields.
    pub fn new(gamma: f64, z: f64, n_a: f64, b: f64, n0: f64) -> Result<Self> {
        let p = FiberParams {
            gamma,
            z,
            n_a,
            b,
            n0,
            t_s: None,
            t_e: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// The reference 2000 km link: 1.27 /W/km, 500 GHz noise bandwidth,
    /// 10 ps symbols, 300 K receiver.
    pub fn reference() -> Self {
        FiberParams {
            gamma: 1.27e-3,
            z: 2.0e6,
            n_a: 6.674e-24,
            b: 5.0e11,
            n0: 4.142e-21,
            t_s: Some(1.0e-11),
            t_e: Some(300.0),
        }
    }

    /// Checks every field against its domain.
    pub fn validate(&self) -> Result<()> {
        let nonneg = |what, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(domain(what, v))
            }
        };
        let pos = |what, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(domain(what, v))
            }
        };
        nonneg("gamma", self.gamma)?;
        nonneg("n_a", self.n_a)?;
        pos("z", self.z)?;
        pos("b", self.b)?;
        pos("n0", self.n0)?;
        if let Some(t) = self.t_s {
            pos("t_s", t)?;
        }
        if let Some(t) = self.t_e {
            pos("t_e", t)?;
        }
        Ok(())
    }

    /// Returns a copy with a different nonlinearity coefficient.
    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.gamma = gamma;
        self.validate().map(|_| self)
    }

    /// Returns a copy with a different noise bandwidth.
    pub fn with_bandwidth(mut self, b: f64) -> Result<Self> {
        self.b = b;
        self.validate().map(|_| self)
    }

    /// Returns a copy with a different amplifier noise density.
    pub fn with_noise(mut self, n_a: f64) -> Result<Self> {
        self.n_a = n_a;
        self.validate().map(|_| self)
    }

    /// Returns a copy with a different symbol period.
    pub fn with_symbol_period(mut self, t_s: f64) -> Result<Self> {
        self.t_s = Some(t_s);
        self.validate().map(|_| self)
    }

    /// Symbol period, or an error if it was not configured.
    pub fn symbol_period(&self) -> Result<f64> {
        self.t_s.ok_or(Error::Missing("symbol period"))
    }

    /// Thermal receiver noise `k_B T_e`, when a temperature is given.
    pub fn thermal_n0(&self) -> Option<f64> {
        self.t_e.map(|t| BOLTZMANN * t)
    }

    /// Computes the derived constants.
    pub fn derive(&self) -> DerivedConstants {
        DerivedConstants::new(*self)
    }
}

/// Constants that recur throughout the formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// The parameters these were derived from.
    pub params: FiberParams,
    /// Noise power per unit length, `K = N_A B`, W/m.
    pub k: f64,
    /// Signal-noise mixing rate `2 gamma^2 K z^3 / 3`, 1/W.
    pub kappa: f64,
    /// `gamma K z^2`, dimensionless.
    pub gkz2: f64,
    /// Constant `sqrt(3 K z / (4 e))`, sqrt(W).
    pub delta: f64,
    /// Power offset `3 (K z + delta^2)`, W.
    pub p_o: f64,
    /// Additive constant of the weak-nonlinearity average-power bound, W.
    pub c1: f64,
    /// Bandwidth-proportional constant of the strong-nonlinearity bound, W.
    pub c2: f64,
    /// Additive constant of the strong-nonlinearity bound, W.
    pub c3: f64,
}

impl DerivedConstants {
    /// Derives the constants from a validated parameter set.
    pub fn new(params: FiberParams) -> Self {
        let FiberParams { gamma, z, n_a, b, .. } = params;
        let k = n_a * b;
        let kz = k * z;
        let kappa = 2.0 * gamma * gamma * k * z * z * z / 3.0;
        let gkz2 = gamma * k * z * z;
        let delta = libm::sqrt(3.0 * kz / (4.0 * E));
        let d2 = delta * delta;
        let decay = libm::exp(-libm::sqrt(gkz2));
        let c1 = 20.0
            * (kz + d2 + libm::sqrt(18.0 / (kappa * E)) * delta + 9.0 / (kappa * E))
            * decay;
        let c2 = 100.0 / gkz2
            * (kz + d2 + libm::sqrt(6.0 * kz / E) * delta + libm::sqrt(18.0) * kz / E);
        let ge2 = gamma * E * E;
        let c3 = 20.0
            * (kz + d2 + libm::pow(80.0 * k / ge2, 0.25) * delta + libm::sqrt(20.0 * k / ge2))
            * decay;
        DerivedConstants {
            params,
            k,
            kappa,
            gkz2,
            delta,
            p_o: 3.0 * (kz + d2),
            c1,
            c2,
            c3,
        }
    }

    /// Accumulated noise power per hertz of bandwidth, `K z`, W.
    pub fn kz(&self) -> f64 {
        self.k * self.params.z
    }

    /// `gamma (K/2) z^2`; values up to one are the weak-nonlinearity regime.
    pub fn nonlinear_index(&self) -> f64 {
        0.5 * self.gkz2
    }
}

/// Noise correlation between times `tau` apart, `sinc(B tau)`.
pub fn rho(tau: f64, b: f64) -> f64 {
    sinc(b * tau)
}

/// `sqrt(1 - rho^2)`, evaluated as `sqrt((1-rho)(1+rho))`.
pub fn rho_complement(rho: f64) -> Result<f64> {
    if !(rho.abs() <= 1.0) {
        return Err(domain("rho", rho));
    }
    Ok(libm::sqrt((1.0 - rho) * (1.0 + rho)))
}

/// Argument `c = -j gamma (K/2) sqrt(1 - rho^2)` of the hyperbolic pair.
pub fn c_of_rho(dc: &DerivedConstants, rho: f64) -> Result<Complex64> {
    let s = rho_complement(rho)?;
    Ok(Complex64::new(0.0, -0.5 * dc.params.gamma * dc.k * s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_length() {
        assert!(FiberParams::new(1e-3, 0.0, 1e-24, 1e11, 1e-21).is_err());
        assert!(FiberParams::new(1e-3, 1.0, -1.0, 1e11, 1e-21).is_err());
        assert!(FiberParams::new(0.0, 1.0, 0.0, 1e11, 1e-21).is_ok());
    }

    #[test]
    fn rho_domain() {
        let dc = FiberParams::reference().derive();
        assert!(c_of_rho(&dc, 1.0 + 1e-15).is_err());
        assert_eq!(c_of_rho(&dc, 1.0).unwrap(), Complex64::new(0.0, -0.0));
        assert_eq!(rho(0.0, 5e11), 1.0);
        assert_eq!(rho(2e-12, 5e11), 0.0);
    }

    #[test]
    fn linear_limit_has_zero_kappa() {
        let dc = FiberParams::reference().with_gamma(0.0).unwrap().derive();
        assert_eq!(dc.kappa, 0.0);
        assert_eq!(dc.gkz2, 0.0);
    }
}
