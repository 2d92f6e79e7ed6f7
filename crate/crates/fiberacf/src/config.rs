//! TOML configuration.

use std::path::Path;

use anyhow::{ensure, Context, Result};
use fiberacf_core::FiberParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Allowed relative gap between the receiver noise PSD and `k_B T` when a
/// temperature is given; the PSD is the value actually used.
pub const N0_TEMPERATURE_TOLERANCE: f64 = 1e-3;

/// Link description as written in the config file, in engineering units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSection {
    pub gamma_per_w_km: f64,
    pub length_km: f64,
    pub oa_noise_psdd_w_per_hz_m: f64,
    pub oa_bandwidth_ghz: f64,
    pub rx_noise_psd_w_per_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol_period_ps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
}

/// Monte Carlo defaults, overridable on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_seed() -> u64 {
    42
}
fn default_trials() -> u64 {
    10_000
}
fn default_steps() -> usize {
    512
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seed: default_seed(),
            trials: default_trials(),
            steps: default_steps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub fiber: FiberSection,
    #[serde(default)]
    pub run: RunSection,
}

impl Config {
    /// The reference 2000 km link.
    pub fn reference() -> Self {
        let p = FiberParams::reference();
        Config {
            fiber: FiberSection {
                gamma_per_w_km: p.gamma * 1e3,
                length_km: p.z / 1e3,
                oa_noise_psdd_w_per_hz_m: p.n_a,
                oa_bandwidth_ghz: p.b / 1e9,
                rx_noise_psd_w_per_hz: p.n0,
                symbol_period_ps: p.t_s.map(|t| t * 1e12),
                temperature_k: p.t_e,
            },
            run: RunSection::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).context("invalid configuration")?;
        cfg.params()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Converts to SI parameters and validates them.
    pub fn params(&self) -> Result<FiberParams> {
        let f = &self.fiber;
        let mut p = FiberParams::new(
            f.gamma_per_w_km * 1e-3,
            f.length_km * 1e3,
            f.oa_noise_psdd_w_per_hz_m,
            f.oa_bandwidth_ghz * 1e9,
            f.rx_noise_psd_w_per_hz,
        )?;
        p.t_s = f.symbol_period_ps.map(|t| t * 1e-12);
        p.t_e = f.temperature_k;
        p.validate()?;
        if let Some(thermal) = p.thermal_n0() {
            let mismatch = (thermal - p.n0).abs() / p.n0;
            ensure!(
                mismatch <= N0_TEMPERATURE_TOLERANCE,
                "rx_noise_psd_w_per_hz = {:e} disagrees with k_B T = {thermal:e} by {:.2}%",
                p.n0,
                100.0 * mismatch
            );
        }
        Ok(p)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// SHA-256 of the canonical serialisation, hex encoded.
    pub fn digest(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
