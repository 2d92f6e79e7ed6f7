//! Data series behind each figure, as tables.

use anyhow::{bail, Result};
use fiberacf_core::acf::{acf_rect_isolated, acf_ring_time_avg, AcfMode};
use fiberacf_core::bounds::power_threshold;
use fiberacf_core::capacity::{
    capacity_upper1, capacity_upper2, eta_bound, scaled_b_curve, shannon_eta, DEFAULT_POWER_FRACTION,
    KAPPA_HAT,
};
use fiberacf_core::mc::{mc_acf_with, mc_ring_time_avg, TrialRunner};
use fiberacf_core::params::rho;
use fiberacf_core::special::eval_hyperbolic;
use fiberacf_core::spectrum::{ring_pam_psd, PsdGrid};
use fiberacf_core::units::{dbm_to_watts, watts_to_dbm};
use fiberacf_core::{Complex64, DerivedConstants};

use crate::output::{Cell, Table};
use crate::validate::{log_grid, PSD_POWERS};

/// Second observation time of the autocorrelation figures, s.
pub const TPRIME_OFF_PULSE: f64 = 5.1e-12;

/// Monte Carlo effort and seed for the simulated series.
#[derive(Debug, Clone, Copy)]
pub struct McSettings {
    pub trials: u64,
    pub steps: usize,
    pub seed: u64,
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..n).map(|i| (lo * (m - i as f64) + hi * i as f64) / m).collect()
}

fn mw(p: f64) -> String {
    format!("{}mw", (p * 1e3).round())
}

fn ps(t: f64) -> String {
    format!("{}ps", (t * 1e13).round() / 10.0).replace('.', "p")
}

/// `|S|`, `S_R`, `S_I` along `c = -j x / z^2` with their bounds.
pub fn fig1() -> Table {
    let mut t = Table::new(
        "fig1",
        &["x", "abs_s", "s_r", "s_i", "abs_s_bound", "s_r_lower", "s_i_lower", "s_i_upper"],
    );
    for x in log_grid(1e-3, 1e3, 601) {
        let p = eval_hyperbolic(Complex64::new(0.0, -x), 1.0);
        t.push(vec![
            x.into(),
            p.s.norm().into(),
            p.s_r().into(),
            p.s_i().into(),
            (5f64.sqrt() * (-x.sqrt()).exp()).into(),
            (-0.136).into(),
            (-0.028).into(),
            x.into(),
        ]);
    }
    t
}

/// `|T|/z`, `T_R/z`, `T_I/z` along `c = -j x / z^2` with the bounds on `T_I`.
pub fn fig2() -> Table {
    let mut t = Table::new(
        "fig2",
        &["x", "abs_t_over_z", "t_r_over_z", "t_i_over_z", "t_i_upper", "t_i_lower"],
    );
    for x in log_grid(1e-3, 1e3, 601) {
        let p = eval_hyperbolic(Complex64::new(0.0, -x), 1.0);
        t.push(vec![
            x.into(),
            p.t.norm().into(),
            p.t_r().into(),
            p.t_i().into(),
            (2.0 * x / 3.0).into(),
            (x.min(1.0 / x.sqrt()) / 3.0).into(),
        ]);
    }
    t
}

/// `|A(t, t')|` of the isolated rectangular pulse, exact and low-noise forms.
pub fn fig3(dc: &DerivedConstants) -> Result<Table> {
    let t_s = dc.params.symbol_period()?;
    let powers = [0.01, 0.1, 0.2, 0.4];
    let tps = [0.0, TPRIME_OFF_PULSE];
    let mut header = vec!["t_ps".to_owned()];
    for &p in &powers {
        for &tp in &tps {
            header.push(format!("abs_exact_w_p{}_tp{}", mw(p), ps(tp)));
            header.push(format!("abs_approx_w_p{}_tp{}", mw(p), ps(tp)));
        }
    }
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new("fig3", &refs);
    for t in linspace(-20e-12, 20e-12, 401) {
        let mut row: Vec<Cell> = vec![(t * 1e12).into()];
        for &p in &powers {
            for &tp in &tps {
                for mode in [AcfMode::Exact, AcfMode::Approx] {
                    row.push(acf_rect_isolated(t, tp, p, t_s, dc, mode)?.value.norm().into());
                }
            }
        }
        table.push(row);
    }
    Ok(table)
}

/// Exact and simulated `|A(t, t')|` of the rectangular pulse at 100 mW.
pub fn fig4<R: TrialRunner>(runner: &R, dc: &DerivedConstants, mc: McSettings) -> Result<Table> {
    let t_s = dc.params.symbol_period()?;
    let p: f64 = 0.1;
    let amp = |time: f64| {
        if time.abs() <= 0.5 * t_s {
            Complex64::new(p.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let mut header = vec!["t_ps".to_owned()];
    for tp in [0.0, TPRIME_OFF_PULSE] {
        for col in ["abs_exact_w", "abs_mc_w", "mc_std_error_w"] {
            header.push(format!("{col}_tp{}", ps(tp)));
        }
    }
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new("fig4", &refs);
    for (i, t) in linspace(-20e-12, 20e-12, 81).into_iter().enumerate() {
        let mut row: Vec<Cell> = vec![(t * 1e12).into()];
        for (j, tp) in [0.0, TPRIME_OFF_PULSE].into_iter().enumerate() {
            let exact = acf_rect_isolated(t, tp, p, t_s, dc, AcfMode::Exact)?.value;
            let r = rho(t - tp, dc.params.b);
            let seed = mc.seed.wrapping_add((2 * i + j) as u64);
            let est = mc_acf_with(runner, amp(t), amp(tp), r, dc, mc.trials, mc.steps, seed)?;
            row.extend([exact.norm().into(), est.mean.norm().into(), est.std_error.into()]);
        }
        table.push(row);
    }
    Ok(table)
}

/// Time-averaged autocorrelation of ring-modulated PAM at 100 mW: low-noise
/// form, linear channel, and simulation.
pub fn fig5<R: TrialRunner>(runner: &R, dc: &DerivedConstants, mc: McSettings) -> Result<Table> {
    let t_s = dc.params.symbol_period()?;
    let p = 0.1;
    let linear = dc.params.with_gamma(0.0)?.derive();
    let mut table = Table::new(
        "fig5",
        &["tau_ps", "abs_approx_w", "abs_linear_w", "abs_mc_w", "mc_std_error_w"],
    );
    for (i, tau) in linspace(-20e-12, 20e-12, 81).into_iter().enumerate() {
        let approx = acf_ring_time_avg(tau, p, t_s, dc)?;
        let lin = acf_ring_time_avg(tau, p, t_s, &linear)?;
        let est = mc_ring_time_avg(runner, tau, p, t_s, dc, mc.trials, mc.steps, mc.seed.wrapping_add(i as u64))?;
        table.push(vec![
            (tau * 1e12).into(),
            approx.abs().into(),
            lin.abs().into(),
            est.mean.norm().into(),
            est.std_error.into(),
        ]);
    }
    Ok(table)
}

/// PSD of ring-modulated PAM for several powers and the 10 mW linear channel.
pub fn fig6(dc: &DerivedConstants) -> Result<Table> {
    let t_s = dc.params.symbol_period()?;
    let grid = PsdGrid::standard(dc.params.b, t_s);
    let linear = dc.params.with_gamma(0.0)?.derive();
    let mut header = vec!["f_ghz".to_owned()];
    let mut columns = Vec::new();
    for &p in &PSD_POWERS {
        header.push(format!("psd_w_per_hz_p{}", mw(p)));
        columns.push(ring_pam_psd(p, t_s, dc, &grid)?);
    }
    header.push("psd_w_per_hz_p10mw_linear".to_owned());
    columns.push(ring_pam_psd(0.01, t_s, &linear, &grid)?);
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new("fig6", &refs);
    for (k, f) in columns[0].freqs.iter().enumerate() {
        let mut row: Vec<Cell> = vec![(f * 1e-9).into()];
        row.extend(columns.iter().map(|c| Cell::Num(c.density[k])));
        table.push(row);
    }
    Ok(table)
}

/// Launch powers of the capacity figures, dBm.
pub fn capacity_grid_dbm() -> Vec<f64> {
    linspace(-10.0, 60.0, 281)
}

/// Capacity bounds at `W = B` with the practical-relevance threshold.
pub fn fig7(dc: &DerivedConstants) -> Result<Table> {
    let w = dc.params.b;
    let thr = watts_to_dbm(power_threshold(dc, DEFAULT_POWER_FRACTION)?);
    let mut table = Table::new(
        "fig7",
        &["p_dbm", "shannon_bpshz", "upper1_bpshz", "upper2_bpshz", "eta_bpshz", "threshold_dbm"],
    );
    for p_dbm in capacity_grid_dbm() {
        let p = dbm_to_watts(p_dbm);
        table.push(vec![
            p_dbm.into(),
            shannon_eta(w, p, dc.params.n0).into(),
            capacity_upper1(p, w, dc)?.into(),
            capacity_upper2(p, w, dc)?.into(),
            eta_bound(p, w, dc, DEFAULT_POWER_FRACTION)?.into(),
            thr.into(),
        ]);
    }
    Ok(table)
}

/// Capacity bounds when the noise bandwidth grows with `sqrt(P)`.
pub fn fig8(dc: &DerivedConstants) -> Result<Table> {
    let w = dc.params.b;
    let thr = watts_to_dbm(power_threshold(dc, DEFAULT_POWER_FRACTION)?);
    let grid = capacity_grid_dbm();
    let watts: Vec<f64> = grid.iter().map(|&d| dbm_to_watts(d)).collect();
    let pts = scaled_b_curve(&watts, w, dc, KAPPA_HAT)?;
    let mut table = Table::new(
        "fig8",
        &["p_dbm", "b_ghz", "rx_power_w", "shannon_bpshz", "upper1_bpshz", "upper2_bpshz", "threshold_dbm"],
    );
    for (d, q) in grid.iter().zip(&pts) {
        table.push(vec![
            (*d).into(),
            (q.b * 1e-9).into(),
            q.rx_power.into(),
            shannon_eta(w, q.p, dc.params.n0).into(),
            q.upper1.into(),
            q.upper2.into(),
            thr.into(),
        ]);
    }
    Ok(table)
}

/// Tables for figure `id`.
pub fn figure<R: TrialRunner>(id: u8, runner: &R, dc: &DerivedConstants, mc: McSettings) -> Result<Table> {
    match id {
        1 => Ok(fig1()),
        2 => Ok(fig2()),
        3 => fig3(dc),
        4 => fig4(runner, dc, mc),
        5 => fig5(runner, dc, mc),
        6 => fig6(dc),
        7 => fig7(dc),
        8 => fig8(dc),
        _ => bail!("no figure {id}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fiberacf_core::FiberParams;

    #[test]
    fn column_names() {
        assert_eq!(mw(0.01), "10mw");
        assert_eq!(ps(5.1e-12), "5p1ps");
        assert_eq!(ps(0.0), "0ps");
    }

    #[test]
    fn fig3_low_power_tracks_pulse() {
        let dc = FiberParams::reference().derive();
        let t = fig3(&dc).unwrap();
        assert_eq!(t.header.len(), 17);
        // t = 0, P = 10 mW, t' = 0: close to P + Kz.
        let Cell::Num(v) = t.rows[200][1] else { panic!() };
        assert!((v - 0.01).abs() < 0.01 * 0.1);
    }
}
