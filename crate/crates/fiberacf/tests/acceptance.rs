//! The acceptance criteria, one test each. Every test prints its checks and
//! a single `[PASS]`/`[FAIL] criterion N` line; run with `--nocapture` to see
//! them. Tests hold a shared lock so the measured runtimes are not inflated
//! by each other.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use anyhow::Result;
use fiberacf::config::Config;
use fiberacf::runner::RayonRunner;
use fiberacf::validate::{
    acf_identities, bound_dominance_checks, capacity_curves, concavity, demos, derived_constants, mc_acf_grid,
    mecozzi, psd_consistency, special_function_bounds, threshold, Check,
};
use fiberacf_core::units::watts_to_dbm;
use fiberacf_core::{DerivedConstants, FiberParams};

static SERIAL: Mutex<()> = Mutex::new(());

struct Setup {
    dc: DerivedConstants,
    runner: RayonRunner,
    seed: u64,
    steps: usize,
}

fn setup() -> Setup {
    let run = Config::reference().run;
    Setup {
        dc: FiberParams::reference().derive(),
        runner: RayonRunner::new(0).unwrap(),
        seed: run.seed,
        steps: run.steps,
    }
}

fn criterion(n: u32, title: &str, limit: Duration, body: impl FnOnce(&Setup) -> Result<Vec<Check>>) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let s = setup();
    let started = Instant::now();
    let checks = body(&s).unwrap();
    let elapsed = started.elapsed();
    for c in &checks {
        println!("    {c}");
    }
    let in_time = elapsed <= limit;
    let passed = in_time && checks.iter().all(|c| c.passed);
    println!(
        "[{}] criterion {n}: {title} ({:.3} s, limit {:.3} s{})",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs_f64(),
        if in_time { "" } else { ", too slow" },
    );
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.to_string()).collect();
    assert!(passed, "criterion {n} failed: {failed:?}, {elapsed:?}");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

#[test]
fn criterion_01_derived_constants() {
    criterion(1, "derived constants", Duration::from_millis(1), |_| {
        let dc = FiberParams::reference().derive();
        Ok(derived_constants(&dc))
    });
}

#[test]
fn criterion_02_special_function_bounds() {
    criterion(2, "special-function bounds", secs(5), |_| Ok(special_function_bounds(10_000)));
}

#[test]
fn criterion_03_closed_form_vs_monte_carlo() {
    let threads = setup().runner.threads();
    let limit = if threads >= 8 { secs(120) } else { secs(600) };
    criterion(3, "closed-form autocorrelation vs Monte Carlo", limit, |s| {
        mc_acf_grid(&s.runner, &s.dc, 10_000, 512, s.seed)
    });
}

#[test]
fn criterion_04_exact_identities() {
    criterion(4, "exact identities", secs(60), |s| acf_identities(&s.dc, 10_000, s.seed));
}

#[test]
fn criterion_05_wiener_functional_identity() {
    criterion(5, "Wiener functional identity", secs(180), |s| {
        mecozzi(&s.runner, 20, 100_000, s.steps, s.seed)
    });
}

#[test]
fn criterion_06_psd_consistency() {
    criterion(6, "PSD consistency", secs(10), |s| psd_consistency(&s.dc));
}

#[test]
fn criterion_07_bound_dominance() {
    criterion(7, "instantaneous bounds dominate filtered power", secs(120), |s| {
        bound_dominance_checks(&s.runner, 10_000, s.seed)
    });
}

#[test]
fn criterion_08_power_threshold() {
    criterion(8, "power threshold", secs(1), |s| {
        let w = threshold(&s.dc)?;
        let dbm = watts_to_dbm(w.measured);
        let d = Check::at_most("power threshold, |dBm - 42.7|", (dbm - 42.7).abs(), 0.1)
            .with_detail(format!("{dbm:.4} dBm"));
        Ok(vec![w, d])
    });
}

#[test]
fn criterion_09_capacity_curves() {
    criterion(9, "capacity curves", secs(10), |s| capacity_curves(&s.dc));
}

#[test]
fn criterion_10_demos() {
    criterion(10, "FSK and three-sample demos", secs(60), |s| demos(&s.runner, &s.dc, 10_000, s.seed));
}

#[test]
fn criterion_11_concavity() {
    criterion(11, "average-power bounds non-decreasing and concave", secs(10), |s| concavity(&s.dc));
}
