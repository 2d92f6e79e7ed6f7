use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fiberacf::config::Config;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fiberacf"));
    c.env_remove("FIBERACF_SEED");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().arg("--out").arg(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_owned()
}

/// Reference link with a short Monte Carlo step count, written to `dir`.
fn quick_config(dir: &Path) -> String {
    let mut c = Config::reference();
    c.run.steps = 16;
    let path = dir.join("quick.toml");
    fs::write(&path, c.to_toml()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&bin().arg("--help").output().unwrap()), 0);
    assert_eq!(code(&bin().arg("--version").output().unwrap()), 0);
}

#[test]
fn usage_errors_exit_one() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&run(d.path(), &["fig", "9"])), 1);
    assert_eq!(code(&run(d.path(), &["fig", "1", "--bogus"])), 1);
    assert_eq!(code(&run(d.path(), &["acf", "--power", "3 furlongs"])), 1);
    assert_eq!(code(&run(d.path(), &["validate", "nonsense"])), 1);
    // No average-power bound for receivers wider than the noise bandwidth.
    assert_eq!(code(&run(d.path(), &["bounds", "--w", "1 THz", "--kind", "avg"])), 1);
}

#[test]
fn config_errors_exit_two() {
    let d = TempDir::new().unwrap();
    let missing = d.path().join("absent.toml");
    assert_eq!(code(&run(d.path(), &["--config", missing.to_str().unwrap(), "fig", "1"])), 2);

    let unknown = d.path().join("unknown.toml");
    fs::write(&unknown, Config::reference().to_toml() + "\n[extra]\nx = 1\n").unwrap();
    assert_eq!(code(&run(d.path(), &["--config", unknown.to_str().unwrap(), "fig", "1"])), 2);

    let mut bad = Config::reference();
    bad.fiber.length_km = -5.0;
    let negative = d.path().join("negative.toml");
    fs::write(&negative, bad.to_toml()).unwrap();
    assert_eq!(code(&run(d.path(), &["--config", negative.to_str().unwrap(), "fig", "1"])), 2);
}

#[test]
fn figure_writes_csv_and_manifest() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["fig", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = d.path().join("fig7.csv");
    assert_eq!(
        header(&csv),
        "p_dbm,shannon_bpshz,upper1_bpshz,upper2_bpshz,eta_bpshz,threshold_dbm"
    );
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 282);
    let manifest = fs::read_to_string(d.path().join("fig7.manifest.toml")).unwrap();
    let m: toml::Table = manifest.parse().unwrap();
    assert_eq!(m["seed"].as_integer(), Some(42));
    assert_eq!(m["config_digest"].as_str().unwrap(), Config::reference().digest());
    assert!(m["outputs"].as_array().unwrap().iter().any(|v| v.as_str() == Some("fig7.csv")));
}

#[test]
fn subcommand_csv_headers() {
    let d = TempDir::new().unwrap();
    let cases: [(&[&str], &str, &str); 4] = [
        (&["acf", "--points", "11"], "acf.csv", "t_ps,tprime_ps,re_w,im_w,abs_db"),
        (&["psd", "--power", "100 mW"], "psd.csv", "p_dbm,gamma_per_w_km,f_ghz,psd_dbw_per_hz,psd_w_per_hz,dc_line_w"),
        (
            &["bounds", "--points", "5", "--kind", "inst"],
            "bounds.csv",
            "p_dbm,bound_w,regime,term_erf_w,term_tail1_w,term_tail2_w",
        ),
        (
            &["capacity", "--points", "5"],
            "capacity.csv",
            "p_dbm,upper1_bpshz,upper2_bpshz,eta_bpshz,threshold_dbm",
        ),
    ];
    for (args, file, want) in cases {
        let o = run(d.path(), args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(header(&d.path().join(file)), want);
    }
}

#[test]
fn acf_at_zero_lag_is_total_power() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["acf", "--power", "100 mW", "--tprime", "0 ps", "--points", "3", "--t-min", "-1 ps", "--t-max", "1 ps"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(d.path().join("acf.csv")).unwrap();
    let row: Vec<f64> = text.lines().nth(2).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 0.0);
    let kz = fiberacf_core::FiberParams::reference().derive().kz();
    assert!((row[2] - (0.1 + kz)).abs() < 1e-12, "{row:?}");
}

#[test]
fn monte_carlo_output_independent_of_threads() {
    let d = TempDir::new().unwrap();
    let cfg = quick_config(d.path());
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = d.path().join(format!("t{threads}"));
        let o = bin()
            .args(["--config", &cfg, "--trials", "50", "--threads", threads, "--out"])
            .arg(&out)
            .args(["fig", "4"])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(fs::read(out.join("fig4.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn seed_environment_variable_wins() {
    let d = TempDir::new().unwrap();
    let cfg = quick_config(d.path());
    let go = |name: &str, seed_flag: &str, env: Option<&str>| {
        let out = d.path().join(name);
        let mut c = bin();
        if let Some(e) = env {
            c.env("FIBERACF_SEED", e);
        }
        let o = c
            .args(["--config", &cfg, "--trials", "50", "--seed", seed_flag, "--out"])
            .arg(&out)
            .args(["fig", "4"])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        fs::read(out.join("fig4.csv")).unwrap()
    };
    let flag5 = go("a", "5", None);
    let env5 = go("b", "6", Some("5"));
    let flag6 = go("c", "6", None);
    assert_eq!(flag5, env5);
    assert_ne!(flag5, flag6);
}

#[test]
fn validation_exit_codes() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["validate", "special"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("[PASS]"));
    // The FSK construction's tones are not orthogonal, so this suite fails.
    let o = run(d.path(), &["--trials", "200", "validate", "demos"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("[FAIL] FSK largest off-diagonal"));
}

#[test]
fn demos_write_tables() {
    let d = TempDir::new().unwrap();
    let o = run(d.path(), &["--trials", "200", "demo", "fsk"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.path().join("fsk_gram.csv").exists());
    assert!(d.path().join("fsk_rate.csv").exists());
    let o = run(d.path(), &["--trials", "200", "demo", "three-sample"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.path().join("three_sample.csv").exists());
}
