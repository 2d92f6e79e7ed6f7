//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fiberacf_core::acf::{acf_rect_isolated, AcfMode};
use fiberacf_core::bounds::{avg_power_bound, inst_power_bound, power_threshold, BoundRegime};
use fiberacf_core::capacity::{
    capacity_upper1, capacity_upper2, eta_bound, fsk_demo, fsk_rate_for_target, three_sample_demo,
    NoiseSharing, DEFAULT_POWER_FRACTION,
};
use fiberacf_core::spectrum::{ring_pam_psd, PsdGrid};
use fiberacf_core::units::{dbm_to_watts, parse_quantity, to_db, watts_to_dbm, Dimension};
use fiberacf_core::{DerivedConstants, Error as CoreError};

use crate::config::Config;
use crate::figures::{self, linspace, McSettings};
use crate::output::{Cell, RunManifest, Table};
use crate::runner::RayonRunner;
use crate::validate::{run_suite, SuiteOptions, FSK_DEFAULT, SUITES};

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "FIBERACF_SEED";

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const VALIDATION: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "fiberacf", version, about = "Autocorrelation, spectrum and capacity bounds for dispersion-free fiber with distributed amplification")]
pub struct Cli {
    /// TOML link description; the 2000 km reference link when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV output.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Monte Carlo seed (FIBERACF_SEED takes precedence).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Monte Carlo trials per estimate.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Data series of one figure.
    Fig {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=8))]
        id: u8,
    },
    /// Autocorrelation of an isolated rectangular pulse.
    Acf(AcfArgs),
    /// PSD of ring-modulated PAM.
    Psd(PsdArgs),
    /// Received-power bounds over a power sweep.
    Bounds(BoundsArgs),
    /// Capacity bounds over a power sweep.
    Capacity(SweepArgs),
    /// Capacity demonstrations.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Run a validation suite; exits with status 3 if any check fails.
    Validate {
        #[arg(value_parser = suite_name)]
        suite: String,
    },
}

fn suite_name(s: &str) -> Result<String, String> {
    if s == "all" || SUITES.contains(&s) {
        Ok(s.to_owned())
    } else {
        Err(format!("expected one of all, {}", SUITES.join(", ")))
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    /// Closed form.
    Exact,
    /// First order in the accumulated noise.
    Approx,
}

#[derive(Debug, Args)]
pub struct AcfArgs {
    /// Pulse power.
    #[arg(long, default_value = "100 mW")]
    pub power: String,
    /// Second observation times, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = ["0 ps".to_owned(), "5.1 ps".to_owned()])]
    pub tprime: Vec<String>,
    /// Start of the time axis.
    #[arg(long, default_value = "-20 ps", allow_hyphen_values = true)]
    pub t_min: String,
    /// End of the time axis.
    #[arg(long, default_value = "20 ps", allow_hyphen_values = true)]
    pub t_max: String,
    /// Samples on the time axis.
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Closed form or its low-noise approximation.
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
}

#[derive(Debug, Args)]
pub struct PsdArgs {
    /// Launch powers, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = ["10 mW", "50 mW", "100 mW", "500 mW", "1000 mW"].map(String::from))]
    pub power: Vec<String>,
    /// Also emit the linear-channel spectrum at each power.
    #[arg(long)]
    pub linear: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Receiver bandwidth; the noise bandwidth when omitted.
    #[arg(long)]
    pub w: Option<String>,
    /// Lowest launch power, dBm.
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub p_min_dbm: f64,
    /// Highest launch power, dBm.
    #[arg(long, default_value_t = 60.0)]
    pub p_max_dbm: f64,
    /// Powers in the sweep.
    #[arg(long, default_value_t = 281)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundKind {
    /// Input with constant instantaneous power.
    Inst,
    /// Any input with the given average power.
    Avg,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Which input class to bound.
    #[arg(long, value_enum, default_value_t = BoundKind::Avg)]
    pub kind: BoundKind,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Sharing {
    /// One noise value for all three.
    Identical,
    /// Jointly Gaussian with the in-line noise correlation.
    Correlated,
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// Three-sample estimate of x^2; sweeps the sample spacing unless given.
    ThreeSample {
        /// Symbol amplitude, sqrt(J).
        #[arg(long, default_value_t = 1e-6)]
        x: f64,
        /// Spacing of the three samples, e.g. "2 fs".
        #[arg(long)]
        t_small: Option<String>,
        /// Noise seen by the three samples.
        #[arg(long, value_enum, default_value_t = Sharing::Correlated)]
        sharing: Sharing,
    },
    /// Intensity-modulated inputs turned into tones by the nonlinearity.
    Fsk {
        /// Number of symbols.
        #[arg(long, default_value_t = FSK_DEFAULT.0)]
        m: usize,
        /// Half the amplitude spacing.
        #[arg(long, default_value_t = FSK_DEFAULT.1)]
        delta: f64,
        /// Symbol period in normalised time, at most one.
        #[arg(long, default_value_t = FSK_DEFAULT.2)]
        ts: f64,
        /// Target error probability for the rate sweep.
        #[arg(long, default_value_t = 1e-6)]
        target_pe: f64,
    },
}

/// A failure carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

fn usage(error: anyhow::Error) -> Failure {
    Failure { code: exit::USAGE, error }
}

fn config_error(error: anyhow::Error) -> Failure {
    Failure { code: exit::CONFIG, error }
}

fn quantity(s: &str, dim: Dimension) -> Result<f64, Failure> {
    parse_quantity(s, dim).map_err(|e| usage(anyhow!("{s:?}: {e}")))
}

/// Everything a command needs after flags and configuration are resolved.
struct RunContext {
    config: Config,
    dc: DerivedConstants,
    seed: u64,
    trials: u64,
    runner: RayonRunner,
    out: PathBuf,
}

fn resolve_seed(flag: Option<u64>, config: &Config) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(anyhow!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(flag.unwrap_or(config.run.seed)),
        Err(e) => Err(usage(anyhow!("{SEED_ENV}: {e}"))),
    }
}

fn prepare(cli: &Cli) -> Result<RunContext, Failure> {
    let config = match &cli.config {
        Some(p) => Config::load(p).map_err(config_error)?,
        None => Config::reference(),
    };
    let dc = config.params().map_err(config_error)?.derive();
    let seed = resolve_seed(cli.seed, &config)?;
    let trials = cli.trials.unwrap_or(config.run.trials);
    if trials < 2 {
        return Err(usage(anyhow!("--trials must be at least 2")));
    }
    let runner = RayonRunner::new(cli.threads).map_err(usage)?;
    Ok(RunContext {
        config,
        dc,
        seed,
        trials,
        runner,
        out: cli.out.clone(),
    })
}

fn sweep_grid(s: &SweepArgs) -> Result<Vec<f64>, Failure> {
    if s.points < 2 || !(s.p_max_dbm > s.p_min_dbm) {
        return Err(usage(anyhow!("need at least two points and p_max_dbm > p_min_dbm")));
    }
    Ok(linspace(s.p_min_dbm, s.p_max_dbm, s.points))
}

fn receiver_bandwidth(s: &SweepArgs, dc: &DerivedConstants) -> Result<f64, Failure> {
    match &s.w {
        Some(w) => quantity(w, Dimension::Frequency),
        None => Ok(dc.params.b),
    }
}

fn core_err(e: CoreError) -> Failure {
    usage(e.into())
}

fn acf_table(a: &AcfArgs, ctx: &RunContext) -> Result<Table, Failure> {
    let p = quantity(&a.power, Dimension::Power)?;
    let t_min = quantity(&a.t_min, Dimension::Time)?;
    let t_max = quantity(&a.t_max, Dimension::Time)?;
    if a.points < 2 || !(t_max > t_min) {
        return Err(usage(anyhow!("need at least two points and t_max > t_min")));
    }
    let tps = a
        .tprime
        .iter()
        .map(|s| quantity(s, Dimension::Time))
        .collect::<Result<Vec<_>, _>>()?;
    let t_s = ctx.dc.params.symbol_period().map_err(core_err)?;
    let mode = match a.mode {
        Mode::Exact => AcfMode::Exact,
        Mode::Approx => AcfMode::Approx,
    };
    let mut table = Table::new("acf", &["t_ps", "tprime_ps", "re_w", "im_w", "abs_db"]);
    for &tp in &tps {
        for t in linspace(t_min, t_max, a.points) {
            let v = acf_rect_isolated(t, tp, p, t_s, &ctx.dc, mode).map_err(core_err)?.value;
            table.push(vec![
                (t * 1e12).into(),
                (tp * 1e12).into(),
                v.re.into(),
                v.im.into(),
                to_db(v.norm()).into(),
            ]);
        }
    }
    Ok(table)
}

fn psd_table(a: &PsdArgs, ctx: &RunContext) -> Result<Table, Failure> {
    let t_s = ctx.dc.params.symbol_period().map_err(core_err)?;
    let grid = PsdGrid::standard(ctx.dc.params.b, t_s);
    let mut links = vec![ctx.dc];
    if a.linear {
        links.push(ctx.dc.params.with_gamma(0.0).map_err(core_err)?.derive());
    }
    let mut table = Table::new("psd", &["p_dbm", "gamma_per_w_km", "f_ghz", "psd_dbw_per_hz", "psd_w_per_hz", "dc_line_w"]);
    for s in &a.power {
        let p = quantity(s, Dimension::Power)?;
        for dc in &links {
            let psd = ring_pam_psd(p, t_s, dc, &grid).map_err(core_err)?;
            for (f, d) in psd.freqs.iter().zip(&psd.density) {
                table.push(vec![
                    watts_to_dbm(p).into(),
                    (dc.params.gamma * 1e3).into(),
                    (f * 1e-9).into(),
                    // Rounding can leave tiny negative densities, which have no dB value.
                    (if *d > 0.0 { to_db(*d) } else { f64::NAN }).into(),
                    (*d).into(),
                    psd.dc_line.into(),
                ]);
            }
        }
    }
    Ok(table)
}

fn bounds_table(a: &BoundsArgs, ctx: &RunContext) -> Result<Table, Failure> {
    let w = receiver_bandwidth(&a.sweep, &ctx.dc)?;
    let regime = BoundRegime::classify(w, &ctx.dc).map_err(core_err)?;
    let mut table = Table::new(
        "bounds",
        &["p_dbm", "bound_w", "regime", "term_erf_w", "term_tail1_w", "term_tail2_w"],
    );
    for p_dbm in sweep_grid(&a.sweep)? {
        let p = dbm_to_watts(p_dbm);
        let r = match a.kind {
            BoundKind::Inst => inst_power_bound(p, &regime, &ctx.dc),
            BoundKind::Avg => avg_power_bound(p, &regime, &ctx.dc),
        }
        .map_err(|e| usage(anyhow!("{e} (W = {w:e} Hz, regime {})", regime.tag.label())))?;
        let mut row: Vec<Cell> = vec![p_dbm.into(), r.bound.into(), r.regime.tag.label().into()];
        row.extend(r.components.iter().map(|(_, v)| Cell::Num(*v)));
        table.push(row);
    }
    Ok(table)
}

fn capacity_table(a: &SweepArgs, ctx: &RunContext) -> Result<Table, Failure> {
    let dc = &ctx.dc;
    let w = receiver_bandwidth(a, dc)?;
    let thr = watts_to_dbm(power_threshold(dc, DEFAULT_POWER_FRACTION).map_err(core_err)?);
    let mut table = Table::new(
        "capacity",
        &["p_dbm", "upper1_bpshz", "upper2_bpshz", "eta_bpshz", "threshold_dbm"],
    );
    for p_dbm in sweep_grid(a)? {
        let p = dbm_to_watts(p_dbm);
        // The second bound needs W <= B; leave the cell empty otherwise.
        let upper2 = match capacity_upper2(p, w, dc) {
            Ok(v) => v,
            Err(CoreError::UnsupportedRegime) => f64::NAN,
            Err(e) => return Err(core_err(e)),
        };
        table.push(vec![
            p_dbm.into(),
            capacity_upper1(p, w, dc).map_err(core_err)?.into(),
            upper2.into(),
            eta_bound(p, w, dc, DEFAULT_POWER_FRACTION).map_err(core_err)?.into(),
            thr.into(),
        ]);
    }
    Ok(table)
}

fn demo_tables(d: &Demo, ctx: &RunContext) -> Result<Vec<Table>, Failure> {
    match d {
        Demo::ThreeSample { x, t_small, sharing } => {
            let b = ctx.dc.params.b;
            let spacings = match t_small {
                Some(s) => vec![quantity(s, Dimension::Time)?],
                None => [1e-1, 1e-2, 1e-3, 1e-4].iter().map(|k| k / b).collect(),
            };
            let sharing = match sharing {
                Sharing::Identical => NoiseSharing::Identical,
                Sharing::Correlated => NoiseSharing::Correlated,
            };
            let mut table = Table::new(
                "three_sample",
                &["t_small_s", "x2_j", "mean_j", "std_error_j", "rms_error_j", "relative_bias"],
            );
            for t in spacings {
                let e = three_sample_demo(&ctx.runner, *x, t, &ctx.dc, ctx.trials, ctx.seed, sharing)
                    .map_err(core_err)?;
                table.push(vec![
                    t.into(),
                    e.x2.into(),
                    e.estimate.mean.re.into(),
                    e.estimate.std_error.into(),
                    e.rms_error.into(),
                    e.relative_bias().into(),
                ]);
            }
            Ok(vec![table])
        }
        Demo::Fsk { m, delta, ts, target_pe } => {
            let r = fsk_demo(*m, *delta, *ts, 1.0).map_err(core_err)?;
            let mut gram = Table::new("fsk_gram", &["l", "m", "x_l", "x_m", "re", "im", "abs"]);
            for (l, xl) in r.symbols.iter().enumerate() {
                for (k, xk) in r.symbols.iter().enumerate() {
                    let v = r.gram[l * m + k];
                    gram.push(vec![
                        (l as f64).into(),
                        (k as f64).into(),
                        (*xl).into(),
                        (*xk).into(),
                        v.re.into(),
                        v.im.into(),
                        v.norm().into(),
                    ]);
                }
            }
            let mut rate = Table::new("fsk_rate", &["p_over_n0", "rate_bits_per_time"]);
            for i in 0..=40 {
                let p = 10f64.powf(i as f64 / 8.0);
                rate.push(vec![p.into(), fsk_rate_for_target(p, *ts, 1.0, *target_pe).into()]);
            }
            Ok(vec![gram, rate])
        }
    }
}

fn write_outputs(tables: &[Table], ctx: &RunContext, started: Instant, args: &[OsString]) -> Result<()> {
    std::fs::create_dir_all(&ctx.out).with_context(|| format!("cannot create {}", ctx.out.display()))?;
    let mut outputs = Vec::new();
    for t in tables {
        let path = t.write(&ctx.out)?;
        outputs.push(file_name(&path));
        println!("wrote {}", path.display());
    }
    let manifest = RunManifest {
        command_line: args.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
        config_digest: ctx.config.digest(),
        seed: ctx.seed,
        code_version: env!("CARGO_PKG_VERSION").to_owned(),
        outputs,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    manifest.write(&ctx.out)?;
    Ok(())
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}

fn execute(cli: &Cli, args: &[OsString]) -> Result<(), Failure> {
    let started = Instant::now();
    let ctx = prepare(cli)?;
    let mc = McSettings {
        trials: ctx.trials,
        steps: ctx.config.run.steps,
        seed: ctx.seed,
    };
    let tables = match &cli.command {
        Command::Fig { id } => vec![figures::figure(*id, &ctx.runner, &ctx.dc, mc).map_err(usage)?],
        Command::Acf(a) => vec![acf_table(a, &ctx)?],
        Command::Psd(a) => vec![psd_table(a, &ctx)?],
        Command::Bounds(a) => vec![bounds_table(a, &ctx)?],
        Command::Capacity(a) => vec![capacity_table(a, &ctx)?],
        Command::Demo { which } => demo_tables(which, &ctx)?,
        Command::Validate { suite } => return validate(suite, cli, &ctx),
    };
    write_outputs(&tables, &ctx, started, args).map_err(usage)
}

fn validate(suite: &str, cli: &Cli, ctx: &RunContext) -> Result<(), Failure> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let opt = SuiteOptions {
        trials: cli.trials,
        steps: ctx.config.run.steps,
        seed: ctx.seed,
    };
    let mut ok = true;
    for name in names {
        let started = Instant::now();
        let report = run_suite(name, &ctx.runner, &ctx.dc, opt).map_err(usage)?;
        println!("{report} in {:.2} s", started.elapsed().as_secs_f64());
        ok &= report.passed();
    }
    if ok {
        Ok(())
    } else {
        Err(Failure {
            code: exit::VALIDATION,
            error: anyhow!("validation failed"),
        })
    }
}

/// Parses `args` (program name first), runs the command, and returns the exit status.
pub fn run(args: Vec<OsString>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match execute(&cli, &args) {
        Ok(()) => exit::OK,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            f.code
        }
    }
}
