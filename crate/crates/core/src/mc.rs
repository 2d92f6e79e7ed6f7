//! Seeded Monte Carlo sampling of the channel's stochastic model.
//!
//! The output is `u(z,t) = (u0 + sqrt(K) w(z,t)) exp(j gamma int |u0 + sqrt(K) w|^2 dz')`,
//! where `w` is a complex Wiener process in distance. The phase integral is
//! a left-endpoint sum, which is the Ito reading of the model and keeps the
//! output power equal to `|u0 + sqrt(K) w(z)|^2` exactly.
//!
//! Each trial draws from its own ChaCha8 stream selected by the trial index,
//! so estimates do not depend on how trials are scheduled.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::params::{rho_complement, DerivedConstants};
use crate::special::{eval_hyperbolic, reduced_defects, sinc};
use crate::{Error, Result};

/// Executes independent trials and returns their results in trial order.
pub trait TrialRunner {
    /// Runs `f(0), ..., f(trials - 1)`.
    fn run<T, F>(&self, trials: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs trials one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl TrialRunner for Sequential {
    fn run<T, F>(&self, trials: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..trials).map(f).collect()
    }
}

/// Random stream for one trial of a seeded experiment.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform draw on `[0, 1)`.
pub fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn normal<R: RngCore>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Sample mean of complex trial outcomes with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Sample mean.
    pub mean: Complex64,
    /// `sqrt(sum |x - mean|^2 / (n - 1)) / sqrt(n)`.
    pub std_error: f64,
    /// Number of samples.
    pub trials: u64,
}

impl McEstimate {
    /// Summarises samples with compensated summation.
    pub fn from_samples(samples: &[Complex64]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::Domain { what: "trials", value: n as f64 });
        }
        let mut re = NeumaierSum::default();
        let mut im = NeumaierSum::default();
        for s in samples {
            re.add(s.re);
            im.add(s.im);
        }
        let mean = Complex64::new(re.total(), im.total()) / n as f64;
        let mut ss = NeumaierSum::default();
        for s in samples {
            ss.add((s - mean).norm_sqr());
        }
        let var = ss.total() / (n - 1) as f64;
        Ok(McEstimate {
            mean,
            std_error: libm::sqrt(var / n as f64),
            trials: n as u64,
        })
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn agrees_with(&self, value: Complex64, k: f64) -> bool {
        (self.mean - value).norm() <= k * self.std_error
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Two complex Wiener paths in distance with increment correlation `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPairPath {
    /// Number of distance steps.
    pub steps: usize,
    /// Step length, m.
    pub dz: f64,
    /// `W(z_i, t)` for `i = 0..=steps`, starting at zero.
    pub w_t: Vec<Complex64>,
    /// `W(z_i, t')`, same grid.
    pub w_tp: Vec<Complex64>,
    /// Increment correlation.
    pub rho: f64,
}

fn complex_increment<R: RngCore>(rng: &mut R, sd: f64) -> Complex64 {
    let re = normal(rng);
    let im = normal(rng);
    Complex64::new(re, im) * sd
}

/// Samples a correlated path pair over `[0, z]`.
///
/// Each component has `E|dW|^2 = dz`; the second path's increments are
/// `rho dW + sqrt(1 - rho^2) dW~` with `dW~` independent.
pub fn sample_wiener_pair<R: RngCore>(rho: f64, steps: usize, z: f64, rng: &mut R) -> Result<WienerPairPath> {
    if steps == 0 {
        return Err(Error::Domain { what: "steps", value: 0.0 });
    }
    let comp = rho_complement(rho)?;
    let dz = z / steps as f64;
    let sd = libm::sqrt(0.5 * dz);
    let mut w_t = Vec::with_capacity(steps + 1);
    let mut w_tp = Vec::with_capacity(steps + 1);
    let mut a = Complex64::new(0.0, 0.0);
    let mut b = a;
    w_t.push(a);
    w_tp.push(b);
    for _ in 0..steps {
        let d = complex_increment(rng, sd);
        let e = complex_increment(rng, sd);
        a += d;
        b += d * rho + e * comp;
        w_t.push(a);
        w_tp.push(b);
    }
    Ok(WienerPairPath { steps, dz, w_t, w_tp, rho })
}

/// Samples a single complex Wiener path, `W(z_i)` for `i = 0..=steps`.
pub fn sample_wiener_path<R: RngCore>(steps: usize, z: f64, rng: &mut R) -> Result<Vec<Complex64>> {
    if steps == 0 {
        return Err(Error::Domain { what: "steps", value: 0.0 });
    }
    let sd = libm::sqrt(0.5 * z / steps as f64);
    let mut w = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(w);
    for _ in 0..steps {
        w += complex_increment(rng, sd);
        out.push(w);
    }
    Ok(out)
}

/// Output of the channel for input `u0` driven by the path `w` with step `dz`.
pub fn propagate(u0: Complex64, w: &[Complex64], dz: f64, dc: &DerivedConstants) -> Complex64 {
    let sk = libm::sqrt(dc.k);
    let last = w.len() - 1;
    let mut phase = 0.0;
    for wi in &w[..last] {
        phase += (u0 + wi * sk).norm_sqr();
    }
    phase *= dc.params.gamma * dz;
    (u0 + w[last] * sk) * Complex64::new(0.0, phase).exp()
}

/// Outputs at `t` and `t'` for inputs `u0`, `u0p` driven by one path pair.
pub fn propagate_pair_sample(
    u0: Complex64,
    u0p: Complex64,
    path: &WienerPairPath,
    dc: &DerivedConstants,
) -> Result<(Complex64, Complex64)> {
    let z = dc.params.z;
    if (path.dz * path.steps as f64 - z).abs() > 1e-12 * z {
        return Err(Error::Inconsistent("path length differs from fiber length"));
    }
    Ok((
        propagate(u0, &path.w_t, path.dz, dc),
        propagate(u0p, &path.w_tp, path.dz, dc),
    ))
}

fn check_trials(trials: u64, steps: usize) -> Result<()> {
    if trials < 2 {
        return Err(Error::Domain { what: "trials", value: trials as f64 });
    }
    if steps == 0 {
        return Err(Error::Domain { what: "steps", value: 0.0 });
    }
    Ok(())
}

/// One trial of [`mc_acf`]: the product `u(z,t) u*(z,t')`.
pub fn acf_trial(
    u0: Complex64,
    u0p: Complex64,
    rho: f64,
    dc: &DerivedConstants,
    steps: usize,
    seed: u64,
    trial: u64,
) -> Result<Complex64> {
    let mut rng = trial_rng(seed, trial);
    let path = sample_wiener_pair(rho, steps, dc.params.z, &mut rng)?;
    let (a, b) = propagate_pair_sample(u0, u0p, &path, dc)?;
    Ok(a * b.conj())
}

/// Monte Carlo estimate of the autocorrelation, using `runner` for the trials.
#[allow(clippy::too_many_arguments)]
pub fn mc_acf_with<R: TrialRunner>(
    runner: &R,
    u0: Complex64,
    u0p: Complex64,
    rho: f64,
    dc: &DerivedConstants,
    trials: u64,
    steps: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_trials(trials, steps)?;
    rho_complement(rho)?;
    let samples: Result<Vec<_>> = runner
        .run(trials, |i| acf_trial(u0, u0p, rho, dc, steps, seed, i))
        .into_iter()
        .collect();
    McEstimate::from_samples(&samples?)
}

/// Sequential Monte Carlo estimate of the autocorrelation.
pub fn mc_acf(
    u0: Complex64,
    u0p: Complex64,
    rho: f64,
    dc: &DerivedConstants,
    trials: u64,
    steps: usize,
    seed: u64,
) -> Result<McEstimate> {
    mc_acf_with(&Sequential, u0, u0p, rho, dc, trials, steps, seed)
}

/// Standard errors allowed between estimates at `L` and `2L` steps.
pub const CONVERGENCE_SIGMAS: f64 = 3.0;

/// Stream offset for the refined run, so it is independent of the coarse one.
const REFINED_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Estimates of the same autocorrelation at `steps` and `2 steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDoubling {
    /// Estimate with `steps` distance steps.
    pub coarse: McEstimate,
    /// Estimate with twice as many steps, from an independent stream.
    pub fine: McEstimate,
    /// Steps of the coarse run.
    pub steps: usize,
}

impl StepDoubling {
    /// `sqrt(se_coarse^2 + se_fine^2)`.
    pub fn combined_std_error(&self) -> f64 {
        libm::hypot(self.coarse.std_error, self.fine.std_error)
    }

    /// `|coarse - fine|` in units of the combined standard error.
    pub fn sigmas(&self) -> f64 {
        let d = (self.coarse.mean - self.fine.mean).norm();
        if d == 0.0 {
            0.0
        } else {
            d / self.combined_std_error()
        }
    }

    /// Whether the two estimates agree within [`CONVERGENCE_SIGMAS`].
    pub fn converged(&self) -> bool {
        self.sigmas() <= CONVERGENCE_SIGMAS
    }
}

/// Runs [`mc_acf_with`] at `steps` and `2 steps`.
#[allow(clippy::too_many_arguments)]
pub fn step_doubling_check<R: TrialRunner>(
    runner: &R,
    u0: Complex64,
    u0p: Complex64,
    rho: f64,
    dc: &DerivedConstants,
    trials: u64,
    steps: usize,
    seed: u64,
) -> Result<StepDoubling> {
    let coarse = mc_acf_with(runner, u0, u0p, rho, dc, trials, steps, seed)?;
    let fine = mc_acf_with(runner, u0, u0p, rho, dc, trials, 2 * steps, seed ^ REFINED_SEED_SALT)?;
    Ok(StepDoubling { coarse, fine, steps })
}

/// Monte Carlo autocorrelation that doubles the step count until a
/// [`step_doubling_check`] passes or `max_steps` is reached. Returns the
/// finer estimate of the last comparison and its step count.
#[allow(clippy::too_many_arguments)]
pub fn mc_acf_converged<R: TrialRunner>(
    runner: &R,
    u0: Complex64,
    u0p: Complex64,
    rho: f64,
    dc: &DerivedConstants,
    trials: u64,
    steps: usize,
    max_steps: usize,
    seed: u64,
) -> Result<(McEstimate, usize)> {
    let mut l = steps;
    loop {
        let check = step_doubling_check(runner, u0, u0p, rho, dc, trials, l, seed)?;
        if check.converged() || 4 * l > max_steps {
            return Ok((check.fine, 2 * l));
        }
        l *= 2;
    }
}

/// Closed form of `E[exp(a W(z) + b int W - c int W^2)]` for a real standard
/// Wiener process on `[0, z]`.
pub fn mecozzi_analytic(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Complex64 {
    let p = eval_hyperbolic(c, z);
    let (ds, dt) = reduced_defects(c, z);
    let exponent = a * a * 0.5 * p.t + a * b * (z * z) * ds + b * b * (0.5 * z * z * z) * dt;
    p.s.sqrt() * exponent.exp()
}

/// One sample of the Wiener functional, integrals by the trapezoid rule.
fn mecozzi_trial(a: Complex64, b: Complex64, c: Complex64, z: f64, steps: usize, seed: u64, trial: u64) -> Complex64 {
    let mut rng = trial_rng(seed, trial);
    let dz = z / steps as f64;
    let sd = libm::sqrt(dz);
    let mut w = 0.0f64;
    let mut int_w = 0.0;
    let mut int_w2 = 0.0;
    for _ in 0..steps {
        let next = w + sd * normal(&mut rng);
        int_w += 0.5 * (w + next);
        int_w2 += 0.5 * (w * w + next * next);
        w = next;
    }
    (a * w + b * (int_w * dz) - c * (int_w2 * dz)).exp()
}

/// Monte Carlo and closed-form values of the Wiener functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MecozziCheck {
    /// Sample estimate.
    pub mc: McEstimate,
    /// Closed form.
    pub analytic: Complex64,
}

/// Compares [`mecozzi_analytic`] with a Monte Carlo estimate.
#[allow(clippy::too_many_arguments)]
pub fn mecozzi_identity_check<R: TrialRunner>(
    runner: &R,
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: f64,
    trials: u64,
    steps: usize,
    seed: u64,
) -> Result<MecozziCheck> {
    check_trials(trials, steps)?;
    let samples = runner.run(trials, |i| mecozzi_trial(a, b, c, z, steps, seed, i));
    Ok(MecozziCheck {
        mc: McEstimate::from_samples(&samples)?,
        analytic: mecozzi_analytic(a, b, c, z),
    })
}

/// `E[u(z)^m]` for white noise, `u0^m E_m S^{m+1}` with `c = -j gamma m K / 2`.
pub fn analytic_moment(u0: Complex64, m: u32, dc: &DerivedConstants) -> Complex64 {
    let gamma = dc.params.gamma;
    let mf = m as f64;
    let p = eval_hyperbolic(Complex64::new(0.0, -0.5 * gamma * mf * dc.k), dc.params.z);
    let em = (Complex64::i() * gamma * mf * u0.norm_sqr() * p.t).exp();
    u0.powu(m) * em * p.s.powu(m + 1)
}

/// Monte Carlo estimate of `E[u(z)^m]`.
#[allow(clippy::too_many_arguments)]
pub fn mc_moment<R: TrialRunner>(
    runner: &R,
    u0: Complex64,
    m: u32,
    dc: &DerivedConstants,
    trials: u64,
    steps: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_trials(trials, steps)?;
    let z = dc.params.z;
    let dz = z / steps as f64;
    let samples: Result<Vec<_>> = runner
        .run(trials, |i| {
            let mut rng = trial_rng(seed, i);
            let w = sample_wiener_path(steps, z, &mut rng)?;
            Ok(propagate(u0, &w, dz, dc).powu(m))
        })
        .into_iter()
        .collect();
    McEstimate::from_samples(&samples?)
}

/// Monte Carlo estimate of the time-averaged autocorrelation of
/// ring-modulated PAM with rectangular pulses of power `p` and period `t_s`.
///
/// Each trial draws `t` uniformly over a symbol, sets `t' = t - tau`, and
/// gives each symbol an independent uniform phase.
#[allow(clippy::too_many_arguments)]
pub fn mc_ring_time_avg<R: TrialRunner>(
    runner: &R,
    tau: f64,
    p: f64,
    t_s: f64,
    dc: &DerivedConstants,
    trials: u64,
    steps: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_trials(trials, steps)?;
    let r = sinc(dc.params.b * tau);
    let amp = libm::sqrt(p);
    let samples: Result<Vec<_>> = runner
        .run(trials, |i| {
            let mut rng = trial_rng(seed, i);
            let t = uniform(&mut rng) * t_s;
            let same = libm::floor(t / t_s) == libm::floor((t - tau) / t_s);
            let phi = 2.0 * PI * uniform(&mut rng);
            let phi_p = if same { phi } else { 2.0 * PI * uniform(&mut rng) };
            let path = sample_wiener_pair(r, steps, dc.params.z, &mut rng)?;
            let (a, b) = propagate_pair_sample(
                Complex64::from_polar(amp, phi),
                Complex64::from_polar(amp, phi_p),
                &path,
                dc,
            )?;
            Ok(a * b.conj())
        })
        .into_iter()
        .collect();
    McEstimate::from_samples(&samples?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::FiberParams;

    #[test]
    fn same_seed_same_path() {
        let a = sample_wiener_pair(0.3, 64, 1.0, &mut trial_rng(5, 2)).unwrap();
        let b = sample_wiener_pair(0.3, 64, 1.0, &mut trial_rng(5, 2)).unwrap();
        let c = sample_wiener_pair(0.3, 64, 1.0, &mut trial_rng(5, 3)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.w_t, c.w_t);
    }

    #[test]
    fn unit_correlation_gives_identical_paths() {
        let p = sample_wiener_pair(1.0, 32, 2.0, &mut trial_rng(1, 0)).unwrap();
        assert_eq!(p.w_t, p.w_tp);
    }

    #[test]
    fn output_power_equals_noisy_input_power() {
        let dc = FiberParams::reference().derive();
        let mut rng = trial_rng(9, 0);
        let path = sample_wiener_pair(0.5, 128, dc.params.z, &mut rng).unwrap();
        let u0 = Complex64::new(0.3, -0.1);
        let (u, _) = propagate_pair_sample(u0, u0, &path, &dc).unwrap();
        let want = (u0 + path.w_t[128] * libm::sqrt(dc.k)).norm_sqr();
        assert!((u.norm_sqr() - want).abs() <= 1e-14 * want);
    }

    #[test]
    fn path_length_must_match_fiber() {
        let dc = FiberParams::reference().derive();
        let path = sample_wiener_pair(0.5, 16, 1.0, &mut trial_rng(0, 0)).unwrap();
        let u = Complex64::new(0.1, 0.0);
        assert!(propagate_pair_sample(u, u, &path, &dc).is_err());
    }

    #[test]
    fn estimate_of_constant_samples() {
        let s = [Complex64::new(2.0, -1.0); 10];
        let e = McEstimate::from_samples(&s).unwrap();
        assert_eq!(e.mean, Complex64::new(2.0, -1.0));
        assert_eq!(e.std_error, 0.0);
        assert!(McEstimate::from_samples(&s[..1]).is_err());
    }

    #[test]
    fn uniform_is_in_unit_interval() {
        let mut rng = trial_rng(3, 0);
        for _ in 0..1000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }
}
