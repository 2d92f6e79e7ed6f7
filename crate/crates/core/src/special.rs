//! Special functions: the hyperbolic pair `S(c)`, `T(c)`, error function,
//! exponentially scaled modified Bessel functions and `sinc`.

use core::f64::consts::{E, PI};

use num_complex::Complex64;

/// Below this `|2 c z^2|` the hyperbolic pair is summed from its Taylor series.
///
/// The series has radius `pi^2 / 4` in this variable, so 15 terms leave a
/// truncation error far below one ulp, while the closed form would lose
/// `~eps / |u|` of relative accuracy in the imaginary parts.
pub const SERIES_SWITCH: f64 = 0.05;

// sech(w) = sum SECH[k] w^(2k)
#[allow(clippy::excessive_precision)]
const SECH: [f64; 15] = [
    1.0,
    -5.000_000_000_000_000_00e-1,
    2.083_333_333_333_333_43e-1,
    -8.472_222_222_222_222_65e-2,
    3.435_019_841_269_841_56e-2,
    -1.392_223_324_514_991_17e-2,
    5.642_496_810_031_532_62e-3,
    -2.286_819_095_164_829_41e-3,
    9.268_129_273_774_218_74e-4,
    -3.756_231_338_525_944_86e-4,
    1.522_343_222_179_766_18e-4,
    -6.169_824_687_770_052_47e-5,
    2.500_535_760_945_924_87e-5,
    -1.013_428_972_157_202_67e-5,
    4.107_272_919_856_700_31e-6,
];

// tanh(w)/w = sum TANH_W[k] w^(2k)
#[allow(clippy::excessive_precision)]
const TANH_W: [f64; 15] = [
    1.0,
    -3.333_333_333_333_333_15e-1,
    1.333_333_333_333_333_31e-1,
    -5.396_825_396_825_397_08e-2,
    2.186_948_853_615_520_30e-2,
    -8.863_235_529_902_197_33e-3,
    3.592_128_036_572_481_14e-3,
    -1.455_834_387_051_318_33e-3,
    5.900_274_409_455_859_47e-4,
    -2.391_291_142_435_524_78e-4,
    9.691_537_956_929_450_95e-5,
    -3.927_832_388_331_683_27e-5,
    1.591_890_506_932_896_37e-5,
    -6.451_689_215_655_430_65e-6,
    2.614_771_151_290_754_65e-6,
];

fn horner(coef: &[f64], u: Complex64) -> Complex64 {
    coef.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
}

/// `S(c) = sech(sqrt(2c) z)` and `T(c) = tanh(sqrt(2c) z) / sqrt(2c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicPair {
    /// `S(c)`, dimensionless.
    pub s: Complex64,
    /// `T(c)`, in the units of `z`.
    pub t: Complex64,
}

impl HyperbolicPair {
    /// Real part of `S`.
    pub fn s_r(&self) -> f64 {
        self.s.re
    }
    /// Imaginary part of `S`.
    pub fn s_i(&self) -> f64 {
        self.s.im
    }
    /// Real part of `T`.
    pub fn t_r(&self) -> f64 {
        self.t.re
    }
    /// Imaginary part of `T`.
    pub fn t_i(&self) -> f64 {
        self.t.im
    }
}

/// Evaluates `S(c)` and `T(c)` over a length `z`.
///
/// Both functions are even in `sqrt(2c)`, so no branch choice is involved.
/// Small arguments use the Taylor series in `u = 2 c z^2`, which needs no
/// square root at all; `c = 0` gives `S = 1`, `T = z` exactly.
pub fn eval_hyperbolic(c: Complex64, z: f64) -> HyperbolicPair {
    let u = c * (2.0 * z * z);
    if u.norm() < SERIES_SWITCH {
        return HyperbolicPair {
            s: horner(&SECH, u),
            t: horner(&TANH_W, u) * z,
        };
    }
    eval_with_root((c * 2.0).sqrt(), z)
}

/// Closed-form evaluation from an explicit root `r` with `r^2 = 2c`.
///
/// Either sign of `r` is accepted; the two signs take different arithmetic
/// paths and agree to rounding.
pub fn eval_with_root(r: Complex64, z: f64) -> HyperbolicPair {
    let w = r * z;
    if w.norm() == 0.0 {
        return HyperbolicPair {
            s: Complex64::new(1.0, 0.0),
            t: Complex64::new(z, 0.0),
        };
    }
    // Exponentials of -|Re w| only, so large arguments cannot overflow.
    let (sech, tanh) = if w.re >= 0.0 {
        let e = (-2.0 * w).exp();
        ((-w).exp() * 2.0 / (1.0 + e), (1.0 - e) / (1.0 + e))
    } else {
        let e = (2.0 * w).exp();
        (w.exp() * 2.0 / (1.0 + e), (e - 1.0) / (1.0 + e))
    };
    HyperbolicPair {
        s: sech,
        t: tanh / r,
    }
}

/// `(1 - S)/u` and `(1 - T/z)/u` with `u = 2 c z^2`, finite at `c = 0`.
pub fn reduced_defects(c: Complex64, z: f64) -> (Complex64, Complex64) {
    let u = c * (2.0 * z * z);
    if u.norm() < SERIES_SWITCH {
        let neg = |coef: &[f64]| -horner(&coef[1..], u);
        return (neg(&SECH), neg(&TANH_W));
    }
    let p = eval_hyperbolic(c, z);
    ((1.0 - p.s) / u, (1.0 - p.t / z) / u)
}

/// `sin(pi y)` with exact zeros at the integers.
pub fn sin_pi(y: f64) -> f64 {
    if !y.is_finite() {
        return f64::NAN;
    }
    // r in [-1, 1], sin(pi y) = sin(pi r)
    let r = y - 2.0 * libm::round(y / 2.0);
    let a = r.abs();
    let s = if a <= 0.25 {
        libm::sin(PI * a)
    } else if a <= 0.75 {
        libm::cos(PI * (0.5 - a))
    } else {
        libm::sin(PI * (1.0 - a))
    };
    if r < 0.0 {
        -s
    } else {
        s
    }
}

/// Normalised sinc, `sin(pi y)/(pi y)`.
pub fn sinc(y: f64) -> f64 {
    if y == 0.0 {
        1.0
    } else {
        sin_pi(y) / (PI * y)
    }
}

/// Error function of a real argument.
pub fn erf_real(y: f64) -> f64 {
    libm::erf(y)
}

/// Complementary error function of a real argument, accurate in the far tail.
pub fn erfc_real(y: f64) -> f64 {
    libm::erfc(y)
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc_real(x / core::f64::consts::SQRT_2)
}

/// `e^{-|y|} I_0(y)`.
pub fn bessel_i0e(y: f64) -> f64 {
    scaled_bessel(0, y.abs())
}

/// `e^{-|y|} I_1(y)`; odd in `y`.
pub fn bessel_i1e(y: f64) -> f64 {
    let v = scaled_bessel(1, y.abs());
    if y < 0.0 {
        -v
    } else {
        v
    }
}

const BESSEL_ASYMPTOTIC_FROM: f64 = 30.0;

fn scaled_bessel(n: u32, y: f64) -> f64 {
    if y.is_nan() {
        return f64::NAN;
    }
    if y < BESSEL_ASYMPTOTIC_FROM {
        // Power series; every term is positive, so no cancellation.
        let h = 0.5 * y;
        let mut term = if n == 0 { 1.0 } else { h };
        let mut sum = term;
        let mut k = 1.0;
        loop {
            term *= h * h / (k * (k + n as f64));
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
            k += 1.0;
        }
        return sum * libm::exp(-y);
    }
    if y.is_infinite() {
        return 0.0;
    }
    // Hankel expansion, truncated at its smallest term.
    let mu = 4.0 * (n * n) as f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kk = k as f64;
        let next = -term * (mu - (2.0 * kk - 1.0) * (2.0 * kk - 1.0)) / (8.0 * kk * y);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= sum.abs() * 1e-17 {
            break;
        }
    }
    sum / libm::sqrt(2.0 * PI * y)
}

/// One named inequality and its margin, `rhs - lhs`; non-negative means it holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundMargin {
    /// Short label of the inequality.
    pub name: &'static str,
    /// `rhs - lhs`.
    pub margin: f64,
    /// Magnitude of the compared quantities, for rounding slack.
    pub scale: f64,
}

impl BoundMargin {
    fn new(name: &'static str, lhs: f64, rhs: f64) -> Self {
        BoundMargin {
            name,
            margin: rhs - lhs,
            scale: lhs.abs().max(rhs.abs()),
        }
    }

    /// True when the inequality holds up to `rel` relative rounding slack.
    pub fn holds(&self, rel: f64) -> bool {
        self.margin >= -rel * self.scale
    }
}

/// The bounds on `S`, `T` along the negative imaginary axis `c = -j x / z^2`.
pub fn hyperbolic_bound_margins(x: f64, z: f64) -> [BoundMargin; 13] {
    let p = eval_hyperbolic(Complex64::new(0.0, -x / (z * z)), z);
    let (sr, si, tr, ti) = (p.s_r(), p.s_i(), p.t_r(), p.t_i());
    [
        BoundMargin::new("|S| <= 1", p.s.norm(), 1.0),
        BoundMargin::new("|T| <= z", p.t.norm(), z),
        BoundMargin::new("S_R >= -0.136", -0.136, sr),
        BoundMargin::new("S_R <= 1", sr, 1.0),
        BoundMargin::new("T_R >= 0", 0.0, tr),
        BoundMargin::new("T_R <= z", tr, z),
        BoundMargin::new("S_I >= -0.028", -0.028, si),
        BoundMargin::new("S_I <= x", si, x),
        BoundMargin::new("T_I >= 0", 0.0, ti),
        BoundMargin::new("T_I <= 2xz/3", ti, 2.0 * x * z / 3.0),
        BoundMargin::new(
            "|S| <= sqrt5 exp(-sqrt x)",
            p.s.norm(),
            libm::sqrt(5.0) * libm::exp(-libm::sqrt(x)),
        ),
        BoundMargin::new(
            "T_I >= z min(x, x^-1/2)/3",
            z / 3.0 * x.min(1.0 / libm::sqrt(x)),
            ti,
        ),
        BoundMargin::new("S_I^2/T_I <= 3x/(2z)", si * si / ti, 1.5 * x / z),
    ]
}

/// Elementary inequalities on `sinc` and `y e^{-a y}` used by the power bounds.
pub fn elementary_bound_margins(y: f64, a: f64) -> [BoundMargin; 5] {
    let s = sinc(y);
    let (abs_cap, sq_cap) = if y.abs() <= 1.0 {
        (1.0 - y * y, 1.0 - y * y)
    } else {
        (0.25, 0.05)
    };
    let ya = y.abs();
    [
        BoundMargin::new("|sinc| cap", s.abs(), abs_cap),
        BoundMargin::new("sinc^2 cap", s * s, sq_cap),
        BoundMargin::new("sinc^2 >= 1 - 4y^2", 1.0 - 4.0 * y * y, s * s),
        BoundMargin::new("y e^-ay <= 1/(ae)", ya * libm::exp(-a * ya), 1.0 / (a * E)),
        BoundMargin::new(
            "y e^-ay^2 <= 1/sqrt(2ae)",
            ya * libm::exp(-a * ya * ya),
            1.0 / libm::sqrt(2.0 * a * E),
        ),
    ]
}
