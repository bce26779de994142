//! Special functions used by the CGF closed forms.
//!
//! Everything here is double precision and total, except [`erfi`] which
//! refuses arguments whose result would overflow.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
/// sqrt(pi)
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Beyond this, erf is +-1 in double precision.
pub const ERF_SATURATION: f64 = 7.0;
/// Largest |x| accepted by [`erfi`].
pub const ERFI_GUARD: f64 = 25.0;
/// Switch between the Taylor series and the asymptotic Dawson expansion.
pub const ERFI_SEAM: f64 = 6.0;

/// Open interval (lo, hi) on which a function is finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalDomain {
    pub lo: f64,
    pub hi: f64,
}

impl EvalDomain {
    pub const REAL_LINE: EvalDomain = EvalDomain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::invalid(format!("empty domain ({lo}, {hi})")));
        }
        Ok(EvalDomain { lo, hi })
    }

    pub fn symmetric(r: f64) -> Self {
        EvalDomain { lo: -r, hi: r }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_nan() || self.hi.is_nan() || self.lo >= self.hi
    }

    pub fn intersect(&self, other: &EvalDomain) -> EvalDomain {
        EvalDomain {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }
}

/// `x * sum (2x^2)^n / (2n+1)!!`; every term is positive.
fn erf_kernel_series(x: f64) -> f64 {
    let x2 = 2.0 * x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= x2 / (2.0 * n + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

const CF_SWITCH: f64 = 0.9;

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    if ax > ERF_SATURATION {
        return x.signum();
    }
    if ax < CF_SWITCH {
        return FRAC_2_SQRT_PI * (-x * x).exp() * erf_kernel_series(x);
    }
    x.signum() * (1.0 - erfc_pos(ax))
}

fn erfc_pos(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < CF_SWITCH {
        1.0 - FRAC_2_SQRT_PI * (-x * x).exp() * erf_kernel_series(x)
    } else {
        (-x * x).exp() / (SQRT_PI * (x + laplace_cf_minus_z(x)))
    }
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= 0.0 {
        erfc_pos(x)
    } else {
        2.0 - erfc_pos(-x)
    }
}

/// Scaled complementary error function exp(x^2) erfc(x).
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x >= CF_SWITCH {
        1.0 / (SQRT_PI * (x + laplace_cf_minus_z(x)))
    } else if x >= 0.0 {
        (x * x).exp() - FRAC_2_SQRT_PI * erf_kernel_series(x)
    } else if x > -26.0 {
        2.0 * (x * x).exp() - erfcx(-x)
    } else {
        f64::INFINITY
    }
}

/// ln erfcx(x), finite for every real x.
pub fn ln_erfcx(x: f64) -> f64 {
    if x >= 0.0 {
        erfcx(x).ln()
    } else {
        x * x + (2.0 - erfc_pos(-x)).ln()
    }
}

/// 1/(sqrt(pi) erfcx(z)) - z for z >= 0; equals -(1/2) d/dz ln erfcx(z).
pub fn erfcx_tail(z: f64) -> f64 {
    if z >= CF_SWITCH {
        laplace_cf_minus_z(z)
    } else {
        1.0 / (SQRT_PI * erfcx(z)) - z
    }
}

/// K(z) - z evaluated without cancellation: (1/2)/(z + 1/(z + ...)).
fn laplace_cf_minus_z(z: f64) -> f64 {
    let tiny = 1e-300;
    // modified Lentz on b0 = 0, a_k = k/2, b_k = z
    let mut f = tiny;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..20_000 {
        let a = k as f64 / 2.0;
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 2e-16 {
            break;
        }
    }
    f
}

fn erfi_series(x: f64) -> f64 {
    // (2/sqrt(pi)) sum x^(2n+1) / (n! (2n+1))
    let x2 = x * x;
    let mut pow = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        pow *= x2 / n;
        let term = pow / (2.0 * n + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// sum_{k>=1} (2k-1)!!/(2x^2)^k, the tail of the Dawson asymptotic series.
fn dawson_asym_tail(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        let next = term * (2.0 * k - 1.0) * inv;
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * (1.0 + sum.abs()) {
            break;
        }
    }
    sum
}

/// Imaginary error function, |x| <= 25.
pub fn erfi(x: f64) -> Result<f64> {
    if x.is_nan() || x.abs() > ERFI_GUARD {
        return Err(Error::OverflowRange(x));
    }
    let ax = x.abs();
    if ax <= ERFI_SEAM {
        Ok(erfi_series(x))
    } else {
        Ok(FRAC_2_SQRT_PI * (x * x).exp() * dawson(x))
    }
}

/// Dawson's integral D(x) = exp(-x^2) int_0^x exp(t^2) dt.
pub fn dawson(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    if ax == 0.0 {
        return 0.0;
    }
    if ax <= ERFI_SEAM {
        0.5 * SQRT_PI * (-x * x).exp() * erfi_series(x)
    } else {
        (1.0 + dawson_asym_tail(ax)) / (2.0 * x)
    }
}

/// 1/(2 D(u)) - u for u > 0.
pub fn dawson_tail(u: f64) -> f64 {
    if u > ERFI_SEAM {
        let t = dawson_asym_tail(u);
        -u * t / (1.0 + t)
    } else {
        1.0 / (2.0 * dawson(u)) - u
    }
}

/// ln(sinh(x)/x), even, zero at the origin.
pub fn log_sinh_ratio(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-3 {
        let x2 = ax * ax;
        x2 / 6.0 - x2 * x2 / 180.0
    } else if ax < 1.0 {
        // sinh(x)/x - 1 = sum_{k>=1} x^{2k}/(2k+1)!
        let x2 = ax * ax;
        let mut term = 1.0;
        let mut sum = 0.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum.ln_1p()
    } else {
        ax - LN_2 + (-(-2.0 * ax).exp()).ln_1p() - ax.ln()
    }
}

/// d/dx ln(sinh(x)/x) = coth(x) - 1/x (the Langevin function).
pub fn langevin(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1e-8 {
        return x / 3.0;
    }
    if ax < 1.0 {
        // (x cosh x - sinh x)/(x sinh x) as a ratio of positive series
        let x2 = ax * ax;
        let mut num = 0.0;
        let mut den = 1.0;
        let mut pow = 1.0;
        let mut fact = 1.0;
        for k in 1..30 {
            let kf = k as f64;
            pow *= x2;
            fact *= (2.0 * kf) * (2.0 * kf + 1.0);
            num += 2.0 * kf * pow / fact;
            den += pow / fact;
            if pow / fact < 1e-18 {
                break;
            }
        }
        return x.signum() * num / (ax * den);
    }
    1.0 / x.tanh() - 1.0 / x
}

/// ln cosh(x) without overflow.
pub fn log_cosh(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1.0 {
        let s = (0.5 * ax).sinh();
        (2.0 * s * s).ln_1p()
    } else {
        ax - LN_2 + (-2.0 * ax).exp().ln_1p()
    }
}

/// log(e^a + e^b) computed stably.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + (-(a - b).abs()).exp().ln_1p()
}
