//! Zero-mean symmetric noise models: CGFs, joint CGFs of (X, X^2),
//! derivatives, finiteness domains and sampling.

use std::cell::RefCell;
use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, GL64_HALF};
use crate::specfun::{
    dawson, dawson_tail, erf, erfcx, erfcx_tail, langevin, ln_erfcx, log_add_exp, log_cosh, log_sinh_ratio, EvalDomain,
    SQRT_PI,
};

/// A zero-mean distribution symmetric about the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    Gaussian {
        variance: f64,
    },
    /// Density (q/2) exp(-q|t|).
    Laplace {
        q: f64,
    },
    /// Uniform on [-b, b].
    Uniform {
        b: f64,
    },
    /// +-z0 with probability 1/2 each.
    BinarySymmetric {
        z0: f64,
    },
    /// Independent sum.
    Sum {
        left: Box<NoiseModel>,
        right: Box<NoiseModel>,
    },
}

/// Where E[exp(xX + yX^2)] is finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointCgfDomain {
    /// Supremum of admissible y (exclusive unless `y_max_attained`).
    pub y_max: f64,
    pub y_max_attained: bool,
    /// Admissible x at y = 0.
    pub x_at_y0: EvalDomain,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

#[derive(Debug, Clone, Copy)]
enum Cont {
    Uniform(f64),
    Laplace(f64),
}

#[derive(Debug, Clone, Default)]
struct Flat {
    gauss_var: f64,
    binaries: Vec<f64>,
    conts: Vec<Cont>,
}

impl NoiseModel {
    pub fn gaussian(variance: f64) -> Result<Self> {
        Ok(NoiseModel::Gaussian {
            variance: positive("variance", variance)?,
        })
    }

    pub fn laplace(q: f64) -> Result<Self> {
        Ok(NoiseModel::Laplace { q: positive("q", q)? })
    }

    pub fn uniform(b: f64) -> Result<Self> {
        Ok(NoiseModel::Uniform { b: positive("B", b)? })
    }

    pub fn binary(z0: f64) -> Result<Self> {
        Ok(NoiseModel::BinarySymmetric {
            z0: positive("z0", z0)?,
        })
    }

    pub fn sum(left: NoiseModel, right: NoiseModel) -> Self {
        NoiseModel::Sum {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Re-check parameters (useful after deserialization).
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseModel::Gaussian { variance } => positive("variance", *variance).map(|_| ()),
            NoiseModel::Laplace { q } => positive("q", *q).map(|_| ()),
            NoiseModel::Uniform { b } => positive("B", *b).map(|_| ()),
            NoiseModel::BinarySymmetric { z0 } => positive("z0", *z0).map(|_| ()),
            NoiseModel::Sum { left, right } => {
                left.validate()?;
                right.validate()
            }
        }
    }

    fn flatten_into(&self, flat: &mut Flat) {
        match self {
            NoiseModel::Gaussian { variance } => flat.gauss_var += variance,
            NoiseModel::Laplace { q } => flat.conts.push(Cont::Laplace(*q)),
            NoiseModel::Uniform { b } => flat.conts.push(Cont::Uniform(*b)),
            NoiseModel::BinarySymmetric { z0 } => flat.binaries.push(*z0),
            NoiseModel::Sum { left, right } => {
                left.flatten_into(flat);
                right.flatten_into(flat);
            }
        }
    }

    fn flatten(&self) -> Flat {
        let mut f = Flat::default();
        self.flatten_into(&mut f);
        f
    }

    pub fn variance(&self) -> f64 {
        match self {
            NoiseModel::Gaussian { variance } => *variance,
            NoiseModel::Laplace { q } => 2.0 / (q * q),
            NoiseModel::Uniform { b } => b * b / 3.0,
            NoiseModel::BinarySymmetric { z0 } => z0 * z0,
            NoiseModel::Sum { left, right } => left.variance() + right.variance(),
        }
    }

    /// Finiteness domain of the CGF.
    pub fn cgf_domain(&self) -> EvalDomain {
        match self {
            NoiseModel::Laplace { q } => EvalDomain::symmetric(*q),
            NoiseModel::Sum { left, right } => left.cgf_domain().intersect(&right.cgf_domain()),
            _ => EvalDomain::REAL_LINE,
        }
    }

    pub fn joint_domain(&self) -> JointCgfDomain {
        match self {
            NoiseModel::Gaussian { variance } => JointCgfDomain {
                y_max: 1.0 / (2.0 * variance),
                y_max_attained: false,
                x_at_y0: EvalDomain::REAL_LINE,
            },
            NoiseModel::Laplace { q } => JointCgfDomain {
                y_max: 0.0,
                y_max_attained: true,
                x_at_y0: EvalDomain::symmetric(*q),
            },
            NoiseModel::Uniform { .. } | NoiseModel::BinarySymmetric { .. } => JointCgfDomain {
                y_max: f64::INFINITY,
                y_max_attained: false,
                x_at_y0: EvalDomain::REAL_LINE,
            },
            NoiseModel::Sum { .. } => {
                let f = self.flatten();
                let mut d = JointCgfDomain {
                    y_max: f64::INFINITY,
                    y_max_attained: false,
                    x_at_y0: EvalDomain::REAL_LINE,
                };
                if f.gauss_var > 0.0 {
                    d.y_max = 1.0 / (2.0 * f.gauss_var);
                }
                for c in &f.conts {
                    if let Cont::Laplace(q) = c {
                        if d.y_max >= 0.0 {
                            d.y_max = 0.0;
                            d.y_max_attained = true;
                        }
                        d.x_at_y0 = d.x_at_y0.intersect(&EvalDomain::symmetric(*q));
                    }
                }
                d
            }
        }
    }

    /// Admissible x at a given y (empty when y itself is inadmissible).
    pub fn x_domain(&self, y: f64) -> EvalDomain {
        let empty = EvalDomain { lo: 0.0, hi: 0.0 };
        let d = self.joint_domain();
        if y > d.y_max || (y == d.y_max && !d.y_max_attained) {
            return empty;
        }
        if y == 0.0 {
            d.x_at_y0
        } else {
            EvalDomain::REAL_LINE
        }
    }

    /// Largest t such that (t*dx, t*dy) stays in the joint-CGF domain.
    pub fn ray_limit(&self, dx: f64, dy: f64) -> f64 {
        let f = self.flatten();
        let mut t = f64::INFINITY;
        if f.gauss_var > 0.0 && dy > 0.0 {
            t = t.min(1.0 / (2.0 * f.gauss_var * dy));
        }
        for c in &f.conts {
            if let Cont::Laplace(q) = c {
                if dy > 0.0 {
                    t = 0.0;
                } else if dy == 0.0 && dx != 0.0 {
                    t = t.min(q / dx.abs());
                }
            }
        }
        t
    }

    /// Support as a union of closed intervals; None when unbounded.
    pub fn support(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            NoiseModel::Gaussian { .. } | NoiseModel::Laplace { .. } => None,
            NoiseModel::Uniform { b } => Some(vec![(-b, *b)]),
            NoiseModel::BinarySymmetric { z0 } => Some(vec![(-z0, -z0), (*z0, *z0)]),
            NoiseModel::Sum { left, right } => {
                let l = left.support()?;
                let r = right.support()?;
                let mut out: Vec<(f64, f64)> = Vec::new();
                for a in &l {
                    for b in &r {
                        out.push((a.0 + b.0, a.1 + b.1));
                    }
                }
                out.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut merged: Vec<(f64, f64)> = Vec::new();
                for iv in out {
                    match merged.last_mut() {
                        Some(last) if iv.0 <= last.1 => last.1 = last.1.max(iv.1),
                        _ => merged.push(iv),
                    }
                }
                Some(merged)
            }
        }
    }

    /// C(v) = ln E exp(vX).
    pub fn cgf(&self, v: f64) -> Result<f64> {
        if v.is_nan() {
            return Err(Error::domain("cgf", v, 0.0));
        }
        match self {
            NoiseModel::Gaussian { variance } => Ok(0.5 * variance * v * v),
            NoiseModel::Laplace { q } => {
                if v.abs() >= *q {
                    return Err(Error::domain(format!("Laplace(q={q}) cgf"), v, 0.0));
                }
                let r = v / q;
                Ok(-(-r * r).ln_1p())
            }
            NoiseModel::Uniform { b } => Ok(log_sinh_ratio(b * v)),
            NoiseModel::BinarySymmetric { z0 } => Ok(log_cosh(z0 * v)),
            NoiseModel::Sum { left, right } => Ok(left.cgf(v)? + right.cgf(v)?),
        }
    }

    /// dC/dv.
    pub fn cgf_deriv(&self, v: f64) -> Result<f64> {
        if v.is_nan() {
            return Err(Error::domain("cgf_deriv", v, 0.0));
        }
        match self {
            NoiseModel::Gaussian { variance } => Ok(variance * v),
            NoiseModel::Laplace { q } => {
                if v.abs() >= *q {
                    return Err(Error::domain(format!("Laplace(q={q}) cgf"), v, 0.0));
                }
                Ok(2.0 * v / (q * q - v * v))
            }
            NoiseModel::Uniform { b } => Ok(b * langevin(b * v)),
            NoiseModel::BinarySymmetric { z0 } => Ok(z0 * (z0 * v).tanh()),
            NoiseModel::Sum { left, right } => Ok(left.cgf_deriv(v)? + right.cgf_deriv(v)?),
        }
    }

    /// Joint CGF ln E exp(xX + yX^2).
    pub fn joint_cgf(&self, x: f64, y: f64) -> Result<f64> {
        self.joint_eval(x, y, false).map(|r| r.0)
    }

    /// Partial derivative of the joint CGF with respect to x.
    pub fn joint_cgf_dx(&self, x: f64, y: f64) -> Result<f64> {
        self.joint_eval(x, y, true).map(|r| r.1)
    }

    /// Joint CGF and its x-derivative together.
    pub fn joint_cgf_with_dx(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        self.joint_eval(x, y, true)
    }

    fn joint_eval(&self, x: f64, y: f64, deriv: bool) -> Result<(f64, f64)> {
        if x.is_nan() || y.is_nan() {
            return Err(Error::domain("joint cgf", x, y));
        }
        if y == 0.0 {
            let v = self.cgf(x)?;
            let d = if deriv { self.cgf_deriv(x)? } else { 0.0 };
            return Ok((v, d));
        }
        match self {
            NoiseModel::Gaussian { variance } => gaussian_joint(*variance, x, y),
            NoiseModel::Laplace { q } => laplace_joint(*q, x, y, deriv),
            NoiseModel::Uniform { b } => {
                let (f, e) = uniform_reduced(x * b, y * b * b, deriv);
                Ok((f, b * e))
            }
            NoiseModel::BinarySymmetric { z0 } => Ok((y * z0 * z0 + log_cosh(x * z0), z0 * (x * z0).tanh())),
            NoiseModel::Sum { .. } => {
                let f = self.flatten();
                flat_joint(x, y, &f.binaries, f.gauss_var, &f.conts, deriv)
            }
        }
    }

    /// A reusable sampler.
    pub fn sampler(&self) -> Sampler {
        let f = self.flatten();
        let mut leaves = Vec::new();
        if f.gauss_var > 0.0 {
            leaves.push(Leaf::Gaussian(
                Normal::new(0.0, f.gauss_var.sqrt()).expect("positive sd"),
            ));
        }
        for c in f.conts {
            leaves.push(match c {
                Cont::Uniform(b) => Leaf::Uniform(b),
                Cont::Laplace(q) => Leaf::Laplace(q),
            });
        }
        for z in f.binaries {
            leaves.push(Leaf::Binary(z));
        }
        Sampler { leaves }
    }

    /// n i.i.d. draws, deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<f64> {
        let s = self.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| s.draw(&mut rng)).collect()
    }
}

fn gaussian_joint(var: f64, x: f64, y: f64) -> Result<(f64, f64)> {
    let d = 1.0 - 2.0 * var * y;
    if d <= 0.0 {
        return Err(Error::domain(format!("Gaussian(var={var}) joint cgf"), x, y));
    }
    Ok((-0.5 * d.ln() + var * x * x / (2.0 * d), x * var / d))
}

fn laplace_joint(q: f64, x: f64, y: f64, deriv: bool) -> Result<(f64, f64)> {
    if y > 0.0 {
        return Err(Error::domain(format!("Laplace(q={q}) joint cgf"), x, y));
    }
    // y < 0: (q/2) sqrt(pi)/(2 sqrt c) [erfcx((q-x)/2sqrt c) + erfcx((q+x)/2sqrt c)]
    let c = -y;
    let s = 2.0 * c.sqrt();
    let z1 = (q - x) / s;
    let z2 = (q + x) / s;
    let l1 = ln_erfcx(z1);
    let l2 = ln_erfcx(z2);
    let val = (0.5 * q).ln() + (SQRT_PI / s).ln() + log_add_exp(l1, l2);
    if !deriv {
        return Ok((val, 0.0));
    }
    let dl = |z: f64| {
        if z >= 0.0 {
            -2.0 * erfcx_tail(z)
        } else {
            2.0 * z - 2.0 / (SQRT_PI * erfcx(z))
        }
    };
    let m = l1.max(l2);
    let w1 = (l1 - m).exp();
    let w2 = (l2 - m).exp();
    let d = (w1 * dl(z1) * (-1.0 / s) + w2 * dl(z2) * (1.0 / s)) / (w1 + w2);
    Ok((val, d))
}

/// F(a, b) = ln((1/2) int_{-1}^{1} exp(a t + b t^2) dt) and E[t] under the
/// tilted law (the a-derivative).
pub(crate) fn uniform_reduced(a: f64, b: f64, deriv: bool) -> (f64, f64) {
    if b == 0.0 {
        return (log_sinh_ratio(a), if deriv { langevin(a) } else { 0.0 });
    }
    let sgn = if a < 0.0 { -1.0 } else { 1.0 };
    let a = a.abs();
    let (f, e) = if a <= 8.0 && b.abs() <= 8.0 {
        let mut sm1 = 0.0;
        let mut num = 0.0;
        for &(t, w) in GL64_HALF.iter() {
            let at = a * t;
            let sh = (0.5 * at).sinh();
            let eb = (b * t * t).exp_m1();
            let ch = at.cosh();
            sm1 += w * (eb * ch + 2.0 * sh * sh);
            if deriv {
                num += w * t * (eb + 1.0) * at.sinh();
            }
        }
        (sm1.ln_1p(), num / (1.0 + sm1))
    } else if b < 0.0 {
        let c = -b;
        let rc = c.sqrt();
        let m = a / (2.0 * c);
        let u = rc * (1.0 + m);
        let v = rc * (1.0 - m);
        let k = (SQRT_PI / (4.0 * rc)).ln();
        if v >= 0.0 {
            let s = erf(u) + erf(v);
            let f = a * a / (4.0 * c) + k + s.ln();
            let e = if deriv {
                m - (-v * v).exp() * (-(-2.0 * a).exp_m1()) / ((PI * c).sqrt() * s)
            } else {
                0.0
            };
            (f, e)
        } else {
            let z = -v;
            let e2a = (-2.0 * a).exp();
            let rho = e2a * erfcx(u) / erfcx(z);
            let f = a - c + k + ln_erfcx(z) + (-rho).ln_1p();
            let e = if deriv {
                1.0 - (erfcx_tail(z) / rc - rho * (2.0 + erfcx_tail(u) / rc)) / (1.0 - rho)
            } else {
                0.0
            };
            (f, e)
        }
    } else {
        let rb = b.sqrt();
        let m = a / (2.0 * b);
        let u = rb * (m + 1.0);
        let l = rb * (m - 1.0);
        let e2a = (-2.0 * a).exp();
        let du = dawson(u);
        let dl = dawson(l);
        let g = du - e2a * dl;
        let f = a + b - (2.0 * rb).ln() + g.ln();
        let e = if !deriv {
            0.0
        } else if l < 0.0 {
            (-(-2.0 * a).exp_m1()) / (2.0 * rb * g) - m
        } else {
            let rho = e2a * dl / du;
            let eps = (rho - e2a) / (1.0 - rho);
            let hu = dawson_tail(u);
            1.0 + (hu + eps * (u + hu)) / rb
        };
        (f, e)
    };
    (f, sgn * e)
}

fn cont_joint(c: Cont, x: f64, y: f64, deriv: bool) -> Result<(f64, f64)> {
    match c {
        Cont::Uniform(b) => {
            let (f, e) = uniform_reduced(x * b, y * b * b, deriv);
            Ok((f, b * e))
        }
        Cont::Laplace(q) => {
            if y == 0.0 {
                let m = NoiseModel::Laplace { q };
                Ok((m.cgf(x)?, if deriv { m.cgf_deriv(x)? } else { 0.0 }))
            } else {
                laplace_joint(q, x, y, deriv)
            }
        }
    }
}

fn flat_joint(x: f64, y: f64, bins: &[f64], gvar: f64, conts: &[Cont], deriv: bool) -> Result<(f64, f64)> {
    if let Some((&z0, rest)) = bins.split_first() {
        let (rp, dp) = flat_joint(x + 2.0 * y * z0, y, rest, gvar, conts, deriv)?;
        let (rm, dm) = flat_joint(x - 2.0 * y * z0, y, rest, gvar, conts, deriv)?;
        let lp = x * z0 + rp;
        let lm = -x * z0 + rm;
        let val = y * z0 * z0 + log_add_exp(lp, lm) - LN_2;
        let d = if deriv {
            let m = lp.max(lm);
            let wp = (lp - m).exp();
            let wm = (lm - m).exp();
            (wp * (z0 + dp) + wm * (dm - z0)) / (wp + wm)
        } else {
            0.0
        };
        return Ok((val, d));
    }
    match (conts.len(), gvar > 0.0) {
        (0, false) => Ok((0.0, 0.0)),
        (0, true) => gaussian_joint(gvar, x, y),
        (1, false) => cont_joint(conts[0], x, y, deriv),
        _ => convolve_joint(x, y, gvar, conts, deriv),
    }
}

/// ln int f_c(t) exp(x t + y t^2 + R(x + 2 y t, y)) dt by adaptive quadrature,
/// where c is the first continuous leaf and R the joint CGF of the rest.
fn convolve_joint(x: f64, y: f64, gvar: f64, conts: &[Cont], deriv: bool) -> Result<(f64, f64)> {
    let (head, rest) = conts.split_first().expect("nonempty");
    let rest_eval = |xx: f64| -> Result<(f64, f64)> {
        match (rest.len(), gvar > 0.0) {
            (0, true) => gaussian_joint(gvar, xx, y),
            (1, false) => cont_joint(rest[0], xx, y, deriv),
            (0, false) => Ok((0.0, 0.0)),
            _ => convolve_joint(xx, y, gvar, rest, deriv),
        }
    };
    let (lo, hi, log_dens): (f64, f64, Box<dyn Fn(f64) -> f64>) = match *head {
        Cont::Uniform(b) => (-b, b, Box::new(move |_t: f64| -(2.0 * b).ln())),
        Cont::Laplace(q) => {
            if y > 0.0 {
                return Err(Error::domain(format!("Laplace(q={q}) joint cgf"), x, y));
            }
            (
                f64::NEG_INFINITY,
                f64::INFINITY,
                Box::new(move |t: f64| (0.5 * q).ln() - q * t.abs()),
            )
        }
    };
    let log_int = |t: f64| -> Result<(f64, f64)> {
        let (r, rd) = rest_eval(x + 2.0 * y * t)?;
        Ok((log_dens(t) + x * t + y * t * t + r, t + rd))
    };
    // the integrand is log-concave in t once binaries are peeled off:
    // find its mode, then walk outward until it has fallen by e^-45
    let scale = match *head {
        Cont::Uniform(b) => b,
        Cont::Laplace(q) => 1.0 / q,
    };
    let lv = |t: f64| log_int(t).map(|r| r.0).unwrap_or(f64::NEG_INFINITY);
    let (mut s_lo, mut s_hi) = if lo.is_finite() {
        (lo, hi)
    } else {
        (-40.0 * scale, 40.0 * scale)
    };
    let mode = loop {
        let n = 64;
        let pts: Vec<f64> = (0..=n).map(|i| s_lo + (s_hi - s_lo) * i as f64 / n as f64).collect();
        let (ib, _) =
            pts.iter().map(|&t| lv(t)).enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
        if !lo.is_finite() && (ib == 0 || ib == n) && s_hi - s_lo < 1e12 * scale {
            let w = s_hi - s_lo;
            if ib == 0 {
                s_lo -= w;
            } else {
                s_hi += w;
            }
            continue;
        }
        let l = pts[ib.saturating_sub(1)];
        let r = pts[(ib + 1).min(n)];
        break crate::optim::golden_max(lv, l, r, 1e-13).arg;
    };
    let peak = log_int(mode)?.0;
    let walk = |dir: f64, bound: f64| -> f64 {
        let mut step = scale * 1e-3_f64.max(1e-12);
        loop {
            let t = mode + dir * step;
            if (dir < 0.0 && t <= bound) || (dir > 0.0 && t >= bound) {
                return bound;
            }
            if lv(t) < peak - 45.0 || step > 1e15 * scale {
                return t;
            }
            step *= 2.0;
        }
    };
    let a = walk(-1.0, lo);
    let bnd = walk(1.0, hi);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let eval = |t: f64, which: u8| -> f64 {
        match log_int(t) {
            Ok((l, d)) => {
                let e = (l - peak).exp();
                if which == 0 {
                    e
                } else {
                    e * d
                }
            }
            Err(err) => {
                *failure.borrow_mut() = Some(err);
                0.0
            }
        }
    };
    let mut pieces = vec![a, mode, bnd];
    if a < 0.0 && bnd > 0.0 {
        pieces.push(0.0);
    }
    pieces.sort_by(f64::total_cmp);
    pieces.dedup();
    let mut total = 0.0;
    let mut dtotal = 0.0;
    for w in pieces.windows(2) {
        total += quad::integrate(|t| eval(t, 0), w[0], w[1], 1e-300, 1e-13);
    }
    if deriv {
        for w in pieces.windows(2) {
            dtotal += quad::integrate(|t| eval(t, 1), w[0], w[1], 1e-300, 1e-13);
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((peak + total.ln(), if deriv { dtotal / total } else { 0.0 }))
}

#[derive(Debug, Clone)]
enum Leaf {
    Gaussian(Normal<f64>),
    Laplace(f64),
    Uniform(f64),
    Binary(f64),
}

/// Draws from a [`NoiseModel`]; sums are drawn leaf by leaf.
#[derive(Debug, Clone)]
pub struct Sampler {
    leaves: Vec<Leaf>,
}

impl Sampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut x = 0.0;
        for leaf in &self.leaves {
            x += match leaf {
                Leaf::Gaussian(n) => n.sample(rng),
                Leaf::Laplace(q) => {
                    let u: f64 = rng.random::<f64>() - 0.5;
                    -u.signum() * (-2.0 * u.abs()).ln_1p() / q
                }
                Leaf::Uniform(b) => b * (2.0 * rng.random::<f64>() - 1.0),
                Leaf::Binary(z) => {
                    if rng.random::<bool>() {
                        *z
                    } else {
                        -*z
                    }
                }
            };
        }
        x
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseModel::Gaussian { variance } => write!(f, "gaussian:{variance}"),
            NoiseModel::Laplace { q } => write!(f, "laplace:{q}"),
            NoiseModel::Uniform { b } => write!(f, "uniform:{b}"),
            NoiseModel::BinarySymmetric { z0 } => write!(f, "binary:{z0}"),
            NoiseModel::Sum { left, right } => write!(f, "{left}+{right}"),
        }
    }
}

/// Parses `kind:param` terms joined by `+`, e.g. `uniform:5+binary:7`.
/// The Gaussian parameter is the variance.
impl FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut acc: Option<NoiseModel> = None;
        for term in s.split('+') {
            let (kind, val) = term
                .trim()
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("noise term '{term}' is not kind:value")))?;
            let v: f64 = val
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad number in noise term '{term}'")))?;
            let m = match kind.trim().to_ascii_lowercase().as_str() {
                "gaussian" | "normal" => NoiseModel::gaussian(v)?,
                "laplace" => NoiseModel::laplace(v)?,
                "uniform" => NoiseModel::uniform(v)?,
                "binary" | "bpsk" => NoiseModel::binary(v)?,
                other => return Err(Error::invalid(format!("unknown noise kind '{other}'"))),
            };
            acc = Some(match acc {
                None => m,
                Some(prev) => NoiseModel::sum(prev, m),
            });
        }
        acc.ok_or_else(|| Error::invalid("empty noise specification"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let m: NoiseModel = "uniform:5+binary:7".parse().unwrap();
        assert_eq!(m.to_string(), "uniform:5+binary:7");
        assert!("uniform:-1".parse::<NoiseModel>().is_err());
        assert!("cauchy:1".parse::<NoiseModel>().is_err());
    }

    #[test]
    fn laplace_domain() {
        let m = NoiseModel::laplace(4.0).unwrap();
        assert!(m.cgf(4.0).is_err());
        assert!(m.joint_cgf(0.1, 0.01).is_err());
        assert!(m.joint_cgf(10.0, -0.01).is_ok());
    }
}
