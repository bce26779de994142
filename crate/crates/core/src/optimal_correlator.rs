//! Optimal correlator weights for a given signal distribution.
//!
//! For fixed Chernoff parameters the optimal weight attached to a signal
//! level s is the root w of g~(w; s) = s, where
//! g~(w; s) = C~_Vx(lambda w + 2 lambda gamma s, -lambda gamma)
//!          + (alpha phi / lambda) C~_Nx(alpha w, alpha gamma).
//! With gamma = 0 this is g(w) = C_V'(lambda w) + (phi alpha / lambda) C_N'(alpha w).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{evaluate, theta_for_e0, DetectorSpec, ExponentPoint, SignalPmf};
use crate::noise::NoiseModel;
use crate::optim::{brent_root, log_scan_max, ray_max};
use crate::specfun::EvalDomain;

/// Chernoff parameters, Lagrange multiplier and energy coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremParams {
    pub alpha: f64,
    pub phi: f64,
    pub lambda: f64,
    pub gamma: f64,
}

impl TheoremParams {
    fn check(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(ok(self.alpha) && ok(self.phi) && ok(self.gamma)) {
            return Err(Error::invalid(format!("alpha, phi, gamma must be >= 0: {self:?}")));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::invalid(format!("lambda must be > 0, got {}", self.lambda)));
        }
        Ok(())
    }

    fn coupling(&self) -> f64 {
        self.alpha * self.phi / self.lambda
    }
}

/// g(w) = C_V'(lambda w) + (phi alpha / lambda) C_N'(alpha w).
pub fn g(w: f64, p: &TheoremParams, noise_v: &NoiseModel, noise_n: &NoiseModel) -> Result<f64> {
    p.check()?;
    let mut r = noise_v.cgf_deriv(p.lambda * w)?;
    let k = p.coupling();
    if k != 0.0 {
        r += k * noise_n.cgf_deriv(p.alpha * w)?;
    }
    Ok(r)
}

/// g~(w; s), the energy-detector generalization of [`g`].
pub fn g_tilde(w: f64, s: f64, p: &TheoremParams, noise_v: &NoiseModel, noise_n: &NoiseModel) -> Result<f64> {
    p.check()?;
    let l = p.lambda;
    let mut r = noise_v.joint_cgf_dx(l * w + 2.0 * l * p.gamma * s, -l * p.gamma)?;
    let k = p.coupling();
    if k != 0.0 {
        r += k * noise_n.joint_cgf_dx(p.alpha * w, p.alpha * p.gamma)?;
    }
    Ok(r)
}

/// Interval of w on which g~(.; s) is finite.
pub fn weight_domain(s: f64, p: &TheoremParams, noise_v: &NoiseModel, noise_n: &NoiseModel) -> Result<EvalDomain> {
    p.check()?;
    let l = p.lambda;
    let dv = noise_v.x_domain(-l * p.gamma);
    if dv.is_empty() {
        return Err(Error::domain("weight map: V", 0.0, -l * p.gamma));
    }
    let shift = 2.0 * l * p.gamma * s;
    let mut d = EvalDomain {
        lo: (dv.lo - shift) / l,
        hi: (dv.hi - shift) / l,
    };
    if p.coupling() != 0.0 {
        let dn = noise_n.x_domain(p.alpha * p.gamma);
        if dn.is_empty() {
            return Err(Error::domain("weight map: N", 0.0, p.alpha * p.gamma));
        }
        d = d.intersect(&EvalDomain {
            lo: dn.lo / p.alpha,
            hi: dn.hi / p.alpha,
        });
    }
    if d.is_empty() {
        return Err(Error::domain("weight map: empty weight domain", 0.0, p.gamma));
    }
    Ok(d)
}

/// Solve g~(w; s) = target for w (g~ is strictly increasing in w).
pub fn g_inverse(target: f64, s: f64, p: &TheoremParams, noise_v: &NoiseModel, noise_n: &NoiseModel) -> Result<f64> {
    if !target.is_finite() {
        return Err(Error::OutOfRange { target });
    }
    let dom = weight_domain(s, p, noise_v, noise_n)?;
    let h = |w: f64| g_tilde(w, s, p, noise_v, noise_n).map(|v| v - target);
    let w0 = if dom.contains(0.0) {
        0.0
    } else if dom.lo.is_finite() && dom.hi.is_finite() {
        0.5 * (dom.lo + dom.hi)
    } else if dom.lo.is_finite() {
        dom.lo + 1.0 / p.lambda
    } else {
        dom.hi - 1.0 / p.lambda
    };
    let h0 = h(w0)?;
    if h0 == 0.0 {
        return Ok(w0);
    }
    let dir = if h0 < 0.0 { 1.0 } else { -1.0 };
    let bound = if dir > 0.0 { dom.hi } else { dom.lo };
    let mut step = 1.0 / p.lambda;
    let mut prev = w0;
    let mut found = None;
    for _ in 0..3000 {
        let mut next = w0 + dir * step;
        if bound.is_finite() && (next - bound) * dir >= 0.0 {
            next = 0.5 * (prev + bound);
        }
        if next == prev || !next.is_finite() || next.abs() > 1e300 {
            break;
        }
        let hv = h(next)?;
        if hv == 0.0 {
            return Ok(next);
        }
        if hv.signum() != h0.signum() {
            found = Some((prev, next));
            break;
        }
        prev = next;
        step *= 2.0;
    }
    let (a, b) = found.ok_or(Error::OutOfRange { target })?;
    let root = brent_root(|w| h(w).unwrap_or(f64::NAN), a, b, 0.0, 500).ok_or(Error::OutOfRange { target })?;
    Ok(root)
}

/// Outcome of solving the multiplier equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiSolution {
    /// The FA constraint binds at this multiplier.
    Root(f64),
    /// The constraint already holds at phi = 0.
    Slack,
    /// No phi >= 0 satisfies the constraint at this alpha.
    Infeasible,
}

fn weights_for(signal: &SignalPmf, p: &TheoremParams, noise_v: &NoiseModel, noise_n: &NoiseModel) -> Result<Vec<f64>> {
    signal
        .levels()
        .iter()
        .map(|&(s, _)| {
            if s == 0.0 {
                Ok(0.0)
            } else {
                g_inverse(s, s, p, noise_v, noise_n)
            }
        })
        .collect()
}

fn fa_load(signal: &SignalPmf, w: &[f64], p: &TheoremParams, noise_n: &NoiseModel) -> Result<f64> {
    let mut acc = 0.0;
    for (&(_, q), &wi) in signal.levels().iter().zip(w) {
        if q > 0.0 {
            acc += q * noise_n.joint_cgf(p.alpha * wi, p.alpha * p.gamma)?;
        }
    }
    Ok(acc)
}

/// Classify and solve E[C~_N(alpha w(S; phi), alpha gamma)] = alpha theta - e0.
pub fn phi_solution(
    signal: &SignalPmf,
    p: &TheoremParams,
    e0: f64,
    theta: f64,
    noise_v: &NoiseModel,
    noise_n: &NoiseModel,
) -> Result<PhiSolution> {
    if p.alpha.is_nan() || p.alpha <= 0.0 {
        return Err(Error::invalid("alpha must be > 0"));
    }
    let rhs = p.alpha * theta - e0;
    let lhs = |phi: f64| -> Result<f64> {
        let q = TheoremParams { phi, ..*p };
        let w = weights_for(signal, &q, noise_v, noise_n)?;
        fa_load(signal, &w, &q, noise_n)
    };
    if lhs(0.0)? <= rhs {
        return Ok(PhiSolution::Slack);
    }
    let floor = fa_load(signal, &vec![0.0; signal.levels().len()], p, noise_n)?;
    if rhs <= floor {
        return Ok(PhiSolution::Infeasible);
    }
    let mut hi = 1.0;
    let mut lo = 0.0;
    let mut k = 0;
    while lhs(hi)? > rhs {
        lo = hi;
        hi *= 2.0;
        k += 1;
        if k > 60 {
            return Ok(PhiSolution::Infeasible);
        }
    }
    let root = brent_root(
        |phi| lhs(phi).map(|v| v - rhs).unwrap_or(f64::NAN),
        lo,
        hi,
        1e-14 * hi,
        500,
    );
    Ok(root.map_or(PhiSolution::Infeasible, PhiSolution::Root))
}

/// Multiplier phi >= 0 meeting the FA constraint with equality; 0 when no
/// such root exists.
pub fn solve_phi(
    signal: &SignalPmf,
    p: &TheoremParams,
    e0: f64,
    theta: f64,
    noise_v: &NoiseModel,
    noise_n: &NoiseModel,
) -> Result<f64> {
    Ok(match phi_solution(signal, p, e0, theta, noise_v, noise_n)? {
        PhiSolution::Root(phi) => phi,
        PhiSolution::Slack | PhiSolution::Infeasible => 0.0,
    })
}

/// Optimal design with the internal optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalDesign {
    pub spec: DetectorSpec,
    pub point: ExponentPoint,
    /// Parameters at which the weight map was solved.
    pub params: TheoremParams,
    /// Value of the reduced objective at `params`.
    pub objective: f64,
}

fn md_terms(signal: &SignalPmf, w: &[f64], p: &TheoremParams, noise_v: &NoiseModel) -> Result<f64> {
    let (l, g) = (p.lambda, p.gamma);
    let mut acc = 0.0;
    for (&(s, q), &wi) in signal.levels().iter().zip(w) {
        if q > 0.0 {
            let c = noise_v.joint_cgf(l * wi + 2.0 * l * g * s, -l * g)?;
            acc += q * (l * (wi * s + g * s * s) - c);
        }
    }
    Ok(acc)
}

fn scales(signal: &SignalPmf, noise_v: &NoiseModel, noise_n: &NoiseModel) -> (f64, f64) {
    let rms = signal.power().sqrt().max(1e-300);
    let lam = 1.0 / noise_v.variance().max(1e-300);
    let alp = 1.0 / (noise_n.variance().sqrt() * rms / noise_v.variance().max(1e-300)).max(1e-300);
    (lam, alp)
}

fn finish(
    signal: &SignalPmf,
    params: TheoremParams,
    objective: f64,
    e0: f64,
    theta: Option<f64>,
    noise_v: &NoiseModel,
    noise_n: &NoiseModel,
) -> Result<OptimalDesign> {
    let w = weights_for(signal, &params, noise_v, noise_n)?;
    let mut it = w.iter();
    let pmf = signal.with_weights(|_| *it.next().expect("one weight per level"))?;
    let theta = match theta {
        Some(t) => t,
        None => theta_for_e0(&pmf, params.gamma, noise_n, e0)?.theta,
    };
    let spec = DetectorSpec::new(pmf, params.gamma, theta)?;
    let point = evaluate(&spec, noise_n, noise_v, e0)?;
    if point.e_fa < e0 - 1e-8 {
        return Err(Error::Infeasible(format!(
            "FA exponent {} cannot reach e0 = {e0}",
            point.e_fa
        )));
    }
    Ok(OptimalDesign {
        spec,
        point,
        params,
        objective,
    })
}

/// Optimal weights for `signal` with the threshold chosen to meet `e0`
/// exactly. Here the multiplier is phi = lambda / alpha and (lambda, alpha)
/// are found by nested one-dimensional searches.
pub fn optimal_weights_detailed(
    signal: &SignalPmf,
    e0: f64,
    gamma: f64,
    noise_v: &NoiseModel,
    noise_n: &NoiseModel,
) -> Result<OptimalDesign> {
    signal.validate()?;
    if !(e0 >= 0.0 && e0.is_finite()) {
        return Err(Error::invalid(format!("e0 must be >= 0, got {e0}")));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("gamma must be >= 0, got {gamma}")));
    }
    let (lam0, alp0) = scales(signal, noise_v, noise_n);
    let objective = |lambda: f64, alpha: f64| -> f64 {
        let p = TheoremParams {
            alpha,
            phi: lambda / alpha,
            lambda,
            gamma,
        };
        let run = || -> Result<f64> {
            let w = weights_for(signal, &p, noise_v, noise_n)?;
            let md = md_terms(signal, &w, &p, noise_v)?;
            let fa = fa_load(signal, &w, &p, noise_n)?;
            Ok(md - lambda / alpha * (e0 + fa))
        };
        run().unwrap_or(f64::NEG_INFINITY)
    };
    let inner = |lambda: f64| -> (f64, f64) {
        let r = ray_max(|a| objective(lambda, a), alp0, f64::INFINITY, 1e-10);
        (r.arg, r.value)
    };
    let best = log_scan_max(|l| inner(l).1, lam0, 3.0, 25, 1e-10);
    let lambda = best.arg;
    let (alpha, value) = inner(lambda);
    let params = TheoremParams {
        alpha,
        phi: lambda / alpha,
        lambda,
        gamma,
    };
    finish(signal, params, value, e0, None, noise_v, noise_n)
}

/// Optimal weights with the threshold from [`theta_for_e0`].
pub fn optimal_weights(
    signal: &SignalPmf,
    e0: f64,
    gamma: f64,
    noise_v: &NoiseModel,
    noise_n: &NoiseModel,
) -> Result<(DetectorSpec, ExponentPoint)> {
    let d = optimal_weights_detailed(signal, e0, gamma, noise_v, noise_n)?;
    Ok((d.spec, d.point))
}

/// Optimal weights for a prescribed threshold: for each (lambda, alpha) the
/// multiplier comes from [`phi_solution`]; alpha and lambda are then chosen
/// to maximize the MD objective.
pub fn optimal_weights_fixed_theta(
    signal: &SignalPmf,
    theta: f64,
    e0: f64,
    gamma: f64,
    noise_v: &NoiseModel,
    noise_n: &NoiseModel,
) -> Result<OptimalDesign> {
    signal.validate()?;
    let (lam0, alp0) = scales(signal, noise_v, noise_n);
    let objective = |lambda: f64, alpha: f64| -> f64 {
        let base = TheoremParams {
            alpha,
            phi: 0.0,
            lambda,
            gamma,
        };
        let run = || -> Result<f64> {
            let phi = match phi_solution(signal, &base, e0, theta, noise_v, noise_n)? {
                PhiSolution::Root(phi) => phi,
                PhiSolution::Slack => 0.0,
                PhiSolution::Infeasible => return Ok(f64::NEG_INFINITY),
            };
            let p = TheoremParams { phi, ..base };
            let w = weights_for(signal, &p, noise_v, noise_n)?;
            Ok(md_terms(signal, &w, &p, noise_v)? - lambda * theta)
        };
        run().unwrap_or(f64::NEG_INFINITY)
    };
    let inner = |lambda: f64| -> Extremumish {
        let e = log_scan_max(|a| objective(lambda, a), alp0, 3.0, 13, 1e-9);
        Extremumish {
            alpha: e.arg,
            value: e.value,
        }
    };
    let best = log_scan_max(|l| inner(l).value, lam0, 3.0, 13, 1e-9);
    let lambda = best.arg;
    let a = inner(lambda);
    if a.value == f64::NEG_INFINITY {
        return Err(Error::Infeasible(format!(
            "no alpha meets e0 = {e0} at theta = {theta}"
        )));
    }
    let base = TheoremParams {
        alpha: a.alpha,
        phi: 0.0,
        lambda,
        gamma,
    };
    let phi = solve_phi(signal, &base, e0, theta, noise_v, noise_n)?;
    let params = TheoremParams { phi, ..base };
    finish(signal, params, a.value, e0, Some(theta), noise_v, noise_n)
}

struct Extremumish {
    alpha: f64,
    value: f64,
}

/// Per-level stationarity residual lambda s - lambda C~_Vx(...) - phi alpha C~_Nx(...).
pub fn kkt_residuals(
    signal: &SignalPmf,
    weights: &[f64],
    p: &TheoremParams,
    noise_v: &NoiseModel,
    noise_n: &NoiseModel,
) -> Result<Vec<f64>> {
    signal
        .levels()
        .iter()
        .zip(weights)
        .map(|(&(s, _), &w)| Ok(p.lambda * (s - g_tilde(w, s, p, noise_v, noise_n)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_inverse_closed_form() {
        let v = NoiseModel::gaussian(2.0).unwrap();
        let n = NoiseModel::gaussian(0.5).unwrap();
        let p = TheoremParams {
            alpha: 0.7,
            phi: 1.3,
            lambda: 0.4,
            gamma: 0.0,
        };
        let slope = p.lambda * 2.0 + p.phi * p.alpha * p.alpha * 0.5 / p.lambda;
        let w = g_inverse(1.7, 0.0, &p, &v, &n).unwrap();
        assert!((w - 1.7 / slope).abs() < 1e-12);
    }
}
