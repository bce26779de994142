//! Reduced design problems: optimal weights for a fixed symmetric signal,
//! joint balanced-ternary signal/correlator design under a power budget,
//! and sweeps of the resulting trade-off curves.
//!
//! Every candidate design is scored by the same evaluator: the threshold is
//! the smallest one meeting the FA budget and the score is the resulting MD
//! exponent. The (w, gamma, theta) scale invariance is removed by pinning
//! the smallest nonzero weight to 1, or by the ratio t = gamma / w.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{evaluate, theta_for_e0, Atom, DetectorSpec, DiscreteJointPmf, ExponentPoint, SignalPmf};
use crate::noise::NoiseModel;
use crate::optim::{nelder_mead, scan_max};
use crate::optimal_correlator::optimal_weights;

/// Balanced ternary design: (W, S) = (-w, -s), (0, 0), (w, s) with
/// probabilities p, 1 - 2p, p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TernaryDesign {
    pub p: f64,
    pub w: f64,
    pub s: f64,
    pub gamma: f64,
    #[serde(with = "crate::serde_f64")]
    pub theta: f64,
}

impl TernaryDesign {
    pub fn to_pmf(&self) -> Result<DiscreteJointPmf> {
        if !(self.p > 0.0 && self.p <= 0.5) {
            return Err(Error::invalid(format!("duty p must lie in (0, 1/2], got {}", self.p)));
        }
        DiscreteJointPmf::new(vec![
            Atom {
                w: -self.w,
                s: -self.s,
                prob: self.p,
            },
            Atom {
                w: 0.0,
                s: 0.0,
                prob: 1.0 - 2.0 * self.p,
            },
            Atom {
                w: self.w,
                s: self.s,
                prob: self.p,
            },
        ])
    }

    pub fn power(&self) -> f64 {
        2.0 * self.p * self.s * self.s
    }

    pub fn spec(&self) -> Result<DetectorSpec> {
        DetectorSpec::new(self.to_pmf()?, self.gamma, self.theta)
    }
}

/// Search effort for the multi-parameter solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative tolerance of the scalar searches.
    pub tol: f64,
    /// Quasi-random starts screened by the direct search.
    pub starts: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-9, starts: 16 }
    }
}

/// Which restriction of the fixed-signal problem to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedSignalMode {
    /// Weights proportional to the signal, gamma = 0.
    Classical,
    /// Optimal weights, gamma = 0.
    Linear,
    /// Optimal weights and energy coefficient.
    Energy,
}

/// Exponents of the detector with the given weights and energy coefficient,
/// its threshold set to meet `e0` exactly.
pub fn design_point(
    pmf: &DiscreteJointPmf,
    gamma: f64,
    e0: f64,
    noise_n: &NoiseModel,
    noise_v: &NoiseModel,
) -> Result<ExponentPoint> {
    let theta = theta_for_e0(pmf, gamma, noise_n, e0)?.theta;
    let spec = DetectorSpec::new(pmf.clone(), gamma, theta)?;
    evaluate(&spec, noise_n, noise_v, e0)
}

fn score(r: Result<ExponentPoint>) -> f64 {
    match r {
        Ok(p) if p.e_md.is_nan() => f64::NEG_INFINITY,
        Ok(p) => p.e_md,
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Positive levels of a symmetric signal, ascending.
fn positive_levels(signal: &SignalPmf) -> Result<Vec<f64>> {
    if !signal.is_symmetric(1e-12) {
        return Err(Error::invalid("signal pmf is not symmetric"));
    }
    let mut lv: Vec<f64> = signal
        .levels()
        .iter()
        .filter(|l| l.0 > 0.0 && l.1 > 0.0)
        .map(|l| l.0)
        .collect();
    lv.sort_by(f64::total_cmp);
    lv.dedup();
    if lv.is_empty() {
        return Err(Error::invalid("signal has no nonzero level"));
    }
    Ok(lv)
}

/// Weight pmf for a symmetric signal: level k gets sign(s) * ratios[k].
fn level_pmf(signal: &SignalPmf, levels: &[f64], ratios: &[f64]) -> Result<DiscreteJointPmf> {
    signal.with_weights(|s| {
        if s == 0.0 {
            return 0.0;
        }
        let k = levels.iter().position(|&l| l == s.abs()).unwrap_or(0);
        s.signum() * ratios[k]
    })
}

/// Fixed-signal design. Symmetric signals use the reduced problem with the
/// smallest level's weight pinned to 1; other signals go through the
/// weight-map route.
pub fn solve_fixed_signal(
    signal: &SignalPmf,
    e0: f64,
    mode: FixedSignalMode,
    noise_n: &NoiseModel,
    noise_v: &NoiseModel,
    opts: &SolverOptions,
) -> Result<ExponentPoint> {
    signal.validate()?;
    if !(e0 >= 0.0 && e0.is_finite()) {
        return Err(Error::invalid(format!("e0 must be >= 0, got {e0}")));
    }
    let levels = match positive_levels(signal) {
        Ok(l) => l,
        Err(_) if signal.levels().iter().any(|l| l.0 != 0.0) => {
            return solve_asymmetric(signal, e0, mode, noise_n, noise_v, opts)
        }
        Err(e) => return Err(e),
    };
    let k = levels.len();
    let classical: Vec<f64> = levels.iter().map(|l| l / levels[0]).collect();
    let eval = |ratios: &[f64], gamma: f64| -> Result<ExponentPoint> {
        design_point(&level_pmf(signal, &levels, ratios)?, gamma, e0, noise_n, noise_v)
    };
    let linear_ratios = match mode {
        FixedSignalMode::Classical => return eval(&classical, 0.0),
        _ if k == 1 => classical.clone(),
        _ if k == 2 => {
            let f = |r: f64| score(eval(&[1.0, r], 0.0));
            let e = scan_max(f, 1.0, 1e4, 49, true, opts.tol);
            if e.value >= f(classical[1]) {
                vec![1.0, e.arg]
            } else {
                classical.clone()
            }
        }
        _ => {
            let f = |x: &[f64]| {
                let mut r = vec![1.0];
                r.extend(x.iter().map(|v| v.exp()));
                -score(eval(&r, 0.0))
            };
            let x0: Vec<f64> = classical[1..].iter().map(|v| v.ln()).collect();
            let (x, v) = nelder_mead(f, &x0, &vec![0.5; k - 1], opts.tol, 400 * k);
            if -v >= score(eval(&classical, 0.0)) {
                let mut r = vec![1.0];
                r.extend(x.iter().map(|v| v.exp()));
                r
            } else {
                classical.clone()
            }
        }
    };
    let linear = eval(&linear_ratios, 0.0)?;
    if mode == FixedSignalMode::Linear {
        return Ok(linear);
    }
    let mut best = linear;
    if k == 1 {
        let f = |t: f64| score(eval(&[1.0], t));
        let e = scan_max(f, 1e-6, 1e3, 55, true, opts.tol);
        if e.value > best.e_md {
            best = eval(&[1.0], e.arg)?;
        }
    } else {
        let f = |x: &[f64]| {
            let mut r = vec![1.0];
            r.extend(x[1..].iter().map(|v| v.exp()));
            -score(eval(&r, x[0].exp()))
        };
        let mut x0 = vec![0.0];
        x0.extend(linear_ratios[1..].iter().map(|v| v.ln()));
        for lt in [-8.0, -5.0, -2.0, 1.0] {
            x0[0] = lt;
            let (x, v) = nelder_mead(f, &x0, &vec![0.7; k], opts.tol, 500 * k);
            if -v > best.e_md {
                let mut r = vec![1.0];
                r.extend(x[1..].iter().map(|v| v.exp()));
                best = eval(&r, x[0].exp())?;
            }
        }
    }
    if let Ok(p) = eval(&vec![0.0; k], 1.0) {
        if p.e_md > best.e_md {
            best = p;
        }
    }
    Ok(best)
}

fn solve_asymmetric(
    signal: &SignalPmf,
    e0: f64,
    mode: FixedSignalMode,
    noise_n: &NoiseModel,
    noise_v: &NoiseModel,
    opts: &SolverOptions,
) -> Result<ExponentPoint> {
    match mode {
        FixedSignalMode::Classical => {
            let scale = signal.power().sqrt();
            design_point(&signal.with_weights(|s| s / scale)?, 0.0, e0, noise_n, noise_v)
        }
        FixedSignalMode::Linear => Ok(optimal_weights(signal, e0, 0.0, noise_v, noise_n)?.1),
        FixedSignalMode::Energy => {
            let at = |g: f64| optimal_weights(signal, e0, g, noise_v, noise_n).map(|r| r.1);
            let mut best = at(0.0)?;
            let scale = 1.0 / noise_v.variance().sqrt().max(1e-300);
            let e = scan_max(
                |g| score(at(g)),
                1e-4 * scale,
                1e2 * scale,
                25,
                true,
                opts.tol.max(1e-7),
            );
            if e.value > best.e_md {
                best = at(e.arg)?;
            }
            Ok(best)
        }
    }
}

/// Noise pair of the Laplace examples: N ~ Laplace(q), V = N' + binary(z0).
pub fn laplace_setup(q: f64, z0: f64) -> Result<(NoiseModel, NoiseModel)> {
    let n = NoiseModel::laplace(q)?;
    Ok((n.clone(), NoiseModel::sum(n, NoiseModel::binary(z0)?)))
}

/// Noise pair of the uniform examples: N ~ U[-B, B], V = N' + binary(z0).
pub fn uniform_setup(b: f64, z0: f64) -> Result<(NoiseModel, NoiseModel)> {
    let n = NoiseModel::uniform(b)?;
    Ok((n.clone(), NoiseModel::sum(n, NoiseModel::binary(z0)?)))
}

/// 4-ASK signal in Laplace noise plus binary interference.
pub fn solve_example1(e0: f64, a: f64, q: f64, z0: f64, classical: bool) -> Result<ExponentPoint> {
    let (n, v) = laplace_setup(q, z0)?;
    let mode = if classical {
        FixedSignalMode::Classical
    } else {
        FixedSignalMode::Linear
    };
    solve_fixed_signal(&SignalPmf::ask4(a)?, e0, mode, &n, &v, &SolverOptions::default())
}

/// Ternary signal {-a, 0, a} (duty 1/2) in uniform noise, linear detector.
pub fn solve_example3_linear(e0: f64, a: f64, b: f64, z0: f64) -> Result<ExponentPoint> {
    let (n, v) = uniform_setup(b, z0)?;
    solve_fixed_signal(
        &SignalPmf::ternary(0.25, a)?,
        e0,
        FixedSignalMode::Linear,
        &n,
        &v,
        &SolverOptions::default(),
    )
}

/// As [`solve_example3_linear`] with the energy term optimized.
pub fn solve_example3_energy(e0: f64, a: f64, b: f64, z0: f64) -> Result<ExponentPoint> {
    let (n, v) = uniform_setup(b, z0)?;
    solve_fixed_signal(
        &SignalPmf::ternary(0.25, a)?,
        e0,
        FixedSignalMode::Energy,
        &n,
        &v,
        &SolverOptions::default(),
    )
}

/// Threshold meeting `e0` for the ternary linear detector with unit weights
/// in U[-B, B] noise.
pub fn threshold_curve(e0_grid: &[f64], b: f64) -> Result<Vec<(f64, f64)>> {
    if e0_grid.is_empty() {
        return Err(Error::invalid("empty e0 grid"));
    }
    let n = NoiseModel::uniform(b)?;
    let pmf = DiscreteJointPmf::from_weights(&[(-1.0, 0.25), (0.0, 0.5), (1.0, 0.25)])?;
    e0_grid
        .par_iter()
        .map(|&e0| Ok((e0, theta_for_e0(&pmf, 0.0, &n, e0)?.theta)))
        .collect()
}

/// Power budget and optional peak amplitude of the signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalBudget {
    pub power: f64,
    pub peak: Option<f64>,
}

impl SignalBudget {
    pub fn power(power: f64) -> Self {
        SignalBudget { power, peak: None }
    }

    pub fn with_peak(power: f64, peak: f64) -> Self {
        SignalBudget {
            power,
            peak: Some(peak),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(Error::invalid(format!("power budget must be > 0, got {}", self.power)));
        }
        if let Some(a) = self.peak {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::invalid(format!("peak amplitude must be > 0, got {a}")));
            }
        }
        Ok(())
    }

    /// Signal level at duty p: the largest one allowed by both limits.
    pub fn level(&self, p: f64) -> f64 {
        let s = (self.power / (2.0 * p)).sqrt();
        self.peak.map_or(s, |a| s.min(a))
    }

    /// Smallest duty worth searching.
    fn min_duty(&self) -> f64 {
        let floor = self.peak.map_or(0.0, |a| self.power / (2.0 * a * a));
        floor.clamp(1e-4, 0.5)
    }
}

fn ternary_point(
    p: f64,
    w: f64,
    t: f64,
    budget: &SignalBudget,
    e0: f64,
    noise_n: &NoiseModel,
    noise_v: &NoiseModel,
) -> Result<(TernaryDesign, ExponentPoint)> {
    let s = budget.level(p);
    let mut d = TernaryDesign {
        p,
        w,
        s,
        gamma: t,
        theta: 0.0,
    };
    let pt = design_point(&d.to_pmf()?, t, e0, noise_n, noise_v)?;
    d.theta = pt.theta_star;
    Ok((d, pt))
}

fn check_budget(e0: f64, budget: &SignalBudget) -> Result<()> {
    if !(e0 >= 0.0 && e0.is_finite()) {
        return Err(Error::invalid(format!("e0 must be >= 0, got {e0}")));
    }
    budget.validate()
}

/// Jointly optimal balanced-ternary signal and linear correlator under the
/// signal budget.
pub fn solve_joint_linear(
    e0: f64,
    budget: &SignalBudget,
    noise_n: &NoiseModel,
    noise_v: &NoiseModel,
) -> Result<(TernaryDesign, ExponentPoint)> {
    check_budget(e0, budget)?;
    let f = |p: f64| score(ternary_point(p, 1.0, 0.0, budget, e0, noise_n, noise_v).map(|r| r.1));
    let e = scan_max(f, budget.min_duty(), 0.5, 61, true, 1e-9);
    ternary_point(e.arg, 1.0, 0.0, budget, e0, noise_n, noise_v)
}

fn halton(i: usize, base: usize) -> f64 {
    let (mut f, mut r, mut i) = (1.0, 0.0, i);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Jointly optimal balanced-ternary signal, correlator and energy
/// coefficient. `seeds` are extra (p, gamma / w) starting points.
pub fn solve_joint_energy(
    e0: f64,
    budget: &SignalBudget,
    noise_n: &NoiseModel,
    noise_v: &NoiseModel,
    seeds: &[(f64, f64)],
    opts: &SolverOptions,
) -> Result<(TernaryDesign, ExponentPoint)> {
    check_budget(e0, budget)?;
    let lin = solve_joint_linear(e0, budget, noise_n, noise_v)?;
    let p_min = budget.min_duty();
    const LT_MIN: f64 = -30.0;
    let obj = |x: &[f64]| -> f64 {
        let p = x[0];
        if !(p >= p_min && p <= 0.5) || x[1] > 20.0 {
            return f64::INFINITY;
        }
        let t = if x[1] <= LT_MIN { 0.0 } else { x[1].exp() };
        -score(ternary_point(p, 1.0, t, budget, e0, noise_n, noise_v).map(|r| r.1))
    };
    let mut starts: Vec<(Vec<f64>, f64)> = (1..=opts.starts)
        .map(|i| {
            let x = vec![
                p_min.max(0.01) + (0.5 - p_min.max(0.01)) * halton(i, 2),
                (1e-4f64).ln() + halton(i, 3) * (1e5f64).ln(),
            ];
            let v = obj(&x);
            (x, v)
        })
        .collect();
    starts.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut inits: Vec<Vec<f64>> = starts.iter().take(4).map(|s| s.0.clone()).collect();
    inits.push(vec![lin.0.p, -8.0]);
    for &(p, t) in seeds {
        inits.push(vec![p.clamp(p_min, 0.5), if t > 0.0 { t.ln() } else { LT_MIN }]);
    }
    let mut best: (Vec<f64>, f64) = (vec![lin.0.p, LT_MIN], -lin.1.e_md);
    for x0 in &inits {
        let v0 = obj(x0);
        if v0 < best.1 {
            best = (x0.clone(), v0);
        }
        let step = [0.1 * x0[0].max(0.01), 1.0];
        let (x, v) = nelder_mead(obj, x0, &step, opts.tol, 300);
        if v < best.1 {
            best = (x, v);
        }
    }
    let energy_only = |p: f64| score(ternary_point(p, 0.0, 1.0, budget, e0, noise_n, noise_v).map(|r| r.1));
    let pure = scan_max(energy_only, p_min, 0.5, 25, true, opts.tol);
    if -pure.value < best.1 {
        return ternary_point(pure.arg, 0.0, 1.0, budget, e0, noise_n, noise_v);
    }
    let x = &best.0;
    let t = if x[1] <= LT_MIN { 0.0 } else { x[1].exp() };
    if t == 0.0 && x[0] == lin.0.p {
        return Ok(lin);
    }
    ternary_point(x[0], 1.0, t, budget, e0, noise_n, noise_v)
}

/// Trade-off curve to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMode {
    LinearFixedSignal,
    LinearJoint,
    EnergyFixedSignal,
    EnergyJoint,
    Classical,
}

/// A sweep over FA budgets for one design problem.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRequest {
    pub e0_grid: Vec<f64>,
    pub budget: SignalBudget,
    pub mode: CurveMode,
}

/// Noise models and fixed signal shared by the points of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveConfig {
    pub noise_n: NoiseModel,
    pub noise_v: NoiseModel,
    pub signal: SignalPmf,
    pub opts: SolverOptions,
}

/// One grid point of a sweep; failures are kept in-band.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub e0: f64,
    pub result: std::result::Result<ExponentPoint, String>,
}

impl CurveRequest {
    pub fn validate(&self) -> Result<()> {
        if self.e0_grid.is_empty() {
            return Err(Error::invalid("empty e0 grid"));
        }
        if self.e0_grid.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::invalid("e0 grid values must be finite and >= 0"));
        }
        if self.e0_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("e0 grid must be strictly increasing"));
        }
        Ok(())
    }
}

/// Evenly spaced grid of `steps` points on [lo, hi].
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Solve one point of a curve.
pub fn solve_point(mode: CurveMode, e0: f64, budget: &SignalBudget, cfg: &CurveConfig) -> Result<ExponentPoint> {
    let (n, v) = (&cfg.noise_n, &cfg.noise_v);
    match mode {
        CurveMode::Classical => solve_fixed_signal(&cfg.signal, e0, FixedSignalMode::Classical, n, v, &cfg.opts),
        CurveMode::LinearFixedSignal => solve_fixed_signal(&cfg.signal, e0, FixedSignalMode::Linear, n, v, &cfg.opts),
        CurveMode::EnergyFixedSignal => solve_fixed_signal(&cfg.signal, e0, FixedSignalMode::Energy, n, v, &cfg.opts),
        CurveMode::LinearJoint => solve_joint_linear(e0, budget, n, v).map(|r| r.1),
        CurveMode::EnergyJoint => {
            let mut seeds = Vec::new();
            if let Ok(levels) = positive_levels(&cfg.signal) {
                if levels.len() == 1 {
                    let p: f64 = cfg.signal.levels().iter().filter(|l| l.0 > 0.0).map(|l| l.1).sum();
                    if 2.0 * p * levels[0] * levels[0] <= budget.power * (1.0 + 1e-9)
                        && budget.peak.is_none_or(|a| levels[0] <= a)
                    {
                        if let Ok(pt) = solve_fixed_signal(&cfg.signal, e0, FixedSignalMode::Energy, n, v, &cfg.opts) {
                            let w = pt.design.pmf.atoms().iter().map(|a| a.w.abs()).fold(0.0, f64::max);
                            let t = if w > 0.0 { pt.gamma_star / w } else { 1e8 };
                            seeds.push((p, t));
                        }
                    }
                }
            }
            solve_joint_energy(e0, budget, n, v, &seeds, &cfg.opts).map(|r| r.1)
        }
    }
}

/// Solve every grid point (in parallel); output order follows the grid.
pub fn sweep(req: &CurveRequest, cfg: &CurveConfig) -> Result<Vec<CurvePoint>> {
    req.validate()?;
    Ok(req
        .e0_grid
        .par_iter()
        .map(|&e0| CurvePoint {
            e0,
            result: solve_point(req.mode, e0, &req.budget, cfg).map_err(|e| e.to_string()),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ternary_power() {
        let d = TernaryDesign {
            p: 0.25,
            w: 1.0,
            s: 4.0,
            gamma: 0.0,
            theta: 0.0,
        };
        assert_eq!(d.power(), 8.0);
        assert!(d.to_pmf().is_ok());
    }

    #[test]
    fn halton_points() {
        assert_eq!(halton(1, 2), 0.5);
        assert!((halton(2, 3) - 2.0 / 3.0).abs() < 1e-15);
    }
}
