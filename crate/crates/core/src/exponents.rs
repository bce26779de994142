//! Chernoff false-alarm and missed-detection exponents of the statistic
//! T = sum w_t Y_t + gamma sum Y_t^2 against the threshold n*theta.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::optim::{ray_max, ray_min};

const PROB_TOL: f64 = 1e-12;
const SEARCH_TOL: f64 = 1e-11;

/// One (w, s) pair of the empirical joint distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub w: f64,
    pub s: f64,
    pub prob: f64,
}

/// Finite joint distribution of correlator weights and signal samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteJointPmf {
    atoms: Vec<Atom>,
}

impl DiscreteJointPmf {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let pmf = DiscreteJointPmf { atoms };
        pmf.validate()?;
        Ok(pmf)
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::invalid("pmf has no atoms"));
        }
        let mut total = 0.0;
        for a in &self.atoms {
            if !(a.w.is_finite() && a.s.is_finite() && a.prob.is_finite()) || a.prob < 0.0 {
                return Err(Error::invalid(format!("bad atom {a:?}")));
            }
            total += a.prob;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::invalid(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    /// Weights only, with s = 0 (enough for FA computations).
    pub fn from_weights(weights: &[(f64, f64)]) -> Result<Self> {
        Self::new(weights.iter().map(|&(w, prob)| Atom { w, s: 0.0, prob }).collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn live(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| a.prob > 0.0)
    }

    pub fn mean_w2(&self) -> f64 {
        self.live().map(|a| a.prob * a.w * a.w).sum()
    }

    pub fn mean_ws(&self) -> f64 {
        self.live().map(|a| a.prob * a.w * a.s).sum()
    }

    /// Signal power E[S^2].
    pub fn power(&self) -> f64 {
        self.live().map(|a| a.prob * a.s * a.s).sum()
    }

    /// The same pmf with every weight multiplied by `x`.
    pub fn scale_weights(&self, x: f64) -> Self {
        DiscreteJointPmf {
            atoms: self.atoms.iter().map(|a| Atom { w: a.w * x, ..*a }).collect(),
        }
    }

    /// Marginal of S.
    pub fn signal_marginal(&self) -> SignalPmf {
        let mut levels: Vec<(f64, f64)> = Vec::new();
        for a in &self.atoms {
            match levels.iter_mut().find(|(s, _)| *s == a.s) {
                Some(l) => l.1 += a.prob,
                None => levels.push((a.s, a.prob)),
            }
        }
        SignalPmf { levels }
    }

    /// The same pmf with (w, s) -> (-w, -s).
    pub fn mirrored(&self) -> Self {
        DiscreteJointPmf {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    w: -a.w,
                    s: -a.s,
                    prob: a.prob,
                })
                .collect(),
        }
    }
}

/// Marginal pmf of the signal samples: (level, probability) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalPmf {
    levels: Vec<(f64, f64)>,
}

impl SignalPmf {
    pub fn new(levels: Vec<(f64, f64)>) -> Result<Self> {
        let s = SignalPmf { levels };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::invalid("signal pmf has no levels"));
        }
        let mut total = 0.0;
        for &(s, p) in &self.levels {
            if !(s.is_finite() && p.is_finite()) || p < 0.0 {
                return Err(Error::invalid(format!("bad signal level ({s}, {p})")));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::invalid(format!("signal probabilities sum to {total}")));
        }
        Ok(())
    }

    /// Equiprobable 4-ASK on {-3a, -a, a, 3a}.
    pub fn ask4(a: f64) -> Result<Self> {
        Self::new(vec![(-3.0 * a, 0.25), (-a, 0.25), (a, 0.25), (3.0 * a, 0.25)])
    }

    /// {-s, 0, s} with probabilities (p, 1 - 2p, p).
    pub fn ternary(p: f64, s: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::invalid(format!("duty p must lie in [0, 1/2], got {p}")));
        }
        Self::new(vec![(-s, p), (0.0, 1.0 - 2.0 * p), (s, p)])
    }

    pub fn levels(&self) -> &[(f64, f64)] {
        &self.levels
    }

    pub fn power(&self) -> f64 {
        self.levels.iter().map(|&(s, p)| p * s * s).sum()
    }

    /// Invariant under s -> -s (to `tol` in probability).
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.levels.iter().all(|&(s, _)| {
            let mirror: f64 = self
                .levels
                .iter()
                .filter(|&&(t, _)| (t + s).abs() <= 1e-12 * s.abs().max(1.0))
                .map(|&(_, q)| q)
                .sum();
            let own: f64 = self
                .levels
                .iter()
                .filter(|&&(t, _)| (t - s).abs() <= 1e-12 * s.abs().max(1.0))
                .map(|&(_, q)| q)
                .sum();
            (mirror - own).abs() <= tol
        })
    }

    /// Joint pmf pairing each level with the weight `w(s)`.
    pub fn with_weights<F: FnMut(f64) -> f64>(&self, mut w: F) -> Result<DiscreteJointPmf> {
        DiscreteJointPmf::new(self.levels.iter().map(|&(s, prob)| Atom { w: w(s), s, prob }).collect())
    }
}

/// Detector: weights/signal pmf, energy coefficient and per-sample threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub pmf: DiscreteJointPmf,
    pub gamma: f64,
    #[serde(with = "crate::serde_f64")]
    pub theta: f64,
}

impl DetectorSpec {
    pub fn new(pmf: DiscreteJointPmf, gamma: f64, theta: f64) -> Result<Self> {
        let s = DetectorSpec { pmf, gamma, theta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.pmf.validate()?;
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if self.theta.is_nan() {
            return Err(Error::invalid("theta is NaN"));
        }
        Ok(())
    }
}

/// Value of a Chernoff supremum and its maximizer. `value` is +inf for an
/// unbounded exponent (the error event is impossible).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffSup {
    #[serde(with = "crate::serde_f64")]
    pub value: f64,
    #[serde(with = "crate::serde_f64")]
    pub arg: f64,
}

impl ChernoffSup {
    pub fn is_unbounded(&self) -> bool {
        self.value == f64::INFINITY
    }

    const UNBOUNDED: ChernoffSup = ChernoffSup {
        value: f64::INFINITY,
        arg: f64::INFINITY,
    };
    const ZERO: ChernoffSup = ChernoffSup { value: 0.0, arg: 0.0 };
}

/// One point of the FA/MD trade-off.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentPoint {
    pub e0: f64,
    #[serde(with = "crate::serde_f64")]
    pub e_fa: f64,
    #[serde(with = "crate::serde_f64")]
    pub e_md: f64,
    #[serde(with = "crate::serde_f64")]
    pub alpha_star: f64,
    #[serde(with = "crate::serde_f64")]
    pub lambda_star: f64,
    pub gamma_star: f64,
    #[serde(with = "crate::serde_f64")]
    pub theta_star: f64,
    pub design: DetectorSpec,
}

/// Threshold meeting an FA budget, with the minimizing Chernoff parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaChoice {
    pub theta: f64,
    pub alpha_star: f64,
}

/// Range of x -> w x + g x^2 over a union of intervals.
fn quad_range(support: &[(f64, f64)], w: f64, g: f64, shift: f64) -> (f64, f64) {
    let f = |t: f64| {
        let y = shift + t;
        w * y + g * y * y
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(a, b) in support {
        for v in [f(a), f(b)] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if g > 0.0 {
            let vertex = -w / (2.0 * g) - shift;
            if vertex > a && vertex < b {
                lo = lo.min(f(vertex));
            }
        }
    }
    (lo, hi)
}

/// Essential supremum of the per-sample statistic under H0 (None if unbounded).
pub fn h0_stat_sup(spec: &DetectorSpec, noise_n: &NoiseModel) -> Option<f64> {
    let sup = noise_n.support()?;
    Some(
        spec.pmf
            .live()
            .map(|a| a.prob * quad_range(&sup, a.w, spec.gamma, 0.0).1)
            .sum(),
    )
}

/// Essential infimum of the per-sample statistic under H1 (None if unbounded).
pub fn h1_stat_inf(spec: &DetectorSpec, noise_v: &NoiseModel) -> Option<f64> {
    let sup = noise_v.support()?;
    Some(
        spec.pmf
            .live()
            .map(|a| a.prob * quad_range(&sup, a.w, spec.gamma, a.s).0)
            .sum(),
    )
}

fn check_param(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")))
    }
}

fn trivial_stat(spec: &DetectorSpec) -> bool {
    spec.gamma == 0.0 && spec.pmf.live().all(|a| a.w == 0.0)
}

/// E_FA(alpha) = alpha*theta - E[C~_N(alpha W, alpha gamma)].
pub fn efa_at(spec: &DetectorSpec, noise_n: &NoiseModel, alpha: f64) -> Result<f64> {
    check_param("alpha", alpha)?;
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let mut c = 0.0;
    for a in spec.pmf.live() {
        c += a.prob * noise_n.joint_cgf(alpha * a.w, alpha * spec.gamma)?;
    }
    Ok(alpha * spec.theta - c)
}

/// E_MD(lambda) = E[lambda(WS + gamma S^2 - theta) - C~_V(lambda W + 2 lambda gamma S, -lambda gamma)].
pub fn emd_at(spec: &DetectorSpec, noise_v: &NoiseModel, lambda: f64) -> Result<f64> {
    check_param("lambda", lambda)?;
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let g = spec.gamma;
    let mut acc = 0.0;
    for a in spec.pmf.live() {
        let lin = lambda * (a.w * a.s + g * a.s * a.s - spec.theta);
        let c = noise_v.joint_cgf(lambda * a.w + 2.0 * lambda * g * a.s, -lambda * g)?;
        acc += a.prob * (lin - c);
    }
    Ok(acc)
}

fn alpha_limit(spec: &DetectorSpec, noise_n: &NoiseModel) -> f64 {
    spec.pmf
        .live()
        .map(|a| noise_n.ray_limit(a.w, spec.gamma))
        .fold(f64::INFINITY, f64::min)
}

fn lambda_limit(spec: &DetectorSpec, noise_v: &NoiseModel) -> f64 {
    spec.pmf
        .live()
        .map(|a| noise_v.ray_limit(a.w + 2.0 * spec.gamma * a.s, -spec.gamma))
        .fold(f64::INFINITY, f64::min)
}

/// Natural scale for a Chernoff parameter: inverse spread of the statistic.
fn start_scale(spec: &DetectorSpec, noise: &NoiseModel) -> f64 {
    let var = noise.variance();
    let spread = (spec.pmf.mean_w2() * var).sqrt() + spec.gamma * var;
    if spread > 0.0 && spread.is_finite() {
        1.0 / spread
    } else {
        1.0
    }
}

/// sup over alpha >= 0 of [`efa_at`].
pub fn efa(spec: &DetectorSpec, noise_n: &NoiseModel) -> Result<ChernoffSup> {
    spec.validate()?;
    if trivial_stat(spec) {
        return Ok(if spec.theta > 0.0 {
            ChernoffSup::UNBOUNDED
        } else {
            ChernoffSup::ZERO
        });
    }
    if let Some(sup) = h0_stat_sup(spec, noise_n) {
        if spec.theta > sup + 1e-12 * sup.abs().max(1.0) {
            return Ok(ChernoffSup::UNBOUNDED);
        }
    }
    let limit = alpha_limit(spec, noise_n);
    if limit <= 0.0 {
        return Err(Error::domain("efa: no admissible alpha > 0", 0.0, spec.gamma));
    }
    let r = ray_max(
        |a| efa_at(spec, noise_n, a).unwrap_or(f64::NEG_INFINITY),
        start_scale(spec, noise_n),
        limit,
        SEARCH_TOL,
    );
    if r.at_zero || r.value <= 0.0 {
        return Ok(ChernoffSup::ZERO);
    }
    Ok(ChernoffSup {
        value: r.value,
        arg: r.arg,
    })
}

/// sup over lambda >= 0 of [`emd_at`].
pub fn emd(spec: &DetectorSpec, noise_v: &NoiseModel) -> Result<ChernoffSup> {
    spec.validate()?;
    if trivial_stat(spec) {
        return Ok(if spec.theta <= 0.0 {
            ChernoffSup::UNBOUNDED
        } else {
            ChernoffSup::ZERO
        });
    }
    if let Some(inf) = h1_stat_inf(spec, noise_v) {
        if spec.theta < inf - 1e-12 * inf.abs().max(1.0) {
            return Ok(ChernoffSup::UNBOUNDED);
        }
    }
    let limit = lambda_limit(spec, noise_v);
    if limit <= 0.0 {
        return Err(Error::domain("emd: no admissible lambda > 0", 0.0, -spec.gamma));
    }
    let r = ray_max(
        |l| emd_at(spec, noise_v, l).unwrap_or(f64::NEG_INFINITY),
        start_scale(spec, noise_v),
        limit,
        SEARCH_TOL,
    );
    if r.at_zero || r.value <= 0.0 {
        return Ok(ChernoffSup::ZERO);
    }
    Ok(ChernoffSup {
        value: r.value,
        arg: r.arg,
    })
}

/// Smallest threshold whose FA exponent is at least `e0`:
/// inf over alpha > 0 of (e0 + E[C~_N(alpha W, alpha gamma)]) / alpha.
pub fn theta_for_e0(weights: &DiscreteJointPmf, gamma: f64, noise_n: &NoiseModel, e0: f64) -> Result<ThetaChoice> {
    check_param("e0", e0)?;
    check_param("gamma", gamma)?;
    weights.validate()?;
    let spec = DetectorSpec {
        pmf: weights.clone(),
        gamma,
        theta: 0.0,
    };
    if trivial_stat(&spec) {
        return Err(Error::invalid("weights are all zero and gamma = 0"));
    }
    let mean = gamma * noise_n.variance();
    if e0 == 0.0 {
        return Ok(ThetaChoice {
            theta: mean,
            alpha_star: 0.0,
        });
    }
    let limit = alpha_limit(&spec, noise_n);
    if limit <= 0.0 {
        return Err(Error::domain("theta_for_e0: no admissible alpha > 0", 0.0, gamma));
    }
    let h = |a: f64| -> f64 {
        let mut c = 0.0;
        for at in weights.live() {
            match noise_n.joint_cgf(a * at.w, a * gamma) {
                Ok(v) => c += at.prob * v,
                Err(_) => return f64::INFINITY,
            }
        }
        (e0 + c) / a
    };
    let r = ray_min(h, start_scale(&spec, noise_n), limit, SEARCH_TOL);
    if !r.value.is_finite() {
        return Err(Error::domain("theta_for_e0: objective not finite", r.arg, gamma));
    }
    Ok(ThetaChoice {
        theta: r.value,
        alpha_star: r.arg,
    })
}

/// Both exponents of a detector.
pub fn evaluate(spec: &DetectorSpec, noise_n: &NoiseModel, noise_v: &NoiseModel, e0: f64) -> Result<ExponentPoint> {
    let fa = efa(spec, noise_n)?;
    let md = emd(spec, noise_v)?;
    Ok(ExponentPoint {
        e0,
        e_fa: fa.value,
        e_md: md.value,
        alpha_star: fa.arg,
        lambda_star: md.arg,
        gamma_star: spec.gamma,
        theta_star: spec.theta,
        design: spec.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(w: f64, s: f64, theta: f64) -> DetectorSpec {
        DetectorSpec::new(
            DiscreteJointPmf::new(vec![Atom { w, s, prob: 1.0 }]).unwrap(),
            0.0,
            theta,
        )
        .unwrap()
    }

    #[test]
    fn gaussian_points() {
        let g = NoiseModel::gaussian(1.0).unwrap();
        assert!((efa_at(&single(1.0, 0.0, 1.0), &g, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((emd_at(&single(1.0, 1.0, 0.0), &g, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let r = efa(&single(1.0, 0.0, 1.0), &g).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12 && (r.arg - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pmf_validation() {
        assert!(DiscreteJointPmf::from_weights(&[(1.0, 0.5)]).is_err());
        assert!(DiscreteJointPmf::from_weights(&[(1.0, 1.5), (0.0, -0.5)]).is_err());
    }
}
