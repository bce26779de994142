//! Monte Carlo estimates of the FA and MD probabilities of a detector at
//! finite block length, compared with the Chernoff bounds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{efa, emd, DetectorSpec, DiscreteJointPmf};
use crate::noise::NoiseModel;

/// Trials per independently seeded chunk.
pub const CHUNK: u64 = 1 << 16;
/// Fewer error events than this makes an estimate unreliable.
pub const MIN_HITS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    H0,
    H1,
}

/// Deterministic per-sample (w_t, s_t) sequence of length n.
#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement {
    pub w: Vec<f64>,
    pub s: Vec<f64>,
}

impl Arrangement {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

/// Realize the pmf at block length n: counts round(n * prob), with the
/// remainder on the (0, 0) atom. Without a zero atom counts come from the
/// largest-remainder rule.
pub fn arrange(pmf: &DiscreteJointPmf, n: usize) -> Result<Arrangement> {
    if n == 0 {
        return Err(Error::InvalidArrangement {
            n,
            reason: "block length must be positive".into(),
        });
    }
    let atoms = pmf.atoms();
    let zero = atoms.iter().position(|a| a.w == 0.0 && a.s == 0.0);
    let nf = n as f64;
    let mut counts: Vec<usize> = atoms.iter().map(|a| (nf * a.prob).round() as usize).collect();
    match zero {
        Some(z) => {
            let others: usize = counts.iter().enumerate().filter(|(i, _)| *i != z).map(|(_, c)| c).sum();
            if others > n {
                return Err(Error::InvalidArrangement {
                    n,
                    reason: format!("rounded counts of nonzero atoms total {others}"),
                });
            }
            counts[z] = n - others;
        }
        None => {
            let mut floors: Vec<usize> = atoms.iter().map(|a| (nf * a.prob).floor() as usize).collect();
            let mut rem = n - floors.iter().sum::<usize>().min(n);
            let mut order: Vec<usize> = (0..atoms.len()).collect();
            order.sort_by(|&a, &b| {
                let fa = nf * atoms[a].prob - floors[a] as f64;
                let fb = nf * atoms[b].prob - floors[b] as f64;
                fb.total_cmp(&fa).then(a.cmp(&b))
            });
            for &i in order.iter().cycle().take(atoms.len() * 2) {
                if rem == 0 {
                    break;
                }
                floors[i] += 1;
                rem -= 1;
            }
            counts = floors;
        }
    }
    for (a, &c) in atoms.iter().zip(&counts) {
        if (c as f64 - nf * a.prob).abs() > 1.0 + 1e-9 && !(zero.is_some() && a.w == 0.0 && a.s == 0.0) {
            return Err(Error::InvalidArrangement {
                n,
                reason: format!("atom {a:?} realized {c} times"),
            });
        }
    }
    if counts.iter().sum::<usize>() != n {
        return Err(Error::InvalidArrangement {
            n,
            reason: "counts do not add up to n".into(),
        });
    }
    let mut w = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for (a, &c) in atoms.iter().zip(&counts) {
        for _ in 0..c {
            w.push(a.w);
            s.push(a.s);
        }
    }
    Ok(Arrangement { w, s })
}

/// Error-event count of one hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialEstimate {
    pub trials: u64,
    pub hits: u64,
    pub p_hat: f64,
    /// Binomial standard error sqrt(p (1 - p) / trials).
    pub std_err: f64,
    pub insufficient_hits: bool,
}

impl TrialEstimate {
    fn new(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        TrialEstimate {
            trials,
            hits,
            p_hat: p,
            std_err: (p * (1.0 - p) / trials as f64).sqrt(),
            insufficient_hits: hits < MIN_HITS,
        }
    }

    /// -ln(p_hat) / n, or None without any error event.
    pub fn exponent(&self, n: usize) -> Option<f64> {
        (self.hits > 0).then(|| -self.p_hat.ln() / n as f64)
    }
}

/// Count trials in which the detector errs under `hyp`: T >= n theta under
/// H0, T < n theta under H1, with T = sum w_t Y_t + gamma Y_t^2.
#[allow(clippy::too_many_arguments)]
pub fn run_detector_trials(
    spec: &DetectorSpec,
    arrangement: &Arrangement,
    trials: u64,
    hyp: Hypothesis,
    noise_n: &NoiseModel,
    noise_v: &NoiseModel,
    seed: u64,
) -> Result<TrialEstimate> {
    spec.validate()?;
    let n = arrangement.len();
    if n == 0 {
        return Err(Error::invalid("empty arrangement"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let gamma = spec.gamma;
    let threshold = n as f64 * spec.theta;
    let active: Vec<(f64, f64)> = arrangement
        .w
        .iter()
        .zip(&arrangement.s)
        .filter(|(w, _)| **w != 0.0 || gamma != 0.0)
        .map(|(w, s)| (*w, if hyp == Hypothesis::H1 { *s } else { 0.0 }))
        .collect();
    let sampler = match hyp {
        Hypothesis::H0 => noise_n.sampler(),
        Hypothesis::H1 => noise_v.sampler(),
    };
    let chunks = trials.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(trials - c * CHUNK);
            let mut hits = 0;
            for _ in 0..len {
                let mut t = 0.0;
                for &(w, s) in &active {
                    let y = s + sampler.draw(&mut rng);
                    t += w * y + gamma * y * y;
                }
                let err = match hyp {
                    Hypothesis::H0 => t >= threshold,
                    Hypothesis::H1 => t < threshold,
                };
                hits += err as u64;
            }
            hits
        })
        .sum();
    Ok(TrialEstimate::new(hits, trials))
}

/// Simulated and predicted error behaviour at one block length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub n: usize,
    pub trials: u64,
    pub fa: TrialEstimate,
    pub md: TrialEstimate,
    pub empirical_efa: Option<f64>,
    pub empirical_emd: Option<f64>,
    #[serde(with = "crate::serde_f64")]
    pub predicted_efa: f64,
    #[serde(with = "crate::serde_f64")]
    pub predicted_emd: f64,
    /// exp(-n E_FA) and exp(-n E_MD).
    pub fa_bound: f64,
    pub md_bound: f64,
    /// p_hat <= bound + 3 standard errors.
    pub fa_within_bound: bool,
    pub md_within_bound: bool,
}

/// Simulate both hypotheses. The H1 stream uses `seed + 1`.
pub fn simulate(
    spec: &DetectorSpec,
    noise_n: &NoiseModel,
    noise_v: &NoiseModel,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<SimReport> {
    let arr = arrange(&spec.pmf, n)?;
    let fa = run_detector_trials(spec, &arr, trials, Hypothesis::H0, noise_n, noise_v, seed)?;
    let md = run_detector_trials(
        spec,
        &arr,
        trials,
        Hypothesis::H1,
        noise_n,
        noise_v,
        seed.wrapping_add(1),
    )?;
    let pe = efa(spec, noise_n)?.value;
    let pm = emd(spec, noise_v)?.value;
    let fa_bound = (-(n as f64) * pe).exp();
    let md_bound = (-(n as f64) * pm).exp();
    Ok(SimReport {
        n,
        trials,
        empirical_efa: fa.exponent(n),
        empirical_emd: md.exponent(n),
        predicted_efa: pe,
        predicted_emd: pm,
        fa_bound,
        md_bound,
        fa_within_bound: fa.p_hat <= fa_bound + 3.0 * fa.std_err,
        md_within_bound: md.p_hat <= md_bound + 3.0 * md.std_err,
        fa,
        md,
    })
}

/// Empirical exponents over a range of block lengths.
pub fn exponent_convergence(
    spec: &DetectorSpec,
    noise_n: &NoiseModel,
    noise_v: &NoiseModel,
    n_grid: &[usize],
    trials: u64,
    seed: u64,
) -> Result<Vec<SimReport>> {
    n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| simulate(spec, noise_n, noise_v, n, trials, seed.wrapping_add(2 * i as u64)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::Atom;

    #[test]
    fn arrangement_counts() {
        let pmf = DiscreteJointPmf::new(vec![
            Atom {
                w: -1.0,
                s: -1.0,
                prob: 0.3,
            },
            Atom {
                w: 0.0,
                s: 0.0,
                prob: 0.4,
            },
            Atom {
                w: 1.0,
                s: 1.0,
                prob: 0.3,
            },
        ])
        .unwrap();
        let a = arrange(&pmf, 7).unwrap();
        assert_eq!(a.len(), 7);
        assert_eq!(a.w.iter().filter(|w| **w == 1.0).count(), 2);
        assert!(arrange(&pmf, 0).is_err());
    }
}
