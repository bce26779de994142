//! Shared flags and the per-example defaults.

use clap::Args;
use corrdet::exponents::SignalPmf;
use corrdet::joint_design::{laplace_setup, linspace, uniform_setup, SignalBudget, SolverOptions};
use corrdet::noise::NoiseModel;

use crate::{CliError, CliResult};

/// Physical parameters; unset values fall back to the example defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct Params {
    /// Signal amplitude a.
    #[arg(long)]
    pub a: Option<f64>,
    /// Laplace noise rate q (density (q/2) exp(-q|x|)).
    #[arg(long)]
    pub q: Option<f64>,
    /// Binary interference amplitude z0.
    #[arg(long)]
    pub z0: Option<f64>,
    /// Uniform noise half-width B.
    #[arg(long = "B")]
    pub b: Option<f64>,
    /// Signal power budget P_s.
    #[arg(long = "Ps")]
    pub p_s: Option<f64>,
    /// Peak signal amplitude for joint designs (example 4 defaults to a).
    #[arg(long)]
    pub peak: Option<f64>,
    /// Drop the peak-amplitude limit.
    #[arg(long, conflicts_with = "peak")]
    pub no_peak: bool,
    /// Relative tolerance of the scalar searches.
    #[arg(long)]
    pub tol: Option<f64>,
}

/// E_0 grid flags.
#[derive(Args, Debug, Clone, Default)]
pub struct Grid {
    /// Smallest FA exponent of the grid (default per example).
    #[arg(long = "e0-min")]
    pub e0_min: Option<f64>,
    /// Largest FA exponent of the grid.
    #[arg(long = "e0-max")]
    pub e0_max: Option<f64>,
    /// Number of evenly spaced grid points.
    #[arg(long = "e0-steps", default_value_t = 61)]
    pub e0_steps: usize,
}

/// Fully resolved configuration of one example.
#[derive(Debug, Clone)]
pub struct Setup {
    pub noise_n: NoiseModel,
    pub noise_v: NoiseModel,
    pub signal: SignalPmf,
    pub budget: SignalBudget,
    pub opts: SolverOptions,
    pub e0_range: (f64, f64),
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be a positive number, got {v}")))
    }
}

impl Params {
    pub fn resolve(&self, example: u8) -> CliResult<Setup> {
        let laplace = matches!(example, 1 | 2);
        if !(1..=4).contains(&example) {
            return Err(CliError::Usage(format!(
                "--example must be 1, 2, 3 or 4, got {example}"
            )));
        }
        let a = positive("a", self.a.unwrap_or(if laplace { 4.0 } else { 6.0 }))?;
        let z0 = positive("z0", self.z0.unwrap_or(7.0))?;
        let (noise_n, noise_v) = if laplace {
            laplace_setup(positive("q", self.q.unwrap_or(4.0))?, z0)?
        } else {
            uniform_setup(positive("B", self.b.unwrap_or(5.0))?, z0)?
        };
        let default_power = match example {
            1 | 2 => 5.0 * a * a,
            3 => 0.5 * a * a,
            _ => 8.0,
        };
        let p_s = positive("Ps", self.p_s.unwrap_or(default_power))?;
        let peak = match (self.no_peak, self.peak, example) {
            (true, _, _) => None,
            (false, Some(v), _) => Some(positive("peak", v)?),
            (false, None, 4) => Some(a),
            _ => None,
        };
        let signal = match example {
            1 | 2 => SignalPmf::ask4(a)?,
            3 => SignalPmf::ternary(0.25, a)?,
            _ => SignalPmf::ternary(0.25, (2.0 * p_s).sqrt())?,
        };
        let mut opts = SolverOptions::default();
        if let Some(t) = self.tol {
            opts.tol = positive("tol", t)?;
        }
        let e0_range = match example {
            1 | 2 => (0.0, 15.0),
            3 => (0.0, 3.0),
            _ => (0.0, 4.0),
        };
        Ok(Setup {
            noise_n,
            noise_v,
            signal,
            budget: SignalBudget { power: p_s, peak },
            opts,
            e0_range,
        })
    }
}

impl Grid {
    pub fn resolve(&self, default: (f64, f64)) -> CliResult<Vec<f64>> {
        let lo = self.e0_min.unwrap_or(default.0);
        let hi = self.e0_max.unwrap_or(default.1);
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0) {
            return Err(CliError::Usage(format!("bad e0 range [{lo}, {hi}]")));
        }
        if self.e0_steps == 0 || (self.e0_steps > 1 && hi <= lo) {
            return Err(CliError::Usage(format!(
                "e0 grid needs steps >= 1 and e0-max > e0-min, got {} steps on [{lo}, {hi}]",
                self.e0_steps
            )));
        }
        Ok(linspace(lo, hi, self.e0_steps))
    }
}

/// Parse `s:p,s:p,...` into a signal pmf.
pub fn parse_signal(text: &str) -> CliResult<SignalPmf> {
    let mut levels = Vec::new();
    for item in text.split(',') {
        let (s, p) = item
            .trim()
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("signal level '{item}' is not level:prob")))?;
        let s: f64 = s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad signal level '{s}'")))?;
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad probability '{p}'")))?;
        levels.push((s, p));
    }
    SignalPmf::new(levels).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn parse_noise(text: &str) -> CliResult<NoiseModel> {
    text.parse().map_err(|e: corrdet::Error| CliError::Usage(e.to_string()))
}
