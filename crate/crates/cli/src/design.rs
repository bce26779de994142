//! `corrdet design` and `corrdet evaluate`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use corrdet::exponents::{evaluate as eval_spec, ExponentPoint};
use corrdet::joint_design::{
    solve_fixed_signal, solve_joint_energy, solve_joint_linear, FixedSignalMode, TernaryDesign,
};
use corrdet::noise::NoiseModel;
use serde::{Deserialize, Serialize};

use crate::args::{parse_noise, parse_signal, Grid, Params};
use crate::output::sink;
use crate::{CliError, CliResult};

#[derive(Args, Debug)]
pub struct DesignArgs {
    /// Example whose defaults fill unset parameters.
    #[arg(long, default_value_t = 1)]
    pub example: u8,
    /// Optimize the balanced-ternary signal jointly with the detector.
    #[arg(long)]
    pub joint: bool,
    /// Optimize the energy coefficient gamma.
    #[arg(long, conflicts_with = "gamma_zero")]
    pub gamma_free: bool,
    /// Linear correlator, gamma = 0 (default).
    #[arg(long)]
    pub gamma_zero: bool,
    /// Weights proportional to the signal.
    #[arg(long, conflicts_with_all = ["joint", "gamma_free"])]
    pub classical: bool,
    /// Channel noise N, e.g. `laplace:4`, `uniform:5`, `gaussian:1` (variance).
    #[arg(long = "noise-n")]
    pub noise_n: Option<String>,
    /// Signal-induced noise Z; under H1 the noise is N' + Z with N' ~ N.
    #[arg(long = "noise-z")]
    pub noise_z: Option<String>,
    /// Fixed signal pmf as `level:prob,...`.
    #[arg(long)]
    pub signal: Option<String>,
    /// Single FA budget (overrides the grid flags).
    #[arg(long)]
    pub e0: Option<f64>,
    #[command(flatten)]
    pub params: Params,
    #[command(flatten)]
    pub grid: Grid,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One JSON line of `corrdet design`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignRecord {
    pub mode: String,
    pub noise_n: NoiseModel,
    pub noise_v: NoiseModel,
    pub e0: f64,
    pub point: ExponentPoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ternary: Option<TernaryDesign>,
}

pub fn run(args: &DesignArgs) -> CliResult<()> {
    let mut setup = args.params.resolve(args.example)?;
    if let Some(n) = &args.noise_n {
        setup.noise_n = parse_noise(n)?;
    }
    if args.noise_n.is_some() || args.noise_z.is_some() {
        setup.noise_v = match &args.noise_z {
            Some(z) => NoiseModel::sum(setup.noise_n.clone(), parse_noise(z)?),
            None => setup.noise_n.clone(),
        };
    }
    if let Some(s) = &args.signal {
        setup.signal = parse_signal(s)?;
    }
    let grid = match args.e0 {
        Some(e) if e.is_finite() && e >= 0.0 => vec![e],
        Some(e) => return Err(CliError::Usage(format!("--e0 must be >= 0, got {e}"))),
        None if args.grid.e0_min.is_some() || args.grid.e0_max.is_some() => args.grid.resolve(setup.e0_range)?,
        None => vec![0.0],
    };
    let energy = args.gamma_free;
    let mode = match (args.joint, energy, args.classical) {
        (true, true, _) => "joint_energy",
        (true, false, _) => "joint_linear",
        (false, _, true) => "classical",
        (false, true, _) => "fixed_energy",
        (false, false, _) => "fixed_linear",
    };
    let (n, v) = (&setup.noise_n, &setup.noise_v);
    let mut out = sink(args.out.as_deref())?;
    for e0 in grid {
        let (point, ternary) = match mode {
            "joint_energy" => {
                let (d, p) = solve_joint_energy(e0, &setup.budget, n, v, &[], &setup.opts)?;
                (p, Some(d))
            }
            "joint_linear" => {
                let (d, p) = solve_joint_linear(e0, &setup.budget, n, v)?;
                (p, Some(d))
            }
            _ => {
                let m = match mode {
                    "classical" => FixedSignalMode::Classical,
                    "fixed_energy" => FixedSignalMode::Energy,
                    _ => FixedSignalMode::Linear,
                };
                (solve_fixed_signal(&setup.signal, e0, m, n, v, &setup.opts)?, None)
            }
        };
        let rec = DesignRecord {
            mode: mode.to_string(),
            noise_n: n.clone(),
            noise_v: v.clone(),
            e0,
            point,
            ternary,
        };
        writeln!(out, "{}", serde_json::to_string(&rec)?)?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_records(path: &std::path::Path) -> CliResult<Vec<DesignRecord>> {
    let text = fs::read_to_string(path)?;
    let recs = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect::<Result<Vec<DesignRecord>, _>>()?;
    if recs.is_empty() {
        return Err(CliError::Usage(format!("{} holds no design records", path.display())));
    }
    Ok(recs)
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// JSON-lines file written by `corrdet design`.
    #[arg(long)]
    pub design: PathBuf,
    /// Largest accepted deviation from the stored exponents.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
}

#[derive(Serialize)]
struct EvalLine {
    e0: f64,
    #[serde(with = "corrdet::serde_f64")]
    stored_e_fa: f64,
    #[serde(with = "corrdet::serde_f64")]
    stored_e_md: f64,
    #[serde(with = "corrdet::serde_f64")]
    e_fa: f64,
    #[serde(with = "corrdet::serde_f64")]
    e_md: f64,
    max_dev: f64,
    ok: bool,
}

fn dev(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

pub fn evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let mut bad = 0;
    let mut out = sink(None)?;
    for rec in load_records(&args.design)? {
        let p = eval_spec(&rec.point.design, &rec.noise_n, &rec.noise_v, rec.e0)?;
        let max_dev = dev(p.e_fa, rec.point.e_fa).max(dev(p.e_md, rec.point.e_md));
        let ok = max_dev <= args.tol;
        bad += !ok as usize;
        let line = EvalLine {
            e0: rec.e0,
            stored_e_fa: rec.point.e_fa,
            stored_e_md: rec.point.e_md,
            e_fa: p.e_fa,
            e_md: p.e_md,
            max_dev,
            ok,
        };
        writeln!(out, "{}", serde_json::to_string(&line)?)?;
    }
    out.flush()?;
    if bad > 0 {
        return Err(CliError::Numeric(format!(
            "{bad} record(s) deviate by more than {}",
            args.tol
        )));
    }
    Ok(())
}
