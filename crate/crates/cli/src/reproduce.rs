//! `corrdet reproduce`: curve pairs of the four worked examples.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use corrdet::joint_design::{sweep, threshold_curve, CurveConfig, CurveMode, CurvePoint, CurveRequest};

use crate::args::{Grid, Params};
use crate::output::{num, top_level};
use crate::{CliError, CliResult};

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Example number (1-4).
    #[arg(long)]
    pub example: u8,
    #[command(flatten)]
    pub params: Params,
    #[command(flatten)]
    pub grid: Grid,
    /// Output CSV (default exampleN.csv); the gnuplot script goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Curve identities of each example: (column name, mode).
pub fn curves(example: u8) -> [(&'static str, CurveMode); 2] {
    match example {
        1 => [
            ("optimal", CurveMode::LinearFixedSignal),
            ("classical", CurveMode::Classical),
        ],
        2 => [
            ("fixed", CurveMode::LinearFixedSignal),
            ("joint", CurveMode::LinearJoint),
        ],
        3 => [
            ("linear", CurveMode::LinearFixedSignal),
            ("energy", CurveMode::EnergyFixedSignal),
        ],
        _ => [
            ("fixed_energy", CurveMode::EnergyFixedSignal),
            ("joint_energy", CurveMode::EnergyJoint),
        ],
    }
}

const FIELDS: [&str; 9] = ["e_fa", "alpha", "lambda", "gamma", "w", "s", "p", "theta", "status"];

pub fn header(example: u8) -> Vec<String> {
    let names = curves(example).map(|c| c.0);
    let mut h = vec!["e0".to_string()];
    h.extend(names.iter().map(|n| format!("e_md_{n}")));
    for n in names {
        h.extend(FIELDS.iter().map(|f| format!("{f}_{n}")));
    }
    h
}

fn cells(pt: &CurvePoint) -> (String, Vec<String>) {
    match &pt.result {
        Ok(p) => {
            let (w, s, prob) = top_level(p);
            let vals = [
                p.e_fa,
                p.alpha_star,
                p.lambda_star,
                p.gamma_star,
                w,
                s,
                prob,
                p.theta_star,
            ];
            let mut v: Vec<String> = vals.iter().map(|x| num(*x)).collect();
            v.push("ok".into());
            (num(p.e_md), v)
        }
        Err(e) => {
            let mut v = vec![String::new(); FIELDS.len() - 1];
            v.push(e.replace([',', '\n'], ";"));
            (String::new(), v)
        }
    }
}

fn with_suffix(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("curve");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn gnuplot(example: u8, csv: &Path, theta_csv: Option<&Path>) -> String {
    let name = |p: &Path| p.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string();
    let png = with_suffix(csv, "", "png");
    let [a, b] = curves(example).map(|c| c.0);
    let mut s = format!(
        "set datafile separator ','\nset terminal pngcairo size 800,600\nset output '{}'\n\
         set xlabel 'E_0'\nset ylabel 'E_{{MD}}'\nset grid\n\
         plot '{csv}' using 1:2 with lines lw 2 title '{a}', \\\n     '{csv}' using 1:3 with lines lw 2 title '{b}'\n",
        name(&png),
        csv = name(csv),
    );
    if let Some(t) = theta_csv {
        s += &format!(
            "set output '{}'\nset xlabel 'theta'\nset ylabel 'E_0'\nplot '{}' using 2:1 with lines lw 2 title 'E_0 vs theta'\n",
            name(&with_suffix(csv, "_theta", "png")),
            name(t)
        );
    }
    s
}

pub fn run(args: &ReproduceArgs) -> CliResult<()> {
    let setup = args.params.resolve(args.example)?;
    let grid = args.grid.resolve(setup.e0_range)?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("example{}.csv", args.example)));
    let cfg = CurveConfig {
        noise_n: setup.noise_n.clone(),
        noise_v: setup.noise_v.clone(),
        signal: setup.signal.clone(),
        opts: setup.opts,
    };
    let mut results = Vec::new();
    for (_, mode) in curves(args.example) {
        let req = CurveRequest {
            e0_grid: grid.clone(),
            budget: setup.budget,
            mode,
        };
        results.push(sweep(&req, &cfg).map_err(|e| CliError::Usage(e.to_string()))?);
    }
    let mut w = csv::Writer::from_path(&out)?;
    w.write_record(header(args.example))?;
    let mut failures = 0;
    for (i, &e0) in grid.iter().enumerate() {
        let (ma, ca) = cells(&results[0][i]);
        let (mb, cb) = cells(&results[1][i]);
        failures += results[0][i].result.is_err() as usize + results[1][i].result.is_err() as usize;
        let mut rec = vec![num(e0), ma, mb];
        rec.extend(ca);
        rec.extend(cb);
        w.write_record(rec)?;
    }
    w.flush()?;
    let theta_path = if args.example == 3 {
        let b = args.params.b.unwrap_or(5.0);
        let path = with_suffix(&out, "_theta", "csv");
        let mut tw = csv::Writer::from_path(&path)?;
        tw.write_record(["e0", "theta"])?;
        for (e0, th) in threshold_curve(&grid, b)? {
            tw.write_record([num(e0), num(th)])?;
        }
        tw.flush()?;
        Some(path)
    } else {
        None
    };
    fs::write(
        with_suffix(&out, "", "gp"),
        gnuplot(args.example, &out, theta_path.as_deref()),
    )?;
    if failures > 0 {
        return Err(CliError::Numeric(format!(
            "{failures} grid point(s) failed; see the status columns of {}",
            out.display()
        )));
    }
    Ok(())
}
