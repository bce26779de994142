//! `corrdet simulate`: Monte Carlo check of a stored design.

use std::path::PathBuf;

use clap::Args;
use corrdet::simulate::exponent_convergence;

use crate::design::load_records;
use crate::output::{num, opt, sink};
use crate::{CliError, CliResult};

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// JSON-lines file written by `corrdet design`.
    #[arg(long)]
    pub design: PathBuf,
    /// Which record of the file to simulate (0-based).
    #[arg(long, default_value_t = 0)]
    pub record: usize,
    /// Block lengths, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Trials per hypothesis and block length.
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    /// Base seed; every block length and hypothesis gets its own stream.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const HEADER: [&str; 17] = [
    "n",
    "trials",
    "fa_hits",
    "p_fa_hat",
    "p_fa_std_err",
    "empirical_efa",
    "predicted_efa",
    "fa_bound",
    "fa_within_bound",
    "md_hits",
    "p_md_hat",
    "p_md_std_err",
    "empirical_emd",
    "predicted_emd",
    "md_bound",
    "md_within_bound",
    "status",
];

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    if args.n.contains(&0) {
        return Err(CliError::Usage("block lengths must be positive".into()));
    }
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let recs = load_records(&args.design)?;
    let rec = recs.get(args.record).ok_or_else(|| {
        CliError::Usage(format!(
            "record {} requested but the file holds {}",
            args.record,
            recs.len()
        ))
    })?;
    let reports = exponent_convergence(
        &rec.point.design,
        &rec.noise_n,
        &rec.noise_v,
        &args.n,
        args.trials,
        args.seed,
    )?;
    let mut w = csv::Writer::from_writer(sink(args.out.as_deref())?);
    w.write_record(HEADER)?;
    for r in reports {
        let mut status = Vec::new();
        if r.fa.insufficient_hits {
            status.push("insufficient_fa_hits");
        }
        if r.md.insufficient_hits {
            status.push("insufficient_md_hits");
        }
        let status = if status.is_empty() {
            "ok".to_string()
        } else {
            status.join(";")
        };
        w.write_record([
            r.n.to_string(),
            r.trials.to_string(),
            r.fa.hits.to_string(),
            num(r.fa.p_hat),
            num(r.fa.std_err),
            opt(r.empirical_efa),
            num(r.predicted_efa),
            num(r.fa_bound),
            r.fa_within_bound.to_string(),
            r.md.hits.to_string(),
            num(r.md.p_hat),
            num(r.md.std_err),
            opt(r.empirical_emd),
            num(r.predicted_emd),
            num(r.md_bound),
            r.md_within_bound.to_string(),
            status,
        ])?;
    }
    w.flush()?;
    Ok(())
}
