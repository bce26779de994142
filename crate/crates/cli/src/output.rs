//! CSV cell formatting and output sinks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use corrdet::exponents::ExponentPoint;

/// Number cell: empty for NaN, `inf`/`-inf` for infinities, shortest
/// round-trip digits otherwise (exponent form for tiny or huge values).
pub fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e15) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

/// Level, weight and per-sign duty of the largest positive signal level.
pub fn top_level(p: &ExponentPoint) -> (f64, f64, f64) {
    let atoms = p.design.pmf.atoms();
    let s = atoms.iter().map(|a| a.s).fold(f64::NAN, f64::max);
    if s.is_nan() || s <= 0.0 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let top: Vec<_> = atoms.iter().filter(|a| a.s == s).collect();
    let prob: f64 = top.iter().map(|a| a.prob).sum();
    (top[0].w, s, prob)
}

/// Stdout when `path` is None.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}
