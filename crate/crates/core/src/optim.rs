//! Scalar and low-dimensional derivative-free optimizers.

/// Location and value of an optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub arg: f64,
    pub value: f64,
}

/// Result of a search along the half-line (0, limit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySearch {
    pub arg: f64,
    pub value: f64,
    /// Objective still improving when the search hit `limit` (or ~1e300).
    pub escaped: bool,
    /// Best point collapsed onto the origin.
    pub at_zero: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Golden-section maximization of a unimodal function on [lo, hi].
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> Extremum {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = sanitize(f(x1));
    let mut f2 = sanitize(f(x2));
    let width0 = b - a;
    for _ in 0..300 {
        let mid = 0.5 * (a + b);
        if b - a <= rel_tol * mid.abs() || b - a <= 1e-15 * width0 {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = sanitize(f(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = sanitize(f(x1));
        }
    }
    if f1 >= f2 {
        Extremum { arg: x1, value: f1 }
    } else {
        Extremum { arg: x2, value: f2 }
    }
}

/// Golden-section minimization on [lo, hi].
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> Extremum {
    let e = golden_max(|x| -f(x), lo, hi, rel_tol);
    Extremum {
        arg: e.arg,
        value: -e.value,
    }
}

/// Maximize a unimodal function on the open half-line (0, limit).
///
/// Starts at `start`, grows or shrinks geometrically until the maximum is
/// bracketed, then refines by golden section. When `limit` is finite the
/// upward steps approach it by halving the remaining gap.
pub fn ray_max<F: FnMut(f64) -> f64>(mut f: F, start: f64, limit: f64, rel_tol: f64) -> RaySearch {
    let up = |x: f64| {
        if limit.is_finite() {
            (2.0 * x).min(0.5 * (x + limit))
        } else {
            2.0 * x
        }
    };
    let mut x0 = if start > 0.0 && start.is_finite() { start } else { 1.0 };
    if limit.is_finite() && x0 >= limit {
        x0 = 0.5 * limit;
    }
    let f0 = sanitize(f(x0));
    let x1 = up(x0);
    let f1 = sanitize(f(x1));
    if f1 > f0 {
        let (mut a, mut b, mut fb) = (x0, x1, f1);
        let mut c = up(b);
        let mut fc = sanitize(f(c));
        let mut steps = 0;
        while fc > fb {
            steps += 1;
            let next = up(c);
            if steps > 1100 || next > 1e300 || next <= c || (limit.is_finite() && limit - next <= 1e-15 * limit) {
                return RaySearch {
                    arg: c,
                    value: fc,
                    escaped: true,
                    at_zero: false,
                };
            }
            a = b;
            b = c;
            fb = fc;
            c = next;
            fc = sanitize(f(c));
        }
        let e = golden_max(&mut f, a, c, rel_tol);
        let best = if e.value >= fb {
            e
        } else {
            Extremum { arg: b, value: fb }
        };
        RaySearch {
            arg: best.arg,
            value: best.value,
            escaped: false,
            at_zero: false,
        }
    } else {
        let (mut b, mut fb, mut c) = (x0, f0, x1);
        let mut a = 0.5 * b;
        let mut fa = sanitize(f(a));
        let mut halvings = 0;
        while fa >= fb {
            halvings += 1;
            if halvings > 64 {
                return RaySearch {
                    arg: a,
                    value: fa,
                    escaped: false,
                    at_zero: true,
                };
            }
            c = b;
            b = a;
            fb = fa;
            a *= 0.5;
            fa = sanitize(f(a));
        }
        let e = golden_max(&mut f, a, c, rel_tol);
        let best = if e.value >= fb {
            e
        } else {
            Extremum { arg: b, value: fb }
        };
        RaySearch {
            arg: best.arg,
            value: best.value,
            escaped: false,
            at_zero: false,
        }
    }
}

/// Minimize a unimodal function on (0, limit); see [`ray_max`].
pub fn ray_min<F: FnMut(f64) -> f64>(mut f: F, start: f64, limit: f64, rel_tol: f64) -> RaySearch {
    let r = ray_max(
        |x| {
            let v = f(x);
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                -v
            }
        },
        start,
        limit,
        rel_tol,
    );
    RaySearch { value: -r.value, ..r }
}

/// Scan `n` points of [lo, hi] (log-spaced if `log`), then polish the best
/// cell by golden section. Robust to mild multimodality.
pub fn scan_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize, log: bool, rel_tol: f64) -> Extremum {
    let n = n.max(3);
    let pt = |i: usize| {
        let t = i as f64 / (n - 1) as f64;
        if log {
            (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        } else {
            lo + t * (hi - lo)
        }
    };
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..n {
        let v = sanitize(f(pt(i)));
        if v > best.1 {
            best = (i, v);
        }
    }
    let a = pt(best.0.saturating_sub(1));
    let c = pt((best.0 + 1).min(n - 1));
    let e = golden_max(&mut f, a, c, rel_tol);
    if e.value >= best.1 {
        e
    } else {
        Extremum {
            arg: pt(best.0),
            value: best.1,
        }
    }
}

/// Maximize over (0, inf) by scanning a log grid of `n` points spanning
/// `center * 10^(+-decades)`, sliding the window while the best point sits on
/// its edge, then polishing by golden section.
pub fn log_scan_max<F: FnMut(f64) -> f64>(mut f: F, center: f64, decades: f64, n: usize, rel_tol: f64) -> Extremum {
    let n = n.max(5);
    let mut lo = center.ln() - decades * std::f64::consts::LN_10;
    let mut hi = center.ln() + decades * std::f64::consts::LN_10;
    let mut cache: Vec<(f64, f64)> = Vec::new();
    let mut eval = |x: f64, f: &mut F| -> f64 {
        if let Some(&(_, v)) = cache.iter().find(|(c, _)| *c == x) {
            return v;
        }
        let v = sanitize(f(x));
        cache.push((x, v));
        v
    };
    let mut slides = 0;
    loop {
        let pts: Vec<f64> = (0..n)
            .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
            .collect();
        let vals: Vec<f64> = pts.iter().map(|&x| eval(x, &mut f)).collect();
        let mut ib = 0;
        for i in 1..n {
            if vals[i] > vals[ib] {
                ib = i;
            }
        }
        let width = hi - lo;
        let edge_lo = ib == 0 && vals[0] > f64::NEG_INFINITY && lo > -690.0;
        let edge_hi = ib == n - 1 && hi < 690.0;
        if slides < 8 && (edge_lo || edge_hi) {
            slides += 1;
            if edge_lo {
                hi = lo + width / (n - 1) as f64;
                lo -= width;
            } else {
                lo = hi - width / (n - 1) as f64;
                hi += width;
            }
            continue;
        }
        if vals[ib] == f64::NEG_INFINITY {
            return Extremum {
                arg: pts[n / 2],
                value: f64::NEG_INFINITY,
            };
        }
        let a = pts[ib.saturating_sub(1)];
        let c = pts[(ib + 1).min(n - 1)];
        let e = golden_max(&mut f, a, c, rel_tol);
        return if e.value >= vals[ib] {
            e
        } else {
            Extremum {
                arg: pts[ib],
                value: vals[ib],
            }
        };
    }
}

/// Brent's root finder on a sign-changing bracket [a, b].
pub fn brent_root<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return None;
        }
    }
    Some(b)
}

/// Nelder-Mead simplex minimization. Returns (argmin, min).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    ftol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let d = x0.len();
    let clean = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = clean(f(x0));
    simplex.push((x0.to_vec(), v0));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let v = clean(f(&x));
        simplex.push((x, v));
    }
    let mut evals = d + 1;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        let size: f64 = (1..=d)
            .map(|k| {
                simplex[k]
                    .0
                    .iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (worst - best).abs() <= ftol * (best.abs() + ftol) && size < 1e-7 {
            break;
        }
        if size < 1e-12 {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|p| p.0[j]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[d].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = clean(f(&xr));
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = clean(f(&xe));
            evals += 1;
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[d].1 {
                let x = along(-0.5);
                let v = clean(f(&x));
                (x, v)
            } else {
                let x = along(0.5);
                let v = clean(f(&x));
                (x, v)
            };
            evals += 1;
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = p.0.iter().zip(&x_best).map(|(a, b)| b + 0.5 * (a - b)).collect();
                    let v = clean(f(&x));
                    *p = (x, v);
                    evals += 1;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v)
}
