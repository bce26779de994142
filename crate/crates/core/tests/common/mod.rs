//! Shared helpers: random design LPs and a brute-force LP reference that
//! enumerates every set of independent columns.

#![allow(dead_code)]

use corrdet::lp::{build_lp_energy, build_lp_linear, joint_column, quantized_grid, LpInstance};
use corrdet::noise::NoiseModel;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn nm(s: &str) -> NoiseModel {
    s.parse().unwrap()
}

/// Solve A x = b for m x k `a` with independent columns; None if the columns
/// are dependent or the system is inconsistent.
fn solve_tall(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let (m, k) = (b.len(), a[0].len());
    for c in 0..k {
        let p = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..m {
            let f = a[r][c] / a[c][c];
            let pivot = a[c].clone();
            for (x, y) in a[r][c..k].iter_mut().zip(&pivot[c..k]) {
                *x -= f * y;
            }
            b[r] -= f * b[c];
        }
    }
    if b[k..].iter().any(|v| v.abs() > 1e-9) {
        return None;
    }
    let mut x = vec![0.0; k];
    for c in (0..k).rev() {
        let s: f64 = (c + 1..k).map(|j| a[c][j] * x[j]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Minimum objective over all feasible basic solutions, None if infeasible.
pub fn brute_force(lp: &LpInstance) -> Option<f64> {
    let m = lp.rows();
    let mut best: Option<f64> = None;
    for cols in (1..=m.min(lp.cols())).flat_map(|k| subsets(lp.cols(), k)) {
        let a: Vec<Vec<f64>> = (0..m)
            .map(|r| cols.iter().map(|&c| lp.constraints[r][c]).collect())
            .collect();
        let Some(xb) = solve_tall(a, lp.rhs.clone()) else {
            continue;
        };
        if xb.iter().any(|&v| v < -1e-10) {
            continue;
        }
        let mut x = vec![0.0; lp.cols()];
        for (&c, &v) in cols.iter().zip(&xb) {
            x[c] = v.max(0.0);
        }
        if lp.residuals(&x).iter().any(|r| r.abs() > 1e-8) {
            continue;
        }
        let obj = lp.objective(&x);
        best = Some(best.map_or(obj, |b: f64| b.min(obj)));
    }
    best
}

/// Random pmf on `n` points concentrated on a few atoms.
pub fn random_pmf(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for _ in 0..rng.random_range(1..5) {
        x[rng.random_range(0..n)] += rng.random_range(0.1..1.0);
    }
    let t: f64 = x.iter().sum();
    x.iter().map(|v| v / t).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Linear-detector LP whose rhs is realized by a random pmf `x0`.
pub fn linear_instance(rng: &mut ChaCha8Rng, k: usize) -> (LpInstance, Vec<f64>) {
    let models = [
        ("uniform:5", "uniform:5+binary:7"),
        ("gaussian:1", "gaussian:1.5"),
        ("laplace:4", "laplace:4+binary:7"),
    ];
    let (n, v) = models[rng.random_range(0..models.len())];
    let (n, v) = (nm(n), nm(v));
    let d = rng.random_range(0.5..4.0);
    let grid = quantized_grid(k, d);
    let alpha = rng.random_range(0.05..0.9) * if n.cgf_domain().hi.is_finite() { 4.0 / d } else { 1.0 };
    let lambda = rng.random_range(0.05..1.0);
    let theta = rng.random_range(0.0..3.0);
    let x0 = random_pmf(rng, grid.len());
    let load: f64 = grid.iter().zip(&x0).map(|(&w, p)| p * n.cgf(alpha * w).unwrap()).sum();
    let var: f64 = grid.iter().zip(&x0).map(|(&w, p)| p * w * w).sum();
    let lp = build_lp_linear(&grid, alpha, theta, alpha * theta - load, var, &n, lambda, &v).unwrap();
    (lp, x0)
}

pub fn energy_instance(rng: &mut ChaCha8Rng, k: usize) -> (LpInstance, Vec<f64>) {
    let (n, v) = (nm("uniform:5"), nm("uniform:5+binary:7"));
    let grid_w = quantized_grid(k, rng.random_range(0.5..3.0));
    let grid_s = quantized_grid(k, rng.random_range(1.0..8.0));
    let m = grid_w.len();
    let (alpha, gamma, lambda, theta) = (
        rng.random_range(0.05..1.0),
        rng.random_range(0.0..0.3),
        rng.random_range(0.05..1.0),
        rng.random_range(0.0..3.0),
    );
    let x0 = random_pmf(rng, m * m);
    let mut load = 0.0;
    let mut power = 0.0;
    for j in 0..m {
        for i in 0..m {
            let p = x0[joint_column(i, j, m)];
            load += p * n.joint_cgf(alpha * grid_w[i], alpha * gamma).unwrap();
            power += p * grid_s[j] * grid_s[j];
        }
    }
    let c = load + alpha * theta;
    let lp = build_lp_energy(&grid_w, &grid_s, alpha, gamma, theta, c, power, lambda, &n, &v).unwrap();
    (lp, x0)
}
