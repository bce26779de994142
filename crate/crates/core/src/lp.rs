//! Distribution-design linear programs and a dense two-phase simplex solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseModel;

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

/// min c'x subject to A x = b, x >= 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpInstance {
    pub cost: Vec<f64>,
    /// Row-major, `rhs.len()` rows by `cost.len()` columns.
    pub constraints: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    /// Basic columns at the returned vertex.
    pub basis: Vec<usize>,
    pub status: LpStatus,
}

impl LpSolution {
    pub fn nonzeros(&self, tol: f64) -> usize {
        self.values.iter().filter(|v| v.abs() > tol).count()
    }
}

impl LpInstance {
    pub fn new(cost: Vec<f64>, constraints: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let lp = LpInstance { cost, constraints, rhs };
        lp.validate()?;
        Ok(lp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.constraints.len() != self.rhs.len() {
            return Err(Error::invalid("constraint rows and rhs differ in length"));
        }
        if self.constraints.iter().any(|r| r.len() != self.cost.len()) {
            return Err(Error::invalid("constraint row length differs from cost length"));
        }
        let finite = self
            .cost
            .iter()
            .chain(&self.rhs)
            .chain(self.constraints.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("non-finite LP coefficient"));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn cols(&self) -> usize {
        self.cost.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// A x - b.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        self.constraints
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b)
            .collect()
    }
}

/// Levels (i / k) * d for i = -k..=k.
pub fn quantized_grid(k: usize, d: f64) -> Vec<f64> {
    let k = k as i64;
    (-k..=k).map(|i| i as f64 / k as f64 * d).collect()
}

fn check_symmetric(grid: &[f64], what: &str) -> Result<()> {
    let n = grid.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "{what} grid needs an odd number >= 3 of levels, got {n}"
        )));
    }
    for i in 0..n {
        let (a, b) = (grid[i], grid[n - 1 - i]);
        if (a + b).abs() > 1e-12 * a.abs().max(1.0) {
            return Err(Error::invalid(format!("{what} grid is not symmetric about 0")));
        }
        if i > 0 && grid[i] <= grid[i - 1] {
            return Err(Error::invalid(format!("{what} grid must be increasing")));
        }
    }
    Ok(())
}

/// Weight-distribution LP: cost C_V(lambda w_i); columns
/// (C_N(alpha w_i), w_i^2, 1); rhs (alpha theta - P, sigma_W^2, 1).
#[allow(clippy::too_many_arguments)]
pub fn build_lp_linear(
    grid_w: &[f64],
    alpha: f64,
    theta: f64,
    p_target: f64,
    var_target: f64,
    noise_n: &NoiseModel,
    lambda: f64,
    noise_v: &NoiseModel,
) -> Result<LpInstance> {
    check_symmetric(grid_w, "weight")?;
    let cost = grid_w
        .iter()
        .map(|&w| noise_v.cgf(lambda * w))
        .collect::<Result<Vec<_>>>()?;
    let c_n = grid_w
        .iter()
        .map(|&w| noise_n.cgf(alpha * w))
        .collect::<Result<Vec<_>>>()?;
    let rows = vec![c_n, grid_w.iter().map(|w| w * w).collect(), vec![1.0; grid_w.len()]];
    LpInstance::new(cost, rows, vec![alpha * theta - p_target, var_target, 1.0])
}

/// Column of atom (w_i, s_j) in the joint LP: the S index selects the block.
pub fn joint_column(i: usize, j: usize, levels: usize) -> usize {
    j * levels + i
}

/// Joint (W, S) distribution LP on a product grid. Cost is minus the MD
/// objective per atom, C~_V(lambda w + 2 lambda gamma s, -lambda gamma) -
/// lambda w s - lambda gamma s^2; rows are C~_N(alpha w, alpha gamma), s^2
/// and 1 with rhs (C - alpha theta, P, 1).
#[allow(clippy::too_many_arguments)]
pub fn build_lp_energy(
    grid_w: &[f64],
    grid_s: &[f64],
    alpha: f64,
    gamma: f64,
    theta: f64,
    c_target: f64,
    p_target: f64,
    lambda: f64,
    noise_n: &NoiseModel,
    noise_v: &NoiseModel,
) -> Result<LpInstance> {
    check_symmetric(grid_w, "weight")?;
    check_symmetric(grid_s, "signal")?;
    if grid_w.len() != grid_s.len() {
        return Err(Error::invalid("weight and signal grids must have the same size"));
    }
    let m = grid_w.len();
    let mut cost = vec![0.0; m * m];
    let mut row_c = vec![0.0; m * m];
    let mut row_p = vec![0.0; m * m];
    let c_n = grid_w
        .iter()
        .map(|&w| noise_n.joint_cgf(alpha * w, alpha * gamma))
        .collect::<Result<Vec<_>>>()?;
    for (j, &s) in grid_s.iter().enumerate() {
        for (i, &w) in grid_w.iter().enumerate() {
            let col = joint_column(i, j, m);
            let cv = noise_v.joint_cgf(lambda * w + 2.0 * lambda * gamma * s, -lambda * gamma)?;
            cost[col] = cv - lambda * w * s - lambda * gamma * s * s;
            row_c[col] = c_n[i];
            row_p[col] = s * s;
        }
    }
    LpInstance::new(
        cost,
        vec![row_c, row_p, vec![1.0; m * m]],
        vec![c_target - alpha * theta, p_target, 1.0],
    )
}

/// (p_i + p_{-i}) / 2 over a symmetric grid.
pub fn symmetrize(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n).map(|i| 0.5 * (values[i] + values[n - 1 - i])).collect()
}

/// Joint version of [`symmetrize`]: averages atoms (w, s) and (-w, -s).
pub fn symmetrize_joint(values: &[f64], levels: usize) -> Result<Vec<f64>> {
    if values.len() != levels * levels {
        return Err(Error::invalid("joint vector length must be levels^2"));
    }
    let mut out = vec![0.0; values.len()];
    for j in 0..levels {
        for i in 0..levels {
            let a = joint_column(i, j, levels);
            let b = joint_column(levels - 1 - i, levels - 1 - j, levels);
            out[a] = 0.5 * (values[a] + values[b]);
        }
    }
    Ok(out)
}

struct Tableau {
    /// m rows of n + 1 entries (last is the rhs).
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pr = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k != r {
                let f = row[c];
                if f != 0.0 {
                    for (x, y) in row.iter_mut().zip(&pr) {
                        *x -= f * y;
                    }
                    row[c] = 0.0;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced cost of column j for costs `c`.
    fn reduced(&self, c: &[f64], j: usize) -> f64 {
        c[j] - self
            .rows
            .iter()
            .zip(&self.basis)
            .map(|(row, &b)| c[b] * row[j])
            .sum::<f64>()
    }

    /// Bland's-rule simplex over columns `allowed`; false if unbounded.
    fn run(&mut self, c: &[f64], allowed: usize) -> bool {
        let rhs = self.rows.first().map_or(0, |r| r.len() - 1);
        let scale = c.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        loop {
            let entering = (0..allowed).find(|&j| !self.basis.contains(&j) && self.reduced(c, j) < -PIVOT_TOL * scale);
            let Some(j) = entering else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[j] > PIVOT_TOL {
                    let ratio = row[rhs] / row[j];
                    let better = match leave {
                        None => true,
                        Some((lr, lv)) => ratio < lv - 1e-15 || (ratio <= lv + 1e-15 && self.basis[r] < self.basis[lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, j),
                None => return false,
            }
        }
    }
}

/// Two-phase simplex with Bland's rule; returns a basic (vertex) solution.
pub fn simplex_solve(lp: &LpInstance) -> Result<LpSolution> {
    lp.validate()?;
    let (m, n) = (lp.rows(), lp.cols());
    let mut rows = Vec::with_capacity(m);
    for (a, &b) in lp.constraints.iter().zip(&lp.rhs) {
        let norm = a.iter().fold(b.abs(), |acc, v| acc.max(v.abs()));
        let norm = if norm > 0.0 { norm } else { 1.0 };
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        let mut row: Vec<f64> = a.iter().map(|v| sign * v / norm).collect();
        row.extend(std::iter::repeat_n(0.0, m));
        row.push(sign * b / norm);
        rows.push(row);
    }
    for (r, row) in rows.iter_mut().enumerate() {
        row[n + r] = 1.0;
    }
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
    };
    let mut phase1 = vec![0.0; n + m];
    for v in &mut phase1[n..] {
        *v = 1.0;
    }
    t.run(&phase1, n + m);
    let infeas: f64 = t
        .rows
        .iter()
        .zip(&t.basis)
        .filter(|(_, &b)| b >= n)
        .map(|(row, _)| row[n + m])
        .sum();
    let infeasible = LpSolution {
        values: vec![0.0; n],
        objective: f64::NAN,
        basis: vec![],
        status: LpStatus::Infeasible,
    };
    if infeas > FEAS_TOL {
        return Ok(infeasible);
    }
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| t.rows[r][j].abs() > PIVOT_TOL && !t.basis.contains(&j)) {
                Some(j) => {
                    t.pivot(r, j);
                    r += 1;
                }
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }
    let mut cost = lp.cost.clone();
    cost.extend(std::iter::repeat_n(0.0, m));
    if !t.run(&cost, n) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            ..infeasible
        });
    }
    let mut values = vec![0.0; n];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < n {
            values[b] = row[n + m].max(0.0);
        }
    }
    let mut basis: Vec<usize> = t.basis.iter().copied().filter(|&b| b < n).collect();
    basis.sort_unstable();
    Ok(LpSolution {
        objective: lp.objective(&values),
        values,
        basis,
        status: LpStatus::Optimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        let lp = LpInstance::new(
            vec![1.0, 2.0, 0.5],
            vec![vec![1.0, 1.0, 1.0], vec![1.0, -1.0, 0.0]],
            vec![1.0, 0.2],
        )
        .unwrap();
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 0.6).abs() < 1e-12, "{s:?}");
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LpInstance::new(vec![0.0, 0.0], vec![vec![1.0, 1.0]], vec![-1.0]).unwrap();
        assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Infeasible);
        let lp = LpInstance::new(vec![-1.0, 0.0], vec![vec![1.0, -1.0]], vec![0.0]).unwrap();
        assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Unbounded);
    }
}
