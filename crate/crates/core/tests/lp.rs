mod common;

use common::{dot, energy_instance, linear_instance, nm};
use corrdet::lp::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_solution(lp: &LpInstance, x0: &[f64], oracle: bool) -> LpSolution {
    let sol = simplex_solve(lp).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    assert!(sol.values.iter().all(|&v| v >= 0.0));
    let scale = lp.rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    for r in lp.residuals(&sol.values) {
        assert!(r.abs() <= 1e-9 * scale, "residual {r:e}");
    }
    assert!(sol.nonzeros(1e-12) <= lp.rows(), "{} nonzeros", sol.nonzeros(1e-12));
    let obj_scale = lp.cost.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    assert!(sol.objective <= lp.objective(x0) + 1e-9 * obj_scale);
    if oracle {
        let best = common::brute_force(lp).expect("x0 is feasible");
        assert!(
            (sol.objective - best).abs() <= 1e-9 * obj_scale,
            "{} vs oracle {best}",
            sol.objective
        );
    }
    sol
}

#[test]
fn random_linear_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..120 {
        let k = if i < 80 {
            rng.random_range(1..8)
        } else {
            rng.random_range(8..=64)
        };
        let (lp, x0) = linear_instance(&mut rng, k);
        check_solution(&lp, &x0, lp.cols() <= 15);
    }
}

#[test]
fn random_energy_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for i in 0..40 {
        let k = if i < 30 {
            rng.random_range(1..3)
        } else {
            rng.random_range(3..6)
        };
        let (lp, x0) = energy_instance(&mut rng, k);
        check_solution(&lp, &x0, lp.cols() <= 25);
    }
}

#[test]
fn symmetrized_solution_is_still_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..30 {
        let k = rng.random_range(2..20);
        let (lp, x0) = linear_instance(&mut rng, k);
        let sol = check_solution(&lp, &x0, false);
        let sym = symmetrize(&sol.values);
        assert_eq!(symmetrize(&sym), sym);
        let scale = lp.rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        assert!(lp.residuals(&sym).iter().all(|r| r.abs() <= 1e-9 * scale));
        assert!((lp.objective(&sym) - sol.objective).abs() <= 1e-9 * sol.objective.abs().max(1.0));
    }
    for _ in 0..10 {
        let k = rng.random_range(1..4);
        let (lp, x0) = energy_instance(&mut rng, k);
        let sol = check_solution(&lp, &x0, false);
        let sym = symmetrize_joint(&sol.values, 2 * k + 1).unwrap();
        let scale = lp.rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        assert!(lp.residuals(&sym).iter().all(|r| r.abs() <= 1e-9 * scale));
        assert!((lp.objective(&sym) - sol.objective).abs() <= 1e-9 * sol.objective.abs().max(1.0));
    }
}

#[test]
fn linear_builder_entries() {
    let (n, v) = (nm("gaussian:1"), nm("gaussian:2"));
    let grid = quantized_grid(1, 2.0);
    assert_eq!(grid, vec![-2.0, 0.0, 2.0]);
    let lp = build_lp_linear(&grid, 0.5, 1.0, 0.1, 3.0, &n, 0.25, &v).unwrap();
    assert_eq!(lp.rows(), 3);
    assert_eq!(lp.cols(), 3);
    assert!((lp.cost[0] - 0.25).abs() < 1e-15);
    assert!((lp.constraints[0][2] - 0.5).abs() < 1e-15);
    assert_eq!(lp.constraints[1], vec![4.0, 0.0, 4.0]);
    assert_eq!(lp.constraints[2], vec![1.0; 3]);
    assert!((lp.rhs[0] - 0.4).abs() < 1e-15);
    assert_eq!(&lp.rhs[1..], &[3.0, 1.0]);
}

#[test]
fn energy_builder_entries() {
    let (n, v) = (nm("gaussian:1"), nm("gaussian:1"));
    let (gw, gs) = (vec![-1.0, 0.0, 1.0], vec![-2.0, 0.0, 2.0]);
    let (alpha, gamma, theta, lambda) = (0.5, 0.1, 1.0, 0.3);
    let lp = build_lp_energy(&gw, &gs, alpha, gamma, theta, 2.0, 4.0, lambda, &n, &v).unwrap();
    assert_eq!(lp.cols(), 9);
    let col = joint_column(2, 0, 3);
    let (w, s) = (1.0, -2.0);
    let want = v
        .joint_cgf(lambda * w + 2.0 * lambda * gamma * s, -lambda * gamma)
        .unwrap()
        - lambda * w * s
        - lambda * gamma * s * s;
    assert!((lp.cost[col] - want).abs() < 1e-15);
    assert!((lp.constraints[0][col] - n.joint_cgf(alpha * w, alpha * gamma).unwrap()).abs() < 1e-15);
    assert_eq!(lp.constraints[1][col], 4.0);
    assert_eq!(lp.rhs, vec![2.0 - alpha * theta, 4.0, 1.0]);
}

#[test]
fn grid_validation() {
    let n = nm("gaussian:1");
    assert!(build_lp_linear(&[-1.0, 1.0], 1.0, 1.0, 0.0, 1.0, &n, 1.0, &n).is_err());
    assert!(build_lp_linear(&[-1.0, 0.0, 2.0], 1.0, 1.0, 0.0, 1.0, &n, 1.0, &n).is_err());
    assert!(build_lp_linear(&[1.0, 0.0, -1.0], 1.0, 1.0, 0.0, 1.0, &n, 1.0, &n).is_err());
    assert!(build_lp_energy(
        &[-1.0, 0.0, 1.0],
        &quantized_grid(2, 1.0),
        1.0,
        0.0,
        1.0,
        1.0,
        1.0,
        1.0,
        &n,
        &n
    )
    .is_err());
    assert!(symmetrize_joint(&[0.0; 8], 3).is_err());
    assert!(LpInstance::new(vec![1.0], vec![vec![1.0, 2.0]], vec![1.0]).is_err());
    assert!(LpInstance::new(vec![f64::NAN], vec![vec![1.0]], vec![1.0]).is_err());
}

#[test]
fn infeasible_variance() {
    let n = nm("gaussian:1");
    let lp = build_lp_linear(&quantized_grid(2, 1.0), 0.5, 1.0, 0.0, 4.0, &n, 1.0, &n).unwrap();
    assert_eq!(simplex_solve(&lp).unwrap().status, LpStatus::Infeasible);
    assert!(common::brute_force(&lp).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn small_random_lps_match_brute_force(
        cost in prop::collection::vec(-5.0f64..5.0, 6),
        a in prop::collection::vec(-3.0f64..3.0, 12),
        x0 in prop::collection::vec(0.0f64..2.0, 6),
    ) {
        let mut rows = vec![a[..6].to_vec(), a[6..].to_vec()];
        rows.push(vec![1.0; 6]);
        let rhs: Vec<f64> = rows.iter().map(|r| dot(r, &x0)).collect();
        let lp = LpInstance::new(cost, rows, rhs).unwrap();
        let sol = simplex_solve(&lp).unwrap();
        let best = common::brute_force(&lp);
        prop_assert!(best.is_some());
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!((sol.objective - best.unwrap()).abs() < 1e-8);
    }
}
