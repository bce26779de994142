use corrdet::exponents::{evaluate, DiscreteJointPmf, SignalPmf};
use corrdet::joint_design::*;
use corrdet::noise::NoiseModel;
use proptest::prelude::*;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn reevaluated(p: &corrdet::exponents::ExponentPoint, n: &NoiseModel, v: &NoiseModel) {
    let q = evaluate(&p.design, n, v, p.e0).unwrap();
    assert!(
        (q.e_md - p.e_md).abs() <= 1e-7 * p.e_md.max(1.0),
        "{} vs {}",
        q.e_md,
        p.e_md
    );
    assert!(q.e_fa >= p.e0 - 1e-7, "{} < {}", q.e_fa, p.e0);
}

#[test]
fn restricted_designs_never_win() {
    let (n, v) = laplace_setup(4.0, 7.0).unwrap();
    let sig = SignalPmf::ask4(4.0).unwrap();
    for e0 in [0.0, 1.0, 7.5] {
        let cl = solve_fixed_signal(&sig, e0, FixedSignalMode::Classical, &n, &v, &opts()).unwrap();
        let lin = solve_fixed_signal(&sig, e0, FixedSignalMode::Linear, &n, &v, &opts()).unwrap();
        let (_, joint) = solve_joint_linear(e0, &SignalBudget::power(80.0), &n, &v).unwrap();
        assert!(lin.e_md >= cl.e_md, "e0 {e0}");
        assert!(joint.e_md >= lin.e_md, "e0 {e0}");
        for p in [&cl, &lin, &joint] {
            reevaluated(p, &n, &v);
        }
    }
    let (n, v) = uniform_setup(5.0, 7.0).unwrap();
    for e0 in [0.0, 1.5] {
        let lin = solve_example3_linear(e0, 6.0, 5.0, 7.0).unwrap();
        let en = solve_example3_energy(e0, 6.0, 5.0, 7.0).unwrap();
        assert!(en.e_md >= lin.e_md);
        reevaluated(&en, &n, &v);
        let sig = SignalPmf::ternary(0.25, 4.0).unwrap();
        let budget = SignalBudget::with_peak(8.0, 6.0);
        let fixed = solve_fixed_signal(&sig, e0, FixedSignalMode::Energy, &n, &v, &opts()).unwrap();
        let (_, joint) = solve_joint_energy(e0, &budget, &n, &v, &[], &opts()).unwrap();
        assert!(
            joint.e_md >= fixed.e_md - 1e-9,
            "e0 {e0}: {} < {}",
            joint.e_md,
            fixed.e_md
        );
        reevaluated(&joint, &n, &v);
    }
}

#[test]
fn reference_points() {
    let e1 = solve_example1(1.0, 4.0, 4.0, 7.0, false).unwrap();
    let c1 = solve_example1(1.0, 4.0, 4.0, 7.0, true).unwrap();
    assert!((e1.e_md - 6.9882).abs() < 1e-3, "{}", e1.e_md);
    assert!((c1.e_md - 5.2949).abs() < 1e-3, "{}", c1.e_md);
    let lin = solve_example3_linear(0.0, 6.0, 5.0, 7.0).unwrap();
    let en = solve_example3_energy(0.0, 6.0, 5.0, 7.0).unwrap();
    assert!((lin.e_md - 0.1718).abs() < 1e-3, "{}", lin.e_md);
    assert!((en.e_md - 0.958).abs() < 2e-3, "{}", en.e_md);
}

#[test]
fn joint_linear_spends_the_whole_budget() {
    let (n, v) = laplace_setup(4.0, 7.0).unwrap();
    for e0 in [0.0, 1.0, 14.0] {
        let (d, p) = solve_joint_linear(e0, &SignalBudget::power(80.0), &n, &v).unwrap();
        assert!((d.power() - 80.0).abs() <= 1e-9 * 80.0, "{}", d.power());
        assert!((p.design.pmf.power() - 80.0).abs() <= 1e-9 * 80.0);
    }
}

#[test]
fn peak_limits_the_level() {
    let (n, v) = uniform_setup(5.0, 7.0).unwrap();
    let budget = SignalBudget::with_peak(8.0, 6.0);
    let (d, _) = solve_joint_energy(4.0, &budget, &n, &v, &[], &opts()).unwrap();
    assert!(d.s <= 6.0 + 1e-12);
    assert!(d.power() <= 8.0 * (1.0 + 1e-9));
    assert!(d.p >= 8.0 / 72.0 - 1e-12);
    assert_eq!(budget.level(0.5), 2.0 * 2f64.sqrt());
    assert_eq!(budget.level(0.01), 6.0);
}

#[test]
fn unbounded_without_peak() {
    let (n, v) = uniform_setup(5.0, 7.0).unwrap();
    let (_, p) = solve_joint_linear(0.5, &SignalBudget::power(8.0), &n, &v).unwrap();
    assert_eq!(p.e_md, f64::INFINITY);
}

#[test]
fn ternary_structure() {
    let (n, v) = laplace_setup(4.0, 7.0).unwrap();
    let (d, p) = solve_joint_linear(1.0, &SignalBudget::power(80.0), &n, &v).unwrap();
    let atoms = p.design.pmf.atoms();
    assert_eq!(atoms.len(), 3);
    let mut s: Vec<f64> = atoms.iter().map(|a| a.s).collect();
    s.sort_by(f64::total_cmp);
    assert_eq!(s, vec![-d.s, 0.0, d.s]);
    for a in atoms {
        let want = if a.s == 0.0 { 1.0 - 2.0 * d.p } else { d.p };
        assert!((a.prob - want).abs() < 1e-15);
        assert_eq!(a.w, if a.s == 0.0 { 0.0 } else { a.s.signum() * d.w });
    }
    assert!(TernaryDesign {
        p: 0.6,
        w: 1.0,
        s: 1.0,
        gamma: 0.0,
        theta: 0.0
    }
    .to_pmf()
    .is_err());
    assert!(TernaryDesign {
        p: 0.0,
        w: 1.0,
        s: 1.0,
        gamma: 0.0,
        theta: 0.0
    }
    .to_pmf()
    .is_err());
}

#[test]
fn gaussian_joint_closed_form() {
    let var = 2.0;
    let n = NoiseModel::gaussian(var).unwrap();
    let power = 10.0;
    for e0 in [0.0, 0.5, 1.5] {
        let (_, p) = solve_joint_linear(e0, &SignalBudget::power(power), &n, &n).unwrap();
        let want = (power.sqrt() - (2.0 * var * e0).sqrt()).powi(2) / (2.0 * var);
        assert!((p.e_md - want).abs() < 1e-7 * want, "{} vs {want}", p.e_md);
    }
}

#[test]
fn threshold_curve_rises_to_the_support_edge() {
    let grid = linspace(0.0, 40.0, 81);
    let th = threshold_curve(&grid, 5.0).unwrap();
    assert_eq!(th[0].1, 0.0);
    for w in th.windows(2) {
        assert!(w[1].1 >= w[0].1 - 1e-12);
        assert!(w[1].1 <= 2.5 + 1e-12);
        if w[1].0 <= 10.0 {
            assert!(w[1].1 > w[0].1);
        }
    }
    assert!(2.5 - th.last().unwrap().1 < 0.01);
    let pts = threshold_curve(&[0.05, 3.0], 5.0).unwrap();
    assert!((pts[0].1 - 0.638997).abs() < 1e-5, "{}", pts[0].1);
    assert!((pts[1].1 - 2.49544).abs() < 1e-5, "{}", pts[1].1);
    assert!(threshold_curve(&[], 5.0).is_err());
}

#[test]
fn sweep_keeps_grid_order() {
    let (n, v) = laplace_setup(4.0, 7.0).unwrap();
    let cfg = CurveConfig {
        noise_n: n,
        noise_v: v,
        signal: SignalPmf::ask4(4.0).unwrap(),
        opts: opts(),
    };
    let grid = linspace(0.0, 10.0, 6);
    let req = CurveRequest {
        e0_grid: grid.clone(),
        budget: SignalBudget::power(80.0),
        mode: CurveMode::Classical,
    };
    let out = sweep(&req, &cfg).unwrap();
    assert_eq!(out.iter().map(|p| p.e0).collect::<Vec<_>>(), grid);
    for w in out.windows(2) {
        assert!(w[1].result.as_ref().unwrap().e_md <= w[0].result.as_ref().unwrap().e_md);
    }
    let bad = CurveRequest { e0_grid: vec![], ..req };
    assert!(sweep(&bad, &cfg).is_err());
}

#[test]
fn invalid_budgets() {
    let (n, v) = laplace_setup(4.0, 7.0).unwrap();
    assert!(solve_joint_linear(1.0, &SignalBudget::power(0.0), &n, &v).is_err());
    assert!(solve_joint_linear(1.0, &SignalBudget::with_peak(1.0, -1.0), &n, &v).is_err());
    assert!(solve_joint_linear(-1.0, &SignalBudget::power(1.0), &n, &v).is_err());
    assert!(linspace(0.0, 1.0, 0).is_empty());
    assert_eq!(linspace(2.0, 5.0, 1), vec![2.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weight_scale_does_not_matter(x in 1e-3f64..1e3, e0 in 0.0f64..5.0) {
        let (n, v) = laplace_setup(4.0, 7.0).unwrap();
        let pmf = SignalPmf::ask4(4.0).unwrap().with_weights(|s| s.signum() * if s.abs() > 5.0 { 0.2 } else { 1.0 }).unwrap();
        let a = design_point(&pmf, 0.0, e0, &n, &v).unwrap();
        let b = design_point(&pmf.scale_weights(x), 0.0, e0, &n, &v).unwrap();
        prop_assert!((a.e_md - b.e_md).abs() <= 1e-7 * a.e_md.max(1.0), "{} vs {}", a.e_md, b.e_md);
    }

    #[test]
    fn design_point_meets_budget(e0 in 0.0f64..3.0, g in 0.0f64..0.2) {
        let (n, v) = uniform_setup(5.0, 7.0).unwrap();
        let pmf = DiscreteJointPmf::new(TernaryDesign { p: 0.25, w: 1.0, s: 6.0, gamma: g, theta: 0.0 }.to_pmf().unwrap().atoms().to_vec()).unwrap();
        let p = design_point(&pmf, g, e0, &n, &v).unwrap();
        prop_assert!(p.e_fa >= e0 - 1e-7);
        prop_assert!(p.e_fa <= e0 + 1e-6 || e0 == 0.0);
    }
}
