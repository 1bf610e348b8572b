mod common;

use common::*;
use kcontract::certification::{
    certify_lti, certify_nonlinear_grid, certify_row_rule, certify_scaled_l1, check_bendixson, check_gas,
    equilibrium_census, Rule, Verdict,
};
use kcontract::compound::add_compound;
use kcontract::dynamics::SystemModel;
use kcontract::measures::{measure_k_direct, MeasureSpec};
use kcontract::models::Seir3;
use kcontract::{BoxDomain, Error, Matrix, Norm};
use rand::Rng;

#[test]
fn hurwitz_by_construction_is_one_contractive() {
    let mut r = rng(31);
    for n in 2..=6 {
        let rm = random_matrix(&mut r, n, n);
        let a = &Matrix::identity(n).scale(-1.0) + &rm.scale(0.1);
        let sym: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| rm[(i, j)] + rm[(j, i)]).collect()).collect();
        let spectral = sym_max_eigenvalue(&sym).abs().max(sym_max_eigenvalue(&scaled_neg(&sym)).abs());
        let c = certify_lti(&a, 1, &Norm::L2.into()).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert!(c.eta >= 1.0 - 0.1 * spectral / 2.0 - 1e-12);
    }
}

fn scaled_neg(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter().map(|r| r.iter().map(|v| -v).collect()).collect()
}

#[test]
fn certificates_are_graded_and_homogeneous() {
    let mut r = rng(32);
    let mut checked = 0;
    while checked < 40 {
        let n = r.gen_range(2..=6);
        let k = r.gen_range(1..n);
        let a = &random_matrix(&mut r, n, n) - &Matrix::identity(n).scale(r.gen_range(0.0..1.5));
        for norm in Norm::ALL {
            let c = certify_lti(&a, k, &norm.into()).unwrap();
            if !c.is_certified() {
                continue;
            }
            checked += 1;
            for l in k + 1..=n {
                let cl = certify_lti(&a, l, &norm.into()).unwrap();
                assert!(cl.is_certified());
                if norm == Norm::L2 {
                    assert!(cl.eta >= c.eta - 1e-12);
                }
            }
            let s = r.gen_range(0.1..5.0);
            let cs = certify_lti(&a.scale(s), k, &norm.into()).unwrap();
            assert!((cs.eta - s * c.eta).abs() < 1e-12 * (1.0 + cs.eta.abs()));
        }
    }
}

#[test]
fn row_rule_bounds_and_cross_check() {
    let a = Matrix::identity(3).scale(-1.0);
    let c = certify_row_rule(&[(0.0, a.clone())]).unwrap();
    assert_eq!(c.eta, 2.0);
    assert_eq!(measure_k_direct(&a, 2, Norm::LInf).unwrap().value, -2.0);
    // −2I plus ones in column 2: sums Σ_{i≠ℓ} |a_iℓ| + a_ii evaluated by hand
    let mut b = Matrix::identity(4).scale(-2.0);
    for i in 0..4 {
        if i != 1 {
            b[(i, 1)] = 1.0;
        }
    }
    let c = certify_row_rule(&[(0.0, b.clone())]).unwrap();
    // ℓ = 2: (1 − 2) · 3 = −3; other ℓ: −6
    assert_eq!(c.witness.index, Some(2));
    assert_eq!(c.eta, 3.0);
    // the column-sum rule is no weaker than μ∞ of the (n−1) compound
    let mut r = rng(33);
    for _ in 0..50 {
        let a = random_matrix(&mut r, 4, 4);
        let c = certify_row_rule(&[(0.0, a.clone())]).unwrap();
        let mu = measure_k_direct(&a, 3, Norm::LInf).unwrap().value;
        assert!(-c.eta >= mu - 1e-12);
    }
}

fn seir_system(zeta: f64) -> (Seir3, SystemModel) {
    let m = Seir3::new(2.0, zeta, 1.0, 1.0, 1.0, 0.5).unwrap();
    let s = m.system().unwrap();
    (m, s)
}

#[test]
fn seir_second_compound_on_the_simplex() {
    let omega = Seir3::domain();
    let (_, strong) = seir_system(2.0);
    let c = certify_nonlinear_grid(&strong, &omega, 2, &Norm::LInf.into(), None).unwrap();
    assert_eq!(c.verdict, Verdict::Certified);
    assert!(!c.grid.as_ref().unwrap().exhaustive);
    assert_eq!(c.grid.unwrap().samples, 286);
    let b = check_bendixson(&strong, &omega, Norm::LInf).unwrap();
    assert_eq!((b.verdict, b.branch.as_deref()), (Verdict::Certified, Some("contracting")));
    // with the default parameters the plain measure is positive near x1 = 1
    let (_, weak) = seir_system(0.2);
    let c = certify_nonlinear_grid(&weak, &omega, 2, &Norm::LInf.into(), None).unwrap();
    assert_eq!(c.verdict, Verdict::NotCertified);
    let p = c.witness.point.expect("worst grid point");
    assert!(omega.contains(&p, 1e-12));
    // J^[2] is Metzler on the whole simplex, so only the column sums can fail
    for zeta in [0.2, 2.0] {
        let (_, sys) = seir_system(zeta);
        let s = certify_scaled_l1(&sys, &omega, 2, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.rule, Rule::ScaledL1Cooperative);
        assert!(!s.witness.condition.as_deref().unwrap_or("").starts_with("metzler"));
    }
}

#[test]
fn scaled_l1_weight_validation() {
    let (_, sys) = seir_system(2.0);
    let omega = Seir3::domain();
    assert!(matches!(certify_scaled_l1(&sys, &omega, 2, &[1.0, 1.0]), Err(Error::BadWeightVector(_))));
    assert!(matches!(certify_scaled_l1(&sys, &omega, 2, &[1.0, 0.0, 1.0]), Err(Error::BadWeightVector(_))));
}

#[test]
fn scaled_l1_flags_metzler_violation() {
    let a = Matrix::from_rows(&[[-2.0, -0.5], [1.0, -2.0]]).unwrap();
    let sys = SystemModel::linear(a).unwrap();
    let omega = BoxDomain::cube(2, -1.0, 1.0).unwrap().with_uniform_count(3).unwrap();
    let c = certify_scaled_l1(&sys, &omega, 1, &[1.0, 1.0]).unwrap();
    assert_eq!(c.verdict, Verdict::NotCertified);
    assert!(c.witness.condition.as_deref().unwrap().contains("metzler"));
}

#[test]
fn saturated_network_is_gas() {
    // ẋ = −x + g W tanh(x) with a small gain: μ2(J) < 0, hence μ2(J^[2]) < 0
    let mut r = rng(34);
    let n = 3;
    let w = random_matrix(&mut r, n, n).scale(0.3);
    let (w1, w2) = (w.clone(), w);
    let sys = SystemModel::builder(
        n,
        move |_, x| {
            let t: Vec<f64> = x.iter().map(|v| v.tanh()).collect();
            let wt = w1.mul_vec(&t);
            x.iter().zip(wt).map(|(a, b)| -a + b).collect()
        },
        move |_, x| {
            let mut j = w2.clone();
            for i in 0..n {
                for c in 0..n {
                    j[(i, c)] *= 1.0 - x[c].tanh().powi(2);
                }
                j[(i, i)] -= 1.0;
            }
            j
        },
    )
    .autonomous(true)
    .build()
    .unwrap();
    let omega = BoxDomain::cube(n, -2.0, 2.0).unwrap().with_uniform_count(5).unwrap();
    let c = check_gas(&sys, &omega, Norm::L2).unwrap();
    assert_eq!(c.verdict, Verdict::Certified);
    let eq = c.equilibria.unwrap();
    assert_eq!(eq.len(), 1);
    assert!(eq[0].iter().all(|v| v.abs() < 1e-9));
    // dual route: the grid's worst μ2(J^[2]) against a power-iteration oracle at that point
    let p = c.witness.point.unwrap();
    let j2 = add_compound(&sys.jacobian(0.0, &p), 2).unwrap();
    assert!((mu2_oracle(&dense(&j2)) + c.eta).abs() < 1e-8);
}

#[test]
fn census_finds_three_equilibria() {
    let sys = SystemModel::builder(
        2,
        |_, x| vec![x[0] - x[0].powi(3), -x[1]],
        |_, x| Matrix::from_rows(&[[1.0 - 3.0 * x[0] * x[0], 0.0], [0.0, -1.0]]).unwrap(),
    )
    .autonomous(true)
    .build()
    .unwrap();
    let omega = BoxDomain::new(vec![-1.5, -1.0], vec![1.5, 1.0]).unwrap();
    let census = equilibrium_census(&sys, &omega).unwrap();
    let mut xs: Vec<f64> = census.equilibria.iter().map(|e| e[0]).collect();
    xs.sort_by(f64::total_cmp);
    assert_eq!(xs.len(), 3);
    for (g, w) in xs.iter().zip([-1.0, 0.0, 1.0]) {
        assert!((g - w).abs() < 1e-9);
    }
}

#[test]
fn grid_results_do_not_depend_on_thread_count() {
    let (_, sys) = seir_system(0.2);
    let omega = Seir3::domain().with_uniform_count(21).unwrap();
    let spec = MeasureSpec::plain(Norm::L2);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| certify_nonlinear_grid(&sys, &omega, 2, &spec, None).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&four).unwrap());
}
