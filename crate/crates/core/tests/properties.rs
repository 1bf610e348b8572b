mod common;

use common::*;
use kcontract::combinatorics::{binomial, rank, unrank};
use kcontract::compound::{add_compound, mult_compound, wedge_columns};
use kcontract::measures::{measure_k_direct, measure_value, MeasureWitness};
use kcontract::spectra::eigenvalues;
use kcontract::{Matrix, Norm};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2.0f64..2.0, rows * cols).prop_map(move |d| Matrix::new(rows, cols, d).unwrap())
}

fn square(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max).prop_flat_map(|n| matrix(n, n))
}

fn square_with_order(max: usize) -> impl Strategy<Value = (Matrix, usize)> {
    (1..=max).prop_flat_map(|n| (matrix(n, n), 1..=n))
}

fn pair_with_order(max: usize) -> impl Strategy<Value = (Matrix, Matrix, usize)> {
    (1..=max).prop_flat_map(|n| (matrix(n, n), matrix(n, n), 1..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_round_trips(n in 1usize..20, seed in any::<u64>()) {
        let k = 1 + (seed as usize) % n;
        let total = binomial(n, k).unwrap();
        let r = seed % total;
        let t = unrank(r, n, k).unwrap();
        prop_assert_eq!(t.len(), k);
        prop_assert!(t.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(rank(&t, n).unwrap(), r);
    }

    #[test]
    fn multiplicative_compound_matches_cofactor_minors(a in (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| matrix(r, c)), k in 1usize..=5) {
        prop_assume!(k <= a.rows().min(a.cols()));
        let got = dense(&mult_compound(&a, k).unwrap());
        prop_assert!(max_abs_diff(&got, &compound_oracle(&dense(&a), k)) < 1e-12);
    }

    #[test]
    fn compound_commutes_with_transpose((a, k) in square_with_order(6)) {
        let lhs = mult_compound(&a.transpose(), k).unwrap();
        let rhs = mult_compound(&a, k).unwrap().transpose();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let lhs = add_compound(&a.transpose(), k).unwrap();
        let rhs = add_compound(&a, k).unwrap().transpose();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn additive_compound_is_linear((a, b, k) in pair_with_order(6), s in -3.0f64..3.0) {
        let lhs = add_compound(&(&a + &b.scale(s)), k).unwrap();
        let rhs = &add_compound(&a, k).unwrap() + &add_compound(&b, k).unwrap().scale(s);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn sylvester_franke_determinant((a, k) in square_with_order(5)) {
        let n = a.rows();
        let e = binomial(n - 1, k - 1).unwrap() as i32;
        let lhs = det_laplace(&dense(&mult_compound(&a, k).unwrap()));
        let rhs = det_laplace(&dense(&a)).powi(e);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn trace_of_additive_compound((a, k) in square_with_order(7)) {
        let n = a.rows();
        let want = binomial(n - 1, k - 1).unwrap() as f64 * a.trace();
        prop_assert!((add_compound(&a, k).unwrap().trace() - want).abs() < 1e-11);
    }

    #[test]
    fn measure_is_subadditive_and_bounds_spectrum((a, b, _k) in pair_with_order(6)) {
        let sum = &a + &b;
        let abscissa = eigenvalues(&a).unwrap().spectral_abscissa();
        for norm in Norm::ALL {
            let (ma, mb) = (measure_value(&a, norm).unwrap(), measure_value(&b, norm).unwrap());
            prop_assert!(measure_value(&sum, norm).unwrap() <= ma + mb + 1e-12);
            prop_assert!(abscissa <= ma + 1e-9);
        }
    }

    #[test]
    fn l2_measure_matches_power_iteration(a in square(6)) {
        let got = measure_value(&a, Norm::L2).unwrap();
        prop_assert!((got - mu2_oracle(&dense(&a))).abs() < 1e-8);
    }

    #[test]
    fn direct_measure_witness_attains_value((a, k) in square_with_order(6)) {
        for norm in [Norm::L1, Norm::LInf] {
            let m = measure_k_direct(&a, k, norm).unwrap();
            let MeasureWitness::Tuple(t) = m.witness else { panic!("expected a tuple witness") };
            let ak = add_compound(&a, k).unwrap();
            let idx = rank(&t, a.rows()).unwrap() as usize;
            let n = ak.rows();
            let line: f64 = match norm {
                Norm::L1 => (0..n).map(|i| if i == idx { ak[(i, idx)] } else { ak[(i, idx)].abs() }).sum(),
                _ => (0..n).map(|j| if j == idx { ak[(idx, j)] } else { ak[(idx, j)].abs() }).sum(),
            };
            prop_assert!((line - m.value).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_are_characteristic_roots(a in square(5)) {
        let got = eigenvalues(&a).unwrap();
        let roots = poly_roots(&char_poly(&dense(&a)));
        let d = kcontract::spectra::greedy_match_distance(&got.values, &roots);
        prop_assert!(d < 1e-6, "distance {}", d);
        prop_assert!((got.sum().re - a.trace()).abs() < 1e-10);
        prop_assert!(got.conjugation_residual() < 1e-10);
    }

    #[test]
    fn wedge_norm_is_gram_volume(w in (2usize..=6).prop_flat_map(|n| (1..=n).prop_flat_map(move |k| matrix(n, k)))) {
        let v = wedge_columns(&w).unwrap().norm(Norm::L2);
        let gram = dense(&w.transpose().matmul(&w).unwrap());
        prop_assert!((v * v - det_laplace(&gram)).abs() < 1e-10 * (1.0 + v * v));
    }
}
