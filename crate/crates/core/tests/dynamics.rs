mod common;

use std::collections::BTreeMap;

use common::*;
use kcontract::compound::{mult_compound, wedge_columns};
use kcontract::dynamics::{
    asymptotic_subspace, compound_transition, floquet, frame_from, integrate, ode::step_plan, simplex_point,
    transition_matrix, variational_frame, volume_trace, DomainPolicy, FloquetOptions, IntegrationOptions,
    OrbitVerdict, SystemModel,
};
use kcontract::models;
use kcontract::{BoxDomain, Error, Matrix, Norm};

fn scaled(a: &[Vec<f64>], t: f64) -> Vec<Vec<f64>> {
    a.iter().map(|r| r.iter().map(|v| v * t).collect()).collect()
}

#[test]
fn linear_trajectory_matches_matrix_exponential() {
    let mut r = rng(21);
    for n in 1..=5 {
        let a = random_matrix(&mut r, n, n);
        let sys = SystemModel::linear(a.clone()).unwrap();
        let x0: Vec<f64> = (0..n).map(|i| 1.0 - 0.3 * i as f64).collect();
        let traj = integrate(&sys, &x0, 0.0, 2.0, &IntegrationOptions::with_step(1e-3).record_every(250)).unwrap();
        assert_eq!(traj.times.len(), 9);
        for (t, x) in traj.times.iter().zip(&traj.states) {
            let want = from_dense(&expm(&scaled(&dense(&a), *t))).mul_vec(&x0);
            for (g, w) in x.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10, "t={} {} vs {}", t, g, w);
            }
        }
    }
}

#[test]
fn sample_times_are_not_accumulated() {
    let sys = SystemModel::linear(Matrix::zeros(1, 1)).unwrap();
    let traj = integrate(&sys, &[0.0], 0.0, 1.0, &IntegrationOptions::with_step(0.1)).unwrap();
    assert_eq!(traj.times.len(), 11);
    for (i, t) in traj.times.iter().enumerate() {
        assert_eq!(*t, i as f64 * 0.1);
    }
    let (n, h) = step_plan(0.0, 1.0, 0.3).unwrap();
    assert_eq!(n, 3);
    assert!((h * 3.0 - 1.0).abs() < 1e-15);
}

#[test]
fn transition_and_compound_agree_with_oracles() {
    let mut r = rng(22);
    let a = random_matrix(&mut r, 4, 4);
    let ac = a.clone();
    let phi = transition_matrix(move |_| ac.clone(), 4, 0.0, 1.5, 1e-3).unwrap();
    let e = expm(&scaled(&dense(&a), 1.5));
    assert!(max_abs_diff(&dense(&phi.phi), &e) < 1e-10);
    // time-varying: the integrated compound equals the compound of the integrated Φ
    let b = random_matrix(&mut r, 4, 4);
    let coef = move |t: f64| &a + &b.scale(t.sin());
    let opts = IntegrationOptions::with_step(1e-3).record_every(usize::MAX);
    for k in 1..=4 {
        let direct = compound_transition(&coef, 4, k, 0.0, 3.0, &opts).unwrap();
        let phi = transition_matrix(&coef, 4, 0.0, 3.0, 1e-3).unwrap().phi;
        let via = compound_oracle(&dense(&phi), k);
        let got = dense(direct.last().unwrap());
        assert!(max_abs_diff(&got, &via) < 1e-9 * (1.0 + max_abs(&via)), "k={}", k);
    }
}

#[test]
fn variational_frame_of_linear_system() {
    let mut r = rng(23);
    let a = random_matrix(&mut r, 3, 3);
    let sys = SystemModel::linear(a.clone()).unwrap();
    let initials = vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, -1.0]];
    let rr = [0.25, 0.5];
    let anchor = simplex_point(&initials, &rr).unwrap();
    let want_anchor = [0.25, 1.0, -0.25];
    for (g, w) in anchor.iter().zip(want_anchor) {
        assert!((g - w).abs() < 1e-15);
    }
    let opts = IntegrationOptions::with_step(1e-3).record_every(500);
    let frame = variational_frame(&sys, &initials, &rr, 0.0, 2.0, &opts).unwrap();
    let w0 = from_dense(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![1.0, 1.0]]);
    assert!(frame.frames[0].max_abs_diff(&w0) < 1e-15);
    let trace = volume_trace(&frame, Norm::L2).unwrap();
    for ((t, w), v) in frame.times.iter().zip(&frame.frames).zip(&trace.norms) {
        let e = from_dense(&expm(&scaled(&dense(&a), *t)));
        let want = e.matmul(&w0).unwrap();
        assert!(w.max_abs_diff(&want) < 1e-9);
        // |Φ^(2) (w1 ∧ w2)| = |Φ w1 ∧ Φ w2|
        let wedge0 = wedge_columns(&w0).unwrap().coords;
        let lifted = mult_compound(&e, 2).unwrap().mul_vec(&wedge0);
        let norm = lifted.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((v - norm).abs() < 1e-9 * (1.0 + norm));
    }
}

#[test]
fn volume_rate_tracks_trace_for_planar_systems() {
    let none = BTreeMap::new();
    let entry = models::model("cos_ltv", &none).unwrap();
    let opts = IntegrationOptions::with_step(1e-3).record_every(100);
    let frame = frame_from(&entry.system, &[2.0, 1.0], &Matrix::identity(2), 0.0, 10.0, &opts).unwrap();
    let trace = volume_trace(&frame, Norm::L2).unwrap();
    // det Φ(t) = exp(∫ tr A) = e^{−t}
    assert!((trace.slope().unwrap() + 1.0).abs() < 1e-8);
    assert!((trace.decay_rate().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn domain_exit_policies() {
    let sys = SystemModel::linear(Matrix::diag(&[1.0, -1.0]))
        .unwrap()
        .with_domain(BoxDomain::cube(2, -2.0, 2.0).unwrap())
        .unwrap();
    let warn = integrate(&sys, &[1.0, 1.0], 0.0, 2.0, &IntegrationOptions::with_step(1e-3)).unwrap();
    let exit = warn.domain_exit.expect("leaves the box");
    assert!((exit.t - 2f64.ln()).abs() < 2e-3);
    let strict = IntegrationOptions::with_step(1e-3).domain_policy(DomainPolicy::Error);
    assert!(matches!(integrate(&sys, &[1.0, 1.0], 0.0, 2.0, &strict), Err(Error::StateLeftDomain { .. })));
}

#[test]
fn oracle_deviation_is_recorded() {
    let none = BTreeMap::new();
    for name in ["diag2", "oscillator", "cos_ltv", "hopf"] {
        let entry = models::model(name, &none).unwrap();
        let x0 = entry.default_state.clone();
        let traj = integrate(&entry.system, &x0, 0.0, 3.0, &IntegrationOptions::with_step(1e-3)).unwrap();
        let dev = traj.oracle_max_deviation.expect("closed-form oracle");
        let scale = traj.states.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        assert!(dev < 1e-10 * scale, "{}: {}", name, dev);
    }
}

#[test]
fn floquet_of_hopf_from_several_seeds() {
    let entry = models::model("hopf", &BTreeMap::new()).unwrap();
    for seed in [[1.1, 0.0], [0.6, 0.6], [-0.2, 1.4]] {
        let res = floquet(&entry.system, &seed, &FloquetOptions::default()).unwrap();
        let radius = res.orbit_point.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((radius - 1.0).abs() < 1e-6);
        assert!(res.has_unit_multiplier);
        assert!(res.product_mismatch < 1e-8);
        assert_eq!(res.verdict, OrbitVerdict::OrbitallyStable);
        // det of the monodromy is exp(∫ div) = e^{−4π} on the unit circle
        let m = &res.monodromy;
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let want = (-4.0 * std::f64::consts::PI).exp();
        assert!((det - want).abs() < 1e-3 * want);
    }
}

#[test]
fn decaying_subspace_dimensions() {
    // diag(0, −1, −2): two decaying directions, so 2-contraction (n − k + 1 = 2)
    let rep = asymptotic_subspace(|_| Matrix::diag(&[0.0, -1.0, -2.0]), 3, 2, 30.0, 1e-2).unwrap();
    assert_eq!(rep.decaying_dimension, 2);
    assert_eq!(rep.required_dimension, 2);
    assert!(rep.compound_decays);
    assert!(rep.consistent);
    let rep = asymptotic_subspace(|_| Matrix::diag(&[0.0, -1.0, -2.0]), 3, 1, 30.0, 1e-2).unwrap();
    assert!(!rep.compound_decays);
    assert!(rep.consistent);
}
