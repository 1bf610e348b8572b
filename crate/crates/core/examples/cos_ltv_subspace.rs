//! A time-varying linear system that is not contractive but is 2-contractive:
//! every solution converges to a point that depends on the initial condition,
//! and the set of decaying initial conditions is one-dimensional.

use std::collections::BTreeMap;

use kcontract::dynamics::{asymptotic_subspace, integrate, transition_matrix, IntegrationOptions};
use kcontract::models::{self, cos_ltv_coefficient, cos_ltv_transition};

fn main() -> kcontract::Result<()> {
    for t in [1.0, 5.0, 20.0] {
        let phi = transition_matrix(cos_ltv_coefficient, 2, 0.0, t, 1e-3)?.phi;
        println!("t = {:>4}: |Phi - closed form| = {:.2e}, det Phi = {:.8e}, e^-t = {:.8e}",
            t, phi.max_abs_diff(&cos_ltv_transition(t)), phi.det()?, (-t).exp());
    }

    let entry = models::model("cos_ltv", &BTreeMap::new())?;
    let opts = IntegrationOptions::with_step(1e-3).record_every(usize::MAX);
    for a in [[2.0, 1.0], [1.0, 1.0], [-1.0, 0.5]] {
        let x = integrate(&entry.system, &a, 0.0, 25.0, &opts)?;
        let end = x.final_state();
        println!("x(25; {:?}) = [{:+.6}, {:+.6}], limit [0, {:+.6}]", a, end[0], end[1], a[1] - a[0] / 2.0);
    }

    for k in 1..=2 {
        let rep = asymptotic_subspace(cos_ltv_coefficient, 2, k, 30.0, 1e-3)?;
        println!(
            "k = {}: singular values of Phi(30) {:?}, decaying dimension {} (needs {}), |Phi^(k)(30)| = {:.3e}",
            k, rep.singular_values, rep.decaying_dimension, rep.required_dimension, rep.compound_norm
        );
    }
    Ok(())
}
