//! Volumes of parallelotopes carried by the variational flow: they shrink at
//! rate 1 for diag(3, -4), which is not even Hurwitz, and are preserved by the
//! harmonic oscillator.

use std::collections::BTreeMap;

use kcontract::certification::certify_lti;
use kcontract::dynamics::{variational_frame, volume_trace, IntegrationOptions};
use kcontract::{models, Matrix, Norm};

fn main() -> kcontract::Result<()> {
    let none = BTreeMap::new();
    let initials = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]];
    let barycentre = [1.0 / 3.0, 1.0 / 3.0];
    let opts = IntegrationOptions::with_step(1e-3).record_every(1000);

    let cert = certify_lti(&Matrix::diag(&[3.0, -4.0]), 2, &Norm::L1.into())?;
    println!("diag(3, -4): 2-contraction {:?} with eta = {}", cert.verdict, cert.eta);

    for name in ["diag2", "oscillator"] {
        let entry = models::model(name, &none)?;
        let frame = variational_frame(&entry.system, &initials, &barycentre, 0.0, 6.0, &opts)?;
        let trace = volume_trace(&frame, Norm::L1)?;
        println!("{}:", name);
        for (t, v) in trace.times.iter().zip(&trace.norms) {
            println!("  t = {:.0}: |w1 ^ w2|_1 = {:.10e}", t, v);
        }
        println!("  fitted log-volume slope {:+.8}", trace.slope().unwrap_or(f64::NAN));
    }
    Ok(())
}
