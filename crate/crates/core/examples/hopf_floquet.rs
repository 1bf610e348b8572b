//! Newton's method on the return map finds the limit cycle of a Hopf normal
//! form; the second compound of its monodromy shows orbital stability.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use kcontract::dynamics::{floquet, FloquetOptions};
use kcontract::models;

fn main() -> kcontract::Result<()> {
    let entry = models::model("hopf", &BTreeMap::new())?;
    let res = floquet(&entry.system, &[1.4, 0.3], &FloquetOptions::default())?;
    let radius = res.orbit_point.iter().map(|v| v * v).sum::<f64>().sqrt();
    println!("orbit point {:?} (radius {:.12}) after {} Newton steps", res.orbit_point, radius, res.newton_iterations);
    for z in &res.multipliers.values {
        println!("multiplier {:+.6e} {:+.6e}i", z.re, z.im);
    }
    println!("radial prediction e^(-4 pi) = {:.6e}", (-4.0 * PI).exp());
    println!("spectral radius of the second compound: {:.6e}", res.compound_spectral_radius);
    println!("verdict: {:?}", res.verdict);
    Ok(())
}
