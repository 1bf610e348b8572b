//! Wedge products as parallelotope volumes, and k-content of curved sets by
//! quadrature over a parameterization.

use std::f64::consts::PI;

use kcontract::compound::{k_content, wedge};
use kcontract::Norm;

fn main() -> kcontract::Result<()> {
    let a1 = [1.0, 0.0, 1.0];
    let a2 = [0.0, 2.0, 1.0];
    let w = wedge(&[a1, a2])?;
    println!("a1 ^ a2 = {:?}", w.coords);
    for norm in Norm::ALL {
        println!("  |a1 ^ a2|_{} = {:.6}", norm, w.norm(norm));
    }
    // L2 norm of the wedge is the area: sqrt(|a1|^2 |a2|^2 - (a1.a2)^2)
    let dot: f64 = a1.iter().zip(a2).map(|(x, y)| x * y).sum();
    println!("  Gram area           = {:.6}", (2.0 * 5.0 - dot * dot).sqrt());

    for cells in [25, 50, 100, 200] {
        let area = k_content(
            |p: &[f64]| vec![p[0].sin() * p[1].cos(), p[0].sin() * p[1].sin(), p[0].cos()],
            &[0.0, 0.0],
            &[PI, 2.0 * PI],
            &[cells, cells],
        )?;
        println!("unit sphere, {:>3} cells per axis: {:.8} (error {:.2e})", cells, area, (area - 4.0 * PI).abs());
    }
    let arc = k_content(|p: &[f64]| vec![p[0], p[0] * p[0]], &[0.0], &[1.0], &[400])?;
    let exact = 5f64.sqrt() / 2.0 + 2f64.asinh() / 4.0;
    println!("arc length of y = x^2 on [0, 1]: {:.10} (exact {:.10})", arc, exact);
    Ok(())
}
