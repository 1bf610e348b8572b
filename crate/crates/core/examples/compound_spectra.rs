//! Eigenvalues of additive and multiplicative compounds are the k-sums and
//! k-products of the eigenvalues of the matrix.

use kcontract::spectra::{compound_spectrum_check, eigenvalues, is_hurwitz};
use kcontract::Matrix;

fn main() -> kcontract::Result<()> {
    let a = Matrix::from_rows(&[
        [0.0, 1.0, 0.0, 0.0],
        [-2.0, -0.3, 1.0, 0.0],
        [0.0, 0.0, 0.5, 2.0],
        [0.0, 0.0, -2.0, -1.5],
    ])?;
    let spec = eigenvalues(&a)?;
    for z in &spec.values {
        println!("lambda = {:+.6} {:+.6}i", z.re, z.im);
    }
    println!("Hurwitz: {}", is_hurwitz(&a)?);
    for k in 1..=4 {
        let rep = compound_spectrum_check(&a, k)?;
        let prod = rep.products.as_ref().map_or(f64::NAN, |p| p.max_distance);
        println!(
            "k = {}: sums matched to {:.2e}, products to {:.2e}, condition {:.1e}, pass {}",
            k, rep.sums.max_distance, prod, rep.condition_estimate, rep.pass
        );
    }
    // a Jordan block is flagged and checked with a wider tolerance
    let j = Matrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]])?;
    let rep = compound_spectrum_check(&j, 2)?;
    println!("Jordan block: ill-conditioned {}, tolerance {:.0e}", rep.ill_conditioned, rep.tolerance);
    Ok(())
}
