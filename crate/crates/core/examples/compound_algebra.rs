//! Multiplicative and additive compounds of a small matrix, and the identities
//! that tie them together.

use kcontract::compound::{add_compound, minor, mult_compound, schwarz_n_minus_1};
use kcontract::Matrix;

fn main() -> kcontract::Result<()> {
    let a = Matrix::from_rows(&[[4.0, 5.0], [-1.0, 4.0], [0.0, 3.0]])?;
    println!("A({{1,3}}|{{1,2}}) = {}", minor(&a, &[1, 3], &[1, 2])?);
    println!("A^(2) =\n{:?}", mult_compound(&a, 2)?);

    let b = Matrix::from_rows(&[[1.0, 2.0, 0.0], [-1.0, 0.5, 3.0], [2.0, 0.0, -1.0]])?;
    let c = Matrix::from_rows(&[[0.0, 1.0, 1.0], [2.0, -1.0, 0.0], [1.0, 0.0, 1.0]])?;

    // Cauchy-Binet: (BC)^(2) = B^(2) C^(2)
    let lhs = mult_compound(&b.matmul(&c)?, 2)?;
    let rhs = mult_compound(&b, 2)?.matmul(&mult_compound(&c, 2)?)?;
    println!("Cauchy-Binet residual: {:.2e}", lhs.max_abs_diff(&rhs));

    // additive compound is linear; the (n-1) compound has a closed form
    let sum = add_compound(&(&b + &c), 2)?;
    let parts = &add_compound(&b, 2)? + &add_compound(&c, 2)?;
    println!("additivity residual: {:.2e}", sum.max_abs_diff(&parts));
    println!("B^[2] =\n{:?}", add_compound(&b, 2)?);
    println!("B^[2] vs (n-1) formula: {:.2e}", add_compound(&b, 2)?.max_abs_diff(&schwarz_n_minus_1(&b)?));
    println!("tr B^[2] = {} = (n-1) tr B = {}", add_compound(&b, 2)?.trace(), 2.0 * b.trace());
    Ok(())
}
