//! Matrix measures of a matrix and of its additive compounds, computed directly
//! from the entries and through the materialized compound.

use kcontract::compound::add_compound;
use kcontract::measures::{measure, measure_k_direct, MeasureSpec};
use kcontract::{Matrix, Norm};

fn main() -> kcontract::Result<()> {
    let a = Matrix::from_rows(&[
        [-2.0, 1.0, 0.5, 0.0],
        [0.3, -1.0, 0.0, 0.7],
        [1.5, 0.0, 0.5, -0.2],
        [0.0, 0.4, 1.0, -3.0],
    ])?;
    println!("{:>4} {:>6} {:>12} {:>12}", "k", "norm", "direct", "compound");
    for k in 1..=4 {
        let ak = add_compound(&a, k)?;
        for norm in Norm::ALL {
            let d = measure_k_direct(&a, k, norm)?;
            let c = measure(&ak, &MeasureSpec::plain(norm))?;
            println!("{:>4} {:>6} {:>12.6} {:>12.6}", k, norm.to_string(), d.value, c.value);
        }
    }

    // a diagonal scaling can make a measure negative where the plain one is not
    let b = Matrix::from_rows(&[[-1.0, 4.0], [0.0, -1.0]])?;
    let plain = measure(&b, &MeasureSpec::plain(Norm::LInf))?.value;
    let scaled = measure(&b, &MeasureSpec::scaled(Norm::LInf, Matrix::diag(&[1.0, 8.0])))?.value;
    println!("mu_inf(B) = {}, mu_inf(M B M^-1) = {}", plain, scaled);
    Ok(())
}
