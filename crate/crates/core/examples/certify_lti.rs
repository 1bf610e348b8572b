//! k-contraction certificates for constant and time-varying linear systems,
//! including the diagonal and column-sum rules.

use kcontract::certification::{certify_diagonal, certify_lti, certify_ltv, certify_row_rule};
use kcontract::measures::MeasureSpec;
use kcontract::models::cos_ltv_coefficient;
use kcontract::{Matrix, Norm};

fn main() -> kcontract::Result<()> {
    let a = Matrix::from_rows(&[[1.0, 2.0, 0.0], [-2.0, -3.0, 1.0], [0.0, 1.0, -4.0]])?;
    for k in 1..=3 {
        for norm in Norm::ALL {
            let c = certify_lti(&a, k, &norm.into())?;
            println!("k = {} {:>4}: eta = {:+.4} {:?} (witness {:?})", k, norm.to_string(), c.eta, c.verdict, c.witness.tuple);
        }
    }

    let times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
    let c = certify_ltv(cos_ltv_coefficient, 2, &MeasureSpec::plain(Norm::L2), &times)?;
    println!("cos(t) system, k = 2: eta = {} {:?}", c.eta, c.verdict);

    let samples: Vec<(f64, Matrix)> = times
        .iter()
        .map(|&t| (t, Matrix::diag(&[t.sin(), -2.0, -1.5 + 0.5 * t.cos()])))
        .collect();
    let c = certify_diagonal(&samples, 2)?;
    println!("diagonal rule, k = 2: eta = {:.4} {:?}, worst pair {:?} at t = {:?}", c.eta, c.verdict, c.witness.tuple, c.witness.time);

    let b = Matrix::from_rows(&[[-3.0, 0.5, 0.2], [0.4, -2.5, 0.1], [0.3, 0.6, -2.0]])?;
    let c = certify_row_rule(&[(0.0, b)])?;
    println!("column-sum rule, k = n - 1: eta = {:.4} {:?}, worst column {:?}", c.eta, c.verdict, c.witness.index);
    Ok(())
}
