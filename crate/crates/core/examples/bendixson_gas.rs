//! Ruling out periodic orbits and proving global convergence from the second
//! additive compound of the Jacobian, sampled on a box.

use kcontract::certification::{check_bendixson, check_gas};
use kcontract::dynamics::SystemModel;
use kcontract::{BoxDomain, Matrix, Norm};

fn main() -> kcontract::Result<()> {
    // x' = -x + y^2, y' = -y: divergence -2 everywhere
    let planar = SystemModel::builder(
        2,
        |_, x| vec![-x[0] + x[1] * x[1], -x[1]],
        |_, x| Matrix::from_rows(&[[-1.0, 2.0 * x[1]], [0.0, -1.0]]).unwrap(),
    )
    .autonomous(true)
    .build()?;
    let omega = BoxDomain::cube(2, -2.0, 2.0)?;
    let c = check_bendixson(&planar, &omega, Norm::L2)?;
    println!("planar system: {:?} on the {:?} branch, eta = {:.6}", c.verdict, c.branch, c.eta);
    let c = check_gas(&planar, &omega, Norm::L2)?;
    println!("planar system: GAS {:?}, equilibria {:?}", c.verdict, c.equilibria);

    // a damped pendulum-like 3-state system with a unique rest point
    let sys = SystemModel::builder(
        3,
        |_, x| vec![x[1], -x[0].sin() - x[1] + 0.2 * x[2], -2.0 * x[2] + 0.1 * x[0]],
        |_, x| Matrix::from_rows(&[[0.0, 1.0, 0.0], [-x[0].cos(), -1.0, 0.2], [0.1, 0.0, -2.0]]).unwrap(),
    )
    .autonomous(true)
    .build()?;
    let omega = BoxDomain::cube(3, -1.0, 1.0)?.with_uniform_count(9)?;
    let c = check_gas(&sys, &omega, Norm::L2)?;
    println!(
        "3-state system: {:?}, sup mu2(J^[2]) = {:+.4}, {} equilibria, {} seeds skipped",
        c.verdict,
        -c.eta,
        c.equilibria.as_ref().map_or(0, |e| e.len()),
        c.skipped_seeds.unwrap_or(0)
    );

    // x' = x - x^3, y' = -y has three rest points
    let bistable = SystemModel::builder(
        2,
        |_, x| vec![x[0] - x[0].powi(3), -x[1]],
        |_, x| Matrix::from_rows(&[[1.0 - 3.0 * x[0] * x[0], 0.0], [0.0, -1.0]]).unwrap(),
    )
    .autonomous(true)
    .build()?;
    let c = check_gas(&bistable, &BoxDomain::cube(2, -1.5, 1.5)?, Norm::L2)?;
    println!("bistable system: {:?}, equilibria {:?}", c.verdict, c.equilibria);
    Ok(())
}
