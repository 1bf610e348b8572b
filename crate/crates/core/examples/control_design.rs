//! Closed-loop 2-contraction check for a linear plant under output feedback
//! u = -k G^T P x, with P from a Lyapunov inequality.

use kcontract::certification::{control_check, ControlProblem};
use kcontract::{BoxDomain, Matrix};

fn problem(a: &Matrix, g: &Matrix, p: &Matrix, gain: f64) -> kcontract::Result<ControlProblem> {
    let (a1, a2, g1) = (a.clone(), a.clone(), g.clone());
    let gtp = g.transpose().matmul(p)?.scale(-gain);
    let d = g.matmul(&gtp)?;
    ControlProblem::new(
        a.rows(),
        move |x| a1.mul_vec(x),
        move |_| a2.clone(),
        move |_| g1.clone(),
        move |x| gtp.mul_vec(x),
        move |_| d.clone(),
    )
}

fn main() -> kcontract::Result<()> {
    // P A + A^T P = -I for P = I/2 since A + A^T = -4 I + skew part
    let a = Matrix::from_rows(&[[-2.0, 1.0, 0.0], [-1.0, -2.0, 0.5], [0.0, -0.5, -2.0]])?;
    let p = Matrix::identity(3).scale(0.5);
    let g = Matrix::from_rows(&[[1.0], [0.0], [1.0]])?;
    let omega = BoxDomain::cube(3, -1.0, 1.0)?.with_uniform_count(7)?;

    for gain in [0.0, 2.0, -2.0] {
        let c = control_check(&problem(&a, &g, &p, gain)?, &p, &omega)?;
        println!("gain {:+}: {:?}, eta = {:+.4}", gain, c.verdict, c.eta);
        for f in c.failures.iter().flatten() {
            println!("  {} condition fails at {:?} (value {:+.4})", f.condition, f.point, f.value);
        }
        println!("  closed-loop equilibria: {:?}", c.equilibria);
    }
    Ok(())
}
