use std::sync::Arc;

use super::grid::census_with;
use super::{argmax, par_map, Certificate, ConditionFailure, GridMeta, Rule, Verdict, Witness, CERTIFY_TOL};
use crate::compound::{add_compound, mult_compound};
use crate::domain::BoxDomain;
use crate::dynamics::SystemModel;
use crate::error::{Error, Result};
use crate::matrix::{cholesky, Matrix};
use crate::measures::{measure_value, symmetric_eigenvalues, symmetric_function, Norm};

type VecFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type MatFn = Arc<dyn Fn(&[f64]) -> Matrix + Send + Sync>;

/// Affine system `ẋ = f(x) + G(x) u` under the feedback `u = θ(x)`.
#[derive(Clone)]
pub struct ControlProblem {
    /// Open-loop drift `f`, checked against its Jacobian.
    pub drift: SystemModel,
    /// `G(x) θ(x)`, checked against its Jacobian.
    pub feedback: SystemModel,
}

impl ControlProblem {
    /// `g` returns the `n × m` input matrix, `theta` the `m`-vector control and
    /// `d_feedback` the Jacobian of `G(x) θ(x)`.
    pub fn new<F, JF, G, T, DG>(n: usize, f: F, jf: JF, g: G, theta: T, d_feedback: DG) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        JF: Fn(&[f64]) -> Matrix + Send + Sync + 'static,
        G: Fn(&[f64]) -> Matrix + Send + Sync + 'static,
        T: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        DG: Fn(&[f64]) -> Matrix + Send + Sync + 'static,
    {
        let drift = SystemModel::builder(n, move |_, x| f(x), move |_, x| jf(x))
            .autonomous(true)
            .build()?;
        let (g, theta): (MatFn, VecFn) = (Arc::new(g), Arc::new(theta));
        let feedback = SystemModel::builder(
            n,
            move |_, x| {
                let gx = g(x);
                let u = theta(x);
                if gx.cols() != u.len() {
                    return vec![f64::NAN; n];
                }
                gx.mul_vec(&u)
            },
            move |_, x| d_feedback(x),
        )
        .autonomous(true)
        .build()?;
        Ok(ControlProblem { drift, feedback })
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    pub fn closed_loop_field(&self, x: &[f64]) -> Vec<f64> {
        let f = self.drift.field(0.0, x);
        let g = self.feedback.field(0.0, x);
        f.iter().zip(&g).map(|(a, b)| a + b).collect()
    }

    pub fn closed_loop_jacobian(&self, x: &[f64]) -> Matrix {
        &self.drift.jacobian(0.0, x) + &self.feedback.jacobian(0.0, x)
    }
}

/// Verifies on the grid, with `P ≻ 0`:
///
/// 1. `P J(x) + Jᵀ(x) P ⪯ 0` (largest eigenvalue at most `1e-10`),
/// 2. `μ2((P^(2))^{1/2} J^[2](x) (P^(2))^{-1/2}) < 0`,
/// 3. `μ2(P^{1/2} ∂(Gθ)/∂x P^{-1/2}) ≤ 0`,
///
/// and that the closed loop has a single equilibrium in the box. `J` is the
/// Jacobian of the open-loop drift.
pub fn control_check(problem: &ControlProblem, p: &Matrix, omega: &BoxDomain) -> Result<Certificate> {
    let n = problem.dim();
    if p.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("P is {:?} for dimension {}", p.shape(), n)));
    }
    if n < 2 {
        return Err(Error::OrderTooLarge { k: 2, max: n });
    }
    if omega.dim() != n {
        return Err(Error::DimensionMismatch(format!("box of dimension {} for dimension {}", omega.dim(), n)));
    }
    cholesky(p)?;
    let p_half = symmetric_function(p, f64::sqrt)?;
    let p_half_inv = symmetric_function(p, |v| 1.0 / v.sqrt())?;
    let p2 = mult_compound(p, 2)?;
    let p2_half = symmetric_function(&p2, f64::sqrt)?;
    let p2_half_inv = symmetric_function(&p2, |v| 1.0 / v.sqrt())?;

    let points = omega.grid_points()?;
    let values = par_map(&points, |x| {
        let j = problem.drift.jacobian(0.0, x);
        let pj = p.matmul(&j)?;
        let incremental = symmetric_eigenvalues(&(&pj + &pj.transpose()))?[0];
        let j2 = add_compound(&j, 2)?;
        let compound = measure_value(&p2_half.matmul(&j2)?.matmul(&p2_half_inv)?, Norm::L2)?;
        let dg = problem.feedback.jacobian(0.0, x);
        let input = measure_value(&p_half.matmul(&dg)?.matmul(&p_half_inv)?, Norm::L2)?;
        Ok([incremental, compound, input])
    })?;

    let names = ["incremental", "compound", "input"];
    let mut failures = Vec::new();
    let mut worst = [(0usize, 0.0f64); 3];
    for c in 0..3 {
        let (i, v) = argmax(values.iter().map(|row| row[c])).ok_or_else(|| Error::InvalidParameter("empty grid".into()))?;
        worst[c] = (i, v);
        let ok = match c {
            1 => v <= -CERTIFY_TOL,
            _ => v <= CERTIFY_TOL,
        };
        if !ok {
            failures.push(ConditionFailure {
                condition: names[c].into(),
                point: points[i].clone(),
                value: v,
            });
        }
    }
    let census = census_with(
        |x| problem.closed_loop_field(x),
        |x| problem.closed_loop_jacobian(x),
        omega,
    )?;
    let unique = census.equilibria.len() == 1;

    let (i, v) = worst[1];
    let witness = match failures.first() {
        Some(f) => Witness {
            point: Some(f.point.clone()),
            value: Some(f.value),
            condition: Some(f.condition.clone()),
            ..Default::default()
        },
        None => Witness {
            point: Some(points[i].clone()),
            value: Some(v),
            condition: Some(if unique {
                "compound".to_string()
            } else {
                format!("{} closed-loop equilibria", census.equilibria.len())
            }),
            ..Default::default()
        },
    };
    let mut cert = Certificate::new(Rule::Control2Contraction, 2, Some(Norm::L2), v, witness);
    if !failures.is_empty() || !unique {
        cert.verdict = Verdict::NotCertified;
    }
    cert.scaling = Some(p2_half);
    cert.grid = Some(GridMeta {
        counts: omega.counts.clone(),
        samples: points.len(),
        exhaustive: false,
        times: None,
    });
    cert.equilibria = Some(census.equilibria);
    cert.skipped_seeds = Some(census.skipped);
    cert.failures = Some(failures);
    Ok(cert)
}
