use serde::{Deserialize, Serialize};

use super::linear::compound_measure;
use super::{argmax, par_map, verdict_for, Certificate, GridMeta, Rule, Verdict, Witness, CERTIFY_TOL};
use crate::combinatorics::binomial;
use crate::compound::add_compound;
use crate::domain::BoxDomain;
use crate::dynamics::{SystemModel, DOMAIN_TOL};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measures::{measure_k_direct, MeasureSpec, Norm};

/// Equilibria closer than this in the box-scaled max-norm are merged.
pub const CLUSTER_RADIUS: f64 = 1e-6;
const NEWTON_MAX_ITER: usize = 50;
const NEWTON_RESIDUAL: f64 = 1e-10;

fn grid_points_in_domain(system: &SystemModel, omega: &BoxDomain) -> Result<Vec<Vec<f64>>> {
    if omega.dim() != system.dim() {
        return Err(Error::DimensionMismatch(format!(
            "box of dimension {} for a system of dimension {}",
            omega.dim(),
            system.dim()
        )));
    }
    let points = omega.grid_points()?;
    if let Some(d) = system.domain() {
        if let Some(p) = points.iter().find(|p| !d.contains(p, DOMAIN_TOL)) {
            return Err(Error::InvalidParameter(format!(
                "grid point {:?} lies outside the system domain",
                p
            )));
        }
    }
    Ok(points)
}

fn grid_meta(omega: &BoxDomain, samples: usize, times: Option<&[f64]>) -> GridMeta {
    let mut counts = omega.counts.clone();
    if let Some(t) = times {
        counts.push(t.len());
    }
    GridMeta {
        counts,
        samples,
        exhaustive: false,
        times: times.map(|t| t.to_vec()),
    }
}

fn require_autonomous(system: &SystemModel) -> Result<()> {
    if system.is_autonomous() {
        Ok(())
    } else {
        Err(Error::InvalidParameter("the check needs a time-invariant system".into()))
    }
}

/// Samples `μ(J^[k](t, x))` over the grid (and optional time grid); `η = −sup`.
///
/// Grid sampling cannot cover every point of the box, so the certificate is
/// marked non-exhaustive.
pub fn certify_nonlinear_grid(
    system: &SystemModel,
    omega: &BoxDomain,
    k: usize,
    spec: &MeasureSpec,
    times: Option<&[f64]>,
) -> Result<Certificate> {
    let points = grid_points_in_domain(system, omega)?;
    let ts: Vec<f64> = times.map(|t| t.to_vec()).unwrap_or_else(|| vec![0.0]);
    if ts.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    let samples: Vec<(f64, &Vec<f64>)> = points.iter().flat_map(|p| ts.iter().map(move |&t| (t, p))).collect();
    let values = par_map(&samples, |(t, x)| compound_measure(&system.jacobian(*t, x), k, spec))?;
    let (i, sup) = argmax(values.iter().map(|v| v.0)).ok_or_else(|| Error::InvalidParameter("empty grid".into()))?;
    let witness = Witness {
        point: Some(samples[i].1.clone()),
        tuple: values[i].1.clone(),
        time: times.map(|_| samples[i].0),
        value: Some(sup),
        ..Default::default()
    };
    let mut c = Certificate::new(Rule::NonlinearGrid, k, Some(spec.norm), sup, witness);
    c.scaling = spec.scaling.clone();
    c.grid = Some(grid_meta(omega, samples.len(), times));
    Ok(c)
}

/// Scaled-L1 rule for k-cooperative systems: `J^[k]` Metzler on the grid and
/// `vᵀ J^[k] ≤ −η 1ᵀ`.
pub fn certify_scaled_l1(system: &SystemModel, omega: &BoxDomain, k: usize, v: &[f64]) -> Result<Certificate> {
    let n = system.dim();
    if k == 0 || k > n {
        return Err(Error::OrderTooLarge { k, max: n });
    }
    let size = binomial(n, k)? as usize;
    if v.len() != size {
        return Err(Error::BadWeightVector(format!("length {} but C({}, {}) = {}", v.len(), n, k, size)));
    }
    if v.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(Error::BadWeightVector("weights must be positive and finite".into()));
    }
    let points = grid_points_in_domain(system, omega)?;
    struct Eval {
        worst_off: (f64, usize, usize),
        col: (usize, f64),
    }
    let evals = par_map(&points, |x| {
        let jk = add_compound(&system.jacobian(0.0, x), k)?;
        let mut worst_off = (f64::INFINITY, 0, 0);
        for i in 0..size {
            for j in 0..size {
                if i != j && jk[(i, j)] < worst_off.0 {
                    worst_off = (jk[(i, j)], i, j);
                }
            }
        }
        let cols = (0..size).map(|j| (0..size).map(|i| v[i] * jk[(i, j)]).sum::<f64>());
        let col = argmax(cols).expect("size >= 1");
        Ok(Eval { worst_off, col })
    })?;
    let vmax = v.iter().copied().fold(0.0, f64::max);
    let meta = grid_meta(omega, points.len(), None);
    // Metzler violations take precedence over the column-sum bound
    if let Some((i, e)) = evals
        .iter()
        .enumerate()
        .filter(|(_, e)| e.worst_off.0 < 0.0)
        .min_by(|a, b| a.1.worst_off.0.total_cmp(&b.1.worst_off.0).then(a.0.cmp(&b.0)))
    {
        let (val, r, c) = e.worst_off;
        let sup = argmax(evals.iter().map(|e| e.col.1)).map(|s| s.1).unwrap_or(0.0);
        let witness = Witness {
            point: Some(points[i].clone()),
            value: Some(val),
            condition: Some(format!("metzler violation at compound entry ({}, {})", r + 1, c + 1)),
            ..Default::default()
        };
        let mut cert = Certificate::new(Rule::ScaledL1Cooperative, k, Some(Norm::L1), sup, witness);
        cert.verdict = Verdict::NotCertified;
        cert.effective_rate = Some(-sup / vmax);
        cert.grid = Some(meta);
        return Ok(cert);
    }
    let (i, sup) = argmax(evals.iter().map(|e| e.col.1)).ok_or_else(|| Error::InvalidParameter("empty grid".into()))?;
    let witness = Witness {
        point: Some(points[i].clone()),
        index: Some(evals[i].col.0 + 1),
        value: Some(sup),
        condition: Some("weighted column sum".into()),
        ..Default::default()
    };
    let mut cert = Certificate::new(Rule::ScaledL1Cooperative, k, Some(Norm::L1), sup, witness);
    cert.scaling = Some(Matrix::diag(v));
    cert.effective_rate = Some(-sup / vmax);
    cert.grid = Some(meta);
    Ok(cert)
}

/// No non-trivial periodic solutions in the box when `μ(J^[2]) < 0` or
/// `μ(−J^[2]) < 0` at every grid point.
pub fn check_bendixson(system: &SystemModel, omega: &BoxDomain, norm: Norm) -> Result<Certificate> {
    require_autonomous(system)?;
    if system.dim() < 2 {
        return Err(Error::OrderTooLarge { k: 2, max: system.dim() });
    }
    let points = grid_points_in_domain(system, omega)?;
    let values = par_map(&points, |x| {
        let j = system.jacobian(0.0, x);
        let fwd = measure_k_direct(&j, 2, norm)?.value;
        let bwd = measure_k_direct(&j.scale(-1.0), 2, norm)?.value;
        Ok((fwd, bwd))
    })?;
    let (i_f, sup_f) = argmax(values.iter().map(|v| v.0)).ok_or_else(|| Error::InvalidParameter("empty grid".into()))?;
    let (i_b, sup_b) = argmax(values.iter().map(|v| v.1)).expect("non-empty");
    let (i, sup, branch) = if sup_f <= -CERTIFY_TOL || sup_f <= sup_b {
        (i_f, sup_f, "contracting")
    } else {
        (i_b, sup_b, "expanding")
    };
    let witness = Witness {
        point: Some(points[i].clone()),
        value: Some(sup),
        condition: Some(format!("{} branch", branch)),
        ..Default::default()
    };
    let mut c = Certificate::new(Rule::Bendixson, 2, Some(norm), sup, witness);
    if c.is_certified() {
        c.branch = Some(branch.into());
    }
    c.grid = Some(grid_meta(omega, points.len(), None));
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCensus {
    /// One representative per cluster, in order of first discovery over the grid.
    pub equilibria: Vec<Vec<f64>>,
    pub seeds: usize,
    /// Seeds whose Newton iteration failed or ended outside the box.
    pub skipped: usize,
}

fn newton_equilibrium<F, J>(field: &F, jacobian: &J, seed: &[f64], omega: &BoxDomain) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> Matrix,
{
    let mut x = seed.to_vec();
    for _ in 0..NEWTON_MAX_ITER {
        let f = field(&x);
        let res = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !res.is_finite() {
            return None;
        }
        if res <= NEWTON_RESIDUAL {
            return omega.contains(&x, DOMAIN_TOL).then_some(x);
        }
        let lu = jacobian(&x).lu().ok()?;
        if lu.is_singular() {
            return None;
        }
        let step = lu.solve(&f);
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi -= si;
        }
        if x.iter().any(|v| !v.is_finite()) || omega.scaled_distance(&x, seed) > 10.0 {
            return None;
        }
    }
    let res = field(&x).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (res <= NEWTON_RESIDUAL && omega.contains(&x, DOMAIN_TOL)).then_some(x)
}

pub(crate) fn census_with<F, J>(field: F, jacobian: J, omega: &BoxDomain) -> Result<EquilibriumCensus>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync + Send,
    J: Fn(&[f64]) -> Matrix + Sync + Send,
{
    let seeds = omega.grid_points()?;
    let found = par_map(&seeds, |s| Ok(newton_equilibrium(&field, &jacobian, s, omega)))?;
    let mut equilibria: Vec<Vec<f64>> = Vec::new();
    let mut skipped = 0;
    for x in found {
        match x {
            None => skipped += 1,
            Some(x) => {
                if !equilibria.iter().any(|e| omega.scaled_distance(e, &x) <= CLUSTER_RADIUS) {
                    equilibria.push(x);
                }
            }
        }
    }
    Ok(EquilibriumCensus {
        equilibria,
        seeds: seeds.len(),
        skipped,
    })
}

/// Equilibria of an autonomous system found by Newton iteration from every grid point.
pub fn equilibrium_census(system: &SystemModel, omega: &BoxDomain) -> Result<EquilibriumCensus> {
    require_autonomous(system)?;
    census_with(|x| system.field(0.0, x), |x| system.jacobian(0.0, x), omega)
}

/// Global asymptotic stability from 2-contraction on the box plus a unique equilibrium.
///
/// Several equilibria yield `NOT_CERTIFIED` with the census attached: the
/// conclusion would then only be convergence to the equilibrium set.
pub fn check_gas(system: &SystemModel, omega: &BoxDomain, norm: Norm) -> Result<Certificate> {
    require_autonomous(system)?;
    if system.dim() < 2 {
        return Err(Error::OrderTooLarge { k: 2, max: system.dim() });
    }
    let points = grid_points_in_domain(system, omega)?;
    let values = par_map(&points, |x| Ok(measure_k_direct(&system.jacobian(0.0, x), 2, norm)?.value))?;
    let (i, sup) = argmax(values.iter().copied()).ok_or_else(|| Error::InvalidParameter("empty grid".into()))?;
    let census = equilibrium_census(system, omega)?;
    let unique = census.equilibria.len() == 1;
    let measure_ok = verdict_for(sup) == Verdict::Certified;
    let condition = match (measure_ok, census.equilibria.len()) {
        (false, _) => "second compound measure not negative".to_string(),
        (true, 1) => "worst second compound measure".to_string(),
        (true, 0) => "no equilibrium found".to_string(),
        (true, m) => format!("{} equilibria", m),
    };
    let witness = Witness {
        point: Some(points[i].clone()),
        value: Some(sup),
        condition: Some(condition),
        ..Default::default()
    };
    let mut c = Certificate::new(Rule::Gas2Contraction, 2, Some(norm), sup, witness);
    if !unique {
        c.verdict = Verdict::NotCertified;
    }
    c.grid = Some(grid_meta(omega, points.len(), None));
    c.equilibria = Some(census.equilibria);
    c.skipped_seeds = Some(census.skipped);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar_divergence_example() -> SystemModel {
        // ẋ = −x + y², ẏ = −y: divergence −2 everywhere
        SystemModel::builder(
            2,
            |_, x| vec![-x[0] + x[1] * x[1], -x[1]],
            |_, x| Matrix::from_rows(&[[-1.0, 2.0 * x[1]], [0.0, -1.0]]).unwrap(),
        )
        .autonomous(true)
        .build()
        .unwrap()
    }

    #[test]
    fn bendixson_planar() {
        let sys = planar_divergence_example();
        let omega = BoxDomain::cube(2, -2.0, 2.0).unwrap();
        for norm in Norm::ALL {
            let c = check_bendixson(&sys, &omega, norm).unwrap();
            assert_eq!(c.verdict, Verdict::Certified);
            assert!((c.eta - 2.0).abs() < 1e-12);
            assert_eq!(c.branch.as_deref(), Some("contracting"));
        }
        let osc = SystemModel::linear(Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap()).unwrap();
        let c = check_bendixson(&osc, &omega, Norm::L2).unwrap();
        assert_eq!(c.verdict, Verdict::NotCertified);
        assert!(c.witness.point.is_some());
    }

    #[test]
    fn expanding_branch() {
        let sys = SystemModel::linear(Matrix::diag(&[1.0, 0.5])).unwrap();
        let omega = BoxDomain::cube(2, -1.0, 1.0).unwrap();
        let c = check_bendixson(&sys, &omega, Norm::L1).unwrap();
        assert_eq!(c.branch.as_deref(), Some("expanding"));
        assert_eq!(c.eta, 1.5);
    }

    #[test]
    fn gas_with_three_equilibria() {
        // ẋ = x − x³, ẏ = −y
        let sys = SystemModel::builder(
            2,
            |_, x| vec![x[0] - x[0].powi(3), -x[1]],
            |_, x| Matrix::diag(&[1.0 - 3.0 * x[0] * x[0], -1.0]),
        )
        .autonomous(true)
        .build()
        .unwrap();
        let omega = BoxDomain::cube(2, -2.0, 2.0).unwrap();
        let c = check_gas(&sys, &omega, Norm::L2).unwrap();
        assert_eq!(c.verdict, Verdict::NotCertified);
        let mut xs: Vec<f64> = c.equilibria.unwrap().iter().map(|e| e[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs.len(), 3);
        for (got, want) in xs.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn gas_linear_hurwitz() {
        let a = Matrix::from_rows(&[[-1.0, 0.5], [-0.5, -2.0]]).unwrap();
        let sys = SystemModel::linear(a).unwrap();
        let omega = BoxDomain::cube(2, -1.0, 1.0).unwrap();
        let c = check_gas(&sys, &omega, Norm::L2).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert_eq!(c.equilibria.as_ref().unwrap().len(), 1);
        assert!(c.equilibria.unwrap()[0].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn scaled_l1_cooperative_linear() {
        // Metzler A with vᵀA = −1ᵀ for v = (1, 2)
        let a = Matrix::from_rows(&[[-3.0, 1.0], [1.0, -1.0]]).unwrap();
        let v = [1.0, 2.0];
        let sys = SystemModel::linear(a).unwrap();
        let omega = BoxDomain::cube(2, -1.0, 1.0).unwrap().with_uniform_count(2).unwrap();
        let c = certify_scaled_l1(&sys, &omega, 1, &v).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert_eq!(c.eta, 1.0);
        assert_eq!(c.effective_rate, Some(0.5));
        assert!(matches!(
            certify_scaled_l1(&sys, &omega, 1, &[1.0]),
            Err(Error::BadWeightVector(_))
        ));
        let non_metzler = SystemModel::linear(Matrix::from_rows(&[[-3.0, -1.0], [1.0, -1.0]]).unwrap()).unwrap();
        let c = certify_scaled_l1(&non_metzler, &omega, 1, &v).unwrap();
        assert_eq!(c.verdict, Verdict::NotCertified);
        assert!(c.witness.condition.unwrap().starts_with("metzler"));
    }

    #[test]
    fn linear_grid_matches_lti() {
        let a = Matrix::from_rows(&[[-2.0, 1.0, 0.0], [0.5, -1.0, 0.3], [0.0, 2.0, -4.0]]).unwrap();
        let sys = SystemModel::linear(a.clone()).unwrap();
        let omega = BoxDomain::cube(3, -1.0, 1.0).unwrap().with_uniform_count(3).unwrap();
        for norm in Norm::ALL {
            for k in 1..=3 {
                let g = certify_nonlinear_grid(&sys, &omega, k, &norm.into(), None).unwrap();
                let l = super::super::certify_lti(&a, k, &norm.into()).unwrap();
                assert_eq!(g.eta, l.eta);
                assert_eq!(g.verdict, l.verdict);
            }
        }
    }
}
