use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub type FieldFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(f64, &[f64]) -> Matrix + Send + Sync>;
/// Closed-form flow: `(t, x0) ↦ x(t)` for a solution started at time 0.
pub type OracleFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// Relative tolerance of the Jacobian finite-difference self-test.
pub const JACOBIAN_SELF_TEST_TOL: f64 = 1e-4;
const SELF_TEST_POINTS: usize = 8;
const SELF_TEST_SEED: u64 = 0x6b63_6f6e;

/// A finite-dimensional system `ẋ = f(t, x)` with its Jacobian.
#[derive(Clone)]
pub struct SystemModel {
    dim: usize,
    field: FieldFn,
    jacobian: JacobianFn,
    domain: Option<BoxDomain>,
    oracle: Option<OracleFn>,
    period: Option<f64>,
    autonomous: bool,
}

impl fmt::Debug for SystemModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemModel")
            .field("dim", &self.dim)
            .field("domain", &self.domain)
            .field("oracle", &self.oracle.is_some())
            .field("period", &self.period)
            .field("autonomous", &self.autonomous)
            .finish()
    }
}

pub struct SystemBuilder {
    model: SystemModel,
    self_test: bool,
}

impl SystemModel {
    pub fn builder<F, J>(dim: usize, field: F, jacobian: J) -> SystemBuilder
    where
        F: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
        J: Fn(f64, &[f64]) -> Matrix + Send + Sync + 'static,
    {
        SystemBuilder {
            model: SystemModel {
                dim,
                field: Arc::new(field),
                jacobian: Arc::new(jacobian),
                domain: None,
                oracle: None,
                period: None,
                autonomous: false,
            },
            self_test: true,
        }
    }

    /// `ẋ = A x`.
    pub fn linear(a: Matrix) -> Result<SystemModel> {
        let n = a.require_square()?;
        let af = a.clone();
        let aj = a;
        SystemModel::builder(n, move |_, x| af.mul_vec(x), move |_, _| aj.clone())
            .autonomous(true)
            .build()
    }

    /// `ẋ = A(t) x`.
    pub fn linear_time_varying<A>(dim: usize, a: A) -> Result<SystemModel>
    where
        A: Fn(f64) -> Matrix + Send + Sync + 'static,
    {
        let a = Arc::new(a);
        let af = Arc::clone(&a);
        SystemModel::builder(dim, move |t, x| af(t).mul_vec(x), move |t, _| a(t)).build()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self, t: f64, x: &[f64]) -> Vec<f64> {
        (self.field)(t, x)
    }

    pub fn jacobian(&self, t: f64, x: &[f64]) -> Matrix {
        (self.jacobian)(t, x)
    }

    pub fn domain(&self) -> Option<&BoxDomain> {
        self.domain.as_ref()
    }

    pub fn oracle(&self) -> Option<&OracleFn> {
        self.oracle.as_ref()
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn is_autonomous(&self) -> bool {
        self.autonomous
    }

    /// Same system with a declared period (used by Floquet analysis).
    pub fn with_period(mut self, period: f64) -> Result<SystemModel> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidParameter(format!("period {}", period)));
        }
        self.period = Some(period);
        Ok(self)
    }

    pub fn with_domain(mut self, domain: BoxDomain) -> Result<SystemModel> {
        if domain.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "domain of dimension {} for a system of dimension {}",
                domain.dim(),
                self.dim
            )));
        }
        self.domain = Some(domain);
        Ok(self)
    }

    /// Largest relative deviation between the Jacobian and central differences
    /// of the field at `(t, x)`.
    pub fn jacobian_error(&self, t: f64, x: &[f64]) -> f64 {
        let j = self.jacobian(t, x);
        let mut worst: f64 = 0.0;
        let mut xp = x.to_vec();
        for c in 0..self.dim {
            let delta = 1e-6 * x[c].abs().max(1.0);
            xp[c] = x[c] + delta;
            let fp = self.field(t, &xp);
            xp[c] = x[c] - delta;
            let fm = self.field(t, &xp);
            xp[c] = x[c];
            for r in 0..self.dim {
                let fd = (fp[r] - fm[r]) / (2.0 * delta);
                worst = worst.max((fd - j[(r, c)]).abs());
            }
        }
        worst / j.max_abs().max(1.0)
    }

    /// Deterministic interior sample points used by the Jacobian self-test.
    pub fn self_test_points(&self) -> Vec<(f64, Vec<f64>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(SELF_TEST_SEED);
        let t_max = self.period.unwrap_or(10.0);
        (0..SELF_TEST_POINTS)
            .map(|_| {
                let t = if self.autonomous { 0.0 } else { rng.gen_range(0.0..t_max) };
                let x = match &self.domain {
                    Some(d) => {
                        let p: Vec<f64> = d
                            .lower
                            .iter()
                            .zip(&d.upper)
                            .map(|(l, u)| l + (0.05 + 0.9 * rng.gen::<f64>()) * (u - l))
                            .collect();
                        d.pull_inside(p)
                    }
                    None => (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                };
                (t, x)
            })
            .collect()
    }

    fn self_test(&self) -> Result<()> {
        for (t, x) in self.self_test_points() {
            let f = self.field(t, &x);
            let j = self.jacobian(t, &x);
            if f.len() != self.dim || j.shape() != (self.dim, self.dim) {
                return Err(Error::DimensionMismatch(format!(
                    "field of length {} and jacobian {:?} for dimension {}",
                    f.len(),
                    j.shape(),
                    self.dim
                )));
            }
            let error = self.jacobian_error(t, &x);
            if !(error <= JACOBIAN_SELF_TEST_TOL) {
                return Err(Error::JacobianMismatch { error, point: x });
            }
        }
        Ok(())
    }
}

impl SystemBuilder {
    pub fn domain(mut self, domain: BoxDomain) -> Self {
        self.model.domain = Some(domain);
        self
    }

    pub fn oracle<O>(mut self, oracle: O) -> Self
    where
        O: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.model.oracle = Some(Arc::new(oracle));
        self
    }

    pub fn period(mut self, period: f64) -> Self {
        self.model.period = Some(period);
        self
    }

    /// Marks the field as independent of `t`.
    pub fn autonomous(mut self, yes: bool) -> Self {
        self.model.autonomous = yes;
        self
    }

    /// Skips the Jacobian self-test. Only for deliberately inconsistent models in tests.
    pub fn skip_self_test(mut self) -> Self {
        self.self_test = false;
        self
    }

    pub fn build(self) -> Result<SystemModel> {
        let m = self.model;
        if m.dim == 0 {
            return Err(Error::InvalidParameter("system dimension must be positive".into()));
        }
        if let Some(d) = &m.domain {
            if d.dim() != m.dim {
                return Err(Error::DimensionMismatch(format!(
                    "domain of dimension {} for a system of dimension {}",
                    d.dim(),
                    m.dim
                )));
            }
        }
        if let Some(p) = m.period {
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::InvalidParameter(format!("period {}", p)));
            }
        }
        if self.self_test {
            m.self_test()?;
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrong_jacobian_is_rejected() {
        let r = SystemModel::builder(
            2,
            |_, x| vec![-x[0] + x[1] * x[1], -x[1]],
            |_, _| Matrix::from_rows(&[[-1.0, 0.0], [0.0, -1.0]]).unwrap(),
        )
        .build();
        assert!(matches!(r, Err(Error::JacobianMismatch { .. })));
    }

    #[test]
    fn correct_jacobian_is_accepted() {
        let m = SystemModel::builder(
            2,
            |_, x| vec![-x[0] + x[1] * x[1], -x[1]],
            |_, x| Matrix::from_rows(&[[-1.0, 2.0 * x[1]], [0.0, -1.0]]).unwrap(),
        )
        .autonomous(true)
        .build()
        .unwrap();
        assert_eq!(m.dim(), 2);
    }
}
