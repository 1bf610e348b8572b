use serde::{Deserialize, Serialize};

use super::ode::{rk4, step_plan};
use super::system::SystemModel;
use crate::compound::add_compound;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_STEP: f64 = 1e-3;
/// Slack allowed before a state counts as outside the declared domain.
pub const DOMAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DomainPolicy {
    /// Record the first exit and keep integrating.
    #[default]
    Warn,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub h: f64,
    /// Keep every `record_every`-th step (the final state is always kept).
    pub record_every: usize,
    pub domain_policy: DomainPolicy,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            h: DEFAULT_STEP,
            record_every: 1,
            domain_policy: DomainPolicy::Warn,
        }
    }
}

impl IntegrationOptions {
    pub fn with_step(h: f64) -> Self {
        IntegrationOptions {
            h,
            ..Default::default()
        }
    }

    pub fn record_every(mut self, every: usize) -> Self {
        self.record_every = every.max(1);
        self
    }

    pub fn domain_policy(mut self, policy: DomainPolicy) -> Self {
        self.domain_policy = policy;
        self
    }

    fn keeps(&self, step: usize, n_steps: usize) -> bool {
        step % self.record_every == 0 || step == n_steps
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainExit {
    pub t: f64,
    pub state: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// First sample outside the declared domain, if any.
    pub domain_exit: Option<DomainExit>,
    /// Largest max-norm deviation from the closed-form solution over the samples.
    pub oracle_max_deviation: Option<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(|v| v.as_slice()).unwrap_or(&[])
    }
}

pub(crate) fn check_domain(
    system: &SystemModel,
    policy: DomainPolicy,
    t: f64,
    x: &[f64],
    exit: &mut Option<DomainExit>,
) -> Result<()> {
    if let Some(d) = system.domain() {
        if !d.contains(x, DOMAIN_TOL) {
            if policy == DomainPolicy::Error {
                return Err(Error::StateLeftDomain { t, state: x.to_vec() });
            }
            if exit.is_none() {
                *exit = Some(DomainExit { t, state: x.to_vec() });
            }
        }
    }
    Ok(())
}

/// Integrates the state equation from `x0` over `[t0, t1]`.
pub fn integrate(system: &SystemModel, x0: &[f64], t0: f64, t1: f64, opts: &IntegrationOptions) -> Result<Trajectory> {
    let n = system.dim();
    if x0.len() != n {
        return Err(Error::DimensionMismatch(format!("initial state of length {} for dimension {}", x0.len(), n)));
    }
    let (n_steps, h) = step_plan(t0, t1, opts.h)?;
    if let Some(d) = system.domain() {
        if !d.contains(x0, DOMAIN_TOL) && opts.domain_policy == DomainPolicy::Error {
            return Err(Error::StateLeftDomain {
                t: t0,
                state: x0.to_vec(),
            });
        }
    }
    let oracle_usable = system.oracle().is_some() && (system.is_autonomous() || t0 == 0.0);
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        domain_exit: None,
        oracle_max_deviation: oracle_usable.then_some(0.0),
    };
    let field = |t: f64, x: &[f64], dx: &mut [f64]| {
        let f = system.field(t, x);
        dx.copy_from_slice(&f);
    };
    rk4(field, t0, x0, n_steps, h, |step, t, x| {
        check_domain(system, opts.domain_policy, t, x, &mut traj.domain_exit)?;
        if opts.keeps(step, n_steps) {
            if let (Some(oracle), Some(dev)) = (system.oracle(), traj.oracle_max_deviation.as_mut()) {
                let exact = oracle(t - t0, x0);
                let d = exact.iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                *dev = dev.max(d);
            }
            traj.times.push(t);
            traj.states.push(x.to_vec());
        }
        Ok(())
    })?;
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub t0: f64,
    pub t: f64,
    pub phi: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixTrajectory {
    pub times: Vec<f64>,
    pub values: Vec<Matrix>,
}

impl MatrixTrajectory {
    pub fn last(&self) -> Option<&Matrix> {
        self.values.last()
    }
}

/// Integrates `Ẋ = B(t) X` from `X(t0) = x0` where `B` is supplied per time.
fn integrate_linear_matrix<B>(b: B, x0: &Matrix, t0: f64, t1: f64, opts: &IntegrationOptions) -> Result<MatrixTrajectory>
where
    B: Fn(f64) -> Result<Matrix>,
{
    let (rows, cols) = x0.shape();
    let (n_steps, h) = step_plan(t0, t1, opts.h)?;
    let mut failure: Option<Error> = None;
    let mut out = MatrixTrajectory {
        times: Vec::new(),
        values: Vec::new(),
    };
    let rhs = |t: f64, x: &[f64], dx: &mut [f64]| {
        if failure.is_some() {
            dx.fill(0.0);
            return;
        }
        match b(t) {
            Ok(bt) if bt.shape() == (rows, rows) => {
                for i in 0..rows {
                    for j in 0..cols {
                        let mut s = 0.0;
                        for p in 0..rows {
                            s += bt[(i, p)] * x[p * cols + j];
                        }
                        dx[i * cols + j] = s;
                    }
                }
            }
            Ok(bt) => {
                failure = Some(Error::DimensionMismatch(format!(
                    "coefficient matrix is {:?}, expected {}x{}",
                    bt.shape(),
                    rows,
                    rows
                )));
                dx.fill(0.0);
            }
            Err(e) => {
                failure = Some(e);
                dx.fill(0.0);
            }
        }
    };
    let mut observe = |step: usize, t: f64, x: &[f64]| {
        if opts.keeps(step, n_steps) {
            out.times.push(t);
            out.values.push(Matrix::from_vec_unchecked(rows, cols, x.to_vec()));
        }
        Ok(())
    };
    let result = rk4(rhs, t0, x0.as_slice(), n_steps, h, &mut observe);
    if let Some(e) = failure {
        return Err(e);
    }
    result?;
    Ok(out)
}

fn checked_coefficient<A: Fn(f64) -> Matrix>(a: &A, t: f64) -> Result<Matrix> {
    let m = a(t);
    if !m.is_finite() {
        return Err(Error::NonFiniteState(t));
    }
    Ok(m)
}

/// Samples of `Φ(t, t0)` solving `Φ̇ = A(t) Φ`, `Φ(t0) = I`.
pub fn transition_trajectory<A>(a: A, n: usize, t0: f64, t1: f64, opts: &IntegrationOptions) -> Result<MatrixTrajectory>
where
    A: Fn(f64) -> Matrix,
{
    integrate_linear_matrix(|t| checked_coefficient(&a, t), &Matrix::identity(n), t0, t1, opts)
}

/// `Φ(t1, t0)`.
pub fn transition_matrix<A>(a: A, n: usize, t0: f64, t1: f64, h: f64) -> Result<TransitionMatrix>
where
    A: Fn(f64) -> Matrix,
{
    let opts = IntegrationOptions::with_step(h).record_every(usize::MAX);
    let traj = transition_trajectory(a, n, t0, t1, &opts)?;
    Ok(TransitionMatrix {
        t0,
        t: t1,
        phi: traj.values.last().cloned().expect("final sample is always kept"),
    })
}

/// Samples of `Φ^(k)` integrated directly from the k-th compound equation
/// `d/dt Φ^(k) = A^[k](t) Φ^(k)`, `Φ^(k)(t0) = I`.
pub fn compound_transition<A>(a: A, n: usize, k: usize, t0: f64, t1: f64, opts: &IntegrationOptions) -> Result<MatrixTrajectory>
where
    A: Fn(f64) -> Matrix,
{
    let size = crate::combinatorics::binomial(n, k)? as usize;
    if k == 0 || k > n {
        return Err(Error::OrderTooLarge { k, max: n });
    }
    // surfaces the compound size cap before integrating
    add_compound(&Matrix::zeros(n, n), k)?;
    integrate_linear_matrix(
        |t| add_compound(&checked_coefficient(&a, t)?, k),
        &Matrix::identity(size),
        t0,
        t1,
        opts,
    )
}
