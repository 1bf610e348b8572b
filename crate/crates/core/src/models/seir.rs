use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::BoxDomain;
use crate::dynamics::SystemModel;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measures::{measure_value, Norm};

/// Removal term `f4(x3)` returning `(f4, f4')`.
pub type RemovalFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Components closer to zero than this make the orbit scaling undefined.
pub const GAMMA_THRESHOLD: f64 = 1e-8;
pub const MARGIN_TOL: f64 = 1e-6;
pub const AVERAGE_SLACK: f64 = 1e-3;

/// Three-compartment epidemic model on `{x ≥ 0 : x1 + x2 + x3 ≤ 1}`:
///
/// ```text
/// ẋ1 = −λ f1(x1, x3) + ζ − ζ x1
/// ẋ2 =  λ f1(x1, x3) − c x2 − ζ x2
/// ẋ3 =  c x2 − f4(x3) − ζ x3
/// ```
///
/// with `f1 = x1^q x3^p` and, by default, `f4 = γ x3`.
#[derive(Clone)]
pub struct Seir3 {
    pub lambda: f64,
    pub zeta: f64,
    pub c: f64,
    pub q: f64,
    pub p: f64,
    pub gamma: f64,
    f4: RemovalFn,
    custom_f4: bool,
}

impl fmt::Debug for Seir3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Seir3")
            .field("lambda", &self.lambda)
            .field("zeta", &self.zeta)
            .field("c", &self.c)
            .field("q", &self.q)
            .field("p", &self.p)
            .field("gamma", &self.gamma)
            .field("custom_f4", &self.custom_f4)
            .finish()
    }
}

impl Default for Seir3 {
    fn default() -> Self {
        Seir3::new(2.0, 0.2, 1.0, 1.0, 1.0, 0.5).expect("default parameters are valid")
    }
}

impl Seir3 {
    pub fn new(lambda: f64, zeta: f64, c: f64, q: f64, p: f64, gamma: f64) -> Result<Self> {
        let positive = [("lambda", lambda), ("zeta", zeta), ("c", c), ("q", q), ("gamma", gamma)];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{} must be positive, got {}", name, v)));
            }
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {}", p)));
        }
        Ok(Seir3 {
            lambda,
            zeta,
            c,
            q,
            p,
            gamma,
            f4: Arc::new(move |x3| (gamma * x3, gamma)),
            custom_f4: false,
        })
    }

    /// Replaces the linear removal term. `f4` returns `(f4(x3), f4'(x3))`.
    pub fn with_removal<F>(mut self, f4: F) -> Self
    where
        F: Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    {
        self.f4 = Arc::new(f4);
        self.custom_f4 = true;
        self
    }

    pub fn f1(&self, x1: f64, x3: f64) -> f64 {
        x1.max(0.0).powf(self.q) * x3.max(0.0).powf(self.p)
    }

    /// `(∂f1/∂x1, ∂f1/∂x3)`.
    pub fn f1_partials(&self, x1: f64, x3: f64) -> (f64, f64) {
        let (x1, x3) = (x1.max(0.0), x3.max(0.0));
        let d1 = if x1 == 0.0 && self.q >= 1.0 {
            if self.q == 1.0 {
                x3.powf(self.p)
            } else {
                0.0
            }
        } else {
            self.q * x1.powf(self.q - 1.0) * x3.powf(self.p)
        };
        let d3 = if x3 == 0.0 && self.p == 1.0 {
            x1.powf(self.q)
        } else {
            self.p * x1.powf(self.q) * x3.powf(self.p - 1.0)
        };
        (d1, d3)
    }

    pub fn f4(&self, x3: f64) -> (f64, f64) {
        (self.f4)(x3)
    }

    pub fn field(&self, x: &[f64]) -> Vec<f64> {
        let f1 = self.f1(x[0], x[2]);
        let (f4, _) = self.f4(x[2]);
        vec![
            -self.lambda * f1 + self.zeta - self.zeta * x[0],
            self.lambda * f1 - self.c * x[1] - self.zeta * x[1],
            self.c * x[1] - f4 - self.zeta * x[2],
        ]
    }

    pub fn jacobian(&self, x: &[f64]) -> Matrix {
        let (f11, f13) = self.f1_partials(x[0], x[2]);
        let (_, f4d) = self.f4(x[2]);
        let (l, z, c) = (self.lambda, self.zeta, self.c);
        Matrix::from_vec_unchecked(
            3,
            3,
            vec![
                -l * f11 - z,
                0.0,
                -l * f13,
                l * f11,
                -c - z,
                l * f13,
                0.0,
                c,
                -f4d - z,
            ],
        )
    }

    /// Second additive compound of the Jacobian in closed form.
    pub fn jacobian_2(&self, x: &[f64]) -> Matrix {
        let (f11, f13) = self.f1_partials(x[0], x[2]);
        let (_, f4d) = self.f4(x[2]);
        let (l, z, c) = (self.lambda, self.zeta, self.c);
        Matrix::from_vec_unchecked(
            3,
            3,
            vec![
                -l * f11 - c - 2.0 * z,
                l * f13,
                l * f13,
                c,
                -l * f11 - f4d - 2.0 * z,
                0.0,
                0.0,
                l * f11,
                -c - f4d - 2.0 * z,
            ],
        )
    }

    pub fn domain() -> BoxDomain {
        BoxDomain::unit_simplex(3).expect("valid simplex")
    }

    pub fn system(&self) -> Result<SystemModel> {
        let (a, b) = (self.clone(), self.clone());
        SystemModel::builder(3, move |_, x| a.field(x), move |_, x| b.jacobian(x))
            .domain(Seir3::domain())
            .autonomous(true)
            .build()
    }

    /// Orbit-scaling diagnostics at one point `γ` of a trajectory.
    pub fn diagnostic_sample(&self, t: f64, g: &[f64]) -> Result<SeirSample> {
        for component in [2usize, 3] {
            let v = g[component - 1];
            if v.abs() < GAMMA_THRESHOLD {
                return Err(Error::GammaNearZero { component, value: v, t });
            }
        }
        let (g2, g3) = (g[1], g[2]);
        let gdot = self.field(g);
        let (f11, f13) = self.f1_partials(g[0], g[2]);
        let (_, f4d) = self.f4(g3);
        let (l, z, c) = (self.lambda, self.zeta, self.c);
        let log_rate_2 = gdot[1] / g2;
        let log_rate_3 = gdot[2] / g3;
        let g1_val = -l * f11 - c + l * (g3 / g2) * f13 - 2.0 * z;
        let g2_val = (g2 / g3) * c - f4d + log_rate_2 - log_rate_3 - 2.0 * z;

        // S = Ḋ D⁻¹ + M D J^[2] D⁻¹ M⁻¹ with D = diag(1, d, d), d = γ2/γ3
        let d = g2 / g3;
        let dd = Matrix::diag(&[1.0, d, d]);
        let dinv = Matrix::diag(&[1.0, 1.0 / d, 1.0 / d]);
        let m = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, -1.0]])?;
        let minv = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, 0.5, -0.5]])?;
        let j2 = self.jacobian_2(g);
        let core = m.matmul(&dd)?.matmul(&j2)?.matmul(&dinv)?.matmul(&minv)?;
        let ddot = Matrix::diag(&[0.0, log_rate_2 - log_rate_3, log_rate_2 - log_rate_3]);
        let s = &ddot + &core;
        let mu_inf = measure_value(&s, Norm::LInf)?;
        let bound = log_rate_2 - z;
        let f1 = self.f1(g[0], g[2]);
        Ok(SeirSample {
            t,
            g1: g1_val,
            g2: g2_val,
            mu_inf,
            bound,
            margin: bound - mu_inf,
            g1_cap: l * f1 / g2 - c - 2.0 * z,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeirSample {
    pub t: f64,
    pub g1: f64,
    pub g2: f64,
    /// `μ∞(S(γ(t)))`.
    pub mu_inf: f64,
    /// `γ̇2/γ2 − ζ`.
    pub bound: f64,
    /// `bound − mu_inf`.
    pub margin: f64,
    /// Upper bound on `g1` from `∂f1/∂x3 ≤ f1/x3`: `λ f1/γ2 − c − 2ζ`.
    pub g1_cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeirDiagnostics {
    pub zeta: f64,
    pub samples: Vec<SeirSample>,
    pub min_margin: f64,
    /// Every margin is at least `−1e-6`.
    pub pointwise_ok: bool,
    /// Every `g1` is at most its cap (to `1e-9`).
    pub g1_cap_ok: bool,
    /// Trapezoidal time-average of `μ∞(S)` (plain mean for a single instant).
    pub average_mu: f64,
    /// `average_mu ≤ −ζ + 1e-3`.
    pub average_ok: bool,
}

/// Evaluates the orbit-scaling diagnostics along sampled trajectory points.
pub fn seir_orbit_diagnostics(model: &Seir3, times: &[f64], states: &[Vec<f64>]) -> Result<SeirDiagnostics> {
    if times.len() != states.len() || times.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} times and {} states",
            times.len(),
            states.len()
        )));
    }
    if let Some(s) = states.iter().find(|s| s.len() != 3) {
        return Err(Error::DimensionMismatch(format!("state of length {}", s.len())));
    }
    let samples = times
        .iter()
        .zip(states)
        .map(|(&t, x)| model.diagnostic_sample(t, x))
        .collect::<Result<Vec<_>>>()?;
    let min_margin = samples.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
    let g1_cap_ok = samples.iter().all(|s| s.g1 <= s.g1_cap + 1e-9);
    let span = times[times.len() - 1] - times[0];
    let average_mu = if span > 0.0 {
        let integral: f64 = samples
            .windows(2)
            .map(|w| 0.5 * (w[0].mu_inf + w[1].mu_inf) * (w[1].t - w[0].t))
            .sum();
        integral / span
    } else {
        samples.iter().map(|s| s.mu_inf).sum::<f64>() / samples.len() as f64
    };
    Ok(SeirDiagnostics {
        zeta: model.zeta,
        min_margin,
        pointwise_ok: min_margin >= -MARGIN_TOL,
        g1_cap_ok,
        average_ok: average_mu <= -model.zeta + AVERAGE_SLACK,
        average_mu,
        samples,
    })
}
