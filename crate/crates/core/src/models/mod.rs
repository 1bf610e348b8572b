//! Built-in systems with closed-form oracles where available.

mod seir;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::SystemModel;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub use seir::{
    seir_orbit_diagnostics, RemovalFn, Seir3, SeirDiagnostics, SeirSample, AVERAGE_SLACK, GAMMA_THRESHOLD, MARGIN_TOL,
};

pub type CoefficientFn = Arc<dyn Fn(f64) -> Matrix + Send + Sync>;

pub const MODEL_NAMES: [&str; 6] = ["lti", "diag2", "oscillator", "cos_ltv", "seir3", "hopf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OracleKind {
    ClosedForm,
    None,
}

#[derive(Clone)]
pub struct ModelEntry {
    pub name: String,
    pub system: SystemModel,
    pub parameters: BTreeMap<String, f64>,
    pub description: String,
    pub oracle_kind: OracleKind,
    /// `A(t)` for linear models.
    pub coefficient: Option<CoefficientFn>,
    pub seir: Option<Seir3>,
    /// Starting state used when none is given.
    pub default_state: Vec<f64>,
}

impl fmt::Debug for ModelEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelEntry")
            .field("name", &self.name)
            .field("parameters", &self.parameters)
            .field("oracle_kind", &self.oracle_kind)
            .field("system", &self.system)
            .finish()
    }
}

/// Model parameter file: `{"name": ..., "params": {...}}`, plus `matrix` for `lti`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
}

impl ModelFile {
    pub fn instantiate(&self) -> Result<ModelEntry> {
        match (&*self.name, &self.matrix) {
            ("lti", Some(a)) => {
                reject_params(&self.params, &[])?;
                lti(a.clone())
            }
            ("lti", None) => Err(Error::InvalidParameter("model 'lti' needs a matrix".into())),
            (_, Some(_)) => Err(Error::InvalidParameter(format!("model '{}' takes no matrix", self.name))),
            (name, None) => model(name, &self.params),
        }
    }
}

fn reject_params(params: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::InvalidParameter(format!("unknown parameter '{}'", k))),
        None => Ok(()),
    }
}

fn linear_entry(
    name: &str,
    description: &str,
    a: Matrix,
    oracle: Option<Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>>,
) -> Result<ModelEntry> {
    let n = a.require_square()?;
    let (af, aj, ac) = (a.clone(), a.clone(), a);
    let mut b = SystemModel::builder(n, move |_, x| af.mul_vec(x), move |_, _| aj.clone()).autonomous(true);
    let oracle_kind = if let Some(o) = oracle {
        b = b.oracle(move |t, x0| o(t, x0));
        OracleKind::ClosedForm
    } else {
        OracleKind::None
    };
    Ok(ModelEntry {
        name: name.into(),
        system: b.build()?,
        parameters: BTreeMap::new(),
        description: description.into(),
        oracle_kind,
        coefficient: Some(Arc::new(move |_| ac.clone())),
        seir: None,
        default_state: vec![1.0; n],
    })
}

/// Constant linear system `ẋ = A x`.
pub fn lti(a: Matrix) -> Result<ModelEntry> {
    linear_entry("lti", "constant linear system x' = A x", a, None)
}

/// `Φ(t)` of the `cos_ltv` model.
pub fn cos_ltv_transition(t: f64) -> Matrix {
    let e = (-t).exp();
    Matrix::from_vec_unchecked(2, 2, vec![e, 0.0, 0.5 * (-1.0 + e * (t.cos() - t.sin())), 1.0])
}

pub fn cos_ltv_coefficient(t: f64) -> Matrix {
    Matrix::from_vec_unchecked(2, 2, vec![-1.0, 0.0, -t.cos(), 0.0])
}

/// Looks up a built-in model and applies parameter overrides.
pub fn model(name: &str, params: &BTreeMap<String, f64>) -> Result<ModelEntry> {
    match name {
        "lti" => Err(Error::InvalidParameter(
            "model 'lti' needs a matrix; use a model file or models::lti".into(),
        )),
        "diag2" => {
            reject_params(params, &[])?;
            linear_entry(
                "diag2",
                "A = diag(3, -4): not Hurwitz, yet 2-contractive with rate 1",
                Matrix::diag(&[3.0, -4.0]),
                Some(Arc::new(|t, x0| vec![x0[0] * (3.0 * t).exp(), x0[1] * (-4.0 * t).exp()])),
            )
        }
        "oscillator" => {
            reject_params(params, &[])?;
            linear_entry(
                "oscillator",
                "harmonic oscillator A = [[0, 1], [-1, 0]]; areas are preserved",
                Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]])?,
                Some(Arc::new(|t, x0| {
                    let (s, c) = t.sin_cos();
                    vec![c * x0[0] + s * x0[1], -s * x0[0] + c * x0[1]]
                })),
            )
        }
        "cos_ltv" => {
            reject_params(params, &[])?;
            let system = SystemModel::builder(
                2,
                |t, x| cos_ltv_coefficient(t).mul_vec(x),
                |t, _| cos_ltv_coefficient(t),
            )
            .oracle(|t, x0| cos_ltv_transition(t).mul_vec(x0))
            .period(2.0 * PI)
            .build()?;
            Ok(ModelEntry {
                name: "cos_ltv".into(),
                system,
                parameters: BTreeMap::new(),
                description: "A(t) = [[-1, 0], [-cos t, 0]]: trace -1 but a neutral direction".into(),
                oracle_kind: OracleKind::ClosedForm,
                coefficient: Some(Arc::new(cos_ltv_coefficient)),
                seir: None,
                default_state: vec![2.0, 1.0],
            })
        }
        "seir3" => {
            reject_params(params, &["lambda", "zeta", "c", "q", "p", "gamma"])?;
            let d = Seir3::default();
            let get = |k: &str, v: f64| params.get(k).copied().unwrap_or(v);
            let s = Seir3::new(
                get("lambda", d.lambda),
                get("zeta", d.zeta),
                get("c", d.c),
                get("q", d.q),
                get("p", d.p),
                get("gamma", d.gamma),
            )?;
            let parameters = [
                ("lambda", s.lambda),
                ("zeta", s.zeta),
                ("c", s.c),
                ("q", s.q),
                ("p", s.p),
                ("gamma", s.gamma),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
            Ok(ModelEntry {
                name: "seir3".into(),
                system: s.system()?,
                parameters,
                description: "susceptible-exposed-infectious epidemic model with f1 = x1^q x3^p, f4 = gamma x3".into(),
                oracle_kind: OracleKind::None,
                coefficient: None,
                seir: Some(s),
                default_state: vec![0.7, 0.1, 0.1],
            })
        }
        "hopf" => {
            reject_params(params, &[])?;
            let system = SystemModel::builder(
                2,
                |_, x| {
                    let r2 = x[0] * x[0] + x[1] * x[1];
                    vec![-x[1] - x[0] * (r2 - 1.0), x[0] - x[1] * (r2 - 1.0)]
                },
                |_, x| {
                    let (a, b) = (x[0], x[1]);
                    let r2 = a * a + b * b;
                    Matrix::from_vec_unchecked(
                        2,
                        2,
                        vec![-(r2 - 1.0) - 2.0 * a * a, -1.0 - 2.0 * a * b, 1.0 - 2.0 * a * b, -(r2 - 1.0) - 2.0 * b * b],
                    )
                },
            )
            .autonomous(true)
            .period(2.0 * PI)
            .oracle(|t, x0| {
                // ṙ = −r(r² − 1), θ̇ = 1
                let r0sq = x0[0] * x0[0] + x0[1] * x0[1];
                if r0sq == 0.0 {
                    return vec![0.0, 0.0];
                }
                let r = (1.0 / (1.0 + (1.0 / r0sq - 1.0) * (-2.0 * t).exp())).sqrt();
                let theta = x0[1].atan2(x0[0]) + t;
                vec![r * theta.cos(), r * theta.sin()]
            })
            .build()?;
            Ok(ModelEntry {
                name: "hopf".into(),
                system,
                parameters: BTreeMap::new(),
                description: "planar system with an attracting unit-circle orbit of period 2 pi".into(),
                oracle_kind: OracleKind::ClosedForm,
                coefficient: None,
                seir: None,
                default_state: vec![1.1, 0.0],
            })
        }
        other => Err(Error::UnknownModel(other.to_string())),
    }
}
