use serde::{Deserialize, Serialize};

use super::integrate::{compound_transition, transition_matrix, IntegrationOptions};
use crate::error::{Error, Result};
use crate::matrix::{svd, Matrix};

pub const DEFAULT_HORIZON: f64 = 30.0;
/// Singular values of `Φ(T_max)` (and compound norms) below this count as decayed.
pub const DECAY_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceReport {
    pub k: usize,
    pub horizon: f64,
    /// Singular values of `Φ(T_max)`, descending.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    pub decaying_dimension: usize,
    /// `n − k + 1`.
    pub required_dimension: usize,
    /// Spectral norm of the directly integrated `Φ^(k)(T_max)`.
    pub compound_norm: f64,
    /// `ln(compound_norm) / T_max`.
    pub compound_rate: f64,
    pub compound_decays: bool,
    /// The compound decays exactly when the decaying subspace has dimension at least `n − k + 1`.
    pub consistent: bool,
}

/// Estimates the dimension of the subspace of initial conditions whose
/// solutions decay under `ẋ = A(t) x`, and tests decay of `ẏ = A^[k](t) y`.
///
/// Uniform stability of the system is assumed, not checked.
pub fn asymptotic_subspace<A>(a: A, n: usize, k: usize, horizon: f64, h: f64) -> Result<SubspaceReport>
where
    A: Fn(f64) -> Matrix,
{
    if k == 0 || k > n {
        return Err(Error::OrderTooLarge { k, max: n });
    }
    if !(horizon > 0.0) {
        return Err(Error::InvalidStep(format!("horizon {}", horizon)));
    }
    let phi = transition_matrix(&a, n, 0.0, horizon, h)?.phi;
    let singular_values = svd(&phi)?.singular_values;
    let decaying_dimension = singular_values.iter().filter(|&&s| s < DECAY_THRESHOLD).count();
    let opts = IntegrationOptions::with_step(h).record_every(usize::MAX);
    let compound = compound_transition(&a, n, k, 0.0, horizon, &opts)?;
    let compound_norm = svd(compound.last().expect("final sample is kept"))?.singular_values[0];
    let compound_decays = compound_norm < DECAY_THRESHOLD;
    let required_dimension = n - k + 1;
    Ok(SubspaceReport {
        k,
        horizon,
        singular_values,
        threshold: DECAY_THRESHOLD,
        decaying_dimension,
        required_dimension,
        compound_norm,
        compound_rate: compound_norm.ln() / horizon,
        compound_decays,
        consistent: compound_decays == (decaying_dimension >= required_dimension),
    })
}
