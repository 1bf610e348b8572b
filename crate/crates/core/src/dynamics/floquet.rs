use serde::{Deserialize, Serialize};

use super::integrate::IntegrationOptions;
use super::system::SystemModel;
use super::variational::frame_from;
use crate::compound::mult_compound;
use crate::error::{Error, Result};
use crate::matrix::{svd, Matrix};
use crate::spectra::{eigenvalues, greedy_match_distance, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetOptions {
    pub h: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Distance to 1 within which a multiplier counts as the trivial one.
    pub unit_multiplier_tol: f64,
}

impl Default for FloquetOptions {
    fn default() -> Self {
        FloquetOptions {
            h: super::integrate::DEFAULT_STEP,
            newton_tol: 1e-8,
            max_newton: 50,
            unit_multiplier_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OrbitVerdict {
    OrbitallyStable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloquetResult {
    pub period: f64,
    /// Point on the orbit found by Newton iteration.
    pub orbit_point: Vec<f64>,
    pub newton_iterations: usize,
    pub residual: f64,
    pub monodromy: Matrix,
    pub multipliers: Spectrum,
    pub compound_monodromy: Matrix,
    pub compound_multipliers: Spectrum,
    pub compound_spectral_radius: f64,
    /// Distance from the multiplier nearest to 1 to 1.
    pub unit_multiplier_distance: f64,
    pub has_unit_multiplier: bool,
    /// Matching distance between compound multipliers and pairwise products of multipliers.
    pub product_mismatch: f64,
    pub verdict: OrbitVerdict,
}

impl FloquetResult {
    /// Multipliers other than the one nearest to 1.
    pub fn nontrivial_multipliers(&self) -> Vec<num_complex::Complex64> {
        let mut v = self.multipliers.values.clone();
        if let Some((i, _)) = v
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - 1.0).norm().total_cmp(&(b.1 - 1.0).norm()))
        {
            v.remove(i);
        }
        v
    }
}

/// Return map `x0 ↦ x(T, x0)` and its Jacobian, the monodromy matrix.
pub fn return_map(system: &SystemModel, x0: &[f64], period: f64, h: f64) -> Result<(Vec<f64>, Matrix)> {
    let n = system.dim();
    let opts = IntegrationOptions::with_step(h).record_every(usize::MAX);
    let frame = frame_from(system, x0, &Matrix::identity(n), 0.0, period, &opts)?;
    let x = frame.base.last().cloned().expect("final sample is kept");
    let phi = frame.frames.last().cloned().expect("final sample is kept");
    Ok((x, phi))
}

/// Locates a periodic orbit through Newton iteration on the return map and
/// analyses its monodromy and second compound.
///
/// The Newton step is the minimum-norm solution of `(Φ − I) δ = −(x(T) − x)`,
/// which leaves the phase along the orbit free instead of pinning it to a
/// coordinate hyperplane.
pub fn floquet(system: &SystemModel, seed: &[f64], opts: &FloquetOptions) -> Result<FloquetResult> {
    let period = system.period().ok_or(Error::NoPeriodFound)?;
    let n = system.dim();
    if n < 2 {
        return Err(Error::DimensionMismatch("Floquet analysis needs dimension at least 2".into()));
    }
    if seed.len() != n {
        return Err(Error::DimensionMismatch(format!("seed of length {} for dimension {}", seed.len(), n)));
    }
    let mut x = seed.to_vec();
    let mut iterations = 0;
    let (residual, phi) = loop {
        let (xt, phi) = return_map(system, &x, period, opts.h)?;
        let g: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
        let residual = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !residual.is_finite() {
            return Err(Error::NewtonDivergence(format!("non-finite residual after {} iterations", iterations)));
        }
        if residual <= opts.newton_tol {
            break (residual, phi);
        }
        if iterations == opts.max_newton {
            return Err(Error::NewtonDivergence(format!(
                "residual {:e} after {} iterations",
                residual, iterations
            )));
        }
        let jac = &phi - &Matrix::identity(n);
        let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
        let step = svd(&jac)?.pseudo_solve(&rhs, 1e-6);
        for (xi, di) in x.iter_mut().zip(&step) {
            *xi += di;
        }
        iterations += 1;
    };

    let multipliers = eigenvalues(&phi)?;
    let compound_monodromy = mult_compound(&phi, 2)?;
    let compound_multipliers = eigenvalues(&compound_monodromy)?;
    let compound_spectral_radius = compound_multipliers.spectral_radius();
    let mut products = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            products.push(multipliers.values[i] * multipliers.values[j]);
        }
    }
    let product_mismatch = greedy_match_distance(&products, &compound_multipliers.values);
    let unit_multiplier_distance = multipliers
        .values
        .iter()
        .map(|m| (m - 1.0).norm())
        .fold(f64::INFINITY, f64::min);
    let verdict = if compound_spectral_radius < 1.0 {
        OrbitVerdict::OrbitallyStable
    } else {
        OrbitVerdict::Inconclusive
    };
    Ok(FloquetResult {
        period,
        orbit_point: x,
        newton_iterations: iterations,
        residual,
        monodromy: phi,
        multipliers,
        compound_monodromy,
        compound_multipliers,
        compound_spectral_radius,
        unit_multiplier_distance,
        has_unit_multiplier: unit_multiplier_distance <= opts.unit_multiplier_tol,
        product_mismatch,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_period() {
        let sys = SystemModel::linear(Matrix::diag(&[-1.0, -2.0])).unwrap();
        assert!(matches!(
            floquet(&sys, &[0.1, 0.1], &FloquetOptions::default()),
            Err(Error::NoPeriodFound)
        ));
    }

    #[test]
    fn oscillator_is_inconclusive() {
        let sys = SystemModel::linear(Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap())
            .unwrap()
            .with_period(1.0)
            .unwrap();
        let r = floquet(&sys, &[0.5, 0.0], &FloquetOptions::default()).unwrap();
        assert_eq!(r.verdict, OrbitVerdict::Inconclusive);
        for m in &r.multipliers.values {
            assert!((m.norm() - 1.0).abs() < 1e-9);
            assert!((m.im.abs() - 1.0f64.sin()).abs() < 1e-9);
        }
    }
}
