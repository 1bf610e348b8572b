use serde::{Deserialize, Serialize};

use super::integrate::{check_domain, DomainExit, IntegrationOptions, DOMAIN_TOL};
use super::ode::{rk4, step_plan};
use super::system::SystemModel;
use crate::compound::{wedge_columns, WedgeVector};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measures::Norm;

/// Base trajectory `x(t, h(r))` together with the frame `W(t, r) = [w^1 … w^k]`
/// solving `Ẇ = J(t, x) W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalFrame {
    pub k: usize,
    /// Simplex coordinates `r`, empty when the frame was started from explicit columns.
    pub anchor: Vec<f64>,
    /// Initial points `a^1, …, a^{k+1}`, empty when started from explicit columns.
    pub initials: Vec<Vec<f64>>,
    pub times: Vec<f64>,
    pub base: Vec<Vec<f64>>,
    /// `n × k` frames, one per sample.
    pub frames: Vec<Matrix>,
    pub domain_exit: Option<DomainExit>,
}

/// `h(r) = Σ r_i a^i + (1 − Σ r_i) a^{k+1}`.
pub fn simplex_point(initials: &[Vec<f64>], r: &[f64]) -> Result<Vec<f64>> {
    let k = r.len();
    if initials.len() != k + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} initial points for a simplex coordinate of length {}",
            initials.len(),
            k
        )));
    }
    let n = initials[0].len();
    if initials.iter().any(|a| a.len() != n) {
        return Err(Error::DimensionMismatch("initial points of different lengths".into()));
    }
    let rest = 1.0 - r.iter().sum::<f64>();
    if r.iter().any(|&v| v < 0.0) || rest < -1e-12 {
        return Err(Error::InvalidParameter(format!("{:?} is not in the unit simplex", r)));
    }
    Ok((0..n)
        .map(|j| r.iter().zip(initials).map(|(ri, a)| ri * a[j]).sum::<f64>() + rest * initials[k][j])
        .collect())
}

/// Co-integrates the base trajectory from `h(r)` and the frame with
/// `w^i(0) = a^i − a^{k+1}`.
pub fn variational_frame(
    system: &SystemModel,
    initials: &[Vec<f64>],
    r: &[f64],
    t0: f64,
    t1: f64,
    opts: &IntegrationOptions,
) -> Result<VariationalFrame> {
    let x0 = simplex_point(initials, r)?;
    if x0.len() != system.dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial points of length {} for dimension {}",
            x0.len(),
            system.dim()
        )));
    }
    if let Some(d) = system.domain() {
        if let Some(a) = initials.iter().find(|a| !d.contains(a, DOMAIN_TOL)) {
            return Err(Error::StateLeftDomain {
                t: t0,
                state: a.clone(),
            });
        }
    }
    let k = r.len();
    let last = &initials[k];
    let cols: Vec<Vec<f64>> = initials[..k]
        .iter()
        .map(|a| a.iter().zip(last).map(|(x, y)| x - y).collect())
        .collect();
    let w0 = Matrix::from_columns(&cols)?;
    let mut frame = frame_from(system, &x0, &w0, t0, t1, opts)?;
    frame.anchor = r.to_vec();
    frame.initials = initials.to_vec();
    Ok(frame)
}

/// Co-integrates the base trajectory from `x0` and an arbitrary initial frame `w0` (`n × k`).
pub fn frame_from(
    system: &SystemModel,
    x0: &[f64],
    w0: &Matrix,
    t0: f64,
    t1: f64,
    opts: &IntegrationOptions,
) -> Result<VariationalFrame> {
    let n = system.dim();
    let (rows, k) = w0.shape();
    if rows != n || x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "frame {}x{} and state of length {} for dimension {}",
            rows,
            k,
            x0.len(),
            n
        )));
    }
    let (n_steps, h) = step_plan(t0, t1, opts.h)?;
    // augmented state: x, then W row-major
    let mut z0 = x0.to_vec();
    z0.extend_from_slice(w0.as_slice());
    let rhs = |t: f64, z: &[f64], dz: &mut [f64]| {
        let x = &z[..n];
        let f = system.field(t, x);
        dz[..n].copy_from_slice(&f);
        let j = system.jacobian(t, x);
        let w = &z[n..];
        for i in 0..n {
            for c in 0..k {
                let mut s = 0.0;
                for p in 0..n {
                    s += j[(i, p)] * w[p * k + c];
                }
                dz[n + i * k + c] = s;
            }
        }
    };
    let mut frame = VariationalFrame {
        k,
        anchor: Vec::new(),
        initials: Vec::new(),
        times: Vec::new(),
        base: Vec::new(),
        frames: Vec::new(),
        domain_exit: None,
    };
    rk4(rhs, t0, &z0, n_steps, h, |step, t, z| {
        check_domain(system, opts.domain_policy, t, &z[..n], &mut frame.domain_exit)?;
        if step % opts.record_every == 0 || step == n_steps {
            frame.times.push(t);
            frame.base.push(z[..n].to_vec());
            frame.frames.push(Matrix::from_vec_unchecked(n, k, z[n..].to_vec()));
        }
        Ok(())
    })?;
    Ok(frame)
}

/// Wedge and norm of the transported parallelotope at each sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelotopeTrace {
    pub norm: Norm,
    pub times: Vec<f64>,
    pub wedges: Vec<WedgeVector>,
    pub norms: Vec<f64>,
}

impl ParallelotopeTrace {
    pub fn log_norms(&self) -> Vec<f64> {
        self.norms.iter().map(|v| v.ln()).collect()
    }

    /// Least-squares slope of `ln |∧w|` against `t` over samples with `t ≥ from`
    /// and a positive norm; `None` with fewer than two usable samples.
    pub fn slope_from(&self, from: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.norms)
            .filter(|(t, v)| **t >= from && **v > 0.0 && v.is_finite())
            .map(|(t, v)| (*t, v.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let m = pts.len() as f64;
        let tbar = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let ybar = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxx: f64 = pts.iter().map(|p| (p.0 - tbar).powi(2)).sum();
        if sxx == 0.0 {
            return None;
        }
        let sxy: f64 = pts.iter().map(|p| (p.0 - tbar) * (p.1 - ybar)).sum();
        Some(sxy / sxx)
    }

    pub fn slope(&self) -> Option<f64> {
        self.slope_from(f64::NEG_INFINITY)
    }

    /// Fitted exponential decay rate, the negated slope.
    pub fn decay_rate(&self) -> Option<f64> {
        self.slope().map(|s| -s)
    }
}

pub fn volume_trace(frame: &VariationalFrame, norm: Norm) -> Result<ParallelotopeTrace> {
    let wedges = frame.frames.iter().map(wedge_columns).collect::<Result<Vec<_>>>()?;
    let norms = wedges.iter().map(|w| w.norm(norm)).collect();
    Ok(ParallelotopeTrace {
        norm,
        times: frame.times.clone(),
        wedges,
        norms,
    })
}
