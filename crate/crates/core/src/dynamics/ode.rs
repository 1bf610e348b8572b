//! Fixed-step classical Runge-Kutta with compensated state accumulation.

use crate::error::{Error, Result};

/// Number of steps and effective step for integrating over `[t0, t1]` with nominal step `h`.
pub fn step_plan(t0: f64, t1: f64, h: f64) -> Result<(usize, f64)> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidStep(format!("step h = {} must be positive", h)));
    }
    if !t0.is_finite() || !t1.is_finite() || t1 < t0 {
        return Err(Error::InvalidStep(format!("time span [{}, {}]", t0, t1)));
    }
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((0, 0.0));
    }
    let n = ((span / h).round() as usize).max(1);
    Ok((n, span / n as f64))
}

/// Integrates `x' = f(t, x)` from `t0` for `n_steps` steps of size `h`, calling
/// `observe(step, t, x)` at the initial state and after every step.
///
/// `f` writes the derivative into its output slice. Sample times are computed
/// as `t0 + i·h` rather than accumulated. The state update uses Kahan
/// summation so that round-off stays well below the truncation error even at
/// small steps.
pub fn rk4<F, O>(mut f: F, t0: f64, x0: &[f64], n_steps: usize, h: f64, mut observe: O) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(usize, f64, &[f64]) -> Result<()>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut comp = vec![0.0; n];
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    observe(0, t0, &x)?;
    for step in 0..n_steps {
        let t = t0 + step as f64 * h;
        f(t, &x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        f(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        f(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        f(t + h, &tmp, &mut k4);
        for i in 0..n {
            let incr = h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
            let y = incr - comp[i];
            let s = x[i] + y;
            comp[i] = (s - x[i]) - y;
            x[i] = s;
        }
        let t_next = t0 + (step + 1) as f64 * h;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState(t_next));
        }
        observe(step + 1, t_next, &x)?;
    }
    Ok(x)
}
