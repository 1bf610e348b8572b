//! Axis-aligned boxes (optionally cut by a half-space `Σx ≤ cap`) and their
//! sampling grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_GRID_COUNT: usize = 11;
pub const GRID_CAP: u64 = 1_000_000;

/// Slack used when testing membership and the sum cap on grid points.
const MEMBERSHIP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Grid points per axis.
    pub counts: Vec<usize>,
    /// Optional cap on the coordinate sum, turning the box into a truncated simplex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum_cap: Option<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "box bounds of length {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !l.is_finite() || !u.is_finite() || l > u {
                return Err(Error::InvalidParameter(format!("box axis {} has bounds [{}, {}]", i + 1, l, u)));
            }
        }
        let counts = vec![DEFAULT_GRID_COUNT; lower.len()];
        Ok(BoxDomain {
            lower,
            upper,
            counts,
            sum_cap: None,
        })
    }

    pub fn cube(n: usize, lower: f64, upper: f64) -> Result<Self> {
        BoxDomain::new(vec![lower; n], vec![upper; n])
    }

    /// `{x ≥ 0 : Σx ≤ 1}` in `n` dimensions.
    pub fn unit_simplex(n: usize) -> Result<Self> {
        BoxDomain::cube(n, 0.0, 1.0).map(|b| b.with_sum_cap(1.0))
    }

    pub fn with_counts(mut self, counts: Vec<usize>) -> Result<Self> {
        if counts.len() != self.dim() || counts.iter().any(|&c| c == 0) {
            return Err(Error::InvalidParameter(format!("grid counts {:?}", counts)));
        }
        self.counts = counts;
        Ok(self)
    }

    pub fn with_uniform_count(self, count: usize) -> Result<Self> {
        let n = self.dim();
        self.with_counts(vec![count; n])
    }

    pub fn with_sum_cap(mut self, cap: f64) -> Self {
        self.sum_cap = Some(cap);
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let in_box = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol);
        in_box && self.sum_cap.map_or(true, |cap| x.iter().sum::<f64>() <= cap + tol)
    }

    pub fn center(&self) -> Vec<f64> {
        let mid: Vec<f64> = self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect();
        match self.sum_cap {
            Some(cap) if mid.iter().sum::<f64>() > cap => self.pull_inside(mid),
            _ => mid,
        }
    }

    /// Scales `x` towards the lower corner until the sum cap holds.
    pub(crate) fn pull_inside(&self, mut x: Vec<f64>) -> Vec<f64> {
        if let Some(cap) = self.sum_cap {
            let base: f64 = self.lower.iter().sum();
            let sum: f64 = x.iter().sum();
            if sum > cap && sum > base {
                let f = 0.9 * (cap - base).max(0.0) / (sum - base);
                for (v, l) in x.iter_mut().zip(&self.lower) {
                    *v = l + f * (*v - l);
                }
            }
        }
        x
    }

    /// Number of points of the full tensor grid before the sum cap is applied.
    pub fn grid_size(&self) -> Result<u64> {
        let mut total: u64 = 1;
        for &c in &self.counts {
            total = total.saturating_mul(c as u64);
        }
        if total > GRID_CAP {
            return Err(Error::GridTooLarge(total));
        }
        Ok(total)
    }

    fn axis_value(&self, axis: usize, i: usize) -> f64 {
        let c = self.counts[axis];
        let (l, u) = (self.lower[axis], self.upper[axis]);
        if c == 1 {
            0.5 * (l + u)
        } else if i + 1 == c {
            u
        } else {
            l + (u - l) * i as f64 / (c - 1) as f64
        }
    }

    /// Grid points in lexicographic order (last axis fastest), excluding points
    /// beyond the sum cap.
    pub fn grid_points(&self) -> Result<Vec<Vec<f64>>> {
        let total = self.grid_size()? as usize;
        let n = self.dim();
        let mut points = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            let p: Vec<f64> = (0..n).map(|a| self.axis_value(a, idx[a])).collect();
            if self
                .sum_cap
                .map_or(true, |cap| p.iter().sum::<f64>() <= cap + MEMBERSHIP_SLACK)
            {
                points.push(p);
            }
            for a in (0..n).rev() {
                idx[a] += 1;
                if idx[a] < self.counts[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Ok(points)
    }

    /// Max-norm distance with each axis divided by its width (width 0 counts as 1).
    pub fn scaled_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(self.lower.iter().zip(&self.upper))
            .map(|((x, y), (l, u))| {
                let w = if u > l { u - l } else { 1.0 };
                (x - y).abs() / w
            })
            .fold(0.0, f64::max)
    }
}
