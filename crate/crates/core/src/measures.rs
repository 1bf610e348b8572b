//! Matrix measures (logarithmic norms) for the L1, L2 and L∞ vector norms,
//! for a matrix and for its additive compounds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{next_subset, subsets0};
use crate::compound::RCOND_THRESHOLD;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Default sweep cap of the cyclic Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    #[serde(rename = "l1")]
    L1,
    #[serde(rename = "l2")]
    L2,
    #[serde(rename = "linf")]
    LInf,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L1, Norm::L2, Norm::LInf];
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::LInf => "linf",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Norm> {
        match s.to_ascii_lowercase().as_str() {
            "l1" | "1" => Ok(Norm::L1),
            "l2" | "2" => Ok(Norm::L2),
            "linf" | "inf" | "l_inf" => Ok(Norm::LInf),
            other => Err(Error::Parse(format!("unknown norm '{}'", other))),
        }
    }
}

/// A vector norm, optionally composed with a nonsingular scaling `|x|_M = |Mx|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub norm: Norm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<Matrix>,
}

impl MeasureSpec {
    pub fn plain(norm: Norm) -> Self {
        MeasureSpec { norm, scaling: None }
    }

    pub fn scaled(norm: Norm, scaling: Matrix) -> Self {
        MeasureSpec {
            norm,
            scaling: Some(scaling),
        }
    }
}

impl From<Norm> for MeasureSpec {
    fn from(norm: Norm) -> Self {
        MeasureSpec::plain(norm)
    }
}

/// What attains a measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureWitness {
    /// 1-based column (L1) or row (L∞) index of the plain matrix.
    Index(usize),
    /// 1-based k-tuple attaining the L1/L∞ maximum of a compound.
    Tuple(Vec<usize>),
    /// Leading eigenvectors of the symmetric part (L2).
    Eigenvectors(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub value: f64,
    pub witness: MeasureWitness,
}

/// Eigenvalues in descending order with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi rotations on the symmetrised input.
pub fn symmetric_eigen(s: &Matrix) -> Result<SymmetricEigen> {
    symmetric_eigen_with(s, JACOBI_MAX_SWEEPS)
}

pub fn symmetric_eigen_with(s: &Matrix, max_sweeps: usize) -> Result<SymmetricEigen> {
    let n = s.require_square()?;
    if !s.is_finite() {
        return Err(Error::EigensolveFailure("non-finite input".into()));
    }
    let mut a = s.symmetric_part();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    let tol = 1e-12 * scale;
    let off = |a: &Matrix| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[(i, j)] * a[(i, j)];
                }
            }
        }
        acc.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > tol {
        if sweeps == max_sweeps {
            return Err(Error::NonConvergence(max_sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]).then(i.cmp(&j)));
    Ok(SymmetricEigen {
        values: order.iter().map(|&i| a[(i, i)]).collect(),
        vectors: order.iter().map(|&i| v.column(i)).collect(),
    })
}

/// Descending eigenvalues of the symmetric part of `s`.
pub fn symmetric_eigenvalues(s: &Matrix) -> Result<Vec<f64>> {
    Ok(symmetric_eigen(s)?.values)
}

/// `f(S) = V diag(f(λ)) Vᵀ` for symmetric `S`.
pub fn symmetric_function(s: &Matrix, f: impl Fn(f64) -> f64) -> Result<Matrix> {
    let eig = symmetric_eigen(s)?;
    let n = s.rows();
    let mut out = Matrix::zeros(n, n);
    for (lambda, vec) in eig.values.iter().zip(&eig.vectors) {
        let fl = f(*lambda);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += fl * vec[i] * vec[j];
            }
        }
    }
    Ok(out)
}

fn plain_measure(a: &Matrix, norm: Norm) -> Result<Measure> {
    let n = a.require_square()?;
    match norm {
        Norm::L1 | Norm::LInf => {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for p in 0..n {
                let mut s = 0.0;
                for q in 0..n {
                    let v = if norm == Norm::L1 { a[(q, p)] } else { a[(p, q)] };
                    s += if q == p { v } else { v.abs() };
                }
                if s > best {
                    best = s;
                    arg = p;
                }
            }
            Ok(Measure {
                value: best,
                witness: MeasureWitness::Index(arg + 1),
            })
        }
        Norm::L2 => {
            let eig = symmetric_eigen(a)?;
            Ok(Measure {
                value: eig.values[0],
                witness: MeasureWitness::Eigenvectors(vec![eig.vectors[0].clone()]),
            })
        }
    }
}

/// Applies the scaling `M A M⁻¹` when one is present.
pub fn apply_scaling(a: &Matrix, scaling: Option<&Matrix>) -> Result<Matrix> {
    match scaling {
        None => Ok(a.clone()),
        Some(m) => {
            if m.shape() != a.shape() {
                return Err(Error::DimensionMismatch(format!(
                    "scaling is {}x{}, matrix is {}x{}",
                    m.rows(),
                    m.cols(),
                    a.rows(),
                    a.cols()
                )));
            }
            let (inv, rcond) = m.inverse_with_rcond().map_err(|_| Error::SingularScaling(0.0))?;
            if rcond < RCOND_THRESHOLD {
                return Err(Error::SingularScaling(rcond));
            }
            Ok(&(m * a) * &inv)
        }
    }
}

/// The matrix measure `μ(A)` (or `μ(M A M⁻¹)` with a scaling).
pub fn measure(a: &Matrix, spec: &MeasureSpec) -> Result<Measure> {
    a.require_square()?;
    let scaled = apply_scaling(a, spec.scaling.as_ref())?;
    plain_measure(&scaled, spec.norm)
}

pub fn measure_value(a: &Matrix, norm: Norm) -> Result<f64> {
    plain_measure(a, norm).map(|m| m.value)
}

/// `μ(A^[k])` from closed-form expressions in the entries of `A`, without
/// building the compound.
///
/// Ties among k-tuples resolve to the lexicographically smallest tuple.
pub fn measure_k_direct(a: &Matrix, k: usize, norm: Norm) -> Result<Measure> {
    let n = a.require_square()?;
    if k == 0 || k > n {
        return Err(Error::OrderTooLarge { k, max: n });
    }
    match norm {
        Norm::L1 | Norm::LInf => {
            // off-diagonal absolute column (L1) or row (L∞) sums
            let entry = |p: usize, q: usize| if norm == Norm::L1 { a[(q, p)] } else { a[(p, q)] };
            let abs_sum: Vec<f64> = (0..n)
                .map(|p| (0..n).filter(|&q| q != p).map(|q| entry(p, q).abs()).sum())
                .collect();
            let mut idx: Vec<usize> = (0..k).collect();
            let mut best = f64::NEG_INFINITY;
            let mut arg = idx.clone();
            loop {
                let mut s = 0.0;
                for &p in &idx {
                    s += entry(p, p);
                    // remove contributions of indices inside the tuple
                    let inside: f64 = idx.iter().filter(|&&q| q != p).map(|&q| entry(p, q).abs()).sum();
                    s += abs_sum[p] - inside;
                }
                if s > best {
                    best = s;
                    arg.copy_from_slice(&idx);
                }
                if !next_subset(&mut idx, n) {
                    break;
                }
            }
            Ok(Measure {
                value: best,
                witness: MeasureWitness::Tuple(arg.iter().map(|v| v + 1).collect()),
            })
        }
        Norm::L2 => {
            let eig = symmetric_eigen(a)?;
            Ok(Measure {
                value: eig.values[..k].iter().sum(),
                witness: MeasureWitness::Eigenvectors(eig.vectors[..k].to_vec()),
            })
        }
    }
}

/// All k-tuples of `[1, n]` whose diagonal sum plus off-tuple absolute sum equals the
/// reported maximum; used in tests and diagnostics.
pub fn attaining_tuples(a: &Matrix, k: usize, norm: Norm, tol: f64) -> Result<Vec<Vec<usize>>> {
    let best = measure_k_direct(a, k, norm)?.value;
    let n = a.rows();
    let mut out = Vec::new();
    for t in subsets0(n, k) {
        let one_based: Vec<usize> = t.iter().map(|v| v + 1).collect();
        let mut sub = 0.0;
        for &p in &t {
            for q in 0..n {
                let v = if norm == Norm::L1 { a[(q, p)] } else { a[(p, q)] };
                if q == p {
                    sub += v;
                } else if !t.contains(&q) {
                    sub += v.abs();
                }
            }
        }
        if (sub - best).abs() <= tol {
            out.push(one_based);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compound::add_compound;

    #[test]
    fn measure_of_minus_identity() {
        for n in 1..=5 {
            let a = Matrix::identity(n).scale(-1.0);
            for norm in Norm::ALL {
                assert_eq!(measure(&a, &norm.into()).unwrap().value, -1.0);
            }
        }
    }

    #[test]
    fn oscillator_l2_is_zero() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        assert_eq!(measure(&a, &Norm::L2.into()).unwrap().value, 0.0);
        assert_eq!(measure(&a, &Norm::L1.into()).unwrap().value, 1.0);
    }

    #[test]
    fn hand_computed_measures() {
        let a = Matrix::from_rows(&[[-3.0, 1.0, -2.0], [0.5, -1.0, 0.0], [1.0, 4.0, -6.0]]).unwrap();
        // columns: -3+0.5+1, 1-1+4, -2+0-6 -> max 4 at column 2
        let m1 = measure(&a, &Norm::L1.into()).unwrap();
        assert_eq!(m1.value, 4.0);
        assert_eq!(m1.witness, MeasureWitness::Index(2));
        // rows: -3+1+2, 0.5-1, 1+4-6 -> max 0 at row 1
        let minf = measure(&a, &Norm::LInf.into()).unwrap();
        assert_eq!(minf.value, 0.0);
        assert_eq!(minf.witness, MeasureWitness::Index(1));
    }

    #[test]
    fn symmetric_eigen_examples() {
        let d = Matrix::diag(&[1.0, 3.0, -2.0]);
        assert_eq!(symmetric_eigenvalues(&d).unwrap(), vec![3.0, 1.0, -2.0]);
        let s = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let ev = symmetric_eigenvalues(&s).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] + 1.0).abs() < 1e-15);
        assert!(matches!(symmetric_eigen_with(&s, 0), Err(Error::NonConvergence(0))));
    }

    #[test]
    fn direct_k_measures_reduce_and_agree() {
        let a = Matrix::from_rows(&[
            [-3.0, 1.0, -2.0, 0.2],
            [0.5, -1.0, 0.0, 1.5],
            [1.0, 4.0, -6.0, -0.3],
            [0.0, -2.0, 0.7, -0.5],
        ])
        .unwrap();
        for norm in Norm::ALL {
            let plain = measure(&a, &norm.into()).unwrap().value;
            let direct = measure_k_direct(&a, 1, norm).unwrap().value;
            assert!((plain - direct).abs() < 1e-12);
            for k in 1..=4 {
                let via = measure(&add_compound(&a, k).unwrap(), &norm.into()).unwrap().value;
                let direct = measure_k_direct(&a, k, norm).unwrap().value;
                assert!((via - direct).abs() < 1e-10, "k={} norm={}", k, norm);
            }
        }
        let d = Matrix::diag(&[1.0, -2.0, 0.25]);
        for norm in Norm::ALL {
            assert!((measure_k_direct(&d, 3, norm).unwrap().value - (-0.75)).abs() < 1e-15);
        }
    }

    #[test]
    fn ties_report_smallest_tuple() {
        let a = Matrix::identity(4).scale(-1.0);
        let m = measure_k_direct(&a, 2, Norm::L1).unwrap();
        assert_eq!(m.witness, MeasureWitness::Tuple(vec![1, 2]));
        assert_eq!(attaining_tuples(&a, 2, Norm::L1, 0.0).unwrap().len(), 6);
    }

    #[test]
    fn scaling_is_similarity() {
        let a = Matrix::from_rows(&[[-1.0, 3.0], [0.0, -2.0]]).unwrap();
        let m = Matrix::diag(&[1.0, 4.0]);
        let scaled = measure(&a, &MeasureSpec::scaled(Norm::LInf, m)).unwrap().value;
        // M A M⁻¹ = [[-1, 0.75], [0, -2]]
        assert!((scaled - (-0.25)).abs() < 1e-15);
        let sing = Matrix::diag(&[1.0, 0.0]);
        assert!(matches!(
            measure(&a, &MeasureSpec::scaled(Norm::L1, sing)),
            Err(Error::SingularScaling(_))
        ));
    }
}
