//! Multiplicative and additive compound matrices, wedge products and k-content.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{self, subsets0, CompoundShape};
use crate::error::{Error, Result};
use crate::matrix::{vec_norm, Matrix};
use crate::measures::Norm;

/// Default limit on the number of entries of a materialised compound.
pub const DEFAULT_SIZE_CAP: u64 = 20_000;

/// Reciprocal condition threshold below which a transform counts as singular.
pub const RCOND_THRESHOLD: f64 = 1e-12;

fn check_cap(shape: &CompoundShape, cap: u64) -> Result<()> {
    if shape.entries() > cap {
        return Err(Error::CompoundSizeCapExceeded {
            rows: shape.rows,
            cols: shape.cols,
            cap,
        });
    }
    Ok(())
}

fn to_zero_based(tuple: &[usize], bound: usize) -> Result<Vec<usize>> {
    tuple
        .iter()
        .map(|&v| {
            if v == 0 || v > bound {
                Err(Error::IndexOutOfRange { index: v, bound })
            } else {
                Ok(v - 1)
            }
        })
        .collect()
}

/// The minor `A(rows|cols)` for 1-based index tuples of equal length.
pub fn minor(a: &Matrix, rows: &[usize], cols: &[usize]) -> Result<f64> {
    if rows.len() != cols.len() || rows.is_empty() {
        return Err(Error::MismatchedShapes(format!(
            "row tuple of length {} and column tuple of length {}",
            rows.len(),
            cols.len()
        )));
    }
    let r = to_zero_based(rows, a.rows())?;
    let c = to_zero_based(cols, a.cols())?;
    Ok(minor0(a, &r, &c))
}

fn minor0(a: &Matrix, rows: &[usize], cols: &[usize]) -> f64 {
    match rows.len() {
        1 => a[(rows[0], cols[0])],
        2 => {
            a[(rows[0], cols[0])] * a[(rows[1], cols[1])]
                - a[(rows[0], cols[1])] * a[(rows[1], cols[0])]
        }
        _ => a
            .select(rows, cols)
            .lu()
            .map(|lu| lu.det())
            .expect("selected submatrix is square"),
    }
}

/// k-th multiplicative compound with the default size cap.
pub fn mult_compound(a: &Matrix, k: usize) -> Result<Matrix> {
    mult_compound_capped(a, k, DEFAULT_SIZE_CAP)
}

/// k-th multiplicative compound: all order-k minors in lexicographic order.
pub fn mult_compound_capped(a: &Matrix, k: usize, cap: u64) -> Result<Matrix> {
    let shape = CompoundShape::new(a.rows(), a.cols(), k)?;
    check_cap(&shape, cap)?;
    let row_sets = subsets0(a.rows(), k);
    let col_sets = subsets0(a.cols(), k);
    let mut data = Vec::with_capacity(row_sets.len() * col_sets.len());
    for rs in &row_sets {
        for cs in &col_sets {
            data.push(minor0(a, rs, cs));
        }
    }
    Ok(Matrix::from_vec_unchecked(row_sets.len(), col_sets.len(), data))
}

/// k-th additive compound with the default size cap.
pub fn add_compound(a: &Matrix, k: usize) -> Result<Matrix> {
    add_compound_capped(a, k, DEFAULT_SIZE_CAP)
}

/// k-th additive compound assembled entrywise.
///
/// Diagonal entries are sums of diagonal entries of `a`; an entry whose row and
/// column tuples differ in a single index `i_l != j_m` is `(-1)^(l+m) a[i_l][j_m]`;
/// all other entries vanish.
pub fn add_compound_capped(a: &Matrix, k: usize, cap: u64) -> Result<Matrix> {
    let n = a.require_square()?;
    let shape = CompoundShape::new(n, n, k)?;
    check_cap(&shape, cap)?;
    let sets = subsets0(n, k);
    let r = sets.len();
    let mut out = Matrix::zeros(r, r);
    let mut swapped = vec![0usize; k];
    for (row, set) in sets.iter().enumerate() {
        out[(row, row)] = set.iter().map(|&i| a[(i, i)]).sum();
        for l in 0..k {
            for j in 0..n {
                if set.binary_search(&j).is_ok() {
                    continue;
                }
                // replace set[l] by j and locate j in the sorted result
                let mut pos = 0;
                for (p, &v) in set.iter().enumerate() {
                    if p != l && v < j {
                        swapped[pos] = v;
                        pos += 1;
                    }
                }
                let m = pos;
                swapped[pos] = j;
                pos += 1;
                for (p, &v) in set.iter().enumerate() {
                    if p != l && v > j {
                        swapped[pos] = v;
                        pos += 1;
                    }
                }
                let one_based: Vec<usize> = swapped.iter().map(|v| v + 1).collect();
                let col = combinatorics::rank(&one_based, n)? as usize;
                let sign = if (l + m) % 2 == 0 { 1.0 } else { -1.0 };
                out[(row, col)] = sign * a[(set[l], j)];
            }
        }
    }
    Ok(out)
}

/// `A^[n-1]` via `B = tr(A) I - Aᵀ` and `b~_ij = (-1)^(i+j) b_{n+1-i, n+1-j}`.
pub fn schwarz_n_minus_1(a: &Matrix) -> Result<Matrix> {
    let n = a.require_square()?;
    if n < 2 {
        return Err(Error::OrderTooLarge { k: 0, max: n });
    }
    let tr = a.trace();
    let mut b = a.transpose().scale(-1.0);
    for i in 0..n {
        b[(i, i)] += tr;
    }
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            out[(i, j)] = sign * b[(n - 1 - i, n - 1 - j)];
        }
    }
    Ok(out)
}

/// `T^(k) A^[k] (T^(k))⁻¹`, the additive compound in transformed coordinates.
pub fn transform_add_compound(t: &Matrix, a: &Matrix, k: usize) -> Result<Matrix> {
    let n = a.require_square()?;
    if t.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "transform is {}x{}, system is {}x{}",
            t.rows(),
            t.cols(),
            n,
            n
        )));
    }
    let (_, rcond) = t.inverse_with_rcond().map_err(|_| Error::SingularTransform(0.0))?;
    if rcond < RCOND_THRESHOLD {
        return Err(Error::SingularTransform(rcond));
    }
    let tk = mult_compound(t, k)?;
    let (tk_inv, _) = tk
        .inverse_with_rcond()
        .map_err(|_| Error::SingularTransform(0.0))?;
    let ak = add_compound(a, k)?;
    Ok(&(&tk * &ak) * &tk_inv)
}

/// Coordinates of `a^1 ∧ ... ∧ a^k` in the lexicographic basis `e^{i1} ∧ ... ∧ e^{ik}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgeVector {
    pub n: usize,
    pub k: usize,
    pub coords: Vec<f64>,
}

impl WedgeVector {
    pub fn norm(&self, norm: Norm) -> f64 {
        vec_norm(&self.coords, norm)
    }
}

pub fn wedge<V: AsRef<[f64]>>(vectors: &[V]) -> Result<WedgeVector> {
    let k = vectors.len();
    let n = vectors.first().map(|v| v.as_ref().len()).unwrap_or(0);
    if k == 0 || k > n {
        return Err(Error::DimensionMismatch(format!(
            "{} vectors of length {}",
            k, n
        )));
    }
    let stack = Matrix::from_columns(vectors)?;
    wedge_columns(&stack)
}

/// Wedge product of the columns of an `n x k` matrix.
pub fn wedge_columns(w: &Matrix) -> Result<WedgeVector> {
    let (n, k) = w.shape();
    let c = mult_compound_capped(w, k, u64::MAX)?;
    Ok(WedgeVector {
        n,
        k,
        coords: c.into_vec(),
    })
}

/// Midpoint-rule k-content of the image of the box `[lower, upper] ⊂ R^k` under `phi`.
///
/// Partial derivatives are central differences with a step of half the cell
/// width, so every evaluation stays inside the closed box.
pub fn k_content<F>(phi: F, lower: &[f64], upper: &[f64], counts: &[usize]) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let k = lower.len();
    if k == 0 || upper.len() != k || counts.len() != k {
        return Err(Error::DimensionMismatch(
            "box bounds and grid counts must share the parameter dimension".into(),
        ));
    }
    if counts.iter().any(|&c| c < 2) {
        return Err(Error::InvalidParameter("grid counts must be at least 2".into()));
    }
    if lower.iter().zip(upper).any(|(l, u)| !(u > l)) {
        return Err(Error::InvalidParameter("box must have positive extent".into()));
    }
    let widths: Vec<f64> = (0..k)
        .map(|i| (upper[i] - lower[i]) / counts[i] as f64)
        .collect();
    let cell_volume: f64 = widths.iter().product();
    let eval = |r: &[f64]| -> Result<Vec<f64>> {
        let y = phi(r);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::EvaluationFailure(format!("non-finite value at {:?}", r)));
        }
        Ok(y)
    };

    let total: usize = counts.iter().product();
    let mut idx = vec![0usize; k];
    let mut sum = 0.0;
    let mut dim_out = None;
    for _ in 0..total {
        let centre: Vec<f64> = (0..k)
            .map(|i| lower[i] + (idx[i] as f64 + 0.5) * widths[i])
            .collect();
        let mut partials = Vec::with_capacity(k);
        for i in 0..k {
            let h = 0.5 * widths[i];
            let mut plus = centre.clone();
            let mut minus = centre.clone();
            plus[i] += h;
            minus[i] -= h;
            let fp = eval(&plus)?;
            let fm = eval(&minus)?;
            if fp.len() != fm.len() || fp.len() < k {
                return Err(Error::EvaluationFailure(format!(
                    "map returned {} coordinates for a {}-dimensional parameter",
                    fp.len(),
                    k
                )));
            }
            if *dim_out.get_or_insert(fp.len()) != fp.len() {
                return Err(Error::EvaluationFailure("inconsistent output dimension".into()));
            }
            partials.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
        }
        sum += wedge(&partials)?.norm(Norm::L2);
        // odometer increment
        for i in (0..k).rev() {
            idx[i] += 1;
            if idx[i] < counts[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok(sum * cell_volume)
}
