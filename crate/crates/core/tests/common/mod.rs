//! Independent reference implementations for the integration and acceptance tests.
//! Nothing here calls into the library's numerics.
#![allow(dead_code)]

use kcontract::Matrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

pub fn dense(a: &Matrix) -> Vec<Vec<f64>> {
    (0..a.rows()).map(|i| (0..a.cols()).map(|j| a[(i, j)]).collect()).collect()
}

pub fn from_dense(d: &[Vec<f64>]) -> Matrix {
    Matrix::from_rows(d).unwrap()
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (n, m, p) = (a.len(), b.len(), b[0].len());
    let mut c = vec![vec![0.0; p]; n];
    for i in 0..n {
        for k in 0..m {
            for j in 0..p {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn det_laplace(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    match n {
        0 => 1.0,
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => {
            let mut s = 0.0;
            for j in 0..n {
                if a[0][j] == 0.0 {
                    continue;
                }
                let sub: Vec<Vec<f64>> = a[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * a[0][j] * det_laplace(&sub);
            }
            s
        }
    }
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Matrix of k×k minors by cofactor expansion.
pub fn compound_oracle(a: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    let rows = combinations(a.len(), k);
    let cols = combinations(a[0].len(), k);
    rows.iter()
        .map(|r| {
            cols.iter()
                .map(|c| {
                    let sub: Vec<Vec<f64>> = r.iter().map(|&i| c.iter().map(|&j| a[i][j]).collect()).collect();
                    det_laplace(&sub)
                })
                .collect()
        })
        .collect()
}

/// `d/dε (I + εA)^(k)` at 0 by a central difference.
pub fn additive_oracle(a: &[Vec<f64>], k: usize, eps: f64) -> Vec<Vec<f64>> {
    let n = a.len();
    let shifted = |s: f64| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 } + s * a[i][j]).collect())
            .collect()
    };
    let plus = compound_oracle(&shifted(eps), k);
    let minus = compound_oracle(&shifted(-eps), k);
    plus.iter()
        .zip(&minus)
        .map(|(p, m)| p.iter().zip(m).map(|(x, y)| (x - y) / (2.0 * eps)).collect())
        .collect()
}

fn inf_norm(a: &[Vec<f64>]) -> f64 {
    a.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let norm = inf_norm(a);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 2f64.powi(-s);
    let x: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|v| v * scale).collect()).collect();
    let mut sum = identity(n);
    let mut term = identity(n);
    for j in 1..30 {
        term = mat_mul(&term, &x);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v /= j as f64;
            }
        }
        for i in 0..n {
            for c in 0..n {
                sum[i][c] += term[i][c];
            }
        }
    }
    for _ in 0..s {
        sum = mat_mul(&sum, &sum);
    }
    sum
}

/// Characteristic polynomial coefficients `[1, c1, ..., cn]` by Faddeev–LeVerrier.
pub fn char_poly(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut coeffs = vec![1.0];
    let mut m = vec![vec![0.0; n]; n];
    let mut c = 1.0;
    for k in 1..=n {
        for i in 0..n {
            m[i][i] += c;
        }
        m = mat_mul(a, &m);
        let tr: f64 = (0..n).map(|i| m[i][i]).sum();
        c = -tr / k as f64;
        coeffs.push(c);
    }
    coeffs
}

/// Roots of a monic polynomial by Durand–Kerner iteration.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let seed = Complex64::new(0.4, 0.9);
    let bound = 1.0 + coeffs[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32) * bound).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// Largest eigenvalue of a symmetric matrix by shifted power iteration.
pub fn sym_max_eigenvalue(s: &[Vec<f64>]) -> f64 {
    let n = s.len();
    let shift = inf_norm(s) + 1.0;
    let apply = |v: &[f64]| -> Vec<f64> { (0..n).map(|i| (0..n).map(|j| s[i][j] * v[j]).sum::<f64>()).collect() };
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
    let mut lambda = f64::NAN;
    for _ in 0..100_000 {
        let sv = apply(&v);
        let mut w: Vec<f64> = sv.iter().zip(&v).map(|(a, b)| a + shift * b).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in w.iter_mut() {
            *x /= norm;
        }
        let sw = apply(&w);
        let next: f64 = w.iter().zip(&sw).map(|(a, b)| a * b).sum();
        let done = (next - lambda).abs() < 1e-16 * (1.0 + next.abs());
        lambda = next;
        v = w;
        if done {
            break;
        }
    }
    lambda
}

/// `μ2(A) = λmax((A + Aᵀ)/2)`.
pub fn mu2_oracle(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let s: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| 0.5 * (a[i][j] + a[j][i])).collect()).collect();
    sym_max_eigenvalue(&s)
}

/// Dense Gaussian elimination with partial pivoting.
pub fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    x
}

/// Solves `P A + Aᵀ P = −Q` through the Kronecker form.
pub fn lyapunov(a: &[Vec<f64>], q: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m = vec![vec![0.0; n * n]; n * n];
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            // (P A)_ij = Σ_k P_ik A_kj ; (Aᵀ P)_ij = Σ_k A_ki P_kj
            for k in 0..n {
                m[row][i * n + k] += a[k][j];
                m[row][k * n + j] += a[k][i];
            }
        }
    }
    let b: Vec<f64> = (0..n * n).map(|r| -q[r / n][r % n]).collect();
    let x = solve(m, b);
    (0..n).map(|i| (0..n).map(|j| 0.5 * (x[i * n + j] + x[j * n + i])).collect()).collect()
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &[Vec<f64>]) -> f64 {
    a.iter().flat_map(|r| r.iter().map(|v| v.abs())).fold(0.0, f64::max)
}
