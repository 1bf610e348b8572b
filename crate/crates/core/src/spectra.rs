//! Eigenvalues of general real matrices and the compound spectral properties:
//! eigenvalues of `A^[k]` are the k-sums, and eigenvalues of `A^(k)` the
//! k-products, of the eigenvalues of `A`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combinatorics::subsets0;
use crate::compound::{add_compound, mult_compound, RCOND_THRESHOLD};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Largest order accepted by [`eigenvalues`].
pub const EIGEN_SIZE_CAP: usize = 64;

/// Eigenvalue condition number above which a spectrum counts as ill-conditioned.
pub const ILL_CONDITIONED_THRESHOLD: f64 = 1e6;

const MATCH_TOL: f64 = 1e-6;
const MATCH_TOL_ILL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// `[re, im]` pairs, sorted by descending real part then descending imaginary part.
    #[serde(with = "complex_pairs")]
    pub values: Vec<Complex64>,
}

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl Spectrum {
    fn sorted(mut values: Vec<Complex64>) -> Spectrum {
        values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        Spectrum { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    pub fn spectral_abscissa(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest distance between a value and the conjugate of its nearest partner.
    pub fn conjugation_residual(&self) -> f64 {
        let conj: Vec<Complex64> = self.values.iter().map(|v| v.conj()).collect();
        greedy_match_distance(&self.values, &conj)
    }
}

/// Eigenvalues by balancing, Householder reduction to Hessenberg form and
/// Francis double-shift QR.
pub fn eigenvalues(a: &Matrix) -> Result<Spectrum> {
    let n = a.require_square()?;
    if n > EIGEN_SIZE_CAP {
        return Err(Error::EigenSizeCap { n, cap: EIGEN_SIZE_CAP });
    }
    if !a.is_finite() {
        return Err(Error::EigensolveFailure("non-finite input".into()));
    }
    if n == 0 {
        return Ok(Spectrum { values: vec![] });
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let values = hqr(&h)?;
    Ok(Spectrum::sorted(values))
}

fn balance(a: &mut Matrix) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= ginv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

fn hessenberg(a: &mut Matrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let alpha_sq: f64 = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum();
        if alpha_sq == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = if x0 >= 0.0 { -alpha_sq.sqrt() } else { alpha_sq.sqrt() };
        let mut v: Vec<f64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        // A <- H A with H = I - 2 v vᵀ / (vᵀv), acting on rows k+1..n
        for j in 0..n {
            let dot: f64 = v.iter().enumerate().map(|(p, vp)| vp * a[(k + 1 + p, j)]).sum();
            let f = 2.0 * dot / vnorm_sq;
            for (p, vp) in v.iter().enumerate() {
                a[(k + 1 + p, j)] -= f * vp;
            }
        }
        // A <- A H, acting on columns k+1..n
        for i in 0..n {
            let dot: f64 = v.iter().enumerate().map(|(p, vp)| vp * a[(i, k + 1 + p)]).sum();
            let f = 2.0 * dot / vnorm_sq;
            for (p, vp) in v.iter().enumerate() {
                a[(i, k + 1 + p)] -= f * vp;
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (EISPACK `hqr` scheme).
fn hqr(h: &Matrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    // 1-based working copy keeps the index arithmetic of the classical algorithm
    let mut a = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = h[(i, j)];
        }
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let cap = 100 * n;
    let mut total_its = 0usize;
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                let mut y = a[nn - 1][nn - 1];
                let mut w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + z.copysign(p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if total_its >= cap {
                        return Err(Error::QrNonConvergence(cap));
                    }
                    if its == 10 || its == 20 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    total_its += 1;
                    let (mut p, mut q, mut r);
                    let mut m = nn - 2;
                    loop {
                        let z = a[m][m];
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - rr - ss;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k + 1 <= nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nn - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = (p * p + q * q + r * r).sqrt().copysign(p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            let z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                let mut pp = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    pp += r * a[k + 2][j];
                                    a[k + 2][j] -= pp * z;
                                }
                                a[k + 1][j] -= pp * y;
                                a[k][j] -= pp * x;
                            }
                            let mmin = nn.min(k + 3);
                            for i in l..=mmin {
                                let mut pp = x * a[i][k] + y * a[i][k + 1];
                                if k != nn - 1 {
                                    pp += z * a[i][k + 2];
                                    a[i][k + 2] -= pp * r;
                                }
                                a[i][k + 1] -= pp * q;
                                a[i][k] -= pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn == 0 || l + 1 >= nn {
                break;
            }
        }
    }
    let values: Vec<Complex64> = (1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect();
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::EigensolveFailure("non-finite eigenvalue".into()));
    }
    Ok(values)
}

/// Solves `(M - shift I) x = b` in complex arithmetic with partial pivoting.
fn complex_solve(m: &Matrix, transpose: bool, shift: Complex64, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = m.rows();
    let mut a: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let v = if transpose { m[(j, i)] } else { m[(i, j)] };
            Complex64::new(v, 0.0) - if i == j { shift } else { Complex64::new(0.0, 0.0) }
        })
        .collect();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&p, &q| a[p * n + col].norm().total_cmp(&a[q * n + col].norm()))?;
        if a[piv * n + col].norm() == 0.0 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            x.swap(col, piv);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            for c in col..n {
                let v = a[col * n + c];
                a[r * n + c] -= f * v;
            }
            let xc = x[col];
            x[r] -= f * xc;
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= a[i * n + j] * x[j];
        }
        x[i] = s / a[i * n + i];
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return None;
    }
    Some(x)
}

fn inverse_iteration(a: &Matrix, lambda: Complex64, transpose: bool) -> Option<Vec<Complex64>> {
    let n = a.rows();
    let scale = 1.0 + a.max_abs();
    let shift = lambda + Complex64::new(1e-10 * scale, 1e-10 * scale);
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * (i % 3) as f64))
        .collect();
    for _ in 0..3 {
        let w = complex_solve(a, transpose, shift, &v)?;
        let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return None;
        }
        v = w.into_iter().map(|c| c / norm).collect();
    }
    Some(v)
}

/// Largest eigenvalue condition number `1 / |yᴴx|` over the spectrum, with unit
/// right (`x`) and left (`y`) eigenvectors from inverse iteration.
pub fn eigenvalue_condition(a: &Matrix, spectrum: &Spectrum) -> f64 {
    let mut worst: f64 = 1.0;
    for &lambda in &spectrum.values {
        let (Some(x), Some(y)) = (
            inverse_iteration(a, lambda, false),
            // left eigenvectors of A are right eigenvectors of Aᵀ at the same
            // eigenvalue; conjugation below gives yᴴ
            inverse_iteration(a, lambda, true),
        ) else {
            return f64::INFINITY;
        };
        // y solves Aᵀ y = λ y, so yᵀ A = λ yᵀ and the pairing is the bilinear yᵀx
        let dot: Complex64 = y.iter().zip(&x).map(|(yi, xi)| yi * xi).sum();
        let s = dot.norm();
        worst = worst.max(if s > 0.0 { 1.0 / s } else { f64::INFINITY });
    }
    worst
}

/// Nearest-pair greedy matching distance between two multisets of equal size.
pub fn greedy_match_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let sort = |v: &[Complex64]| {
        let mut v = v.to_vec();
        v.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        v
    };
    let a = sort(a);
    let b = sort(b);
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in &a {
        let (best, dist) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths");
        used[best] = true;
        worst = worst.max(dist);
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub max_distance: f64,
    pub scale: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub k: usize,
    /// `A^[k]` versus k-sums of eigenvalues of `A`.
    pub sums: MatchReport,
    /// `A^(k)` versus k-products; absent when `A` is singular.
    pub products: Option<MatchReport>,
    pub condition_estimate: f64,
    pub ill_conditioned: bool,
    pub tolerance: f64,
    pub pass: bool,
}

fn k_combinations(values: &[Complex64], k: usize, combine: impl Fn(&[Complex64]) -> Complex64) -> Vec<Complex64> {
    subsets0(values.len(), k)
        .into_iter()
        .map(|idx| combine(&idx.iter().map(|&i| values[i]).collect::<Vec<_>>()))
        .collect()
}

fn match_report(expected: &[Complex64], actual: &[Complex64], tolerance: f64) -> MatchReport {
    let max_mod = expected
        .iter()
        .chain(actual)
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let scale = 1.0 + max_mod;
    let max_distance = greedy_match_distance(expected, actual);
    MatchReport {
        max_distance,
        scale,
        pass: max_distance <= tolerance * scale,
    }
}

/// Compares the spectrum of the k-th compounds with k-sums and k-products of the
/// spectrum of `a`.
pub fn compound_spectrum_check(a: &Matrix, k: usize) -> Result<SpectrumReport> {
    let n = a.require_square()?;
    if k == 0 || k > n {
        return Err(Error::OrderTooLarge { k, max: n });
    }
    let base = eigenvalues(a)?;
    let condition_estimate = eigenvalue_condition(a, &base);
    let ill_conditioned = condition_estimate > ILL_CONDITIONED_THRESHOLD;
    let tolerance = if ill_conditioned { MATCH_TOL_ILL } else { MATCH_TOL };

    let sums = k_combinations(&base.values, k, |v| v.iter().sum());
    let add = eigenvalues(&add_compound(a, k)?)?;
    let sums = match_report(&sums, &add.values, tolerance);

    let nonsingular = a
        .inverse_with_rcond()
        .map(|(_, rcond)| rcond >= RCOND_THRESHOLD)
        .unwrap_or(false);
    let products = if nonsingular {
        let prods = k_combinations(&base.values, k, |v| v.iter().product());
        let mult = eigenvalues(&mult_compound(a, k)?)?;
        Some(match_report(&prods, &mult.values, tolerance))
    } else {
        None
    };
    let pass = sums.pass && products.as_ref().map_or(true, |p| p.pass);
    Ok(SpectrumReport {
        k,
        sums,
        products,
        condition_estimate,
        ill_conditioned,
        tolerance,
        pass,
    })
}

/// Every eigenvalue has negative real part.
pub fn is_hurwitz(a: &Matrix) -> Result<bool> {
    Ok(eigenvalues(a)?.spectral_abscissa() < 0.0)
}
