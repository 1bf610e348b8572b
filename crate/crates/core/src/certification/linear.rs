use super::{argmax, par_map, Certificate, GridMeta, Rule, Witness};
use crate::combinatorics::unrank;
use crate::compound::add_compound;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::measures::{measure, measure_k_direct, MeasureSpec, MeasureWitness};

/// `μ(A^[k])` under `spec` and the k-tuple attaining it (L1/L∞ only).
pub(crate) fn compound_measure(a: &Matrix, k: usize, spec: &MeasureSpec) -> Result<(f64, Option<Vec<usize>>)> {
    let m = match &spec.scaling {
        None => measure_k_direct(a, k, spec.norm)?,
        Some(_) => measure(&add_compound(a, k)?, spec)?,
    };
    let tuple = match m.witness {
        MeasureWitness::Tuple(t) => Some(t),
        MeasureWitness::Index(i) => Some(unrank(i as u64 - 1, a.rows(), k)?),
        MeasureWitness::Eigenvectors(_) => None,
    };
    Ok((m.value, tuple))
}

/// Constant `A`: `η = −μ(A^[k])`.
pub fn certify_lti(a: &Matrix, k: usize, spec: &MeasureSpec) -> Result<Certificate> {
    let (value, tuple) = compound_measure(a, k, spec)?;
    let witness = Witness {
        tuple,
        value: Some(value),
        ..Default::default()
    };
    let mut c = Certificate::new(Rule::LtiMeasure, k, Some(spec.norm), value, witness);
    c.scaling = spec.scaling.clone();
    Ok(c)
}

/// Time-varying `A(t)` sampled on `times`: `η = −max_t μ(A^[k](t))`.
pub fn certify_ltv<A>(a: A, k: usize, spec: &MeasureSpec, times: &[f64]) -> Result<Certificate>
where
    A: Fn(f64) -> Matrix + Sync + Send,
{
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty time grid".into()));
    }
    let samples = par_map(times, |&t| compound_measure(&a(t), k, spec))?;
    let (i, value) = argmax(samples.iter().map(|s| s.0)).expect("non-empty");
    let witness = Witness {
        tuple: samples[i].1.clone(),
        time: Some(times[i]),
        value: Some(value),
        ..Default::default()
    };
    let mut c = Certificate::new(Rule::LtiMeasure, k, Some(spec.norm), value, witness);
    c.scaling = spec.scaling.clone();
    c.grid = Some(GridMeta {
        counts: vec![times.len()],
        samples: times.len(),
        exhaustive: false,
        times: Some(times.to_vec()),
    });
    Ok(c)
}

fn sample_grid(samples: &[(f64, Matrix)]) -> Option<GridMeta> {
    (samples.len() > 1).then(|| GridMeta {
        counts: vec![samples.len()],
        samples: samples.len(),
        exhaustive: false,
        times: Some(samples.iter().map(|s| s.0).collect()),
    })
}

/// Diagonal samples `(t, D(t))`: `η = −max` over samples and k-subsets of diagonal
/// sums. The conclusion holds for L1, L2 and L∞ at once.
pub fn certify_diagonal(samples: &[(f64, Matrix)], k: usize) -> Result<Certificate> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for (s, (_, d)) in samples.iter().enumerate() {
        let n = d.require_square()?;
        if k == 0 || k > n {
            return Err(Error::OrderTooLarge { k, max: n });
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && d[(i, j)] != 0.0 {
                    return Err(Error::NotDiagonal(s));
                }
            }
        }
        // largest k entries, ties to the smaller index
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&p, &q| d[(q, q)].total_cmp(&d[(p, p)]).then(p.cmp(&q)));
        let mut tuple: Vec<usize> = order[..k].iter().map(|v| v + 1).collect();
        tuple.sort_unstable();
        let value: f64 = order[..k].iter().map(|&p| d[(p, p)]).sum();
        if best.as_ref().map_or(true, |b| value > b.0) {
            best = Some((value, s, tuple));
        }
    }
    let (value, s, tuple) = best.expect("non-empty");
    let witness = Witness {
        tuple: Some(tuple),
        time: Some(samples[s].0),
        value: Some(value),
        ..Default::default()
    };
    let mut c = Certificate::new(Rule::Diagonal, k, None, value, witness);
    c.grid = sample_grid(samples);
    Ok(c)
}

/// `Σ_{i≠ℓ} (|a_iℓ| + a_ii)` for each column `ℓ`.
pub fn row_sums(a: &Matrix) -> Result<Vec<f64>> {
    let n = a.require_square()?;
    Ok((0..n)
        .map(|l| (0..n).filter(|&i| i != l).map(|i| a[(i, l)].abs() + a[(i, i)]).sum())
        .collect())
}

/// Order `n − 1` contraction in L∞ from the column sums of [`row_sums`].
pub fn certify_row_rule(samples: &[(f64, Matrix)]) -> Result<Certificate> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let n = samples[0].1.require_square()?;
    if n < 2 {
        return Err(Error::OrderTooLarge { k: 0, max: n });
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for (s, (_, a)) in samples.iter().enumerate() {
        if a.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!("sample {} is {:?}", s, a.shape())));
        }
        let sums = row_sums(a)?;
        let (l, v) = argmax(sums).expect("n >= 2");
        if best.map_or(true, |b| v > b.0) {
            best = Some((v, s, l));
        }
    }
    let (value, s, l) = best.expect("non-empty");
    let witness = Witness {
        index: Some(l + 1),
        time: Some(samples[s].0),
        value: Some(value),
        ..Default::default()
    };
    let mut c = Certificate::new(Rule::RowRuleNm1, n - 1, Some(crate::measures::Norm::LInf), value, witness);
    c.grid = sample_grid(samples);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certification::Verdict;
    use crate::measures::Norm;

    #[test]
    fn diag2_is_two_contractive() {
        let a = Matrix::diag(&[3.0, -4.0]);
        let c = certify_lti(&a, 2, &Norm::L1.into()).unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert_eq!(c.eta, 1.0);
        let c1 = certify_lti(&a, 1, &Norm::L1.into()).unwrap();
        assert_eq!(c1.verdict, Verdict::NotCertified);
        assert_eq!(c1.witness.tuple, Some(vec![1]));
    }

    #[test]
    fn zero_matrix_is_not_certified() {
        for k in 1..=3 {
            let c = certify_lti(&Matrix::zeros(3, 3), k, &Norm::L2.into()).unwrap();
            assert_eq!(c.verdict, Verdict::NotCertified);
            assert_eq!(c.eta, 0.0);
        }
    }

    #[test]
    fn diagonal_rule_examples() {
        let c = certify_diagonal(&[(0.0, Matrix::diag(&[3.0, -4.0]))], 2).unwrap();
        assert_eq!((c.eta, c.verdict), (1.0, Verdict::Certified));
        let c = certify_diagonal(&[(0.0, Matrix::diag(&[1.0, -2.0, -3.0]))], 2).unwrap();
        assert_eq!(c.eta, 1.0);
        assert_eq!(c.witness.tuple, Some(vec![1, 2]));
        let c = certify_diagonal(&[(0.0, Matrix::diag(&[-1.0; 4]))], 3).unwrap();
        assert_eq!(c.eta, 3.0);
        let bad = Matrix::from_rows(&[[1.0, 0.1], [0.0, 1.0]]).unwrap();
        assert!(matches!(certify_diagonal(&[(0.0, bad)], 1), Err(Error::NotDiagonal(0))));
    }

    #[test]
    fn row_rule_examples() {
        let c = certify_row_rule(&[(0.0, Matrix::identity(3).scale(-1.0))]).unwrap();
        assert_eq!((c.eta, c.k), (2.0, 2));
        let c = certify_row_rule(&[(0.0, Matrix::zeros(3, 3))]).unwrap();
        assert_eq!(c.verdict, Verdict::NotCertified);
    }

    #[test]
    fn ltv_time_witness() {
        let a = |t: f64| Matrix::diag(&[-2.0 + t, -3.0]);
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let c = certify_ltv(a, 1, &Norm::LInf.into(), &times).unwrap();
        assert_eq!(c.witness.time, Some(1.0));
        assert!((c.eta - 1.0).abs() < 1e-15);
        assert!(!c.grid.unwrap().exhaustive);
    }
}
