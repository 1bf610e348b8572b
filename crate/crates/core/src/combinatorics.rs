//! Lexicographic indexing of k-element subsets of `{1, ..., n}`.
//!
//! Ranks are 0-based; tuple entries are 1-based so that printed tuples read
//! the same as the usual minor notation `A({1,3}|{1,2})`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ambient dimension for which all binomials fit comfortably in `u64`.
pub const MAX_N: usize = 62;

pub fn binomial(n: usize, k: usize) -> Result<u64> {
    if n > MAX_N {
        return Err(Error::BinomialOverflow(n));
    }
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(c).map_err(|_| Error::BinomialOverflow(n))
}

fn validate_tuple(tuple: &[usize], n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::BinomialOverflow(n));
    }
    for &v in tuple {
        if v == 0 || v > n {
            return Err(Error::IndexOutOfRange { index: v, bound: n });
        }
    }
    if tuple.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NonIncreasingTuple(tuple.to_vec()));
    }
    Ok(())
}

/// Lexicographic position of `tuple` among all `tuple.len()`-subsets of `[1, n]`.
pub fn rank(tuple: &[usize], n: usize) -> Result<u64> {
    validate_tuple(tuple, n)?;
    let k = tuple.len();
    if k == 0 {
        return Err(Error::OrderTooLarge { k: 0, max: n });
    }
    let mut r = 0u64;
    let mut prev = 0usize;
    for (p, &t) in tuple.iter().enumerate() {
        for v in prev + 1..t {
            r += binomial(n - v, k - p - 1)?;
        }
        prev = t;
    }
    Ok(r)
}

/// Inverse of [`rank`].
pub fn unrank(r: u64, n: usize, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::OrderTooLarge { k, max: n });
    }
    let count = binomial(n, k)?;
    if r >= count {
        return Err(Error::RankOutOfRange { rank: r, n, k, count });
    }
    let mut rem = r;
    let mut tuple = Vec::with_capacity(k);
    let mut v = 1usize;
    for p in 0..k {
        loop {
            let block = binomial(n - v, k - p - 1)?;
            if rem < block {
                break;
            }
            rem -= block;
            v += 1;
        }
        tuple.push(v);
        v += 1;
    }
    Ok(tuple)
}

/// A k-subset together with its lexicographic rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetRank {
    pub n: usize,
    pub k: usize,
    pub rank: u64,
    pub tuple: Vec<usize>,
}

impl SubsetRank {
    pub fn from_tuple(tuple: &[usize], n: usize) -> Result<Self> {
        let rank = rank(tuple, n)?;
        Ok(SubsetRank {
            n,
            k: tuple.len(),
            rank,
            tuple: tuple.to_vec(),
        })
    }

    pub fn from_rank(rank: u64, n: usize, k: usize) -> Result<Self> {
        let tuple = unrank(rank, n, k)?;
        Ok(SubsetRank { n, k, rank, tuple })
    }
}

/// Dimensions of the k-th compound of an `n x m` matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompoundShape {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub rows: u64,
    pub cols: u64,
}

impl CompoundShape {
    pub fn new(n: usize, m: usize, k: usize) -> Result<Self> {
        let max = n.min(m);
        if k == 0 || k > max {
            return Err(Error::OrderTooLarge { k, max });
        }
        Ok(CompoundShape {
            n,
            m,
            k,
            rows: binomial(n, k)?,
            cols: binomial(m, k)?,
        })
    }

    pub fn entries(&self) -> u64 {
        self.rows.saturating_mul(self.cols)
    }
}

/// Classification of a pair of equal-length index tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetRelation {
    Equal,
    /// The tuples share `k - 1` entries. `l` and `m` are the 1-based positions
    /// of the unmatched entry in `a` and `b`; `entries` holds those values.
    SingleSwap {
        l: usize,
        m: usize,
        sign: i8,
        entries: (usize, usize),
    },
    Other,
}

pub fn subset_relation(a: &[usize], b: &[usize]) -> Result<SubsetRelation> {
    if a.len() != b.len() {
        return Err(Error::MismatchedShapes(format!(
            "tuples of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    for t in [a, b] {
        if t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NonIncreasingTuple(t.to_vec()));
        }
    }
    Ok(relation_sorted(a, b))
}

/// Merge-walk of two sorted tuples; caller guarantees equal length and ordering.
pub(crate) fn relation_sorted(a: &[usize], b: &[usize]) -> SubsetRelation {
    let (mut i, mut j) = (0, 0);
    let mut only_a: Option<usize> = None;
    let mut only_b: Option<usize> = None;
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            i += 1;
            j += 1;
        } else if a[i] < b[j] {
            if only_a.replace(i).is_some() {
                return SubsetRelation::Other;
            }
            i += 1;
        } else {
            if only_b.replace(j).is_some() {
                return SubsetRelation::Other;
            }
            j += 1;
        }
    }
    if i < a.len() {
        if only_a.is_some() || a.len() - i > 1 {
            return SubsetRelation::Other;
        }
        only_a = Some(i);
    }
    if j < b.len() {
        if only_b.is_some() || b.len() - j > 1 {
            return SubsetRelation::Other;
        }
        only_b = Some(j);
    }
    match (only_a, only_b) {
        (None, None) => SubsetRelation::Equal,
        (Some(p), Some(q)) => {
            let (l, m) = (p + 1, q + 1);
            SubsetRelation::SingleSwap {
                l,
                m,
                sign: if (l + m) % 2 == 0 { 1 } else { -1 },
                entries: (a[p], b[q]),
            }
        }
        _ => SubsetRelation::Other,
    }
}

/// Advances a 0-based increasing index vector to the next k-subset of `[0, n)`.
/// Returns `false` after the last subset.
pub(crate) fn next_subset(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut p = k;
    while p > 0 {
        p -= 1;
        if idx[p] < n - k + p {
            idx[p] += 1;
            for q in p + 1..k {
                idx[q] = idx[q - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All k-subsets of `[0, n)` in lexicographic order, 0-based.
pub(crate) fn subsets0(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        if !next_subset(&mut idx, n) {
            break;
        }
    }
    out
}

/// Iterator over the 1-based k-subsets of `[1, n]` in lexicographic order.
pub struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

pub fn subsets(n: usize, k: usize) -> Subsets {
    Subsets {
        n,
        current: if k >= 1 && k <= n { Some((0..k).collect()) } else { None },
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.as_mut()?;
        let out = cur.iter().map(|v| v + 1).collect();
        if !next_subset(cur, self.n) {
            self.current = None;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force lexicographic enumeration over all k-tuples, independent of
    /// the combinatorial number system used by `rank`.
    fn brute_force(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut all = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                all.push((1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect::<Vec<_>>());
            }
        }
        all.sort();
        all
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&[1, 2], 3).unwrap(), 0);
        assert_eq!(rank(&[1, 3], 3).unwrap(), 1);
        assert_eq!(rank(&[2, 3], 3).unwrap(), 2);
        assert_eq!(rank(&[1, 2, 3, 4], 9).unwrap(), 0);
        let enumerated = brute_force(6, 2);
        let pos = enumerated.iter().position(|t| t == &vec![3, 5]).unwrap();
        assert_eq!(pos, 10);
        assert_eq!(rank(&[3, 5], 6).unwrap(), 10);
    }

    #[test]
    fn unrank_examples() {
        assert_eq!(unrank(1, 3, 2).unwrap(), vec![1, 3]);
        assert_eq!(unrank(0, 7, 3).unwrap(), vec![1, 2, 3]);
        let last = binomial(7, 3).unwrap() - 1;
        assert_eq!(unrank(last, 7, 3).unwrap(), vec![5, 6, 7]);
        assert!(matches!(unrank(35, 7, 3), Err(Error::RankOutOfRange { .. })));
    }

    #[test]
    fn rank_errors() {
        assert!(matches!(rank(&[2, 2], 3), Err(Error::NonIncreasingTuple(_))));
        assert!(matches!(rank(&[3, 1], 3), Err(Error::NonIncreasingTuple(_))));
        assert!(matches!(rank(&[1, 4], 3), Err(Error::IndexOutOfRange { index: 4, bound: 3 })));
        assert!(matches!(rank(&[0, 1], 3), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(binomial(63, 2), Err(Error::BinomialOverflow(63))));
        assert_eq!(binomial(62, 31).unwrap(), 465428353255261088);
    }

    #[test]
    fn exhaustive_bijection_up_to_12() {
        for n in 1..=12 {
            for k in 1..=n {
                let all = brute_force(n, k);
                assert_eq!(all.len() as u64, binomial(n, k).unwrap());
                let iterated: Vec<_> = subsets(n, k).collect();
                assert_eq!(iterated, all);
                for (r, t) in all.iter().enumerate() {
                    assert_eq!(rank(t, n).unwrap(), r as u64);
                    assert_eq!(&unrank(r as u64, n, k).unwrap(), t);
                }
            }
        }
    }

    #[test]
    fn relation_examples() {
        assert_eq!(
            subset_relation(&[1, 2, 3], &[1, 3, 4]).unwrap(),
            SubsetRelation::SingleSwap { l: 2, m: 3, sign: -1, entries: (2, 4) }
        );
        assert_eq!(subset_relation(&[1, 2], &[1, 2]).unwrap(), SubsetRelation::Equal);
        assert_eq!(subset_relation(&[1, 2], &[3, 4]).unwrap(), SubsetRelation::Other);
        assert!(matches!(subset_relation(&[1, 2], &[1, 2, 3]), Err(Error::MismatchedShapes(_))));
    }

    #[test]
    fn single_swap_iff_intersection_k_minus_1() {
        for n in 2..=7 {
            for k in 1..=n {
                let all = brute_force(n, k);
                for a in &all {
                    for b in &all {
                        let common = a.iter().filter(|v| b.contains(v)).count();
                        let rel = subset_relation(a, b).unwrap();
                        match rel {
                            SubsetRelation::Equal => assert_eq!(a, b),
                            SubsetRelation::SingleSwap { l, m, entries, .. } => {
                                assert_eq!(common, k - 1);
                                assert_eq!(a[l - 1], entries.0);
                                assert_eq!(b[m - 1], entries.1);
                                assert!(!b.contains(&entries.0) && !a.contains(&entries.1));
                            }
                            SubsetRelation::Other => assert!(a != b && common != k - 1),
                        }
                    }
                }
            }
        }
    }
}
