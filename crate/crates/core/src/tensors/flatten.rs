use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::scalar::Scalar;
use super::state::SparseState;
use crate::error::{Error, Result};

/// Relative singular-value cutoff for numerical rank.
pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-10;

/// Rank of the matrix whose rows are indexed by the parties in `row_parties`
/// and whose columns are indexed by the remaining parties.
pub fn flattening_rank(s: &SparseState, row_parties: &[usize]) -> Result<usize> {
    flattening_rank_with_threshold(s, row_parties, DEFAULT_RANK_THRESHOLD)
}

pub fn flattening_rank_with_threshold(s: &SparseState, row_parties: &[usize], threshold: f64) -> Result<usize> {
    let n = s.num_parties();
    let mut in_rows = vec![false; n];
    for &p in row_parties {
        if p >= n || std::mem::replace(&mut in_rows[p], true) {
            return Err(Error::InvalidBipartition(format!(
                "{row_parties:?} is not a set of parties of a {n}-party state"
            )));
        }
    }
    if row_parties.is_empty() || row_parties.len() == n {
        return Err(Error::InvalidBipartition(
            "one side of the cut is empty".to_string(),
        ));
    }
    // Only rows and columns that carry a nonzero entry matter for the rank.
    let mut row_ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut col_ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut entries = Vec::with_capacity(s.nnz());
    for (k, v) in s.iter() {
        let (r, c): (Vec<usize>, Vec<usize>) = (0..n).partition(|&p| in_rows[p]);
        let rk: Vec<usize> = r.iter().map(|&p| k[p]).collect();
        let ck: Vec<usize> = c.iter().map(|&p| k[p]).collect();
        let next = row_ids.len();
        let ri = *row_ids.entry(rk).or_insert(next);
        let next = col_ids.len();
        let ci = *col_ids.entry(ck).or_insert(next);
        entries.push((ri, ci, v));
    }
    let (nr, nc) = (row_ids.len(), col_ids.len());
    if nr == 0 {
        return Ok(0);
    }
    if s.is_exact() {
        let mut rows = vec![vec![Scalar::zero(); nc]; nr];
        for (r, c, v) in entries {
            rows[r][c] = v.clone();
        }
        Ok(exact_rank(&rows))
    } else {
        let mut m = DMatrix::<Complex64>::zeros(nr, nc);
        for (r, c, v) in entries {
            m[(r, c)] = v.to_c64();
        }
        Ok(numerical_rank(m, threshold))
    }
}

/// Rank of a rational matrix by fraction-free (Bareiss) elimination.
pub fn exact_rank(rows: &[Vec<Scalar>]) -> usize {
    // Clear denominators row by row; this does not change the rank.
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let lcm = row
                .iter()
                .filter_map(Scalar::as_rational)
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter()
                .map(|v| {
                    let q = v.as_rational().expect("exact rank of a float matrix");
                    q.numer() * (&lcm / q.denom())
                })
                .collect()
        })
        .collect();
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..nc {
        let Some(p) = (rank..nr).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..nr {
            for c in col + 1..nc {
                let v = (&a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c]) / &prev;
                a[r][c] = v;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == nr {
            break;
        }
    }
    rank
}

/// Number of singular values above `threshold · σ_max`.
pub fn numerical_rank(m: DMatrix<Complex64>, threshold: f64) -> usize {
    let sv = m.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&x| x > threshold * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::int(n)
    }

    #[test]
    fn w3_single_cut_has_rank_two() {
        let w = SparseState::from_entries(
            vec![2, 2, 2],
            [vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]].map(|k| (k, q(1))),
        )
        .unwrap();
        for p in 0..3 {
            assert_eq!(flattening_rank(&w, &[p]).unwrap(), 2);
        }
        assert_eq!(flattening_rank(&w.to_complex(), &[0]).unwrap(), 2);
    }

    #[test]
    fn product_state_rank_one() {
        let s = SparseState::basis(vec![3, 3], vec![2, 1]).unwrap();
        assert_eq!(flattening_rank(&s, &[0]).unwrap(), 1);
    }

    #[test]
    fn bad_cuts_rejected() {
        let s = SparseState::basis(vec![2, 2], vec![0, 0]).unwrap();
        assert!(flattening_rank(&s, &[]).is_err());
        assert!(flattening_rank(&s, &[0, 1]).is_err());
        assert!(flattening_rank(&s, &[2]).is_err());
        assert!(flattening_rank(&s, &[0, 0]).is_err());
    }

    #[test]
    fn bareiss_matches_dependent_rows() {
        let rows = vec![
            vec![Scalar::ratio(1, 2), q(1), q(3)],
            vec![q(1), q(2), q(6)],
            vec![q(0), q(1), Scalar::ratio(-1, 3)],
        ];
        assert_eq!(exact_rank(&rows), 2);
        let rows = vec![vec![q(0), q(0)], vec![q(0), q(5)]];
        assert_eq!(exact_rank(&rows), 1);
    }
}
