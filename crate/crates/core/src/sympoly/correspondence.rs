use std::collections::BTreeMap;

use super::poly::{ExponentVector, HomogeneousPolynomial};
use crate::combinat::distinct_permutations;
use crate::error::{Error, Result};
use crate::tensors::{permute_parties, MultiIndex, Scalar, SparseState};

/// Relative tolerance for the symmetry check on float states.
const SYMMETRY_TOL: f64 = 1e-12;

/// Unnormalized Dicke state: amplitude 1 on every distinct rearrangement of
/// the word `0^{j_0} 1^{j_1} …`.
pub fn dicke_state(exps: &ExponentVector) -> Result<SparseState> {
    let n = exps.degree() as usize;
    let d = exps.num_vars();
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(format!(
            "Dicke state needs at least one party and one level, got {exps}"
        )));
    }
    let words = distinct_permutations(&exps.word());
    SparseState::from_entries(vec![d; n], words.into_iter().map(|w| (w, Scalar::one())))
}

/// True when `s` is invariant under every exchange of adjacent parties.
pub fn is_symmetric(s: &SparseState) -> bool {
    let n = s.num_parties();
    if s.local_dims().iter().any(|&d| d != s.local_dims()[0]) {
        return false;
    }
    let scale = s.norm();
    (0..n.saturating_sub(1)).all(|i| {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i, i + 1);
        let t = permute_parties(s, &perm).expect("valid transposition");
        if s.is_exact() {
            t == *s
        } else {
            t.sub(s).expect("same dims").norm() <= SYMMETRY_TOL * scale
        }
    })
}

/// The polynomial of a symmetric state. The coefficient of `x^j` is the sum
/// of the amplitudes over all words with content `j`, so `v^{⊗N}` maps to
/// `(Σ v_i x_i)^N` and a Dicke state maps to `multinom(j)·x^j`.
pub fn poly_from_state(s: &SparseState) -> Result<HomogeneousPolynomial> {
    let d = s.local_dims()[0];
    if s.local_dims().iter().any(|&x| x != d) {
        return Err(Error::ShapeMismatch(format!(
            "symmetric states need equal local dims, got {:?}",
            s.local_dims()
        )));
    }
    if !is_symmetric(s) {
        return Err(Error::NotSymmetric);
    }
    let mut coeffs: BTreeMap<ExponentVector, Scalar> = BTreeMap::new();
    for (k, v) in s.iter() {
        let e = ExponentVector::from_word(d, k);
        let entry = coeffs.entry(e).or_insert_with(Scalar::zero);
        *entry = &*entry + v;
    }
    HomogeneousPolynomial::from_terms(s.num_parties() as u32, d, coeffs)
}

/// Inverse of [`poly_from_state`]: `x^j` becomes the Dicke state of `j`
/// divided by `multinom(j)`.
pub fn state_from_poly(h: &HomogeneousPolynomial) -> Result<SparseState> {
    if h.degree() == 0 || h.num_vars() == 0 {
        return Err(Error::InvalidArgument(
            "state needs positive degree and at least one variable".into(),
        ));
    }
    let mut entries: Vec<(MultiIndex, Scalar)> = Vec::new();
    for (e, c) in h.terms() {
        let amp = c / &Scalar::big_int(e.multinomial());
        for w in distinct_permutations(&e.word()) {
            entries.push((w, amp.clone()));
        }
    }
    SparseState::from_entries(vec![h.num_vars(); h.degree() as usize], entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dicke_examples() {
        let w = dicke_state(&ExponentVector(vec![2, 1])).unwrap();
        let support: Vec<_> = w.iter().map(|(k, _)| k.clone()).collect();
        assert_eq!(support, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        let p = dicke_state(&ExponentVector(vec![4, 0, 0])).unwrap();
        assert_eq!(p.nnz(), 1);
        assert_eq!(p.amplitude(&[0, 0, 0, 0]), Some(&Scalar::one()));
        assert_eq!(dicke_state(&ExponentVector(vec![1, 1, 1])).unwrap().nnz(), 6);
    }

    #[test]
    fn dicke_maps_to_scaled_monomial() {
        let e = ExponentVector(vec![1, 2, 1]);
        let h = poly_from_state(&dicke_state(&e).unwrap()).unwrap();
        assert_eq!(h.num_terms(), 1);
        assert_eq!(h.coeff(&e), Scalar::int(12));
    }

    #[test]
    fn non_symmetric_rejected() {
        let s = SparseState::basis(vec![2, 2], vec![0, 1]).unwrap();
        assert!(!is_symmetric(&s));
        assert!(matches!(poly_from_state(&s), Err(Error::NotSymmetric)));
        let s = SparseState::basis(vec![2, 3], vec![0, 0]).unwrap();
        assert!(matches!(poly_from_state(&s), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn round_trip_both_ways() {
        let h = HomogeneousPolynomial::from_terms(
            3,
            3,
            [
                (ExponentVector(vec![1, 1, 1]), Scalar::ratio(5, 7)),
                (ExponentVector(vec![0, 3, 0]), Scalar::int(-2)),
                (ExponentVector(vec![2, 0, 1]), Scalar::ratio(1, 3)),
            ],
        )
        .unwrap();
        let s = state_from_poly(&h).unwrap();
        assert!(is_symmetric(&s));
        assert_eq!(poly_from_state(&s).unwrap(), h);
        assert_eq!(state_from_poly(&poly_from_state(&s).unwrap()).unwrap(), s);
    }
}
