//! W, GHZ and Dicke families, the set-partition expansion of `|W_N⟩^{⊗n}`,
//! and rank bounds for its powers.

mod w3cubed;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::combinat::{binomial, factorial, restricted_growth_strings};
use crate::error::{Error, Result};
use crate::sympoly::{
    binary_monomial_decompose, monomial_decompose, monomial_term_count, poly_from_state, ExponentVector,
    HomogeneousPolynomial, SymmetricDecomposition, FLOAT_CERT_TOL,
};
use crate::tensors::{apply_local, merge_parties, tensor_power, LocalOperatorSet, Matrix, Scalar, SparseState};

pub use w3cubed::{w3_cubed_certificate, w3_cubed_reduction, CubicPiece, W3CubedReduction};

/// Default limit on the number of copies (`d = 2^n` levels per party).
pub const DEFAULT_MAX_COPIES: u32 = 12;
/// Largest number of monomials an expansion may produce.
pub const MAX_EXPANSION_TERMS: u64 = 1_000_000;

/// `Σ_i |0…1_i…0⟩` on `N` qubits.
pub fn w_state(n_parties: usize) -> Result<SparseState> {
    if n_parties < 2 {
        return Err(Error::InvalidArgument(format!("W state needs N >= 2, got {n_parties}")));
    }
    SparseState::from_entries(
        vec![2; n_parties],
        (0..n_parties).map(|i| {
            let mut k = vec![0; n_parties];
            k[i] = 1;
            (k, Scalar::one())
        }),
    )
}

/// `Σ_{i<d} |i⟩^{⊗N}`.
pub fn ghz_state(n_parties: usize, d: usize) -> Result<SparseState> {
    if n_parties == 0 || d == 0 {
        return Err(Error::InvalidArgument(format!(
            "GHZ state needs N >= 1 and d >= 1, got N = {n_parties}, d = {d}"
        )));
    }
    SparseState::from_entries(vec![d; n_parties], (0..d).map(|i| (vec![i; n_parties], Scalar::one())))
}

/// Stirling number of the second kind; zero when `k > n`.
pub fn stirling2(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut row = vec![BigInt::from(0); k as usize + 1];
    row[0] = BigInt::from(1);
    for _ in 0..n {
        for j in (1..=k as usize).rev() {
            row[j] = &row[j] * j + &row[j - 1];
        }
        row[0] = BigInt::from(0);
    }
    row[k as usize].clone()
}

/// Falling factorial `N (N−1) ⋯ (N−k+1)`.
fn falling(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i))
}

/// One set partition of the copies and its monomial
/// `x_0^{N−k} x_{b_1} ⋯ x_{b_k}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionEntry {
    pub blocks: usize,
    /// Copy indices (0-based) of each block.
    pub partition: Vec<Vec<usize>>,
    pub exponents: ExponentVector,
}

impl ExpansionEntry {
    /// Variable index of each block: copy `c` sets bit `n − 1 − c`.
    pub fn block_vars(&self, copies: u32) -> Vec<usize> {
        self.partition
            .iter()
            .map(|b| b.iter().map(|&c| 1usize << (copies as usize - 1 - c)).sum())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WPowerExpansion {
    pub parties: u32,
    pub copies: u32,
    pub entries: Vec<ExpansionEntry>,
}

impl WPowerExpansion {
    /// `h(W_N^{⊗n})`: each entry with `k` blocks carries the coefficient
    /// `N!/(N−k)!`, the number of words realizing it.
    pub fn polynomial(&self) -> Result<HomogeneousPolynomial> {
        HomogeneousPolynomial::from_terms(
            self.parties,
            1 << self.copies,
            self.entries
                .iter()
                .map(|e| (e.exponents.clone(), Scalar::big_int(falling(self.parties, e.blocks as u32)))),
        )
    }

    pub fn count_with_blocks(&self, k: usize) -> usize {
        self.entries.iter().filter(|e| e.blocks == k).count()
    }
}

fn check_w_params(n_parties: u32, copies: u32, max_copies: u32) -> Result<()> {
    if n_parties < 2 || copies < 1 {
        return Err(Error::InvalidArgument(format!(
            "W power needs N >= 2 and n >= 1, got N = {n_parties}, n = {copies}"
        )));
    }
    if copies > max_copies {
        return Err(Error::ResourceGuard(format!(
            "n = {copies} copies means 2^{copies} levels per party (limit n <= {max_copies})"
        )));
    }
    Ok(())
}

pub fn wpower_expansion(n_parties: u32, copies: u32) -> Result<WPowerExpansion> {
    wpower_expansion_guarded(n_parties, copies, DEFAULT_MAX_COPIES)
}

/// Set partitions of the `n` copies into at most `N` blocks, in
/// restricted-growth-string order.
pub fn wpower_expansion_guarded(n_parties: u32, copies: u32, max_copies: u32) -> Result<WPowerExpansion> {
    check_w_params(n_parties, copies, max_copies)?;
    let terms: BigInt = (1..=n_parties.min(copies)).map(|k| stirling2(copies, k)).sum();
    if terms > BigInt::from(MAX_EXPANSION_TERMS) {
        return Err(Error::ResourceGuard(format!(
            "W_{n_parties}^{copies} expands into {terms} monomials (limit {MAX_EXPANSION_TERMS})"
        )));
    }
    let d = 1usize << copies;
    let mut entries = Vec::new();
    for rgs in restricted_growth_strings(copies as usize) {
        let k = rgs.iter().max().map_or(0, |m| m + 1);
        if k > n_parties as usize {
            continue;
        }
        let mut partition = vec![Vec::new(); k];
        for (c, &b) in rgs.iter().enumerate() {
            partition[b].push(c);
        }
        let mut entry = ExpansionEntry {
            blocks: k,
            partition,
            exponents: ExponentVector::new(vec![0; d]),
        };
        let mut exps = vec![0u32; d];
        exps[0] = n_parties - k as u32;
        for v in entry.block_vars(copies) {
            exps[v] += 1;
        }
        entry.exponents = ExponentVector::new(exps);
        entries.push(entry);
    }
    Ok(WPowerExpansion {
        parties: n_parties,
        copies,
        entries,
    })
}

/// Per-party fused `|W_N⟩^{⊗n}` (copy 0 most significant).
pub fn w_power_state(n_parties: u32, copies: u32) -> Result<SparseState> {
    check_w_params(n_parties, copies, DEFAULT_MAX_COPIES)?;
    tensor_power(&w_state(n_parties as usize)?, copies as usize)
}

/// `Σ_{k ≤ min(N,n)} S(n,k) (1 + max{N−k, k}) 2^{k−1}`.
pub fn wn_upper_bound(n_parties: u32, copies: u32) -> Result<BigInt> {
    if n_parties < 2 || copies < 1 {
        return Err(Error::InvalidArgument(format!(
            "bound needs N >= 2 and n >= 1, got N = {n_parties}, n = {copies}"
        )));
    }
    Ok((1..=n_parties.min(copies))
        .map(|k| stirling2(copies, k) * (1 + (n_parties - k).max(k)) * (BigInt::from(1) << (k - 1)))
        .sum())
}

/// `(N−1) 2^n − N + 2`.
pub fn wn_lower_bound(n_parties: u32, copies: u32) -> Result<BigInt> {
    if n_parties < 3 || copies < 1 {
        return Err(Error::InvalidArgument(format!(
            "lower bound formula needs N >= 3 and n >= 1, got N = {n_parties}, n = {copies}"
        )));
    }
    Ok(BigInt::from(n_parties - 1) * (BigInt::from(1) << copies) - n_parties + 2)
}

/// Term count of [`wn_constructive_decomposition`] without building it.
pub fn wn_constructive_count(n_parties: u32, copies: u32) -> Result<usize> {
    wpower_expansion(n_parties, copies)?
        .entries
        .iter()
        .map(|e| monomial_term_count(&e.exponents))
        .sum()
}

/// Waring certificate for `h(W_N^{⊗n})` assembled from one monomial
/// certificate per expansion entry; verified before it is returned.
pub fn wn_constructive_decomposition(n_parties: u32, copies: u32) -> Result<SymmetricDecomposition> {
    let exp = wpower_expansion(n_parties, copies)?;
    let mut dec = SymmetricDecomposition::new(n_parties, 1 << copies);
    for e in &exp.entries {
        let part = monomial_decompose(&e.exponents)?;
        dec.extend(part.scaled(&Scalar::big_int(falling(n_parties, e.blocks as u32))))?;
    }
    dec.verify(&exp.polynomial()?, FLOAT_CERT_TOL)?;
    Ok(dec)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub parties: u32,
    pub copies: u32,
    pub generic_upper: BigInt,
    pub constructive_upper: BigInt,
    pub lower: BigInt,
}

impl BoundReport {
    pub fn new(n_parties: u32, copies: u32) -> Result<Self> {
        Ok(BoundReport {
            parties: n_parties,
            copies,
            generic_upper: wn_upper_bound(n_parties, copies)?,
            constructive_upper: BigInt::from(wn_constructive_count(n_parties, copies)?),
            lower: wn_lower_bound(n_parties, copies)?,
        })
    }

    pub fn nth_root(&self) -> f64 {
        self.constructive_upper.to_f64().unwrap_or(f64::INFINITY).powf(1.0 / f64::from(self.copies))
    }
}

/// Minimizes `(upper bound for n copies)^{1/n}` over `1 ≤ n ≤ n_max`.
/// `overrides` replaces the constructive count for particular `n` (for
/// instance with the size of a separately verified certificate).
pub fn best_nth_root_bound(n_parties: u32, n_max: u32, overrides: &BTreeMap<u32, usize>) -> Result<(u32, f64)> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if n_max > DEFAULT_MAX_COPIES {
        return Err(Error::ResourceGuard(format!("n_max = {n_max} exceeds {DEFAULT_MAX_COPIES}")));
    }
    let mut best = (0, f64::INFINITY);
    for n in 1..=n_max {
        let count = match overrides.get(&n) {
            Some(&c) => c,
            None => wn_constructive_count(n_parties, n)?,
        };
        let value = (count as f64).powf(1.0 / f64::from(n));
        if value < best.1 {
            best = (n, value);
        }
    }
    Ok(best)
}

/// CSV with columns `N,n,lower,constructive_upper,generic_upper,nth_root`.
pub fn bounds_table_csv(parties: impl IntoIterator<Item = u32>, copies: &[u32]) -> Result<String> {
    let mut out = String::from("N,n,lower,constructive_upper,generic_upper,nth_root\n");
    for n_parties in parties {
        for &n in copies {
            let r = BoundReport::new(n_parties, n)?;
            out.push_str(&format!(
                "{},{},{},{},{},{:.6}\n",
                r.parties,
                r.copies,
                r.lower,
                r.constructive_upper,
                r.generic_upper,
                r.nth_root()
            ));
        }
    }
    Ok(out)
}

/// `m + 1` term certificate for `h(D(m, n)) = C(m+n, n) x_0^m x_1^n`.
pub fn dicke_decomposition(m: u32, n: u32) -> Result<SymmetricDecomposition> {
    if m < n || m < 1 {
        return Err(Error::InvalidArgument(format!(
            "Dicke decomposition needs m >= n and m >= 1, got m = {m}, n = {n}"
        )));
    }
    let dec = binary_monomial_decompose(m, n)?.scaled(&Scalar::big_int(binomial(m + n, n)));
    let target = poly_from_state(&crate::sympoly::dicke_state(&ExponentVector::new(vec![m, n]))?)?;
    dec.verify(&target, FLOAT_CERT_TOL)?;
    Ok(dec)
}

/// `|1⟩⟨11| + ½ |0⟩(⟨01| + ⟨10|)`, mapping two fused qubits to one.
pub fn pair_merge_operator() -> Matrix {
    let h = Scalar::ratio(1, 2);
    Matrix::from_rows(vec![
        vec![Scalar::zero(), h.clone(), h, Scalar::zero()],
        vec![Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::one()],
    ])
    .expect("rectangular rows")
}

/// Fuses the last two qubits of `s` and applies [`pair_merge_operator`]
/// to them, the identity elsewhere.
pub fn merge_last_pair(s: &SparseState) -> Result<SparseState> {
    let n = s.num_parties();
    if n < 3 || s.local_dims()[n - 2..] != [2, 2] {
        return Err(Error::ShapeMismatch(format!(
            "pair merge needs at least three parties ending in two qubits, got {:?}",
            s.local_dims()
        )));
    }
    let fused = merge_parties(s, n - 2, 2)?;
    let mut ops = LocalOperatorSet::identity(fused.local_dims()).into_ops();
    ops[n - 2] = pair_merge_operator();
    apply_local(&LocalOperatorSet::new(ops)?, &fused)
}

/// `1/k! Σ_i (−1)^{k−i} C(k,i) i^n`, used as an independent check.
pub fn stirling2_closed_form(n: u32, k: u32) -> BigInt {
    let sum: BigInt = (0..=k)
        .map(|i| {
            let term = binomial(k, i) * BigInt::from(i).pow(n);
            if (k - i).is_multiple_of(2) {
                term
            } else {
                -term
            }
        })
        .sum();
    sum / factorial(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensors::{equal_up_to_scale, flattening_rank};

    #[test]
    fn generators() {
        assert_eq!(w_state(3).unwrap().nnz(), 3);
        assert_eq!(ghz_state(4, 1).unwrap().nnz(), 1);
        let g = ghz_state(3, 4).unwrap();
        for p in 0..3 {
            assert_eq!(flattening_rank(&g, &[p]).unwrap(), 4);
        }
        assert!(w_state(1).is_err());
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(3, 2), BigInt::from(3));
        assert_eq!(stirling2(4, 2), BigInt::from(7));
        assert_eq!(stirling2(7, 1), BigInt::from(1));
        assert_eq!(stirling2(2, 3), BigInt::from(0));
        assert_eq!(stirling2(0, 0), BigInt::from(1));
        for n in 0..15 {
            for k in 0..=n {
                assert_eq!(stirling2(n, k), stirling2_closed_form(n, k), "S({n},{k})");
            }
        }
    }

    #[test]
    fn three_copy_pairs() {
        let e = wpower_expansion(5, 3).unwrap();
        let pairs: Vec<Vec<usize>> = e
            .entries
            .iter()
            .filter(|x| x.blocks == 2)
            .map(|x| x.block_vars(3))
            .collect();
        assert_eq!(pairs, vec![vec![6, 1], vec![5, 2], vec![4, 3]]);
    }

    #[test]
    fn expansion_matches_state_polynomial() {
        for (n_parties, copies) in [(3, 1), (3, 2), (4, 2), (3, 3), (5, 3), (2, 3), (4, 4)] {
            let e = wpower_expansion(n_parties, copies).unwrap();
            let h = poly_from_state(&w_power_state(n_parties, copies).unwrap()).unwrap();
            assert_eq!(e.polynomial().unwrap(), h, "N={n_parties} n={copies}");
        }
        let one = wpower_expansion(6, 1).unwrap();
        assert_eq!(one.entries.len(), 1);
        assert_eq!(one.entries[0].exponents, ExponentVector::new(vec![5, 1]));
    }

    #[test]
    fn w3_squared_polynomial() {
        let h = wpower_expansion(3, 2).unwrap().polynomial().unwrap();
        let expected = HomogeneousPolynomial::from_terms(
            3,
            4,
            [
                (ExponentVector::new(vec![2, 0, 0, 1]), Scalar::int(3)),
                (ExponentVector::new(vec![1, 1, 1, 0]), Scalar::int(6)),
            ],
        )
        .unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn resource_guard() {
        assert!(matches!(wpower_expansion(3, 13), Err(Error::ResourceGuard(_))));
        assert!(wpower_expansion_guarded(3, 3, 2).is_err());
    }

    #[test]
    fn bounds_small_cases() {
        for n_parties in 4..20u32 {
            assert_eq!(wn_upper_bound(n_parties, 2).unwrap(), BigInt::from(3 * n_parties - 2));
        }
        for n_parties in 2..10u32 {
            assert_eq!(wn_upper_bound(n_parties, 1).unwrap(), BigInt::from(n_parties));
        }
        assert_eq!(wn_upper_bound(3, 2).unwrap(), BigInt::from(9));
        assert_eq!(wn_lower_bound(5, 2).unwrap(), BigInt::from(13));
        assert_eq!(wn_lower_bound(7, 1).unwrap(), BigInt::from(7));
        assert_eq!(wn_constructive_count(3, 2).unwrap(), 7);
        assert_eq!(wn_constructive_count(3, 3).unwrap(), 19);
    }

    #[test]
    fn constructive_certificates() {
        let d = wn_constructive_decomposition(3, 2).unwrap();
        assert_eq!(d.len(), 7);
        assert!(d.is_exact());
        assert_eq!(wn_constructive_decomposition(5, 1).unwrap().len(), 5);
        assert_eq!(wn_constructive_decomposition(5, 2).unwrap().len(), 13);
    }

    #[test]
    fn nth_roots() {
        let none = BTreeMap::new();
        assert_eq!(best_nth_root_bound(3, 1, &none).unwrap(), (1, 3.0));
        let (n, v) = best_nth_root_bound(3, 2, &none).unwrap();
        assert_eq!(n, 2);
        assert!((v - 7f64.sqrt()).abs() < 1e-12);
        let (n, v) = best_nth_root_bound(3, 3, &BTreeMap::from([(3, 16)])).unwrap();
        assert_eq!(n, 3);
        assert!((v - 16f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn dicke_decompositions() {
        assert_eq!(dicke_decomposition(2, 1).unwrap().len(), 3);
        assert_eq!(dicke_decomposition(5, 0).unwrap().len(), 1);
        assert_eq!(dicke_decomposition(4, 3).unwrap().len(), 5);
        assert!(dicke_decomposition(2, 3).is_err());
    }

    #[test]
    fn pair_merge_lowers_excitations() {
        for (m, n) in [(2, 1), (3, 2), (4, 4), (5, 1)] {
            let s = crate::sympoly::dicke_state(&ExponentVector::new(vec![m, n])).unwrap();
            let out = merge_last_pair(&s).unwrap();
            let expected = crate::sympoly::dicke_state(&ExponentVector::new(vec![m, n - 1])).unwrap();
            assert!(equal_up_to_scale(&out, &expected, 0.0).unwrap().equal, "D({m},{n})");
        }
    }

    #[test]
    fn csv_layout() {
        let csv = bounds_table_csv(3..=4, &[1, 2]).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "N,n,lower,constructive_upper,generic_upper,nth_root");
        assert_eq!(lines[2], "3,2,7,7,9,2.645751");
        assert_eq!(lines.len(), 5);
    }
}
