use serde::Serialize;

use super::product::symmetric_to_product;
use super::witness::{ghz_power_fusion, ghz_to_state_operators, ConversionWitness, WITNESS_TOL};
use crate::error::{Error, Result};
use crate::tensors::{
    direct_sum, factor_permutation_matrix, tensor_power, tensor_product, FuseMode, LocalOperatorSet, Matrix, Scalar,
    SparseState,
};
use crate::wpower::{ghz_state, w_power_state, w_state, wn_constructive_decomposition};

/// `⊕_{k=1}^{n} ψ^{⊗(n−k)} ⊗ φ^{⊗k}`.
pub fn build_catalyst(psi: &SparseState, phi: &SparseState, n: usize) -> Result<SparseState> {
    catalyst_blocks(psi, phi, n)?
        .into_iter()
        .map(Ok)
        .reduce(|a, b| direct_sum(&a?, &b?))
        .expect("n >= 1")
}

fn catalyst_blocks(psi: &SparseState, phi: &SparseState, n: usize) -> Result<Vec<SparseState>> {
    if n == 0 {
        return Err(Error::InvalidArgument("catalyst needs n >= 1".into()));
    }
    if psi.num_parties() != phi.num_parties() {
        return Err(Error::PartyCountMismatch(psi.num_parties(), phi.num_parties()));
    }
    (1..=n)
        .map(|k| {
            let phis = tensor_power(phi, k)?;
            if k == n {
                Ok(phis)
            } else {
                tensor_product(&tensor_power(psi, n - k)?, &phis, FuseMode::PerPartyFuse)
            }
        })
        .collect()
}

/// Basis permutation taking the fused layout of `x ⊗ (c_1 ⊕ … ⊕ c_m)` on one
/// party to the block layout `(x ⊗ c_1) ⊕ … ⊕ (x ⊗ c_m)`.
fn distribute_permutation(dx: usize, blocks: &[usize]) -> Result<Matrix> {
    let dc: usize = blocks.iter().sum();
    let mut image = vec![0; dx * dc];
    let mut c_off = 0;
    let mut out_off = 0;
    for &b in blocks {
        for jx in 0..dx {
            for o in 0..b {
                image[jx * dc + c_off + o] = out_off + jx * b + o;
            }
        }
        c_off += b;
        out_off += dx * b;
    }
    Matrix::permutation(&image)
}

/// A block map `source block → target block` with operators whose action
/// on the block is `scale · target block`.
struct BlockMap {
    from: usize,
    to: usize,
    ops: LocalOperatorSet,
    scale: Scalar,
}

/// Witness for `x ⊗ (⊕ c_k) → y ⊗ (⊕ c_k)` assembled from block maps that
/// together form a bijection between source and target blocks.
fn assemble(
    x: &SparseState,
    y: &SparseState,
    catalyst_parts: &[SparseState],
    maps: Vec<BlockMap>,
) -> Result<ConversionWitness> {
    let parties = x.num_parties();
    let catalyst = catalyst_parts
        .iter()
        .cloned()
        .map(Ok)
        .reduce(|a, b| direct_sum(&a?, &b?))
        .expect("nonempty catalyst")?;
    let source = tensor_product(x, &catalyst, FuseMode::PerPartyFuse)?;
    let target = tensor_product(y, &catalyst, FuseMode::PerPartyFuse)?;
    let mut ops = Vec::with_capacity(parties);
    for p in 0..parties {
        let parts: Vec<usize> = catalyst_parts.iter().map(|c| c.local_dims()[p]).collect();
        let src_sizes: Vec<usize> = parts.iter().map(|b| x.local_dims()[p] * b).collect();
        let tgt_sizes: Vec<usize> = parts.iter().map(|b| y.local_dims()[p] * b).collect();
        let offsets = |sizes: &[usize]| -> Vec<usize> {
            sizes.iter().scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            }).collect()
        };
        let (src_off, tgt_off) = (offsets(&src_sizes), offsets(&tgt_sizes));
        let mut block = Matrix::zeros(tgt_sizes.iter().sum(), src_sizes.iter().sum());
        for m in &maps {
            let mut op = m.ops.ops()[p].clone();
            if p == 0 {
                op = op.scaled(&m.scale.recip()?);
            }
            if op.rows() != tgt_sizes[m.to] || op.cols() != src_sizes[m.from] {
                return Err(Error::ShapeMismatch(format!(
                    "block map {} -> {} has a {}x{} operator on party {p}",
                    m.from,
                    m.to,
                    op.rows(),
                    op.cols()
                )));
            }
            block.place(tgt_off[m.to], src_off[m.from], &op);
        }
        let ps = distribute_permutation(x.local_dims()[p], &parts)?;
        let pt = distribute_permutation(y.local_dims()[p], &parts)?;
        ops.push(pt.transpose().matmul(&block)?.matmul(&ps)?);
    }
    ConversionWitness::new(source, target, LocalOperatorSet::new(ops)?)
}

fn factor_swap_ops(dims_per_factor: &[Vec<usize>], perm: &[usize]) -> Result<LocalOperatorSet> {
    LocalOperatorSet::new(
        dims_per_factor
            .iter()
            .map(|shape| factor_permutation_matrix(shape, perm))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Witness for `ψ ⊗ c → φ ⊗ c` with `c = build_catalyst(ψ, φ, n)`, given a
/// witness for `ψ^{⊗n} → φ^{⊗n}`.
///
/// Source block `k` is `ψ^{⊗(n−k+1)} φ^{⊗k}`. For `k ≥ 2` it is sent to
/// target block `k − 1`, `φ ψ^{⊗(n−k+1)} φ^{⊗(k−1)}`, by moving the last
/// factor to the front; block 1, `ψ^{⊗n} φ`, goes to `φ^{⊗(n+1)}` through the
/// multi-copy witness.
pub fn catalysis_witness(
    psi: &SparseState,
    phi: &SparseState,
    n: usize,
    multi_copy: &ConversionWitness,
) -> Result<ConversionWitness> {
    let psi_n = tensor_power(psi, n)?;
    let phi_n = tensor_power(phi, n)?;
    if multi_copy.source != psi_n || multi_copy.target != phi_n {
        return Err(Error::InvalidArgument(
            "multi-copy witness does not convert the n-th powers of the given states".into(),
        ));
    }
    multi_copy.verify(WITNESS_TOL)?;
    let parts = catalyst_blocks(psi, phi, n)?;
    let parties = psi.num_parties();
    let mut maps = Vec::with_capacity(n);
    let ident_phi = LocalOperatorSet::identity(phi.local_dims());
    maps.push(BlockMap {
        from: 0,
        to: n - 1,
        ops: multi_copy.ops.kron(&ident_phi)?,
        scale: multi_copy.scale.clone(),
    });
    for k in 2..=n {
        let shapes: Vec<Vec<usize>> = (0..parties)
            .map(|p| {
                let mut s = vec![psi.local_dims()[p]; n - k + 1];
                s.extend(std::iter::repeat_n(phi.local_dims()[p], k));
                s
            })
            .collect();
        let mut perm = vec![n];
        perm.extend(0..n);
        maps.push(BlockMap {
            from: k - 1,
            to: k - 2,
            ops: factor_swap_ops(&shapes, &perm)?,
            scale: Scalar::one(),
        });
    }
    assemble(psi, phi, &parts, maps)
}

/// Witness for `ψ ⊗ (φ ⊕ ψ) → φ ⊗ (φ ⊕ ψ)` given a witness for
/// `ψ^{⊗2} → φ^{⊗2}`: `ψψ ↦ φφ` through the witness and `ψφ ↦ φψ` by
/// exchanging the fused factors.
pub fn simple_catalysis_witness(
    psi: &SparseState,
    phi: &SparseState,
    two_copy: &ConversionWitness,
) -> Result<ConversionWitness> {
    if two_copy.source != tensor_power(psi, 2)? || two_copy.target != tensor_power(phi, 2)? {
        return Err(Error::InvalidArgument(
            "two-copy witness does not convert the squares of the given states".into(),
        ));
    }
    let parties = psi.num_parties();
    let shapes: Vec<Vec<usize>> = (0..parties)
        .map(|p| vec![psi.local_dims()[p], phi.local_dims()[p]])
        .collect();
    let maps = vec![
        BlockMap {
            from: 0,
            to: 1,
            ops: factor_swap_ops(&shapes, &[1, 0])?,
            scale: Scalar::one(),
        },
        BlockMap {
            from: 1,
            to: 0,
            ops: two_copy.ops.clone(),
            scale: two_copy.scale.clone(),
        },
    ];
    assemble(psi, phi, &[phi.clone(), psi.clone()], maps)
}

/// Why a single copy cannot be converted: the GHZ source has fewer levels
/// than the tensor rank of `W_N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleCopyObstruction {
    pub w_rank: usize,
    pub ghz_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmloccReport {
    pub parties: usize,
    pub ghz_level: usize,
    pub fused_rank: usize,
    pub certificate_terms: usize,
    pub residual: f64,
    pub single_copy: SingleCopyObstruction,
    #[serde(skip)]
    pub witness: ConversionWitness,
}

/// Two-copy conversion `(GHZ_N^{N−1})^{⊗2} → W_N^{⊗2}`.
pub fn smlocc_w_demo(n_parties: usize) -> Result<SmloccReport> {
    if n_parties < 5 {
        let n = n_parties as i64;
        return Err(Error::Precondition(format!(
            "N = {n_parties}: (N-1)^2 = {} < 3N-2 = {}, two GHZ copies of level N-1 cannot reach W_N^2",
            (n - 1) * (n - 1),
            3 * n - 2
        )));
    }
    smlocc_w_demo_with_level(n_parties, n_parties - 1)
}

/// Two-copy conversion `(GHZ_N^{L})^{⊗2} → W_N^{⊗2}`; requires
/// `L^2 ≥ 3N − 2`.
pub fn smlocc_w_demo_with_level(n_parties: usize, level: usize) -> Result<SmloccReport> {
    let (witness, certificate_terms) = ghz_power_to_w_power(n_parties, level, 2)?;
    let residual = witness.verify(WITNESS_TOL)?;
    Ok(SmloccReport {
        parties: n_parties,
        ghz_level: level,
        fused_rank: level * level,
        certificate_terms,
        residual,
        single_copy: SingleCopyObstruction {
            w_rank: n_parties,
            ghz_rank: level,
        },
        witness,
    })
}

/// `(GHZ_N^{L})^{⊗n} → W_N^{⊗n}` through `GHZ_N^{L^n}`. The constructive
/// certificate is padded with zero-weight terms up to `L^n`. Also returns
/// the number of genuine certificate terms.
pub fn ghz_power_to_w_power(n_parties: usize, level: usize, copies: usize) -> Result<(ConversionWitness, usize)> {
    if n_parties < 3 || copies == 0 {
        return Err(Error::InvalidArgument("need N >= 3 and at least one copy".into()));
    }
    let dec = wn_constructive_decomposition(n_parties as u32, copies as u32)?;
    let needed = dec.len();
    let fused_rank = level
        .checked_pow(copies as u32)
        .ok_or_else(|| Error::ResourceGuard(format!("GHZ level {level}^{copies}")))?;
    if fused_rank < needed {
        return Err(Error::Precondition(format!(
            "GHZ level {level}: {level}^{copies} = {fused_rank} < {needed} certificate terms"
        )));
    }
    let mut cert = symmetric_to_product(&dec)?;
    let d = 1usize << copies;
    let filler = {
        let mut e0 = vec![Scalar::zero(); d];
        e0[0] = Scalar::one();
        vec![e0; n_parties]
    };
    while cert.len() < fused_rank {
        cert.push(Scalar::zero(), filler.clone())?;
    }
    let target = w_power_state(n_parties as u32, copies as u32)?;
    let convert = ghz_to_state_operators(&cert, &target)?;
    let fuse = ghz_power_fusion(level, copies, n_parties)?;
    Ok((fuse.then(&convert)?, needed))
}

/// Generic catalysis for the W family: `ψ = GHZ_N^{N−1}`, `φ = W_N`, with
/// the `n`-copy conversion as the multi-copy witness.
pub fn w_catalysis(n_parties: usize, copies: usize) -> Result<ConversionWitness> {
    if n_parties < 3 {
        return Err(Error::InvalidArgument("W catalysis needs N >= 3".into()));
    }
    let (multi, _) = ghz_power_to_w_power(n_parties, n_parties - 1, copies)?;
    let psi = ghz_state(n_parties, n_parties - 1)?;
    let phi = w_state(n_parties)?;
    catalysis_witness(&psi, &phi, copies, &multi)
}

/// The W-family catalyst `W_N ⊕ GHZ_N^{N−1}`.
pub fn w_simple_catalysis(n_parties: usize) -> Result<ConversionWitness> {
    let report = smlocc_w_demo(n_parties)?;
    let psi = ghz_state(n_parties, n_parties - 1)?;
    let phi = w_state(n_parties)?;
    simple_catalysis_witness(&psi, &phi, &report.witness)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalyst_shapes() {
        let psi = ghz_state(5, 4).unwrap();
        let phi = w_state(5).unwrap();
        assert_eq!(build_catalyst(&psi, &phi, 1).unwrap(), phi);
        let c = build_catalyst(&psi, &phi, 2).unwrap();
        assert_eq!(c.local_dims(), &[12; 5]);
        assert_eq!(c.nnz(), 4 * 5 + 25);
        let simple = direct_sum(&phi, &psi).unwrap();
        assert_eq!(simple.local_dims(), &[6; 5]);
        assert_eq!(simple.nnz(), 5 + 4);
    }

    #[test]
    fn distribute_is_a_relabeling() {
        let x = ghz_state(2, 2).unwrap();
        let a = w_state(2).unwrap();
        let b = ghz_state(2, 3).unwrap();
        let fused = tensor_product(&x, &direct_sum(&a, &b).unwrap(), FuseMode::PerPartyFuse).unwrap();
        let blocks = direct_sum(
            &tensor_product(&x, &a, FuseMode::PerPartyFuse).unwrap(),
            &tensor_product(&x, &b, FuseMode::PerPartyFuse).unwrap(),
        )
        .unwrap();
        let p = distribute_permutation(2, &[2, 3]).unwrap();
        let ops = LocalOperatorSet::new(vec![p.clone(), p]).unwrap();
        assert_eq!(crate::tensors::apply_local(&ops, &fused).unwrap(), blocks);
    }

    #[test]
    fn single_copy_catalysis_is_degenerate() {
        // ψ = GHZ_3^3 → φ = W_3 is a one-copy conversion; n = 1 uses it directly.
        let psi = ghz_state(3, 3).unwrap();
        let phi = w_state(3).unwrap();
        let one = ConversionWitness::new(
            psi.clone(),
            phi.clone(),
            LocalOperatorSet::new(vec![
                Matrix::from_rows(vec![
                    vec![Scalar::zero(), Scalar::one(), Scalar::one()],
                    vec![Scalar::one(), Scalar::zero(), Scalar::zero()],
                ])
                .unwrap(),
                Matrix::from_rows(vec![
                    vec![Scalar::one(), Scalar::zero(), Scalar::one()],
                    vec![Scalar::zero(), Scalar::one(), Scalar::zero()],
                ])
                .unwrap(),
                Matrix::from_rows(vec![
                    vec![Scalar::one(), Scalar::one(), Scalar::zero()],
                    vec![Scalar::zero(), Scalar::zero(), Scalar::one()],
                ])
                .unwrap(),
            ])
            .unwrap(),
        )
        .unwrap();
        let w = catalysis_witness(&psi, &phi, 1, &one).unwrap();
        assert_eq!(w.verify(0.0).unwrap(), 0.0);
        assert_eq!(w.source, tensor_product(&psi, &phi, FuseMode::PerPartyFuse).unwrap());
    }

    #[test]
    fn three_copies() {
        // 4^3 = 64 ≥ 23 terms
        let (w, terms) = ghz_power_to_w_power(5, 4, 3).unwrap();
        assert!(terms <= 64);
        assert!(w.verify(WITNESS_TOL).unwrap() < 1e-8);
        assert!(ghz_power_to_w_power(4, 3, 1).is_err());
    }

    #[test]
    fn smlocc_rejects_small_n() {
        assert!(matches!(smlocc_w_demo(4), Err(Error::Precondition(_))));
        assert!(smlocc_w_demo_with_level(5, 3).is_err());
    }

    #[test]
    fn smlocc_five_parties() {
        let r = smlocc_w_demo(5).unwrap();
        assert_eq!(r.fused_rank, 16);
        assert_eq!(r.certificate_terms, 13);
        assert!(r.residual < 1e-8);
        assert!(r.single_copy.w_rank > r.single_copy.ghz_rank);
        let small = smlocc_w_demo_with_level(5, 4).unwrap();
        assert_eq!(small.ghz_level, 4);
    }

    #[test]
    fn five_party_catalysts() {
        let generic = w_catalysis(5, 2).unwrap();
        assert!(generic.verify(WITNESS_TOL).unwrap() < 1e-8);
        assert!(generic.source.nnz() < 100_000);
        let simple = w_simple_catalysis(5).unwrap();
        assert!(simple.verify(WITNESS_TOL).unwrap() < 1e-8);
        let c = direct_sum(&w_state(5).unwrap(), &ghz_state(5, 4).unwrap()).unwrap();
        assert_eq!(simple.target, tensor_product(&w_state(5).unwrap(), &c, FuseMode::PerPartyFuse).unwrap());
    }
}
