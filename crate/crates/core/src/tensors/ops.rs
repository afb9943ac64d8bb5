use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::scalar::Scalar;
use super::state::{MultiIndex, SparseState};
use crate::error::{Error, Result};

/// Default magnitude below which float amplitudes are dropped after contraction.
pub const DEFAULT_CHOP: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FuseMode {
    /// Party `i` of the result holds parties `i` of both inputs as one system.
    PerPartyFuse,
    /// The result has the parties of `a` followed by the parties of `b`.
    AppendParties,
}

pub fn tensor_product(a: &SparseState, b: &SparseState, mode: FuseMode) -> Result<SparseState> {
    let (da, db) = (a.local_dims(), b.local_dims());
    let dims: Vec<usize> = match mode {
        FuseMode::PerPartyFuse => {
            if da.len() != db.len() {
                return Err(Error::PartyCountMismatch(da.len(), db.len()));
            }
            da.iter().zip(db).map(|(x, y)| x * y).collect()
        }
        FuseMode::AppendParties => da.iter().chain(db).copied().collect(),
    };
    let mut amps = BTreeMap::new();
    for (ia, va) in a.iter() {
        for (ib, vb) in b.iter() {
            let idx: MultiIndex = match mode {
                FuseMode::PerPartyFuse => ia
                    .iter()
                    .zip(ib)
                    .zip(db)
                    .map(|((&ja, &jb), &d)| ja * d + jb)
                    .collect(),
                FuseMode::AppendParties => ia.iter().chain(ib).copied().collect(),
            };
            let v = va * vb;
            if !v.is_zero() {
                amps.insert(idx, v);
            }
        }
    }
    Ok(SparseState::from_map_unchecked(dims, amps))
}

/// `s` fused with itself `copies` times (per-party).
pub fn tensor_power(s: &SparseState, copies: usize) -> Result<SparseState> {
    if copies == 0 {
        return Err(Error::InvalidArgument("tensor power needs at least one copy".into()));
    }
    let mut out = s.clone();
    for _ in 1..copies {
        out = tensor_product(&out, s, FuseMode::PerPartyFuse)?;
    }
    Ok(out)
}

pub fn direct_sum(a: &SparseState, b: &SparseState) -> Result<SparseState> {
    let (da, db) = (a.local_dims(), b.local_dims());
    if da.len() != db.len() {
        return Err(Error::PartyCountMismatch(da.len(), db.len()));
    }
    let dims = da.iter().zip(db).map(|(x, y)| x + y).collect();
    let mut amps: BTreeMap<MultiIndex, Scalar> =
        a.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    for (k, v) in b.iter() {
        let shifted = k.iter().zip(da).map(|(j, d)| j + d).collect();
        amps.insert(shifted, v.clone());
    }
    Ok(SparseState::from_map_unchecked(dims, amps))
}

/// One matrix per party; matrix `k` maps party `k`'s input space (columns)
/// to its output space (rows).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocalOperatorSet(Vec<Matrix>);

impl LocalOperatorSet {
    pub fn new(ops: Vec<Matrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidArgument("operator set needs at least one party".into()));
        }
        Ok(LocalOperatorSet(ops))
    }

    pub fn identity(dims: &[usize]) -> Self {
        LocalOperatorSet(dims.iter().map(|&d| Matrix::identity(d)).collect())
    }

    pub fn ops(&self) -> &[Matrix] {
        &self.0
    }

    pub fn into_ops(self) -> Vec<Matrix> {
        self.0
    }

    pub fn num_parties(&self) -> usize {
        self.0.len()
    }

    pub fn input_dims(&self) -> Vec<usize> {
        self.0.iter().map(Matrix::cols).collect()
    }

    pub fn output_dims(&self) -> Vec<usize> {
        self.0.iter().map(Matrix::rows).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(Matrix::is_exact)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Matrix, &Matrix) -> Result<Matrix>) -> Result<Self> {
        if self.0.len() != other.0.len() {
            return Err(Error::PartyCountMismatch(self.0.len(), other.0.len()));
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()
            .map(LocalOperatorSet)
    }

    /// Party-wise Kronecker product, matching [`FuseMode::PerPartyFuse`].
    pub fn kron(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| Ok(a.kron(b)))
    }

    /// Party-wise block-diagonal sum, matching [`direct_sum`].
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| Ok(a.direct_sum(b)))
    }

    /// Party-wise product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, Matrix::matmul)
    }

    /// Scales the operator of one party.
    pub fn scale_party(&mut self, party: usize, factor: &Scalar) {
        self.0[party] = self.0[party].scaled(factor);
    }
}

pub fn apply_local(ops: &LocalOperatorSet, s: &SparseState) -> Result<SparseState> {
    apply_local_with_chop(ops, s, DEFAULT_CHOP)
}

/// Applies the product operator one party at a time.
pub fn apply_local_with_chop(ops: &LocalOperatorSet, s: &SparseState, chop: f64) -> Result<SparseState> {
    if ops.num_parties() != s.num_parties() {
        return Err(Error::PartyCountMismatch(ops.num_parties(), s.num_parties()));
    }
    if ops.input_dims() != s.local_dims() {
        return Err(Error::ShapeMismatch(format!(
            "operator input dims {:?} do not match state dims {:?}",
            ops.input_dims(),
            s.local_dims()
        )));
    }
    let mut dims = s.local_dims().to_vec();
    let mut cur: BTreeMap<MultiIndex, Scalar> = s.amplitudes().clone();
    for (party, m) in ops.ops().iter().enumerate() {
        let supports: Vec<Vec<(usize, Scalar)>> = (0..m.cols()).map(|c| m.column_support(c)).collect();
        let mut next: BTreeMap<MultiIndex, Scalar> = BTreeMap::new();
        for (idx, v) in &cur {
            for (r, entry) in &supports[idx[party]] {
                let mut out = idx.clone();
                out[party] = *r;
                let term = entry * v;
                match next.get_mut(&out) {
                    Some(acc) => *acc = &*acc + &term,
                    None => {
                        next.insert(out, term);
                    }
                }
            }
        }
        dims[party] = m.rows();
        next.retain(|_, v| !v.is_zero() && (v.is_exact() || v.abs() >= chop));
        cur = next;
    }
    Ok(SparseState::from_map_unchecked(dims, cur))
}

/// Output party `i` is input party `perm[i]`.
pub fn permute_parties(s: &SparseState, perm: &[usize]) -> Result<SparseState> {
    check_permutation(perm, s.num_parties())?;
    let dims = perm.iter().map(|&p| s.local_dims()[p]).collect();
    let amps = s
        .iter()
        .map(|(k, v)| (perm.iter().map(|&p| k[p]).collect(), v.clone()))
        .collect();
    Ok(SparseState::from_map_unchecked(dims, amps))
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidPermutation(perm.to_vec()));
    }
    Ok(())
}

pub fn invert_permutation(perm: &[usize]) -> Result<Vec<usize>> {
    check_permutation(perm, perm.len())?;
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    Ok(inv)
}

fn split_index(mut j: usize, shape: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; shape.len()];
    for (slot, &d) in digits.iter_mut().zip(shape).rev() {
        *slot = j % d;
        j /= d;
    }
    digits
}

fn join_index(digits: &[usize], shape: &[usize]) -> usize {
    digits.iter().zip(shape).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// The basis permutation of a fused local space with factor dims `shape`
/// that moves factor `perm[f]` to position `f`. Returned as the image of
/// each basis index.
pub fn factor_permutation_map(shape: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    check_permutation(perm, shape.len())?;
    let total: usize = shape.iter().product();
    let out_shape: Vec<usize> = perm.iter().map(|&p| shape[p]).collect();
    Ok((0..total)
        .map(|j| {
            let digits = split_index(j, shape);
            let moved: Vec<usize> = perm.iter().map(|&p| digits[p]).collect();
            join_index(&moved, &out_shape)
        })
        .collect())
}

/// Permutation matrix of [`factor_permutation_map`].
pub fn factor_permutation_matrix(shape: &[usize], perm: &[usize]) -> Result<Matrix> {
    Matrix::permutation(&factor_permutation_map(shape, perm)?)
}

/// Reorders the fused tensor factors inside every party. `shapes[p]` lists
/// the factor dims of party `p` (most significant first); the same `perm`
/// applies to every party.
pub fn permute_local_factors(s: &SparseState, shapes: &[Vec<usize>], perm: &[usize]) -> Result<SparseState> {
    if shapes.len() != s.num_parties() {
        return Err(Error::PartyCountMismatch(shapes.len(), s.num_parties()));
    }
    for (p, shape) in shapes.iter().enumerate() {
        if shape.iter().product::<usize>() != s.local_dims()[p] {
            return Err(Error::ShapeMismatch(format!(
                "factor shape {shape:?} does not multiply to local dim {}",
                s.local_dims()[p]
            )));
        }
    }
    let maps = shapes
        .iter()
        .map(|shape| factor_permutation_map(shape, perm))
        .collect::<Result<Vec<_>>>()?;
    let amps = s
        .iter()
        .map(|(k, v)| (k.iter().zip(&maps).map(|(&j, m)| m[j]).collect(), v.clone()))
        .collect();
    Ok(SparseState::from_map_unchecked(s.local_dims().to_vec(), amps))
}

/// Fuses the consecutive parties `first..first + count` into a single party
/// (first of them most significant).
pub fn merge_parties(s: &SparseState, first: usize, count: usize) -> Result<SparseState> {
    let n = s.num_parties();
    if count == 0 || first + count > n {
        return Err(Error::InvalidArgument(format!(
            "cannot merge parties {first}..{} of {n}",
            first + count
        )));
    }
    let dims = s.local_dims();
    let group = &dims[first..first + count];
    let mut new_dims = dims[..first].to_vec();
    new_dims.push(group.iter().product());
    new_dims.extend_from_slice(&dims[first + count..]);
    let amps = s
        .iter()
        .map(|(k, v)| {
            let mut idx = k[..first].to_vec();
            idx.push(join_index(&k[first..first + count], group));
            idx.extend_from_slice(&k[first + count..]);
            (idx, v.clone())
        })
        .collect();
    Ok(SparseState::from_map_unchecked(new_dims, amps))
}

/// Result of [`equal_up_to_scale`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleMatch {
    pub equal: bool,
    /// Best-fit `λ` with `a ≈ λ·b`.
    pub scale: Scalar,
    /// `‖a − λb‖ / ‖a‖` (0 when the comparison was exact and succeeded).
    pub residual: f64,
}

/// Decides whether `a = λ·b` for some nonzero `λ`: exactly when both states
/// are rational, otherwise within relative tolerance `tol`.
pub fn equal_up_to_scale(a: &SparseState, b: &SparseState, tol: f64) -> Result<ScaleMatch> {
    if a.local_dims() != b.local_dims() {
        return Err(Error::ShapeMismatch(format!(
            "comparing dims {:?} with {:?}",
            a.local_dims(),
            b.local_dims()
        )));
    }
    if b.is_zero() {
        return Err(Error::ZeroState);
    }
    if a.is_exact() && b.is_exact() {
        let (k0, b0) = b.iter().next().expect("nonzero state");
        let scale = match a.amplitude(k0) {
            Some(a0) => a0 / b0,
            None => Scalar::zero(),
        };
        let diff = a.combine(b, &-&scale)?;
        let residual = if diff.is_zero() {
            0.0
        } else {
            diff.norm() / a.norm().max(f64::MIN_POSITIVE)
        };
        return Ok(ScaleMatch {
            equal: diff.is_zero() && !scale.is_zero(),
            scale,
            residual,
        });
    }
    // Least-squares scale <b,a>/<b,b>.
    let mut num = num_complex::Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (k, vb) in b.iter() {
        let zb = vb.to_c64();
        den += zb.norm_sqr();
        if let Some(va) = a.amplitude(k) {
            num += zb.conj() * va.to_c64();
        }
    }
    let scale = Scalar::from_c64(num / den);
    let diff = a.combine(b, &-&scale)?;
    let an = a.norm();
    let residual = if an == 0.0 { f64::INFINITY } else { diff.norm() / an };
    Ok(ScaleMatch {
        equal: residual <= tol && scale.abs() > 0.0,
        scale,
        residual,
    })
}
