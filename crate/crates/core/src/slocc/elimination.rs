//! Removing lower-order cross terms from `W^{⊗n}` by invertible operators on
//! a single party.
//!
//! Each party of `Ω` holds `n` qubits, one per copy slot, fused with the
//! first slot most significant. A cross term is labelled by the set `B` of
//! slots that carry a W state; the other slots carry `|0…0⟩`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::witness::ConversionWitness;
use crate::error::{Error, Result};
use crate::tensors::{apply_local, tensor_product, FuseMode, LocalOperatorSet, Matrix, Scalar, SparseState};
use crate::wpower::w_state;

/// Copy slots holding a W state in a cross term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SlotPattern(BTreeSet<usize>);

impl SlotPattern {
    pub fn new(slots: impl IntoIterator<Item = usize>) -> Self {
        SlotPattern(slots.into_iter().collect())
    }

    /// Slots `π(0), …, π(k−1)`: the W factors of `π · (W^{⊗k} ⊗ 0^{⊗(n−k)})`.
    pub fn from_permutation(perm: &[usize], k: usize) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        if k > n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        Ok(SlotPattern::new(perm[..k].iter().copied()))
    }

    pub fn slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, slot: usize) -> bool {
        self.0.contains(&slot)
    }

    /// Local basis index with a `1` exactly in these slots.
    fn mask(&self, n: usize) -> usize {
        self.slots().map(|s| 1 << (n - 1 - s)).sum()
    }
}

/// `W_M^{⊗|B|}` in the slots of `B`, `|0^M⟩` elsewhere.
pub fn slot_pattern_state(parties: usize, n: usize, pattern: &SlotPattern) -> Result<SparseState> {
    let w = w_state(parties)?;
    let zero = SparseState::basis(vec![2; parties], vec![0; parties])?;
    let mut acc: Option<SparseState> = None;
    for s in 0..n {
        let f = if pattern.contains(s) { &w } else { &zero };
        acc = Some(match acc {
            None => f.clone(),
            Some(a) => tensor_product(&a, f, FuseMode::PerPartyFuse)?,
        });
    }
    acc.ok_or_else(|| Error::InvalidArgument("need at least one copy slot".into()))
}

/// `W_{N−1}^{⊗n} + Σ_B c_B Ψ_B` on `N − 1` parties.
pub fn elimination_source(n_parties: usize, n: usize, coeffs: &BTreeMap<SlotPattern, Scalar>) -> Result<SparseState> {
    let m = check_shape(n_parties, n)?;
    let full = SlotPattern::new(0..n);
    let mut omega = slot_pattern_state(m, n, &full)?;
    for (b, c) in coeffs {
        if b.len() >= n || b.slots().any(|s| s >= n) {
            return Err(Error::InvalidArgument(format!(
                "cross term pattern {:?} must be a proper subset of 0..{n}",
                b.0
            )));
        }
        omega = omega.combine(&slot_pattern_state(m, n, b)?, c)?;
    }
    Ok(omega)
}

fn check_shape(n_parties: usize, n: usize) -> Result<usize> {
    if n_parties < 3 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "elimination needs N >= 3 and n >= 1, got N = {n_parties}, n = {n}"
        )));
    }
    if n > 16 {
        return Err(Error::ResourceGuard(format!("n = {n} copy slots")));
    }
    Ok(n_parties - 1)
}

/// On party 0: `|b⟩ ↦ |b⟩ + δ|b ∖ S⟩` for every local basis word `b ⊇ S`.
/// Upper unitriangular, so invertible with determinant 1. For `|S| = 1` it
/// is `|1⟩ ↦ |1⟩ + δ|0⟩` on one slot and the identity on the others.
pub fn clearing_operator(n: usize, clear: &SlotPattern, delta: &Scalar) -> Matrix {
    let dim = 1usize << n;
    let s = clear.mask(n);
    let mut m = Matrix::identity(dim);
    if s == 0 {
        return m.scaled(&(&Scalar::one() + delta));
    }
    for b in (0..dim).filter(|b| b & s == s) {
        m.set(b & !s, b, delta.clone());
    }
    m
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EliminationStep {
    /// Cross term removed by this step.
    pub pattern: SlotPattern,
    /// Slots cleared on party 0.
    pub cleared: SlotPattern,
    pub delta: Scalar,
    pub operator: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Elimination {
    pub steps: Vec<EliminationStep>,
    #[serde(skip)]
    pub witness: ConversionWitness,
}

/// Converts `Ω = W^{⊗n} + Σ c_B Ψ_B` (on `N − 1` parties) to `W^{⊗n}`.
///
/// Terms are removed largest pattern first. Clearing `S = [n] ∖ B` sends the
/// head to `head − c_B Ψ_B` and any other `Ψ_{B'}` with `S ⊆ B'` to a
/// strictly smaller pattern, so every step only creates work that comes
/// later. The state is recomputed from scratch after each step.
pub fn lemma_elimination(n_parties: usize, n: usize, coeffs: &BTreeMap<SlotPattern, Scalar>) -> Result<Elimination> {
    let m = check_shape(n_parties, n)?;
    let omega = elimination_source(n_parties, n, coeffs)?;
    let target = slot_pattern_state(m, n, &SlotPattern::new(0..n))?;
    let full_mask = (1usize << n) - 1;
    let head_idx: Vec<usize> = std::iter::once(full_mask).chain(std::iter::repeat_n(0, m - 1)).collect();
    // clearing can create patterns absent from `coeffs`, so count every
    // proper subset rather than the nonzero inputs
    let max_passes = 2 * ((1usize << n) - 1);

    let mut ops = LocalOperatorSet::identity(&vec![1 << n; m]);
    let mut state = omega.clone();
    let mut steps = Vec::new();
    loop {
        let head = state.amplitude(&head_idx).cloned().ok_or(Error::ZeroState)?;
        let next = pending_patterns(n)
            .into_iter()
            .find_map(|b| {
                let mut idx = vec![0; m];
                idx[0] = b.mask(n);
                state.amplitude(&idx).map(|c| (b, c / &head))
            });
        let Some((pattern, c)) = next else { break };
        if steps.len() >= max_passes {
            return Err(Error::NonTermination {
                passes: steps.len(),
                residual: Box::new(state),
            });
        }
        let cleared = SlotPattern::new((0..n).filter(|s| !pattern.contains(*s)));
        let delta = -&c;
        let op = clearing_operator(n, &cleared, &delta);
        let mut step_ops = LocalOperatorSet::identity(&vec![1 << n; m]);
        step_ops = {
            let mut v = step_ops.into_ops();
            v[0] = op.clone();
            LocalOperatorSet::new(v)?
        };
        state = apply_local(&step_ops, &state)?;
        ops = step_ops.compose(&ops)?;
        steps.push(EliminationStep {
            pattern,
            cleared,
            delta,
            operator: op,
        });
    }
    let witness = ConversionWitness::new(omega, target, ops)?;
    Ok(Elimination { steps, witness })
}

/// Proper subsets of `0..n`, largest first.
fn pending_patterns(n: usize) -> Vec<SlotPattern> {
    let mut all: Vec<SlotPattern> = (0..(1usize << n) - 1)
        .map(|bits| SlotPattern::new((0..n).filter(|s| bits & (1 << (n - 1 - s)) != 0)))
        .collect();
    all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(pattern: &[usize], c: Scalar) -> BTreeMap<SlotPattern, Scalar> {
        BTreeMap::from([(SlotPattern::new(pattern.iter().copied()), c)])
    }

    #[test]
    fn empty_coefficients_give_identity() {
        let e = lemma_elimination(4, 2, &BTreeMap::new()).unwrap();
        assert!(e.steps.is_empty());
        assert_eq!(e.witness.ops, LocalOperatorSet::identity(&[4, 4, 4]));
    }

    #[test]
    fn one_term_one_step() {
        let coeffs = single(&[0], Scalar::ratio(2, 3));
        let e = lemma_elimination(4, 2, &coeffs).unwrap();
        assert_eq!(e.steps.len(), 1);
        // clearing slot 1 on party 0: |1⟩ ↦ |1⟩ − (2/3)|0⟩ there
        let op = &e.steps[0].operator;
        assert_eq!(op.get(0, 1), &Scalar::ratio(-2, 3));
        assert_eq!(op.get(2, 3), &Scalar::ratio(-2, 3));
        assert_eq!(op.get(0, 2), &Scalar::zero());
        assert_eq!(e.witness.verify(0.0).unwrap(), 0.0);
        assert_eq!(e.witness.scale, Scalar::one());
    }

    #[test]
    fn single_slot_operator_is_a_slot_kronecker() {
        let gamma = Scalar::int(5);
        let slot = Matrix::from_rows(vec![vec![Scalar::one(), gamma.clone()], vec![Scalar::zero(), Scalar::one()]]).unwrap();
        let expect = Matrix::identity(2).kron(&slot).kron(&Matrix::identity(2));
        assert_eq!(clearing_operator(3, &SlotPattern::new([1]), &gamma), expect);
    }

    #[test]
    fn all_patterns_three_slots() {
        let coeffs: BTreeMap<SlotPattern, Scalar> = pending_patterns(3)
            .into_iter()
            .filter(|b| !b.is_empty())
            .enumerate()
            .map(|(i, b)| (b, Scalar::ratio(i as i64 + 1, 7)))
            .collect();
        assert_eq!(coeffs.len(), 6);
        let e = lemma_elimination(4, 3, &coeffs).unwrap();
        assert_eq!(e.witness.verify(0.0).unwrap(), 0.0);
        for s in &e.steps {
            assert_eq!(s.operator.determinant().unwrap(), Scalar::one());
        }
    }

    #[test]
    fn empty_pattern_is_a_global_offset() {
        let coeffs = single(&[], Scalar::int(3));
        let e = lemma_elimination(4, 2, &coeffs).unwrap();
        assert_eq!(e.steps.len(), 1);
        assert_eq!(e.witness.verify(0.0).unwrap(), 0.0);
    }

    #[test]
    fn cascade_reaches_patterns_missing_from_input() {
        // clearing slot 0 for {1, 2} also sends the {0} term down to ∅
        let coeffs = BTreeMap::from([
            (SlotPattern::new([1, 2]), Scalar::int(1)),
            (SlotPattern::new([0]), Scalar::int(2)),
            (SlotPattern::new([1]), Scalar::int(3)),
        ]);
        let e = lemma_elimination(4, 3, &coeffs).unwrap();
        assert!(e.steps.len() > 3);
        assert_eq!(e.witness.verify(0.0).unwrap(), 0.0);
    }

    #[test]
    fn permutation_labels() {
        let p = SlotPattern::from_permutation(&[2, 0, 1], 2).unwrap();
        assert_eq!(p, SlotPattern::new([0, 2]));
        assert!(SlotPattern::from_permutation(&[0, 0, 1], 1).is_err());
    }

    #[test]
    fn full_pattern_is_rejected() {
        assert!(lemma_elimination(4, 2, &single(&[0, 1], Scalar::one())).is_err());
    }
}
