use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::scalar::{Scalar, ScalarRepr};
use crate::error::{Error, Result};

/// Basis label: one local index per party.
pub type MultiIndex = Vec<usize>;

/// Multipartite pure state stored as a sparse amplitude map.
///
/// States are unnormalized. No stored amplitude is zero, and keys are kept in
/// lexicographic order so that serialization is canonical.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    dims: Vec<usize>,
    amps: BTreeMap<MultiIndex, Scalar>,
}

impl SparseState {
    /// The zero state on the given local dimensions.
    pub fn zero(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "local dims must be a nonempty list of positive integers, got {dims:?}"
            )));
        }
        Ok(SparseState {
            dims,
            amps: BTreeMap::new(),
        })
    }

    /// Builds a state from (index, amplitude) pairs. Repeated indices are
    /// summed and zero results dropped.
    pub fn from_entries<I>(dims: Vec<usize>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Scalar)>,
    {
        let mut state = SparseState::zero(dims)?;
        let mut acc: HashMap<MultiIndex, Scalar> = HashMap::new();
        for (idx, amp) in entries {
            state.check_index(&idx)?;
            match acc.get_mut(&idx) {
                Some(v) => *v = &*v + &amp,
                None => {
                    acc.insert(idx, amp);
                }
            }
        }
        state.amps = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(state)
    }

    /// A single computational-basis product state with amplitude 1.
    pub fn basis(dims: Vec<usize>, idx: MultiIndex) -> Result<Self> {
        SparseState::from_entries(dims, [(idx, Scalar::one())])
    }

    pub(crate) fn from_map_unchecked(dims: Vec<usize>, amps: BTreeMap<MultiIndex, Scalar>) -> Self {
        debug_assert!(amps.values().all(|v| !v.is_zero()));
        SparseState { dims, amps }
    }

    fn check_index(&self, idx: &[usize]) -> Result<()> {
        if idx.len() != self.dims.len() || idx.iter().zip(&self.dims).any(|(i, d)| i >= d) {
            return Err(Error::IndexOutOfRange {
                index: idx.to_vec(),
                dims: self.dims.clone(),
            });
        }
        Ok(())
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn nnz(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    /// True when every stored amplitude is an exact rational.
    pub fn is_exact(&self) -> bool {
        self.amps.values().all(Scalar::is_exact)
    }

    pub fn amplitude(&self, idx: &[usize]) -> Option<&Scalar> {
        self.amps.get(idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Scalar)> {
        self.amps.iter()
    }

    pub fn amplitudes(&self) -> &BTreeMap<MultiIndex, Scalar> {
        &self.amps
    }

    pub fn scaled(&self, factor: &Scalar) -> SparseState {
        let amps = self
            .amps
            .iter()
            .map(|(k, v)| (k.clone(), v * factor))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        SparseState::from_map_unchecked(self.dims.clone(), amps)
    }

    pub fn add(&self, other: &SparseState) -> Result<SparseState> {
        self.combine(other, &Scalar::one())
    }

    pub fn sub(&self, other: &SparseState) -> Result<SparseState> {
        self.combine(other, &Scalar::int(-1))
    }

    /// `self + factor * other`.
    pub fn combine(&self, other: &SparseState, factor: &Scalar) -> Result<SparseState> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!(
                "cannot add states with dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        let mut amps = self.amps.clone();
        for (k, v) in &other.amps {
            let term = v * factor;
            let entry = amps.entry(k.clone()).or_insert_with(Scalar::zero);
            *entry = &*entry + &term;
            if entry.is_zero() {
                amps.remove(k);
            }
        }
        Ok(SparseState::from_map_unchecked(self.dims.clone(), amps))
    }

    /// Euclidean norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amps.values().map(|v| v.abs().powi(2)).sum::<f64>().sqrt()
    }

    /// Converts every amplitude to the complex-float backend.
    pub fn to_complex(&self) -> SparseState {
        let amps = self
            .amps
            .iter()
            .map(|(k, v)| (k.clone(), v.to_complex()))
            .collect();
        SparseState::from_map_unchecked(self.dims.clone(), amps)
    }

    /// Drops float amplitudes with magnitude below `threshold`. Exact
    /// amplitudes are never dropped.
    pub fn chopped(&self, threshold: f64) -> SparseState {
        let amps = self
            .amps
            .iter()
            .filter(|(_, v)| v.is_exact() || v.abs() >= threshold)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        SparseState::from_map_unchecked(self.dims.clone(), amps)
    }
}

#[derive(Serialize, Deserialize)]
struct AmplitudeEntry {
    idx: Vec<usize>,
    #[serde(flatten)]
    value: ScalarRepr,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    local_dims: Vec<usize>,
    amplitudes: Vec<AmplitudeEntry>,
}

impl Serialize for SparseState {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        StateRepr {
            local_dims: self.dims.clone(),
            amplitudes: self
                .amps
                .iter()
                .map(|(k, v)| AmplitudeEntry {
                    idx: k.clone(),
                    value: v.into(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SparseState {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = StateRepr::deserialize(de)?;
        let entries = repr
            .amplitudes
            .iter()
            .map(|e| Ok((e.idx.clone(), Scalar::try_from(&e.value)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        SparseState::from_entries(repr.local_dims, entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_accumulate_and_drop_zeros() {
        let s = SparseState::from_entries(
            vec![2, 2],
            [
                (vec![0, 1], Scalar::one()),
                (vec![0, 1], Scalar::int(-1)),
                (vec![1, 1], Scalar::ratio(1, 2)),
            ],
        )
        .unwrap();
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.amplitude(&[1, 1]), Some(&Scalar::ratio(1, 2)));
    }

    #[test]
    fn rejects_out_of_range_index() {
        let err = SparseState::from_entries(vec![2, 3], [(vec![0, 3], Scalar::one())]);
        assert!(matches!(err, Err(Error::IndexOutOfRange { .. })));
        assert!(SparseState::zero(vec![]).is_err());
        assert!(SparseState::zero(vec![2, 0]).is_err());
    }

    #[test]
    fn canonical_json_is_sorted() {
        let s = SparseState::from_entries(
            vec![2, 2],
            [
                (vec![1, 0], Scalar::ratio(3, 4)),
                (vec![0, 1], Scalar::complex(1.0, -2.0)),
            ],
        )
        .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"local_dims":[2,2],"amplitudes":[{"idx":[0,1],"re":1.0,"im":-2.0},{"idx":[1,0],"q":"3/4"}]}"#
        );
        let back: SparseState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
